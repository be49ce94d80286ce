"""Deckforge - themed slide decks generated from a single audience suggestion."""

__version__ = "0.3.0"
