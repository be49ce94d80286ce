"""Slide seed generation."""

from .walk import SeedSequence, generate_seeds, plan_anchors

__all__ = ["SeedSequence", "generate_seeds", "plan_anchors"]
