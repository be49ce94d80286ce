"""Tests for Omni Cortex."""
