"""Deck assembly and the repair loop."""

from .assembler import (
    AssemblyConfig,
    RoundReport,
    assemble,
    assemble_serial,
    sweep_violations,
)

__all__ = ["AssemblyConfig", "RoundReport", "assemble", "assemble_serial", "sweep_violations"]
