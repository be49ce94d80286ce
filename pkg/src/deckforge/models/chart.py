"""Abstract chart description rendered by the exporters."""

import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

ChartKind = Literal["histogram", "pie", "scatter"]


class ChartCategory(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str = Field(..., min_length=1)
    value: float = Field(..., ge=0.0)


class ChartSpec(BaseModel):
    """Histogram, pie or scatter chart with synthesized data."""

    model_config = ConfigDict(frozen=True)

    kind: ChartKind
    title: str
    categories: tuple[ChartCategory, ...] = ()
    points: tuple[tuple[float, float], ...] = ()
    axis_labels: Optional[tuple[str, str]] = None

    @model_validator(mode="after")
    def _check_shape(self) -> "ChartSpec":
        if self.kind in ("histogram", "pie"):
            if not self.categories:
                raise ValueError(f"{self.kind} chart needs at least one category")
            if self.kind == "pie" and self.total() <= 0:
                raise ValueError("pie values must sum to a positive total")
        else:
            if len(self.points) < 2:
                raise ValueError("scatter chart needs at least two points")
            if not all(math.isfinite(x) and math.isfinite(y) for x, y in self.points):
                raise ValueError("scatter points must be finite")
        return self

    def total(self) -> float:
        return math.fsum(c.value for c in self.categories)

    def wedge_angles(self) -> list[tuple[float, float]]:
        """(start, span) in degrees for each pie wedge, clockwise from 12 o'clock."""
        total = self.total()
        angles = []
        start = 0.0
        for category in self.categories:
            span = 360.0 * category.value / total
            angles.append((start, span))
            start += span
        return angles
