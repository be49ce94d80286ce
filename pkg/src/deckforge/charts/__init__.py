"""Chart data synthesis."""

from .engine import gen_location_chart, gen_scatter, gen_yesno_chart, normalize_to

__all__ = ["gen_location_chart", "gen_scatter", "gen_yesno_chart", "normalize_to"]
