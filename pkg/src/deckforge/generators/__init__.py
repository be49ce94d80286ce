"""Slide generators: position weights, selection and slide filling."""

from .knowledge import EMPTY_KNOWLEDGE, GenerationKnowledge
from .selection import admissible, eval_weight, schedule_generators, select_generator
from .slide import COLLISION_RETRIES, generate_slide, run_chart_recipe

__all__ = [
    "COLLISION_RETRIES",
    "EMPTY_KNOWLEDGE",
    "GenerationKnowledge",
    "admissible",
    "eval_weight",
    "generate_slide",
    "run_chart_recipe",
    "schedule_generators",
    "select_generator",
]
