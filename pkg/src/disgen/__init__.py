"""Toolkit for generating and evaluating multiple-choice-question distractors."""

__version__ = "0.1.0"

SCHEMA_VERSION = 1
