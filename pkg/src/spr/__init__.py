"""Staged program repair and patch-space analysis for a small labeled language."""

from spr.lang import Program, parse_program, render_program

__all__ = ["Program", "parse_program", "render_program"]
__version__ = "0.1.0"
