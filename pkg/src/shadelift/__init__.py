"""Shading lifts and symmetric self-dualities of group subfactor planar algebras."""

__version__ = "0.1.0"
