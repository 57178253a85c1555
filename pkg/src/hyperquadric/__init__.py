"""Verification engine for Gauss-image Lagrangian geometry in hyperquadrics."""

from . import algebra, cli, geometry, moment, rootsys, stability, sympair  # noqa: F401

__version__ = "0.1.0"
