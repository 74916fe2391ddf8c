"""Pairwise-comparison preference elicitation and analysis workbench.

Subpackages and modules:

- ``numerics``: special functions, eigensolvers and least squares used by
  every analysis module (numba-accelerated kernels with a numpy fallback).
- ``ahp``: reciprocal judgment matrices, priority vectors, consistency.
- ``study``: study designs, subject records, descriptive statistics.
- ``linmod``: ANOVA, LSD post-hoc tests and effects-coded regression.
- ``conjoint``: per-subject part-worth decomposition and choice simulators.
- ``factor``: maximum-likelihood factor extraction, rotations and the
  hierarchical (general + residualized primaries) decomposition.
- ``formats`` / ``report`` / ``cli``: file formats, report pipeline, CLI.
- ``sessions`` / ``service``: live questionnaire sessions over HTTP.
"""

__version__ = "0.1.0"
