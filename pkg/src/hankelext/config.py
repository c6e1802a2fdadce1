"""Tolerance defaults shared by every numeric routine."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # relative singular-value cutoff (times sigma_max) for rank decisions
    rank: float = 1e-9
    # eigenvector matrix must have condition number below 1/eig; also the
    # relative tolerance of the eigenvalue cross-check
    eig: float = 1e-6
    # relative reconstruction residual accepted by the pipelines
    residual: float = 1e-8
    # relative size below which a substituted quadratic relation counts as 0
    quad: float = 1e-7


DEFAULT = Tolerances()
