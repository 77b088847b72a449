"""Evaluation strategy selection and series truncation controls."""

from dataclasses import dataclass
from enum import Enum


class Strategy(Enum):
    """How per-mode time kernels are evaluated."""

    DOUBLE_SERIES = "series"
    G_SERIES = "gseries"
    MODE_LAPLACE = "laplace"
    AUTO = "auto"


@dataclass(frozen=True)
class SeriesControls:
    """Truncation caps and tolerances for all series evaluation.

    n_modes: number of radial eigenmodes summed.
    tol_rel: relative quiescence tolerance for the term-stopping rule.
    max_terms: hard cap on terms per series before a non-convergence error.
    strategy: kernel evaluation route; AUTO picks the series for beta <= 0.9
        (falling back per mode to Laplace inversion on refusal) and Laplace
        inversion for beta > 0.9.
    """

    n_modes: int = 50
    tol_rel: float = 1e-12
    max_terms: int = 10_000
    strategy: Strategy = Strategy.AUTO

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")
        if not 0.0 < self.tol_rel < 1.0:
            raise ValueError("tol_rel must lie in (0, 1)")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not isinstance(self.strategy, Strategy):
            raise ValueError("strategy must be a Strategy member")
