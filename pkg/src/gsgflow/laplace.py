"""Numerical inverse Laplace transformation of the per-mode image functions.

Gaver-Stehfest was chosen because every transform here is smooth,
non-oscillatory and evaluable on the positive real axis, so no complex
arithmetic is needed. The binding contract is accuracy, not a particular
weight table: the classic Stehfest sum at degree 16 carries an intrinsic
~4e-8 error on L^-1{1/q^2} in any precision, so the scalar entry points
run the sum at degree n_terms + 8 with exact rational weights and mpmath
working precision, which restores the documented bounds while keeping the
same real-axis node family q = k*ln2/t.

A float64 batch variant (degree n_terms, vectorized over t) is provided
for bulk sampling where ~1e-7 relative accuracy suffices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from .errors import DomainError

_DEGREE_BOOST = 8


def _check_n_terms(n_terms: int) -> None:
    if n_terms % 2 != 0 or not 8 <= n_terms <= 20:
        raise DomainError("n_terms must be even and within [8, 20]")


@lru_cache(maxsize=None)
def stehfest_weights(degree: int) -> tuple:
    """Exact rational Stehfest weights V_1..V_degree (degree even)."""
    if degree % 2 != 0 or degree < 2:
        raise DomainError("degree must be a positive even integer")
    half = degree // 2
    weights = []
    for k in range(1, degree + 1):
        acc = Fraction(0)
        for i in range((k + 1) // 2, min(k, half) + 1):
            acc += Fraction(
                i**half * math.factorial(2 * i),
                math.factorial(half - i)
                * math.factorial(i)
                * math.factorial(i - 1)
                * math.factorial(k - i)
                * math.factorial(2 * i - k),
            )
        weights.append((-1) ** (k + half) * acc)
    return tuple(weights)


@lru_cache(maxsize=None)
def _float_weights(degree: int) -> np.ndarray:
    return np.array([float(v) for v in stehfest_weights(degree)])


def invert_stehfest(f, t: float, n_terms: int = 16) -> float:
    """Invert a Laplace transform at time t from real-axis samples.

    f is called with positive mpmath.mpf abscissae q = k*ln2/t; plain
    arithmetic expressions work unchanged. Deterministic.
    """
    if t <= 0.0:
        raise DomainError("invert_stehfest requires t > 0")
    _check_n_terms(n_terms)
    degree = n_terms + _DEGREE_BOOST
    with mp.workdps(max(30, int(1.8 * degree))):
        weights = [mp.mpf(v.numerator) / v.denominator for v in stehfest_weights(degree)]
        a = mp.ln(2) / mp.mpf(t)
        total = mp.fsum(weights[k - 1] * f(k * a) for k in range(1, degree + 1))
        return float(a * total)


def invert_stehfest_batch(f, t: np.ndarray, n_terms: int = 16) -> np.ndarray:
    """float64 Stehfest over an array of times; f maps a (degree, nt) array
    of abscissae to transform values elementwise. Roughly 1e-7 relative
    accuracy on the smooth kernels used here."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise DomainError("invert_stehfest_batch requires t > 0")
    _check_n_terms(n_terms)
    weights = _float_weights(n_terms)
    ln2_over_t = math.log(2.0) / t
    q = np.outer(np.arange(1, n_terms + 1, dtype=float), ln2_over_t)
    return ln2_over_t * np.tensordot(weights, f(q), axes=1)


@dataclass(frozen=True)
class ModeTransform:
    """Per-mode image function F(q) = 1 / (q * [q + alpha*rn2*q^beta + nu*rn2])."""

    nu: float
    alpha: float
    beta: float
    rn2: float


def eval_transform(mt: ModeTransform, q):
    """Evaluate F(q) for q > 0; no branch cuts on the positive real axis."""
    if isinstance(q, np.ndarray):
        if np.any(q <= 0.0):
            raise DomainError("eval_transform requires q > 0")
    elif q <= 0.0:
        raise DomainError("eval_transform requires q > 0")
    return 1.0 / (q * (q + (mt.alpha * mt.rn2) * q**mt.beta + mt.nu * mt.rn2))


def invert_mode_velocity_kernel(mt: ModeTransform, t: float, n_terms: int = 16) -> float:
    """Per-mode velocity time kernel L^-1{F}(t)."""
    return invert_stehfest(lambda q: eval_transform(mt, q), t, n_terms)


def invert_mode_stress_kernel(
    mt: ModeTransform, mu: float, alpha1: float, t: float, n_terms: int = 16
) -> float:
    """Per-mode shear time kernel L^-1{(mu + alpha1*q^beta) * F(q)}(t)."""
    return invert_stehfest(
        lambda q: (mu + alpha1 * q**mt.beta) * eval_transform(mt, q), t, n_terms
    )
