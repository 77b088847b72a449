"""Scalar special functions: Bessel orders 0/1, wall cross-products,
log-gamma, the Lorenzo-Hartley generalized G-function, and signed
log-space series accumulation.

Series with Gamma(k+j+1)-type factors overflow double precision long
before they converge, so every term is composed in (log magnitude, sign)
form and only materialized when the accumulated sum is requested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import j0, j1, y0, y1

from .controls import SeriesControls
from .errors import DomainError, NonConvergenceError

# A signed-log sum whose largest term exceeds the final sum by more than
# this factor is cancellation noise in double precision; refuse it.
CANCELLATION_LIMIT = 1e10

_LOG_CANCELLATION_LIMIT = math.log(CANCELLATION_LIMIT)
# a = 1 - beta below this makes the G-series convergence rate degenerate.
_MIN_SERIES_ORDER = 0.05

_DEFAULT_CONTROLS = SeriesControls()


@dataclass(frozen=True)
class SignedLogValue:
    """A real number stored as natural log of |x| plus a sign in {-1, 0, +1}.

    sign == 0 encodes exact zero; log_magnitude is then ignored.
    """

    log_magnitude: float
    sign: int

    @classmethod
    def from_float(cls, x: float) -> "SignedLogValue":
        if x == 0.0:
            return cls(-math.inf, 0)
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)


class SignedLogAccumulator:
    """Streaming sum of signed log-space terms.

    Keeps an O(1) running estimate for stopping rules, and materializes the
    exact sum on demand: when every term fits the double range the terms are
    exponentiated directly and combined with math.fsum, so the result agrees
    bit-for-bit with compensated summation of the term values; otherwise a
    single exponent shift is applied first.
    """

    __slots__ = ("_logs", "_signs", "_max_log", "_shift", "_acc")

    def __init__(self):
        self._logs = []
        self._signs = []
        self._max_log = -math.inf
        self._shift = None
        self._acc = 0.0

    def __len__(self):
        return len(self._logs)

    @property
    def max_term_log(self) -> float:
        return self._max_log

    def add(self, log_magnitude: float, sign: int) -> None:
        if sign == 0 or log_magnitude == -math.inf:
            return
        self._logs.append(log_magnitude)
        self._signs.append(sign)
        if log_magnitude > self._max_log:
            self._max_log = log_magnitude
        if self._shift is None:
            self._shift = log_magnitude
            self._acc = float(sign)
        elif log_magnitude > self._shift + 1.0:
            # renormalize so exp() below never overflows
            self._acc *= math.exp(self._shift - log_magnitude)
            self._shift = log_magnitude
            self._acc += sign
        else:
            self._acc += sign * math.exp(log_magnitude - self._shift)

    def add_value(self, value: SignedLogValue) -> None:
        self.add(value.log_magnitude, value.sign)

    def estimate_log(self) -> float:
        """Cheap log-magnitude estimate of the current partial sum."""
        if self._shift is None or self._acc == 0.0:
            return -math.inf
        return self._shift + math.log(abs(self._acc))

    def total(self) -> SignedLogValue:
        if not self._logs:
            return SignedLogValue(-math.inf, 0)
        if self._max_log <= 700.0:
            tot = math.fsum(s * math.exp(l) for l, s in zip(self._logs, self._signs))
            return SignedLogValue.from_float(tot)
        shift = self._max_log - 350.0
        tot = math.fsum(s * math.exp(l - shift) for l, s in zip(self._logs, self._signs))
        if tot == 0.0:
            return SignedLogValue(-math.inf, 0)
        return SignedLogValue(shift + math.log(abs(tot)), 1 if tot > 0 else -1)

    def condition(self) -> float:
        """max |term| / |sum|; large values mean catastrophic cancellation."""
        tot = self.total()
        if tot.sign == 0:
            return math.inf if self._logs else 1.0
        return math.exp(min(self._max_log - tot.log_magnitude, 700.0))


def signed_log_sum(values) -> SignedLogValue:
    """Sum an iterable of SignedLogValue terms, order-independently."""
    acc = SignedLogAccumulator()
    for v in values:
        acc.add_value(v)
    return acc.total()


def bessel(kind: str, order: int, x: float) -> float:
    """Bessel function J or Y of order 0 or 1.

    Delegates to scipy's machine-precision routines, which comfortably meet
    the 1e-12 absolute error target on [1e-6, 1e3]. Y requires x > 0.
    """
    if kind not in ("J", "Y"):
        raise ValueError("kind must be 'J' or 'Y'")
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    if kind == "J":
        if x < 0.0:
            raise DomainError("J-kind requires x >= 0")
        return float(j0(x) if order == 0 else j1(x))
    if x <= 0.0:
        raise DomainError("Y-kind requires x > 0")
    return float(y0(x) if order == 0 else y1(x))


def cross_b1(r: float, rn: float, R2: float) -> float:
    """Wall cross-product J1(r*rn)*Y1(R2*rn) - J1(R2*rn)*Y1(r*rn)."""
    if r <= 0.0 or rn <= 0.0 or R2 <= 0.0:
        raise DomainError("cross_b1 requires r, rn, R2 > 0")
    return float(j1(r * rn) * y1(R2 * rn) - j1(R2 * rn) * y1(r * rn))


def cross_b(r: float, rn: float, R2: float) -> float:
    """Mixed-order cross-product J0(r*rn)*Y1(R2*rn) - J1(R2*rn)*Y0(r*rn)."""
    if r <= 0.0 or rn <= 0.0 or R2 <= 0.0:
        raise DomainError("cross_b requires r, rn, R2 > 0")
    return float(j0(r * rn) * y1(R2 * rn) - j1(R2 * rn) * y0(r * rn))


def ln_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    if x <= 0.0:
        raise DomainError("ln_gamma requires x > 0")
    return math.lgamma(x)


@dataclass(frozen=True)
class GFunctionArgs:
    """Parameters of G_{a,b,c}(d, t).

    The function is the inverse Laplace transform of q^b / (q^a - d)^c and
    is evaluated by its power series

        G_{a,b,c}(d,t) = sum_j Gamma(c+j) d^j / (Gamma(c) Gamma(j+1))
                         * t^{(c+j)a - b - 1} / Gamma[(c+j)a - b],

    valid for a*c - b > 0.
    """

    a: float
    b: float
    c: float
    d: float
    t: float


def _series_hopeless(log_abs_d: float, a: float, t: float) -> bool:
    # Peak log-magnitude of the j-series is ~ |d|^(1/a) * t; beyond the
    # cancellation budget the double-precision sum would be pure noise.
    lu = log_abs_d / a + math.log(t)
    return lu > math.log(_LOG_CANCELLATION_LIMIT + 5.0 + abs(math.log(t)))


def g_function(args: GFunctionArgs, controls: SeriesControls = _DEFAULT_CONTROLS) -> float:
    """Evaluate the generalized G-function by signed log-space summation.

    Raises NonConvergenceError (carrying the partial sum and term count)
    instead of returning an untrustworthy value: on term growth beyond
    controls.max_terms, on catastrophic cancellation, and for
    a < 0.05 with d != 0 where the series degenerates (callers fall back
    to numerical Laplace inversion).
    """
    a, b, c, d, t = args.a, args.b, args.c, args.d, args.t
    if t <= 0.0:
        raise DomainError("g_function requires t > 0")
    if c <= 0.0:
        raise DomainError("g_function requires c > 0")
    if a * c - b <= 0.0:
        raise DomainError("g_function requires a*c - b > 0")

    lt = math.log(t)
    lgc = math.lgamma(c)
    if d == 0.0:
        # only the j = 0 term survives
        return math.exp((c * a - b - 1.0) * lt - math.lgamma(c * a - b))

    if a < _MIN_SERIES_ORDER:
        raise NonConvergenceError(
            f"series order parameter a={a:g} below {_MIN_SERIES_ORDER}; "
            "the power series degenerates, use Laplace inversion instead",
        )
    log_abs_d = math.log(abs(d))
    if abs(d) > 1.0 and _series_hopeless(log_abs_d, a, t):
        raise NonConvergenceError(
            f"series for a={a:g}, d={d:g}, t={t:g} exceeds the double-precision "
            "cancellation budget",
        )

    sign_d = 1 if d > 0 else -1
    log_tol = math.log(controls.tol_rel)
    acc = SignedLogAccumulator()
    quiet = 0
    for j in range(controls.max_terms):
        e = (c + j) * a - b
        log_term = (
            math.lgamma(c + j)
            - lgc
            - math.lgamma(j + 1.0)
            + j * log_abs_d
            + (e - 1.0) * lt
            - math.lgamma(e)
        )
        acc.add(log_term, sign_d**j if sign_d < 0 else 1)
        if log_term < acc.estimate_log() + log_tol:
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
    else:
        est = acc.estimate_log()
        partial = 0.0 if est == -math.inf else math.copysign(math.exp(min(est, 700.0)), acc._acc)
        raise NonConvergenceError(
            f"g_function did not converge within {controls.max_terms} terms",
            partial_sum=partial,
            terms_used=len(acc),
        )
    total = acc.total()
    if acc.condition() > CANCELLATION_LIMIT:
        raise NonConvergenceError(
            "g_function series cancellation exceeds double precision "
            f"(condition ~ {acc.condition():.2e})",
            partial_sum=total.to_float() if total.log_magnitude < 700 else math.inf,
            terms_used=len(acc),
        )
    return total.to_float()
