"""Error budget for the sampled density: strip bound, band limit, truncation tail.

The sampled function is ``v -> exp(-T psi(v + i alpha))``.  Its uniform
best-approximation error by ``W_sigma`` is at most ``(4M/pi) exp(-delta sigma)``
where ``M`` bounds ``|Re exp(-T psi)|`` on ``|Im - alpha| <= delta``.  Truncating
the samples to ``|v| <= A`` adds the tail ``eps*(A)``; the density error is
``A eps / pi + eps*``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .charexp import as_exponent
from .errors import DomainError, PlanError, StripError
from .quadrature import integrate
from .sampling import best_approx_bound

__all__ = [
    "SamplingPlan", "ErrorBudget", "NonDecayWarning", "compute_M", "sigma_for_eps",
    "tail_eps", "make_plan", "default_alpha_plus", "sigma_table", "tail_table",
    "PAPER_EPSILONS", "PAPER_TRUNCATIONS",
]

PAPER_EPSILONS = tuple(10.0 ** -k for k in range(3, 11))
PAPER_TRUNCATIONS = tuple(float(a) for a in range(10, 140, 10))


class NonDecayWarning(RuntimeWarning):
    """The strip-boundary scan for ``M`` did not decay inside the search window."""


@dataclass(frozen=True)
class SamplingPlan:
    sigma: float
    h: float
    A: float
    N: int
    alpha_plus: float
    epsilon: float = math.nan
    delta: float = math.nan

    def __post_init__(self):
        if not self.sigma > 0 or not self.A > 0:
            raise PlanError("sigma and A must be positive")
        if abs(self.h * self.sigma - math.pi) > 1e-14 * math.pi:
            raise PlanError("step must equal pi / sigma")
        if self.N != term_count(self.A, self.sigma):
            raise PlanError(f"N={self.N} but ceil(A sigma / pi) = {term_count(self.A, self.sigma)}")

    @classmethod
    def from_sigma(cls, sigma: float, A: float, alpha_plus: float,
                   epsilon: float = math.nan, delta: float = math.nan) -> "SamplingPlan":
        sigma = float(sigma)
        return cls(sigma, math.pi / sigma, float(A), term_count(A, sigma),
                   float(alpha_plus), float(epsilon), float(delta))

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1) * self.h

    def refined(self, factor: float = 2.0) -> "SamplingPlan":
        """Same truncation radius with ``sigma`` (and hence ``N``) scaled by ``factor``."""
        return SamplingPlan.from_sigma(self.sigma * factor, self.A, self.alpha_plus,
                                       self.epsilon, self.delta)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ErrorBudget:
    eps_interp: float
    eps_tail: float
    eps_total: float
    M: float

    def __post_init__(self):
        if min(self.eps_interp, self.eps_tail, self.eps_total) < 0:
            raise DomainError("error budget components must be nonnegative")

    @classmethod
    def compose(cls, A: float, eps_interp: float, eps_tail: float, M: float) -> "ErrorBudget":
        return cls(eps_interp, eps_tail, A * eps_interp / math.pi + eps_tail, M)

    def to_dict(self):
        return asdict(self)


def term_count(A: float, sigma: float) -> int:
    ratio = A * sigma / math.pi
    # guard against ratio landing a hair above an integer through rounding
    return int(math.ceil(ratio - 1e-12 * max(1.0, ratio)))


def default_alpha_plus(upper: float) -> float:
    """Heuristic damping ``1 + (upper + 1) / 3`` (3 for an upper strip edge of 5)."""
    if not math.isfinite(upper):
        raise DomainError("the damping heuristic needs a finite strip edge; pass alpha_plus")
    return 1.0 + (upper + 1.0) / 3.0


def _boundary(psi, T, im):
    def g(x):
        z = np.asarray(x, dtype=float) + 1j * im
        return np.abs(np.real(np.exp(-T * psi(z))))
    return g


def _golden_max(g, lo, hi, tol=1e-13, maxiter=200):
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    gc, gd = float(g(c)), float(g(d))
    for _ in range(maxiter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - inv * (b - a)
            gc = float(g(c))
        else:
            a, c, gc = c, d, gd
            d = a + inv * (b - a)
            gd = float(g(d))
    x = 0.5 * (a + b)
    return x, float(g(x))


def compute_M(psi, alpha_plus: float, delta: float, T: float,
              n_grid: int = 4001, x_start: float = 10.0, x_max: float = 1e6) -> float:
    """Largest ``|Re exp(-T psi(x + i(alpha +- delta)))|`` over both strip boundary lines.

    Each line is scanned on a symmetric grid over ``[-X, X]`` (``X`` doubled
    until the values at ``+-X`` drop below ``1e-3`` of the running maximum) and
    the best grid cell is refined by golden-section search.
    """
    psi = as_exponent(psi)
    if not delta > 0:
        raise DomainError("delta must be positive")
    if not T > 0:
        raise DomainError("T must be positive")
    top, bottom = alpha_plus + delta, alpha_plus - delta
    if not (psi.contains(top, closed=True) and psi.contains(bottom, closed=True)):
        raise StripError(f"strip [{bottom}, {top}] leaves ({psi.lower}, {psi.upper})")
    best = 0.0
    for im in (top, bottom):
        g = _boundary(psi, T, im)
        X = x_start
        xs = np.linspace(-X, X, n_grid)
        vals = g(xs)
        while max(vals[0], vals[-1]) > 1e-3 * vals.max():
            X *= 2.0
            if X > x_max:
                warnings.warn(f"boundary line Im={im} does not decay within |x| <= {x_max}",
                              NonDecayWarning, stacklevel=2)
                break
            xs = np.linspace(-X, X, n_grid)
            vals = g(xs)
        i = int(np.argmax(vals))
        lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
        _, refined = _golden_max(g, lo, hi)
        best = max(best, float(vals[i]), refined)
    return best


def sigma_for_eps(M: float, delta: float, eps: float):
    """Band limit where the bound equals ``eps``: ``sigma = ln(4M / (pi eps)) / delta``; returns ``(sigma, pi/sigma)``."""
    if not M > 0 or not delta > 0 or not eps > 0:
        raise DomainError("M, delta and eps must be positive")
    if eps >= 4.0 * M / math.pi:
        raise DomainError(f"eps={eps} is not below 4M/pi={4 * M / math.pi}")
    sigma = math.log(4.0 * M / (math.pi * eps)) / delta
    return sigma, math.pi / sigma


def tail_eps(psi, T: float, A: float, alpha_plus: float,
             rtol: float = 1e-11, atol: float = 1e-22) -> float:
    """One-sided truncation tail ``|int_A^inf exp(-T psi(v + i alpha)) dv| / (2 pi)``.

    For a real Lévy process the integrand on ``v < -A`` is the complex
    conjugate of the one on ``v > A``, so either side gives the same value.
    """
    psi = as_exponent(psi)
    if not A > 0:
        raise DomainError("A must be positive")
    if not psi.contains(alpha_plus):
        raise StripError(f"alpha_plus={alpha_plus} outside ({psi.lower}, {psi.upper})")

    def g(v):
        return np.exp(-T * psi(np.asarray(v) + 1j * alpha_plus))

    value, _ = integrate(g, float(A), math.inf, atol=atol, rtol=rtol)
    return abs(complex(value)) / (2.0 * math.pi)


def make_plan(psi, T: float, eps: float, A: float, alpha_plus: float | None = None):
    """Compose ``compute_M -> sigma_for_eps -> tail_eps`` into a plan and its error budget.

    ``alpha_plus`` defaults to the heuristic :func:`default_alpha_plus` of the
    exponent's upper strip edge; ``delta`` is the remaining distance to it.
    """
    psi = as_exponent(psi)
    if alpha_plus is None:
        alpha_plus = default_alpha_plus(psi.upper)
    delta = psi.upper - alpha_plus
    if not delta > 0:
        raise StripError(f"alpha_plus={alpha_plus} leaves no strip below {psi.upper}")
    M = compute_M(psi, alpha_plus, delta, T)
    sigma, _ = sigma_for_eps(M, delta, eps)
    plan = SamplingPlan.from_sigma(sigma, A, alpha_plus, eps, delta)
    budget = ErrorBudget.compose(A, eps, tail_eps(psi, T, A, alpha_plus), M)
    return plan, budget


def sigma_table(M: float, delta: float, epsilons=PAPER_EPSILONS):
    """Rows ``(eps, sigma, h)``."""
    return [(eps,) + sigma_for_eps(M, delta, eps) for eps in epsilons]


def tail_table(psi, T: float, alpha_plus: float, truncations=PAPER_TRUNCATIONS):
    """Rows ``(A, eps*)``."""
    return [(A, tail_eps(psi, T, A, alpha_plus)) for A in truncations]
