"""Band-limited sampling: cardinal (sinc) series and the best-approximation bound.

Nodes sit at ``theta_k = pi k / sigma`` for ``|k| <= N``; the reconstruction
kernel is ``sinc(sigma x - pi k)`` with ``sinc(u) = sin(u)/u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .quadrature import compensated_sum

__all__ = ["SampleGrid", "wks_interpolate", "best_approx_bound", "best_approx_series"]


@dataclass(frozen=True)
class SampleGrid:
    """Samples of a function at ``pi k / sigma``, ``k = -N..N`` (``values[k + N]``)."""

    sigma: float
    values: np.ndarray
    N: int

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("band limit sigma must be positive")
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (2 * self.N + 1,):
            raise DomainError(f"expected {2 * self.N + 1} samples, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("samples must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def h(self) -> float:
        return math.pi / self.sigma

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1) * self.h

    @property
    def radius(self) -> float:
        return self.N * self.h

    @classmethod
    def from_function(cls, func, sigma: float, N: int) -> "SampleGrid":
        nodes = np.arange(-N, N + 1) * (math.pi / sigma)
        return cls(sigma, np.asarray(func(nodes), dtype=complex), N)

    def at(self, k: int) -> complex:
        return complex(self.values[k + self.N])


def _sinc(u):
    u = np.asarray(u, dtype=float)
    out = np.ones_like(u)
    nz = u != 0
    out[nz] = np.sin(u[nz]) / u[nz]
    return out


def wks_interpolate(grid: SampleGrid, x):
    """Cardinal series ``sum_k values[k] sinc(sigma x - pi k)``.

    Exact at the nodes.  Terms are accumulated with exact rounding, so the
    result does not depend on summation order.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    k = np.arange(-grid.N, grid.N + 1)
    out = np.empty(xs.shape, dtype=complex)
    for i, xv in enumerate(xs):
        u = grid.sigma * xv - math.pi * k
        # at a node sin(sigma x - pi k) need not round to zero exactly
        node = np.isclose(xv / grid.h, np.round(xv / grid.h), rtol=0, atol=1e-13)
        if node:
            j = int(np.round(xv / grid.h))
            out[i] = grid.at(j) if abs(j) <= grid.N else 0.0
            continue
        out[i] = compensated_sum(grid.values * _sinc(u))
    return out[0] if np.ndim(x) == 0 else out


def best_approx_bound(M: float, delta: float, sigma: float) -> float:
    """``(4M/pi) exp(-delta sigma)``: uniform best-approximation error by ``W_sigma``
    for functions analytic on ``|Im z| < delta`` with ``|Re f| <= M``."""
    if not M > 0 or not delta > 0:
        raise DomainError("M and delta must be positive")
    if sigma < 0:
        raise DomainError("sigma must be nonnegative")
    return 4.0 * M / math.pi * math.exp(-delta * sigma)


def best_approx_series(M: float, delta: float, sigma: float, terms: int = 200) -> float:
    """Sharper alternating-series form ``(4M/pi) sum (-1)^k / ((2k+1) cosh((2k+1) sigma delta))``."""
    if not M > 0 or not delta > 0 or not sigma > 0:
        raise DomainError("M, delta and sigma must be positive")
    k = np.arange(terms)
    arg = (2 * k + 1) * sigma * delta
    # 1/cosh(x) = 2 e^{-x} / (1 + e^{-2x}) stays finite for large x
    sech = 2.0 * np.exp(-arg) / (1.0 + np.exp(-2.0 * arg))
    return 4.0 * M / math.pi * compensated_sum((-1.0) ** k * sech / (2 * k + 1))
