"""Characteristic exponents of Lévy processes and risk-neutral drift calibration.

Convention throughout the package: ``E[exp(i xi X_t)] = exp(-t psi(xi))``.
With this sign choice the Gaussian exponent is ``(a/2) xi^2 - i b xi`` and
``Re psi >= 0`` on the real line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CutError, DomainError, QuadratureError
from .quadrature import integrate

__all__ = [
    "KoBoLParams",
    "GaussianParams",
    "LevyMeasureSpec",
    "LevyExponent",
    "gamma_neg",
    "kobol_psi",
    "gaussian_psi",
    "kobol_exponent",
    "gaussian_exponent",
    "kobol_levy_measure",
    "levy_khintchine_psi_numeric",
    "calibrate_drift",
    "matched_gaussian",
]


@dataclass(frozen=True)
class KoBoLParams:
    """Order ``nu``, intensities ``c_plus``/``c_minus``, tempering ``lambda_minus < 0 < lambda_plus``, drift ``mu``."""

    nu: float
    c_plus: float
    c_minus: float
    lambda_plus: float
    lambda_minus: float
    mu: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.nu < 2.0) or self.nu == 1.0:
            raise DomainError(f"KoBoL order nu must lie in (0, 2) minus {{1}}, got {self.nu}")
        if self.c_plus < 0 or self.c_minus < 0:
            raise DomainError("KoBoL intensities must be nonnegative")
        if not self.lambda_minus < 0 < self.lambda_plus:
            raise DomainError("KoBoL tempering requires lambda_minus < 0 < lambda_plus")
        if self.lambda_plus <= 1.0:
            raise DomainError(f"lambda_plus must exceed 1, got {self.lambda_plus}")
        for name in ("nu", "c_plus", "c_minus", "lambda_plus", "lambda_minus", "mu"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    def with_mu(self, mu: float) -> "KoBoLParams":
        return KoBoLParams(self.nu, self.c_plus, self.c_minus,
                           self.lambda_plus, self.lambda_minus, float(mu))

    def to_dict(self):
        return {"model": "kobol", "nu": self.nu, "c_plus": self.c_plus,
                "c_minus": self.c_minus, "lambda_plus": self.lambda_plus,
                "lambda_minus": self.lambda_minus, "mu": self.mu}


@dataclass(frozen=True)
class GaussianParams:
    """Brownian motion with diffusion coefficient ``a`` (variance rate) and drift ``b``."""

    a: float
    b: float = 0.0

    def __post_init__(self):
        if not self.a >= 0:
            raise DomainError(f"diffusion coefficient must be nonnegative, got {self.a}")

    def to_dict(self):
        return {"model": "gaussian", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class LevyMeasureSpec:
    """Lévy density ``x -> Pi(dx)/dx`` (vectorised, no mass at the origin).

    ``order`` is the blow-up exponent near zero (density ~ |x|^(-1-order));
    it only steers the quadrature substitution used by the numeric exponent.
    """

    density: Callable[[np.ndarray], np.ndarray]
    order: float = 0.0
    label: str = "custom"

    def __post_init__(self):
        if not 0.0 <= self.order < 2.0:
            raise DomainError("Lévy measure order must lie in [0, 2)")

    def integrability(self, tol: float = 1e-9) -> float:
        """Numerically evaluate ``int min(1, x^2) Pi(dx)``; finite for a valid measure."""
        total = 0.0
        for sgn in (1.0, -1.0):
            inner, _ = integrate(lambda t: self._near(t, sgn, lambda x: x * x), 0.0, 1.0, atol=tol)
            outer, _ = integrate(lambda x: np.asarray(self.density(sgn * x), float), 1.0, np.inf, atol=tol)
            total += float(inner) + float(outer)
        return total

    def _near(self, t, sgn, weight):
        # x = t^p flattens the |x|^(1 - order) behaviour at the origin
        p = 2.0 / (2.0 - self.order)
        x = t ** p
        jac = p * t ** (p - 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = weight(x) * np.asarray(self.density(sgn * x)) * jac
        return np.where(x > 0, val, 0.0)


@dataclass(frozen=True)
class LevyExponent:
    """A vectorised exponent together with its strip ``lower < Im xi < upper``.

    The strip edges are where the first singularities sit on the imaginary
    axis; for KoBoL these are the branch points ``i*lambda_minus`` and
    ``i*lambda_plus``.
    """

    func: Callable[[np.ndarray], np.ndarray]
    lower: float = -math.inf
    upper: float = math.inf
    label: str = "custom"
    params: object = field(default=None, compare=False)

    def __call__(self, xi):
        return self.func(np.asarray(xi, dtype=complex))

    def reflected(self) -> "LevyExponent":
        """Exponent of ``-X``: ``xi -> psi(-xi)`` with the strip mirrored."""
        f = self.func
        return LevyExponent(lambda z: f(-np.asarray(z, dtype=complex)),
                            -self.upper, -self.lower, self.label + "(-)", self.params)

    def contains(self, imag: float, closed: bool = False) -> bool:
        if closed:
            return self.lower <= imag <= self.upper
        return self.lower < imag < self.upper


def as_exponent(psi) -> LevyExponent:
    if isinstance(psi, LevyExponent):
        return psi
    if isinstance(psi, KoBoLParams):
        return kobol_exponent(psi)
    if isinstance(psi, GaussianParams):
        return gaussian_exponent(psi)
    if callable(psi):
        return LevyExponent(psi)
    raise TypeError(f"cannot interpret {type(psi).__name__} as an exponent")


def gamma_neg(nu: float) -> float:
    """Gamma(-nu) for nu in (0, 2) minus {1}, via reflection from Gamma(1 + nu)."""
    if not (0.0 < nu < 2.0) or nu == 1.0:
        raise DomainError(f"Gamma(-nu) needs nu in (0, 2) minus {{1}}, got {nu}")
    return -math.pi / (math.sin(math.pi * nu) * math.gamma(1.0 + nu))


def kobol_psi(params: KoBoLParams, xi):
    """KoBoL exponent

    ``-i mu xi + Gamma(-nu) [c+ ((-l-)^nu - (-l- - i xi)^nu) + c- (l+^nu - (l+ + i xi)^nu)]``

    with principal-branch powers.  Raises :class:`CutError` on the vertical cuts
    above ``i*lambda_plus`` and below ``i*lambda_minus`` (branch points allowed).
    """
    z = np.asarray(xi, dtype=complex)
    on_axis = z.real == 0
    if np.any(on_axis & ((z.imag > params.lambda_plus) | (z.imag < params.lambda_minus))):
        raise CutError("xi lies on a branch cut of the KoBoL exponent")
    nu = params.nu
    lm, lp = params.lambda_minus, params.lambda_plus
    g = gamma_neg(nu)
    val = (-1j * params.mu * z
           + g * (params.c_plus * ((-lm) ** nu - (-lm - 1j * z) ** nu)
                  + params.c_minus * (lp ** nu - (lp + 1j * z) ** nu)))
    return val[()] if val.ndim == 0 else val


def gaussian_psi(params: GaussianParams, xi):
    """``(a/2) xi^2 - i b xi``; ``exp(-t psi)`` is the characteristic function of N(bt, at)."""
    z = np.asarray(xi, dtype=complex)
    val = 0.5 * params.a * z * z - 1j * params.b * z
    return val[()] if val.ndim == 0 else val


def kobol_exponent(params: KoBoLParams) -> LevyExponent:
    return LevyExponent(lambda z: kobol_psi(params, z), params.lambda_minus,
                        params.lambda_plus, "kobol", params)


def gaussian_exponent(params: GaussianParams) -> LevyExponent:
    return LevyExponent(lambda z: gaussian_psi(params, z), label="gaussian", params=params)


def kobol_levy_measure(params: KoBoLParams) -> LevyMeasureSpec:
    """Lévy density whose exponent is ``kobol_psi`` (up to a linear drift term).

    Positive jumps carry intensity ``c_plus`` and decay like ``exp(lambda_minus x)``;
    negative jumps carry ``c_minus`` and decay like ``exp(lambda_plus x)``.
    """
    nu, cp, cm = params.nu, params.c_plus, params.c_minus
    lm, lp = params.lambda_minus, params.lambda_plus

    def density(x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        out = np.zeros_like(x)
        pos = x > 0
        neg = x < 0
        out[pos] = cp * ax[pos] ** (-nu - 1) * np.exp(lm * x[pos])
        out[neg] = cm * ax[neg] ** (-nu - 1) * np.exp(lp * x[neg])
        return out

    return LevyMeasureSpec(density, order=nu, label="kobol")


def _one_minus_exp_plus_lin(u):
    """``1 - e^{iu} + iu`` without cancellation for small ``u``."""
    u = np.asarray(u, dtype=float)
    re = 2.0 * np.sin(0.5 * u) ** 2
    small = np.abs(u) < 0.1
    u2 = u * u
    series = u * u2 * (1 / 6 - u2 * (1 / 120 - u2 * (1 / 5040 - u2 * (1 / 362880 - u2 / 39916800))))
    im = np.where(small, series, u - np.sin(u))
    return re + 1j * im


def levy_khintchine_psi_numeric(gauss: GaussianParams, levy: LevyMeasureSpec | None,
                                xi: float, tol: float = 1e-10) -> complex:
    """Brute-force Lévy-Khintchine exponent on the real line.

    ``(a/2) xi^2 - i b xi + int (1 - e^{i xi x} + i xi x 1{|x|<1}) Pi(dx)``,
    integrated piecewise on ``(-inf,-1], [-1,0], [0,1], [1,inf)``.
    """
    if np.iscomplexobj(xi) and np.imag(xi) != 0:
        raise DomainError("the numeric Lévy-Khintchine exponent is defined for real xi only")
    xi = float(np.real(xi))
    value = complex(gaussian_psi(gauss, xi))
    if levy is None or xi == 0.0:
        return value
    piece_tol = tol / 4
    pieces = []
    for sgn in (1.0, -1.0):
        near = lambda t, s=sgn: levy._near(t, s, lambda x, s=s: _one_minus_exp_plus_lin(s * xi * x))
        far = lambda x, s=sgn: (1.0 - np.exp(1j * s * xi * x)) * levy.density(s * x)
        try:
            pieces.append(integrate(near, 0.0, 1.0, atol=piece_tol)[0])
            pieces.append(integrate(far, 1.0, np.inf, atol=piece_tol)[0])
        except QuadratureError as exc:
            raise QuadratureError(f"Lévy-Khintchine integral failed at xi={xi}: {exc}",
                                  estimate=exc.estimate, error=exc.error) from exc
    return value + complex(sum(pieces))


def calibrate_drift(params: KoBoLParams, r: float) -> float:
    """Drift ``mu`` with ``psi(-i) = -r``, so that ``exp(-rt) S_0 exp(X_t)`` is a martingale.

    Any ``mu`` already stored in ``params`` is ignored.
    """
    if not r > 0:
        raise DomainError(f"riskless rate must be positive, got {r}")
    if params.lambda_plus <= 1.0 or params.lambda_minus >= -1.0:
        raise DomainError("psi(-i) requires lambda_plus > 1 and lambda_minus < -1")
    nu = params.nu
    lm, lp = params.lambda_minus, params.lambda_plus
    bracket = (params.c_plus * ((-lm) ** nu - (-lm - 1.0) ** nu)
               + params.c_minus * (lp ** nu - (lp + 1.0) ** nu))
    return r + gamma_neg(nu) * bracket


def matched_gaussian(vol: float, r: float) -> GaussianParams:
    """Gaussian exponent with variance rate ``vol^2`` and the martingale drift ``r - vol^2/2``."""
    if not vol > 0:
        raise DomainError("volatility must be positive")
    return GaussianParams(a=vol * vol, b=r - 0.5 * vol * vol)
