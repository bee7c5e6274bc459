"""Deformation contours ``theta -> f(theta) + i (alpha + a(theta))`` and arc-decay checks.

An upper contour has ``alpha > 0`` and a nonnegative bump ``a`` that grows away
from ``theta = 0``; a lower contour mirrors it (``alpha < 0``, ``a <= 0``).
``verify_arc_decay`` gives numerical evidence that the closing arcs of the
region between the real axis and the contour carry vanishing mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .charexp import LevyExponent, as_exponent
from .errors import ContourError, CutError, DomainError, QuadratureError
from .quadrature import integrate

__all__ = ["ContourSpec", "ArcFamily", "ArcDecayReport", "make_contour",
           "make_lower_contour", "eval_contour", "verify_arc_decay"]

KINDS = ("flat", "parabola", "cosh", "custom")


def _join(re, im):
    # re + 1j*im would turn an infinite im into a NaN real part
    re, im = np.broadcast_arrays(np.asarray(re, float), np.asarray(im, float))
    out = np.empty(re.shape, dtype=complex)
    out.real = re
    out.imag = im
    return out[()] if out.ndim == 0 else out


def _zero(t):
    return np.zeros_like(np.asarray(t, dtype=float))


def _one(t):
    return np.ones_like(np.asarray(t, dtype=float))


def _identity(t):
    return np.asarray(t, dtype=float)


@dataclass(frozen=True)
class ContourSpec:
    """One branch of a deformation path; ``side`` is ``"upper"`` or ``"lower"``."""

    kind: str
    alpha: float
    f: Callable = field(repr=False)
    a: Callable = field(repr=False)
    df: Callable = field(repr=False)
    da: Callable = field(repr=False)
    side: str = "upper"

    @property
    def alpha_plus(self) -> float:
        if self.side != "upper":
            raise AttributeError("alpha_plus is defined for upper contours only")
        return self.alpha

    @property
    def alpha_minus(self) -> float:
        if self.side != "lower":
            raise AttributeError("alpha_minus is defined for lower contours only")
        return self.alpha

    def point(self, theta):
        t = np.asarray(theta, dtype=float)
        with np.errstate(over="ignore"):
            return _join(self.f(t), self.alpha + self.a(t))

    def velocity(self, theta):
        t = np.asarray(theta, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            return _join(self.df(t), self.da(t))

    def check(self, grid=None) -> None:
        """Raise :class:`ContourError` if the shape functions break the contour rules on ``grid``."""
        t = np.linspace(-50.0, 50.0, 1001) if grid is None else np.sort(np.asarray(grid, float))
        with np.errstate(over="ignore", invalid="ignore"):
            f = np.asarray(self.f(t), float)
            a = np.asarray(self.a(t), float)
        if np.any(np.isnan(f)) or np.any(np.isnan(a)):
            raise ContourError("shape functions returned NaN")
        if np.any(f[t < 0] > 0) or np.any(f[t > 0] < 0):
            raise ContourError("f must be <= 0 for theta <= 0 and >= 0 for theta >= 0")
        sgn = 1.0 if self.side == "upper" else -1.0
        if self.side == "upper" and not self.alpha > 0:
            raise ContourError("upper contour needs alpha > 0")
        if self.side == "lower" and not self.alpha < 0:
            raise ContourError("lower contour needs alpha < 0")
        b = sgn * a
        if np.any(b < 0):
            raise ContourError(f"bump must be {'non-negative' if sgn > 0 else 'non-positive'}")
        left = b[t <= 0]
        right = b[t >= 0]
        with np.errstate(invalid="ignore"):
            rising = np.diff(left) > 0
            falling = np.diff(right) < 0
        if np.any(rising) or np.any(falling):
            raise ContourError("bump must shrink towards theta = 0 from both sides")


def make_contour(kind: str, alpha_plus: float, params: dict | None = None) -> ContourSpec:
    """Build an upper contour.

    ``flat``: ``theta + i alpha``; ``parabola``: bump ``theta^2``;
    ``cosh``: bump ``cosh(theta^2)``; ``custom``: ``params`` supplies
    ``f``, ``a_plus``, ``df``, ``da_plus`` (callables).
    """
    if kind not in KINDS:
        raise DomainError(f"unknown contour kind {kind!r}; choose from {KINDS}")
    if not alpha_plus > 1:
        raise DomainError(f"alpha_plus must exceed 1, got {alpha_plus}")
    params = dict(params or {})
    if kind == "flat":
        spec = ContourSpec(kind, float(alpha_plus), _identity, _zero, _one, _zero)
    elif kind == "parabola":
        spec = ContourSpec(kind, float(alpha_plus), _identity,
                           lambda t: np.asarray(t, float) ** 2, _one,
                           lambda t: 2.0 * np.asarray(t, float))
    elif kind == "cosh":
        spec = ContourSpec(kind, float(alpha_plus), _identity,
                           lambda t: np.cosh(np.asarray(t, float) ** 2), _one,
                           lambda t: 2.0 * np.asarray(t, float) * np.sinh(np.asarray(t, float) ** 2))
    else:
        try:
            spec = ContourSpec(kind, float(alpha_plus), params["f"], params["a_plus"],
                               params["df"], params["da_plus"])
        except KeyError as exc:
            raise DomainError(f"custom contour needs {exc.args[0]!r}") from None
    spec.check(params.get("grid"))
    return spec


def make_lower_contour(kind: str, alpha_minus: float, params: dict | None = None) -> ContourSpec:
    """Mirror image of :func:`make_contour` below the real axis (``alpha_minus < 0``)."""
    if not alpha_minus < 0:
        raise DomainError(f"alpha_minus must be negative, got {alpha_minus}")
    params = dict(params or {})
    if kind == "custom":
        try:
            spec = ContourSpec(kind, float(alpha_minus), params["g"], params["a_minus"],
                               params["dg"], params["da_minus"], side="lower")
        except KeyError as exc:
            raise DomainError(f"custom contour needs {exc.args[0]!r}") from None
    else:
        up = make_contour(kind, 2.0)
        spec = ContourSpec(kind, float(alpha_minus), up.f, lambda t: -up.a(t),
                           up.df, lambda t: -up.da(t), side="lower")
    spec.check(params.get("grid"))
    return spec


def eval_contour(spec: ContourSpec, theta):
    """Return ``(point, velocity)`` of the contour at ``theta``."""
    return spec.point(theta), spec.velocity(theta)


@dataclass(frozen=True)
class ArcFamily:
    """Closing arcs of radius ``radius`` for an upper contour.

    ``right`` runs from angle 0 to the contour, ``left`` from the contour to
    pi; both are empty for ``radius == 0``.
    """

    radius: float
    right: tuple
    left: tuple
    closed: bool

    @classmethod
    def for_radius(cls, spec: ContourSpec, radius: float) -> "ArcFamily":
        if radius < 0:
            raise DomainError("radius must be nonnegative")
        if radius == 0:
            return cls(0.0, (0.0, 0.0), (math.pi, math.pi), True)
        base = abs(complex(spec.point(0.0)))
        if radius <= base:
            # circle stays below the contour: it closes on itself at pi/2
            return cls(radius, (0.0, math.pi / 2), (math.pi / 2, math.pi), False)
        th_right = _solve_modulus(spec, radius, +1.0)
        th_left = _solve_modulus(spec, radius, -1.0)
        return cls(radius,
                   (0.0, float(np.angle(spec.point(th_right)))),
                   (float(np.angle(spec.point(th_left))), math.pi), True)


def _solve_modulus(spec: ContourSpec, radius: float, direction: float) -> float:
    """Smallest ``theta`` (in ``direction``) with ``|lambda(theta)| = radius``, by bisection."""
    lo, hi = 0.0, 1.0
    with np.errstate(over="ignore"):
        while abs(complex(spec.point(direction * hi))) < radius:
            lo, hi = hi, 2.0 * hi
            if hi > 1e8:
                raise DomainError("contour modulus does not reach the requested radius")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if abs(complex(spec.point(direction * mid))) < radius:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * hi:
                break
    return direction * 0.5 * (lo + hi)


@dataclass
class ArcDecayReport:
    radii: list
    right: list
    left: list
    right_verified: bool
    left_verified: bool
    threshold: float
    failures: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "verified" if self.right_verified and self.left_verified else "unverified"

    def to_dict(self):
        return {"radii": list(self.radii), "right": list(self.right), "left": list(self.left),
                "right_verified": self.right_verified, "left_verified": self.left_verified,
                "threshold": self.threshold, "verdict": self.verdict,
                "failures": list(self.failures)}


def _arc_integral(psi: LevyExponent, y: float, tau: float, radius: float,
                  phi0: float, phi1: float, tol: float) -> float:
    if radius == 0 or phi0 == phi1:
        return 0.0
    if phi0 < math.pi / 2 < phi1 or phi0 == math.pi / 2 or phi1 == math.pi / 2:
        if radius > psi.upper:
            raise CutError(f"arc of radius {radius} crosses the cut above i*{psi.upper}")

    def integrand(phi):
        z = radius * np.exp(1j * phi)
        return np.exp(1j * y * z - tau * psi(z)) * 1j * z

    value, _ = integrate(integrand, phi0, phi1, atol=tol)
    return abs(complex(value))


def verify_arc_decay(psi, spec: ContourSpec, y: float, tau: float, radii,
                     threshold: float = 1e-3, tol: float = 1e-12) -> ArcDecayReport:
    """Magnitudes of ``int exp(i y z - tau psi(z)) dz`` over the right and left closing arcs.

    A side is verified when its magnitudes strictly decrease along ``radii``
    and the last one is below ``threshold``.  Quadrature failures are recorded
    per arc (the value becomes NaN and that side is unverified).
    """
    psi = as_exponent(psi)
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be strictly ascending")
    if not tau > 0:
        raise DomainError("tau must be positive")
    right, left, failures = [], [], []
    for radius in radii:
        arcs = ArcFamily.for_radius(spec, radius)
        for side, (p0, p1), out in (("right", arcs.right, right), ("left", arcs.left, left)):
            try:
                out.append(_arc_integral(psi, y, tau, radius, p0, p1, tol))
            except QuadratureError as exc:
                out.append(math.nan)
                failures.append(f"{side} arc at radius {radius}: {exc}")

    def decays(seq):
        if not seq or any(math.isnan(v) for v in seq):
            return False
        strictly = all(b < a for a, b in zip(seq, seq[1:]))
        return strictly and seq[-1] < threshold

    return ArcDecayReport(radii, right, left, decays(right), decays(left), threshold, failures)
