"""Transition densities three ways: damped quadrature, contour integral, sampled approximant.

All three invert ``exp(-tau psi)`` with the kernel ``exp(i y z)`` along a path in
the upper half plane.  With ``E[exp(i xi X)] = exp(-tau psi(xi))`` the density is

    p(y) = (1/2pi) int exp(-i y xi) exp(-tau psi(xi)) d xi
         = (1/2pi) int exp(i y z) exp(-tau psi(-z)) dz,

so every path below is fed the reflected exponent ``z -> psi(-z)``.  Shifting
the path to ``Im z = alpha`` produces the damping factor ``exp(-alpha y)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .budget import SamplingPlan, tail_eps
from .charexp import LevyExponent, as_exponent
from .contour import ContourSpec
from .errors import DomainError, NumericalError, PlanError, StripError
from .quadrature import compensated_sum, integrate

__all__ = ["DensityCurve", "ContourIntegrand", "density_quadrature", "density_contour",
           "density_approximant", "density_curve", "density_stable"]

RESIDUE_TOL = 1e-9


@dataclass(frozen=True)
class ContourIntegrand:
    """The factor ``N(theta) = exp(-tau psi(lambda(theta))) (f' + i a')(theta)`` of one contour
    and its modulated form ``N*(theta) = exp(i y (f - theta) - y a) N(theta)``.

    ``psi`` here is the exponent actually integrated (already reflected).
    """

    psi: LevyExponent
    contour: ContourSpec
    tau: float

    def log_factor(self, theta):
        z, vel = self.contour.point(theta), self.contour.velocity(theta)
        with np.errstate(divide="ignore"):
            return -self.tau * self.psi(z) + np.log(vel.astype(complex))

    def factor(self, theta):
        return np.exp(self.log_factor(theta))

    def log_modulated(self, theta, y):
        t = np.atleast_1d(np.asarray(theta, dtype=float))
        with np.errstate(over="ignore", invalid="ignore"):
            bump = np.asarray(self.contour.a(t), dtype=float)
            speed = np.asarray(self.contour.velocity(t))
        far = ~(np.isfinite(bump) & np.isfinite(speed))
        out = np.empty(t.shape, dtype=complex)
        near = ~far
        if np.any(near):
            tn = t[near]
            shape = 1j * y * (self.contour.f(tn) - tn) - y * bump[near]
            out[near] = shape + self.log_factor(tn)
        # past float range the factor exp(-y a) decides: it vanishes for y >= 0
        # (exp(-tau psi) grows sub-exponentially along the path) and blows up otherwise
        out[far] = -np.inf if y >= 0 else np.inf
        return out[0] if np.ndim(theta) == 0 else out

    def modulated(self, theta, y):
        return np.exp(self.log_modulated(theta, y))


@dataclass
class DensityCurve:
    y: np.ndarray
    p: np.ndarray
    method: str
    err: np.ndarray = field(default=None)

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        if self.err is None:
            self.err = np.full(self.y.shape, math.nan)
        self.err = np.broadcast_to(np.asarray(self.err, dtype=float), self.y.shape).copy()
        if self.y.shape != self.p.shape:
            raise DomainError("y and p must have the same shape")
        if np.any(self.p < -1e-8):
            raise NumericalError(f"density dips below zero: min {self.p.min():.3e}")

    def rows(self):
        return [(float(a), float(b), self.method, float(c)) for a, b, c in zip(self.y, self.p, self.err)]

    def to_csv(self, digits: int = 10) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["y", "p", "method", "err"])
        for y, p, m, e in self.rows():
            w.writerow([f"{y:.{digits}g}", f"{p:.{digits}g}", m, f"{e:.{digits}g}"])
        return buf.getvalue()

    def to_dict(self):
        return {"method": self.method, "y": self.y.tolist(), "p": self.p.tolist(),
                "err": [None if math.isnan(e) else e for e in self.err.tolist()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _inversion_exponent(psi) -> LevyExponent:
    return as_exponent(psi).reflected()


def _check_strip(psi: LevyExponent, alpha: float) -> None:
    if not psi.contains(alpha):
        raise StripError(f"damping {alpha} outside the strip ({psi.lower}, {psi.upper})")


def _damped_integrals(phi: LevyExponent, tau: float, ys: np.ndarray, alpha: float,
                      A: float, tol: float) -> np.ndarray:
    """``(1/2pi) exp(-alpha y) Re int_{-A}^{A} exp(i y v - tau phi(v + i alpha)) dv`` for all ``ys``.

    The integrand at ``-v`` is the conjugate of the one at ``v`` (real law), so
    only ``[0, A]`` is integrated and doubled.
    """
    ys = np.asarray(ys, dtype=float)

    def g(v):
        base = np.exp(-tau * phi(v + 1j * alpha))
        return np.real(np.exp(1j * np.outer(v, ys)) * base[:, None])

    value, _ = integrate(g, 0.0, A, atol=math.pi * tol)
    return np.exp(-alpha * ys) * 2.0 * np.asarray(value, dtype=float).reshape(ys.shape) / (2.0 * math.pi)


def density_quadrature(psi, tau: float, y, alpha_plus: float, A: float = math.inf,
                       tol: float = 1e-10):
    """Damped Fourier inversion by adaptive quadrature, truncated to ``|v| <= A``.

    Independent oracle for the contour and sampled paths.  Accepts a scalar or
    an array of ``y`` (one shared adaptive partition).
    """
    if not tau > 0:
        raise DomainError("tau must be positive")
    if not A > 0:
        raise DomainError("A must be positive")
    phi = _inversion_exponent(psi)
    _check_strip(phi, alpha_plus)
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    out = _damped_integrals(phi, tau, ys, float(alpha_plus), float(A), tol)
    return float(out[0]) if np.ndim(y) == 0 else out


def _signed_damping(phi: LevyExponent, alpha: float) -> float:
    """Mirror of ``alpha`` for negative ``y`` so that ``exp(-alpha y)`` never amplifies."""
    mirrored = -alpha
    if phi.contains(mirrored):
        return mirrored
    return alpha


def density_stable(psi, tau: float, y, alpha_plus: float, A: float = math.inf,
                   tol: float = 1e-10):
    """Like :func:`density_quadrature` but with damping ``-alpha`` for ``y < 0``.

    The density itself does not depend on the damping; choosing its sign with
    ``y`` keeps ``exp(-alpha y) <= 1`` so absolute quadrature error is not
    amplified far in the left tail.
    """
    phi = _inversion_exponent(psi)
    _check_strip(phi, alpha_plus)
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.empty_like(ys)
    pos = ys >= 0
    if np.any(pos):
        out[pos] = _damped_integrals(phi, tau, ys[pos], alpha_plus, A, tol)
    if np.any(~pos):
        out[~pos] = _damped_integrals(phi, tau, ys[~pos], _signed_damping(phi, alpha_plus), A, tol)
    return float(out[0]) if np.ndim(y) == 0 else out


def density_contour(psi, upper: ContourSpec, lower: ContourSpec | None, tau: float, y: float,
                    A: float = 50.0, tol: float = 1e-10) -> float:
    """Density from the contour representation, integrating over ``theta in [-A, A]``.

    With ``lower`` absent the one-sided form
    ``(1/2pi) Re int exp(i y lambda(theta) - tau psi(lambda(theta))) lambda'(theta) d theta``
    is used.  With both contours the two integrals are averaged with weights
    ``exp(alpha_+ y)`` and ``exp(alpha_- y)``.
    """
    if not tau > 0:
        raise DomainError("tau must be positive")
    if upper.side != "upper" or (lower is not None and lower.side != "lower"):
        raise DomainError("expected an upper contour and an optional lower contour")
    phi = _inversion_exponent(psi)
    _check_strip(phi, upper.alpha)
    y = float(y)

    def one_side(spec):
        integrand = ContourIntegrand(phi, spec, tau)

        def g(theta):
            # exp(i y lambda) = exp(-alpha y) exp(i y f - y a); the alpha part is applied outside
            return integrand.modulated(theta, y) * np.exp(1j * y * np.asarray(theta))

        value, _ = integrate(g, -A, A, atol=2.0 * math.pi * tol * math.exp(min(spec.alpha * y, 700.0)))
        return complex(value)

    if lower is None:
        total = one_side(upper)
        value = math.exp(-upper.alpha * y) * total / (2.0 * math.pi)
    else:
        _check_strip(phi, lower.alpha)
        total = one_side(upper) + one_side(lower)
        value = total / (2.0 * math.pi * (math.exp(upper.alpha * y) + math.exp(lower.alpha * y)))
    if not math.isfinite(value.real):
        raise NumericalError(f"contour integral overflowed at y={y}")
    return float(value.real)


def density_approximant(psi, contour: ContourSpec, tau: float, y, plan: SamplingPlan,
                        lower: ContourSpec | None = None):
    """Sampled approximant ``p*(y)`` built from ``2N+1`` nodes ``theta_k = pi k / sigma``.

    ``p*(y) = exp(-alpha y) 1{|y| < sigma} / (2 sigma) * sum_k N*(theta_k) exp(i y theta_k)``.
    The imaginary residue of the sum must stay below ``1e-9`` (relative to the
    terms) and is then discarded.
    """
    if not tau > 0:
        raise DomainError("tau must be positive")
    if abs(contour.alpha - plan.alpha_plus) > 1e-12:
        raise PlanError(f"contour offset {contour.alpha} differs from plan damping {plan.alpha_plus}")
    phi = _inversion_exponent(psi)
    _check_strip(phi, contour.alpha)
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    theta = plan.nodes
    out = np.zeros(ys.shape)
    sides = [contour] if lower is None else [contour, lower]
    for i, yv in enumerate(ys):
        if abs(yv) >= plan.sigma:
            continue
        total = 0j
        scale = 0.0
        for spec in sides:
            integrand = ContourIntegrand(phi, spec, tau)
            logs = integrand.log_modulated(theta, yv) + 1j * yv * theta
            with np.errstate(over="ignore"):
                terms = np.exp(logs)
            if not np.all(np.isfinite(terms)):
                raise NumericalError(f"approximant terms overflow at y={yv} for the {spec.kind} contour")
            total += complex(compensated_sum(terms))
            scale += float(np.sum(np.abs(terms)))
        if abs(total.imag) > RESIDUE_TOL * max(1.0, scale):
            raise NumericalError(f"imaginary residue {total.imag:.3e} at y={yv}: conjugate symmetry broken")
        if lower is None:
            out[i] = math.exp(-contour.alpha * yv) * total.real / (2.0 * plan.sigma)
        else:
            weight = math.exp(contour.alpha * yv) + math.exp(lower.alpha * yv)
            out[i] = total.real / (2.0 * plan.sigma * weight)
    return float(out[0]) if np.ndim(y) == 0 else out


def density_curve(method: str, psi, tau: float, ys, *, alpha_plus: float = 3.0,
                  A: float = 50.0, tol: float = 1e-10, contour: ContourSpec | None = None,
                  plan: SamplingPlan | None = None, budget=None) -> DensityCurve:
    """Evaluate one of the three methods on a grid and attach an error estimate.

    ``err`` is the truncation tail for ``quadrature`` and ``contour``, and the
    total budget for ``approximant`` when a budget is supplied.
    """
    ys = np.asarray(ys, dtype=float)
    if method == "quadrature":
        p = density_quadrature(psi, tau, ys, alpha_plus, A, tol)
        err = tail_eps(_inversion_exponent(psi), tau, A, alpha_plus) * np.exp(-alpha_plus * ys)
    elif method == "contour":
        if contour is None:
            raise DomainError("the contour method needs a contour")
        p = np.array([density_contour(psi, contour, None, tau, yv, A, tol) for yv in ys])
        err = tail_eps(_inversion_exponent(psi), tau, A, contour.alpha) * np.exp(-contour.alpha * ys)
    elif method == "approximant":
        if contour is None or plan is None:
            raise DomainError("the approximant needs a contour and a plan")
        p = density_approximant(psi, contour, tau, ys, plan)
        err = math.nan if budget is None else budget.eps_total
    else:
        raise DomainError(f"unknown density method {method!r}")
    return DensityCurve(ys, p, method, err)
