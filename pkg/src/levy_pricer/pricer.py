"""European call prices: damped-quadrature oracle, sampled series ``I1 + I2``, Black-Scholes.

The call value is ``exp(-rT) E[(S0 exp(X_T) - K)+]``.  Writing ``k = ln(K/S0)``
it equals ``exp(-rT) K int_k^inf p_T(y) (exp(y - k) - 1) dy``.  Replacing
``p_T`` by the sampled approximant and integrating each node term in closed
form over ``[k, sigma]`` gives the series below.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .budget import SamplingPlan
from .charexp import as_exponent
from .contour import ContourSpec
from .density import ContourIntegrand, density_stable
from .errors import DomainError, NumericalError, PlanError, StripError
from .quadrature import compensated_sum, integrate

__all__ = ["MarketSpec", "PriceResult", "price_quadrature", "price_series",
           "black_scholes_reference", "norm_cdf"]

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class MarketSpec:
    S0: float
    K: float
    r: float
    T: float

    def __post_init__(self):
        for name in ("S0", "K", "r", "T"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not self.S0 > 0 or not self.K > 0:
            raise DomainError("spot and strike must be positive")
        if not self.T > 0:
            raise DomainError("maturity must be positive")
        if self.r < 0:
            raise DomainError("riskless rate must be nonnegative")

    @property
    def log_moneyness(self) -> float:
        """``ln(K / S0)``, the lower end of the payoff integral in log-price."""
        return math.log(self.K / self.S0)

    @property
    def discount(self) -> float:
        return math.exp(-self.r * self.T)

    def intrinsic(self) -> float:
        return max(self.S0 - self.K * self.discount, 0.0)

    def with_strike(self, K: float) -> "MarketSpec":
        return MarketSpec(self.S0, float(K), self.r, self.T)

    def to_dict(self):
        return {"S0": self.S0, "K": self.K, "r": self.r, "T": self.T}


@dataclass(frozen=True)
class PriceResult:
    price: float
    method: str
    market: MarketSpec
    I1: complex = complex(math.nan, math.nan)
    I2: complex = complex(math.nan, math.nan)
    residue: float = 0.0
    plan: SamplingPlan | None = None
    error: float = math.nan
    notes: tuple = field(default=())

    def __post_init__(self):
        if not math.isfinite(self.price):
            raise NumericalError(f"non-finite price from {self.method}")
        if self.price < -1e-9:
            raise NumericalError(f"negative price {self.price:.3e} from {self.method}")
        if abs(self.residue) >= 1e-9 * max(1.0, abs(self.price)):
            raise NumericalError(f"imaginary residue {self.residue:.3e} too large")

    def to_dict(self):
        def pair(z):
            return None if math.isnan(z.real) else {"re": z.real, "im": z.imag}
        return {"method": self.method, "price": self.price, "I1": pair(self.I1),
                "I2": pair(self.I2), "residue": self.residue, "error": _nan_none(self.error),
                "market": self.market.to_dict(),
                "plan": None if self.plan is None else self.plan.to_dict(),
                "notes": list(self.notes)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    CSV_HEADER = ("method", "S0", "K", "r", "T", "price", "residue", "error")

    def csv_record(self, digits: int = 10) -> str:
        m = self.market
        vals = [self.method] + [f"{v:.{digits}g}" for v in
                                (m.S0, m.K, m.r, m.T, self.price, self.residue, self.error)]
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerow(vals)
        return buf.getvalue()


def _nan_none(x):
    return None if isinstance(x, float) and math.isnan(x) else x


def norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def black_scholes_reference(market: MarketSpec, vol: float) -> float:
    """``S0 Phi(d1) - K exp(-rT) Phi(d2)``."""
    if not vol > 0:
        raise DomainError("volatility must be positive")
    S0, K, r, T = market.S0, market.K, market.r, market.T
    sd = vol * math.sqrt(T)
    d1 = (math.log(S0 / K) + (r + 0.5 * vol * vol) * T) / sd
    d2 = d1 - sd
    return S0 * norm_cdf(d1) - K * math.exp(-r * T) * norm_cdf(d2)


def _payoff_density(psi, market, alpha, A, tol):
    k = market.log_moneyness

    def g(y):
        y = np.asarray(y, dtype=float)
        p = density_stable(psi, market.T, y, alpha, A, tol)
        return p * market.K * np.expm1(y - k)
    return g


def _edge(g, start, step, tol, limit=200.0, strict=True):
    """Walk from ``start`` in steps of ``step`` until two successive values of ``|g|`` fall below ``tol``.

    Past ``limit`` the walk raises, or returns ``None`` when ``strict`` is false.
    """
    y = start
    quiet = 0
    while abs(y - start) < limit:
        y += step
        if abs(float(g(np.array([y]))[0])) < tol:
            quiet += 1
            if quiet == 2:
                return y
        else:
            quiet = 0
    if not strict:
        return None
    raise NumericalError("payoff-weighted density does not decay; check the exponent")


def price_quadrature(psi, market: MarketSpec, alpha_plus: float, A: float = math.inf,
                     tol: float = 1e-10) -> PriceResult:
    """Oracle price: adaptive quadrature in ``y`` of the payoff against a quadrature density.

    The density is inverted with damping ``alpha_plus`` for ``y >= 0`` and its
    mirror for ``y < 0``.  The upper limit is the first unit step beyond which
    the payoff-weighted density stays below ``tol``; a far-out strike is
    clipped the same way on the left.
    """
    if not 1.0 < alpha_plus:
        raise StripError(f"damping must exceed 1 for the call payoff, got {alpha_plus}")
    phi = as_exponent(psi).reflected()
    if not phi.contains(alpha_plus):
        raise StripError(f"damping {alpha_plus} outside ({phi.lower}, {phi.upper})")
    k = market.log_moneyness
    inner = tol / (10.0 * market.S0)
    g = _payoff_density(psi, market, alpha_plus, A, inner)
    quiet = tol * 1e-3
    top = _edge(g, max(k, 0.0), 1.0, quiet)
    bottom = k
    notes = []
    if k < -1.0:
        # deep in the money: skip the far left where the density has no mass
        mass = lambda y: density_stable(psi, market.T, y, alpha_plus, A, inner) * market.S0 * np.exp(y)
        left = _edge(mass, 0.0, -1.0, quiet, limit=-k, strict=False)
        if left is not None:
            bottom = left
            notes.append(f"lower limit clipped from {k:.6g} to {left:.6g}")
    value, err = integrate(g, bottom, top, atol=tol / market.discount)
    price = market.discount * float(value)
    return PriceResult(price, "quadrature", market, error=market.discount * err, notes=tuple(notes))


def _antiderivative(log_w, z, upper, lower):
    """``exp(log_w) (exp(upper z) - exp(lower z)) / z`` with the ``z -> 0`` limit patched in."""
    small = np.abs(z) < SINGULAR_TOL
    zs = np.where(small, 1.0, z)
    with np.errstate(over="ignore", invalid="ignore"):
        out = (np.exp(log_w + upper * zs) - np.exp(log_w + lower * zs)) / zs
        out = np.where(small, np.exp(log_w) * (upper - lower), out)
    return out


def price_series(psi, contour: ContourSpec, market: MarketSpec, plan: SamplingPlan) -> PriceResult:
    """Closed-form payoff integral of the sampled approximant along ``contour``.

    With ``theta_k = pi k / sigma``, ``c_k = -alpha - a(theta_k) + i f(theta_k)`` and
    ``w_k = exp(-T psi(lambda(theta_k))) lambda'(theta_k)``::

        I1 = exp(-rT) S0 / (2 sigma) sum w_k (exp(sigma (1 + c_k)) - (K/S0)^(1 + c_k)) / (1 + c_k)
        I2 = -exp(-rT) K / (2 sigma) sum w_k (exp(sigma c_k) - (K/S0)^c_k) / c_k
    """
    if abs(contour.alpha - plan.alpha_plus) > 1e-12:
        raise PlanError(f"contour offset {contour.alpha} differs from plan damping {plan.alpha_plus}")
    if contour.side != "upper":
        raise DomainError("pricing uses the upper contour")
    k = market.log_moneyness
    if not -plan.sigma < k < plan.sigma:
        raise PlanError(f"ln(K/S0)={k:.6g} lies outside (-sigma, sigma)")
    phi = as_exponent(psi).reflected()
    if not phi.contains(contour.alpha):
        raise StripError(f"damping {contour.alpha} outside ({phi.lower}, {phi.upper})")
    sigma = plan.sigma
    theta = plan.nodes
    integrand = ContourIntegrand(phi, contour, market.T)

    with np.errstate(over="ignore", invalid="ignore"):
        bump = np.asarray(contour.a(theta), dtype=float)
        speed = np.asarray(contour.velocity(theta))
    far = ~(np.isfinite(bump) & np.isfinite(speed))
    notes = []
    if np.any(far):
        # (K/S0)^c carries exp(-k a): it vanishes past float range only when k >= 0
        if k < 0:
            raise NumericalError(f"{contour.kind} contour overflows at {int(far.sum())} nodes for K < S0")
        notes.append(f"{int(far.sum())} nodes beyond float range contribute 0")
    near = ~far
    th = theta[near]
    c = -contour.alpha - bump[near] + 1j * np.asarray(contour.f(th), dtype=float)
    if np.any(1.0 - contour.alpha - bump[near] >= 0):
        notes.append("alpha + a(theta) <= 1 at some node: boundary term not damped")
    log_w = integrand.log_factor(th)
    t1 = _antiderivative(log_w, 1.0 + c, sigma, k)
    t2 = _antiderivative(log_w, c, sigma, k)
    if not (np.all(np.isfinite(t1)) and np.all(np.isfinite(t2))):
        raise NumericalError(f"series terms overflow for the {contour.kind} contour at K={market.K}")
    disc = market.discount
    I1 = disc * market.S0 / (2.0 * sigma) * complex(compensated_sum(t1))
    I2 = -disc * market.K / (2.0 * sigma) * complex(compensated_sum(t2))
    total = I1 + I2
    return PriceResult(total.real, "series", market, I1, I2, total.imag, plan, notes=tuple(notes))
