"""Independent reference values and brute-force oracles.

Nothing here imports the package's own quadrature or exponent code: the
oracles use scipy (QUADPACK, special functions, root finding) so that a bug in
the library cannot cancel against the same bug in its check.
"""

import csv
import math
from pathlib import Path

import numpy as np
from scipy import integrate, optimize, special, stats

GOLDEN = Path(__file__).parent / "golden"

# worked example: KoBoL order 1/2, symmetric, drift rounded to six digits
PAPER_MODEL = dict(nu=0.5, c_plus=1.0, c_minus=1.0, lambda_plus=5.0, lambda_minus=-5.0, mu=0.019721)
PAPER_MARKET = dict(S0=100.0, r=0.1, T=0.5)
PAPER_ALPHA = 3.0
PAPER_DELTA = 2.0
PAPER_EPS = 1e-7
PAPER_A = 50.0

PAPER_M = 9.702279703
PAPER_SIGMA_E7 = 9.316010503
PAPER_N = 149
PAPER_EPS_TOTAL = 2.312260033e-5
PAPER_MU = 0.019721


def read_golden(name):
    with open(GOLDEN / name, newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


SIGMA_TABLE = read_golden("sigma_table.csv")
TAIL_TABLE = read_golden("tail_table.csv")


def psi_ref(xi, nu=0.5, c_plus=1.0, c_minus=1.0, lambda_plus=5.0, lambda_minus=-5.0, mu=0.019721):
    """KoBoL exponent with scipy's Gamma (no reflection shortcut)."""
    xi = np.asarray(xi, dtype=complex)
    g = special.gamma(-nu)
    return (-1j * mu * xi + g * (c_plus * ((-lambda_minus) ** nu - (-lambda_minus - 1j * xi) ** nu)
                                 + c_minus * (lambda_plus ** nu - (lambda_plus + 1j * xi) ** nu)))


def cquad(f, a, b, **kw):
    kw.setdefault("limit", 4000)
    re = integrate.quad(lambda x: f(x).real, a, b, **kw)[0]
    im = integrate.quad(lambda x: f(x).imag, a, b, **kw)[0]
    return re + 1j * im


def tail_ref(A, T=0.5, alpha=PAPER_ALPHA, **model):
    f = lambda v: np.exp(-T * psi_ref(v + 1j * alpha, **model))
    return abs(cquad(f, A, np.inf, epsabs=1e-20, epsrel=1e-12)) / (2 * math.pi)


def density_ref(y, T=0.5, alpha=PAPER_ALPHA, A=np.inf, **model):
    """``(1/2pi) int exp(-i y xi - T psi(xi)) d xi`` along ``Im xi = -alpha``, by QUADPACK."""
    g = lambda u: (np.exp(-1j * y * u - T * psi_ref(u - 1j * alpha, **model))).real
    return math.exp(-alpha * y) * 2 * integrate.quad(g, 0, A, limit=4000, epsabs=1e-13)[0] / (2 * math.pi)


def drift_by_root(nu, c_plus, c_minus, lambda_plus, lambda_minus, r):
    """mu such that psi(-i) = -r, found by bracketing rather than the closed form."""
    def h(mu):
        return (psi_ref(-1j, nu, c_plus, c_minus, lambda_plus, lambda_minus, mu) + r).real
    return optimize.brentq(h, -10.0, 10.0, xtol=1e-15, rtol=1e-15)


def black_scholes_scipy(S0, K, r, T, vol):
    d1 = (math.log(S0 / K) + (r + 0.5 * vol ** 2) * T) / (vol * math.sqrt(T))
    d2 = d1 - vol * math.sqrt(T)
    return S0 * stats.norm.cdf(d1) - K * math.exp(-r * T) * stats.norm.cdf(d2)


def normal_pdf(y, mean, var):
    return stats.norm.pdf(y, loc=mean, scale=math.sqrt(var))


def M_grid_search(psi, alpha, delta, T, n=100_001, X=60.0):
    """Brute-force max of |Re exp(-T psi)| on both strip boundary lines."""
    x = np.linspace(-X, X, n)
    best = 0.0
    for im in (alpha + delta, alpha - delta):
        best = max(best, float(np.max(np.abs(np.exp(-T * psi(x + 1j * im)).real))))
    return best
