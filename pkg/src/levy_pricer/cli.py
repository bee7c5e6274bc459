"""``levy-pricer`` command line: price, density, budget, tables, verify.

Exit codes: 0 success, 2 invalid input or configuration, 3 numerical failure,
4 the ``--check`` cross-check exceeded its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .budget import (PAPER_EPSILONS, PAPER_TRUNCATIONS, ErrorBudget, SamplingPlan, compute_M,
                     make_plan, sigma_for_eps, tail_eps)
from .config import ConfigError, load_config
from .contour import make_contour, verify_arc_decay
from .density import density_curve
from .errors import DomainError, LevyPricerError, NumericalError
from .pricer import MarketSpec, price_quadrature, price_series

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_CHECK = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _csv_number(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.10g}"


def _csv_text(header, rows, config) -> str:
    buf = io.StringIO()
    buf.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([c if isinstance(c, str) else _csv_number(c) for c in row])
    return buf.getvalue()


def _float_list(text: str):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _number_or_auto(text: str):
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="sectioned key/value config file (TOML syntax)")
    g = p.add_argument_group("model")
    g.add_argument("--model", dest="model.kind", choices=("kobol", "gaussian"))
    for flag in ("nu", "c-plus", "c-minus", "lambda-plus", "lambda-minus", "a", "vol"):
        g.add_argument(f"--{flag}", dest="model." + flag.replace("-", "_"), type=float)
    g.add_argument("--mu", dest="model.mu", type=_number_or_auto)
    g.add_argument("--b", dest="model.b", type=_number_or_auto)
    g = p.add_argument_group("market")
    g.add_argument("--S0", dest="market.S0", type=float)
    g.add_argument("--strike", "--K", dest="market.K", type=_float_list,
                   help="strike or comma-separated strikes")
    g.add_argument("--r", dest="market.r", type=float)
    g.add_argument("--T", dest="market.T", type=float)
    g = p.add_argument_group("numerics")
    g.add_argument("--contour", dest="numerics.contour", choices=("flat", "parabola", "cosh"))
    g.add_argument("--alpha-plus", dest="numerics.alpha_plus", type=_number_or_auto)
    g.add_argument("--epsilon", dest="numerics.epsilon", type=float)
    g.add_argument("--A", dest="numerics.A", type=float)
    g.add_argument("--tol", dest="numerics.tol", type=float)
    g.add_argument("--check-tol", dest="numerics.check_tol", type=float)
    g = p.add_argument_group("output")
    g.add_argument("--format", dest="output.format", choices=("json", "csv"))
    g.add_argument("--out", dest="output.path", help="output file ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="levy-pricer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("price", help="price calls on the strike grid with the sampled series")
    _common(p)
    p.add_argument("--check", action="store_true", help="cross-check against the quadrature oracle")
    p = sub.add_parser("density", help="density on a grid of log-prices")
    _common(p)
    p.add_argument("--method", choices=("approximant", "quadrature", "contour"), default="approximant")
    p.add_argument("--y-min", type=float, default=-3.0)
    p.add_argument("--y-max", type=float, default=3.0)
    p.add_argument("--points", type=int, default=61)
    p = sub.add_parser("budget", help="sampling plan and error budget")
    _common(p)
    p = sub.add_parser("tables", help="band-limit and truncation-tail tables")
    _common(p)
    p.add_argument("--which", choices=("sigma", "tail", "both"), default="both")
    p = sub.add_parser("verify", help="numerical arc-decay check for the chosen contour")
    _common(p)
    p.add_argument("--y", type=float, default=0.5)
    p.add_argument("--tau", type=float, help="defaults to the maturity T")
    p.add_argument("--radii", type=_float_list, default=[10.0, 20.0, 40.0, 80.0])
    p.add_argument("--threshold", type=float, default=1e-3)
    return parser


def _overrides(args) -> dict:
    out: dict = {}
    for key, value in vars(args).items():
        if "." in key and value is not None:
            section, name = key.split(".", 1)
            out.setdefault(section, {})[name] = value
    return out


def _threads() -> int:
    raw = os.environ.get("LEVY_PRICER_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"LEVY_PRICER_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("LEVY_PRICER_THREADS must be nonnegative")
    return n or min(8, os.cpu_count() or 1)


def _plan(cfg):
    num = cfg.numerics
    psi = cfg.exponent()
    if cfg.model["kind"] == "kobol":
        return make_plan(psi, cfg.market["T"], num["epsilon"], num["A"], num["alpha_plus"])
    # an entire exponent has no strip edge: M and sigma come from a unit strip half-width
    delta = 1.0
    M = compute_M(psi, num["alpha_plus"], delta, cfg.market["T"])
    sigma, _ = sigma_for_eps(M, delta, num["epsilon"])
    plan = SamplingPlan.from_sigma(sigma, num["A"], num["alpha_plus"], num["epsilon"], delta)
    budget = ErrorBudget.compose(num["A"], num["epsilon"],
                                 tail_eps(psi, cfg.market["T"], num["A"], num["alpha_plus"]), M)
    return plan, budget


def _cmd_price(cfg, args):
    psi = cfg.exponent()
    m, num = cfg.market, cfg.numerics
    plan, budget = _plan(cfg)
    contour = make_contour(num["contour"], num["alpha_plus"])
    markets = [MarketSpec(m["S0"], K, m["r"], m["T"]) for K in m["K"]]

    def one(market):
        res = price_series(psi, contour, market, plan)
        chk = price_quadrature(psi, market, num["alpha_plus"], tol=num["tol"]) if args.check else None
        return res, chk

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(one, markets))
    breach = False
    records = []
    for res, chk in results:
        rec = res.to_dict()
        if chk is not None:
            delta = res.price - chk.price
            rec["check"] = {"quadrature_price": chk.price, "delta": delta,
                            "tolerance": num["check_tol"]}
            breach |= abs(delta) > num["check_tol"]
        records.append(rec)
    doc = {"command": "price", "config": cfg.to_dict(), "budget": budget.to_dict(), "results": records}
    header = ["K", "price", "residue", "I1_re", "I1_im", "I2_re", "I2_im"]
    if args.check:
        header += ["quadrature_price", "delta"]
    rows = []
    for rec in records:
        row = [rec["market"]["K"], rec["price"], rec["residue"], rec["I1"]["re"], rec["I1"]["im"],
               rec["I2"]["re"], rec["I2"]["im"]]
        if args.check:
            row += [rec["check"]["quadrature_price"], rec["check"]["delta"]]
        rows.append(row)
    return doc, header, rows, EXIT_CHECK if breach else EXIT_OK


def _cmd_density(cfg, args):
    if args.points < 1:
        raise ConfigError("--points must be positive")
    psi = cfg.exponent()
    num = cfg.numerics
    ys = np.linspace(args.y_min, args.y_max, args.points)
    plan = budget = contour = None
    if args.method in ("approximant", "contour"):
        contour = make_contour(num["contour"], num["alpha_plus"])
    if args.method == "approximant":
        plan, budget = _plan(cfg)
    curve = density_curve(args.method, psi, cfg.market["T"], ys, alpha_plus=num["alpha_plus"],
                          A=num["A"], tol=num["tol"], contour=contour, plan=plan, budget=budget)
    doc = {"command": "density", "config": cfg.to_dict(), "curve": curve.to_dict()}
    return doc, ["y", "p", "method", "err"], curve.rows(), EXIT_OK


def _cmd_budget(cfg, args):
    plan, budget = _plan(cfg)
    doc = {"command": "budget", "config": cfg.to_dict(), "plan": plan.to_dict(),
           "budget": budget.to_dict()}
    header = ["sigma", "h", "A", "N", "alpha_plus", "delta", "epsilon", "M", "eps_tail", "eps_total"]
    row = [plan.sigma, plan.h, plan.A, plan.N, plan.alpha_plus, plan.delta, plan.epsilon,
           budget.M, budget.eps_tail, budget.eps_total]
    return doc, header, [row], EXIT_OK


def _cmd_tables(cfg, args):
    if cfg.model["kind"] != "kobol":
        raise ConfigError("tables are defined for the KoBoL model")
    psi = cfg.exponent()
    alpha = cfg.numerics["alpha_plus"]
    T = cfg.market["T"]
    delta = psi.upper - alpha
    M = compute_M(psi, alpha, delta, T)
    sigma_rows = [[eps, *sigma_for_eps(M, delta, eps)] for eps in PAPER_EPSILONS]
    tail_rows = [[A, tail_eps(psi, T, A, alpha)] for A in PAPER_TRUNCATIONS]
    doc = {"command": "tables", "config": cfg.to_dict(), "M": M, "delta": delta,
           "sigma_table": [dict(zip(("epsilon", "sigma", "h"), r)) for r in sigma_rows],
           "tail_table": [dict(zip(("A", "eps_tail"), r)) for r in tail_rows]}
    blocks = []
    if args.which in ("sigma", "both"):
        blocks.append((["epsilon", "sigma", "h"], sigma_rows))
    if args.which in ("tail", "both"):
        blocks.append((["A", "eps_tail"], tail_rows))
    return doc, blocks, None, EXIT_OK


def _cmd_verify(cfg, args):
    num = cfg.numerics
    contour = make_contour(num["contour"], num["alpha_plus"])
    tau = cfg.market["T"] if args.tau is None else args.tau
    # the inversion integrates exp(i y z - tau psi(-z)), so the arcs are checked for psi(-z)
    report = verify_arc_decay(cfg.exponent().reflected(), contour, args.y, tau, args.radii,
                              threshold=args.threshold)
    doc = {"command": "verify", "config": cfg.to_dict(), "y": args.y, "tau": tau,
           "report": report.to_dict()}
    rows = [[r, a, b] for r, a, b in zip(report.radii, report.right, report.left)]
    rows.append(["verdict", report.verdict, ""])
    return doc, ["radius", "right", "left"], rows, EXIT_OK


COMMANDS = {"price": _cmd_price, "density": _cmd_density, "budget": _cmd_budget,
            "tables": _cmd_tables, "verify": _cmd_verify}


def _render(doc, header, rows, fmt, config) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, allow_nan=True) + "\n"
    if rows is None:
        # several CSV blocks, separated by a blank line, each with its own header
        return "\n".join(_csv_text(h, r, config) for h, r in header)
    return _csv_text(header, rows, config)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, _overrides(args)).resolved()
        doc, header, rows, code = COMMANDS[args.command](cfg, args)
        text = _render(doc, header, rows, cfg.output["format"], cfg.to_dict())
    except (ConfigError, DomainError) as exc:
        print(f"levy-pricer: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, LevyPricerError, ArithmeticError) as exc:
        print(f"levy-pricer: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    path = cfg.output["path"]
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    if code == EXIT_CHECK:
        print("levy-pricer: cross-check exceeded tolerance", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
