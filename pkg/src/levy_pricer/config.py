"""Run configuration: a sectioned key/value file (TOML syntax) merged with command-line overrides."""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .budget import default_alpha_plus
from .charexp import GaussianParams, KoBoLParams, calibrate_drift, gaussian_exponent, kobol_exponent
from .errors import DomainError

__all__ = ["ConfigError", "RunConfig", "DEFAULTS", "load_config"]


class ConfigError(DomainError):
    """Malformed or inconsistent configuration; the message names the offending field."""


DEFAULTS = {
    "model": {"kind": "kobol", "nu": 0.5, "c_plus": 1.0, "c_minus": 1.0,
              "lambda_plus": 5.0, "lambda_minus": -5.0, "mu": "auto",
              "a": None, "b": "auto", "vol": None},
    "market": {"S0": 100.0, "K": [100.0], "r": 0.1, "T": 0.5},
    "numerics": {"contour": "flat", "alpha_plus": "auto", "epsilon": 1e-7, "A": 50.0,
                 "tol": 1e-10, "check_tol": 5e-3},
    "output": {"format": "json", "path": "-"},
}

_KOBOL_KEYS = ("nu", "c_plus", "c_minus", "lambda_plus", "lambda_minus", "mu")
_GAUSS_KEYS = ("a", "b", "vol")


def _number(section, key, value, allow_auto=False):
    if allow_auto and value == "auto":
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        want = "a number or \"auto\"" if allow_auto else "a number"
        raise ConfigError(f"[{section}] {key}: expected {want}, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"[{section}] {key}: must be finite")
    return float(value)


@dataclass(frozen=True)
class RunConfig:
    model: dict
    market: dict
    numerics: dict
    output: dict

    @classmethod
    def from_mapping(cls, raw: dict) -> "RunConfig":
        unknown = set(raw) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
        merged = copy.deepcopy(DEFAULTS)
        for section, body in raw.items():
            if not isinstance(body, dict):
                raise ConfigError(f"[{section}] must be a table of keys")
            extra = set(body) - set(DEFAULTS[section])
            if section == "market":
                extra -= {"strike", "strikes"}
            if extra:
                raise ConfigError(f"[{section}] unknown key(s): {', '.join(sorted(extra))}")
            merged[section].update(body)
        market = merged["market"]
        for alias in ("strike", "strikes"):
            if alias in market:
                market["K"] = market.pop(alias)
        return cls._validated(merged)

    @classmethod
    def _validated(cls, m: dict) -> "RunConfig":
        model = m["model"]
        kind = model.get("kind")
        if kind not in ("kobol", "gaussian"):
            raise ConfigError(f"[model] kind: expected \"kobol\" or \"gaussian\", got {kind!r}")
        if kind == "kobol":
            for key in _KOBOL_KEYS:
                model[key] = _number("model", key, model[key], allow_auto=(key == "mu"))
            for key in _GAUSS_KEYS:
                model.pop(key, None)
        else:
            for key in _KOBOL_KEYS:
                model.pop(key, None)
            if model.get("vol") is not None:
                model["vol"] = _number("model", "vol", model["vol"])
                if model.get("a") is not None:
                    raise ConfigError("[model] give either vol or a, not both")
                model["a"] = model["vol"] ** 2
            elif model.get("a") is None:
                raise ConfigError("[model] gaussian model needs a or vol")
            model["a"] = _number("model", "a", model["a"])
            model["b"] = _number("model", "b", model["b"], allow_auto=True)
        market = m["market"]
        strikes = market["K"]
        if not isinstance(strikes, list):
            strikes = [strikes]
        if not strikes:
            raise ConfigError("[market] K: strike list is empty")
        market["K"] = [_number("market", "K", k) for k in strikes]
        for key in ("S0", "r", "T"):
            market[key] = _number("market", key, market[key])
        num = m["numerics"]
        if num["contour"] not in ("flat", "parabola", "cosh"):
            raise ConfigError(f"[numerics] contour: expected flat, parabola or cosh, got {num['contour']!r}")
        num["alpha_plus"] = _number("numerics", "alpha_plus", num["alpha_plus"], allow_auto=True)
        for key in ("epsilon", "A", "tol", "check_tol"):
            num[key] = _number("numerics", key, num[key])
            if not num[key] > 0:
                raise ConfigError(f"[numerics] {key}: must be positive")
        out = m["output"]
        if out["format"] not in ("json", "csv"):
            raise ConfigError(f"[output] format: expected json or csv, got {out['format']!r}")
        if not isinstance(out["path"], str):
            raise ConfigError("[output] path: expected a string")
        return cls(model, market, num, out)

    def resolved(self) -> "RunConfig":
        """Replace every ``"auto"`` by the value it resolves to."""
        m = copy.deepcopy(self.__dict__)
        model, num = m["model"], m["numerics"]
        if model["kind"] == "kobol":
            if model["mu"] == "auto":
                base = KoBoLParams(*(model[k] for k in _KOBOL_KEYS[:-1]))
                model["mu"] = calibrate_drift(base, m["market"]["r"])
        elif model["b"] == "auto":
            model["b"] = m["market"]["r"] - 0.5 * model["a"]
        if num["alpha_plus"] == "auto":
            # the heuristic needs a finite strip; the Gaussian strip is the whole plane
            num["alpha_plus"] = (default_alpha_plus(model["lambda_plus"])
                                 if model["kind"] == "kobol" else 3.0)
        return RunConfig(m["model"], m["market"], m["numerics"], m["output"])

    def params(self):
        model = self.resolved().model
        if model["kind"] == "kobol":
            return KoBoLParams(*(model[k] for k in _KOBOL_KEYS))
        return GaussianParams(model["a"], model["b"])

    def exponent(self):
        p = self.params()
        return kobol_exponent(p) if isinstance(p, KoBoLParams) else gaussian_exponent(p)

    def to_dict(self):
        return copy.deepcopy({"model": self.model, "market": self.market,
                              "numerics": self.numerics, "output": self.output})


def load_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    """Read ``path`` (if given), then apply ``overrides`` (``{section: {key: value}}``)."""
    raw: dict = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    for section, body in (overrides or {}).items():
        raw.setdefault(section, {})
        if not isinstance(raw[section], dict):
            raise ConfigError(f"[{section}] must be a table of keys")
        if section == "market" and "K" in body:
            for alias in ("strike", "strikes"):
                raw[section].pop(alias, None)
        raw[section].update(body)
    return RunConfig.from_mapping(raw)
