"""Report envelope and scenario ingestion shared by the command line tools.

Reports are deterministic JSON: keys sorted, rationals as "p/q" strings,
timing omitted (null) unless explicitly requested so golden files stay stable.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from . import bdiv, chern, fans, ideals, okounkov, toric
from .fans import Fan
from .rationals import fmt, rat


class CliError(Exception):
    """Carries the exit code contract: 2 parse, 3 precondition."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(2, f"cannot read {path}: {exc.strerror}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(2, f"parse error in {path}: line {exc.lineno} column {exc.colno}")


def file_digest(path: str) -> str:
    try:
        with open(path, "rb") as fh:
            return hashlib.sha256(fh.read()).hexdigest()
    except OSError as exc:
        raise CliError(2, f"cannot read {path}: {exc.strerror}")


def jsonable(x):
    if isinstance(x, Fraction):
        return fmt(x)
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, (int, str, float)):
        return x
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    raise TypeError(f"cannot serialize {type(x).__name__}")


@dataclass
class Report:
    command: str
    inputs: dict
    outputs: dict
    verdict: str | None = None
    timing_ms: float | None = None

    def to_json(self) -> dict:
        out = {
            "command": self.command,
            "inputs": jsonable(self.inputs),
            "outputs": jsonable(self.outputs),
            "timing_ms": self.timing_ms,
        }
        if self.verdict is not None:
            out["verdict"] = self.verdict
        return out

    def render(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


def need(data: dict, key: str, where: str):
    if not isinstance(data, dict) or key not in data:
        raise CliError(2, f"missing key '{key}' in {where}")
    return data[key]


def _rat(value, where: str) -> Fraction:
    try:
        return rat(value)
    except (ValueError, TypeError, ZeroDivisionError):
        raise CliError(2, f"bad rational '{value}' in {where}")


def fan_of(scn: dict, where: str) -> Fan:
    data = need(scn, "fan", where)
    try:
        return fans.fan_from_json(data)
    except (ValueError, TypeError, KeyError) as exc:
        raise CliError(2, f"bad fan in {where}: {exc}")


def divisor_of(fan: Fan, data: dict, where: str) -> toric.ToricDivisor:
    coeffs = need(data, "coeffs", where)
    if isinstance(coeffs, dict):
        coeffs = {k: _rat(v, where) for k, v in coeffs.items()}
    else:
        coeffs = [_rat(v, where) for v in coeffs]
    return toric.divisor(fan, coeffs)


def metric_of(fan: Fan, data: dict, where: str) -> toric.ToricMetric:
    need(data, "divisor", where)
    pieces = need(data, "pieces", where)
    if not pieces:
        raise CliError(3, "model polytope empty")
    return toric.metric_from_json(fan, data)


def metrics_of(fan: Fan, scn: dict, where: str) -> list[toric.HermitianToricLine]:
    out = []
    for i, data in enumerate(need(scn, "metrics", where)):
        out.append(toric.hermitian(metric_of(fan, data, f"{where} metrics[{i}]")))
    return out


def weil_of(fan: Fan, data: dict, where: str) -> bdiv.WeilNefB:
    approx = []
    for i, m in enumerate(need(data, "approximants", where)):
        h = toric.hermitian(metric_of(fan, m, f"{where} approximants[{i}]"))
        approx.append(bdiv.bdiv_of_metric(h).cartier)
    limit = None
    if data.get("limit") is not None:
        h = toric.hermitian(metric_of(fan, data["limit"], f"{where} limit"))
        limit = bdiv.bdiv_of_metric(h).cartier
    return bdiv.weil(approx, limit)


def flag_of(scn: dict, where: str) -> okounkov.FlagValuation:
    data = need(scn, "flag", where)
    cone = need(data, "cone", where)
    return okounkov.flag(cone, data.get("order"))


def ideal_of(data: dict, where: str) -> ideals.MonomialIdeal:
    try:
        return ideals.ideal_from_json(data)
    except (ValueError, TypeError, KeyError) as exc:
        raise CliError(2, f"bad ideal in {where}: {exc}")


def bundles_of(fan: Fan, scn: dict, where: str) -> dict[str, chern.SplitToricBundle]:
    table = {}
    for name, decl in need(scn, "bundles", where).items():
        summands = [toric.hermitian(metric_of(fan, m, f"{where} bundle {name}"))
                    for m in need(decl, "summands", where)]
        table[name] = chern.split_bundle(summands)
    return table


def chain_of(scn: dict, where: str) -> list[Fan]:
    return [fans.fan_from_json(f) for f in need(scn, "chain", where)]
