"""Config-driven experiment runner producing deterministic report records."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

import jsonschema
import numpy as np
import scipy
import yaml

from . import __version__
from .catalog import from_dict
from .checks import (UnsupportedNodeError, check_cycle_inequality, check_firmly_nonexpansive,
                     check_resolvent_identity, exact_resolvent, graphical_convergence_probe,
                     rotation_resolvent)
from .contraction import choose_sigma, m_bound, realized_distance
from .dynamics import NEGATIVE, POSITIVE, stability_probe, super_regularity_probe
from .metric import ProbeSpec, metric_table, verify_metric_axioms
from .prox import ProxNonconvergence, prox_operator
from .catalog import Perturbed
from .reports import dumps, plain

EXPERIMENTS = ("metric-table", "perturbation-sweep", "dynamics", "checks", "stability")

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_posint = {"type": "integer", "minimum": 1}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["functions", "experiment"],
    "properties": {
        "functions": {"type": "array", "minItems": 1, "items": {"type": "object", "required": ["type"]}},
        "experiment": {
            "oneOf": [
                {"enum": list(EXPERIMENTS)},
                {"type": "array", "minItems": 1, "items": {"enum": list(EXPERIMENTS)}},
            ]
        },
        "parameters": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "N": _posint,
                "mesh": _pos,
                "probe_mode": {"enum": ["mesh", "random"]},
                "samples": _posint,
                "cycles": _posint,
                "max_cycle_len": {"type": "integer", "minimum": 2},
                "seed": {"type": "integer", "minimum": 0},
                "tol": _pos,
                "sigmas": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}},
                "eps": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0, "maximum": 1}},
                "s": _pos,
                "max_iters": _posint,
                "start_count": {"type": "integer", "minimum": 2},
                "lambdas": {"type": "array", "items": _pos},
                "k_list": {"type": "array", "items": _posint},
                "graphical_tol": _pos,
                "rotation_counterexample": {"type": "boolean"},
                "stability": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "sigma": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                        "eps": _pos, "s": _pos, "max_iters": _posint, "starts": _posint,
                    },
                },
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"path": {"type": "string"}, "format": {"enum": ["jsonl", "csv"]}},
        },
    },
}

DEFAULTS: dict[str, Any] = {
    "N": 20,
    "mesh": None,
    "probe_mode": None,
    "samples": 10_000,
    "cycles": 1000,
    "max_cycle_len": 6,
    "seed": 0,
    "tol": 1e-8,
    "sigmas": [2.0 ** -k for k in range(1, 11)],
    "eps": [0.1, 0.01],
    "s": 1.0,
    "max_iters": 10_000,
    "start_count": 32,
    "lambdas": [0.5, 1.0, 2.0],
    "k_list": [1, 4, 16, 64, 256, 1024],
    "graphical_tol": 1e-2,
    "rotation_counterexample": True,
    "stability": {"sigma": 1e-3, "eps": 1e-2, "s": 2.0, "max_iters": 50, "starts": 64},
}


class ConfigError(ValueError):
    pass


def load_config(path) -> dict:
    text = Path(path).read_text()
    try:
        if str(path).endswith(".json"):
            return json.loads(text)
        return yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc


def validate_config(cfg) -> list:
    """Schema-check `cfg` and build its functions; returns [(id, function)]."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a mapping")
    errors = sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(cfg), key=lambda e: list(e.path))
    if errors:
        msgs = [f"{'/'.join(map(str, e.path)) or '<root>'}: {e.message}" for e in errors]
        raise ConfigError("invalid config:\n  " + "\n  ".join(msgs))
    out = []
    seen = set()
    for k, d in enumerate(cfg["functions"]):
        fid = str(d.get("id", f"{d['type']}-{k}"))
        if fid in seen:
            raise ConfigError(f"duplicate function id {fid!r}")
        seen.add(fid)
        try:
            out.append((fid, from_dict(d)))
        except ValueError as exc:
            raise ConfigError(f"functions/{k}: {exc}") from exc
    return out


def _params(cfg):
    p = dict(DEFAULTS)
    p.update(cfg.get("parameters") or {})
    p["stability"] = {**DEFAULTS["stability"], **(cfg.get("parameters", {}) or {}).get("stability", {})}
    return p


def config_hash(cfg) -> str:
    return hashlib.sha256(dumps(cfg).encode()).hexdigest()[:16]


@dataclass
class ReportRecord:
    experiment: str
    probe: int
    id: str
    passed: bool | None
    payload: dict
    config_hash: str = ""
    timestamp: str = ""
    versions: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "experiment": self.experiment, "probe": self.probe, "id": self.id, "passed": self.passed,
            "payload": self.payload, "config_hash": self.config_hash, "timestamp": self.timestamp,
            "versions": self.versions,
        }


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the clock for reproducible report streams
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def _versions():
    return {"proxgeneric": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


# --- probe builders: each returns a list of (experiment, id, thunk) where the thunk
# yields (passed, payload)


def _probe_spec(p):
    return ProbeSpec(p["probe_mode"], p["mesh"], seed=p["seed"])


def _metric_table_probes(funcs, p):
    def run():
        fs = [f for _, f in funcs]
        table = metric_table(fs, p["N"], _probe_spec(p))
        rows = []
        for i, (a, _) in enumerate(funcs):
            for j, (b, _) in enumerate(funcs):
                rows.append({"f": a, "g": b, "lower": table[i][j].lower, "upper": table[i][j].upper})
        payload = {"pairs": rows, "N": p["N"]}
        if len(fs) >= 3:
            rep = verify_metric_axioms(fs, p["N"], _probe_spec(p), table=table)
            payload["axioms"] = rep.to_record()
            return rep.passed, payload
        return None, payload
    return [("metric-table", "table", run)]


def _sweep_probes(funcs, p):
    probes = []
    for fid, f in funcs:
        def run(f=f):
            M = m_bound(f, p["N"])
            rows, ok = [], True
            for sigma in sorted(p["sigmas"], reverse=True):
                est = realized_distance(f, sigma, p["N"], _probe_spec(p))
                checks = {}
                for eps in p["eps"]:
                    if sigma < eps / (2 * M):
                        checks[str(eps)] = est.upper < eps
                        ok &= est.upper < eps
                rows.append({"sigma": sigma, "lower": est.lower, "upper": est.upper, "below_eps": checks})
            uppers = [r["upper"] for r in rows]
            monotone = all(uppers[i + 1] <= uppers[i] for i in range(len(uppers) - 1))
            return ok and monotone, {"M": M, "rows": rows, "monotone": monotone}
        probes.append(("perturbation-sweep", fid, run))
        for eps in p["eps"]:
            def run_eps(f=f, eps=eps):
                plan = choose_sigma(f, eps, p["N"], _probe_spec(p))
                return bool(plan.achieved), plan.to_record()
            probes.append(("perturbation-sweep", f"{fid}@eps={eps:g}", run_eps))
    return probes


def _dynamics_verdict(f, p):
    return super_regularity_probe(f, p["s"], p["start_count"], p["max_iters"], p["tol"], p["seed"])


def _dynamics_probes(funcs, p):
    probes = []
    for fid, f in funcs:
        def run(f=f):
            rep = _dynamics_verdict(f, p)
            info = f.minimizer_info()
            if info.kind == "unique":
                ok = rep.verdict == POSITIVE and np.linalg.norm(rep.x_T - info.point) <= 10 * p["tol"]
            else:
                ok = rep.verdict == NEGATIVE
            payload = rep.to_record()
            payload["minimizer_kind"] = info.kind
            return bool(ok), payload
        probes.append(("dynamics", fid, run))
    return probes


def _check_probes(funcs, p):
    probes = []
    for fid, f in funcs:
        probes.append(("checks", f"{fid}:firmly-nonexpansive",
                       lambda f=f: _rep(check_firmly_nonexpansive(prox_operator(f), p["samples"], p["seed"]))))
        probes.append(("checks", f"{fid}:cycle-inequality",
                       lambda f=f: _rep(check_cycle_inequality(prox_operator(f), p["max_cycle_len"],
                                                               p["cycles"], p["seed"]))))
        try:
            exact_resolvent(f, 1.0, np.zeros(f.dim))
            supported = True
        except UnsupportedNodeError:
            supported = False
        if supported:
            for lam in p["lambdas"]:
                probes.append(("checks", f"{fid}:resolvent-identity@lam={lam:g}",
                               lambda f=f, lam=lam: _rep(check_resolvent_identity(f, lam, 1000, p["seed"]))))
        probes.append(("checks", f"{fid}:graphical-convergence",
                       lambda f=f: _rep(graphical_convergence_probe(f, p["k_list"], 256, p["seed"],
                                                                    p["graphical_tol"]))))
    if p["rotation_counterexample"]:
        def run_rot():
            R = rotation_resolvent()
            fne = check_firmly_nonexpansive(R, p["samples"], p["seed"])
            cyc = check_cycle_inequality(R, p["max_cycle_len"], max(p["cycles"], 10_000), p["seed"])
            separated = fne.passed and cyc.worst_margin < -1e-3
            return separated, {"firmly_nonexpansive": fne.to_record(), "cycle_inequality": cyc.to_record()}
        probes.append(("checks", "rotation-separation", run_rot))
    return probes


def _rep(report):
    return report.passed, report.to_record()


def _stability_probes(funcs, p):
    st = p["stability"]
    probes = []
    for fid, f in funcs:
        def run(f=f):
            rep = super_regularity_probe(f, st["s"], p["start_count"], p["max_iters"], p["tol"], p["seed"])
            if rep.verdict != POSITIVE:
                return None, {"skipped": f"no super-regularity evidence ({rep.verdict})"}
            probe = stability_probe(f, Perturbed(f, st["sigma"]), st["s"], st["eps"], st["max_iters"],
                                    start_count=st["starts"], seed=p["seed"], N=p["N"],
                                    probe=_probe_spec(p), x_T=rep.x_T)
            payload = probe.to_record()
            payload["sigma"] = st["sigma"]
            return probe.achieved, payload
        probes.append(("stability", fid, run))
    return probes


_BUILDERS: dict[str, Callable] = {
    "metric-table": _metric_table_probes,
    "perturbation-sweep": _sweep_probes,
    "dynamics": _dynamics_probes,
    "checks": _check_probes,
    "stability": _stability_probes,
}


def _execute(thunk):
    try:
        passed, payload = thunk()
        return passed, plain(payload)
    except (ProxNonconvergence, ValueError, FloatingPointError) as exc:
        return False, {"error": f"{type(exc).__name__}: {exc}"}


def run_config(cfg: dict, *, seed: int | None = None, parallel: bool = False) -> list[ReportRecord]:
    """Validate `cfg`, run every configured experiment, and return records in
    probe order (independent of `parallel`)."""
    cfg = json.loads(json.dumps(cfg))
    if seed is not None:
        cfg.setdefault("parameters", {})["seed"] = int(seed)
    funcs = validate_config(cfg)
    p = _params(cfg)
    names = cfg["experiment"]
    names = [names] if isinstance(names, str) else list(names)
    probes = []
    for name in names:
        probes.extend(_BUILDERS[name](funcs, p))
    if parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda pr: _execute(pr[2]), probes))
    else:
        results = [_execute(pr[2]) for pr in probes]
    h = config_hash(cfg)
    ts = _timestamp()
    vers = _versions()
    return [ReportRecord(exp, k, pid, None if passed is None else bool(passed), payload, h, ts, vers)
            for k, ((exp, pid, _), (passed, payload)) in enumerate(zip(probes, results))]


def all_passed(records) -> bool:
    return all(r.passed is not False for r in records)


def to_jsonl(records) -> str:
    return "".join(dumps(r) + "\n" for r in records)


_HEADLINE = ("upper", "worst_margin", "spread", "worst_error", "M")


def to_csv(records) -> str:
    """One summary row per record: experiment, probe, id, passed, quantity, value."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["experiment", "probe", "id", "passed", "quantity", "value"])
    for r in records:
        qty, val = "", ""
        for key in _HEADLINE:
            if key in r.payload:
                qty, val = key, r.payload[key]
                break
        if isinstance(r.payload.get("realized"), list):
            qty, val = "upper", r.payload["realized"][1]
        if r.experiment == "metric-table" and "axioms" in r.payload:
            qty, val = "worst_margin", r.payload["axioms"]["worst_margin"]
        w.writerow([r.experiment, r.probe, r.id, "" if r.passed is None else r.passed, qty,
                    json.dumps(val) if not isinstance(val, str) else val])
    return buf.getvalue()
