"""Proximal point iteration and desk-scale probes of its limit behaviour.

Super-regularity (uniform convergence of T^n to a single point on every ball)
is a limit property, so the probe here only ever reports evidence: starts in
B_s(0) are iterated until their steps fall below a tolerance and the spread of
the limits decides a tri-state verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .catalog import ConvexFunction
from .metric import DEFAULT_N, MetricEstimate, ProbeSpec, operator_distance
from .prox import Operator, prox_operator

POSITIVE = "super-regular-evidence"
NEGATIVE = "not-super-regular-evidence"
INCONCLUSIVE = "inconclusive"

DEFAULT_TOL = 1e-8
SPREAD_FACTOR = 10.0


@dataclass
class IterationTrace:
    start: np.ndarray
    points: np.ndarray
    residuals: np.ndarray
    limit: np.ndarray | None
    iterations: int

    def to_record(self) -> dict:
        return {
            "start": self.start, "iterations": self.iterations,
            "limit": self.limit, "final_residual": self.residuals[-1] if len(self.residuals) else 0.0,
        }


def iterate(f: ConvexFunction | Operator, x0, max_iters: int = 10_000, tol: float = DEFAULT_TOL) -> IterationTrace:
    """Run x_{k+1} = P_1 f(x_k) until ||x_{k+1} - x_k|| <= tol.

    An exhausted budget is not an error: the trace simply has no limit.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    T = f if isinstance(f, Operator) else prox_operator(f)
    x = np.asarray(x0, dtype=float).reshape(T.dim)
    points = [x]
    residuals = []
    for _ in range(max_iters):
        y = T(x)
        r = float(np.linalg.norm(y - x))
        points.append(y)
        residuals.append(r)
        x = y
        if r <= tol:
            return IterationTrace(points[0], np.array(points), np.array(residuals), x, len(residuals))
    return IterationTrace(points[0], np.array(points), np.array(residuals), None, len(residuals))


def _iterate_batch(T: Operator, X, max_iters, tol):
    """Iterate every row of X; returns final points, residuals and hitting times."""
    X = np.array(X, dtype=float)
    hit = np.full(len(X), -1)
    res = np.full(len(X), np.inf)
    active = np.ones(len(X), dtype=bool)
    for k in range(1, max_iters + 1):
        if not active.any():
            break
        Y = T(X[active])
        r = np.linalg.norm(Y - X[active], axis=1)
        X[active] = Y
        res[active] = r
        idx = np.flatnonzero(active)
        done = r <= tol
        hit[idx[done]] = k
        active[idx[done]] = False
    return X, res, hit


def ball_starts(dim: int, s: float, count: int, seed: int = 0) -> np.ndarray:
    """Axis extreme points +-s e_j followed by scrambled Halton points inside B_s(0)."""
    axes = np.concatenate([s * np.eye(dim), -s * np.eye(dim)])
    need = max(0, count - len(axes))
    pts = np.empty((0, dim))
    if need:
        sampler = qmc.Halton(d=dim, scramble=True, seed=seed)
        while len(pts) < need:
            cand = 2.0 * sampler.random(max(2 * need, 16)) - 1.0
            cand = cand[np.linalg.norm(cand, axis=1) <= 1.0]
            pts = np.concatenate([pts, s * cand])
    return np.concatenate([axes, pts[:need]])[:max(count, 2)]


@dataclass
class SuperRegularityReport:
    s: float
    starts: np.ndarray
    limits: np.ndarray
    hitting_times: np.ndarray
    spread: float
    verdict: str
    x_T: np.ndarray | None
    tol: float
    max_iters: int
    fixed_point_residual: float | None = None
    seed: int = 0

    def to_record(self) -> dict:
        return {
            "s": self.s, "starts": len(self.starts), "spread": self.spread, "verdict": self.verdict,
            "x_T": self.x_T, "tol": self.tol, "max_iters": self.max_iters,
            "max_hitting_time": int(self.hitting_times.max()) if self.hitting_times.min() >= 0 else None,
            "fixed_point_residual": self.fixed_point_residual, "seed": self.seed,
        }


def _spread(P):
    diff = P[:, None, :] - P[None, :, :]
    return float(np.sqrt((diff ** 2).sum(-1)).max()) if len(P) > 1 else 0.0


def super_regularity_probe(f: ConvexFunction, s: float = 1.0, start_count: int = 32,
                           max_iters: int = 10_000, tol: float = DEFAULT_TOL,
                           seed: int = 0) -> SuperRegularityReport:
    """Gather evidence for or against P_1 f being super-regular on B_s(0).

    Starts are iterated until each step is below tol/100. The verdict is
    positive when every start converged and the limits are within `tol` of
    each other, negative when the limits (or current iterates) spread by at
    least 10*tol after convergence, and inconclusive otherwise.
    """
    if not s > 0:
        raise ValueError("s must be positive")
    if start_count < 2:
        raise ValueError("need at least two starts")
    T = prox_operator(f)
    starts = ball_starts(f.dim, s, start_count, seed)
    limits, res, hit = _iterate_batch(T, starts, max_iters, tol / 100.0)
    spread = _spread(limits)
    converged = bool(np.all(hit >= 0))
    x_T = None
    fp = None
    if converged and spread <= tol:
        verdict = POSITIVE
        x_T = limits.mean(axis=0)
        fp = float(np.linalg.norm(T(x_T) - x_T))
    elif converged and spread >= SPREAD_FACTOR * tol:
        verdict = NEGATIVE
    else:
        verdict = INCONCLUSIVE
    return SuperRegularityReport(s, starts, limits, hit, spread, verdict, x_T, tol, max_iters, fp, seed)


@dataclass
class StabilityProbe:
    x_T: np.ndarray
    delta: MetricEstimate
    eps: float
    s: float
    n0: int | None
    worst_error: float
    errors: np.ndarray = field(repr=False)
    starts: int = 0
    seed: int = 0

    @property
    def achieved(self) -> bool:
        return self.n0 is not None

    def to_record(self) -> dict:
        return {
            "x_T": self.x_T, "delta": [self.delta.lower, self.delta.upper], "eps": self.eps,
            "s": self.s, "n0": self.n0, "worst_error": self.worst_error, "achieved": self.achieved,
            "starts": self.starts, "max_iters": len(self.errors) - 1, "seed": self.seed,
        }


def stability_probe(f: ConvexFunction, g: ConvexFunction, s: float = 1.0, eps: float = 1e-2,
                    max_iters: int = 200, *, start_count: int = 64, seed: int = 0,
                    N: int = DEFAULT_N, probe: ProbeSpec = ProbeSpec(),
                    x_T=None) -> StabilityProbe:
    """Smallest observed n0 with ||P_1g^n x - x_T|| < eps for all sampled x in
    B_s(0) and all n0 <= n <= max_iters, where x_T is the fixed point of P_1 f.

    The distance between P_1 f and P_1 g is reported alongside, as the delta
    this pair realizes.
    """
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    if x_T is None:
        rep = super_regularity_probe(f, s, seed=seed)
        if rep.verdict != POSITIVE:
            raise ValueError(f"P_1 f shows no super-regularity evidence ({rep.verdict}); x_T unknown")
        x_T = rep.x_T
    x_T = np.asarray(x_T, dtype=float)
    Tf, Tg = prox_operator(f), prox_operator(g)
    X = ball_starts(f.dim, s, start_count, seed)
    errors = np.empty(max_iters + 1)
    errors[0] = np.linalg.norm(X - x_T, axis=1).max()
    for n in range(1, max_iters + 1):
        X = Tg(X)
        errors[n] = np.linalg.norm(X - x_T, axis=1).max()
    # tail maxima: worst error over n' in [n, max_iters]
    tail = np.maximum.accumulate(errors[::-1])[::-1]
    ok = np.flatnonzero(tail < eps)
    n0 = int(ok[0]) if len(ok) else None
    worst = float(tail[n0]) if n0 is not None else float(tail[-1])
    delta = operator_distance(Tf, Tg, N, probe)
    return StabilityProbe(x_T, delta, eps, s, n0, worst, errors, len(X), seed)
