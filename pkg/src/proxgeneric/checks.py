"""Randomized falsification of the operator characterizations.

The properties checked are universally quantified, so sampling can only
refute them or accumulate evidence. Every check is seeded and records the
inputs that achieved its worst margin.
"""

from __future__ import annotations

import numpy as np

from .catalog import (AbsSum, ConvexFunction, EuclNorm, Huber, IndicatorBall, IndicatorBox,
                      Quadratic, Shifted, Tikhonov, Zero)
from .metric import DEFAULT_N, ProbeSpec, metric
from .prox import Operator, prox, prox_operator
from .reports import CheckReport

OperatorUnderTest = Operator

PASS_SLACK = 1e-9
SAMPLE_RADIUS = 10.0


class UnsupportedNodeError(TypeError):
    pass


def uniform_ball(rng: np.random.Generator, m: int, dim: int, radius: float = SAMPLE_RADIUS) -> np.ndarray:
    u = rng.standard_normal((m, dim))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return u * (radius * rng.random(m) ** (1.0 / dim))[:, None]


def rotation_resolvent(angle: float = np.pi / 2) -> Operator:
    """(I + R)^-1 for the planar rotation R by `angle`.

    R is monotone for |angle| <= pi/2, so the resolvent is firmly
    nonexpansive; a quarter turn is not cyclically monotone.
    """
    c, s = np.cos(angle), np.sin(angle)
    M = np.linalg.inv(np.eye(2) + np.array([[c, -s], [s, c]]))
    return Operator(lambda x: x @ M.T, 2, f"resolvent-of(rotation {angle:.6g} rad)")


def check_firmly_nonexpansive(T: Operator, samples: int = 10_000, seed: int = 0,
                              radius: float = SAMPLE_RADIUS) -> CheckReport:
    """min over sampled pairs of <x - y, Tx - Ty> - ||Tx - Ty||^2."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    X = uniform_ball(rng, samples, T.dim, radius)
    Y = uniform_ball(rng, samples, T.dim, radius)
    D = T(X) - T(Y)
    margin = np.einsum("ij,ij->i", X - Y, D) - np.einsum("ij,ij->i", D, D)
    k = int(np.argmin(margin))
    worst = float(margin[k])
    return CheckReport("firmly-nonexpansive", samples, worst, worst >= -PASS_SLACK,
                       {"x": X[k].tolist(), "y": Y[k].tolist()}, seed, {"operator": T.provenance})


def cycle_sums(T: Operator, cycles: np.ndarray) -> np.ndarray:
    """sum_i <x_i - T x_i, T x_i - T x_{i+1}> for cycles of shape (trials, m, n)."""
    TX = T(cycles)
    nxt = np.roll(TX, -1, axis=1)
    return np.einsum("tmi,tmi->t", cycles - TX, TX - nxt)


def check_cycle_inequality(T: Operator, max_cycle_len: int = 6, trials: int = 1000,
                           seed: int = 0, radius: float = SAMPLE_RADIUS) -> CheckReport:
    """Random cycles of every length 2..max_cycle_len, split evenly."""
    if max_cycle_len < 2:
        raise ValueError("max_cycle_len must be >= 2")
    rng = np.random.default_rng(seed)
    lengths = np.arange(2, max_cycle_len + 1)
    per = np.diff(np.linspace(0, trials, len(lengths) + 1).round().astype(int))
    worst, wit = np.inf, {}
    by_length = {}
    for m, cnt in zip(lengths, per):
        if cnt == 0:
            continue
        cyc = uniform_ball(rng, cnt * m, T.dim, radius).reshape(cnt, m, T.dim)
        sums = cycle_sums(T, cyc)
        k = int(np.argmin(sums))
        by_length[int(m)] = float(sums[k])
        if sums[k] < worst:
            worst = float(sums[k])
            wit = {"cycle": cyc[k].tolist(), "length": int(m)}
    return CheckReport("cycle-inequality", int(trials), worst, worst >= -PASS_SLACK, wit, seed,
                       {"operator": T.provenance, "worst_by_length": by_length})


def _piecewise(candidates, f_1d: ConvexFunction, x, lam):
    """Pick the candidate y with (x - y)/lam in df(y) (coordinatewise)."""
    best, best_d = None, np.inf
    for y in candidates:
        S = f_1d.subdifferential(np.array([y]))
        if S.is_empty:
            continue
        d = S.dist(np.array([(x - y) / lam]))
        if d < best_d:
            best, best_d = y, d
    return best, best_d


def exact_resolvent(f: ConvexFunction, lam: float, x) -> np.ndarray:
    """Solve y + lam*df(y) containing x without the prox formulas.

    Smooth quadratics use a dense linear solve; the other supported nodes
    enumerate the pieces of their subdifferential and keep the piece whose
    inclusion holds, checked against the catalog's set descriptions.
    """
    x = np.asarray(x, dtype=float)
    if isinstance(f, Shifted):
        return exact_resolvent(f.base, lam, x)
    if isinstance(f, Zero):
        return x.copy()
    if isinstance(f, Quadratic):
        return np.linalg.solve(np.eye(f.dim) + lam * f.Q, x - lam * f.b)
    if isinstance(f, Tikhonov) and isinstance(f.base, Zero):
        return x / (1.0 + lam * f.mu)
    if isinstance(f, (AbsSum, Huber, IndicatorBox)):
        y = np.empty_like(x)
        for j, xj in enumerate(x):
            if isinstance(f, AbsSum):
                f1 = AbsSum(1, f.w)
                cands = [xj - lam * f.w, xj + lam * f.w, 0.0]
            elif isinstance(f, Huber):
                f1 = Huber(1, f.delta)
                cands = [xj / (1.0 + lam), xj - lam * f.delta, xj + lam * f.delta]
            else:
                f1 = IndicatorBox(f.lo[j:j + 1], f.hi[j:j + 1])
                cands = [xj, f.lo[j], f.hi[j]]
            y[j], _ = _piecewise(cands, f1, xj, lam)
        return y
    if isinstance(f, EuclNorm):
        nx = np.linalg.norm(x)
        cands = [np.zeros(f.dim)] + ([x * (1.0 - lam * f.w / nx)] if nx > 0 else [])
    elif isinstance(f, IndicatorBall):
        d = x - f.center
        nd = np.linalg.norm(d)
        cands = [x.copy()] + ([f.center + f.radius * d / nd] if nd > 0 else [])
    else:
        raise UnsupportedNodeError(f"no exact resolvent solver for {type(f).__name__}")
    dists = []
    for y in cands:
        S = f.subdifferential(y)
        dists.append(np.inf if S.is_empty else S.dist((x - y) / lam))
    return cands[int(np.argmin(dists))]


def resolvent_operator(f: ConvexFunction, lam: float = 1.0) -> Operator:
    """J_{lam df} as an operator handle, via :func:`exact_resolvent`."""
    exact_resolvent(f, lam, np.zeros(f.dim))

    def apply(x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, f.dim)
        out = np.array([exact_resolvent(f, lam, p) for p in flat])
        return out.reshape(x.shape)

    return Operator(apply, f.dim, f"resolvent-of(d {f!r}, lam={lam:g})")


def check_resolvent_identity(f: ConvexFunction, lam: float = 1.0, samples: int = 1000,
                             seed: int = 0, radius: float = SAMPLE_RADIUS) -> CheckReport:
    """max over samples of ||J_{lam df}(x) - P_lam f(x)||; pass iff <= 1e-8.

    Here the margin is a gap (smaller is better), so `passed` compares it
    with the tolerance instead of with zero.
    """
    exact_resolvent(f, lam, np.zeros(f.dim))  # raises early for unsupported nodes
    rng = np.random.default_rng(seed)
    X = uniform_ball(rng, samples, f.dim, radius)
    J = np.array([exact_resolvent(f, lam, x) for x in X])
    P = prox(f, X, lam).y
    gaps = np.linalg.norm(J - P, axis=1)
    k = int(np.argmax(gaps))
    worst = float(gaps[k])
    return CheckReport("resolvent-identity", samples, worst, worst <= 1e-8,
                       {"x": X[k].tolist()}, seed, {"function": f.to_dict(), "lam": lam})


def graphical_convergence_probe(f: ConvexFunction, k_list=(1, 4, 16, 64, 256, 1024),
                                sample_points=256, seed: int = 0, tol: float = 1e-2,
                                radius: float = SAMPLE_RADIUS) -> CheckReport:
    """Prox of f_k = f + (1/k)||.||^2/2 against prox of f on sample points.

    Passes when the gaps are nonincreasing in k (k_list sorted) and the last
    one is at most `tol`. `sample_points` is either a count or an array.
    """
    k_list = [int(k) for k in k_list]
    if any(k < 1 for k in k_list) or k_list != sorted(k_list):
        raise ValueError("k_list must be positive and nondecreasing")
    if np.isscalar(sample_points):
        X = uniform_ball(np.random.default_rng(seed), int(sample_points), f.dim, radius)
    else:
        X = np.asarray(sample_points, dtype=float).reshape(-1, f.dim)
    base = prox(f, X).y
    gaps = []
    for k in k_list:
        yk = prox(Tikhonov(f, 1.0 / k), X).y
        gaps.append(float(np.linalg.norm(yk - base, axis=1).max()))
    steps = [gaps[i] - gaps[i + 1] for i in range(len(gaps) - 1)]
    worst = min([tol - gaps[-1]] + [s + PASS_SLACK for s in steps])
    return CheckReport("graphical-convergence", len(X), worst, worst >= 0.0,
                       {"k_list": k_list}, seed, {"gaps": gaps, "tol": tol, "function": f.to_dict()})


def cauchy_limit_probe(sequence, N: int = DEFAULT_N, probe: ProbeSpec = ProbeSpec(),
                       samples: int = 10_000, trials: int = 1000, seed: int = 0) -> CheckReport:
    """Desk-scale look at a sequence in the prox metric.

    Checks that the distance from each member to the last one does not grow
    along the sequence, and that the last member (the stand-in for the
    pointwise limit) is a firmly nonexpansive cyclic resolvent.
    """
    seq = list(sequence)
    if len(seq) < 3:
        raise ValueError("need at least three members")
    last = seq[-1]
    est = [metric(f, last, N, probe) for f in seq[:-1]]
    uppers = [e.upper for e in est]
    mono = min([uppers[i] - uppers[i + 1] for i in range(len(uppers) - 1)] + [np.inf])
    T = prox_operator(last)
    fne = check_firmly_nonexpansive(T, samples, seed)
    cyc = check_cycle_inequality(T, 6, trials, seed)
    worst = float(min(mono, fne.worst_margin, cyc.worst_margin))
    passed = worst >= -PASS_SLACK
    return CheckReport("cauchy-limit", len(seq), worst, passed, {}, seed, {
        "distances_to_last": [[e.lower, e.upper] for e in est],
        "firmly_nonexpansive": fne.worst_margin, "cycle_inequality": cyc.worst_margin,
    })
