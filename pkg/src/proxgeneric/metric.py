"""Distance between subdifferentials through their proximal mappings.

    d(df, dg) = sum_i 2^-i a( sup_{||x|| <= i} ||P_1 f(x) - P_1 g(x)|| ),
    a(t) = t / (1 + t).

The same number is the distance between the classes of f and g modulo
constants and between the operators P_1 f and P_1 g, so one implementation
serves all three entry points. The series is truncated at N and every shell
sup is enclosed in an interval: in mesh mode the sample set covers the ball
to within h and the difference map is L-Lipschitz (L = 2 for two
nonexpansive maps), so the true sup lies in [max, max + L*h].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .catalog import ConvexFunction, normalize
from .prox import Operator, prox_operator
from .reports import CheckReport

DEFAULT_N = 20
DEFAULT_MESH = {1: 1e-3, 2: 5e-2}
RANDOM_SAMPLES_PER_RADIUS = 4096
# relative/absolute padding absorbing rounding in computed norms and sums
_REL_PAD = 1e-12
_ABS_PAD = 64 * np.finfo(float).eps


def gauge(t):
    """a(t) = t / (1 + t); a(inf) = 1."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise ValueError("gauge is defined on [0, inf)")
    with np.errstate(invalid="ignore"):
        out = np.where(np.isinf(t), 1.0, t / (1.0 + t))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ProbeSpec:
    """How shell sups are sampled.

    mode "mesh" covers each ball to within `h` (rigorous, n <= 2);
    mode "random" draws `samples_per_radius * i` uniform points in B_i
    (lower bounds only, flagged heuristic).
    """

    mode: str | None = None
    h: float | None = None
    samples_per_radius: int = RANDOM_SAMPLES_PER_RADIUS
    seed: int = 0

    def resolve(self, dim: int) -> "ProbeSpec":
        mode = self.mode or ("mesh" if dim <= 2 else "random")
        if mode not in ("mesh", "random"):
            raise ValueError(f"unknown probe mode {mode!r}")
        if mode == "mesh":
            if dim > 2:
                raise ValueError("mesh probes are available for dimension 1 and 2 only")
            h = self.h if self.h is not None else DEFAULT_MESH[dim]
            if not h > 0:
                raise ValueError("mesh size must be positive")
            return ProbeSpec("mesh", h, self.samples_per_radius, self.seed)
        return ProbeSpec("random", None, self.samples_per_radius, self.seed)


@dataclass(frozen=True)
class BallProbe:
    """Sample points of the closed ball B_i(0).

    `labels[k]` is the smallest shell index whose ball the k-th point is
    credited to; the probe for shell i is every point with label <= i.
    """

    radius: int
    spec: ProbeSpec
    points: np.ndarray
    labels: np.ndarray

    @property
    def h(self):
        return self.spec.h

    def shell(self, i: int) -> np.ndarray:
        return self.points[self.labels <= i]

    @classmethod
    def build(cls, radius: int, dim: int, spec: ProbeSpec = ProbeSpec()) -> "BallProbe":
        spec = spec.resolve(dim)
        if radius < 1 or int(radius) != radius:
            raise ValueError("shell index must be a positive integer")
        radius = int(radius)
        if spec.mode == "mesh":
            pts, labels = _mesh_points(radius, dim, spec.h)
        else:
            pts, labels = _random_points(radius, dim, spec)
        return cls(radius, spec, pts, labels)


def _mesh_points(N, dim, h):
    if dim == 1:
        # spacing 2h; the endpoints +-i of every shell are added explicitly
        k = int(math.floor(N / (2 * h)))
        grid = (2 * h) * np.arange(-k, k + 1, dtype=float)
        labels = np.maximum(1, np.ceil(np.abs(grid) - 1e-12)).astype(int)
        ends = np.arange(1, N + 1, dtype=float)
        pts = np.concatenate([grid, ends, -ends])[:, None]
        labels = np.concatenate([labels, np.arange(1, N + 1), np.arange(1, N + 1)])
        return pts, labels
    # 2-D: square grid with covering radius h/2 plus circles with chord <= h on every
    # shell boundary; a point of B_i is then within h of some sample of label <= i
    s = h / math.sqrt(2.0)
    k = int(math.floor(N / s))
    ax = s * np.arange(-k, k + 1, dtype=float)
    gx, gy = np.meshgrid(ax, ax, indexing="ij")
    grid = np.stack([gx.ravel(), gy.ravel()], axis=1)
    r = np.linalg.norm(grid, axis=1)
    keep = r <= N
    grid, r = grid[keep], r[keep]
    glabels = np.maximum(1, np.ceil(r - 1e-12)).astype(int)
    circles, clabels = [], []
    for i in range(1, N + 1):
        m = max(8, int(math.ceil(2 * math.pi * i / h)))
        th = 2 * math.pi * np.arange(m) / m
        circles.append(i * np.stack([np.cos(th), np.sin(th)], axis=1))
        clabels.append(np.full(m, i))
    return (np.concatenate([grid] + circles), np.concatenate([glabels] + clabels))


def _random_points(N, dim, spec):
    pts, labels = [], []
    for i in range(1, N + 1):
        rng = np.random.default_rng([spec.seed, i])
        m = spec.samples_per_radius * i
        u = rng.standard_normal((m, dim))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        rad = i * rng.random(m) ** (1.0 / dim)
        pts.append(u * rad[:, None])
        labels.append(np.full(m, i))
    return np.concatenate(pts), np.concatenate(labels)


@dataclass(frozen=True)
class ShellInterval:
    lower: float
    upper: float  # inf when the probe cannot bound the sup

    def as_list(self):
        return [self.lower, None if math.isinf(self.upper) else self.upper]


def _pad(lo, hi, accuracy, scale):
    pad = _REL_PAD * scale + _ABS_PAD
    return max(0.0, lo - accuracy - pad), hi + accuracy + pad


def shell_sup(T1: Operator, T2: Operator, probe: BallProbe, *, lipschitz: float = 2.0) -> ShellInterval:
    """Enclosure of sup_{||x|| <= i} ||T1 x - T2 x|| over the probe's ball."""
    if T1.dim != T2.dim or probe.points.shape[1] != T1.dim:
        raise ValueError("dimension mismatch between operators and probe")
    pts = probe.shell(probe.radius)
    a, b = T1(pts), T2(pts)
    diff = np.linalg.norm(a - b, axis=-1)
    m = float(diff.max())
    scale = float(max(np.abs(a).max(), np.abs(b).max(), 1.0))
    acc = T1.accuracy + T2.accuracy
    if probe.spec.mode == "mesh":
        return ShellInterval(*_pad(m, m + lipschitz * probe.h, acc, scale))
    lo, _ = _pad(m, m, acc, scale)
    return ShellInterval(lo, math.inf)


@dataclass(frozen=True)
class MetricEstimate:
    """Interval enclosure [lower, upper] of the truncated-and-tail-bounded distance."""

    lower: float
    upper: float
    N: int
    mode: str
    h: float | None
    seed: int
    shells: list = field(default_factory=list)

    @property
    def heuristic(self) -> bool:
        return self.mode != "mesh"

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_record(self) -> dict:
        return {
            "lower": self.lower, "upper": self.upper, "N": self.N, "mode": self.mode,
            "h": self.h, "seed": self.seed, "heuristic": self.heuristic,
            "shells": [s.as_list() for s in self.shells],
        }


@lru_cache(maxsize=16)
def _cached_probe(N, dim, spec):
    probe = BallProbe.build(N, dim, spec)
    probe.points.setflags(write=False)
    return probe


def _shell_maxima(T1, T2, dim, N, spec):
    probe = _cached_probe(N, dim, spec)
    a, b = T1(probe.points), T2(probe.points)
    diff = np.linalg.norm(a - b, axis=-1)
    per_label = np.zeros(N)
    np.maximum.at(per_label, probe.labels - 1, diff)
    scale = float(max(np.abs(a).max(), np.abs(b).max(), 1.0))
    return np.maximum.accumulate(per_label), scale, probe.spec


def operator_distance(T1: Operator, T2: Operator, N: int = DEFAULT_N,
                      probe: ProbeSpec = ProbeSpec(), *, lipschitz: float = 2.0) -> MetricEstimate:
    """Enclosure of rho(T1, T2) for nonexpansive operators on R^n.

    Parameters
    ----------
    T1, T2 : Operator
        Nonexpansive maps of the same dimension.
    N : int
        Truncation; the omitted tail contributes at most 2^-N.
    probe : ProbeSpec
        Sampling of the balls B_1, ..., B_N.
    lipschitz : float
        Lipschitz constant of x -> T1 x - T2 x used for the mesh correction.
        2 is always valid for nonexpansive maps; pass a smaller one only when
        it is known (for example sigma for P_1 f versus (1 - sigma) P_1 f).
    """
    if T1.dim != T2.dim:
        raise ValueError(f"dimension mismatch: {T1.dim} vs {T2.dim}")
    if N < 1:
        raise ValueError("truncation N must be >= 1")
    maxima, scale, spec = _shell_maxima(T1, T2, T1.dim, N, probe)
    acc = T1.accuracy + T2.accuracy
    shells = []
    for m in maxima:
        m = float(m)
        if spec.mode == "mesh":
            shells.append(ShellInterval(*_pad(m, m + lipschitz * spec.h, acc, scale)))
        else:
            shells.append(ShellInterval(_pad(m, m, acc, scale)[0], math.inf))
    w = 0.5 ** np.arange(1, N + 1)
    lower = float(np.sum(w * gauge(np.array([s.lower for s in shells]))))
    upper = float(np.sum(w * gauge(np.array([s.upper for s in shells])))) + 0.5 ** N
    lower = max(0.0, lower - _ABS_PAD)
    upper = min(1.0, upper + _ABS_PAD)
    return MetricEstimate(lower, upper, N, spec.mode, spec.h, spec.seed, shells)


def metric(f: ConvexFunction, g: ConvexFunction, N: int = DEFAULT_N,
           probe: ProbeSpec = ProbeSpec(), *, lipschitz: float = 2.0) -> MetricEstimate:
    """Enclosure of d(df, dg), computed from P_1 f and P_1 g."""
    if f.dim != g.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {g.dim}")
    return operator_distance(prox_operator(f), prox_operator(g), N, probe, lipschitz=lipschitz)


subdifferential_distance = metric


def class_distance(f: ConvexFunction, g: ConvexFunction, N: int = DEFAULT_N,
                   probe: ProbeSpec = ProbeSpec(), **kw) -> MetricEstimate:
    """Distance between the classes of f and g modulo additive constants."""
    return metric(normalize(f), normalize(g), N, probe, **kw)


def metric_table(functions, N: int = DEFAULT_N, probe: ProbeSpec = ProbeSpec()):
    """All pairwise enclosures; the (j, i) entry is the (i, j) one."""
    k = len(functions)
    table = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            est = metric(functions[i], functions[j], N, probe)
            table[i][j] = table[j][i] = est
    return table


def verify_metric_axioms(sample, N: int = DEFAULT_N, probe: ProbeSpec = ProbeSpec(),
                         slack: float = 1e-6, table=None) -> CheckReport:
    """Check nonnegativity and the bound 1, zero diagonal, symmetry and the
    triangle inequality on every pair and triple of `sample`."""
    sample = list(sample)
    if len(sample) < 3:
        raise ValueError("need at least three functions")
    k = len(sample)
    if table is None:
        table = metric_table(sample, N, probe)
    margins = {"bounds": math.inf, "diagonal": math.inf, "symmetry": math.inf, "triangle": math.inf}
    witness = {}

    def note(axiom, m, wit):
        if m < margins[axiom]:
            margins[axiom] = float(m)
            witness[axiom] = wit

    for i in range(k):
        for j in range(k):
            e = table[i][j]
            note("bounds", min(e.lower, 1.0 - e.upper, e.upper - e.lower), [i, j])
            note("symmetry", 0.0 - abs(e.lower - table[j][i].lower) - abs(e.upper - table[j][i].upper), [i, j])
        note("diagonal", 0.0 - table[i][i].lower, [i, i])
        for j in range(k):
            for h in range(k):
                m = table[i][h].upper + table[h][j].upper - table[i][j].lower
                note("triangle", float(m), [i, j, h])
    worst = min(margins.values())
    return CheckReport("metric-axioms", k * k * k, worst, worst >= -slack, witness,
                       probe.seed, {"margins": margins, "N": N})
