"""Symbolic catalog of proper, lsc, convex functions on R^n.

Each node knows how to evaluate itself, describe its subdifferential exactly,
and report what is known about its minimizers. Proximal mappings live in
:mod:`proxgeneric.prox`; they dispatch on the node classes defined here.

Functions are compared modulo additive constants (see :func:`normalize`),
since two functions that differ by a constant have the same proximal mapping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .subdiff import Ball, Box, EmptySet, Ray, Singleton, SubgradientSet

PSD_FLOOR = -1e-12
# slack for deciding domain membership of indicator nodes
DOMAIN_TOL = 1e-10


class DimensionError(ValueError):
    pass


def _vec(v, name="vector") -> np.ndarray:
    a = np.array(v, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1)
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {a.shape}")
    return a


def _check_dim(f: "ConvexFunction", x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != f.dim:
        raise DimensionError(f"expected trailing dimension {f.dim}, got shape {x.shape}")
    return x


@dataclass(frozen=True)
class MinimizerInfo:
    """What is known about argmin f.

    `kind` is "unique", "set" or "empty". For "unique", `point` holds the
    minimizer; for "set", `description` names the minimizing set and `point`
    holds one member. `exact` is False when the point came out of an
    iterative solver rather than a formula.
    """

    kind: str
    point: np.ndarray | None = None
    description: str = ""
    value: float = float("nan")
    exact: bool = True

    @property
    def unbounded_below(self) -> bool:
        return self.kind == "empty" and self.value == -np.inf


@dataclass(frozen=True, eq=False)
class ConvexFunction:
    """Base class of catalog nodes. Instances are immutable."""

    dim: int

    type_name = "abstract"

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """f(x) for x of shape (..., dim); +inf outside the domain."""
        x = _check_dim(self, x)
        return self._evaluate(x)

    def subdifferential(self, x) -> SubgradientSet:
        """Exact set description of the subdifferential at a single point."""
        x = _check_dim(self, x)
        if x.ndim != 1:
            raise DimensionError("subdifferential takes a single point")
        return self._subdifferential(x)

    def minimizer_info(self) -> MinimizerInfo:
        raise NotImplementedError

    def params(self) -> dict[str, Any]:
        raise NotImplementedError

    def to_dict(self) -> dict[str, Any]:
        d = {"type": self.type_name}
        d.update(self.params())
        return d

    def key(self) -> tuple:
        """Hashable structural identity."""
        return _freeze(self.to_dict())

    def __eq__(self, other):
        return isinstance(other, ConvexFunction) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({inner})"

    def _evaluate(self, x):
        raise NotImplementedError

    def _subdifferential(self, x) -> SubgradientSet:
        raise NotImplementedError


def _freeze(obj):
    if isinstance(obj, dict):
        return tuple(sorted((k, _freeze(v)) for k, v in obj.items()))
    if isinstance(obj, (list, tuple)):
        return tuple(_freeze(v) for v in obj)
    if isinstance(obj, float):
        return float(obj)
    return obj


def _sqnorm(x):
    return np.sum(x * x, axis=-1)


@dataclass(frozen=True, eq=False, repr=False)
class Zero(ConvexFunction):
    type_name = "zero"

    def _evaluate(self, x):
        return np.zeros(x.shape[:-1]) if x.ndim > 1 else 0.0

    def _subdifferential(self, x):
        return Singleton(np.zeros(self.dim))

    def minimizer_info(self):
        return MinimizerInfo("set", np.zeros(self.dim), f"all of R^{self.dim}", 0.0)

    def params(self):
        return {"dim": self.dim}


@dataclass(frozen=True, eq=False, repr=False)
class Quadratic(ConvexFunction):
    """f(x) = 1/2 x'Qx + b'x + c with Q symmetric positive semidefinite."""

    Q: np.ndarray = field(default=None)
    b: np.ndarray = field(default=None)
    c: float = 0.0

    type_name = "quadratic"

    def __init__(self, Q, b=None, c=0.0):
        Q = np.atleast_2d(np.array(Q, dtype=float))
        n = Q.shape[0]
        if Q.shape != (n, n):
            raise ValueError(f"Q must be square, got {Q.shape}")
        if not np.allclose(Q, Q.T, rtol=0, atol=1e-12):
            raise ValueError("Q must be symmetric")
        Q = 0.5 * (Q + Q.T)
        evals, evecs = np.linalg.eigh(Q)
        if evals[0] < PSD_FLOOR:
            raise ValueError(f"Q is not positive semidefinite (min eigenvalue {evals[0]:.3g})")
        b = np.zeros(n) if b is None else _vec(b, "b")
        if b.shape != (n,):
            raise DimensionError(f"b has length {b.shape[0]}, expected {n}")
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", float(c))
        object.__setattr__(self, "_eig", (np.maximum(evals, 0.0), evecs))

    @property
    def eig(self):
        return self._eig

    def _evaluate(self, x):
        return 0.5 * np.einsum("...i,ij,...j->...", x, self.Q, x) + x @ self.b + self.c

    def _subdifferential(self, x):
        return Singleton(self.Q @ x + self.b)

    def minimizer_info(self):
        evals, evecs = self._eig
        scale = max(1.0, float(evals[-1]))
        null = evals <= 1e-12 * scale
        coef = evecs.T @ self.b
        if np.any(np.abs(coef[null]) > 1e-12 * max(1.0, np.linalg.norm(self.b))):
            return MinimizerInfo("empty", None, "unbounded below: b has a component in ker Q", -np.inf)
        inv = np.where(null, 0.0, 1.0 / np.where(null, 1.0, evals))
        p = -evecs @ (inv * coef)
        value = float(self.evaluate(p))
        if not np.any(null):
            return MinimizerInfo("unique", p, "", value)
        k = int(np.sum(null))
        return MinimizerInfo("set", p, f"affine subspace p + ker Q of dimension {k}", value)

    def params(self):
        return {"Q": self.Q.tolist(), "b": self.b.tolist(), "c": self.c}


@dataclass(frozen=True, eq=False, repr=False)
class AbsSum(ConvexFunction):
    """f(x) = w * sum_j |x_j|."""

    w: float = 1.0

    type_name = "abs_sum"

    def __post_init__(self):
        if not self.w > 0:
            raise ValueError("weight must be positive")

    def _evaluate(self, x):
        return self.w * np.sum(np.abs(x), axis=-1)

    def _subdifferential(self, x):
        s = self.w * np.sign(x)
        zero = x == 0
        return Box(np.where(zero, -self.w, s), np.where(zero, self.w, s))

    def minimizer_info(self):
        return MinimizerInfo("unique", np.zeros(self.dim), "", 0.0)

    def params(self):
        return {"dim": self.dim, "w": self.w}


@dataclass(frozen=True, eq=False, repr=False)
class EuclNorm(ConvexFunction):
    """f(x) = w * ||x||."""

    w: float = 1.0

    type_name = "eucl_norm"

    def __post_init__(self):
        if not self.w > 0:
            raise ValueError("weight must be positive")

    def _evaluate(self, x):
        return self.w * np.linalg.norm(x, axis=-1)

    def _subdifferential(self, x):
        nx = np.linalg.norm(x)
        if nx == 0:
            return Ball(np.zeros(self.dim), self.w)
        return Singleton(self.w * x / nx)

    def minimizer_info(self):
        return MinimizerInfo("unique", np.zeros(self.dim), "", 0.0)

    def params(self):
        return {"dim": self.dim, "w": self.w}


@dataclass(frozen=True, eq=False, repr=False)
class IndicatorBox(ConvexFunction):
    lo: np.ndarray = field(default=None)
    hi: np.ndarray = field(default=None)

    type_name = "indicator_box"

    def __init__(self, lo, hi):
        lo, hi = _vec(lo, "lo"), _vec(hi, "hi")
        if lo.shape != hi.shape:
            raise DimensionError("lo and hi differ in length")
        if np.any(lo > hi):
            raise ValueError("box needs lo <= hi")
        object.__setattr__(self, "dim", lo.shape[0])
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def _evaluate(self, x):
        inside = np.all((x >= self.lo - DOMAIN_TOL) & (x <= self.hi + DOMAIN_TOL), axis=-1)
        return np.where(inside, 0.0, np.inf) if x.ndim > 1 else (0.0 if inside else np.inf)

    def _subdifferential(self, x):
        if np.any(x < self.lo - DOMAIN_TOL) or np.any(x > self.hi + DOMAIN_TOL):
            return EmptySet(self.dim, "point outside the box")
        at_lo = np.abs(x - self.lo) <= DOMAIN_TOL
        at_hi = np.abs(x - self.hi) <= DOMAIN_TOL
        return Box(np.where(at_lo, -np.inf, 0.0), np.where(at_hi, np.inf, 0.0))

    def minimizer_info(self):
        mid = 0.5 * (self.lo + self.hi)
        if np.all(self.lo == self.hi):
            return MinimizerInfo("unique", mid, "", 0.0)
        return MinimizerInfo("set", mid, "the box itself", 0.0)

    def params(self):
        return {"lo": self.lo.tolist(), "hi": self.hi.tolist()}


@dataclass(frozen=True, eq=False, repr=False)
class IndicatorBall(ConvexFunction):
    center: np.ndarray = field(default=None)
    radius: float = 1.0

    type_name = "indicator_ball"

    def __init__(self, center, radius):
        center = _vec(center, "center")
        if not radius > 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "dim", center.shape[0])
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(radius))

    def _evaluate(self, x):
        inside = np.linalg.norm(x - self.center, axis=-1) <= self.radius + DOMAIN_TOL
        return np.where(inside, 0.0, np.inf) if x.ndim > 1 else (0.0 if inside else np.inf)

    def _subdifferential(self, x):
        d = x - self.center
        nd = np.linalg.norm(d)
        if nd > self.radius + DOMAIN_TOL:
            return EmptySet(self.dim, "point outside the ball")
        if nd < self.radius - DOMAIN_TOL:
            return Singleton(np.zeros(self.dim))
        return Ray(np.zeros(self.dim), d / nd)

    def minimizer_info(self):
        return MinimizerInfo("set", self.center.copy(), "the ball itself", 0.0)

    def params(self):
        return {"center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False, repr=False)
class Huber(ConvexFunction):
    """Coordinatewise Huber loss with threshold delta."""

    delta: float = 1.0

    type_name = "huber"

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")

    def _evaluate(self, x):
        a = np.abs(x)
        d = self.delta
        return np.sum(np.where(a <= d, 0.5 * x * x, d * (a - 0.5 * d)), axis=-1)

    def _subdifferential(self, x):
        return Singleton(np.clip(x, -self.delta, self.delta))

    def minimizer_info(self):
        return MinimizerInfo("unique", np.zeros(self.dim), "", 0.0)

    def params(self):
        return {"dim": self.dim, "delta": self.delta}


class _Wrapper(ConvexFunction):
    """Node built on top of another node."""

    base: ConvexFunction

    def _check_base(self):
        if not isinstance(self.base, ConvexFunction):
            raise TypeError("base must be a ConvexFunction")
        object.__setattr__(self, "dim", self.base.dim)


@dataclass(frozen=True, eq=False, repr=False)
class Perturbed(_Wrapper):
    """g(x) = s/(1-s) ||x||^2/2 + (1-s) f(x/(1-s)) for s in (0, 1).

    The proximal mapping at parameter 1 is exactly (1-s) times that of f, so
    g turns the prox of f into a contraction with factor 1-s.
    """

    base: ConvexFunction = None
    sigma: float = 0.5
    dim: int = field(default=0, init=False)

    type_name = "perturbed"

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise ValueError("sigma must lie strictly inside (0, 1)")
        self._check_base()

    @property
    def quad_coef(self) -> float:
        return self.sigma / (1.0 - self.sigma)

    def _evaluate(self, x):
        t = 1.0 - self.sigma
        return 0.5 * self.quad_coef * _sqnorm(x) + t * self.base._evaluate(x / t)

    def _subdifferential(self, x):
        t = 1.0 - self.sigma
        return self.base._subdifferential(x / t).translate(self.quad_coef * x)

    def minimizer_info(self):
        from .prox import prox

        # argmin g = (1-s) P_{1/s} f(0)
        r = prox(self.base, np.zeros(self.dim), lam=1.0 / self.sigma)
        p = (1.0 - self.sigma) * r.y
        return MinimizerInfo("unique", p, "", float(self.evaluate(p)), exact=r.method == "closed-form")

    def expanded(self) -> ConvexFunction:
        """The same function assembled from generic calculus nodes."""
        return Tikhonov(Scaled(self.base, 1.0 - self.sigma), self.quad_coef)

    def params(self):
        return {"base": self.base.to_dict(), "sigma": self.sigma}


@dataclass(frozen=True, eq=False, repr=False)
class Shifted(_Wrapper):
    """base + c; same class modulo constants as base."""

    base: ConvexFunction = None
    c: float = 0.0
    dim: int = field(default=0, init=False)

    type_name = "shifted"

    def __post_init__(self):
        self._check_base()

    def _evaluate(self, x):
        return self.base._evaluate(x) + self.c

    def _subdifferential(self, x):
        return self.base._subdifferential(x)

    def minimizer_info(self):
        info = self.base.minimizer_info()
        return MinimizerInfo(info.kind, info.point, info.description, info.value + self.c, info.exact)

    def params(self):
        return {"base": self.base.to_dict(), "c": self.c}


@dataclass(frozen=True, eq=False, repr=False)
class Tikhonov(_Wrapper):
    """base + mu/2 ||x||^2."""

    base: ConvexFunction = None
    mu: float = 1.0
    dim: int = field(default=0, init=False)

    type_name = "tikhonov"

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        self._check_base()

    def _evaluate(self, x):
        return self.base._evaluate(x) + 0.5 * self.mu * _sqnorm(x)

    def _subdifferential(self, x):
        return self.base._subdifferential(x).translate(self.mu * x)

    def minimizer_info(self):
        from .prox import prox

        r = prox(self.base, np.zeros(self.dim), lam=1.0 / self.mu)
        return MinimizerInfo("unique", r.y, "", float(self.evaluate(r.y)), exact=r.method == "closed-form")

    def params(self):
        return {"base": self.base.to_dict(), "mu": self.mu}


@dataclass(frozen=True, eq=False, repr=False)
class Scaled(_Wrapper):
    """t * base(x / t) for t > 0."""

    base: ConvexFunction = None
    t: float = 1.0
    dim: int = field(default=0, init=False)

    type_name = "scaled"

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("t must be positive")
        self._check_base()

    def _evaluate(self, x):
        return self.t * self.base._evaluate(x / self.t)

    def _subdifferential(self, x):
        return self.base._subdifferential(x / self.t)

    def minimizer_info(self):
        info = self.base.minimizer_info()
        p = None if info.point is None else self.t * info.point
        desc = f"{self.t:g} * ({info.description})" if info.description else ""
        return MinimizerInfo(info.kind, p, desc, self.t * info.value, info.exact)

    def params(self):
        return {"base": self.base.to_dict(), "t": self.t}


NODE_TYPES: dict[str, type[ConvexFunction]] = {
    cls.type_name: cls
    for cls in (Zero, Quadratic, AbsSum, EuclNorm, IndicatorBox, IndicatorBall, Huber,
                Perturbed, Shifted, Tikhonov, Scaled)
}


def evaluate(f: ConvexFunction, x):
    return f.evaluate(x)


def subdifferential(f: ConvexFunction, x) -> SubgradientSet:
    return f.subdifferential(x)


def minimizer_info(f: ConvexFunction) -> MinimizerInfo:
    return f.minimizer_info()


def normalize(f: ConvexFunction) -> ConvexFunction:
    """Drop additive constants, so equal results mean equal classes."""
    if isinstance(f, Shifted):
        return normalize(f.base)
    if isinstance(f, Quadratic) and f.c != 0.0:
        return Quadratic(f.Q, f.b, 0.0)
    if isinstance(f, Perturbed):
        return Perturbed(normalize(f.base), f.sigma)
    if isinstance(f, Tikhonov):
        return Tikhonov(normalize(f.base), f.mu)
    if isinstance(f, Scaled):
        return Scaled(normalize(f.base), f.t)
    return f


def same_class(f: ConvexFunction, g: ConvexFunction) -> bool:
    """Structural test for f - g being constant (sufficient, not necessary)."""
    return normalize(f) == normalize(g)


def from_dict(d: dict[str, Any]) -> ConvexFunction:
    """Build a node from its declarative description.

    Examples of accepted documents::

        {"type": "quadratic", "Q": [[1, 0], [0, 2]], "b": [0, 0]}
        {"type": "abs_sum", "dim": 1, "w": 1.0}
        {"type": "perturbed", "sigma": 0.1, "base": {"type": "zero", "dim": 2}}
    """
    d = dict(d)
    d.pop("id", None)
    kind = d.pop("type", None)
    if kind not in NODE_TYPES:
        raise ValueError(f"unknown function type {kind!r}; expected one of {sorted(NODE_TYPES)}")
    if "base" in d:
        d["base"] = from_dict(d["base"])
    try:
        if kind == "quadratic":
            return Quadratic(d.pop("Q"), d.pop("b", None), d.pop("c", 0.0), **d)
        if kind == "indicator_box":
            return IndicatorBox(d.pop("lo"), d.pop("hi"), **d)
        if kind == "indicator_ball":
            return IndicatorBall(d.pop("center"), d.pop("radius"), **d)
        if kind in ("zero", "abs_sum", "eucl_norm", "huber"):
            d["dim"] = int(d.get("dim", 1))
        return NODE_TYPES[kind](**d)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"bad parameters for {kind!r}: {exc}") from exc


def standard_catalog(dim: int = 1) -> dict[str, ConvexFunction]:
    """Named functions used by the test suite, the demos and default configs."""
    one = np.ones(dim)
    q = np.diag(np.linspace(1.0, 2.0, dim)) if dim > 1 else np.eye(1)
    return {
        "zero": Zero(dim),
        "quadratic": Quadratic(q, -0.5 * one),
        "abs_sum": AbsSum(dim, 1.0),
        "huber": Huber(dim, 0.5),
        "box": IndicatorBox(-one, 2.0 * one),
        "ball": IndicatorBall(0.5 * one / np.sqrt(dim), 1.0),
    }
