"""Proximal mappings and Moreau envelopes of catalog functions.

Closed forms are used wherever the node structure provides one. The numeric
fallback needs nothing but the resolvent at parameter 1 of the node (which
every node has in closed form) and solves

    0 in dh(y) + mu*y + (y - x)/lam

by Peaceman-Rachford splitting. The objective is (mu + 1/lam)-strongly
convex, so any explicit subgradient v at the current point gives the
certified distance bound ||y - y*|| <= ||v|| / (mu + 1/lam), which is also
the stopping rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import singledispatch
from typing import Callable

import numpy as np

from .catalog import (AbsSum, ConvexFunction, EuclNorm, Huber, IndicatorBall, IndicatorBox,
                      Perturbed, Quadratic, Scaled, Shifted, Tikhonov, Zero, _check_dim)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 100_000

CLOSED_FORM = "closed-form"
NUMERIC = "numeric"


class ProxNonconvergence(RuntimeError):
    """The numeric solver could not certify the requested accuracy."""

    def __init__(self, message, best, bound):
        super().__init__(message)
        self.best = best
        self.bound = bound


@dataclass(frozen=True)
class ProxQuery:
    f: ConvexFunction
    lam: float
    x: np.ndarray

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("prox-parameter must be positive")
        object.__setattr__(self, "x", _check_dim(self.f, self.x))


@dataclass(frozen=True)
class ProxResult:
    """Prox point(s) y, envelope value(s), how they were computed, and a
    guaranteed bound on ||y - y*|| (0.0 means exact up to rounding)."""

    y: np.ndarray
    envelope: np.ndarray | float
    method: str
    accuracy: float


def prox(f: ConvexFunction, x, lam: float = 1.0, *, method: str | None = None,
         tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> ProxResult:
    """Proximal point of `f` at `x` with parameter `lam`.

    Parameters
    ----------
    f : ConvexFunction
    x : array_like, shape (..., f.dim)
        One prox-center or a batch of them.
    lam : float
        Prox-parameter, > 0.
    method : {None, "numeric"}
        Force the numeric solver even when a closed form exists.
    tol : float
        Accuracy certified by the numeric solver.

    Returns
    -------
    ProxResult
    """
    q = ProxQuery(f, float(lam), x)
    if method == NUMERIC:
        y, acc = numeric_prox(q.f, q.x, q.lam, tol=tol, max_iter=max_iter)
        meth = NUMERIC
    elif method in (None, CLOSED_FORM):
        y, acc, meth = _prox(q.f, q.x, q.lam, tol, max_iter)
    else:
        raise ValueError(f"unknown method {method!r}")
    env = f.evaluate(y) + _sqnorm(y - q.x) / (2.0 * q.lam)
    return ProxResult(y, env, meth, acc)


def moreau(f: ConvexFunction, x, lam: float = 1.0, **kw):
    """Moreau envelope e_lam f(x) = min_y f(y) + ||y - x||^2 / (2 lam)."""
    return prox(f, x, lam, **kw).envelope


def _sqnorm(v):
    return np.sum(v * v, axis=-1)


def has_closed_form(f: ConvexFunction, lam: float = 1.0) -> bool:
    """Whether prox(f, ., lam) avoids the numeric solver."""
    if isinstance(f, Perturbed):
        return lam == 1.0 and has_closed_form(f.base, 1.0)
    if isinstance(f, Shifted):
        return has_closed_form(f.base, lam)
    if isinstance(f, Tikhonov):
        return has_closed_form(f.base, lam / (1.0 + lam * f.mu))
    if isinstance(f, Scaled):
        return has_closed_form(f.base, lam / f.t)
    return True


# Each rule returns (y, accuracy, method).
@singledispatch
def _prox(f, x, lam, tol, max_iter):
    raise TypeError(f"no prox rule for {type(f).__name__}")


@_prox.register
def _(f: Zero, x, lam, tol, max_iter):
    return x.copy(), 0.0, CLOSED_FORM


@_prox.register
def _(f: Quadratic, x, lam, tol, max_iter):
    evals, evecs = f.eig
    z = (x - lam * f.b) @ evecs
    return (z / (1.0 + lam * evals)) @ evecs.T, 0.0, CLOSED_FORM


@_prox.register
def _(f: AbsSum, x, lam, tol, max_iter):
    return np.sign(x) * np.maximum(np.abs(x) - lam * f.w, 0.0), 0.0, CLOSED_FORM


@_prox.register
def _(f: EuclNorm, x, lam, tol, max_iter):
    nx = np.linalg.norm(x, axis=-1, keepdims=True)
    shrink = np.maximum(1.0 - lam * f.w / np.where(nx > 0, nx, 1.0), 0.0)
    return shrink * x, 0.0, CLOSED_FORM


@_prox.register
def _(f: IndicatorBox, x, lam, tol, max_iter):
    return np.clip(x, f.lo, f.hi), 0.0, CLOSED_FORM


@_prox.register
def _(f: IndicatorBall, x, lam, tol, max_iter):
    d = x - f.center
    nd = np.linalg.norm(d, axis=-1, keepdims=True)
    scale = np.minimum(1.0, f.radius / np.where(nd > 0, nd, 1.0))
    return f.center + scale * d, 0.0, CLOSED_FORM


@_prox.register
def _(f: Huber, x, lam, tol, max_iter):
    inner = np.abs(x) <= f.delta * (1.0 + lam)
    return np.where(inner, x / (1.0 + lam), x - lam * f.delta * np.sign(x)), 0.0, CLOSED_FORM


@_prox.register
def _(f: Perturbed, x, lam, tol, max_iter):
    if lam == 1.0:
        y, acc, meth = _prox(f.base, x, 1.0, tol, max_iter)
        t = 1.0 - f.sigma
        return t * y, t * acc, meth
    y, acc = numeric_prox(f, x, lam, tol=tol, max_iter=max_iter)
    return y, acc, NUMERIC


@_prox.register
def _(f: Shifted, x, lam, tol, max_iter):
    return _prox(f.base, x, lam, tol, max_iter)


@_prox.register
def _(f: Tikhonov, x, lam, tol, max_iter):
    k = 1.0 + lam * f.mu
    return _prox(f.base, x / k, lam / k, tol, max_iter)


@_prox.register
def _(f: Scaled, x, lam, tol, max_iter):
    y, acc, meth = _prox(f.base, x / f.t, lam / f.t, tol, max_iter)
    return f.t * y, f.t * acc, meth


def resolvent_one(f: ConvexFunction, x) -> np.ndarray:
    """P_1 f from the node structure. Closed-form for every base node; a
    Perturbed node nested under a rescaling can still need the solver."""
    y, _, _ = _prox(f, x, 1.0, DEFAULT_TOL, DEFAULT_MAX_ITER)
    return y


def numeric_prox(f: ConvexFunction, x, lam: float, *, tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER):
    """Certified P_lam f(x) built only on P_1 of (the non-quadratic part of) f.

    Returns ``(y, bound)`` with ``||y - P_lam f(x)|| <= bound <= tol`` for
    every point of the batch.
    """
    x = np.asarray(x, dtype=float)
    h, mu = f, 0.0
    if isinstance(f, Tikhonov):
        h, mu = f.base, f.mu
    # B(y) = mu*y + (y - x)/lam; J_B(z) = (lam*z + x)/(lam*(1 + mu) + 1)
    modulus = mu + 1.0 / lam
    denom = lam * (1.0 + mu) + 1.0
    z = x.copy()
    best = None
    bound = None
    for _ in range(max_iter):
        yb = (lam * z + x) / denom
        w = 2.0 * yb - z
        ya = resolvent_one(h, w)
        v = (w - ya) + mu * ya + (ya - x) / lam
        bnd = np.asarray(np.linalg.norm(v, axis=-1) / modulus)
        if best is None:
            best, bound = ya.copy(), bnd.copy()
        else:
            better = bnd < bound
            best = np.where(better[..., None], ya, best)
            bound = np.where(better, bnd, bound)
        if np.all(bound <= tol):
            return best, float(np.max(bound))
        z = 2.0 * ya - w
    raise ProxNonconvergence(
        f"numeric prox did not reach tol={tol:g} in {max_iter} iterations "
        f"(worst bound {float(np.max(bound)):.3g})", best, bound)


@dataclass(frozen=True)
class Operator:
    """A pure map R^n -> R^n acting on arrays of shape (..., n).

    `accuracy` bounds the pointwise error of `map` against the exact operator
    it stands for. `provenance` records where it came from.
    """

    map: Callable[[np.ndarray], np.ndarray]
    dim: int
    provenance: str = "external"
    accuracy: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, x):
        return self.map(np.asarray(x, dtype=float))


def prox_operator(f: ConvexFunction, lam: float = 1.0, *, tol: float = DEFAULT_TOL) -> Operator:
    """x -> P_lam f(x) as an operator handle (nonexpansive by construction)."""
    if not lam > 0:
        raise ValueError("prox-parameter must be positive")
    closed = has_closed_form(f, lam)

    def apply(x):
        return prox(f, x, lam, tol=tol).y

    return Operator(apply, f.dim, f"prox-of({f!r}, lam={lam:g})", 0.0 if closed else tol,
                    {"function": f, "lam": lam})
