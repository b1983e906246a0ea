"""Exact descriptions of subdifferential sets.

Every set produced by the catalog is closed and convex and belongs to one of
a handful of shapes: a single point, a (possibly unbounded) box, a Euclidean
ball, a ray, or the empty set. All shapes are closed under translation, which
is all the calculus rules of the catalog need.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class SubgradientSet:
    """Closed convex subset of R^n."""

    dim: int

    def project(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def translate(self, t: np.ndarray) -> "SubgradientSet":
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        """Random element; unbounded directions are drawn with size ~ `scale`."""
        raise NotImplementedError

    @property
    def is_empty(self) -> bool:
        return False

    @property
    def is_singleton(self) -> bool:
        return False

    def dist(self, v) -> float:
        v = np.asarray(v, dtype=float)
        return float(np.linalg.norm(v - self.project(v)))

    def contains(self, v, tol: float = 1e-10) -> bool:
        return self.dist(v) <= tol

    def min_norm(self) -> np.ndarray:
        return self.project(np.zeros(self.dim))


@dataclass(frozen=True)
class Singleton(SubgradientSet):
    point: np.ndarray

    @property
    def dim(self) -> int:
        return self.point.shape[0]

    @property
    def is_singleton(self) -> bool:
        return True

    def project(self, v):
        return self.point.copy()

    def translate(self, t):
        return Singleton(self.point + t)

    def sample(self, rng, scale=1.0):
        return self.point.copy()

    def __repr__(self):
        return f"Singleton({self.point.tolist()})"


@dataclass(frozen=True)
class Box(SubgradientSet):
    """Product of closed intervals; endpoints may be infinite."""

    lo: np.ndarray
    hi: np.ndarray

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    @property
    def is_singleton(self) -> bool:
        return bool(np.all(self.lo == self.hi))

    def project(self, v):
        return np.clip(np.asarray(v, dtype=float), self.lo, self.hi)

    def translate(self, t):
        return Box(self.lo + t, self.hi + t)

    def sample(self, rng, scale=1.0):
        lo = np.where(np.isfinite(self.lo), self.lo, np.minimum(self.hi, 0.0) - scale)
        hi = np.where(np.isfinite(self.hi), self.hi, np.maximum(lo, 0.0) + scale)
        return lo + rng.random(self.dim) * (hi - lo)

    def __repr__(self):
        return f"Box({self.lo.tolist()}, {self.hi.tolist()})"


@dataclass(frozen=True)
class Ball(SubgradientSet):
    center: np.ndarray
    radius: float

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def project(self, v):
        d = np.asarray(v, dtype=float) - self.center
        nd = np.linalg.norm(d)
        if nd <= self.radius:
            return self.center + d
        return self.center + d * (self.radius / nd)

    def translate(self, t):
        return Ball(self.center + t, self.radius)

    def sample(self, rng, scale=1.0):
        u = rng.standard_normal(self.dim)
        u /= max(np.linalg.norm(u), 1e-300)
        r = self.radius * rng.random() ** (1.0 / self.dim)
        return self.center + r * u

    def __repr__(self):
        return f"Ball({self.center.tolist()}, {self.radius})"


@dataclass(frozen=True)
class Ray(SubgradientSet):
    """{apex + t * direction : t >= 0}; the normal cone of a ball at its boundary."""

    apex: np.ndarray
    direction: np.ndarray

    @property
    def dim(self) -> int:
        return self.apex.shape[0]

    def project(self, v):
        d2 = float(self.direction @ self.direction)
        if d2 == 0.0:
            return self.apex.copy()
        t = max(0.0, float((np.asarray(v, dtype=float) - self.apex) @ self.direction) / d2)
        return self.apex + t * self.direction

    def translate(self, t):
        return Ray(self.apex + t, self.direction)

    def sample(self, rng, scale=1.0):
        nd = np.linalg.norm(self.direction)
        if nd == 0.0:
            return self.apex.copy()
        return self.apex + rng.random() * scale * self.direction / nd

    def __repr__(self):
        return f"Ray({self.apex.tolist()}, {self.direction.tolist()})"


@dataclass(frozen=True)
class EmptySet(SubgradientSet):
    """Subdifferential outside the domain; `reason` says why."""

    dim: int
    reason: str = field(default="point outside the domain")

    @property
    def is_empty(self) -> bool:
        return True

    def project(self, v):
        raise ValueError(f"empty subdifferential: {self.reason}")

    def dist(self, v):
        return float("inf")

    def contains(self, v, tol=1e-10):
        return False

    def translate(self, t):
        return self

    def sample(self, rng, scale=1.0):
        raise ValueError(f"empty subdifferential: {self.reason}")
