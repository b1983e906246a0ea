"""Contraction perturbations of proximal mappings.

For f and s in (0, 1) the function

    g(x) = s/(1-s) ||x||^2/2 + (1-s) f(x/(1-s))

is strongly convex and P_1 g = (1-s) P_1 f, a (1-s)-contraction. On B_i(0)
the two proxes differ by s * ||P_1 f(x)||, so with M >= sup ||P_1 f|| over
the truncation ball the distance d(df, dg) stays below eps once s < eps/(2M).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import ConvexFunction, Perturbed
from .metric import DEFAULT_N, BallProbe, MetricEstimate, ProbeSpec, metric
from .prox import prox_operator

SIGMA_CAP = 0.5
_DELTA = 1e-12


@dataclass(frozen=True)
class PerturbationSpec:
    f: ConvexFunction
    sigma: float

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise ValueError("sigma must lie strictly inside (0, 1)")


@dataclass(frozen=True)
class ContractionPlan:
    f: ConvexFunction
    g: Perturbed
    sigma: float
    m_bound: float
    radius: float
    target_eps: float | None = None
    realized: MetricEstimate | None = None

    @property
    def contraction_factor(self) -> float:
        return 1.0 - self.sigma

    @property
    def chosen_sigma(self) -> float:
        return self.sigma

    @property
    def achieved(self) -> bool | None:
        if self.target_eps is None or self.realized is None:
            return None
        return bool(self.realized.upper < self.target_eps)

    def to_record(self) -> dict:
        return {
            "f": self.f.to_dict(), "sigma": self.sigma, "contraction_factor": self.contraction_factor,
            "M": self.m_bound, "radius": self.radius, "eps": self.target_eps,
            "realized": None if self.realized is None else [self.realized.lower, self.realized.upper],
            "achieved": self.achieved,
        }


def m_bound(f: ConvexFunction, radius: float, probe: ProbeSpec | None = None) -> float:
    """Certified upper bound on sup_{||x|| <= radius} ||P_1 f(x)||.

    Without a probe the bound is ||P_1 f(0)|| + radius (P_1 f is
    nonexpansive). With a mesh probe the sampled maximum plus h is used as
    well, and the smaller of the two bounds is returned.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    T = prox_operator(f)
    coarse = float(np.linalg.norm(T(np.zeros(f.dim)))) + radius + T.accuracy
    if probe is None:
        return coarse
    spec = probe.resolve(f.dim)
    if spec.mode != "mesh":
        return coarse
    # a mesh of B_r scaled by radius/r covers B_radius at least as finely
    r = int(np.ceil(radius))
    pts = BallProbe.build(r, f.dim, spec).shell(r) * (radius / r)
    fine = float(np.linalg.norm(T(pts), axis=1).max()) + spec.h + T.accuracy
    return min(coarse, fine)


def perturb(spec: PerturbationSpec | ConvexFunction, sigma: float | None = None,
            radius: float = DEFAULT_N) -> ContractionPlan:
    """Build the strongly convex g with P_1 g = (1 - sigma) P_1 f."""
    if not isinstance(spec, PerturbationSpec):
        spec = PerturbationSpec(spec, sigma)
    g = Perturbed(spec.f, spec.sigma)
    return ContractionPlan(spec.f, g, spec.sigma, m_bound(spec.f, radius), radius)


def realized_distance(f: ConvexFunction, sigma: float, N: int = DEFAULT_N,
                      probe: ProbeSpec = ProbeSpec()) -> MetricEstimate:
    """Enclosure of d(df, dg) for g = perturb(f, sigma).

    P_1 f - P_1 g = sigma P_1 f is sigma-Lipschitz, which tightens the mesh
    correction accordingly.
    """
    return metric(f, Perturbed(f, sigma), N, probe, lipschitz=sigma)


def choose_sigma(f: ConvexFunction, eps: float, N: int = DEFAULT_N,
                 probe: ProbeSpec = ProbeSpec(), m_probe: ProbeSpec | None = None) -> ContractionPlan:
    """Pick sigma = min(1/2, eps / (2M + delta)) and report the realized distance."""
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    M = m_bound(f, N, m_probe)
    sigma = min(SIGMA_CAP, eps / (2.0 * M + _DELTA))
    g = Perturbed(f, sigma)
    return ContractionPlan(f, g, sigma, M, N, eps, realized_distance(f, sigma, N, probe))
