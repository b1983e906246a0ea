"""Independent reference computations used by the tests."""

from fractions import Fraction

import numpy as np


def grid_prox(f, x, lam=1.0, lo=-10.0, hi=10.0, final_step=1e-8):
    """Brute-force argmin of f(y) + ||y - x||^2/(2 lam) by zooming grids.

    Level 0 covers [lo, hi]^n; each level re-grids a window of a few cells
    around the current best point with a 10x finer step. The objective is
    (1/lam)-strongly convex, so the minimizer stays inside the window.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    per_axis = 20001 if n == 1 else 201
    centre = np.full(n, 0.5 * (lo + hi))
    half = 0.5 * (hi - lo)
    while True:
        axes = [np.linspace(c - half, c + half, per_axis) for c in centre]
        axes = [np.clip(a, lo, hi) for a in axes]
        step = 2 * half / (per_axis - 1)
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, n)
        phi = f.evaluate(pts) + np.sum((pts - x) ** 2, -1) / (2 * lam)
        best = pts[int(np.argmin(phi))]
        if step <= final_step:
            return best
        centre = best
        half = 3 * step if n > 1 else 2 * step
        per_axis = 61 if n > 1 else 401


def grid_prox_disc(center, radius, x, lam=1.0, final_step=1e-9):
    """Brute-force projection-type prox for a planar disc indicator.

    A Cartesian grid cannot resolve the curved boundary where the objective
    jumps to +inf, so the disc is gridded in polar coordinates (r, theta),
    where the objective is smooth, and zoomed as in :func:`grid_prox`.
    """
    c = np.asarray(center, dtype=float)
    x = np.asarray(x, dtype=float)
    lo = np.array([0.0, -np.pi])
    hi = np.array([radius, np.pi])
    centre, half, per = 0.5 * (lo + hi), 0.5 * (hi - lo), 401
    while True:
        r = np.clip(np.linspace(centre[0] - half[0], centre[0] + half[0], per), 0.0, radius)
        t = np.linspace(centre[1] - half[1], centre[1] + half[1], per)
        R, T = np.meshgrid(r, t, indexing="ij")
        Y = c + np.stack([R * np.cos(T), R * np.sin(T)], -1)
        phi = np.sum((Y - x) ** 2, -1) / (2 * lam)
        k = np.unravel_index(int(np.argmin(phi)), phi.shape)
        step = 2 * half / (per - 1)
        if step.max() <= final_step:
            return Y[k]
        centre, half, per = np.array([R[k], T[k]]), 3 * step, 61


def grid_min_1d(phi, lo=-10.0, hi=10.0, step=1e-6):
    """Plain dense grid on [lo, hi] with the given step (1-D only)."""
    ys = np.arange(lo, hi + step / 2, step)
    v = phi(ys)
    k = int(np.argmin(v))
    return ys[k], v[k]


def series_zero_vs_half_identity(N=40):
    """Exact partial sum of 2^-i * (i/2) / (1 + i/2) = 2^-i * i / (2 + i)."""
    return sum(Fraction(1, 2 ** i) * Fraction(i, 2 + i) for i in range(1, N + 1))
