import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import cKDTree

from conftest import CAT1
from oracles import series_zero_vs_half_identity
from proxgeneric.catalog import AbsSum, Quadratic, Shifted, Zero
from proxgeneric.checks import resolvent_operator
from proxgeneric.metric import (BallProbe, ProbeSpec, class_distance, gauge, metric, metric_table,
                                operator_distance, shell_sup, verify_metric_axioms)
from proxgeneric.prox import Operator, prox_operator

MESH1 = ProbeSpec("mesh", 1e-3)


def ident(dim=1):
    return Operator(lambda x: x, dim, "identity")


def scaled_identity(c, dim=1):
    return Operator(lambda x: c * x, dim, f"{c} * identity")


def test_gauge_examples():
    assert gauge(0.0) == 0.0
    assert gauge(1.0) == 0.5
    assert gauge(5.0) == pytest.approx(5 / 6)
    assert gauge(5.0) <= gauge(2.0) + gauge(3.0)
    assert gauge(np.inf) == 1.0
    with pytest.raises(ValueError):
        gauge(-1e-300)


def test_gauge_laws_on_random_pairs():
    rng = np.random.default_rng(2024)
    t1, t2 = rng.uniform(0, 100, 100_000), rng.uniform(0, 100, 100_000)
    a1, a2 = gauge(t1), gauge(t2)
    assert np.all(gauge(t1 + t2) <= a1 + a2)
    lo, hi = np.minimum(t1, t2), np.maximum(t1, t2)
    strict = lo < hi
    assert np.all(gauge(lo[strict]) < gauge(hi[strict]))
    assert np.all((a1 >= 0) & (a1 < 1))


@given(st.floats(0, 1e6), st.floats(0, 1e6))
def test_gauge_laws_property(t1, t2):
    assert gauge(t1 + t2) <= gauge(t1) + gauge(t2)
    if t1 <= t2:
        assert gauge(t1) <= gauge(t2)


def test_shell_sup_examples():
    h = 1e-3
    probe = BallProbe.build(2, 1, MESH1)
    iv = shell_sup(ident(), ident(), probe)
    assert iv.lower == 0.0 and iv.upper <= 2 * h + 1e-9  # outward rounding pad
    iv = shell_sup(ident(), scaled_identity(0.5), probe)
    assert 1.0 - 2 * h <= iv.lower <= 1.0 <= iv.upper <= 1.0 + 2 * h + 1e-9
    iv = shell_sup(prox_operator(AbsSum(1)), ident(), BallProbe.build(1, 1, MESH1))
    # |soft(x) - x| = min(|x|, 1), largest at |x| = 1
    assert iv.lower <= 1.0 <= iv.upper


def test_shell_sup_dimension_mismatch():
    with pytest.raises(ValueError):
        shell_sup(ident(1), ident(2), BallProbe.build(1, 1, MESH1))


@pytest.mark.parametrize("dim,h", [(1, 1e-2), (2, 0.2)])
def test_mesh_covers_every_ball(dim, h):
    probe = BallProbe.build(4, dim, ProbeSpec("mesh", h))
    rng = np.random.default_rng(0)
    for i in range(1, 5):
        tree = cKDTree(probe.shell(i))
        u = rng.standard_normal((20_000, dim))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        x = u * i * rng.random((20_000, 1)) ** (1 / dim)
        x = np.concatenate([x, i * u[:200]])
        dist, _ = tree.query(x)
        assert dist.max() <= h
        assert np.all(np.linalg.norm(probe.shell(i), axis=1) <= i + 1e-12)


def test_known_value_series():
    exact = series_zero_vs_half_identity(40)
    est = metric(Zero(1), Quadratic(np.eye(1)), 40, MESH1)
    assert est.lower <= float(exact) <= est.upper
    assert est.width <= 5e-3
    assert not est.heuristic


def test_identical_functions_have_zero_lower_bound():
    for f in CAT1.values():
        est = metric(f, f, 20, MESH1)
        assert est.lower == 0.0
        assert est.upper <= sum(2.0 ** -i * gauge(2e-3) for i in range(1, 21)) + 2.0 ** -20 + 1e-9


@pytest.mark.parametrize("c", [-5.0, 17.0])
def test_constant_offset_is_invisible(c):
    for f in CAT1.values():
        est = metric(f, Shifted(f, c), 20, MESH1)
        assert est.lower == 0.0 and est.upper < 5e-3


@given(st.floats(0.0, 1.0))
def test_enclosure_brackets_exact_value(c):
    # |x - c x| has shell sups (1 - c) i exactly
    exact = sum(2.0 ** -i * gauge((1 - c) * i) for i in range(1, 400))
    est = operator_distance(ident(), scaled_identity(c), 12, ProbeSpec("mesh", 1e-2))
    assert est.lower <= exact <= est.upper


def test_truncation_monotonicity():
    f, g = AbsSum(1), CAT1["huber"]
    prev = None
    for N in (1, 2, 5, 10, 20, 30):
        est = metric(f, g, N, ProbeSpec("mesh", 1e-2))
        if prev is not None:
            assert est.lower >= prev.lower
            assert est.upper <= prev.upper
        prev = est


def test_random_mode_is_heuristic_and_reproducible():
    f, g = AbsSum(3), Zero(3)
    a = metric(f, g, 5, ProbeSpec("random", samples_per_radius=256, seed=3))
    b = metric(f, g, 5, ProbeSpec("random", samples_per_radius=256, seed=3))
    assert a.heuristic and a == b
    assert 0 < a.lower <= a.upper == 1.0
    assert math.isinf(a.shells[0].upper)


def test_isometry_with_resolvent_route():
    names = ["zero", "quadratic", "abs_sum", "huber", "box", "ball"]
    probe = ProbeSpec("mesh", 1e-2)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            f, g = CAT1[a], CAT1[b]
            via_prox = metric(f, g, 10, probe)
            via_resolvent = operator_distance(resolvent_operator(f), resolvent_operator(g), 10, probe)
            assert abs(via_prox.lower - via_resolvent.lower) <= 1e-10
            assert abs(via_prox.upper - via_resolvent.upper) <= 1e-10


def test_class_distance_ignores_constants():
    q = Quadratic(np.eye(1), [1.0], 5.0)
    assert class_distance(q, Shifted(Quadratic(np.eye(1), [1.0]), -3.0)) == metric(q, q)


def test_metric_axioms_examples():
    rep = verify_metric_axioms([Zero(1), Quadratic(np.eye(1)), AbsSum(1)], 20, MESH1)
    assert rep.passed and rep.worst_margin > -1e-6
    f = AbsSum(1)
    assert verify_metric_axioms([f, f, f], 10, MESH1).passed
    rep = verify_metric_axioms([f, Shifted(f, 4.0), Zero(1)], 10, MESH1)
    assert rep.passed
    table = metric_table([f, Shifted(f, 4.0), Zero(1)], 10, MESH1)
    assert table[0][1].lower == 0.0
    assert table[0][2] == table[2][0]


def test_axioms_need_three_functions():
    with pytest.raises(ValueError):
        verify_metric_axioms([Zero(1), AbsSum(1)])


def test_record_shape():
    rec = metric(Zero(1), AbsSum(1), 3, MESH1).to_record()
    assert set(rec) == {"lower", "upper", "N", "mode", "h", "seed", "heuristic", "shells"}
    assert len(rec["shells"]) == 3
