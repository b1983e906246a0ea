import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ALL, CAT1, CAT2
from oracles import grid_min_1d, grid_prox, grid_prox_disc
from proxgeneric.catalog import (AbsSum, EuclNorm, Huber, IndicatorBall, IndicatorBox, Perturbed,
                                 Quadratic, Scaled, Shifted, Tikhonov, Zero)
from proxgeneric.prox import (ProxNonconvergence, ProxQuery, has_closed_form, moreau, numeric_prox,
                              prox, prox_operator)

IDS = [n for n, _ in ALL]
FUNCS = [f for _, f in ALL]


def test_prox_examples():
    np.testing.assert_array_equal(prox(Zero(2), [3.0, -4.0]).y, [3.0, -4.0])
    assert prox(AbsSum(1), [3.0]).y[0] == 2.0
    assert prox(Quadratic(np.eye(1)), [8.0]).y[0] == 4.0
    r = prox(Perturbed(Zero(1), 0.5), [6.0])
    assert r.y[0] == 3.0 and r.method == "closed-form"


def test_prox_examples_against_dense_grid():
    y, _ = grid_min_1d(lambda y: np.abs(y) + 0.5 * (y - 3) ** 2)
    assert abs(y - 2.0) <= 1e-6
    y, _ = grid_min_1d(lambda y: 0.5 * y ** 2 + 0.5 * (y - 8) ** 2)
    assert abs(y - 4.0) <= 1e-6
    # expanded g for Perturbed(Zero, 0.5) is ||y||^2/2
    y, _ = grid_min_1d(lambda y: 0.5 * y ** 2 + 0.5 * (y - 6) ** 2)
    assert abs(y - 3.0) <= 1e-6
    g = Perturbed(Zero(1), 0.5)
    assert abs(prox(g.expanded(), [6.0], method="numeric").y[0] - 3.0) <= 1e-9


def test_moreau_examples():
    assert moreau(Zero(2), [1.0, 2.0], 3.0) == 0.0
    assert moreau(AbsSum(1), [3.0]) == pytest.approx(2.5, abs=1e-15)
    q = Quadratic(np.eye(1))
    for x in (-2.0, 1.0, 5.0):
        _, v = grid_min_1d(lambda y: 0.5 * y ** 2 + 0.5 * (y - x) ** 2)
        assert moreau(q, [x]) == pytest.approx(x * x / 4)
        assert abs(v - x * x / 4) <= 1e-10


def test_operator_examples():
    T = prox_operator(Zero(3))
    X = np.random.default_rng(0).normal(size=(5, 3))
    np.testing.assert_array_equal(T(X), X)
    S = prox_operator(AbsSum(1))
    # T(3) = 2 and T(1.5) = 0.5, so the gap is 1.5 and the bound |3 - 1.5| is tight
    assert S([3.0])[0] == 2.0 and S([1.5])[0] == 0.5
    assert abs(S([3.0]) - S([1.5]))[0] <= 1.5
    H = prox_operator(Quadratic(np.eye(1)))
    assert H([5.0])[0] == 2.5


def test_query_validation():
    with pytest.raises(ValueError):
        ProxQuery(Zero(1), 0.0, np.zeros(1))
    with pytest.raises(ValueError):
        prox(Zero(2), [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        prox_operator(Zero(1), -1.0)


def _pairs(f, seed, m=10_000, radius=10.0):
    rng = np.random.default_rng(seed)
    return rng.uniform(-radius, radius, (m, f.dim)), rng.uniform(-radius, radius, (m, f.dim))


@pytest.mark.parametrize("f", FUNCS, ids=IDS)
def test_nonexpansive_and_firmly_nonexpansive(f):
    X, Y = _pairs(f, 1)
    T = prox_operator(f)
    D = T(X) - T(Y)
    dxy = np.linalg.norm(X - Y, axis=1)
    assert np.all(np.linalg.norm(D, axis=1) <= dxy + 1e-9)
    assert np.all(np.sum(D * D, 1) <= np.sum((X - Y) * D, 1) + 1e-9)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_quadratic_prox_matches_linear_solve(lam):
    rng = np.random.default_rng(2)
    A = rng.normal(size=(3, 3))
    Q, b = A @ A.T, rng.normal(size=3)
    f = Quadratic(Q, b, 1.0)
    for x in rng.normal(0, 5, (50, 3)):
        ref = np.linalg.solve(np.eye(3) + lam * Q, x - lam * b)
        np.testing.assert_allclose(prox(f, x, lam).y, ref, rtol=0, atol=1e-10)


ORACLE_NODES = {
    **{f"{k}-1d": f for k, f in CAT1.items()},
    **{f"{k}-2d": f for k, f in CAT2.items()},
}


@pytest.mark.parametrize("name", sorted(ORACLE_NODES))
def test_prox_agrees_with_brute_force(name):
    f = ORACLE_NODES[name]
    rng = np.random.default_rng(3)
    worst_closed = worst_numeric = 0.0
    for k in range(100):
        x = rng.uniform(-5, 5, f.dim)
        lam = (0.5, 1.0, 2.0)[k % 3]
        if isinstance(f, IndicatorBall) and f.dim == 2:
            ref = grid_prox_disc(f.center, f.radius, x, lam)
        else:
            ref = grid_prox(f, x, lam)
        worst_closed = max(worst_closed, np.linalg.norm(prox(f, x, lam).y - ref))
        worst_numeric = max(worst_numeric, np.linalg.norm(prox(f, x, lam, method="numeric").y - ref))
    assert worst_closed <= 1e-5
    assert worst_numeric <= 1e-5


@pytest.mark.parametrize("f", FUNCS, ids=IDS)
def test_envelope_is_an_infimum(f):
    rng = np.random.default_rng(4)
    for lam in (0.5, 1.0, 2.0):
        x = rng.uniform(-5, 5, f.dim)
        e = moreau(f, x, lam)
        Z = rng.uniform(-6, 6, (1000, f.dim))
        Z = np.concatenate([Z, prox(f, Z).y])
        vals = f.evaluate(Z) + np.sum((Z - x) ** 2, 1) / (2 * lam)
        assert np.all(e <= vals + 1e-12)
        assert np.isfinite(e)


@pytest.mark.parametrize("f", FUNCS, ids=IDS)
def test_optimality_certificate(f):
    rng = np.random.default_rng(5)
    for lam in (0.5, 1.0, 2.0):
        for x in rng.uniform(-5, 5, (20, f.dim)):
            r = prox(f, x, lam)
            # dist(0, df(y) + (y - x)/lam) <= accuracy/lam, with rounding slack
            d = f.subdifferential(r.y).dist((x - r.y) / lam)
            assert d <= r.accuracy / lam + 1e-9


def test_numeric_certificate_is_honest():
    f = AbsSum(2, 0.7)
    X = np.random.default_rng(6).normal(0, 4, (200, 2))
    for lam in (0.3, 1.0, 3.0):
        y, bound = numeric_prox(f, X, lam, tol=1e-7)
        exact = prox(f, X, lam).y
        assert bound <= 1e-7
        assert np.max(np.linalg.norm(y - exact, axis=1)) <= bound + 1e-15


def test_nonconvergence_carries_best_iterate():
    with pytest.raises(ProxNonconvergence) as err:
        numeric_prox(IndicatorBall(np.zeros(2), 1.0), np.array([3.0, 4.0]), 1e4, tol=1e-15, max_iter=3)
    assert err.value.best is not None and np.all(err.value.bound > 1e-15)


def test_perturbed_off_unit_parameter_goes_numeric():
    g = Perturbed(AbsSum(1), 0.1)
    assert has_closed_form(g, 1.0) and not has_closed_form(g, 2.0)
    r = prox(g, [3.0], 2.0)
    assert r.method == "numeric" and r.accuracy <= 1e-9
    ref = prox(g.expanded(), [3.0], 2.0)
    assert ref.method == "closed-form"
    assert abs(r.y[0] - ref.y[0]) <= 1e-8


@pytest.mark.parametrize("f", [AbsSum(2), Huber(2, 0.3), EuclNorm(2), IndicatorBox([-1, 0], [1, 2]),
                               IndicatorBall([1.0, 0.0], 0.5), Quadratic(np.diag([1.0, 3.0]), [1, -1])],
                         ids=repr)
def test_composite_calculus_rules(f):
    X = np.random.default_rng(7).normal(0, 4, (100, 2))
    for lam in (0.5, 2.0):
        np.testing.assert_allclose(prox(Shifted(f, 9.0), X, lam).y, prox(f, X, lam).y, atol=0)
        for node in (Tikhonov(f, 0.7), Scaled(f, 0.4)):
            np.testing.assert_allclose(prox(node, X, lam).y, prox(node, X, lam, method="numeric").y,
                                       atol=2e-9)


@given(x=st.floats(-50, 50), lam=st.floats(0.01, 20), w=st.floats(0.01, 10))
def test_soft_threshold_property(x, lam, w):
    y = prox(AbsSum(1, w), [x], lam).y[0]
    assert y == pytest.approx(np.sign(x) * max(abs(x) - lam * w, 0.0), abs=1e-12)
    # stationarity: x - y in lam * w * sign-set(y)
    S = AbsSum(1, w).subdifferential(np.array([y]))
    assert S.dist(np.array([(x - y) / lam])) <= 1e-9


@given(st.lists(st.floats(-20, 20), min_size=2, max_size=2), st.floats(0.05, 5))
def test_projection_idempotent(x, r):
    f = IndicatorBall(np.zeros(2), r)
    p = prox(f, x).y
    np.testing.assert_allclose(prox(f, p).y, p, atol=1e-12)
    assert np.linalg.norm(p) <= r * (1 + 1e-12)
