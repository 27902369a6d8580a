import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from pickands.copulas import Copula
from pickands.empirical import (
    PseudoSample,
    curve_breakpoints,
    curve_steps,
    empirical_copula,
    multiplier_influence,
    multiplier_replicate,
    partial_derivative_estimate,
    pseudo_observations,
    read_sample,
    write_pseudo,
)


def two_point():
    return pseudo_observations([1.0, 2.0], [5.0, 3.0])


def test_pseudo_observations_ranks():
    ps = two_point()
    assert_allclose(ps.u, [1 / 3, 2 / 3])
    assert_allclose(ps.v, [2 / 3, 1 / 3])
    ps = pseudo_observations(np.arange(1, 4), np.arange(1, 4))
    assert_allclose(ps.u, [0.25, 0.5, 0.75])
    assert_allclose(ps.v, ps.u)


def test_ties_use_average_ranks():
    ps = pseudo_observations([1.0, 1.0, 2.0], [3.0, 2.0, 1.0])
    assert_allclose(ps.u, [1.5 / 4, 1.5 / 4, 3 / 4])
    assert ps.ties == "average"


def test_pseudo_sample_validation():
    with pytest.raises(ValueError):
        PseudoSample([0.5], [0.5])
    with pytest.raises(ValueError):
        PseudoSample([0.0, 0.5], [0.5, 0.5])
    with pytest.raises(ValueError):
        pseudo_observations([1.0, np.nan], [1.0, 2.0])


def test_empirical_copula_examples():
    ps = two_point()
    assert empirical_copula(ps, 1.0, 1.0) == 1.0
    assert empirical_copula(ps, 0.3, 1.0) == 0.0
    assert empirical_copula(ps, 0.5, 0.5) == 0.0
    assert empirical_copula(ps, 2 / 3, 2 / 3) == 1.0


def test_empirical_copula_is_monotone_step():
    ps = PseudoSample.from_uniform(Copula("clayton", (2.0,)).sample(60, seed=0))
    g = np.linspace(0, 1, 41)
    u, v = np.meshgrid(g, g, indexing="ij")
    c = empirical_copula(ps, u, v)
    assert np.all(np.diff(c, axis=0) >= 0) and np.all(np.diff(c, axis=1) >= 0)
    assert_allclose(c * ps.n, np.round(c * ps.n), atol=1e-12)


def test_breakpoint_conventions():
    ps = two_point()
    assert_allclose(curve_breakpoints(ps, 0.0), ps.u)
    assert_allclose(curve_breakpoints(ps, 1.0), ps.v)
    ps = PseudoSample([0.25, 0.5], [0.5, 0.75])
    assert_allclose(curve_breakpoints(ps, 0.5)[0], 0.25)


@pytest.mark.parametrize("t", [0.0, 0.2, 0.5, 0.77, 1.0])
def test_curve_step_equals_empirical_copula(t):
    ps = PseudoSample.from_uniform(Copula("gumbel", (1.5,)).sample(30, seed=2))
    step = curve_steps(ps, t, gamma=0.95)
    eps = 1e-9
    y = np.concatenate([step.breakpoints * (1 - eps), step.breakpoints * (1 + eps), [0.01, 0.5, 0.999]])
    y = y[(y > 0) & (y < 1)]
    direct = np.maximum(empirical_copula(ps, y ** (1 - t), y ** t), ps.n ** -0.95)
    assert_allclose(step(y), direct, atol=1e-15)


def test_curve_steps_validation():
    ps = two_point()
    with pytest.raises(ValueError):
        curve_steps(ps, 0.5, gamma=0.5)
    with pytest.raises(ValueError):
        curve_steps(ps, 1.5)


def test_partial_estimate_independence():
    vals = []
    for s in range(10):
        ps = PseudoSample.from_uniform(Copula("independence").sample(400, seed=s))
        vals.append(partial_derivative_estimate(ps, 1, 0.5, 0.5))
    assert np.all(np.abs(np.array(vals) - 0.5) < 0.15)


def test_partial_estimate_at_boundary_is_one_sided():
    ps = PseudoSample.from_uniform(Copula("independence").sample(100, seed=1))
    h = 0.1
    d = partial_derivative_estimate(ps, 1, 0.0, 0.7, h=h)
    assert_allclose(d, empirical_copula(ps, h, 0.7) / h)
    assert 0 <= partial_derivative_estimate(ps, 2, 0.3, 1.0) <= 1


def test_multiplier_replicate_equal_weights_is_zero():
    ps = PseudoSample.from_uniform(Copula("clayton", (1.0,)).sample(40, seed=3))
    g = np.linspace(0, 1, 11)
    assert_allclose(multiplier_replicate(ps, np.full(40, 2.0), g, g[::-1]), 0.0, atol=1e-14)


def test_multiplier_replicate_zero_on_lower_boundary():
    ps = PseudoSample.from_uniform(Copula("clayton", (1.0,)).sample(40, seed=3))
    xi = np.random.default_rng(0).choice([0.0, 2.0], size=40)
    g = np.linspace(0, 1, 7)
    assert_allclose(multiplier_replicate(ps, xi, 0.0, g), 0.0, atol=1e-14)
    assert_allclose(multiplier_replicate(ps, xi, g, 0.0), 0.0, atol=1e-14)


def test_multiplier_replicate_hand_enumeration():
    ps = PseudoSample([0.25, 0.5, 0.75], [0.5, 0.25, 0.75])
    xi = np.array([2.0, 0.0, 2.0])
    x = 2 / 3
    # normalised weights (1.5, 0, 1.5); points 1 and 2 lie below (x, x), point 3 does not
    c_star, c_n = (1.5 + 0.0) / 3, 2 / 3
    beta = math.sqrt(3) * (c_star - c_n)
    beta_u1 = math.sqrt(3) * ((1.5 + 0.0) / 3 - 2 / 3)
    beta_1v = beta_u1
    h = 3 ** -0.5
    lo = x - h
    d1 = (2 / 3 - 0.0) / (1.0 - lo)  # interval [x-h, 1], C_n(1, x) = 2/3, C_n(lo, x) = 0
    d2 = d1
    expected = beta - d1 * beta_u1 - d2 * beta_1v
    assert_allclose(multiplier_replicate(ps, xi, x, x), expected, rtol=1e-13)


def test_multiplier_replicate_rejects_degenerate_weights():
    ps = two_point()
    with pytest.raises(ValueError):
        multiplier_replicate(ps, [0.0, 0.0], 0.5, 0.5)
    with pytest.raises(ValueError):
        multiplier_replicate(ps, [2.0], 0.5, 0.5)


def test_multiplier_replicate_has_mean_zero():
    ps = PseudoSample.from_uniform(Copula("gumbel", (2.0,)).sample(100, seed=4))
    rng = np.random.default_rng(5)
    B = 500
    pts = np.array([[0.3, 0.3], [0.5, 0.7], [0.8, 0.6]])
    reps = np.array([multiplier_replicate(ps, rng.choice([0.0, 2.0], ps.n), pts[:, 0], pts[:, 1]) for _ in range(B)])
    mean, sd = reps.mean(axis=0), reps.std(axis=0, ddof=1)
    assert np.all(np.abs(mean) < 3 * sd / math.sqrt(B))


def test_multiplier_influence_sums_to_replicate():
    ps = PseudoSample.from_uniform(Copula("frank", (3.0,)).sample(25, seed=6))
    xi = np.random.default_rng(1).choice([0.0, 2.0], 25)
    u, v = np.array([0.2, 0.6]), np.array([0.9, 0.4])
    D = multiplier_influence(ps, u, v)
    w = xi / xi.mean()
    assert_allclose((w - 1) @ D / 5, multiplier_replicate(ps, xi, u, v), rtol=1e-14)


@pytest.mark.slow
def test_empirical_process_is_tight_under_independence():
    g = np.linspace(0, 1, 100)
    u, v = np.meshgrid(g, g)
    sups = []
    for s in range(50):
        ps = PseudoSample.from_uniform(Copula("independence").sample(400, seed=s))
        sups.append(math.sqrt(400) * np.abs(empirical_copula(ps, u, v) - u * v).max())
    assert np.median(sups) < 2.0


def test_csv_round_trip(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("x,y\n1,5\n2,3\n4,1\n")
    data = read_sample(p)
    assert data.shape == (3, 2)
    p2 = tmp_path / "n.csv"
    p2.write_text("1,5\n2,3\n")
    assert read_sample(p2).shape == (2, 2)
    out = tmp_path / "ps.csv"
    ps = pseudo_observations(data)
    write_pseudo(ps, out)
    back = read_sample(out)
    assert_allclose(back, np.column_stack([ps.u, ps.v]))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-1000, 1000), st.integers(-1000, 1000)), min_size=2, max_size=30, unique_by=(lambda p: p[0], lambda p: p[1])))
def test_ranks_invariant_under_monotone_maps(pts):
    x, y = np.array(pts).T
    a = pseudo_observations(x, y)
    b = pseudo_observations(np.arctan(x / 100.0) * 7 + 3, np.exp(y / 500.0))
    assert_allclose(a.u, b.u)
    assert_allclose(a.v, b.v)
