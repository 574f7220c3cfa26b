"""End-to-end smoke tests of the python bindings."""

import pytest

import freewalk as fw


def test_version_and_repr():
    assert fw.__version__
    z3 = fw.lazy_srw(3)
    assert z3.dim == 3
    assert z3.aperiodic
    assert "Z^3" in repr(z3)


def test_theta_matches_watson():
    # lazy walk doubles the classical Watson value
    assert fw.theta_of_factor(fw.lazy_srw(3)) == pytest.approx(3.0327721183039561, abs=1e-8)
    with pytest.raises(fw.FreewalkError):
        fw.theta_of_factor(fw.lazy_srw(2))


def test_green_eval_flags():
    g, dg, d2g = fw.green_eval(fw.lazy_srw(5), 1.0)
    assert g > 1.0
    assert dg is not None
    assert d2g is None  # infinite second derivative at r = 1 for d = 5


def test_validation_errors():
    bad = '{"dimension": 2, "atoms": [{"x": [1, 0], "w": "1/2"}, {"x": [-1, 0], "w": "1/4"}, {"x": [0, 1], "w": "1/4"}]}'
    with pytest.raises(fw.FreewalkError):
        fw.factor_from_json(bad)


def test_series_against_bfs():
    z3, z5 = fw.lazy_srw(3), fw.lazy_srw(5)
    series = fw.green_series(z3, z5, 0.4, 16)
    oracle = fw.bfs_oracle(z3, z5, 0.4, 8)
    for n in range(9):
        assert series[n] == pytest.approx(oracle[n], abs=1e-12)


def test_classification_signs():
    z3, z5 = fw.lazy_srw(3), fw.lazy_srw(5)
    assert fw.classify(z3, z5, 0.02)["classification"] == "DegenerateConvergent"
    assert fw.classify(z3, z5, 0.8)["classification"] == "NonDegenerateDivergent"
    star = fw.find_alpha_star(z3, z5)
    assert 0.01 < star["alpha_star"] < star["alpha_c"]
    assert star["classification"] == "DegenerateDivergent"
    assert star["degenerate_along"] == [2]
    assert star["divergent"] is True
    assert star["spr"] is False


def test_monte_carlo_determinism():
    z3, z5 = fw.lazy_srw(3), fw.lazy_srw(5)
    a = fw.monte_carlo(z3, z5, 0.4, 10, 100000, seed=7, threads=1)
    b = fw.monte_carlo(z3, z5, 0.4, 10, 100000, seed=7, threads=2)
    assert a["estimate"] == b["estimate"]  # bit-identical across thread counts
    series = fw.green_series(z3, z5, 0.4, 10)
    assert abs(a["estimate"] - series[10]) < 4 * a["stderr"]


def test_tauberian_synthetic():
    R = 1.1
    coeffs = [1.0] + [n ** -1.5 * R ** -n for n in range(1, 1201)]
    rep = fw.tauberian_exponents(coeffs, R)
    assert rep["preferred"] == "b=0"
    assert abs(rep["a_b0"] - 1.5) < 0.02
