import math

import pytest

import pspin


def test_exponents():
    ex = pspin.exponents(1.5)
    assert ex.q == pytest.approx(3.0)
    assert ex.kappa == pytest.approx(1.75)
    with pytest.raises(ValueError):
        pspin.exponents(1.0)


def test_aligned_pattern_energy():
    xi = pspin.PatternMatrix.generate(64, 1, 7)
    assert pspin.energy(xi.row(0), xi, 3.0) == -1.0


def test_energy_matches_python_sum():
    xi = pspin.PatternMatrix.generate(40, 5, 3)
    s = pspin.perturb(xi.row(0), 0.25, seed=1)
    p = 2.5
    total = sum(abs(sum(a * b for a, b in zip(xi.row(mu), s))) ** p for mu in range(xi.n2))
    assert pspin.energy(s, xi, p) == pytest.approx(-total / 40 ** (1 + p / 2 if p <= 2 else p), rel=1e-12)


def test_descent_reaches_local_minimum():
    xi = pspin.PatternMatrix.generate(100, 10, 5)
    start = pspin.perturb(xi.row(0), 0.1, seed=2)
    res = pspin.descend(start, xi, 3.0, seed=4)
    assert res["converged"]
    assert pspin.is_local_min(res["endpoint"], xi, 3.0)
    trace = res["energy_trace"]
    assert all(b < a for a, b in zip(trace, trace[1:]))


def test_single_pattern_landscape():
    xi = pspin.PatternMatrix.generate(12, 1, 9)
    minima = pspin.local_minima(xi, 2.0)
    assert sorted(minima) == sorted([xi.row(0), [-v for v in xi.row(0)]])
    state, e = pspin.ground_state(xi, 2.0)
    assert e == -1.0


def test_exhaustive_budget():
    xi = pspin.PatternMatrix.generate(80, 2, 1)
    with pytest.raises(RuntimeError):
        pspin.sphere_min_gap(xi, 2.0, 0, 12)


def test_priors():
    assert pspin.psi_norm("gaussian", 2.0) == pytest.approx(math.sqrt(8 / 3), rel=1e-9)
    assert pspin.u_eval("rademacher", 1.3) == pytest.approx(math.log(math.cosh(1.3)))
    g = pspin.growth_ratio("stretched_exp:1.5", 3.0)
    assert g["converged"]


def test_sweep_is_thread_independent():
    cfg = "p = [3.0]\nalpha = [0.1]\nn1 = [60]\ntrials = 5\nseed = 11\n"
    a = pspin.retrieval_sweep(cfg, threads=1)
    b = pspin.retrieval_sweep(cfg, threads=4)
    assert a == b
    assert len(a) == 5


def test_bad_config():
    with pytest.raises(ValueError):
        pspin.retrieval_sweep("p = [3.0\n")


def test_pattern_file_roundtrip(tmp_path):
    xi = pspin.PatternMatrix.generate(70, 3, 2)
    path = str(tmp_path / "xi.bin")
    xi.save(path)
    assert pspin.PatternMatrix.load(path) == xi
