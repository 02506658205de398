import math

import numpy as np
import pytest

import eefluct


def test_disorder_laws():
    exp = eefluct.DisorderSpec("exponential", 0.5)
    assert exp.family == eefluct.Family.EXPONENTIAL
    assert eefluct.pdf(exp, 0.0) == pytest.approx(2.0)
    assert eefluct.quantile(exp, 1 - math.exp(-1)) == pytest.approx(0.5)
    t = 0.3
    assert eefluct.fisher_gap(exp, t) == pytest.approx(math.exp(t / 0.5) - 1, rel=1e-12)
    assert eefluct.fisher_gap_quadrature(exp, t) == pytest.approx(
        eefluct.fisher_gap(exp, t), rel=1e-6
    )
    hc = eefluct.DisorderSpec(eefluct.Family.HALF_CAUCHY, 0.7)
    assert eefluct.fisher_gap(hc, t) == pytest.approx(
        2 * t / (math.pi * 0.7) + t * t / (2 * 0.49), rel=1e-12
    )


def test_invalid_input_raises_with_kind():
    with pytest.raises(eefluct.Error) as info:
        eefluct.DisorderSpec("exponential", -1.0)
    assert info.value.kind == "ValidationError"


def test_clean_chain_spectrum():
    n = 16
    values, vectors = eefluct.eigendecompose([0.0] * n)
    k = np.arange(1, n + 1)
    expected = 2 - 2 * np.cos(np.pi * k / (n + 1))
    np.testing.assert_allclose(values, np.sort(expected), atol=1e-12)
    np.testing.assert_allclose(vectors.T @ vectors, np.eye(n), atol=1e-12)


def test_projection_and_entropy():
    potential = eefluct.sample_potential(eefluct.DisorderSpec("uniform", 1.0), 40, 7)
    p = eefluct.fermi_projection(potential, 1.0)
    np.testing.assert_allclose(p @ p, p, atol=1e-10)
    sites = list(range(10, 20))
    occ = eefluct.occupation_spectrum(potential, 1.0, sites)
    assert all(0.0 <= x <= 1.0 for x in occ)
    s = eefluct.renyi_entropy(occ, 1.0)
    assert s == pytest.approx(
        eefluct.block_entropy(potential, 10, 1.0, 1.0, block_start=10), abs=1e-10
    )
    assert eefluct.renyi_entropy(occ, 2.0) <= s + 1e-12


def test_ensemble_is_deterministic_and_worker_independent():
    law = eefluct.DisorderSpec("exponential", 1.0)
    a = eefluct.run_ensemble(law, 64, 16, n_realizations=12, seed=3, workers=1)
    b = eefluct.run_ensemble(law, 64, 16, n_realizations=12, seed=3, workers=4)
    assert a == b
    stats = eefluct.statistics(a)
    assert stats["n_realizations"] == 12
    assert stats["mean"] == pytest.approx(np.mean(a))


def test_clean_ensemble_is_degenerate():
    s = eefluct.run_ensemble(None, 40, 10, n_realizations=5)
    assert len(set(s)) == 1
    assert eefluct.statistics(s)["degenerate"]


def test_lyapunov_radius():
    r = eefluct.lyapunov_exponent(eefluct.DisorderSpec("exponential", 1.0), n_steps=200_000)
    assert r["radius"] == pytest.approx(5.0, rel=0.25)


def test_bound_curve_and_factorization():
    spec = eefluct.DisorderSpec("exponential", 1.0)
    curve = eefluct.cv_lower_curve(spec, 80, 20, t_grid=[0.1, 0.5, 1.0], n_realizations=40)
    assert len(curve["cv_lower"]) == 3
    assert all(c >= 0 for c in curve["cv_lower"])
    f = eefluct.variance_factorization_check(spec, 120, 40, n_realizations=40)
    assert f["status"] in {"ok", "undefined", "skipped-weak-localization"}


def test_run_cli_job(tmp_path):
    out = tmp_path / "hcr.csv"
    status, log = eefluct.run(
        {"run.command": "hcr-selftest", "run.output": str(out), "hcr.draws": "20000"}
    )
    assert status == 0, log
    assert out.exists()
