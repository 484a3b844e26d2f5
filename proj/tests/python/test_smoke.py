"""End-to-end smoke checks of the Python bindings and the CLI binary."""

import math
import os
import subprocess

import numpy as np
import pytest

import jlcm


@pytest.fixture(scope="module")
def small_fit():
    data = jlcm.simulate(seed=5, n_subjects=30)
    fit = jlcm.fit(data, k=2, iterations=300, burn_in=100, seed=3)
    return data, fit


def test_simulated_dataset_shape():
    data = jlcm.simulate(seed=5, n_subjects=30)
    assert data.n_subjects == 30
    assert data.n_observations >= 30
    assert data.has_truth
    assert data.dims.longitudinal == 2
    assert data.dims.random == 2
    assert len(data.subject_ids()) == 30
    assert len(data.times(0)) == len(data.outcomes(0))


def test_fit_contract(small_fit):
    data, fit = small_fit
    assert fit.n_classes == 2
    assert fit.n_draws == 200
    assert len(fit.loglik_trace) == 300
    assert all(math.isfinite(v) for v in fit.loglik_trace)
    mean = fit.posterior_mean()
    assert mean.beta.shape == (2, 2)
    assert np.all(mean.tau > 0)
    assert np.all(mean.lambda0 > 0)
    # classes are relabeled to ascending response intercept
    assert mean.beta[0, 0] <= mean.beta[1, 0]
    for block, proposals, accepts in fit.acceptance():
        assert 0 <= accepts <= proposals


def test_summary_and_membership(small_fit):
    data, fit = small_fit
    rows = jlcm.summarize(fit, data)
    names = [r[0] for r in rows]
    assert "beta[1].x1" in names
    assert all(math.isfinite(r[1]) for r in rows)
    assert all(r[3] <= r[1] <= r[4] for r in rows)  # estimate inside its interval

    membership = jlcm.posterior_membership(fit, data)
    assert len(membership) == data.n_observations
    for _, visit, probs, modal in membership:
        assert visit >= 1
        assert probs.shape == (2,)
        assert abs(probs.sum() - 1.0) < 1e-9
        assert modal in (1, 2)


def test_dic_and_prediction(small_fit):
    data, fit = small_fit
    d_bar, p_d, dic = jlcm.dic(fit, data)
    assert math.isfinite(dic)
    assert dic == pytest.approx(d_bar + p_d)

    rows = jlcm.dynamic_survival(fit, data, landmark=0.4, horizons=[0.2, 0.4])
    assert len(rows) == 2 * data.n_subjects
    for _, landmark, horizon, value, ok in rows:
        assert landmark == 0.4
        assert ok
        assert 0.0 < value <= 1.0 + 1e-9


def test_metric_helpers(small_fit):
    data, _ = small_fit
    truth = [data.true_classes(i) for i in range(data.n_subjects)]
    assert jlcm.error_rate(truth, truth) == 0.0

    # frozen hand example: concordant mass 4.5 + 0.5 tie credit over 7 pairs
    auc = jlcm.ipcw_auc(
        marker=[0.9, 0.55, 0.8, 0.3, 0.85],
        times=[1.0, 2.0, 3.0, 4.0, 5.0],
        events=[1, 0, 1, 1, 0],
        landmark=0.0,
        horizon=3.5,
    )
    assert auc == pytest.approx(5.0 / 7.0, abs=1e-12)


def test_covariance_and_hazard_helpers():
    sigma = jlcm.covariance_matrix(
        alpha1=np.array([-0.2, -0.5]),
        alpha2=np.array([0.1, 0.3]),
        a_design=np.array([1.0, 1.0]),
        b_design=np.array([1.0, 1.0]),
        q=2,
    )
    assert sigma.shape == (3, 3)
    assert np.allclose(sigma, sigma.T)
    assert np.all(np.linalg.eigvalsh(sigma) > 0)

    h = jlcm.cumulative_hazard(
        t=1.0, x3=np.zeros(0), omega=np.zeros(0), gamma=0.2, lambda0=0.5, upsilon=0.0
    )
    assert h == pytest.approx(0.5 * math.expm1(0.2) / 0.2, rel=1e-12)


def test_dataset_round_trip(tmp_path):
    data = jlcm.simulate(seed=11, n_subjects=12)
    path = str(tmp_path / "dataset.csv")
    jlcm.write_dataset(path, data)
    loaded = jlcm.load_dataset(path)
    assert loaded.n_subjects == data.n_subjects
    assert loaded.n_observations == data.n_observations
    assert not loaded.has_truth  # truth never round-trips through the data file


def test_errors_are_typed():
    data = jlcm.simulate(seed=5, n_subjects=10)
    with pytest.raises(jlcm.JlcmError):
        jlcm.fit(data, k=0)
    with pytest.raises(jlcm.JlcmError):
        jlcm.load_dataset("/nonexistent/file.csv")


def test_cli_round_trip(tmp_path):
    cli = os.environ.get("JLCM_CLI")
    if not cli:
        pytest.skip("JLCM_CLI not set")
    cfg = tmp_path / "config.ini"
    cfg.write_text("[model]\nn_subjects = 20\n\n[sampler]\niterations = 150\nburn_in = 50\n")
    sim = tmp_path / "sim"
    fit = tmp_path / "fit"
    subprocess.run(
        [cli, "simulate", "--config", str(cfg), "--seed", "4", "--out", str(sim)], check=True
    )
    subprocess.run(
        [cli, "fit", "--config", str(cfg), "--data", str(sim / "dataset.csv"), "--k", "2",
         "--seed", "6", "--out", str(fit)],
        check=True,
    )
    assert (fit / "summary.csv").exists()
    assert (fit / "score.csv").exists()
