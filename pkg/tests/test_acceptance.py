"""Acceptance suite.

Each test exercises one acceptance criterion at its stated tolerance and
prints a single PASS line on success (run with ``pytest -s`` to see them).
Criterion 9 (reference-data reproduction) only runs when the environment
variable ROBOEXPECT_REFERENCE_DATA points at a real feature directory.
"""

import math
import os
import time

import numpy as np
import pytest
from click.testing import CliRunner
from scipy import integrate

from synth import PLANTED, planted_dataset

from roboexpect.cli import main as cli_main
from roboexpect.dataset import Construct, Modality, load_dataset, write_dataset
from roboexpect.evaluation import (GridSpec, grid_search, make_folds, paired_t_test,
                                   run_experiment, stars)
from roboexpect.svr import (HyperParams, dual_objective, dual_oracle, fit_svr,
                            predict, rbf_kernel_matrix)
from test_svr import _oracle_bias, full_beta


def _report(criterion: str):
    print(f"\nACCEPTANCE {criterion}: PASS")


@pytest.fixture(scope="module")
def random_instances():
    """200 random instances with models fitted at high precision, plus oracle runs."""
    rng = np.random.default_rng(2024)
    out = []
    start = time.monotonic()
    for _ in range(200):
        n = int(rng.integers(2, 13))
        d = int(rng.integers(1, 4))
        x = rng.normal(size=(n, d))
        y = rng.uniform(-3.0, 3.0, size=n)
        c = float(rng.choice([0.1, 1.0, 10.0]))
        eps = float(rng.choice([0.0, 0.1, 1.0]))
        hp = HyperParams(c=c, epsilon=eps, gamma=1.0)
        model = fit_svr(x, y, hp, tol=1e-8, max_iter=500_000)
        obj_oracle, beta_oracle = dual_oracle(x, y, hp, 1.0)
        out.append((x, y, hp, model, obj_oracle, beta_oracle))
    return out, time.monotonic() - start


def test_criterion_1_oracle_equivalence(random_instances):
    instances, elapsed = random_instances
    for x, y, hp, model, obj_oracle, beta_oracle in instances:
        k = rbf_kernel_matrix(x, x, 1.0)
        obj_fit = dual_objective(full_beta(model, x), k, y, hp.epsilon)
        assert abs(obj_fit - obj_oracle) <= 1e-6
        offsets = k @ beta_oracle
        pred_oracle = offsets + _oracle_bias(beta_oracle, offsets, y, hp.c, hp.epsilon)
        assert np.max(np.abs(predict(model, x) - pred_oracle)) <= 1e-4
    assert elapsed < 60.0, f"oracle suite took {elapsed:.1f}s"
    _report("1 (oracle equivalence, 200 instances, "
            f"{elapsed:.1f}s)")


def test_criterion_2_kkt_suite(random_instances):
    instances, _ = random_instances
    fit_tol = 1e-8
    for x, y, hp, model, _, _ in instances:
        n = x.shape[0]
        beta = full_beta(model, x)
        assert abs(beta.sum()) <= 1e-6 * hp.c * n
        assert np.all(np.abs(beta) <= hp.c + 1e-9)
        residual = np.abs(predict(model, x) - y)
        slack = 1e-4  # bias reconstruction noise on top of the solver tolerance
        interior = np.abs(beta) < hp.c - fit_tol
        assert np.all(residual[interior] <= hp.epsilon + fit_tol + slack)
        outside = residual > hp.epsilon + fit_tol + slack
        assert np.all(np.abs(np.abs(beta[outside]) - hp.c) <= fit_tol + slack)
    _report("2 (KKT feasibility and complementarity, 200/200 models)")


def test_criterion_3_flat_target_property():
    rng = np.random.default_rng(77)
    for _ in range(50):
        n = int(rng.integers(2, 20))
        d = int(rng.integers(1, 6))
        x = rng.normal(size=(n, d))
        const = float(rng.uniform(-3.0, 3.0))
        eps = float(rng.choice([0.05, 0.1, 0.5]))
        model = fit_svr(x, np.full(n, const), HyperParams(c=1.0, epsilon=eps, gamma=1.0))
        preds = predict(model, x)
        assert np.all(np.abs(preds - const) <= eps + 1e-9)
    _report("3 (flat-target property, 50 random matrices)")


def _t_sf_quadrature(t: float, df: int) -> float:
    norm = math.gamma((df + 1) / 2) / (math.sqrt(df * math.pi) * math.gamma(df / 2))
    val, _ = integrate.quad(lambda u: norm * (1 + u * u / df) ** (-(df + 1) / 2),
                            t, np.inf)
    return val


def test_criterion_4_t_test_oracle():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(2, 30))
        a = rng.normal(loc=rng.uniform(-1, 1), size=n)
        b = rng.normal(size=n)
        t, p = paired_t_test(a, b)
        assert abs(p - 2.0 * _t_sf_quadrature(abs(t), n - 1)) <= 1e-6
    v = np.array([0.4, 0.5, 0.6])
    assert paired_t_test(v, v) == (0.0, 1.0)
    assert paired_t_test(v + 2.0, v) == (math.inf, 0.0)
    assert paired_t_test(v - 2.0, v) == (-math.inf, 0.0)
    _report("4 (paired t-test vs quadrature oracle, 20 vectors + degenerate branches)")


def test_criterion_5_star_boundaries():
    assert stars(0.05) == ""
    assert stars(0.0499999999) == "*"
    assert stars(0.01) == "*"
    assert stars(0.0099999999) == "**"
    assert stars(0.001) == "**"
    assert stars(0.0009999999) == "***"
    _report("5 (significance star thresholds, strict boundaries)")


@pytest.mark.slow
def test_criterion_6_planted_signal_protocol():
    start = time.monotonic()
    ds = planted_dataset(n=165, hc_dim=59, emb_dim=512, seed=3)
    assert ds.dims == {Modality.HC: 59, Modality.M: 512, Modality.IM: 512}
    plan = make_folds(165, 20, 42)
    results = run_experiment(ds, HyperParams(c=1.0, epsilon=0.1), plan)

    for cell in results:
        if cell.is_baseline or cell.construct is not PLANTED:
            continue
        if Modality.HC in cell.combo:
            assert cell.p_value < 0.05, (cell.combo.label, cell.p_value)

    clean = 0
    for construct in Construct:
        if construct is PLANTED:
            continue
        worst = min(cell.p_value for cell in results
                    if not cell.is_baseline and cell.construct is construct)
        if worst >= 0.01:
            clean += 1
    assert clean >= 3, f"only {clean} pure-noise constructs clean at p<.01"
    elapsed = time.monotonic() - start
    assert elapsed < 600.0
    _report(f"6 (planted-signal end-to-end, {elapsed:.0f}s, {clean}/5 clean)")


@pytest.mark.slow
def test_criterion_7_cmd_run_determinism(tmp_path):
    ds = planted_dataset(n=40, hc_dim=6, emb_dim=5, seed=3)
    data = tmp_path / "data"
    write_dataset(ds, data)
    runner = CliRunner()
    outputs = []
    for name, jobs in [("one.md", "1"), ("two.md", "1"), ("eight.md", "8")]:
        out = tmp_path / name
        result = runner.invoke(cli_main, ["run", "--data", str(data), "--k", "8",
                                          "--jobs", jobs, "--output", str(out)])
        assert result.exit_code == 0, result.output
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1], "two identical runs differ"
    assert outputs[0] == outputs[2], "--jobs 1 vs --jobs 8 differ"
    _report("7 (byte-identical reports across runs and job counts)")


def test_criterion_8_fold_arithmetic():
    for seed in [0, 1, 42, 2024, 123456789]:
        plan = make_folds(165, 20, seed)
        sizes = np.bincount(plan.assignment, minlength=20)
        assert sorted(sizes) == [8] * 15 + [9] * 5
        seen = np.concatenate([plan.test_indices(f) for f in range(20)])
        assert sorted(seen) == list(range(165))
    _report("8 (fold arithmetic 165/20: 5x9 + 15x8, exhaustive, disjoint)")


@pytest.mark.skipif("ROBOEXPECT_REFERENCE_DATA" not in os.environ,
                    reason="conditional: set ROBOEXPECT_REFERENCE_DATA to a real "
                           "feature directory to run the reproduction check")
def test_criterion_9_conditional_reference_reproduction():
    ds = load_dataset(os.environ["ROBOEXPECT_REFERENCE_DATA"],
                      expect_reference_shape=True)
    plan = make_folds(len(ds), 20, 42)
    hp = grid_search(ds, GridSpec(), plan)
    assert (hp.c, hp.epsilon) == (1.0, 0.1)
    reference_hc = {Construct.WARMTH: 0.145, Construct.COMPETENCE: 0.130,
                    Construct.DISCOMFORT: 0.306,
                    Construct.PERCEPTION_INTERPRETATION: 0.188,
                    Construct.TACTILE_INTERACTION: 0.381,
                    Construct.NONVERBAL_COMMUNICATION: 0.182}
    results = run_experiment(ds, hp, plan)
    for cell in results:
        if not cell.is_baseline and cell.combo.label == "HC":
            assert abs(cell.mean_mse - reference_hc[cell.construct]) <= 0.05
    _report("9 (conditional reference reproduction)")
