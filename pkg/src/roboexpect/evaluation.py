"""Cross-validation protocol: fold plans, grid search, MSE, and significance tests.

Mirrors the experimental protocol: k-fold cross-validation (default 20) of an
epsilon-SVR per (modality combination, construct) cell, compared against a
mean-predictor baseline with a paired two-sided t-test over the folds.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy import stats

from .dataset import Construct, Dataset
from .features import FeatureMatrix, ModalityCombo, all_combos, fuse, label_vector
from .svr import ConvergenceError, HyperParams, fit_svr, predict

DEFAULT_SEED = 42
DEFAULT_K = 20

#: Grid-search values used for both C and epsilon.
DEFAULT_GRID_VALUES = (0.001, 0.01, 0.1, 1.0, 10.0, 100.0)


@dataclass(frozen=True)
class FoldPlan:
    """Deterministic assignment of rows to k folds, reconstructible from (n, k, seed)."""

    k: int
    assignment: np.ndarray
    seed: int

    @property
    def n(self) -> int:
        return len(self.assignment)

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment != fold)


def make_folds(n: int, k: int, seed: int) -> FoldPlan:
    """Shuffle 0..n-1 with a seeded PCG64 generator, then deal round-robin into k folds."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds number of rows n={n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    assignment = np.empty(n, dtype=np.int64)
    for pos, row in enumerate(perm):
        assignment[row] = pos % k
    assignment.setflags(write=False)
    return FoldPlan(k=k, assignment=assignment, seed=seed)


@dataclass(frozen=True)
class GridSpec:
    """Candidate values for the regularization and tube hyperparameters."""

    c_values: tuple[float, ...] = DEFAULT_GRID_VALUES
    epsilon_values: tuple[float, ...] = DEFAULT_GRID_VALUES

    def __post_init__(self):
        if not self.c_values or not self.epsilon_values:
            raise ValueError("grid value lists must be non-empty")


@dataclass(frozen=True)
class CellResult:
    """Per-(combination, construct) outcome; combo is None for the baseline rows."""

    combo: ModalityCombo | None
    construct: Construct
    fold_mses: np.ndarray
    mean_mse: float
    baseline_fold_mses: np.ndarray
    p_value: float | None

    @property
    def is_baseline(self) -> bool:
        return self.combo is None


def mse(pred: np.ndarray, truth: np.ndarray) -> float:
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise ValueError("empty vectors")
    d = pred - truth
    return float(np.mean(d * d))


def _fold_mses(x: np.ndarray, y: np.ndarray, hp: HyperParams,
               plan: FoldPlan) -> tuple[np.ndarray, np.ndarray]:
    """SVR and baseline test-fold MSEs for one design matrix and label vector."""
    svr_mses = np.empty(plan.k)
    base_mses = np.empty(plan.k)
    for fold in range(plan.k):
        train = plan.train_indices(fold)
        test = plan.test_indices(fold)
        try:
            model = fit_svr(x[train], y[train], hp)
        except ConvergenceError as exc:
            exc.args = (f"fold {fold}: {exc.args[0]}",)
            raise
        svr_mses[fold] = mse(predict(model, x[test]), y[test])
        base_mses[fold] = mse(np.full(len(test), y[train].mean()), y[test])
    return svr_mses, base_mses


def cross_validate(ds: Dataset, combo: ModalityCombo, construct: Construct,
                   hp: HyperParams, plan: FoldPlan) -> tuple[np.ndarray, np.ndarray]:
    """Per-fold test MSEs of the SVR and the mean baseline on identical splits."""
    if plan.n != len(ds):
        raise ValueError(f"fold plan built for n={plan.n}, dataset has {len(ds)} robots")
    x = fuse(ds, combo).values
    y = label_vector(ds, construct)
    try:
        return _fold_mses(x, y, hp, plan)
    except ConvergenceError as exc:
        exc.args = (f"combo={combo.label!r} construct={construct.column!r}: {exc.args[0]}",)
        raise


def _cell_task(args) -> tuple[tuple[int, str], tuple[np.ndarray, np.ndarray]]:
    (key, x, y, hp, plan) = args
    try:
        return key, _fold_mses(x, y, hp, plan)
    except ConvergenceError as exc:
        exc.args = (f"cell {key}: {exc.args[0]}",)
        raise


def _run_cells(ds: Dataset, hp: HyperParams, plan: FoldPlan,
               combos: list[ModalityCombo], jobs: int
               ) -> dict[tuple[int, str], tuple[np.ndarray, np.ndarray]]:
    """Evaluate every (combo, construct) cell; keyed results, order-independent."""
    tasks = []
    for ci, combo in enumerate(combos):
        x = fuse(ds, combo).values
        for construct in Construct:
            y = label_vector(ds, construct)
            tasks.append(((ci, construct.value), x, y, hp, plan))
    if jobs <= 1:
        pairs = map(_cell_task, tasks)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            pairs = list(pool.map(_cell_task, tasks))
    return dict(pairs)


def paired_t_test(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Two-sided paired t-test on the differences a - b.

    Degenerate zero-variance differences return exactly (0, 1.0) when the
    mean difference is zero and (+/-inf, 0.0) otherwise.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    n = a.size
    if n < 2:
        raise ValueError("need at least 2 paired observations")
    d = a - b
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return 0.0, 1.0
        return math.copysign(math.inf, mean), 0.0
    t = mean / (sd / math.sqrt(n))
    p = 2.0 * float(stats.t.sf(abs(t), df=n - 1))
    return t, p


def stars(p: float) -> str:
    """Significance annotation: *** below .001, ** below .01, * below .05 (strict)."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p-value out of range: {p}")
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


def pooled_score(ds: Dataset, hp: HyperParams, plan: FoldPlan, *, jobs: int = 1) -> float:
    """Mean fold MSE pooled over all constructs and all 7 combos (grid objective)."""
    cells = _run_cells(ds, hp, plan, all_combos(), jobs)
    return float(np.mean(np.concatenate([svr for svr, _ in cells.values()])))


def grid_search(ds: Dataset, grid: GridSpec, plan: FoldPlan, *, jobs: int = 1) -> HyperParams:
    """Select (C, epsilon) minimizing the mean fold MSE pooled over all constructs
    and all 7 modality combinations, with a single shared fold plan.

    Ties break toward smaller C, then smaller epsilon.
    """
    best: tuple[float, float, float] | None = None  # (pooled, c, eps)
    for c, eps in product(sorted(grid.c_values), sorted(grid.epsilon_values)):
        hp = HyperParams(c=c, epsilon=eps)
        pooled = pooled_score(ds, hp, plan, jobs=jobs)
        if best is None or pooled < best[0] or (pooled == best[0] and (c, eps) < best[1:]):
            best = (pooled, c, eps)
    assert best is not None
    return HyperParams(c=best[1], epsilon=best[2])


def run_experiment(ds: Dataset, hp: HyperParams, plan: FoldPlan, *,
                   jobs: int = 1) -> list[CellResult]:
    """Evaluate all 7 combos x 6 constructs plus the 6 baseline-only rows.

    Model cells carry p-values from the paired t-test of SVR vs baseline fold
    MSEs; baseline rows carry a None p-value.
    """
    combos = all_combos()
    cells = _run_cells(ds, hp, plan, combos, jobs)
    results: list[CellResult] = []
    for ci, combo in enumerate(combos):
        for construct in Construct:
            svr_mses, base_mses = cells[(ci, construct.value)]
            _, p = paired_t_test(svr_mses, base_mses)
            results.append(CellResult(
                combo=combo, construct=construct,
                fold_mses=svr_mses, mean_mse=float(svr_mses.mean()),
                baseline_fold_mses=base_mses, p_value=p))
    for construct in Construct:
        _, base_mses = cells[(0, construct.value)]
        results.append(CellResult(
            combo=None, construct=construct,
            fold_mses=base_mses, mean_mse=float(base_mses.mean()),
            baseline_fold_mses=base_mses, p_value=None))
    return results
