"""Epsilon-insensitive support vector regression with an RBF kernel.

The dual quadratic program

    maximize  -1/2 sum_ij b_i b_j K(x_i, x_j) - eps * sum_i |b_i| + sum_i y_i b_i
    subject to  sum_i b_i = 0,   -C <= b_i <= C

is solved by sequential minimal optimization over the standard 2n-variable
split b_i = a_i - a*_i (a, a* in [0, C]), selecting the maximal-violating
pair at each step.  A dense projected-gradient solver over the same program
(`dual_oracle`) serves as an independent ground truth on tiny instances.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial.distance import cdist

from .dataset import Construct

#: Sentinel for the data-driven RBF width 1 / (n_features * var(X)).
SCALE_DEFAULT = "scale"

DEFAULT_TOL = 1e-3
DEFAULT_MAX_ITER = 10_000

#: Dual coefficients smaller than this are dropped from the support set.
SV_COEF_CUTOFF = 1e-12


class ConvergenceError(Exception):
    """SMO failed to reach the KKT tolerance within the iteration budget."""

    def __init__(self, violation: float, max_iter: int):
        self.violation = violation
        self.max_iter = max_iter
        super().__init__(
            f"SMO did not converge after {max_iter} iterations "
            f"(final KKT violation {violation:.3e})")


@dataclass(frozen=True)
class HyperParams:
    """Regularization C, tube half-width epsilon, and RBF width gamma."""

    c: float = 1.0
    epsilon: float = 0.1
    gamma: float | str = SCALE_DEFAULT

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.gamma != SCALE_DEFAULT and not (isinstance(self.gamma, (int, float)) and self.gamma > 0):
            raise ValueError(f"gamma must be positive or {SCALE_DEFAULT!r}, got {self.gamma}")


@dataclass(frozen=True)
class SvrModel:
    """A trained model: support vectors, dual coefficients b_i = a_i - a*_i, bias."""

    support_vectors: np.ndarray
    dual_coefs: np.ndarray
    bias: float
    gamma: float
    hp: HyperParams
    train_dim: int


@dataclass(frozen=True)
class MeanBaseline:
    """Predicts the training-fold mean rating for each construct."""

    means: dict[Construct, float]


def rbf_kernel(x: np.ndarray, y: np.ndarray, gamma: float) -> float:
    """exp(-gamma * ||x - y||^2); 1.0 at zero distance."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    d = x - y
    return float(np.exp(-gamma * np.dot(d, d)))


def rbf_kernel_matrix(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """Pairwise kernel values between the rows of a and b."""
    sq = cdist(np.atleast_2d(a), np.atleast_2d(b), metric="sqeuclidean")
    return np.exp(-gamma * sq)


def resolve_gamma(x: np.ndarray) -> float:
    """Data-driven RBF width: 1 / (n_features * population variance of all entries)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[0] < 2:
        raise ValueError("need at least 2 rows to resolve gamma")
    var = float(x.var())
    if var == 0.0:
        raise ValueError("feature matrix has zero variance; pass an explicit gamma")
    return 1.0 / (x.shape[1] * var)


def _resolved_gamma(x: np.ndarray, hp: HyperParams) -> float:
    return resolve_gamma(x) if hp.gamma == SCALE_DEFAULT else float(hp.gamma)


def dual_objective(beta: np.ndarray, kernel: np.ndarray, y: np.ndarray, epsilon: float) -> float:
    """Value of the (maximized) dual at beta."""
    return float(-0.5 * beta @ kernel @ beta - epsilon * np.abs(beta).sum() + y @ beta)


def _bias_from_beta(beta: np.ndarray, offsets: np.ndarray, y: np.ndarray,
                    c: float, epsilon: float) -> float:
    """Bias implied by the KKT conditions.

    ``offsets`` are the bias-free decision values K @ beta.  Free support
    vectors pin the bias exactly; without any, every point constrains it to
    an interval and the midpoint is taken.
    """
    atol = 1e-8 * c
    free = (np.abs(beta) > atol) & (np.abs(beta) < c - atol)
    if np.any(free):
        vals = y[free] - offsets[free] - np.sign(beta[free]) * epsilon
        return float(vals.mean())
    lo, hi = -np.inf, np.inf
    for bi, oi, yi in zip(beta, offsets, y):
        if abs(bi) <= atol:  # inside the tube
            lo = max(lo, yi - oi - epsilon)
            hi = min(hi, yi - oi + epsilon)
        elif bi >= c - atol:  # at the upper bound, residual >= epsilon
            hi = min(hi, yi - oi - epsilon)
        else:  # at the lower bound
            lo = max(lo, yi - oi + epsilon)
    if not np.isfinite(lo) and not np.isfinite(hi):
        return 0.0
    if not np.isfinite(lo):
        return float(hi)
    if not np.isfinite(hi):
        return float(lo)
    return float((lo + hi) / 2.0)


def fit_svr(x: np.ndarray, y: np.ndarray, hp: HyperParams, *,
            tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> SvrModel:
    """Train by SMO on the dual; returns a model satisfying KKT within ``tol``.

    ``max_iter`` bounds the number of pair updates; exceeding it raises
    :class:`ConvergenceError` carrying the final violation magnitude.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float)
    n = x.shape[0]
    if n < 2:
        raise ValueError("need at least 2 training rows")
    if y.shape != (n,):
        raise ValueError(f"y has shape {y.shape}, expected ({n},)")

    gamma = _resolved_gamma(x, hp)
    c, eps = float(hp.c), float(hp.epsilon)
    kernel = rbf_kernel_matrix(x, x, gamma)

    # 2n-variable split: z = [a; a*], signs s, gradient of the minimized form.
    s = np.concatenate([np.ones(n), -np.ones(n)])
    p = np.concatenate([eps - y, eps + y])
    z = np.zeros(2 * n)
    grad = p.copy()
    k2 = np.vstack([kernel, kernel])  # row t of the 2n problem maps to row t mod n

    neg_sg = -s * grad
    violation = np.inf
    for _ in range(max_iter):
        up = ((s > 0) & (z < c)) | ((s < 0) & (z > 0))
        low = ((s > 0) & (z > 0)) | ((s < 0) & (z < c))
        cand_up = np.where(up, neg_sg, -np.inf)
        cand_low = np.where(low, neg_sg, np.inf)
        i = int(np.argmax(cand_up))
        j = int(np.argmin(cand_low))
        violation = cand_up[i] - cand_low[j]
        if violation <= tol:
            break

        ii, jj = i % n, j % n
        si, sj = s[i], s[j]
        a = kernel[ii, ii] + kernel[jj, jj] - 2.0 * si * sj * kernel[ii, jj]
        a = max(a, 1e-12)
        # Feasible step along (z_i += si*t, z_j -= sj*t); t* from the 1-d minimum.
        t = violation / a
        t = min(t, (c - z[i]) if si > 0 else z[i])
        t = min(t, z[j] if sj > 0 else (c - z[j]))
        if t <= 0.0:
            break
        z[i] = min(max(z[i] + si * t, 0.0), c)
        z[j] = min(max(z[j] - sj * t, 0.0), c)
        delta = s * (t * (k2[:, ii] - k2[:, jj]))
        grad += delta
        neg_sg -= s * delta
    else:
        raise ConvergenceError(float(violation), max_iter)

    beta = z[:n] - z[n:]
    offsets = kernel @ beta
    bias = _bias_from_beta(beta, offsets, y, c, eps)

    keep = np.abs(beta) > SV_COEF_CUTOFF
    sv = np.array(x[keep], copy=True)
    sv.setflags(write=False)
    coefs = beta[keep].copy()
    coefs.setflags(write=False)
    return SvrModel(support_vectors=sv, dual_coefs=coefs, bias=bias,
                    gamma=gamma, hp=hp, train_dim=x.shape[1])


def predict(model: SvrModel, x: np.ndarray) -> np.ndarray:
    """Decision values sum_j b_j K(sv_j, x_i) + bias for each query row."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != model.train_dim:
        raise ValueError(
            f"query width {x.shape[1]} does not match training width {model.train_dim}")
    if model.support_vectors.shape[0] == 0:
        return np.full(x.shape[0], model.bias)
    k = rbf_kernel_matrix(x, model.support_vectors, model.gamma)
    return k @ model.dual_coefs + model.bias


def _project_box_hyperplane(v: np.ndarray, s: np.ndarray, c: float) -> np.ndarray:
    """Euclidean projection of v onto {z: s @ z = 0, 0 <= z <= c}.

    The projection is clip(v - lam*s, 0, c) for the lam at which the
    (piecewise-linear, nonincreasing) constraint value crosses zero; lam is
    found exactly from the sorted breakpoints.
    """
    bps = np.concatenate([v * s, (v - c) * s])
    bps = np.unique(bps)
    vals = s @ np.clip(v[None, :] - bps[:, None] * s[None, :], 0.0, c).T
    idx = np.searchsorted(-vals, 0.0)  # vals is nonincreasing in lam
    if idx == 0:
        lam = bps[0]
    elif idx >= len(bps):
        lam = bps[-1]
    else:
        v0, v1 = vals[idx - 1], vals[idx]
        if v1 == v0:
            lam = bps[idx]
        else:
            lam = bps[idx - 1] + (bps[idx] - bps[idx - 1]) * (0.0 - v0) / (v1 - v0)
    return np.clip(v - lam * s, 0.0, c)


def dual_oracle(x: np.ndarray, y: np.ndarray, hp: HyperParams,
                gamma: float | None = None, *,
                obj_tol: float = 1e-10, max_iter: int = 200_000) -> tuple[float, np.ndarray]:
    """Ground-truth dual solution for tiny instances (n <= 16).

    Accelerated projected-gradient descent on the smooth 2n-variable form,
    with exact projection onto the simplex-like feasible set, iterated until
    the objective change stays below ``obj_tol``.  Returns (dual objective,
    beta).
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float)
    n = x.shape[0]
    if n > 16:
        raise ValueError("dual_oracle is for instances with n <= 16")

    if gamma is None:
        gamma = _resolved_gamma(x, hp)
    c, eps = float(hp.c), float(hp.epsilon)
    kernel = rbf_kernel_matrix(x, x, gamma)

    s = np.concatenate([np.ones(n), -np.ones(n)])
    p = np.concatenate([eps - y, eps + y])

    def f(z: np.ndarray) -> float:
        beta = z[:n] - z[n:]
        return float(0.5 * beta @ kernel @ beta + p @ z)

    def grad(z: np.ndarray) -> np.ndarray:
        kb = kernel @ (z[:n] - z[n:])
        return s * np.concatenate([kb, kb]) + p

    lip = 2.0 * float(np.linalg.eigvalsh(kernel)[-1]) + 1e-12
    step = 1.0 / lip

    z = _project_box_hyperplane(np.zeros(2 * n), s, c)
    momentum = z.copy()
    t_acc = 1.0
    best = f(z)
    z_best = z.copy()
    since_improvement = 0
    for _ in range(max_iter):
        z_new = _project_box_hyperplane(momentum - step * grad(momentum), s, c)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_acc * t_acc))
        momentum = z_new + ((t_acc - 1.0) / t_new) * (z_new - z)
        z, t_acc = z_new, t_new
        val = f(z)
        if val < best - obj_tol:
            best, z_best = val, z.copy()
            since_improvement = 0
        else:
            since_improvement += 1
            if val > best:  # restart momentum on non-monotone step
                momentum = z.copy()
                t_acc = 1.0
            # Long window: accelerated progress is non-monotone, so a short
            # stall does not certify convergence.
            if since_improvement >= 2000:
                break

    beta = z_best[:n] - z_best[n:]
    return dual_objective(beta, kernel, y, eps), beta


def fit_baseline(y_by_construct: dict[Construct, np.ndarray]) -> MeanBaseline:
    """Mean-predictor baseline over the training labels of each construct."""
    means: dict[Construct, float] = {}
    for construct, vec in y_by_construct.items():
        vec = np.asarray(vec, dtype=float)
        if vec.size == 0:
            raise ValueError(f"empty label vector for {construct.column}")
        means[construct] = float(vec.mean())
    return MeanBaseline(means=means)


MODEL_FORMAT = "roboexpect-svr-model"
MODEL_VERSION = 1


def save_model(model: SvrModel, path: str | Path) -> None:
    """Serialize to a self-describing JSON file with round-trip float precision."""
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "c": model.hp.c,
        "epsilon": model.hp.epsilon,
        "gamma_setting": model.hp.gamma,
        "gamma": model.gamma,
        "bias": model.bias,
        "train_dim": model.train_dim,
        "dual_coefs": model.dual_coefs.tolist(),
        "support_vectors": model.support_vectors.tolist(),
    }
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_model(path: str | Path) -> SvrModel:
    with Path(path).open(encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a {MODEL_FORMAT} file: {path}")
    hp = HyperParams(c=payload["c"], epsilon=payload["epsilon"],
                     gamma=payload["gamma_setting"])
    sv = np.array(payload["support_vectors"], dtype=float).reshape(
        len(payload["dual_coefs"]), payload["train_dim"])
    return SvrModel(
        support_vectors=sv,
        dual_coefs=np.array(payload["dual_coefs"], dtype=float),
        bias=float(payload["bias"]),
        gamma=float(payload["gamma"]),
        hp=hp,
        train_dim=int(payload["train_dim"]),
    )
