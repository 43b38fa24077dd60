"""Location/scatter estimation.

Classical per-class moments plus the minimum covariance determinant (MCD):
a FastMCD-style concentration algorithm with random starts and a reweighting
step, and an exhaustive-enumeration variant that serves as a small-n engine
and as an independent oracle for the concentration path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy import linalg as sla
from scipy.stats import chi2 as _chi2

from .errors import (
    ConfigurationError,
    DegenerateClassError,
    ExactFitError,
    ShapeError,
)

_RCOND_MIN = 1e-12


# ---------------------------------------------------------------------------
# chi-squared helpers

def chi2_quantile(p_dof: int, prob: float) -> float:
    """Quantile of the chi-squared distribution with ``p_dof`` degrees of
    freedom, accurate to better than 1e-8 relative."""
    if p_dof < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {p_dof}")
    if not 0.0 < prob < 1.0:
        raise ValueError(f"prob must lie in (0, 1), got {prob}")
    return float(_chi2.ppf(prob, df=p_dof))


def chi2_cdf(x: float, p_dof: int) -> float:
    if p_dof < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {p_dof}")
    return float(_chi2.cdf(x, df=p_dof))


def consistency_factor(alpha: float, p: int) -> float:
    """Scaling that makes the h-subset covariance consistent for Gaussian
    data: alpha / F_{chi2_{p+2}}(q_alpha) with q_alpha the chi2_p quantile.
    Equals 1 at alpha = 1."""
    if not 0.5 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0.5, 1], got {alpha}")
    if p < 1:
        raise ValueError("p must be >= 1")
    if alpha == 1.0:
        return 1.0
    q = chi2_quantile(p, alpha)
    return alpha / chi2_cdf(q, p + 2)


# ---------------------------------------------------------------------------
# core types

@dataclass
class LocationScatter:
    """A center vector plus positive-definite scatter matrix for one class.

    ``method`` records how the fit was obtained; MCD variants carry the
    optimal h-subset and (after reweighting) the 0/1 case weights.
    """

    center: np.ndarray
    scatter: np.ndarray
    method: str = "classical"
    h_subset: np.ndarray | None = None
    weights: np.ndarray | None = None
    alpha: float | None = None
    log_det: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).ravel()
        self.scatter = np.asarray(self.scatter, dtype=float)
        p = self.center.size
        if self.scatter.shape != (p, p):
            raise ShapeError(
                f"scatter shape {self.scatter.shape} does not match center size {p}"
            )
        if not np.allclose(self.scatter, self.scatter.T, atol=1e-10):
            raise DegenerateClassError("scatter matrix is not symmetric")
        self.scatter = 0.5 * (self.scatter + self.scatter.T)
        eigs = np.linalg.eigvalsh(self.scatter)
        if eigs[0] <= 0:
            raise DegenerateClassError("scatter matrix is not positive definite")
        if eigs[0] / eigs[-1] < _RCOND_MIN:
            raise DegenerateClassError(
                f"scatter matrix is numerically singular (rcond ~ {eigs[0]/eigs[-1]:.2e})"
            )
        if self.h_subset is not None:
            self.h_subset = np.asarray(self.h_subset, dtype=int)
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=int)
        if self.log_det is None:
            self.log_det = float(np.linalg.slogdet(self.scatter)[1])

    @property
    def p(self) -> int:
        return self.center.size

    def cholesky(self) -> np.ndarray:
        return np.linalg.cholesky(self.scatter)

    def to_dict(self) -> dict:
        d = {
            "center": self.center.tolist(),
            "scatter": self.scatter.ravel().tolist(),  # row-major
            "method": self.method,
            "alpha": self.alpha,
            "log_det": self.log_det,
        }
        if self.h_subset is not None:
            d["h_subset"] = self.h_subset.tolist()
        if self.weights is not None:
            d["weights"] = self.weights.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LocationScatter":
        p = len(d["center"])
        return cls(
            center=np.array(d["center"]),
            scatter=np.array(d["scatter"]).reshape(p, p),
            method=d["method"],
            h_subset=np.array(d["h_subset"]) if "h_subset" in d else None,
            weights=np.array(d["weights"]) if "weights" in d else None,
            alpha=d.get("alpha"),
            log_det=d["log_det"],
        )


@dataclass
class EstimatorConfig:
    """Tuning knobs for the MCD concentration algorithm."""

    alpha: float = 0.75
    n_starts: int = 500
    n_keep: int = 10
    max_csteps: int = 100
    convergence_tol: float = 1e-12
    seed: int = 0
    reweight_quantile: float = 0.975

    def __post_init__(self):
        if not 0.5 <= self.alpha < 1.0:
            raise ConfigurationError(f"alpha must lie in [0.5, 1), got {self.alpha}")
        if self.n_keep > self.n_starts:
            raise ConfigurationError("n_keep must not exceed n_starts")
        if not 0.0 < self.reweight_quantile < 1.0:
            raise ConfigurationError("reweight_quantile must lie in (0, 1)")


# ---------------------------------------------------------------------------
# basic moments

def classical_moments(X) -> LocationScatter:
    """Column means and unbiased sample covariance (divisor m - 1)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ShapeError("X must be 2-d")
    m, p = X.shape
    if m < p + 1:
        raise DegenerateClassError(f"need at least {p + 1} cases, got {m}")
    center = X.mean(axis=0)
    scatter = np.atleast_2d(np.cov(X, rowvar=False, ddof=1))
    eigs = np.linalg.eigvalsh(0.5 * (scatter + scatter.T))
    if eigs[0] <= 0 or eigs[0] / eigs[-1] < _RCOND_MIN:
        raise DegenerateClassError("sample covariance is numerically singular")
    return LocationScatter(center, scatter, method="classical")


def pooled_covariance(parts) -> np.ndarray:
    """Weighted combination sum_g (m_g - 1) S_g / (n - G) of class scatters.

    ``parts`` is a list of (m_g, scatter_g) pairs.
    """
    if len(parts) < 2:
        raise ConfigurationError("pooling needs at least two classes")
    n = sum(m for m, _ in parts)
    G = len(parts)
    if n == G:
        raise DegenerateClassError("degenerate pooling: n equals the class count")
    p = np.asarray(parts[0][1]).shape[0]
    acc = np.zeros((p, p))
    for m, S in parts:
        S = np.asarray(S, dtype=float)
        if not np.allclose(S, S.T, atol=1e-10):
            raise DegenerateClassError("class scatter is not symmetric")
        acc += (m - 1) * S
    pooled = acc / (n - G)
    return 0.5 * (pooled + pooled.T)


def mahalanobis(x, est: LocationScatter) -> float:
    """Mahalanobis distance of ``x`` from ``est``, via a Cholesky solve."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != est.p:
        raise ShapeError(f"point has dimension {x.size}, estimate has {est.p}")
    return float(np.sqrt(mahalanobis_squared(x[None, :], est.center, est.scatter)[0]))


def mahalanobis_squared(X, center, scatter) -> np.ndarray:
    """Squared Mahalanobis distances of the rows of X (vectorized)."""
    L = np.linalg.cholesky(scatter)
    Z = sla.solve_triangular(L, (np.asarray(X, float) - center).T, lower=True)
    return np.einsum("ij,ij->j", Z, Z)


# ---------------------------------------------------------------------------
# MCD machinery

def _exact_fit_scale(X) -> float:
    """Determinant scale below which an h-subset counts as an exact fit."""
    v = X.var(axis=0, ddof=1)
    if np.any(v <= 0):
        return 0.0
    return float(np.exp(np.log(v).mean())) ** X.shape[1]


def _subset_fit(X, subset):
    pts = X[subset]
    center = pts.mean(axis=0)
    scatter = np.atleast_2d(np.cov(pts, rowvar=False, ddof=1))
    return center, scatter


def _exact_fit_error(X, subset):
    center, scatter = _subset_fit(X, np.asarray(subset))
    w, V = np.linalg.eigh(0.5 * (scatter + scatter.T))
    return ExactFitError(
        f"{len(subset)} cases lie on an affine hyperplane "
        "(optimal covariance determinant is zero)",
        center=center,
        normal=V[:, 0],
    )


def c_step(X, subset):
    """One concentration step.

    Replaces ``subset`` by the h cases with the smallest Mahalanobis
    distances relative to the subset's own mean/covariance. Returns the new
    (sorted) index set and the determinant of its covariance, which is never
    larger than the determinant of the input subset's covariance. Distance
    ties are broken by case index.
    """
    X = np.asarray(X, dtype=float)
    subset = np.asarray(subset, dtype=int)
    h = subset.size
    center, scatter = _subset_fit(X, subset)
    sign, _ = np.linalg.slogdet(scatter)
    if sign <= 0 or np.linalg.eigvalsh(scatter)[0] <= 0:
        raise _exact_fit_error(X, subset)
    d2 = mahalanobis_squared(X, center, scatter)
    new = np.sort(np.argsort(d2, kind="stable")[:h])
    _, new_scatter = _subset_fit(X, new)
    return new, float(np.linalg.det(new_scatter))


def _batch_subset_fit(X, subs):
    """Means, covariances and log-determinants of many index subsets."""
    pts = X[subs]  # (S, k, p)
    k = subs.shape[1]
    centers = pts.mean(axis=1)
    diff = pts - centers[:, None, :]
    covs = np.einsum("skp,skq->spq", diff, diff) / (k - 1)
    signs, logdets = np.linalg.slogdet(covs)
    logdets = np.where(signs > 0, logdets, -np.inf)
    return centers, covs, logdets


def _batch_select_h(X, centers, covs, h):
    """For each (center, cov) fit, the h nearest cases by Mahalanobis."""
    inv = np.linalg.inv(covs)
    Y = X[None, :, :] - centers[:, None, :]
    d2 = np.einsum("smp,spq,smq->sm", Y, inv, Y)
    order = np.argsort(d2, axis=1, kind="stable")[:, :h]
    return np.sort(order, axis=1)


def _initial_h_subsets(X, h, n_starts, rng):
    """FastMCD-style starts: random (p+1)-point fits, enlarged while
    singular, each concentrated once into an h-subset."""
    m, p = X.shape
    keys = rng.random((n_starts, m))
    seeds = np.argsort(keys, axis=1, kind="stable")[:, : p + 1]
    centers = np.empty((n_starts, p))
    covs = np.empty((n_starts, p, p))
    for s in range(n_starts):
        idx = list(seeds[s])
        while True:
            c, S = _subset_fit(X, np.array(idx))
            sign, _ = np.linalg.slogdet(S)
            if sign > 0 and np.linalg.eigvalsh(S)[0] > 0:
                break
            if len(idx) == m:
                raise _exact_fit_error(X, np.arange(m))
            rest = np.setdiff1d(np.arange(m), idx)
            idx.append(int(rng.choice(rest)))
        centers[s], covs[s] = c, S
    return _batch_select_h(X, centers, covs, h)


def fast_mcd(X, config: EstimatorConfig | None = None) -> LocationScatter:
    """Reweighted MCD location/scatter by random-start concentration.

    Runs ``n_starts`` random (p+1)-point starts, two concentration steps
    each, full convergence on the ``n_keep`` best, scales the winning
    h-subset covariance by the consistency factor, then performs one
    reweighting pass at the ``reweight_quantile`` chi-squared cutoff.
    Deterministic given (data, config).
    """
    if config is None:
        config = EstimatorConfig()
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ShapeError("X must be 2-d")
    m, p = X.shape
    h = math.ceil(config.alpha * m)
    if h <= p:
        raise ConfigurationError(f"h = {h} must exceed p = {p}")
    if m < 2 * (p + 1):
        raise DegenerateClassError(f"need at least {2 * (p + 1)} cases, got {m}")

    rng = np.random.default_rng(config.seed)
    det_floor = 1e-12 * _exact_fit_scale(X)

    subs = _initial_h_subsets(X, h, config.n_starts, rng)
    logdets = None
    for _ in range(2):
        centers, covs, logdets = _batch_subset_fit(X, subs)
        if np.any(~np.isfinite(logdets)):
            raise _exact_fit_error(X, subs[int(np.argmin(logdets))])
        subs = _batch_select_h(X, centers, covs, h)
    _, _, logdets = _batch_subset_fit(X, subs)

    keep = np.argsort(logdets, kind="stable")[: config.n_keep]
    best_subset, best_logdet = None, np.inf
    for s in keep:
        subset = subs[s]
        _, scatter = _subset_fit(X, subset)
        sign, ld = np.linalg.slogdet(scatter)
        if sign <= 0:
            raise _exact_fit_error(X, subset)
        for _ in range(config.max_csteps):
            new, det = c_step(X, subset)
            if det <= det_floor:
                raise _exact_fit_error(X, new)
            new_ld = math.log(det)
            if np.array_equal(new, subset) or ld - new_ld <= config.convergence_tol * abs(ld):
                subset, ld = new, new_ld
                break
            subset, ld = new, new_ld
        if ld < best_logdet:
            best_logdet, best_subset = ld, subset

    raw_center, raw_scatter = _subset_fit(X, best_subset)
    raw_scatter = raw_scatter * consistency_factor(config.alpha, p)

    # reweighting pass
    d = np.sqrt(mahalanobis_squared(X, raw_center, raw_scatter))
    cutoff = math.sqrt(chi2_quantile(p, config.reweight_quantile))
    w = d <= cutoff
    if w.sum() < p + 1:  # pathological; keep the raw estimate
        return LocationScatter(raw_center, raw_scatter, method="mcd_raw",
                               h_subset=best_subset, alpha=config.alpha)
    Xw = X[w]
    center = Xw.mean(axis=0)
    scatter = np.atleast_2d(np.cov(Xw, rowvar=False, ddof=1))
    scatter = scatter * consistency_factor(config.reweight_quantile, p)
    return LocationScatter(
        center,
        scatter,
        method="mcd_reweighted",
        h_subset=best_subset,
        weights=w.astype(int),
        alpha=config.alpha,
    )


def exact_mcd(X, alpha: float, max_subsets: int = 10**6) -> LocationScatter:
    """MCD by exhaustive enumeration of all h-subsets.

    Returns the consistency-scaled minimizer (no reweighting). Intended for
    small instances; refuses when C(m, h) exceeds ``max_subsets``.
    """
    X = np.asarray(X, dtype=float)
    m, p = X.shape
    if not 0.5 <= alpha <= 1.0:
        raise ConfigurationError(f"alpha must lie in [0.5, 1], got {alpha}")
    h = math.ceil(alpha * m)
    if h <= p:
        raise ConfigurationError(f"h = {h} must exceed p = {p}")
    n_subsets = math.comb(m, h)
    if n_subsets > max_subsets:
        raise ConfigurationError(
            f"C({m}, {h}) = {n_subsets} subsets exceeds the enumeration limit {max_subsets}"
        )
    det_floor = 1e-12 * _exact_fit_scale(X)
    best_det, best_subset = np.inf, None
    for comb in combinations(range(m), h):
        subset = np.array(comb)
        _, scatter = _subset_fit(X, subset)
        det = float(np.linalg.det(scatter))
        if det < best_det:
            best_det, best_subset = det, subset
    if best_det <= det_floor:
        raise _exact_fit_error(X, best_subset)
    center, scatter = _subset_fit(X, best_subset)
    scatter = scatter * consistency_factor(alpha, p)
    return LocationScatter(center, scatter, method="exact_mcd",
                           h_subset=best_subset, alpha=alpha)
