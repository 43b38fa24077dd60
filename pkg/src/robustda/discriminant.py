"""Classical and robust linear/quadratic discriminant analysis."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .data import LabeledDataset, check_matrix, write_text_atomic
from .errors import ConfigurationError, DegenerateClassError, ShapeError
from .estimators import (
    EstimatorConfig,
    LocationScatter,
    chi2_quantile,
    classical_moments,
    exact_mcd,
    fast_mcd,
    mahalanobis_squared,
    pooled_covariance,
)

MODEL_FORMAT = "robustda-model"
MODEL_VERSION = 1

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass
class DASpec:
    """Selector for the four discriminant variants (CLDA/CQDA/RLDA/RQDA)."""

    rule: str = "quadratic"            # "linear" | "quadratic"
    estimation: str = "robust"         # "classical" | "robust"
    estimator_config: EstimatorConfig = field(default_factory=EstimatorConfig)
    outlier_cutoff_prob: float = 0.99
    engine: str = "fastmcd"            # "fastmcd" | "exact" (robust only)

    def __post_init__(self):
        if self.rule not in ("linear", "quadratic"):
            raise ConfigurationError(f"unknown rule {self.rule!r}")
        if self.estimation not in ("classical", "robust"):
            raise ConfigurationError(f"unknown estimation {self.estimation!r}")
        if not 0.0 < self.outlier_cutoff_prob < 1.0:
            raise ConfigurationError("outlier_cutoff_prob must lie in (0, 1)")
        if self.engine not in ("fastmcd", "exact"):
            raise ConfigurationError(f"unknown engine {self.engine!r}")


@dataclass
class DAModel:
    """A fitted discriminant model.

    Per-class location/scatter estimates are always stored; for the linear
    rule the pooled scatter drives scores, densities and distances.
    Immutable after fitting and safe for concurrent prediction.
    """

    spec: DASpec
    class_names: list[str]
    class_estimates: list[LocationScatter]
    priors: np.ndarray
    counts: np.ndarray          # n_g (classical) or unflagged ñ_g (robust)
    pooled_scatter: np.ndarray | None = None
    pooled_log_det: float | None = None

    def __post_init__(self):
        self.priors = np.asarray(self.priors, dtype=float)
        self.counts = np.asarray(self.counts, dtype=int)
        if np.any(self.priors <= 0) or abs(self.priors.sum() - 1.0) > 1e-12:
            raise ConfigurationError("priors must be positive and sum to 1")
        if self.spec.rule == "linear":
            if self.pooled_scatter is None:
                raise ConfigurationError("linear model requires a pooled scatter")
            self.pooled_scatter = np.asarray(self.pooled_scatter, dtype=float)
            if self.pooled_log_det is None:
                sign, ld = np.linalg.slogdet(self.pooled_scatter)
                if sign <= 0:
                    raise DegenerateClassError("pooled scatter is singular")
                self.pooled_log_det = float(ld)

    @property
    def G(self) -> int:
        return len(self.class_names)

    @property
    def p(self) -> int:
        return self.class_estimates[0].p

    def class_cov(self, g: int) -> tuple[np.ndarray, float]:
        """(scatter, log_det) used for class g under this rule (1-based g)."""
        if self.spec.rule == "linear":
            return self.pooled_scatter, self.pooled_log_det
        est = self.class_estimates[g - 1]
        return est.scatter, est.log_det

    def distance_cutoff(self) -> float:
        return math.sqrt(chi2_quantile(self.p, self.spec.outlier_cutoff_prob))


@dataclass
class Prediction:
    """Per-case output: scores and robust distances to every class, the
    argmax class, and the all-distances overall-outlier flag."""

    scores: np.ndarray
    distances: np.ndarray
    predicted: int            # 1-based class index
    overall_outlier: bool


# ---------------------------------------------------------------------------
# scores

def quadratic_score(x, est: LocationScatter, prior: float) -> float:
    """-1/2 ln|S| - 1/2 (x-m)' S^-1 (x-m) + ln(prior)."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != est.p:
        raise ShapeError(f"point has dimension {x.size}, estimate has {est.p}")
    d2 = float(mahalanobis_squared(x[None, :], est.center, est.scatter)[0])
    return -0.5 * est.log_det - 0.5 * d2 + math.log(prior)


def linear_score(x, center, common_scatter, prior: float) -> float:
    """m' S^-1 x - 1/2 m' S^-1 m + ln(prior) with the common scatter S."""
    x = np.asarray(x, dtype=float).ravel()
    center = np.asarray(center, dtype=float).ravel()
    w = np.linalg.solve(common_scatter, center)
    return float(w @ x - 0.5 * w @ center + math.log(prior))


def score_matrix(model: DAModel, X) -> np.ndarray:
    """Discriminant scores, one row per case, one column per class."""
    X = check_matrix(X)
    n = X.shape[0]
    out = np.empty((n, model.G))
    if model.spec.rule == "quadratic":
        for g in range(1, model.G + 1):
            est = model.class_estimates[g - 1]
            d2 = mahalanobis_squared(X, est.center, est.scatter)
            out[:, g - 1] = -0.5 * est.log_det - 0.5 * d2 + math.log(model.priors[g - 1])
    else:
        S = model.pooled_scatter
        for g in range(1, model.G + 1):
            mu = model.class_estimates[g - 1].center
            w = np.linalg.solve(S, mu)
            out[:, g - 1] = X @ w - 0.5 * mu @ w + math.log(model.priors[g - 1])
    return out


def distance_matrix(model: DAModel, X) -> np.ndarray:
    """Robust (or classical) distances of each case to every class."""
    X = check_matrix(X)
    out = np.empty((X.shape[0], model.G))
    for g in range(1, model.G + 1):
        cov, _ = model.class_cov(g)
        mu = model.class_estimates[g - 1].center
        out[:, g - 1] = np.sqrt(mahalanobis_squared(X, mu, cov))
    return out


def log_numerator_matrix(model: DAModel, X) -> np.ndarray:
    """ln(prior_g) + ln(phi(x; mu_g, S_g)) per case and class."""
    X = check_matrix(X)
    p = model.p
    out = np.empty((X.shape[0], model.G))
    for g in range(1, model.G + 1):
        cov, log_det = model.class_cov(g)
        mu = model.class_estimates[g - 1].center
        d2 = mahalanobis_squared(X, mu, cov)
        out[:, g - 1] = (
            math.log(model.priors[g - 1]) - 0.5 * (p * _LOG_2PI + log_det + d2)
        )
    return out


def predicted_labels(scores: np.ndarray) -> np.ndarray:
    """Argmax class per row, ties broken by the lowest class index."""
    return np.argmax(scores, axis=1) + 1


# ---------------------------------------------------------------------------
# fitting

def _fit_class_estimate(Xg, spec: DASpec, class_name: str) -> LocationScatter:
    try:
        if spec.estimation == "classical":
            return classical_moments(Xg)
        if spec.engine == "exact":
            return exact_mcd(Xg, spec.estimator_config.alpha)
        return fast_mcd(Xg, spec.estimator_config)
    except DegenerateClassError as exc:
        raise DegenerateClassError(f"class {class_name!r}: {exc}") from exc


def fit(data: LabeledDataset, spec: DASpec | None = None) -> DAModel:
    """Fit a discriminant model.

    Classical estimation uses per-class means/covariances and priors n_g/n.
    Robust estimation fits MCD per class, flags cases whose robust distance
    to their own class exceeds sqrt(chi2_{p, cutoff}), and uses unflagged
    counts for the priors (and for the pooled weights under the linear rule).
    """
    spec = spec or DASpec()
    estimates = [
        _fit_class_estimate(data.features[data.class_rows(g)], spec,
                            data.class_names[g - 1])
        for g in range(1, data.G + 1)
    ]
    sizes = data.class_sizes()

    if spec.estimation == "classical":
        counts = sizes
    else:
        cutoff2 = chi2_quantile(data.p, spec.outlier_cutoff_prob)
        counts = np.empty(data.G, dtype=int)
        for g in range(1, data.G + 1):
            est = estimates[g - 1]
            d2 = mahalanobis_squared(
                data.features[data.class_rows(g)], est.center, est.scatter
            )
            counts[g - 1] = int(np.sum(d2 <= cutoff2))
        if np.any(counts == 0):
            bad = data.class_names[int(np.argmin(counts))]
            raise DegenerateClassError(f"class {bad!r} has no unflagged cases")

    priors = counts / counts.sum()

    pooled = None
    if spec.rule == "linear":
        pooled = pooled_covariance(
            [(int(c), est.scatter) for c, est in zip(counts, estimates)]
        )

    return DAModel(
        spec=spec,
        class_names=list(data.class_names),
        class_estimates=estimates,
        priors=priors,
        counts=counts,
        pooled_scatter=pooled,
    )


# ---------------------------------------------------------------------------
# prediction

def predict_batch(model: DAModel, X) -> list[Prediction]:
    """Elementwise prediction for the rows of X (or a LabeledDataset)."""
    if isinstance(X, LabeledDataset):
        X = X.features
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ShapeError("X must be 2-d")
    if X.shape[0] == 0:
        return []
    if X.shape[1] != model.p:
        raise ShapeError(f"data has p = {X.shape[1]}, model has p = {model.p}")
    scores = score_matrix(model, X)
    dists = distance_matrix(model, X)
    labels = predicted_labels(scores)
    cutoff = model.distance_cutoff()
    outliers = np.all(dists > cutoff, axis=1)
    return [
        Prediction(scores[i], dists[i], int(labels[i]), bool(outliers[i]))
        for i in range(X.shape[0])
    ]


def predict(model: DAModel, x) -> Prediction:
    """Scores, distances, argmax class and overall-outlier flag for one case."""
    x = np.asarray(x, dtype=float).ravel()
    return predict_batch(model, x[None, :])[0]


# ---------------------------------------------------------------------------
# persistence

def model_to_dict(model: DAModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "spec": {
            "rule": model.spec.rule,
            "estimation": model.spec.estimation,
            "outlier_cutoff_prob": model.spec.outlier_cutoff_prob,
            "engine": model.spec.engine,
            "estimator_config": vars(model.spec.estimator_config),
        },
        "class_names": model.class_names,
        "priors": model.priors.tolist(),
        "counts": model.counts.tolist(),
        "estimates": [est.to_dict() for est in model.class_estimates],
        "pooled_scatter": (
            None if model.pooled_scatter is None
            else model.pooled_scatter.ravel().tolist()
        ),
    }


def model_from_dict(d: dict) -> DAModel:
    if d.get("format") != MODEL_FORMAT:
        raise ConfigurationError("not a robustda model document")
    if d.get("version") != MODEL_VERSION:
        raise ConfigurationError(f"unsupported model version {d.get('version')}")
    sd = d["spec"]
    spec = DASpec(
        rule=sd["rule"],
        estimation=sd["estimation"],
        estimator_config=EstimatorConfig(**sd["estimator_config"]),
        outlier_cutoff_prob=sd["outlier_cutoff_prob"],
        engine=sd.get("engine", "fastmcd"),
    )
    estimates = [LocationScatter.from_dict(e) for e in d["estimates"]]
    p = estimates[0].p
    pooled = d["pooled_scatter"]
    return DAModel(
        spec=spec,
        class_names=list(d["class_names"]),
        class_estimates=estimates,
        priors=np.array(d["priors"]),
        counts=np.array(d["counts"]),
        pooled_scatter=None if pooled is None else np.array(pooled).reshape(p, p),
    )


def save_model(model: DAModel, path):
    write_text_atomic(path, json.dumps(model_to_dict(model), indent=2) + "\n")


def load_model(path) -> DAModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# sklearn-style facade

class DiscriminantClassifier(BaseEstimator, ClassifierMixin):
    """Scikit-learn style estimator wrapping the discriminant model.

    Parameters mirror DASpec/EstimatorConfig. After ``fit``, ``model_``
    holds the underlying DAModel and ``classes_`` the sorted class labels.
    """

    def __init__(self, rule="quadratic", estimation="robust", alpha=0.75,
                 n_starts=500, n_keep=10, max_csteps=100,
                 outlier_cutoff_prob=0.99, engine="fastmcd", random_state=0):
        self.rule = rule
        self.estimation = estimation
        self.alpha = alpha
        self.n_starts = n_starts
        self.n_keep = n_keep
        self.max_csteps = max_csteps
        self.outlier_cutoff_prob = outlier_cutoff_prob
        self.engine = engine
        self.random_state = random_state

    def _spec(self) -> DASpec:
        return DASpec(
            rule=self.rule,
            estimation=self.estimation,
            estimator_config=EstimatorConfig(
                alpha=self.alpha,
                n_starts=self.n_starts,
                n_keep=self.n_keep,
                max_csteps=self.max_csteps,
                seed=self.random_state,
            ),
            outlier_cutoff_prob=self.outlier_cutoff_prob,
            engine=self.engine,
        )

    def fit(self, X, y):
        X = check_matrix(X)
        y = np.asarray(y)
        if y.shape[0] != X.shape[0]:
            raise ShapeError("X and y have different lengths")
        self.classes_ = np.unique(y)
        names = [str(c) for c in self.classes_]
        labels = np.searchsorted(self.classes_, y) + 1
        dataset = LabeledDataset(X, labels, names)
        self.model_ = fit(dataset, self._spec())
        return self

    def _scores(self, X):
        if not hasattr(self, "model_"):
            raise ConfigurationError("classifier is not fitted")
        return score_matrix(self.model_, check_matrix(X))

    def decision_function(self, X):
        scores = self._scores(X)
        return scores[:, 1] - scores[:, 0] if len(self.classes_) == 2 else scores

    def predict(self, X):
        return self.classes_[predicted_labels(self._scores(X)) - 1]

    def predict_proba(self, X):
        ln = log_numerator_matrix(self.model_, check_matrix(X))
        ln -= ln.max(axis=1, keepdims=True)
        num = np.exp(ln)
        return num / num.sum(axis=1, keepdims=True)

    def outlier_mask(self, X):
        """True where a case's distance to every class exceeds the cutoff."""
        dists = distance_matrix(self.model_, check_matrix(X))
        return np.all(dists > self.model_.distance_cutoff(), axis=1)
