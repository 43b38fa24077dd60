"""Per-case diagnostics: posteriors, PAC, silhouette widths, farness,
confusion matrices with an outlier class, and chi-squared Q-Q data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset
from .discriminant import (
    DAModel,
    distance_matrix,
    log_numerator_matrix,
    predicted_labels,
    score_matrix,
)
from .errors import ConfigurationError, ShapeError
from .estimators import chi2_quantile

OUTLIER_LABEL = "outliers"


# ---------------------------------------------------------------------------
# posteriors / PAC / silhouette

def posterior_matrix(model: DAModel, X) -> np.ndarray:
    """Class posteriors per row, computed in log space (rows sum to 1)."""
    ln = log_numerator_matrix(model, X)
    ln = ln - ln.max(axis=1, keepdims=True)
    num = np.exp(ln)
    return num / num.sum(axis=1, keepdims=True)


def posteriors(model: DAModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    return posterior_matrix(model, x[None, :])[0]


def pac(posterior: np.ndarray, given: int) -> float:
    """Conditional posterior of the best alternative class:
    max_{g != given} P(g|x) / (P(given|x) + max_{g != given} P(g|x))."""
    posterior = np.asarray(posterior, dtype=float).ravel()
    G = posterior.size
    if G < 2:
        raise ValueError("PAC requires at least two classes")
    if not 1 <= given <= G:
        raise ValueError(f"given class {given} out of range 1..{G}")
    own = posterior[given - 1]
    alt = np.max(np.delete(posterior, given - 1))
    return float(alt / (own + alt))


def _pac_from_log_numerators(ln: np.ndarray, given: np.ndarray) -> np.ndarray:
    """PAC straight from log numerators; immune to posterior underflow.

    pac = sigmoid(max_{g != given} ln_g - ln_given)."""
    n, G = ln.shape
    if G < 2:
        raise ValueError("PAC requires at least two classes")
    own = ln[np.arange(n), given - 1]
    masked = ln.copy()
    masked[np.arange(n), given - 1] = -np.inf
    alt = masked.max(axis=1)
    z = np.clip(own - alt, -745.0, 745.0)
    return 1.0 / (1.0 + np.exp(z))


def silhouette(pac_value: float) -> float:
    """Silhouette width 1 - 2*PAC, in [-1, 1]."""
    if not 0.0 <= pac_value <= 1.0:
        raise ValueError(f"PAC must lie in [0, 1], got {pac_value}")
    return 1.0 - 2.0 * pac_value


# ---------------------------------------------------------------------------
# farness

@dataclass
class FarnessModel:
    """Per-class empirical CDF of within-class robust distances.

    ``class_distances[g-1]`` holds the sorted unflagged training distances
    of class g, or None when that class has too few unflagged cases.
    Evaluation uses Hazen plotting positions (rank - 0.5)/n with linear
    interpolation, clamped to [0.5/n, 1 - 0.5/n].
    """

    class_distances: list
    cutoff_prob: float = 0.99

    def available(self, g: int) -> bool:
        return self.class_distances[g - 1] is not None

    def unavailable_classes(self) -> list[int]:
        return [g + 1 for g, d in enumerate(self.class_distances) if d is None]


def fit_farness(model: DAModel, data: LabeledDataset, min_class_size: int = 5,
                cutoff_prob: float | None = None) -> FarnessModel:
    """Estimate each class's distance CDF from its unflagged training cases.

    Cases whose robust distance to their own class exceeds the model's
    cutoff are excluded, so gross outliers do not distort the estimate.
    """
    cutoff = model.distance_cutoff()
    dists = distance_matrix(model, data.features)
    per_class = []
    for g in range(1, data.G + 1):
        idx = data.class_rows(g)
        own = dists[idx, g - 1]
        kept = np.sort(own[own <= cutoff])
        per_class.append(kept if kept.size >= min_class_size else None)
    return FarnessModel(per_class,
                        cutoff_prob or model.spec.outlier_cutoff_prob)


def farness_from_distances(distances, cutoff_prob: float = 0.99) -> FarnessModel:
    """Build a FarnessModel directly from per-class distance samples."""
    per_class = [np.sort(np.asarray(d, dtype=float)) for d in distances]
    return FarnessModel(per_class, cutoff_prob)


def farness(fm: FarnessModel, g: int, rd) -> np.ndarray | float:
    """Estimated P(RD(X) <= rd) for X drawn from class g."""
    d = fm.class_distances[g - 1]
    if d is None:
        raise ConfigurationError(f"farness unavailable for class {g}")
    n = d.size
    pos = (np.arange(1, n + 1) - 0.5) / n
    out = np.interp(rd, d, pos, left=pos[0], right=pos[-1])
    return float(out) if np.isscalar(rd) else out


def farness_matrix(fm: FarnessModel, dists: np.ndarray) -> np.ndarray:
    """Farness of each case (row) to every class with an available CDF;
    unavailable classes yield NaN columns."""
    out = np.full(dists.shape, np.nan)
    for g in range(1, dists.shape[1] + 1):
        if fm.available(g):
            out[:, g - 1] = farness(fm, g, dists[:, g - 1])
    return out


def farness_outlier_flags(fm: FarnessModel, dists: np.ndarray) -> np.ndarray:
    """Flag cases whose farness to all (available) classes exceeds the
    cutoff probability."""
    F = farness_matrix(fm, dists)
    valid = ~np.isnan(F)
    above = np.where(valid, F > fm.cutoff_prob, True)
    return np.all(above, axis=1) & valid.any(axis=1)


# ---------------------------------------------------------------------------
# per-case diagnostics

@dataclass
class CaseDiagnostics:
    """Everything the plots need about one training case."""

    given: int
    predicted: int
    posteriors: np.ndarray
    pac: float
    silhouette: float
    rd_given: float
    rd_predicted: float
    distances: np.ndarray
    farness: np.ndarray
    outlier_distance: bool
    outlier_farness: bool


def compute_diagnostics(model: DAModel, data: LabeledDataset,
                        fm: FarnessModel | None = None) -> list[CaseDiagnostics]:
    """Posteriors, PAC, silhouette, distances, farness and flags per case."""
    if data.p != model.p:
        raise ShapeError(f"data has p = {data.p}, model has p = {model.p}")
    if fm is None:
        fm = fit_farness(model, data)
    scores = score_matrix(model, data.features)
    ln = log_numerator_matrix(model, data.features)
    post = posterior_matrix(model, data.features)
    dists = distance_matrix(model, data.features)
    labels = predicted_labels(scores)
    pacs = _pac_from_log_numerators(ln, data.labels)
    cutoff = model.distance_cutoff()
    dist_out = np.all(dists > cutoff, axis=1)
    far = farness_matrix(fm, dists)
    far_out = farness_outlier_flags(fm, dists)
    rows = np.arange(data.n)
    rd_given = dists[rows, data.labels - 1]
    rd_pred = dists[rows, labels - 1]
    return [
        CaseDiagnostics(
            given=int(data.labels[i]),
            predicted=int(labels[i]),
            posteriors=post[i],
            pac=float(pacs[i]),
            silhouette=1.0 - 2.0 * float(pacs[i]),
            rd_given=float(rd_given[i]),
            rd_predicted=float(rd_pred[i]),
            distances=dists[i],
            farness=far[i],
            outlier_distance=bool(dist_out[i]),
            outlier_farness=bool(far_out[i]),
        )
        for i in range(data.n)
    ]


# ---------------------------------------------------------------------------
# confusion matrices and accuracy

@dataclass
class ConfusionMatrix:
    """Counts of (given, predicted) pairs; an optional extra last column
    collects the overall outliers."""

    counts: np.ndarray
    row_labels: list[str]
    col_labels: list[str]

    @property
    def has_outlier_column(self) -> bool:
        return self.counts.shape[1] == self.counts.shape[0] + 1

    def to_text(self) -> str:
        width = max(
            [len(s) for s in self.row_labels + self.col_labels + ["given"]]
            + [len(str(int(c))) for c in self.counts.ravel()]
        ) + 2
        lines = ["".join(s.rjust(width) for s in ["given \\ pred"] + self.col_labels)]
        for i, row in enumerate(self.counts):
            cells = [self.row_labels[i]] + [str(int(c)) for c in row]
            lines.append("".join(s.rjust(width) for s in cells))
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = [",".join(["given\\predicted"] + self.col_labels)]
        for i, row in enumerate(self.counts):
            lines.append(",".join([self.row_labels[i]] + [str(int(c)) for c in row]))
        return "\n".join(lines) + "\n"


def confusion(model: DAModel, data: LabeledDataset, with_outlier_class=False,
              farness_model: FarnessModel | None = None) -> ConfusionMatrix:
    """Confusion matrix of given vs predicted classes.

    With ``with_outlier_class``, overall outliers are routed to an extra
    column instead of their predicted class; the outlier rule is
    distance-based by default, or farness-based when ``farness_model``
    is supplied.
    """
    scores = score_matrix(model, data.features)
    labels = predicted_labels(scores)
    G = model.G
    if with_outlier_class:
        dists = distance_matrix(model, data.features)
        if farness_model is not None:
            out = farness_outlier_flags(farness_model, dists)
        else:
            out = np.all(dists > model.distance_cutoff(), axis=1)
        counts = np.zeros((G, G + 1), dtype=int)
        for giv, pred, is_out in zip(data.labels, labels, out):
            counts[giv - 1, G if is_out else pred - 1] += 1
        cols = list(model.class_names) + [OUTLIER_LABEL]
    else:
        counts = np.zeros((G, G), dtype=int)
        for giv, pred in zip(data.labels, labels):
            counts[giv - 1, pred - 1] += 1
        cols = list(model.class_names)
    return ConfusionMatrix(counts, list(model.class_names), cols)


def accuracy(cm: ConfusionMatrix, exclude_outliers=False) -> float:
    """trace/total; with ``exclude_outliers`` the outlier column is removed
    from the denominator as well."""
    G = cm.counts.shape[0]
    correct = float(np.trace(cm.counts[:, :G]))
    total = float(cm.counts.sum())
    if exclude_outliers:
        if not cm.has_outlier_column:
            raise ConfigurationError("matrix has no outlier column to exclude")
        total -= float(cm.counts[:, G].sum())
    if total == 0:
        raise ConfigurationError("empty confusion matrix")
    return correct / total


# ---------------------------------------------------------------------------
# summaries and Q-Q data

def silhouette_summary(diags: list[CaseDiagnostics]):
    """Per-class and overall arithmetic means of the silhouette widths.

    Returns (per_class, overall) with per_class keyed by 1-based class index.
    """
    if not diags:
        raise ConfigurationError("no diagnostics to summarize")
    s = np.array([d.silhouette for d in diags])
    given = np.array([d.given for d in diags])
    per_class = {g: float(s[given == g].mean()) for g in np.unique(given)}
    return per_class, float(s.mean())


@dataclass
class QQData:
    """Chi-squared Q-Q pairs for squared distances, with the identity line
    and the 0.99 cutoff value."""

    theoretical: np.ndarray
    ordered: np.ndarray
    dof: int
    cutoff: float


def qq_data(squared_rds, dof: int, cutoff_prob: float = 0.99) -> QQData:
    """Pairs (chi2_dof quantile at (i - 0.5)/m, i-th order statistic)."""
    sq = np.asarray(squared_rds, dtype=float).ravel()
    if sq.size == 0:
        raise ConfigurationError("need at least one squared distance")
    if dof < 1:
        raise ValueError("dof must be >= 1")
    m = sq.size
    probs = (np.arange(1, m + 1) - 0.5) / m
    theo = np.array([chi2_quantile(dof, q) for q in probs])
    return QQData(theo, np.sort(sq), dof, chi2_quantile(dof, cutoff_prob))


# ---------------------------------------------------------------------------
# export

def diagnostics_csv(diags: list[CaseDiagnostics], class_names: list[str]) -> str:
    """One CSV row per case with all diagnostic quantities."""
    G = len(class_names)
    header = (
        ["case", "given", "predicted"]
        + [f"posterior_{c}" for c in class_names]
        + ["pac", "silhouette", "rd_given", "rd_predicted"]
        + [f"rd_{c}" for c in class_names]
        + [f"farness_{c}" for c in class_names]
        + ["outlier_distance", "outlier_farness"]
    )
    lines = [",".join(header)]
    for i, d in enumerate(diags):
        row = [str(i), class_names[d.given - 1], class_names[d.predicted - 1]]
        row += [repr(float(v)) for v in d.posteriors]
        row += [repr(d.pac), repr(d.silhouette), repr(d.rd_given), repr(d.rd_predicted)]
        row += [repr(float(v)) for v in d.distances]
        row += [repr(float(v)) for v in d.farness]
        row += [str(int(d.outlier_distance)), str(int(d.outlier_farness))]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
