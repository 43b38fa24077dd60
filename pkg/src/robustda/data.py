"""Datasets, CSV ingestion and the synthetic two-Gaussian contamination generator."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, IngestionError

CLEAN = "clean"
MISLABELED = "mislabeled"
REPLACED = "replaced"


def check_matrix(X, name="X"):
    """Validate and return a 2-d float array with finite entries."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise IngestionError(f"{name} must be a 2-d array, got ndim={X.ndim}")
    if not np.all(np.isfinite(X)):
        raise IngestionError(f"{name} contains non-finite entries")
    return X


@dataclass
class LabeledDataset:
    """An n x p feature matrix with per-case class labels.

    Labels are integers in {1..G}; ``class_names[g-1]`` is the display name
    of class g. Instances are immutable by convention and safe to share.
    """

    features: np.ndarray
    labels: np.ndarray
    class_names: list[str]
    feature_names: list[str] | None = None

    def __post_init__(self):
        self.features = check_matrix(self.features, "features")
        self.labels = np.asarray(self.labels, dtype=int)
        if self.labels.ndim != 1 or len(self.labels) != self.features.shape[0]:
            raise IngestionError("labels must be one integer per feature row")
        G = len(self.class_names)
        if G == 0:
            raise IngestionError("at least one class is required")
        present = np.unique(self.labels)
        if present.min(initial=1) < 1 or present.max(initial=G) > G:
            raise IngestionError(f"labels must lie in 1..{G}")
        if len(present) != G:
            missing = sorted(set(range(1, G + 1)) - set(present.tolist()))
            raise IngestionError(f"classes with no cases: {missing}")
        if self.feature_names is None:
            self.feature_names = [f"x{j+1}" for j in range(self.features.shape[1])]
        elif len(self.feature_names) != self.features.shape[1]:
            raise IngestionError("feature_names length must equal p")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    @property
    def G(self) -> int:
        return len(self.class_names)

    def class_rows(self, g: int) -> np.ndarray:
        """Row indices of class g (1-based class index)."""
        return np.flatnonzero(self.labels == g)

    def class_sizes(self) -> np.ndarray:
        return np.array([len(self.class_rows(g)) for g in range(1, self.G + 1)])


def load_csv(path, label_column="label") -> LabeledDataset:
    """Read a comma-separated file with a header row into a LabeledDataset.

    All columns except ``label_column`` must be numeric. Class names are the
    distinct label strings in order of first appearance.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file") from None
        if label_column not in header:
            raise ConfigurationError(
                f"{path}: label column {label_column!r} not in header {header}"
            )
        label_idx = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != label_idx]
        rows, labels_raw = [], []
        for rownum, rec in enumerate(reader, start=2):
            if len(rec) != len(header):
                raise IngestionError(
                    f"{path}: row {rownum} has {len(rec)} fields, expected {len(header)}"
                )
            vals = []
            for i, cell in enumerate(rec):
                if i == label_idx:
                    labels_raw.append(cell)
                    continue
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise IngestionError(
                        f"{path}: row {rownum}, column {header[i]!r}: "
                        f"cannot parse {cell!r} as a number"
                    ) from None
            rows.append(vals)
    if not rows:
        raise IngestionError(f"{path}: no data rows")
    class_names: list[str] = []
    labels = []
    for s in labels_raw:
        if s not in class_names:
            class_names.append(s)
        labels.append(class_names.index(s) + 1)
    return LabeledDataset(np.array(rows), np.array(labels), class_names, feature_names)


def save_csv(dataset: LabeledDataset, path, label_column="label", provenance=None):
    """Write a dataset to CSV at full round-trip float precision.

    ``provenance``, when given, is appended as an extra string column.
    """
    header = list(dataset.feature_names) + [label_column]
    if provenance is not None:
        header.append("provenance")
    lines = [",".join(header)]
    for i in range(dataset.n):
        cells = [repr(float(v)) for v in dataset.features[i]]
        cells.append(dataset.class_names[dataset.labels[i] - 1])
        if provenance is not None:
            cells.append(provenance[i])
        lines.append(",".join(cells))
    write_text_atomic(path, "\n".join(lines) + "\n")


def write_text_atomic(path, text):
    """Write text to path via a temp file and rename, so readers never see
    a partial file."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _check_cov(cov, name):
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ConfigurationError(f"{name} must be a square matrix")
    if not np.allclose(cov, cov.T):
        raise ConfigurationError(f"{name} must be symmetric")
    if np.linalg.eigvalsh(cov)[0] <= 0:
        raise ConfigurationError(f"{name} must be positive definite")
    return cov


@dataclass
class SyntheticConfig:
    """Parameters of the two-Gaussian contamination experiment.

    Class 1 and class 2 are bivariate Gaussians. Contamination consists of
    label noise (swap the labels of the cases nearest the opposing class
    center) and measurement noise (replace cases by draws from tight
    outlier clusters).
    """

    n1: int = 80
    n2: int = 100
    mean1: tuple = (0.0, 0.0)
    mean2: tuple = (3.5, 2.0)
    cov1: tuple = ((1.0, 0.4), (0.4, 1.0))
    cov2: tuple = ((1.5, -0.6), (-0.6, 1.2))
    swap1: int = 4
    swap2: int = 4
    replace1: int = 5
    replace2: int = 8
    outlier_center1: tuple = (-3.0, 6.0)
    outlier_center2: tuple = (-1.0, -5.0)
    outlier_spread: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.n1 <= 0 or self.n2 <= 0:
            raise ConfigurationError("class sizes must be positive")
        for k in ("swap1", "swap2", "replace1", "replace2"):
            if getattr(self, k) < 0:
                raise ConfigurationError(f"{k} must be nonnegative")
        if self.swap1 + self.replace1 > self.n1 or self.swap2 + self.replace2 > self.n2:
            raise ConfigurationError("noise counts exceed class sizes")
        self.mean1 = np.asarray(self.mean1, dtype=float)
        self.mean2 = np.asarray(self.mean2, dtype=float)
        self.cov1 = _check_cov(self.cov1, "cov1")
        self.cov2 = _check_cov(self.cov2, "cov2")
        self.outlier_center1 = np.asarray(self.outlier_center1, dtype=float)
        self.outlier_center2 = np.asarray(self.outlier_center2, dtype=float)
        if self.outlier_spread <= 0:
            raise ConfigurationError("outlier_spread must be positive")


def generate_contaminated_pair(config: SyntheticConfig):
    """Generate the clean dataset and its contaminated counterpart.

    Returns ``(clean, contaminated, provenance)`` where provenance is a
    string per case of the contaminated set: "clean", "mislabeled" (label
    swapped) or "replaced" (feature row replaced by an outlier-cluster
    draw). Pure function of the config, including its seed.
    """
    rng = np.random.default_rng(config.seed)
    p = len(config.mean1)
    X1 = rng.multivariate_normal(config.mean1, config.cov1, size=config.n1)
    X2 = rng.multivariate_normal(config.mean2, config.cov2, size=config.n2)
    X = np.vstack([X1, X2])
    y = np.concatenate([np.ones(config.n1, int), np.full(config.n2, 2)])
    names = ["1", "2"]
    clean = LabeledDataset(X.copy(), y.copy(), list(names))

    n = config.n1 + config.n2
    provenance = np.array([CLEAN] * n, dtype=object)
    Xc, yc = X.copy(), y.copy()

    # label noise: random cases of each class get the other class's label,
    # so the mislabeled cases remain typical members of their true class
    for g, k in ((1, config.swap1), (2, config.swap2)):
        if k == 0:
            continue
        idx = np.flatnonzero(y == g)
        chosen = np.sort(rng.choice(idx, size=k, replace=False))
        yc[chosen] = 3 - g
        provenance[chosen] = MISLABELED

    # measurement noise: replace unswapped cases by outlier-cluster draws
    for g, center, k in ((1, config.outlier_center1, config.replace1),
                         (2, config.outlier_center2, config.replace2)):
        if k == 0:
            continue
        eligible = np.flatnonzero((y == g) & (provenance == CLEAN))
        chosen = np.sort(rng.choice(eligible, size=k, replace=False))
        Xc[chosen] = center + config.outlier_spread * rng.standard_normal((k, p))
        provenance[chosen] = REPLACED

    contaminated = LabeledDataset(Xc, yc, list(names))
    return clean, contaminated, [str(s) for s in provenance]
