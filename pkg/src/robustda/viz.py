"""Renderer-agnostic plot descriptions and a deterministic SVG emitter.

Each builder returns a PlotData value; ``render_svg`` turns it into a
standalone SVG 1.1 document and ``export_plot_csv`` into a CSV listing of
every plotted element. Rendering identical PlotData yields identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np
from scipy.stats import norm as _norm

from .data import LabeledDataset
from .diagnostics import (
    CaseDiagnostics,
    ConfusionMatrix,
    FarnessModel,
    QQData,
    farness,
    silhouette_summary,
)
from .discriminant import DAModel, distance_matrix, score_matrix
from .errors import PlotError
from .estimators import chi2_quantile

# Okabe-Ito colorblind-safe cycle; class 1 orange, class 2 blue.
CLASS_PALETTE = [
    "#E69F00", "#56B4E9", "#009E73", "#F0E442",
    "#0072B2", "#D55E00", "#CC79A7",
]
OUTLIER_GRAY = "#404040"
BAND_GRAY = "#DEDEDE"
LINE_GRAY = "#808080"
CURVE_RED = "#CC0000"

FARNESS_TICKS = (0.0, 0.5, 0.75, 0.9, 0.99, 1.0)


@dataclass
class PointSeries:
    x: list
    y: list
    colors: list          # per-point palette indices
    borders: list         # per-point black-border flags
    name: str = ""
    labels: list | None = None


@dataclass
class Rect:
    x: float
    y: float
    width: float
    height: float
    color: int
    name: str = ""


@dataclass
class Curve:
    x: list
    y: list
    color: int
    style: str = "solid"  # solid | dashed | dashdot
    name: str = ""


@dataclass
class Axis:
    label: str
    lo: float
    hi: float
    ticks: list            # (position, label) pairs
    transform: str | None = None


@dataclass
class PlotData:
    kind: str
    title: str
    palette: list
    x_axis: Axis
    y_axis: Axis
    points: list = field(default_factory=list)
    rects: list = field(default_factory=list)
    curves: list = field(default_factory=list)
    legend: list = field(default_factory=list)   # (label, palette index)

    def __post_init__(self):
        for axis in (self.x_axis, self.y_axis):
            if not (math.isfinite(axis.lo) and math.isfinite(axis.hi)):
                raise PlotError(f"axis {axis.label!r} has a non-finite range")


def _palette_for(G: int) -> list:
    colors = [CLASS_PALETTE[i % len(CLASS_PALETTE)] for i in range(G)]
    return colors + [OUTLIER_GRAY, BAND_GRAY, LINE_GRAY, CURVE_RED]


def _gray_idx(G):   # index of OUTLIER_GRAY in _palette_for(G)
    return G


def _band_idx(G):
    return G + 1


def _line_idx(G):
    return G + 2


def _red_idx(G):
    return G + 3


def _nice_ticks(lo: float, hi: float, n: int = 6) -> list:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        val = 0.0 if abs(v) < 1e-12 else v
        ticks.append((val, f"{val:g}"))
        v += step
    return ticks


def _pad_range(values, frac=0.05):
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = frac * (hi - lo)
    return lo - pad, hi + pad


def _axis(label, values, transform=None) -> Axis:
    lo, hi = _pad_range(values)
    return Axis(label, lo, hi, _nice_ticks(lo, hi), transform)


# ---------------------------------------------------------------------------
# plot builders

def score_score_plot(model: DAModel, data: LabeledDataset) -> PlotData:
    """Discriminant score of class 2 vs class 1, with the identity line
    that is the decision boundary. Two-class models only."""
    if model.G != 2:
        raise PlotError("the score-score plot is limited to two classes")
    scores = score_matrix(model, data.features)
    ds1, ds2 = scores[:, 0], scores[:, 1]
    both = np.concatenate([ds1, ds2])
    lo, hi = _pad_range(both)
    palette = _palette_for(2)
    pts = PointSeries(
        x=ds1.tolist(), y=ds2.tolist(),
        colors=(data.labels - 1).tolist(),
        borders=[False] * data.n, name="cases",
    )
    ident = Curve([lo, hi], [lo, hi], _line_idx(2), "solid", "identity")
    return PlotData(
        kind="score_score",
        title="Score-score plot",
        palette=palette,
        x_axis=Axis(f"score of class {model.class_names[0]}", lo, hi, _nice_ticks(lo, hi)),
        y_axis=Axis(f"score of class {model.class_names[1]}", lo, hi, _nice_ticks(lo, hi)),
        points=[pts],
        curves=[ident],
        legend=[(model.class_names[0], 0), (model.class_names[1], 1)],
    )


def mosaic_plot(cm: ConfusionMatrix) -> PlotData:
    """Stacked mosaic of a confusion matrix: column widths proportional to
    given-class sizes, stacked heights proportional to predicted counts,
    outlier class in dark gray. Zero cells are omitted."""
    counts = cm.counts
    total = counts.sum()
    if total == 0:
        raise PlotError("cannot draw a mosaic of an all-zero matrix")
    G = counts.shape[0]
    ncol = counts.shape[1]
    palette = _palette_for(G)
    rects = []
    x = 0.0
    xticks = []
    for i in range(G):
        rowsum = counts[i].sum()
        w = rowsum / total
        if rowsum > 0:
            y = 0.0
            for j in range(ncol):
                c = counts[i, j]
                if c == 0:
                    continue
                h = c / rowsum
                color = _gray_idx(G) if j == G else j
                rects.append(Rect(x, y, w, h, color, f"{cm.row_labels[i]}|{cm.col_labels[j]}"))
                y += h
        xticks.append((x + w / 2.0, cm.row_labels[i]))
        x += w
    legend = [(cm.col_labels[j], _gray_idx(G) if j == G else j) for j in range(ncol)]
    return PlotData(
        kind="mosaic",
        title="Stacked mosaic plot",
        palette=palette,
        x_axis=Axis("given class", 0.0, 1.0, xticks),
        y_axis=Axis("predicted fraction", 0.0, 1.0, _nice_ticks(0.0, 1.0)),
        rects=rects,
        legend=legend,
    )


def silhouette_plot(diags: list[CaseDiagnostics], class_names: list[str],
                    orientation: str = "horizontal") -> PlotData:
    """Silhouette widths as bars, grouped by given class and sorted by
    decreasing width within each class."""
    if not diags:
        raise PlotError("no diagnostics to plot")
    if orientation not in ("horizontal", "vertical"):
        raise PlotError(f"unknown orientation {orientation!r}")
    G = len(class_names)
    palette = _palette_for(G)
    per_class, overall = silhouette_summary(diags)
    rects = []
    ticks = []
    pos = 0
    for g in range(1, G + 1):
        vals = sorted((d.silhouette for d in diags if d.given == g), reverse=True)
        start = pos
        for s in vals:
            lo, length = (s, -s) if s < 0 else (0.0, s)
            if orientation == "horizontal":
                rects.append(Rect(lo, pos, max(length, 1e-9), 0.92, g - 1))
            else:
                rects.append(Rect(pos, lo, 0.92, max(length, 1e-9), g - 1))
            pos += 1
        ticks.append(((start + pos - 1) / 2.0, class_names[g - 1]))
        pos += 2  # gap between classes
    n_slots = pos - 2
    sil_axis = Axis("silhouette width", -1.0, 1.0,
                    [(-1.0, "-1"), (-0.5, "-0.5"), (0.0, "0"), (0.5, "0.5"), (1.0, "1")])
    case_axis = Axis("cases by given class", -1.0, n_slots + 1.0, ticks)
    legend = [
        (f"{class_names[g - 1]} (avg {per_class.get(g, float('nan')):.2f})", g - 1)
        for g in range(1, G + 1)
    ]
    if orientation == "horizontal":
        x_axis, y_axis = sil_axis, case_axis
    else:
        x_axis, y_axis = case_axis, sil_axis
    return PlotData(
        kind="silhouette",
        title=f"Silhouette plot (overall average {overall:.2f})",
        palette=palette,
        x_axis=x_axis,
        y_axis=y_axis,
        rects=rects,
        legend=legend,
    )


def _pac_band(x_lo, x_hi, G) -> Rect:
    # gray zone PAC < 0.5: given label matches the prediction
    return Rect(x_lo, 0.0, x_hi - x_lo, 0.5, _band_idx(G), "agreement band")


def _quantile_bins(feature: np.ndarray, pacs: np.ndarray, n_bins: int = 10):
    order = np.argsort(feature, kind="stable")
    chunks = np.array_split(order, min(n_bins, feature.size))
    centers, means, ses = [], [], []
    for ch in chunks:
        if ch.size == 0:
            continue
        centers.append(float(feature[ch].mean()))
        means.append(float(pacs[ch].mean()))
        if ch.size > 1:
            ses.append(float(pacs[ch].std(ddof=1) / math.sqrt(ch.size)))
        else:
            ses.append(0.0)
    return centers, means, ses


def quasi_residual_plot(diags: list[CaseDiagnostics], feature,
                        mode: str = "per_class", feature_label: str = "feature",
                        given_class: int | None = None,
                        class_names: list[str] | None = None) -> PlotData:
    """PAC against an arbitrary per-case feature.

    per_class mode colors by predicted class and marks overall outliers with
    a black border, optionally restricted to one given class; combined mode
    colors by given class and overlays the binned average PAC curve plus or
    minus one standard error.
    """
    if mode not in ("per_class", "combined"):
        raise PlotError(f"unknown mode {mode!r}")
    feature = np.asarray(feature, dtype=float).ravel()
    if feature.size != len(diags):
        raise PlotError("feature vector length must match the diagnostics")
    G = int(max(max(d.given for d in diags), max(d.predicted for d in diags)))
    if class_names is None:
        class_names = [str(g) for g in range(1, G + 1)]
    sel = np.arange(len(diags))
    if given_class is not None:
        sel = np.array([i for i in sel if diags[i].given == given_class], dtype=int)
        if sel.size == 0:
            raise PlotError(f"no cases with given class {given_class}")
    pacs = np.array([diags[i].pac for i in sel])
    feats = feature[sel]
    palette = _palette_for(G)
    x_lo, x_hi = _pad_range(feats)
    if mode == "per_class":
        colors = [diags[i].predicted - 1 for i in sel]
        borders = [diags[i].outlier_distance for i in sel]
        curves = []
        legend = [(class_names[g - 1], g - 1) for g in range(1, G + 1)]
    else:
        colors = [diags[i].given - 1 for i in sel]
        borders = [False] * sel.size
        if np.ptp(feats) == 0:
            import warnings

            warnings.warn("constant feature: average-PAC curve degenerates to one bin")
        centers, means, ses = _quantile_bins(feats, pacs)
        curves = [
            Curve(centers, means, _red_idx(G), "solid", "average PAC"),
            Curve(centers, [m + s for m, s in zip(means, ses)], _red_idx(G),
                  "dashed", "average + se"),
            Curve(centers, [m - s for m, s in zip(means, ses)], _red_idx(G),
                  "dashed", "average - se"),
        ]
        legend = [(class_names[g - 1], g - 1) for g in range(1, G + 1)]
    pts = PointSeries(feats.tolist(), pacs.tolist(), colors, borders, "cases")
    title = "Quasi residual plot"
    if given_class is not None:
        title += f" (given class {class_names[given_class - 1]})"
    return PlotData(
        kind="quasi_residual",
        title=title,
        palette=palette,
        x_axis=Axis(feature_label, x_lo, x_hi, _nice_ticks(x_lo, x_hi)),
        y_axis=Axis("PAC", 0.0, 1.0, _nice_ticks(0.0, 1.0)),
        points=[pts],
        rects=[_pac_band(x_lo, x_hi, G)],
        curves=curves,
        legend=legend,
    )


_PHI0 = float(_norm.cdf(0.0))
_PHI4 = float(_norm.cdf(4.0))


def farness_position(f) -> np.ndarray | float:
    """Map farness in [0, 1] to the class-map axis position t in [0, 4],
    where farness = (Phi(t) - Phi(0)) / (Phi(4) - Phi(0))."""
    f = np.clip(np.asarray(f, dtype=float), 0.0, 1.0)
    t = _norm.ppf(_PHI0 + f * (_PHI4 - _PHI0))
    return float(t) if t.ndim == 0 else t


def position_to_farness(t) -> np.ndarray | float:
    t = np.asarray(t, dtype=float)
    f = (_norm.cdf(t) - _PHI0) / (_PHI4 - _PHI0)
    return float(f) if f.ndim == 0 else f


def class_map(diags: list[CaseDiagnostics], fm: FarnessModel, g: int,
              class_names: list[str] | None = None) -> PlotData:
    """PAC against transformed farness to the given class g, colored by
    predicted class; farness-based overall outliers get a black border."""
    if not fm.available(g):
        raise PlotError(f"farness unavailable for class {g}")
    G = len(fm.class_distances)
    if class_names is None:
        class_names = [str(i) for i in range(1, G + 1)]
    sel = [d for d in diags if d.given == g]
    if not sel:
        raise PlotError(f"no cases with given class {g}")
    far = np.array([d.farness[g - 1] for d in sel])
    pos = farness_position(far)
    pacs = [d.pac for d in sel]
    palette = _palette_for(G)
    ticks = [(farness_position(f), f"{f:g}") for f in FARNESS_TICKS]
    pts = PointSeries(
        np.asarray(pos).tolist(), pacs,
        [d.predicted - 1 for d in sel],
        [d.outlier_farness for d in sel],
        "cases",
    )
    return PlotData(
        kind="class_map",
        title=f"Class map of class {class_names[g - 1]}",
        palette=palette,
        x_axis=Axis("farness to given class", 0.0, 4.0, ticks,
                    transform="normal-quantile-farness"),
        y_axis=Axis("PAC", 0.0, 1.0, _nice_ticks(0.0, 1.0)),
        points=[pts],
        rects=[_pac_band(0.0, 4.0, G)],
        legend=[(class_names[i], i) for i in range(G)],
    )


def qq_plot(qq: QQData) -> PlotData:
    """Chi-squared Q-Q plot of squared distances with the identity line and
    the 0.99 cutoff line."""
    theo, ordered = qq.theoretical, qq.ordered
    hi = float(max(theo.max(), ordered.max(), qq.cutoff)) * 1.05
    palette = _palette_for(1)
    pts = PointSeries(theo.tolist(), ordered.tolist(), [0] * theo.size,
                      [False] * theo.size, "cases")
    ident = Curve([0.0, float(theo.max())], [0.0, float(theo.max())],
                  _line_idx(1), "solid", "identity")
    cut = Curve([0.0, hi], [qq.cutoff, qq.cutoff], _red_idx(1), "dashdot",
                "0.99 cutoff")
    return PlotData(
        kind="qq",
        title=f"Chi-squared Q-Q plot (dof = {qq.dof})",
        palette=palette,
        x_axis=Axis(f"chi-squared({qq.dof}) quantiles", 0.0, hi, _nice_ticks(0.0, hi)),
        y_axis=Axis("ordered squared robust distances", 0.0, hi, _nice_ticks(0.0, hi)),
        points=[pts],
        curves=[ident, cut],
    )


def tolerance_ellipse(est, cutoff_prob: float = 0.99, n_points: int = 181) -> np.ndarray:
    """Points of the ellipse at Mahalanobis distance sqrt(chi2_{2,prob})."""
    if est.p != 2:
        raise PlotError("tolerance ellipses require p = 2")
    r = math.sqrt(chi2_quantile(2, cutoff_prob))
    theta = np.linspace(0.0, 2.0 * math.pi, n_points)
    circle = np.column_stack([np.cos(theta), np.sin(theta)])
    return est.center + r * circle @ est.cholesky().T


def scatter_plot(model: DAModel, data: LabeledDataset,
                 boundary: bool = True, grid: int = 400) -> PlotData:
    """Bivariate scatter with 0.99 tolerance ellipses per class and, for two
    classes, the decision boundary traced on a ``grid`` x ``grid`` lattice."""
    if model.p != 2 or data.p != 2:
        raise PlotError("the scatter plot requires p = 2")
    G = model.G
    palette = _palette_for(G)
    x_lo, x_hi = _pad_range(data.features[:, 0], 0.08)
    y_lo, y_hi = _pad_range(data.features[:, 1], 0.08)
    pts = PointSeries(
        data.features[:, 0].tolist(), data.features[:, 1].tolist(),
        (data.labels - 1).tolist(), [False] * data.n, "cases",
    )
    curves = []
    for g in range(1, G + 1):
        cov, _ = model.class_cov(g)
        from .estimators import LocationScatter

        est = LocationScatter(model.class_estimates[g - 1].center, cov,
                              method="view")
        ell = tolerance_ellipse(est, model.spec.outlier_cutoff_prob)
        curves.append(Curve(ell[:, 0].tolist(), ell[:, 1].tolist(), g - 1,
                            "solid", f"tolerance ellipse {g}"))
    if boundary and G == 2:
        from skimage import measure

        xs = np.linspace(x_lo, x_hi, grid)
        ys = np.linspace(y_lo, y_hi, grid)
        XX, YY = np.meshgrid(xs, ys)
        pts_grid = np.column_stack([XX.ravel(), YY.ravel()])
        diff = score_matrix(model, pts_grid)
        Z = (diff[:, 0] - diff[:, 1]).reshape(grid, grid)
        for contour in measure.find_contours(Z, 0.0):
            cx = np.interp(contour[:, 1], np.arange(grid), xs)
            cy = np.interp(contour[:, 0], np.arange(grid), ys)
            curves.append(Curve(cx.tolist(), cy.tolist(), _line_idx(G),
                                "solid", "decision boundary"))
    return PlotData(
        kind="scatter",
        title="Data with tolerance ellipses",
        palette=palette,
        x_axis=Axis(data.feature_names[0], x_lo, x_hi, _nice_ticks(x_lo, x_hi)),
        y_axis=Axis(data.feature_names[1], y_lo, y_hi, _nice_ticks(y_lo, y_hi)),
        points=[pts],
        curves=curves,
        legend=[(model.class_names[i], i) for i in range(G)],
    )


# ---------------------------------------------------------------------------
# rendering

_DASH = {"solid": None, "dashed": "6,4", "dashdot": "8,3,2,3"}


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_svg(pd: PlotData, width: int = 720, height: int = 540) -> str:
    """Emit a standalone SVG 1.1 document. Deterministic: identical PlotData
    values produce identical bytes."""
    ml, mr, mt, mb = 64.0, 20.0, 36.0, 52.0
    pw, ph = width - ml - mr, height - mt - mb
    xa, ya = pd.x_axis, pd.y_axis

    def sx(v):
        return ml + (v - xa.lo) / (xa.hi - xa.lo) * pw

    def sy(v):
        return mt + (ya.hi - v) / (ya.hi - ya.lo) * ph

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">'
    )
    out.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="#FFFFFF"/>')
    out.append(
        f'<text x="{_fmt(width / 2)}" y="{_fmt(mt - 12)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{escape(pd.title)}</text>'
    )

    # rectangles first (bands, bars, mosaic cells)
    for r in pd.rects:
        x0, x1 = sorted((sx(r.x), sx(r.x + r.width)))
        y0, y1 = sorted((sy(r.y), sy(r.y + r.height)))
        out.append(
            f'<rect class="cell" x="{_fmt(x0)}" y="{_fmt(y0)}" '
            f'width="{_fmt(x1 - x0)}" height="{_fmt(y1 - y0)}" '
            f'fill="{pd.palette[r.color]}" stroke="#FFFFFF" stroke-width="0.5">'
            f"<title>{escape(r.name)}</title></rect>"
        )

    # frame and ticks
    out.append(
        f'<rect x="{_fmt(ml)}" y="{_fmt(mt)}" width="{_fmt(pw)}" height="{_fmt(ph)}" '
        'fill="none" stroke="#000000" stroke-width="1"/>'
    )
    for pos, lab in xa.ticks:
        if not xa.lo - 1e-9 <= pos <= xa.hi + 1e-9:
            continue
        px = sx(pos)
        out.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(mt + ph)}" x2="{_fmt(px)}" '
            f'y2="{_fmt(mt + ph + 5)}" stroke="#000000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(px)}" y="{_fmt(mt + ph + 18)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{escape(lab)}</text>'
        )
    for pos, lab in ya.ticks:
        if not ya.lo - 1e-9 <= pos <= ya.hi + 1e-9:
            continue
        py = sy(pos)
        out.append(
            f'<line x1="{_fmt(ml - 5)}" y1="{_fmt(py)}" x2="{_fmt(ml)}" '
            f'y2="{_fmt(py)}" stroke="#000000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(ml - 8)}" y="{_fmt(py + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{escape(lab)}</text>'
        )
    out.append(
        f'<text x="{_fmt(ml + pw / 2)}" y="{_fmt(height - 14)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{escape(xa.label)}</text>'
    )
    out.append(
        f'<text x="16" y="{_fmt(mt + ph / 2)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 16 {_fmt(mt + ph / 2)})">{escape(ya.label)}</text>'
    )

    for c in pd.curves:
        coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(c.x, c.y))
        dash = _DASH.get(c.style)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<polyline fill="none" stroke="{pd.palette[c.color]}" '
            f'stroke-width="1.5"{dash_attr} points="{coords}">'
            f"<title>{escape(c.name)}</title></polyline>"
        )

    for s in pd.points:
        for i in range(len(s.x)):
            border = ' stroke="#000000" stroke-width="1.2"' if s.borders[i] else ""
            out.append(
                f'<circle cx="{_fmt(sx(s.x[i]))}" cy="{_fmt(sy(s.y[i]))}" r="3.2" '
                f'fill="{pd.palette[s.colors[i]]}" fill-opacity="0.85"{border}/>'
            )

    lx, ly = ml + pw - 150.0, mt + 10.0
    for i, (label, color) in enumerate(pd.legend):
        yy = ly + 16.0 * i
        out.append(
            f'<rect x="{_fmt(lx)}" y="{_fmt(yy)}" width="10" height="10" '
            f'fill="{pd.palette[color]}"/>'
        )
        out.append(
            f'<text x="{_fmt(lx + 14)}" y="{_fmt(yy + 9)}" font-family="sans-serif" '
            f'font-size="11">{escape(str(label))}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_plot_csv(pd: PlotData) -> str:
    """Every point, rectangle and curve vertex, one row each, coordinates at
    17 significant digits."""

    def g(v):
        return f"{float(v):.17g}"

    lines = ["element,series,index,x,y,width,height,color,border,label"]
    for s in pd.points:
        for i in range(len(s.x)):
            lab = "" if s.labels is None else str(s.labels[i])
            lines.append(
                f"point,{s.name},{i},{g(s.x[i])},{g(s.y[i])},,,"
                f"{s.colors[i]},{int(s.borders[i])},{lab}"
            )
    for i, r in enumerate(pd.rects):
        lines.append(
            f"rect,{r.name},{i},{g(r.x)},{g(r.y)},{g(r.width)},{g(r.height)},"
            f"{r.color},,"
        )
    for c in pd.curves:
        for i in range(len(c.x)):
            lines.append(f"curve,{c.name},{i},{g(c.x[i])},{g(c.y[i])},,,{c.color},,")
    return "\n".join(lines) + "\n"
