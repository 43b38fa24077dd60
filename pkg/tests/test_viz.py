import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

import robustda as r
from robustda.diagnostics import confusion, fit_farness, qq_data
from robustda.discriminant import distance_matrix
from robustda.viz import (
    CLASS_PALETTE,
    FARNESS_TICKS,
    OUTLIER_GRAY,
    class_map,
    export_plot_csv,
    farness_position,
    mosaic_plot,
    position_to_farness,
    qq_plot,
    quasi_residual_plot,
    render_svg,
    scatter_plot,
    score_score_plot,
    silhouette_plot,
    tolerance_ellipse,
)

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture(scope="module")
def plots(fig1_pair, rqda_model, rqda_diags):
    _, cont, _ = fig1_pair
    diags, fm = rqda_diags
    cm = confusion(rqda_model, cont, with_outlier_class=True, farness_model=fm)
    return {
        "scores": score_score_plot(rqda_model, cont),
        "mosaic": mosaic_plot(cm),
        "silhouette": silhouette_plot(diags, cont.class_names),
        "qrp": quasi_residual_plot(diags, cont.features[:, 0], mode="combined",
                                   feature_label=cont.feature_names[0],
                                   class_names=cont.class_names),
        "classmap": class_map(diags, fm, 1, cont.class_names),
        "qq": qq_plot(qq_data(
            distance_matrix(rqda_model, cont.features)[cont.class_rows(1), 0] ** 2,
            dof=2)),
        "scatter": scatter_plot(rqda_model, cont),
    }


# ---------------------------------------------------------------------------
# rendering contract

def test_every_svg_is_well_formed_xml(plots):
    for name, pd in plots.items():
        root = ET.fromstring(render_svg(pd))
        assert root.tag == f"{SVG}svg", name


def test_render_is_deterministic(plots):
    for pd in plots.values():
        assert render_svg(pd).encode() == render_svg(pd).encode()
        assert export_plot_csv(pd) == export_plot_csv(pd)


def test_export_csv_round_trips_coordinates(plots):
    pd = plots["scores"]
    rows = export_plot_csv(pd).strip().splitlines()
    header = rows[0].split(",")
    assert header[:5] == ["element", "series", "index", "x", "y"]
    pts = [row.split(",") for row in rows[1:] if row.startswith("point,")]
    series = pd.points[0]
    assert len(pts) == len(series.x)
    for cells in pts[:25]:
        i = int(cells[2])
        assert float(cells[3]) == series.x[i]  # 17g is lossless for float64
        assert float(cells[4]) == series.y[i]


def test_palette_and_outlier_color(plots):
    pd = plots["scores"]
    assert pd.palette[0] == CLASS_PALETTE[0] == "#E69F00"
    assert pd.palette[1] == CLASS_PALETTE[1] == "#56B4E9"
    assert pd.palette[2] == OUTLIER_GRAY == "#404040"


# ---------------------------------------------------------------------------
# score-score

def test_score_score_below_line_means_class2(plots, fig1_pair, rqda_model):
    pd = plots["scores"]
    s = pd.points[0]
    # geometric rule: y > x means predicted class 2
    _, cont, _ = fig1_pair
    from robustda.discriminant import predicted_labels, score_matrix

    labels = predicted_labels(score_matrix(rqda_model, cont.features))
    for x, y, pred in zip(s.x, s.y, labels):
        if y > x:
            assert pred == 2
        elif y < x:
            assert pred == 1
    ident = pd.curves[0]
    assert ident.x == ident.y  # identity line


def test_score_score_rejects_three_classes():
    from robustda.estimators import LocationScatter

    model = r.DAModel(
        spec=r.DASpec(rule="quadratic", estimation="classical"),
        class_names=["a", "b", "c"],
        class_estimates=[LocationScatter(np.array([float(g), 0.0]), np.eye(2))
                         for g in range(3)],
        priors=np.full(3, 1 / 3),
        counts=np.full(3, 10),
    )
    data = r.LabeledDataset(np.zeros((3, 2)), [1, 2, 3], ["a", "b", "c"])
    with pytest.raises(r.PlotError):
        score_score_plot(model, data)


# ---------------------------------------------------------------------------
# mosaic

def test_mosaic_geometry_matches_counts():
    from robustda.diagnostics import ConfusionMatrix

    cm = ConfusionMatrix(np.array([[68, 7, 5], [6, 88, 6]]),
                         ["class1", "class2"],
                         ["class1", "class2", "outliers"])
    pd = mosaic_plot(cm)
    total = 180
    by_name = {rect.name: rect for rect in pd.rects}
    assert len(pd.rects) == 6  # no zero cells here
    # column widths proportional to the given-class sizes
    assert math.isclose(by_name["class1|class1"].width, 80 / total)
    assert math.isclose(by_name["class2|class2"].width, 100 / total)
    # stacked heights proportional to counts within the column
    assert math.isclose(by_name["class1|class1"].height, 68 / 80)
    assert math.isclose(by_name["class1|outliers"].height, 5 / 80)
    assert math.isclose(by_name["class2|class1"].height, 6 / 100)
    # each column stacks to exactly one
    col1 = [rect for rect in pd.rects if rect.name.startswith("class1|")]
    assert math.isclose(sum(rect.height for rect in col1), 1.0)
    # outlier cells use the dark gray slot
    assert pd.palette[by_name["class1|outliers"].color] == OUTLIER_GRAY


def test_mosaic_omits_zero_cells():
    from robustda.diagnostics import ConfusionMatrix

    cm = ConfusionMatrix(np.array([[10, 0], [3, 7]]), ["a", "b"], ["a", "b"])
    pd = mosaic_plot(cm)
    assert len(pd.rects) == 3
    assert all(rect.name != "a|b" for rect in pd.rects)


def test_mosaic_svg_areas_recoverable(plots):
    # re-parse the rendered SVG and confirm pixel areas match the count
    # shares within half a percent
    pd = plots["mosaic"]
    root = ET.fromstring(render_svg(pd))
    cells = [el for el in root.iter(f"{SVG}rect") if el.get("class") == "cell"]
    areas = {}
    for el in cells:
        name = el.find(f"{SVG}title").text
        areas[name] = float(el.get("width")) * float(el.get("height"))
    total_area = sum(areas.values())
    from robustda.diagnostics import confusion  # counts behind this mosaic

    by_name = {rect.name: rect for rect in pd.rects}
    for name, area in areas.items():
        share = by_name[name].width * by_name[name].height
        share /= sum(rr.width * rr.height for rr in pd.rects)
        assert abs(area / total_area - share) < 0.005


# ---------------------------------------------------------------------------
# silhouette plot

def test_silhouette_bars_sorted_within_class(plots, rqda_diags):
    diags, _ = rqda_diags
    pd = plots["silhouette"]
    n1 = sum(1 for d in diags if d.given == 1)
    lengths1 = [rect.width if rect.x == 0 else -rect.width
                for rect in pd.rects[:n1]]
    assert lengths1 == sorted(lengths1, reverse=True)
    assert len(pd.rects) == len(diags)
    # bar signs: a bar with x < 0 encodes a negative silhouette
    for rect in pd.rects:
        assert rect.x <= 0 or rect.x == 0.0


def test_silhouette_vertical_orientation(rqda_diags, fig1_pair):
    _, cont, _ = fig1_pair
    diags, _ = rqda_diags
    pd = silhouette_plot(diags, cont.class_names, orientation="vertical")
    assert pd.y_axis.label == "silhouette width"
    with pytest.raises(r.PlotError):
        silhouette_plot(diags, cont.class_names, orientation="diagonal")
    with pytest.raises(r.PlotError):
        silhouette_plot([], cont.class_names)


# ---------------------------------------------------------------------------
# quasi residual plot

def test_qrp_band_and_average_curve(plots, rqda_diags, fig1_pair):
    _, cont, _ = fig1_pair
    diags, _ = rqda_diags
    pd = plots["qrp"]
    band = pd.rects[0]
    assert band.y == 0.0 and band.height == 0.5
    names = [c.name for c in pd.curves]
    assert names == ["average PAC", "average + se", "average - se"]
    # recompute the first bin by hand
    feats = cont.features[:, 0]
    pacs = np.array([d.pac for d in diags])
    order = np.argsort(feats, kind="stable")
    first = np.array_split(order, 10)[0]
    assert math.isclose(pd.curves[0].x[0], feats[first].mean())
    assert math.isclose(pd.curves[0].y[0], pacs[first].mean())
    se = pacs[first].std(ddof=1) / math.sqrt(first.size)
    assert math.isclose(pd.curves[1].y[0] - pd.curves[0].y[0], se, abs_tol=1e-12)


def test_qrp_per_class_borders_mark_outliers(rqda_diags, fig1_pair):
    _, cont, _ = fig1_pair
    diags, _ = rqda_diags
    pd = quasi_residual_plot(diags, cont.features[:, 1], mode="per_class",
                             class_names=cont.class_names)
    s = pd.points[0]
    outliers = [d.outlier_distance for d in diags]
    assert s.borders == outliers
    assert s.colors == [d.predicted - 1 for d in diags]
    with pytest.raises(r.PlotError):
        quasi_residual_plot(diags, cont.features[:3, 0])
    with pytest.raises(r.PlotError):
        quasi_residual_plot(diags, cont.features[:, 0], mode="sideways")


def test_qrp_constant_feature_warns(rqda_diags):
    diags, _ = rqda_diags
    with pytest.warns(UserWarning):
        quasi_residual_plot(diags, np.ones(len(diags)), mode="combined")


# ---------------------------------------------------------------------------
# class map

def test_farness_position_endpoints_and_round_trip():
    assert farness_position(0.0) == 0.0
    assert math.isclose(farness_position(1.0), 4.0, abs_tol=1e-9)
    rng = np.random.default_rng(7)
    f = rng.uniform(0, 1, size=50)
    back = position_to_farness(farness_position(f))
    assert np.allclose(back, f, atol=1e-10)
    # monotone
    t = farness_position(np.linspace(0, 1, 101))
    assert np.all(np.diff(t) > 0)


def test_class_map_axis_and_flags(plots, rqda_diags):
    diags, fm = rqda_diags
    pd = plots["classmap"]
    assert pd.x_axis.lo == 0.0 and pd.x_axis.hi == 4.0
    tick_labels = [lab for _, lab in pd.x_axis.ticks]
    assert tick_labels == [f"{f:g}" for f in FARNESS_TICKS]
    sel = [d for d in diags if d.given == 1]
    s = pd.points[0]
    assert len(s.x) == len(sel)
    assert s.borders == [d.outlier_farness for d in sel]
    expected_x = [farness_position(d.farness[0]) for d in sel]
    assert np.allclose(s.x, expected_x)


def test_class_map_unavailable_class_rejected(rqda_diags):
    diags, fm = rqda_diags
    from robustda.diagnostics import FarnessModel

    crippled = FarnessModel([fm.class_distances[0], None], fm.cutoff_prob)
    with pytest.raises(r.PlotError):
        class_map(diags, crippled, 2)


# ---------------------------------------------------------------------------
# qq plot

def test_qq_plot_reference_lines(plots):
    pd = plots["qq"]
    ident, cut = pd.curves
    assert ident.name == "identity" and ident.x == ident.y
    assert cut.style == "dashdot"
    assert cut.y[0] == cut.y[1]
    assert math.isclose(cut.y[0], r.chi2_quantile(2, 0.99))


# ---------------------------------------------------------------------------
# scatter plot

def test_tolerance_ellipse_lies_on_contour():
    from robustda.estimators import LocationScatter, mahalanobis_squared

    rng = np.random.default_rng(8)
    A = rng.standard_normal((2, 2))
    est = LocationScatter(np.array([1.0, -2.0]), A @ A.T + 2 * np.eye(2))
    pts = tolerance_ellipse(est, 0.99)
    d2 = mahalanobis_squared(pts, est.center, est.scatter)
    assert np.allclose(d2, r.chi2_quantile(2, 0.99), atol=1e-9)
    with pytest.raises(r.PlotError):
        tolerance_ellipse(LocationScatter(np.zeros(3), np.eye(3)))


def test_scatter_plot_contents(plots, fig1_pair, rqda_model):
    _, cont, _ = fig1_pair
    pd = plots["scatter"]
    names = [c.name for c in pd.curves]
    assert "tolerance ellipse 1" in names and "tolerance ellipse 2" in names
    assert any(n == "decision boundary" for n in names)
    # the boundary separates the classes: evaluate the score difference at
    # its vertices, it should be near zero
    from robustda.discriminant import score_matrix

    for c in pd.curves:
        if c.name != "decision boundary":
            continue
        verts = np.column_stack([c.x, c.y])
        diff = score_matrix(rqda_model, verts)
        gap = np.abs(diff[:, 0] - diff[:, 1])
        assert np.median(gap) < 0.05


def test_scatter_plot_requires_two_features(rqda_model):
    data3 = r.LabeledDataset(np.zeros((4, 3)), [1, 1, 2, 2], ["a", "b"])
    with pytest.raises(r.PlotError):
        scatter_plot(rqda_model, data3)
