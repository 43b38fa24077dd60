"""End-to-end acceptance checks. Each test covers one numbered criterion and
prints a single PASS line on success (run with ``pytest -v`` or ``-s``)."""

import itertools
import math
import sys
import time
import xml.etree.ElementTree as ET

import numpy as np
import pytest

import robustda as r
from robustda.diagnostics import (
    ConfusionMatrix,
    accuracy,
    compute_diagnostics,
    confusion,
    farness_from_distances,
    farness_outlier_flags,
    fit_farness,
    pac,
    qq_data,
    silhouette,
    silhouette_summary,
)
from robustda.discriminant import predicted_labels, score_matrix
from robustda.estimators import (
    EstimatorConfig,
    c_step,
    chi2_cdf,
    chi2_quantile,
    classical_moments,
    exact_mcd,
    fast_mcd,
    mahalanobis,
)
from robustda.viz import mosaic_plot, render_svg

N_SEEDS = 20
SVG = "{http://www.w3.org/2000/svg}"


def _report(num, text):
    print(f"criterion {num}: PASS  ({text})", file=sys.stderr)


@pytest.fixture(scope="module")
def contamination_runs():
    """Twenty seeded contamination experiments shared by criteria 1, 2, 8
    and 11: robust and classical quadratic fits on the clean and the
    contaminated data, plus accuracies, silhouettes and probe-grid labels."""
    rq = r.DASpec(rule="quadratic", estimation="robust")
    cq = r.DASpec(rule="quadratic", estimation="classical")
    runs = []
    t0 = time.perf_counter()
    for seed in range(N_SEEDS):
        clean, cont, prov = r.generate_contaminated_pair(r.SyntheticConfig(seed=seed))
        model = r.fit(cont, rq)
        cm_ext = confusion(model, cont, with_outlier_class=True)
        diags = compute_diagnostics(model, cont)
        sils = np.array([d.silhouette for d in diags])
        mislabeled = np.array([s == "mislabeled" for s in prov])

        X = np.vstack([clean.features, cont.features])
        xs = np.linspace(X[:, 0].min(), X[:, 0].max(), 200)
        ys = np.linspace(X[:, 1].min(), X[:, 1].max(), 200)
        XX, YY = np.meshgrid(xs, ys)
        grid = np.column_stack([XX.ravel(), YY.ravel()])

        def change(spec):
            a = predicted_labels(score_matrix(r.fit(clean, spec), grid))
            b = predicted_labels(score_matrix(r.fit(cont, spec), grid))
            return float(np.mean(a != b))

        runs.append({
            "seed": seed,
            "model": model,
            "cont": cont,
            "cm_ext": cm_ext,
            "acc": accuracy(cm_ext),
            "acc_ex": accuracy(cm_ext, exclude_outliers=True),
            "sil_overall": float(sils.mean()),
            "sil_mislabeled": sils[mislabeled],
            "grid_rqda": change(rq),
            "grid_cqda": change(cq),
        })
    elapsed = time.perf_counter() - t0
    return runs, elapsed


def test_criterion_01_contamination_accuracy_bands(contamination_runs):
    runs, elapsed = contamination_runs
    acc = float(np.mean([run["acc"] for run in runs]))
    acc_ex = float(np.mean([run["acc_ex"] for run in runs]))
    assert acc_ex >= 0.90, f"outlier-excluded accuracy {acc_ex:.4f} < 0.90"
    assert acc >= 0.84, f"all-case accuracy {acc:.4f} < 0.84"
    assert elapsed < 10.0, f"contamination experiment took {elapsed:.1f}s"
    _report(1, f"acc {acc:.3f} >= 0.84, excl {acc_ex:.3f} >= 0.90, {elapsed:.1f}s")


def test_criterion_02_rqda_less_affected_than_cqda(contamination_runs):
    runs, _ = contamination_runs
    for run in runs:
        assert run["grid_rqda"] < run["grid_cqda"], (
            f"seed {run['seed']}: RQDA {run['grid_rqda']:.4f} "
            f">= CQDA {run['grid_cqda']:.4f}"
        )
    worst = max(run["grid_rqda"] for run in runs)
    _report(2, f"RQDA grid change < CQDA on all {N_SEEDS} seeds, "
               f"worst RQDA {worst:.4f}")


def test_criterion_03_fast_mcd_matches_exhaustive_search():
    rng = np.random.default_rng(42)
    t0 = time.perf_counter()
    for trial in range(50):
        n = int(rng.integers(8, 13))
        X = rng.standard_normal((n, 2)) * rng.uniform(0.5, 3.0)
        X[: max(1, n // 4)] += rng.uniform(4, 8)
        cfg = EstimatorConfig(alpha=0.5, seed=trial)
        fast = fast_mcd(X, cfg)
        exact = exact_mcd(X, alpha=0.5)

        def subset_det(subset):
            return float(np.linalg.det(classical_moments(X[subset]).scatter))

        df, de = subset_det(fast.h_subset), subset_det(exact.h_subset)
        assert abs(df - de) <= 1e-8 * max(de, 1e-300), (
            f"trial {trial}: fast {df:.12e} vs exact {de:.12e}"
        )
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0, f"oracle comparison took {elapsed:.1f}s"
    _report(3, f"50/50 instances matched within 1e-8, {elapsed:.1f}s")


def test_criterion_04_c_step_determinants_nonincreasing():
    rng = np.random.default_rng(7)
    max_csteps = EstimatorConfig().max_csteps
    for trial in range(200):
        n = int(rng.integers(10, 40))
        p = int(rng.integers(1, 4))
        X = rng.standard_normal((n, p)) @ rng.standard_normal((p, p))
        X += rng.standard_normal(p) * 3
        h = max(p + 1, int(math.ceil(0.5 * n)))
        subset = rng.choice(n, size=h, replace=False)
        dets = [float(np.linalg.det(classical_moments(X[subset]).scatter))]
        for step in range(max_csteps):
            new, det = c_step(X, subset)
            dets.append(det)
            assert det <= dets[-2] * (1 + 1e-12), (
                f"trial {trial}, step {step}: determinant rose "
                f"{dets[-2]:.6e} -> {det:.6e}"
            )
            if np.array_equal(new, subset):
                break
            subset = new
        else:
            pytest.fail(f"trial {trial}: no convergence in {max_csteps} steps")
    _report(4, "200/200 instances: nonincreasing determinants, all converged")


def test_criterion_05_equivariance():
    rng = np.random.default_rng(11)
    X = rng.standard_normal((14, 2))
    base = exact_mcd(X, alpha=0.5)
    for trial in range(20):
        A = rng.standard_normal((2, 2))
        while abs(np.linalg.det(A)) < 0.3:
            A = rng.standard_normal((2, 2))
        b = rng.standard_normal(2)
        moved = exact_mcd(X @ A.T + b, alpha=0.5)
        assert np.allclose(moved.center, base.center @ A.T + b, atol=1e-8)
        assert np.allclose(moved.scatter, A @ base.scatter @ A.T, atol=1e-8)
        # mahalanobis distance of a point to the estimate is affine invariant
        x = rng.standard_normal(2)
        d0 = mahalanobis(x, base)
        d1 = mahalanobis(A @ x + b, moved)
        assert abs(d0 - d1) <= 1e-8 * max(1.0, d0), f"trial {trial}"
    _report(5, "exact equivariance and distance invariance on 20 affine maps")


def test_criterion_06_diagnostics_identities():
    rng = np.random.default_rng(13)
    checked_impl = 0
    for _ in range(1000):
        G = int(rng.integers(2, 6))
        post = rng.dirichlet(np.ones(G))
        given = int(rng.integers(1, G + 1))
        p = pac(post, given)
        assert silhouette(p) == 1.0 - 2.0 * p
        if G == 2:
            other = post[1] if given == 1 else post[0]
            assert abs(p - other) <= 1e-12
        # misclassified <=> PAC > 0.5, skipping exact ties
        predicted = int(np.argmax(post)) + 1
        own = post[given - 1]
        alt = float(np.max(np.delete(post, given - 1)))
        if own != alt:
            assert (predicted != given) == (p > 0.5)
            checked_impl += 1
    assert checked_impl > 900
    _report(6, f"1000 posterior vectors, {checked_impl} nondegenerate "
               "misclassification checks")


def test_criterion_07_chi_squared_machinery():
    assert abs(chi2_quantile(2, 0.99) - 9.210340) < 1e-5
    assert abs(chi2_quantile(2, 0.99) - (-2.0 * math.log(0.01))) < 1e-10
    for dof, prob in itertools.product((1, 2, 6, 10), (0.5, 0.9, 0.975, 0.99)):
        assert abs(chi2_cdf(chi2_quantile(dof, prob), dof) - prob) < 1e-10
    _report(7, "quantile value and 16 CDF/quantile identities within tolerance")


def test_criterion_08_silhouette_summary_bands(contamination_runs):
    runs, _ = contamination_runs
    overall = float(np.mean([run["sil_overall"] for run in runs]))
    mis = np.concatenate([run["sil_mislabeled"] for run in runs])
    assert 0.55 <= overall <= 0.85, f"overall silhouette {overall:.3f}"
    assert mis.mean() < 0.0, f"mislabeled mean silhouette {mis.mean():.3f} >= 0"
    _report(8, f"overall {overall:.3f} in [0.55, 0.85], "
               f"mislabeled mean {mis.mean():.3f} < 0")


def test_criterion_09_farness_flags_fewer_than_distance_flags():
    rng = np.random.default_rng(17)
    p = 2
    sq = rng.lognormal(mean=0.3, sigma=1.5, size=300)
    d = np.sqrt(sq)
    fm = farness_from_distances([np.sort(d)], cutoff_prob=0.99)
    far_flags = int(farness_outlier_flags(fm, d[:, None]).sum())
    dist_flags = int(np.sum(d > math.sqrt(chi2_quantile(p, 0.99))))
    assert far_flags <= dist_flags, f"farness {far_flags} > distance {dist_flags}"
    assert dist_flags >= 5 * max(far_flags, 1)  # "much fewer"
    qd = qq_data(sq, dof=p)
    top = slice(int(0.9 * sq.size), None)
    assert np.all(qd.ordered[top] > qd.theoretical[top])
    _report(9, f"farness flags {far_flags} <= distance flags {dist_flags}; "
               "Q-Q upper tail above identity")


def test_criterion_10_rendering_contract(contamination_runs):
    runs, _ = contamination_runs
    run = runs[0]
    pd = mosaic_plot(run["cm_ext"])
    svg1, svg2 = render_svg(pd), render_svg(pd)
    assert svg1 == svg2, "repeated renders differ"
    root = ET.fromstring(svg1)

    counts = run["cm_ext"].counts
    rowsums = counts.sum(axis=1)
    total = counts.sum()
    expected = {}
    for i, row_label in enumerate(run["cm_ext"].row_labels):
        for j, col_label in enumerate(run["cm_ext"].col_labels):
            if counts[i, j]:
                expected[f"{row_label}|{col_label}"] = (
                    (rowsums[i] / total) * (counts[i, j] / rowsums[i])
                )
    cells = [el for el in root.iter(f"{SVG}rect") if el.get("class") == "cell"]
    areas = {el.find(f"{SVG}title").text:
             float(el.get("width")) * float(el.get("height")) for el in cells}
    assert set(areas) == set(expected)
    area_total = sum(areas.values())
    for name, share in expected.items():
        got = areas[name] / area_total
        assert abs(got - share) < 0.005, f"{name}: {got:.4f} vs {share:.4f}"
    _report(10, f"XML parses, {len(cells)} cell areas within 0.5%, "
                "byte-identical re-render")


def test_criterion_11_confusion_bookkeeping(contamination_runs):
    runs, _ = contamination_runs
    for run in runs:
        cm = run["cm_ext"]
        G = cm.counts.shape[0]
        assert cm.counts.shape[1] == G + 1
        assert np.array_equal(cm.counts.sum(axis=1), run["cont"].class_sizes())
        trace = float(np.trace(cm.counts[:, :G]))
        total = float(cm.counts.sum())
        n_out = float(cm.counts[:, G].sum())
        assert accuracy(cm) == trace / total
        assert accuracy(cm, exclude_outliers=True) == trace / (total - n_out)
    _report(11, f"row sums and accuracy formulas verified on {N_SEEDS} runs")
