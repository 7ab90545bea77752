import numpy as np
import pytest

from exceptions import DataValidationError
from models.cluster_model import ClusterModel
from models.experiment_model import ExperimentModel
from models.floorplan_model import FloorplanModel
from models.simkit_model import SimkitModel
from schemas.cluster_schema import NOISE, DbscanParams
from schemas.experiment_schema import WorkloadSuite
from schemas.trace_schema import SteadyStateDataset


def naive_dbscan(X, eps, min_pts):
    """Core flags and core-point components straight from pairwise distances."""
    d = np.sqrt(((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=-1))
    near = d <= eps
    core = near.sum(axis=1) >= min_pts
    component = np.full(len(X), -1)
    current = 0
    for start in np.flatnonzero(core):
        if component[start] >= 0:
            continue
        stack = [start]
        component[start] = current
        while stack:
            p = stack.pop()
            for q in np.flatnonzero(near[p] & core):
                if component[q] < 0:
                    component[q] = current
                    stack.append(q)
        current += 1
    return core, component, near


def random_blobs(rng, size):
    centers = rng.uniform(-10, 10, size=(rng.integers(1, 4), 2))
    points = centers[rng.integers(0, len(centers), size=size)] + rng.normal(0, 0.6, size=(size, 2))
    return np.vstack([points, rng.uniform(-15, 15, size=(3, 2))])


def test_euclidean():
    assert ClusterModel.euclidean([0, 0], [3, 4]) == 5.0
    assert ClusterModel.euclidean([1.5, -2.0], [1.5, -2.0]) == 0.0
    rng = np.random.default_rng(0)
    p, q = rng.normal(size=5), rng.normal(size=5)
    assert ClusterModel.euclidean(p, q) == ClusterModel.euclidean(q, p)


def test_k_distance_on_evenly_spaced_line():
    points = np.arange(10, dtype=float)[:, None] * 0.25
    result = ClusterModel.k_distance_eps(points, 1)
    assert result.eps == pytest.approx(0.25)
    assert np.all(np.diff(result.curve) <= 0)


def test_k_distance_two_blobs():
    rng = np.random.default_rng(1)
    blob = np.cumsum(np.full((20, 1), 0.1), axis=0)
    points = np.vstack([blob, blob + 10.0, [[30.0], [45.0], [60.0]]]) + rng.normal(0, 1e-3, size=(43, 1))
    result = ClusterModel.k_distance_eps(points, 3)
    curve = result.curve
    x = np.arange(curve.size)
    chord = np.abs((curve[-1] - curve[0]) * x - (x[-1]) * curve + x[-1] * curve[0])
    assert result.elbow_index == int(np.argmax(chord))
    assert 0.1 < result.eps < 10


def test_k_distance_needs_more_points_than_k():
    with pytest.raises(DataValidationError):
        ClusterModel.k_distance_eps(np.zeros((3, 2)), 3)


def test_identical_points_form_one_cluster():
    result = ClusterModel.dbscan(np.ones((5, 2)), DbscanParams(eps=0.5, min_pts=3))
    assert result.labels.tolist() == [0] * 5
    assert result.n_clusters == 1
    np.testing.assert_allclose(result.centroids, [[1.0, 1.0]])


def test_isolated_points_are_noise():
    points = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    result = ClusterModel.dbscan(points, DbscanParams(eps=1.0, min_pts=2))
    assert result.labels.tolist() == [NOISE] * 3
    assert result.n_clusters == 0


def test_dbscan_matches_naive_reference():
    rng = np.random.default_rng(42)
    for _ in range(50):
        X = random_blobs(rng, int(rng.integers(20, 197)))
        eps, min_pts = float(rng.uniform(0.4, 1.5)), int(rng.integers(2, 6))
        result = ClusterModel.dbscan(X, DbscanParams(eps=eps, min_pts=min_pts))
        core, component, near = naive_dbscan(X, eps, min_pts)

        assert np.array_equal(result.core_flags, core)
        # core points: same partition up to relabeling
        pairs = set(zip(component[core].tolist(), result.labels[core].tolist()))
        assert len(pairs) == len({c for c, _ in pairs}) == len({lab for _, lab in pairs})
        # border points join a cluster of some core neighbour, noise has none
        for i in np.flatnonzero(~core):
            neighbours = result.labels[near[i] & core]
            if neighbours.size:
                assert result.labels[i] in neighbours
            else:
                assert result.labels[i] == NOISE
        for c in range(result.n_clusters):
            np.testing.assert_allclose(result.centroids[c], X[result.labels == c].mean(axis=0), atol=1e-12)


def test_core_flags_ignore_input_order():
    rng = np.random.default_rng(3)
    X = random_blobs(rng, 80)
    params = DbscanParams(eps=0.8, min_pts=4)
    base = ClusterModel.dbscan(X, params)
    order = rng.permutation(len(X))
    shuffled = ClusterModel.dbscan(X[order], params)
    assert np.array_equal(shuffled.core_flags, base.core_flags[order])


def test_removing_noise_keeps_core_flags():
    rng = np.random.default_rng(4)
    X = random_blobs(rng, 60)
    params = DbscanParams(eps=0.9, min_pts=4)
    base = ClusterModel.dbscan(X, params)
    keep = base.labels != NOISE
    again = ClusterModel.dbscan(X[keep], params)
    assert np.array_equal(again.core_flags, base.core_flags[keep])


def _duplicated_dataset(extra=None):
    rows = [[2.0, 0.5]] * 3 + [[0.5, 2.0]] * 3 + ([extra] if extra is not None else [])
    return SteadyStateDataset(t_s=rows, p_total=np.ones(len(rows)), stressed=[0, 0, 0, 1, 1, 1] + [-1] * (extra is not None))


def test_centroids_of_duplicated_rows():
    hot = ClusterModel.hotspot_centroids(_duplicated_dataset(), 2)
    assert hot.min_pts == 3
    np.testing.assert_array_equal(hot.centroids, [[2.0, 0.5], [0.5, 2.0]])
    assert hot.degraded == []
    assert hot.keep.all()


def test_far_outlier_does_not_move_centroids():
    base = ClusterModel.hotspot_centroids(_duplicated_dataset(), 2)
    noisy = ClusterModel.hotspot_centroids(_duplicated_dataset([20.0, 5.0]), 2)
    np.testing.assert_allclose(noisy.centroids, base.centroids, atol=1e-9)
    assert noisy.clusters.labels[-1] == NOISE
    assert not noisy.keep[-1]


def test_noiseless_single_core_data_recovers_resistance(mesh2x2):
    for seed in range(3):
        m = SimkitModel.synth_model(mesh2x2, seed)
        ds, _ = SimkitModel.gen_steady_dataset(m, mesh2x2, 4 * 7, seed=seed, idle=False)
        hot = ClusterModel.hotspot_centroids(ds, 4)
        # row i is unit i's heating footprint, column i of R
        np.testing.assert_allclose(hot.centroids.T, m.r, atol=1e-6)
        assert np.all(hot.centroids >= 0)


def test_missing_unit_falls_back_to_its_stress_rows():
    rows = [[2.0, 0.5]] * 3 + [[0.5, 2.0]]
    ds = SteadyStateDataset(t_s=rows, p_total=np.ones(4), stressed=[0, 0, 0, 1])
    hot = ClusterModel.hotspot_centroids(ds, 2)
    np.testing.assert_allclose(hot.centroids[1], [0.5, 2.0])
    assert hot.warnings


def test_clean_default_data_keeps_every_row():
    suite = WorkloadSuite(outliers=0, runs=1, run_samples=10)
    for seed in range(6):
        ds = ExperimentModel.build_scenario("mesh2x2", seed, suite).dataset
        hot = ClusterModel.hotspot_centroids(ds, 4)
        assert hot.keep.all(), (seed, hot.kdist.eps, hot.clusters.labels.tolist())


def test_noise_rows_near_a_centroid_are_kept():
    X = np.array([[2.0, 0.5], [2.0, 0.5], [2.0, 0.5], [0.5, 2.0], [0.6, 2.0], [9.0, 9.0]])
    labels = np.array([0, 0, 0, NOISE, NOISE, NOISE])
    centroids = np.array([[2.0, 0.5], [0.55, 2.0]])
    keep = ClusterModel._keep_rows(X, labels, centroids)
    assert keep.tolist() == [True, True, True, True, True, False]
