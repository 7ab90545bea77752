# cluster_model.py
import logging

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist
from scipy.spatial.distance import euclidean as _euclidean
from sklearn.cluster import DBSCAN
from sklearn.neighbors import NearestNeighbors

from exceptions import DataValidationError, ShapeError
from schemas.cluster_schema import NOISE, ClusterResult, DbscanParams, HotspotResult, KDistanceResult
from schemas.trace_schema import SteadyStateDataset

logger = logging.getLogger(__name__)

EPS_FLOOR = 1e-12
# a noise row within this fraction of its nearest centroid's norm is still ordinary data
NEAR_CENTROID = 0.5


class ClusterModel:
    @staticmethod
    def euclidean(p, q) -> float:
        p = np.asarray(p, dtype=float).ravel()
        q = np.asarray(q, dtype=float).ravel()
        if p.shape != q.shape:
            raise ShapeError(f"points have dimensions {p.size} and {q.size}")
        return float(_euclidean(p, q))

    @staticmethod
    def chord_elbow(curve: np.ndarray) -> int:
        """Index of the point farthest from the chord joining the curve's endpoints."""
        if curve.size < 3:
            return 0
        x = np.arange(curve.size, dtype=float)
        x0, y0, x1, y1 = 0.0, curve[0], x[-1], curve[-1]
        dist = np.abs((y1 - y0) * x - (x1 - x0) * curve + x1 * y0 - y1 * x0)
        dist /= np.hypot(y1 - y0, x1 - x0)
        return int(np.argmax(dist))

    @staticmethod
    def k_distance_eps(points, k: int) -> KDistanceResult:
        """Picks DBSCAN's eps at the elbow of the descending k-distance curve.

        The k-th neighbour does not count the point itself.
        """
        X = np.asarray(points, dtype=float)
        if X.ndim != 2:
            raise ShapeError("points must be a 2-D array")
        if k < 1 or X.shape[0] <= k:
            raise DataValidationError(f"k-distance with k={k} needs more than {k} points, got {X.shape[0]}")
        distances, _ = NearestNeighbors(n_neighbors=k + 1).fit(X).kneighbors(X)
        curve = np.sort(distances[:, k])[::-1]
        idx = ClusterModel.chord_elbow(curve)
        eps = max(float(curve[idx]), EPS_FLOOR * max(1.0, float(curve[0])))
        return KDistanceResult(k=k, eps=eps, elbow_index=idx, curve=curve)

    @staticmethod
    def dbscan(points, params: DbscanParams) -> ClusterResult:
        X = np.asarray(points, dtype=float)
        if X.ndim != 2:
            raise ShapeError("points must be a 2-D array")
        fitted = DBSCAN(eps=params.eps, min_samples=params.min_pts, metric="euclidean").fit(X)
        labels = fitted.labels_.astype(int)
        core = np.zeros(X.shape[0], dtype=bool)
        core[fitted.core_sample_indices_] = True
        count = int(labels.max()) + 1 if labels.size else 0
        centroids = np.array([X[labels == c].mean(axis=0) for c in range(count)]).reshape(count, X.shape[1])
        return ClusterResult(labels=labels, centroids=centroids, core_flags=core)

    @staticmethod
    def _keep_rows(X: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> np.ndarray:
        """Clustered rows, plus noise rows that sit close to some unit's centroid.

        eps can fall below the spread of one unit's rows, which would otherwise throw
        that unit's clean experiments away with the outliers.
        """
        keep = labels != NOISE
        if keep.all():
            return keep
        noise = np.flatnonzero(~keep)
        dist = cdist(X[noise], centroids)
        nearest = np.argmin(dist, axis=1)
        scale = np.linalg.norm(centroids[nearest], axis=1)
        keep[noise] = dist[np.arange(noise.size), nearest] <= NEAR_CENTROID * scale
        readmitted = int(keep[noise].sum())
        if readmitted:
            logger.info("hotspot clustering: %d of %d noise rows lie near a centroid and are kept",
                        readmitted, noise.size)
        return keep

    @staticmethod
    def hotspot_centroids(ds: SteadyStateDataset, n: int) -> HotspotResult:
        """Row i is the centroid of the cluster formed by experiments that heat unit i most."""
        if ds.n != n:
            raise ShapeError(f"dataset has {ds.n} units, expected {n}")
        X = ds.normalized()
        min_pts = n + 1
        warnings = []

        kdist = ClusterModel.k_distance_eps(X, min_pts - 1)
        clusters = ClusterModel.dbscan(X, DbscanParams(eps=kdist.eps, min_pts=min_pts))
        logger.debug("hotspot clustering: eps=%.4g, %d clusters, %d noise rows",
                     kdist.eps, clusters.n_clusters, int(clusters.noise.sum()))

        centroids = np.zeros((n, n))
        assignment = [-1] * clusters.n_clusters
        covered = np.zeros(n, dtype=bool)
        if clusters.n_clusters:
            rows, units = linear_sum_assignment(clusters.centroids, maximize=True)
            for c, unit in zip(rows, units):
                assignment[int(c)] = int(unit)
                centroids[unit] = clusters.centroids[c]
                covered[unit] = True

        degraded = []
        for unit in np.flatnonzero(~covered):
            stressed = ds.stressed == unit if ds.stressed is not None else np.zeros(ds.m, dtype=bool)
            if stressed.any():
                # median: outlier copies of this unit's rows carry its label too
                centroids[unit] = np.median(X[stressed], axis=0)
                msg = f"unit {unit}: no cluster, using the median of its single-core-stress rows"
            else:
                centroids[unit] = 0.0
                centroids[unit, unit] = np.median(np.diag(centroids)[covered]) if covered.any() else 1.0
                degraded.append(int(unit))
                msg = f"unit {unit}: no cluster and no single-core-stress rows, degraded init"
            logger.warning(msg)
            warnings.append(msg)

        return HotspotResult(
            centroids=centroids,
            clusters=clusters,
            kdist=kdist,
            min_pts=min_pts,
            assignment=assignment,
            keep=ClusterModel._keep_rows(X, clusters.labels, centroids),
            degraded=degraded,
            warnings=warnings,
        )
