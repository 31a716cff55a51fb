"""Convex domains as finite intersections of halfspaces and balls.

Membership rules: <n_i, x> >= b_i for each halfspace (n_i a unit inward
normal) and |x - c_j| <= r_j for each ball. The constructor demands a
strictly interior witness point, so the intersection always has interior.

Projection onto the closure is exact when at most one constraint is
violated and falls back to Dykstra's cyclic scheme otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ProjectionIterationError

DEFAULT_PROJECT_TOL = 1e-10
DEFAULT_PROJECT_MAX_ITER = 10_000
_UNIT_NORM_TOL = 1e-12


def boundary_tolerance(x: np.ndarray) -> float:
    """Scale-aware tolerance for deciding boundary membership."""
    return 1e-8 * (1.0 + float(np.linalg.norm(x)))


@dataclass(frozen=True, eq=False)
class ConvexDomain:
    """Intersection of halfspaces {<n,x> >= b} and balls {|x-c| <= r}."""

    dimension: int
    normals: np.ndarray = field(default=None)  # (m, d) unit inward normals
    offsets: np.ndarray = field(default=None)  # (m,)
    centers: np.ndarray = field(default=None)  # (p, d)
    radii: np.ndarray = field(default=None)  # (p,)
    interior_point: np.ndarray = field(default=None)

    def __post_init__(self):
        d = self.dimension
        if d < 1:
            raise ValueError("dimension must be >= 1")
        normals = np.array(
            self.normals if self.normals is not None else np.empty((0, d)), dtype=np.float64
        ).reshape(-1, d)
        offsets = np.array(
            self.offsets if self.offsets is not None else np.empty(0), dtype=np.float64
        ).reshape(-1)
        centers = np.array(
            self.centers if self.centers is not None else np.empty((0, d)), dtype=np.float64
        ).reshape(-1, d)
        radii = np.array(
            self.radii if self.radii is not None else np.empty(0), dtype=np.float64
        ).reshape(-1)
        if normals.shape[0] != offsets.shape[0]:
            raise ValueError("normals and offsets must pair up")
        if centers.shape[0] != radii.shape[0]:
            raise ValueError("centers and radii must pair up")
        if normals.shape[0] + centers.shape[0] == 0:
            raise ValueError("domain needs at least one constraint")
        norms = np.linalg.norm(normals, axis=1)
        if normals.shape[0] and np.max(np.abs(norms - 1.0)) > _UNIT_NORM_TOL:
            raise ValueError("halfspace normals must have unit norm")
        if radii.size and np.any(radii <= 0.0):
            raise ValueError("ball radii must be positive")
        if self.interior_point is None:
            raise ValueError("an interior witness point is required")
        witness = np.array(self.interior_point, dtype=np.float64).reshape(d)
        for a in (normals, offsets, centers, radii, witness):
            a.setflags(write=False)
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "interior_point", witness)
        if np.min(self.slacks(witness), initial=np.inf) <= 0.0:
            raise ValueError("witness point is not strictly interior")

    @property
    def n_constraints(self) -> int:
        return int(self.normals.shape[0] + self.centers.shape[0])

    def slacks(self, x: np.ndarray) -> np.ndarray:
        """Signed margins, one per constraint; nonnegative iff x is in the closure."""
        x = np.asarray(x, dtype=np.float64)
        parts = []
        if self.normals.shape[0]:
            parts.append(self.normals @ x - self.offsets)
        if self.centers.shape[0]:
            parts.append(self.radii - np.linalg.norm(x - self.centers, axis=1))
        return np.concatenate(parts) if parts else np.empty(0)

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        return bool(np.min(self.slacks(x)) >= -tol)

    def slack_matrix(self, points: np.ndarray) -> np.ndarray:
        """Slacks for a batch of points, shape (m_points, n_constraints)."""
        points = np.asarray(points, dtype=np.float64)
        parts = []
        if self.normals.shape[0]:
            parts.append(points @ self.normals.T - self.offsets)
        if self.centers.shape[0]:
            diff = points[:, None, :] - self.centers[None, :, :]
            parts.append(self.radii - np.linalg.norm(diff, axis=2))
        return np.concatenate(parts, axis=1)

    def _project_single(self, x: np.ndarray, idx: int) -> np.ndarray:
        """Exact projection onto constraint idx (halfspace first, then balls)."""
        m = self.normals.shape[0]
        if idx < m:
            n = self.normals[idx]
            gap = self.offsets[idx] - n @ x
            if gap <= 0.0:
                return x
            return x + gap * n
        j = idx - m
        c = self.centers[j]
        v = x - c
        dist = np.linalg.norm(v)
        if dist <= self.radii[j]:
            return x
        return c + (self.radii[j] / dist) * v

    def project(
        self,
        x: np.ndarray,
        tol: float = DEFAULT_PROJECT_TOL,
        max_iter: int = DEFAULT_PROJECT_MAX_ITER,
    ) -> np.ndarray:
        """Nearest point of the closure; identity (bit-exact) on the closure."""
        x = np.asarray(x, dtype=np.float64).reshape(self.dimension)
        slacks = self.slacks(x)
        violated = np.flatnonzero(slacks < 0.0)
        if violated.size == 0:
            return x.copy()
        if violated.size == 1:
            p = self._project_single(x, int(violated[0]))
            # exact when no other constraint becomes active
            if np.min(self.slacks(p)) >= -min(tol, 1e-12) * (1.0 + float(np.linalg.norm(p))):
                return p
        return self._dykstra(x, tol, max_iter)

    def _dykstra(self, x: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
        n_sets = self.n_constraints
        y = x.copy()
        corrections = np.zeros((n_sets, self.dimension))
        prev = y.copy()
        for _ in range(max_iter):
            for i in range(n_sets):
                z = y + corrections[i]
                y_new = self._project_single(z, i)
                corrections[i] = z - y_new
                y = y_new
            move = float(np.linalg.norm(y - prev))
            violation = float(max(0.0, -np.min(self.slacks(y))))
            if violation <= tol and move <= tol:
                return y
            prev = y.copy()
        raise ProjectionIterationError(
            f"cyclic projection did not reach tol={tol} in {max_iter} cycles",
            last_iterate=y,
            residual=(violation, move),
        )

    def project_batch(
        self,
        points: np.ndarray,
        tol: float = DEFAULT_PROJECT_TOL,
        max_iter: int = DEFAULT_PROJECT_MAX_ITER,
    ) -> np.ndarray:
        """Row-wise projection; vectorized for the common interior/one-face rows."""
        pts = np.array(points, dtype=np.float64)
        slacks = self.slack_matrix(pts)
        bad = slacks < 0.0
        n_bad = bad.sum(axis=1)
        out = pts.copy()
        single = np.flatnonzero(n_bad == 1)
        if single.size:
            idx = np.argmax(bad[single], axis=1)
            m = self.normals.shape[0]
            hs_rows = single[idx < m]
            if hs_rows.size:
                i = np.argmax(bad[hs_rows], axis=1)
                gaps = self.offsets[i] - np.einsum("ij,ij->i", pts[hs_rows], self.normals[i])
                out[hs_rows] = pts[hs_rows] + gaps[:, None] * self.normals[i]
            ball_rows = single[idx >= m]
            for row in ball_rows:
                out[row] = self._project_single(pts[row], int(np.argmax(bad[row])))
            # rows whose single-constraint projection exposed another constraint
            resl = self.slack_matrix(out[single])
            scale = 1.0 + np.linalg.norm(out[single], axis=1)
            redo = single[np.min(resl, axis=1) < -min(tol, 1e-12) * scale]
            for row in redo:
                out[row] = self._dykstra(pts[row], tol, max_iter)
        for row in np.flatnonzero(n_bad > 1):
            out[row] = self._dykstra(pts[row], tol, max_iter)
        return out

    def distance_to_boundary(self, x: np.ndarray) -> float:
        """Distance to the boundary: min |slack| inside, distance to the set outside."""
        slacks = self.slacks(x)
        if np.min(slacks) >= 0.0:
            return float(np.min(slacks))
        return float(np.linalg.norm(self.project(x) - np.asarray(x, dtype=np.float64)))


def project(
    x,
    domain: ConvexDomain,
    tol: float = DEFAULT_PROJECT_TOL,
    max_iter: int = DEFAULT_PROJECT_MAX_ITER,
) -> np.ndarray:
    return domain.project(np.asarray(x, dtype=np.float64), tol=tol, max_iter=max_iter)


def active_normal_cone(x, domain: ConvexDomain, tol_bd: float | None = None) -> np.ndarray:
    """Unit inward normals of the constraints active at a boundary point.

    The normal cone at x is the set of unit vectors in the nonnegative span
    of the returned generators. Raises if x is farther than tol_bd from the
    boundary (on either side).
    """
    x = np.asarray(x, dtype=np.float64).reshape(domain.dimension)
    if tol_bd is None:
        tol_bd = boundary_tolerance(x)
    slacks = domain.slacks(x)
    if np.min(slacks) < -tol_bd or np.min(np.abs(slacks)) > tol_bd:
        raise ValueError("point is not within tol_bd of the boundary")
    generators = []
    m = domain.normals.shape[0]
    for i in range(m):
        if abs(slacks[i]) <= tol_bd:
            generators.append(domain.normals[i])
    for j in range(domain.centers.shape[0]):
        if abs(slacks[m + j]) <= tol_bd:
            v = domain.centers[j] - x
            generators.append(v / np.linalg.norm(v))
    return np.array(generators).reshape(-1, domain.dimension)


# Ready-made domains used throughout the tests and experiments.

def half_line() -> ConvexDomain:
    """[0, inf) in R^1."""
    return ConvexDomain(1, normals=[[1.0]], offsets=[0.0], interior_point=[1.0])


def halfplane() -> ConvexDomain:
    """{y >= 0} in R^2."""
    return ConvexDomain(2, normals=[[0.0, 1.0]], offsets=[0.0], interior_point=[0.0, 1.0])


def orthant(d: int = 2) -> ConvexDomain:
    """Nonnegative orthant in R^d."""
    return ConvexDomain(d, normals=np.eye(d), offsets=np.zeros(d), interior_point=np.ones(d))


def ball_domain(center, radius: float) -> ConvexDomain:
    center = np.atleast_1d(np.asarray(center, dtype=np.float64))
    return ConvexDomain(
        center.size, centers=[center], radii=[radius], interior_point=center
    )


def unit_disc() -> ConvexDomain:
    return ball_domain([0.0, 0.0], 1.0)


def strip(low: float = 0.0, high: float = 1.0) -> ConvexDomain:
    """{low <= y <= high} in R^2."""
    if not high > low:
        raise ValueError("strip needs high > low")
    return ConvexDomain(
        2,
        normals=[[0.0, 1.0], [0.0, -1.0]],
        offsets=[low, -high],
        interior_point=[0.0, 0.5 * (low + high)],
    )
