"""Multi-dimensional Skorokhod problem X = w + phi on a convex domain.

The step-input construction projects the free motion back into the closure
at every jump; the pushing term phi is the accumulated projection
displacement, its total variation the accumulated displacement norms. For
continuous inputs the same recursion runs on successively refined grids
until successive solutions agree in sup norm.

Two inequality checks (pairwise contraction and the modulus bound) and the
two geometric solvability conditions round out the test apparatus.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import linprog, nnls

from .domains import (
    DEFAULT_PROJECT_MAX_ITER,
    DEFAULT_PROJECT_TOL,
    ConvexDomain,
    active_normal_cone,
    boundary_tolerance,
)
from .errors import RefinementLimitError
from .paths import PathKind, SampledPath, TimeGrid

ANGULAR_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class SkorokhodNdSolution:
    """Confined path X, pushing term phi, and its running total variation.

    ``directions[k]`` is the unit direction of the phi increment arriving at
    grid index k; rows are NaN where the increment is zero (the direction is
    only defined where pushing happens).
    """

    X: SampledPath
    phi: SampledPath
    total_variation: np.ndarray
    directions: np.ndarray
    refine_gaps: tuple = ()
    tv_by_level: tuple = ()

    def __post_init__(self):
        tv = np.array(self.total_variation, dtype=np.float64).reshape(-1)
        dirs = np.array(self.directions, dtype=np.float64)
        if tv.size != len(self.X.grid) or dirs.shape != self.X.values.shape:
            raise ValueError("total_variation and directions must match the grid")
        if tv[0] != 0.0 or np.any(np.diff(tv) < 0.0):
            raise ValueError("total variation must be nondecreasing from 0")
        tv.setflags(write=False)
        dirs.setflags(write=False)
        object.__setattr__(self, "total_variation", tv)
        object.__setattr__(self, "directions", dirs)

    @property
    def driver_values(self) -> np.ndarray:
        """The input path recovered from X - phi."""
        return self.X.values - self.phi.values


def _reflect_on_grid(
    times: np.ndarray,
    wv: np.ndarray,
    domain: ConvexDomain,
    tol: float,
    max_iter: int,
):
    n, d = wv.shape
    if np.min(domain.slacks(wv[0])) < 0.0:
        raise ValueError("driver must start inside the closed domain")
    X = np.empty_like(wv)
    phi = np.zeros_like(wv)
    tv = np.zeros(n)
    dirs = np.full((n, d), np.nan)
    X[0] = wv[0]
    acc = np.zeros(d)  # phi(t_k), kept as X - w so the decomposition is exact
    acc_tv = 0.0
    for k in range(n - 1):
        free = wv[k + 1] + acc
        landed = domain.project(free, tol=tol, max_iter=max_iter)
        X[k + 1] = landed
        if np.array_equal(landed, free):
            # no pushing: keep phi bitwise unchanged so interior steps carry
            # exactly zero mass
            phi[k + 1] = acc
            tv[k + 1] = acc_tv
            continue
        new_acc = landed - wv[k + 1]
        dphi = new_acc - acc
        acc = new_acc
        phi[k + 1] = acc
        step_norm = float(np.linalg.norm(dphi))
        acc_tv += step_norm
        tv[k + 1] = acc_tv
        if step_norm > 0.0:
            dirs[k + 1] = dphi / step_norm
    return X, phi, tv, dirs


def solve_skorokhod_step(
    w: SampledPath,
    domain: ConvexDomain,
    tol: float = DEFAULT_PROJECT_TOL,
    max_iter: int = DEFAULT_PROJECT_MAX_ITER,
) -> SkorokhodNdSolution:
    """Reflect a cadlag step input: project after every jump of w."""
    if w.kind is not PathKind.STEP:
        raise ValueError("solve_skorokhod_step expects a step path")
    X, phi, tv, dirs = _reflect_on_grid(w.grid.times, w.values, domain, tol, max_iter)
    return SkorokhodNdSolution(
        X=SampledPath.step(w.grid, X),
        phi=SampledPath.step(w.grid, phi),
        total_variation=tv,
        directions=dirs,
    )


def _refine_linear(times: np.ndarray, wv: np.ndarray, factor: int):
    """Insert factor-1 equally spaced points per interval, interpolating w linearly."""
    n = times.size
    new_times = np.empty((n - 1) * factor + 1)
    new_vals = np.empty(((n - 1) * factor + 1, wv.shape[1]))
    for j in range(factor):
        frac = j / factor
        new_times[j::factor][: n - 1] = times[:-1] + frac * np.diff(times)
        new_vals[j::factor][: n - 1] = wv[:-1] + frac * np.diff(wv, axis=0)
    new_times[-1] = times[-1]
    new_vals[-1] = wv[-1]
    return new_times, new_vals


def solve_skorokhod_continuous(
    w: SampledPath,
    domain: ConvexDomain,
    refine_tol: float | None = None,
    max_levels: int = 6,
    refine_factor: int = 2,
    tol: float = DEFAULT_PROJECT_TOL,
    max_iter: int = DEFAULT_PROJECT_MAX_ITER,
) -> SkorokhodNdSolution:
    """Reflect a piecewise-linear input by grid refinement.

    Solves the step recursion on the input grid, then on grids refined by
    ``refine_factor`` (linear interpolation of w) until the sup distance
    between successive solutions, measured at the coarser grid's times,
    drops to ``refine_tol`` (default 1e-4 times the path scale). Raises
    RefinementLimitError with the gap sequence when max_levels is exhausted.
    """
    if w.kind is not PathKind.CONTINUOUS:
        raise ValueError("solve_skorokhod_continuous expects a continuous path")
    if refine_factor < 2:
        raise ValueError("refine_factor must be at least 2")
    if refine_tol is None:
        refine_tol = 1e-4 * w.scale()
    times = w.grid.times.copy()
    wv = w.values.copy()
    gaps: list[float] = []
    tvs: list[float] = []
    prev_X = None
    for level in range(max_levels + 1):
        X, phi, tv, dirs = _reflect_on_grid(times, wv, domain, tol, max_iter)
        tvs.append(float(tv[-1]))
        converged = False
        if tv[-1] == 0.0:
            # no pushing at all: w stays in the (convex) closure, X = w exactly
            gaps.append(0.0)
            converged = True
        elif prev_X is not None:
            gap = float(np.max(np.linalg.norm(X[::refine_factor] - prev_X, axis=1)))
            gaps.append(gap)
            converged = gap <= refine_tol
        if converged:
            grid = TimeGrid(times)
            return SkorokhodNdSolution(
                X=SampledPath.continuous(grid, X),
                phi=SampledPath.continuous(grid, phi),
                total_variation=tv,
                directions=dirs,
                refine_gaps=tuple(gaps),
                tv_by_level=tuple(tvs),
            )
        if level == max_levels:
            break
        prev_X = X
        times, wv = _refine_linear(times, wv, refine_factor)
    if len(tvs) >= 2 and tvs[-1] > 50.0 * (1.0 + tvs[0]):
        warnings.warn(
            "pushing-term total variation grew by a large factor across refinement "
            f"levels: {tvs}; the refinement sequence may not be converging",
            RuntimeWarning,
        )
    raise RefinementLimitError(
        f"refinement gaps {gaps} did not reach tol={refine_tol} "
        f"within {max_levels} levels",
        gaps=tuple(gaps),
    )


def _check_same_grid(a: SkorokhodNdSolution, b: SkorokhodNdSolution) -> None:
    if not a.X.grid.same_as(b.X.grid):
        raise ValueError("solutions must share a grid")


def tanaka_inequality_gap(sol: SkorokhodNdSolution, other: SkorokhodNdSolution) -> float:
    """Slack of the pairwise contraction inequality, minimized over grid times.

    For solutions (X, phi), (X~, phi~) of inputs w, w~ the bound

        |X - X~|^2 <= |w - w~|^2 + 2 int (w - w~ - w(s) + w~(s)) d(phi - phi~)

    holds with the integrand read at each atom of the pushing measure (the
    grid point where the increment lands). Returns min_t RHS(t) - LHS(t);
    a correct solver keeps this above -1e-9 times the path scale.
    """
    _check_same_grid(sol, other)
    u = sol.driver_values - other.driver_values
    delta = sol.phi.values - other.phi.values
    diff_x = sol.X.values - other.X.values
    ddelta = np.diff(delta, axis=0)
    atom_terms = np.einsum("ij,ij->i", u[1:], ddelta)
    cum_atoms = np.concatenate(([0.0], np.cumsum(atom_terms)))
    rhs = np.einsum("ij,ij->i", u, u) + 2.0 * (np.einsum("ij,ij->i", u, delta) - cum_atoms)
    lhs = np.einsum("ij,ij->i", diff_x, diff_x)
    return float(np.min(rhs - lhs))


def modulus_gap(sol: SkorokhodNdSolution, s: float, t: float) -> float:
    """Slack of the oscillation bound between two grid times s <= t.

    Checks |X(t) - X(s)|^2 <= |w(t) - w(s)|^2 + 2 int_(s,t] (w(t) - w(tau))
    d phi(tau), with the integrand read at the atoms of the pushing measure.
    """
    if s > t:
        raise ValueError("need s <= t")
    times = sol.X.grid.times
    i = int(np.searchsorted(times, s))
    n = int(np.searchsorted(times, t))
    if i >= times.size or times[i] != s or n >= times.size or times[n] != t:
        raise ValueError("s and t must be grid times")
    w = sol.driver_values
    X = sol.X.values
    phi = sol.phi.values
    lhs = float(np.sum((X[n] - X[i]) ** 2))
    rhs = float(np.sum((w[n] - w[i]) ** 2))
    if n > i:
        dphi = np.diff(phi[i : n + 1], axis=0)
        rhs += 2.0 * float(np.einsum("ij,ij->i", w[n] - w[i + 1 : n + 1], dphi).sum())
    return rhs - lhs


@dataclass(frozen=True)
class ConditionAResult:
    status: Literal["holds", "fails", "unknown"]
    e: np.ndarray | None = None
    c: float | None = None
    detail: str = ""


@dataclass(frozen=True)
class ConditionBResult:
    status: Literal["holds", "unknown"]
    delta: float | None = None
    reason: str = ""


@dataclass(frozen=True)
class DomainConditionReport:
    condition_a: ConditionAResult | None = None
    condition_b: ConditionBResult | None = None


def _project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    mask = u - css / ind > 0.0
    rho = ind[mask][-1]
    theta = css[mask][-1] / rho
    return np.maximum(v - theta, 0.0)


def check_condition_a(domain: ConvexDomain, grid_density: int = 32) -> DomainConditionReport:
    """Search for a unit vector making a positive angle with every face normal.

    The best such vector is the normalized minimum-norm point of the convex
    hull of the halfspace normals; that point is found by projected gradient
    on the simplex of hull weights, started from the centroid and refined
    for a number of sweeps scaled by ``grid_density``. Ball boundaries
    contribute a continuum of normals and are not analyzed: domains with
    ball constraints report unknown.
    """
    if domain.dimension > 8:
        raise ValueError("condition A search is not supported above dimension 8")
    if domain.centers.shape[0] > 0:
        return DomainConditionReport(
            condition_a=ConditionAResult(
                status="unknown",
                detail="ball constraints contribute a continuum of boundary normals",
            )
        )
    normals = domain.normals
    m = normals.shape[0]
    gram = normals @ normals.T
    antipodal = np.min(gram) <= -1.0 + 1e-9
    if antipodal:
        return DomainConditionReport(
            condition_a=ConditionAResult(
                status="fails",
                detail="two face normals are antipodal; no direction can make a "
                "positive angle with both",
            )
        )
    lam = np.full(m, 1.0 / m)
    step = 0.5 / max(float(np.linalg.norm(gram, 2)), 1e-12)
    for _ in range(max(200, 40 * grid_density)):
        lam = _project_simplex(lam - step * 2.0 * (gram @ lam))
    mu = normals.T @ lam
    norm_mu = float(np.linalg.norm(mu))
    if norm_mu <= 1e-7:
        return DomainConditionReport(
            condition_a=ConditionAResult(
                status="unknown",
                detail="origin appears to lie in the hull of the normals but no "
                "antipodal certificate was found",
            )
        )
    e = mu / norm_mu
    c = float(np.min(normals @ e))
    if c <= 0.0:
        return DomainConditionReport(
            condition_a=ConditionAResult(status="unknown", detail="search was inconclusive")
        )
    return DomainConditionReport(condition_a=ConditionAResult(status="holds", e=e, c=c))


def check_condition_b(domain: ConvexDomain) -> DomainConditionReport:
    """Report the geometric interior-ball condition via its sufficient cases.

    Holds when the domain is bounded (a ball constraint, or every coordinate
    direction bounded as a linear program) or when the dimension is 2;
    otherwise unknown (no general decision procedure is attempted).
    """
    if domain.centers.shape[0] > 0:
        return DomainConditionReport(
            condition_b=ConditionBResult(status="holds", reason="bounded: contained in a ball")
        )
    bounded = True
    A_ub = -domain.normals
    b_ub = -domain.offsets
    for j in range(domain.dimension):
        for sign in (1.0, -1.0):
            c = np.zeros(domain.dimension)
            c[j] = -sign  # maximize sign * x_j
            res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=(None, None), method="highs")
            if res.status == 3:
                bounded = False
                break
            if res.status != 0:
                return DomainConditionReport(
                    condition_b=ConditionBResult(
                        status="unknown", reason=f"boundedness LP ended with {res.message}"
                    )
                )
        if not bounded:
            break
    if bounded:
        return DomainConditionReport(
            condition_b=ConditionBResult(
                status="holds", reason="bounded: every coordinate is bounded"
            )
        )
    if domain.dimension == 2:
        return DomainConditionReport(
            condition_b=ConditionBResult(status="holds", reason="dimension 2")
        )
    return DomainConditionReport(
        condition_b=ConditionBResult(
            status="unknown", reason="unbounded with dimension > 2; no decision procedure"
        )
    )


def nd_solution_diagnostics(
    sol: SkorokhodNdSolution,
    w: SampledPath,
    domain: ConvexDomain,
    containment_tol: float | None = None,
) -> dict:
    """Quantitative check of the defining conditions of a reflected solution.

    Returns the max decomposition defect |X - w - phi|, the worst containment
    violation, the pushing mass spent at interior points, the max angle
    between pushing directions and the local normal cone, and the defect of
    |phi| against its increment norms.
    """
    X = sol.X.values
    phi = sol.phi.values
    wv = w.values
    scale = max(1.0, float(np.max(np.abs(wv))))
    if containment_tol is None:
        containment_tol = 1e-9 * scale
    decomposition = float(np.max(np.linalg.norm(X - (wv + phi), axis=1)))
    slack_min = float(np.min(domain.slack_matrix(X)))
    dphi = np.diff(phi, axis=0)
    dphi_norms = np.linalg.norm(dphi, axis=1)
    tv_defect = float(np.max(np.abs(np.diff(sol.total_variation) - dphi_norms)))
    interior_mass = 0.0
    max_angular_gap = 0.0
    for k in np.flatnonzero(dphi_norms > 0.0):
        landing = X[k + 1]
        tol_bd = boundary_tolerance(landing)
        if domain.distance_to_boundary(landing) > tol_bd:
            interior_mass += float(dphi_norms[k])
            continue
        generators = active_normal_cone(landing, domain, tol_bd)
        unit = dphi[k] / dphi_norms[k]
        if generators.shape[0] == 0:
            max_angular_gap = max(max_angular_gap, float(np.linalg.norm(unit)))
            continue
        _, residual = nnls(generators.T, unit)
        max_angular_gap = max(max_angular_gap, float(residual))
    return {
        "decomposition_max_abs": decomposition,
        "containment_worst_slack": slack_min,
        "containment_tol": containment_tol,
        "interior_pushing_mass": interior_mass,
        "max_angular_gap": max_angular_gap,
        "tv_increment_defect": tv_defect,
        "phi_start_norm": float(np.linalg.norm(phi[0])),
    }
