"""Stochastic calculus on sampled paths: left-point integrals, quadratic
variation, a residual checker for the change-of-variables formula, and two
local-time estimators.

Every sum here evaluates integrands at the left endpoint of each step. That
convention is fixed at the interface: it is what makes the discrete integral
a martingale transform, and the isometry and zero-mean properties hold for
it exactly in expectation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContractError, EvaluationFault
from .paths import SampledPath, TimeGrid
from .randomness import RngSeed, standard_normals


@dataclass(frozen=True)
class Integrand:
    """Adapted integrand f(t) evaluated from the path history up to t.

    ``evaluate(t, times, values)`` receives the grid times and path values up
    to and including t, never beyond: causality is structural. The optional
    ``evaluate_path`` computes all grid values in one vectorized call and
    must agree with ``evaluate``; it exists so Monte Carlo loops stay fast.
    ``m2_bound`` records a declared square-integrability witness; it is a
    contract, not something checked here (ito_isometry_check gives a
    Monte Carlo spot check of E int f^2 dt).
    """

    evaluate: Callable[[float, np.ndarray, np.ndarray], float]
    m2_bound: float | str = "unverified"
    evaluate_path: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None

    @classmethod
    def constant(cls, c: float) -> "Integrand":
        return cls(
            evaluate=lambda t, ts, xs: c,
            m2_bound=abs(c),
            evaluate_path=lambda ts, xs: np.full_like(xs, c),
        )

    @classmethod
    def of_time(cls, fn: Callable, m2_bound: float | str = "unverified") -> "Integrand":
        """Deterministic integrand t -> fn(t)."""
        return cls(
            evaluate=lambda t, ts, xs: float(fn(t)),
            m2_bound=m2_bound,
            evaluate_path=lambda ts, xs: np.broadcast_to(fn(ts), xs.shape).copy(),
        )

    @classmethod
    def of_state(cls, fn: Callable, m2_bound: float | str = "unverified") -> "Integrand":
        """Markov integrand t -> fn(t, X_t), causal by construction."""
        return cls(
            evaluate=lambda t, ts, xs: float(fn(t, xs[-1])),
            m2_bound=m2_bound,
            evaluate_path=lambda ts, xs: fn(ts, xs),
        )


def integrand_grid_values(f: Integrand, times: np.ndarray, values: np.ndarray) -> np.ndarray:
    """f at every grid point, using the vectorized form when available."""
    if f.evaluate_path is not None:
        vals = np.asarray(f.evaluate_path(times, values), dtype=np.float64)
        if vals.shape != values.shape:
            raise EvaluationFault("vectorized integrand returned a wrong shape")
    else:
        vals = np.empty_like(values)
        for k in range(values.size):
            vals[k] = f.evaluate(times[k], times[: k + 1], values[: k + 1])
    if not np.all(np.isfinite(vals)):
        bad = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise EvaluationFault("integrand produced a non-finite value", step_index=bad)
    return vals


def ito_integral(f: Integrand, B: SampledPath) -> float:
    """Left-point integral sum_k f(t_k) * (B(t_{k+1}) - B(t_k))."""
    if B.dim != 1:
        raise ValueError("driver must be one-dimensional")
    x = B.scalar_values
    vals = integrand_grid_values(f, B.grid.times, x)
    return float(vals[:-1] @ np.diff(x))


@dataclass(frozen=True, eq=False)
class QuadraticVariationPath:
    """Nondecreasing quadratic-variation values on a grid, starting at 0."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        if values.size != len(self.grid):
            raise ValueError("values length must match the grid")
        if values[0] != 0.0:
            raise ValueError("quadratic variation starts at 0")
        if np.any(np.diff(values) < 0.0):
            raise ValueError("quadratic variation must be nondecreasing")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def brownian(cls, grid: TimeGrid) -> "QuadraticVariationPath":
        """The deterministic bracket of Brownian motion: [B](t) = t."""
        return cls(grid, grid.times.copy())


def quadratic_variation(X: SampledPath) -> QuadraticVariationPath:
    """Realized quadratic variation: cumulative sum of squared increments."""
    if X.dim != 1:
        raise ValueError("path must be one-dimensional")
    sq = np.diff(X.scalar_values) ** 2
    values = np.concatenate(([0.0], np.cumsum(sq)))
    return QuadraticVariationPath(X.grid, values)


def _spot_check_partials(F, F_t, F_x, F_xx, times, values) -> None:
    gen = np.random.Generator(np.random.Philox(key=np.array([7, 7], dtype=np.uint64)))
    idx = gen.integers(0, values.size, size=8)
    for k in idx:
        t, x = float(times[k]), float(values[k])
        ht = 1e-5 * (1.0 + abs(t))
        hx = 1e-5 * (1.0 + abs(x))
        s = t + ht  # keeps the centered t-difference inside t >= 0
        fd_t = (F(s + ht, x) - F(s - ht, x)) / (2.0 * ht)
        fd_x = (F(t, x + hx) - F(t, x - hx)) / (2.0 * hx)
        fd_xx = (F_x(t, x + hx) - F_x(t, x - hx)) / (2.0 * hx)
        for name, claimed, fd in (
            ("F_t", F_t(s, x), fd_t),
            ("F_x", F_x(t, x), fd_x),
            ("F_xx", F_xx(t, x), fd_xx),
        ):
            scale = max(1.0, abs(claimed), abs(fd))
            if abs(claimed - fd) > 1e-5 * scale:
                raise ContractError(
                    f"{name} near ({t}, {x}) = {claimed} disagrees with finite difference {fd}"
                )


def ito_formula_residual(
    F: Callable,
    F_t: Callable,
    F_x: Callable,
    F_xx: Callable,
    X: SampledPath,
    qv: QuadraticVariationPath,
) -> float:
    """Defect of the discrete change-of-variables identity for F(t, X_t).

    Returns F(T, X_T) - F(0, X_0) minus the left-point sum of
    F_t dt + F_x dX + (1/2) F_xx d[X], with [X] supplied by the caller
    (realized or model bracket). Partials are spot-checked against finite
    differences before use.
    """
    if X.dim != 1:
        raise ValueError("path must be one-dimensional")
    if not X.grid.same_as(qv.grid):
        raise ValueError("path and quadratic variation must share a grid")
    times = X.grid.times
    x = X.scalar_values
    _spot_check_partials(F, F_t, F_x, F_xx, times, x)
    tl, xl = times[:-1], x[:-1]
    dt = np.diff(times)
    dx = np.diff(x)
    dqv = np.diff(qv.values)
    increment_sum = float(
        np.asarray(F_t(tl, xl)) @ dt
        + np.asarray(F_x(tl, xl)) @ dx
        + 0.5 * np.asarray(F_xx(tl, xl)) @ dqv
    )
    return float(F(times[-1], x[-1]) - F(times[0], x[0]) - increment_sum)


@dataclass(frozen=True)
class LocalTimeEstimate:
    """Estimated sojourn density of a scalar path at one level."""

    level: float
    value: float
    estimator: str  # "occupation" or "tanaka"
    epsilon: float | None = None

    def __post_init__(self):
        if self.estimator == "occupation" and self.value < 0.0:
            raise ValueError("occupation estimate cannot be negative")


def local_time_occupation(X: SampledPath, a: float, eps: float) -> LocalTimeEstimate:
    """Occupation estimate: time spent in (a-eps, a+eps), scaled by 1/(4 eps).

    The indicator is sampled at left endpoints, matching the other sums here.
    """
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    if X.dim != 1:
        raise ValueError("path must be one-dimensional")
    x = X.scalar_values
    inside = np.abs(x[:-1] - a) < eps
    value = float(X.grid.deltas @ inside) / (4.0 * eps)
    return LocalTimeEstimate(level=a, value=value, estimator="occupation", epsilon=eps)


def local_time_tanaka(X: SampledPath, a: float) -> LocalTimeEstimate:
    """Tanaka estimate: (X_T - a)^+ - (X_0 - a)^+ - int 1{X > a} dX.

    The integral term reuses ito_integral so the discretization convention
    cannot drift from the rest of the module.
    """
    if X.dim != 1:
        raise ValueError("path must be one-dimensional")
    x = X.scalar_values
    indicator = Integrand.of_state(
        lambda t, xs: (xs > a).astype(np.float64), m2_bound=1.0
    )
    value = max(x[-1] - a, 0.0) - max(x[0] - a, 0.0) - ito_integral(indicator, X)
    return LocalTimeEstimate(level=a, value=float(value), estimator="tanaka")


def ito_isometry_check(
    f: Integrand,
    T: float,
    n_paths: int,
    rng: RngSeed,
    n_steps: int = 1000,
    first_stream: int = 0,
):
    """Monte Carlo estimates of E[(int_0^T f dB)^2] and E[int_0^T f^2 dt].

    Path i draws its increments from stream first_stream + i, so estimates
    are reproducible and independent of batching. Returns (lhs, rhs) as
    McEstimate values.
    """
    from .stats import McEstimate  # local import to keep module layering simple

    if n_paths < 2:
        raise ValueError("need at least 2 paths")
    grid = TimeGrid.uniform(T, n_steps)
    times = grid.times
    sqrt_dt = np.sqrt(grid.deltas)
    dt = grid.deltas
    lhs_samples = np.empty(n_paths)
    rhs_samples = np.empty(n_paths)
    for i in range(n_paths):
        gen = rng.with_stream(first_stream + i).generator()
        dB = standard_normals(gen, n_steps) * sqrt_dt
        x = np.concatenate(([0.0], np.cumsum(dB)))
        vals = integrand_grid_values(f, times, x)
        lhs_samples[i] = vals[:-1] @ dB
        rhs_samples[i] = (vals[:-1] ** 2) @ dt
    lhs_samples **= 2
    return McEstimate.from_samples(lhs_samples), McEstimate.from_samples(rhs_samples)
