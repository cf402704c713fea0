"""Diffusion Markov processes as simulatable objects.

A process is specified by its osmotic velocity field u, current velocity
field v and scalar diffusion coefficient w.  The forward and backward
drifts follow as v+ = v + u and v- = v - u.  Paths are generated with the
explicit Euler-Maruyama scheme; ensembles derive one sub-seed per path
from a master seed with a fixed 64-bit mixing function, so results are
reproducible and independent of execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DegeneratePath, InsufficientPaths, NonFinitePath

# Velocity fields map (x, t) -> velocity and must accept numpy arrays in x.
VelocityField = Callable[..., "np.ndarray | float"]

# |x| beyond this aborts a path: far outside any physical domain used here,
# cheap overflow guard against dt too large for the drift.
OVERFLOW_GUARD = 1.0e12

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """splitmix64 finalizer (Steele, Lea & Flood 2014)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def sub_seed(master_seed: int, index: int) -> int:
    """Deterministic 64-bit sub-seed for path `index` of an ensemble."""
    return _mix64((master_seed + (index + 1) * _GOLDEN) & _MASK64)


@dataclass(frozen=True)
class DiffusionSpec:
    """A diffusion Markov process model in one dimension.

    Parameters
    ----------
    u_field, v_field : callable (x, t) -> velocity
        Osmotic and current velocity fields (dimensionless units).
    w : float
        Diffusion coefficient, strictly positive; 1/2 for the rescaled
        oscillator.
    dimension : int
        Kept for future extension; this artifact fixes it to 1.
    label : str
        Free-form tag.
    """

    u_field: VelocityField
    v_field: VelocityField
    w: float
    dimension: int = 1
    label: str = ""

    def __post_init__(self):
        if not self.w > 0.0:
            raise ValueError(f"diffusion coefficient must be > 0, got {self.w}")
        if self.dimension != 1:
            raise ValueError("only dimension 1 is supported")

    def v_plus(self, x, t):
        """Forward drift v + u."""
        return self.v_field(x, t) + self.u_field(x, t)

    def v_minus(self, x, t):
        """Backward drift v - u."""
        return self.v_field(x, t) - self.u_field(x, t)


def drift_decomposition(v_plus: VelocityField, v_minus: VelocityField):
    """Split forward/backward drifts into (osmotic u, current v) fields.

    u = (v+ - v-)/2 and v = (v+ + v-)/2; the reconstruction v+ = v + u,
    v- = v - u holds pointwise exactly.
    """
    def u(x, t):
        return 0.5 * (v_plus(x, t) - v_minus(x, t))

    def v(x, t):
        return 0.5 * (v_plus(x, t) + v_minus(x, t))

    return u, v


@dataclass(frozen=True)
class SamplePath:
    """One simulated trajectory with its reproducibility metadata.

    `states[k]` is the position at time t0 + k*dt (forward) or t0 - k*dt
    (backward); t1 is the snapped end time t0 +/- n_steps*dt.
    """

    t0: float
    t1: float
    dt: float
    states: np.ndarray
    seed: int
    direction: str = "forward"

    def __post_init__(self):
        object.__setattr__(self, "states", np.asarray(self.states, dtype=float))

    @property
    def n_steps(self) -> int:
        return self.states.size - 1

    def times(self) -> np.ndarray:
        sign = 1.0 if self.direction == "forward" else -1.0
        return self.t0 + sign * self.dt * np.arange(self.states.size)


@dataclass(frozen=True)
class Ensemble:
    """A bundle of independent paths sharing anchor, step and direction.

    The state matrix has one row per path; row k was generated from
    sub_seed(master_seed, k), so the ensemble is reproducible regardless
    of how the rows were scheduled.
    """

    states: np.ndarray
    t0: float
    dt: float
    master_seed: int
    anchor: tuple
    direction: str = "forward"

    @property
    def n_paths(self) -> int:
        return self.states.shape[0]

    @property
    def n_steps(self) -> int:
        return self.states.shape[1] - 1

    @property
    def t1(self) -> float:
        sign = 1.0 if self.direction == "forward" else -1.0
        return self.t0 + sign * self.n_steps * self.dt

    @property
    def paths(self) -> tuple:
        """Per-path views of the state matrix as SamplePath objects."""
        return tuple(
            SamplePath(self.t0, self.t1, self.dt, self.states[k],
                       sub_seed(self.master_seed, k), self.direction)
            for k in range(self.n_paths)
        )

    def times(self) -> np.ndarray:
        sign = 1.0 if self.direction == "forward" else -1.0
        return self.t0 + sign * self.dt * np.arange(self.states.shape[1])


def _n_steps(t0: float, horizon: float, dt: float, direction: str) -> int:
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    span = horizon - t0
    if direction == "forward":
        if span < 0:
            raise ValueError("forward horizon must not precede t0")
    elif direction == "backward":
        if span > 0:
            raise ValueError("backward horizon must not follow t0")
        span = -span
    else:
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    return int(round(span / dt))


def simulate_path(spec: DiffusionSpec, anchor, horizon: float, dt: float,
                  seed: int, direction: str = "forward") -> SamplePath:
    """Euler-Maruyama sample path from `anchor` = (x0, t0) to `horizon`.

    Forward steps use the drift v+ = v + u; backward steps run over
    reversed time with the drift v-, i.e. x(t-dt) = x(t) - v-(x,t)dt plus
    the same sqrt(2 w dt) noise.  Identical inputs reproduce identical
    states bit for bit.
    """
    x0, t0 = anchor
    n = _n_steps(t0, horizon, dt, direction)
    rng = np.random.Generator(np.random.PCG64(seed & _MASK64))
    noise = rng.standard_normal(n)
    states = _scalar_walk(spec, float(x0), float(t0), dt, noise, direction)
    sign = 1.0 if direction == "forward" else -1.0
    return SamplePath(t0, t0 + sign * n * dt, dt, states, seed, direction)


def _scalar_walk(spec, x0, t0, dt, noise, direction):
    """Sequential scalar recursion; python floats keep the loop cheap."""
    forward = direction == "forward"
    drift = spec.v_plus if forward else spec.v_minus
    sigma = math.sqrt(2.0 * spec.w * dt)
    tsign = dt if forward else -dt
    dsign = dt if forward else -dt
    ssign = sigma if forward else -sigma
    xs = [x0]
    x = x0
    t = t0
    append = xs.append
    for xi in noise.tolist():
        x = x + drift(x, t) * dsign + ssign * xi
        if not (-OVERFLOW_GUARD < x < OVERFLOW_GUARD):
            raise NonFinitePath(
                f"state overflow |x| > {OVERFLOW_GUARD:g} at t={t:g}; "
                "dt is likely too large for the drift")
        t = t + tsign
        append(x)
    return np.asarray(xs)


def simulate_ensemble(spec: DiffusionSpec, anchor, horizon: float, dt: float,
                      n_paths: int, master_seed: int,
                      direction: str | None = None) -> Ensemble:
    """Simulate `n_paths` independent paths from a common anchor.

    Path k uses sub_seed(master_seed, k) and is bitwise identical to the
    corresponding `simulate_path` call.  The direction is inferred from
    the side of the horizon unless given explicitly.
    """
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    x0, t0 = anchor
    if direction is None:
        direction = "backward" if horizon < t0 else "forward"
    n = _n_steps(t0, horizon, dt, direction)

    noise = np.empty((n_paths, n), dtype=float)
    for k in range(n_paths):
        rng = np.random.Generator(np.random.PCG64(sub_seed(master_seed, k)))
        noise[k] = rng.standard_normal(n)

    forward = direction == "forward"
    drift = spec.v_plus if forward else spec.v_minus
    sigma = math.sqrt(2.0 * spec.w * dt)
    dsign = dt if forward else -dt
    ssign = sigma if forward else -sigma
    tsign = dt if forward else -dt

    states = np.empty((n_paths, n + 1), dtype=float)
    states[:, 0] = float(x0)
    x = states[:, 0].copy()
    t = float(t0)
    for k in range(n):
        x = x + drift(x, t) * dsign + ssign * noise[:, k]
        bad = ~np.isfinite(x) | (np.abs(x) >= OVERFLOW_GUARD)
        if bad.any():
            idx = int(np.flatnonzero(bad)[0])
            raise NonFinitePath(
                f"state overflow in path {idx} at t={t:g}; "
                "dt is likely too large for the drift", path_index=idx)
        t = t + tsign
        states[:, k + 1] = x
    return Ensemble(states, float(t0), dt, master_seed, (float(x0), float(t0)),
                    direction)


def _lag_index(dt: float, lag: float, n_steps: int) -> int:
    m = lag / dt
    mi = int(round(m))
    if mi < 1 or abs(m - mi) > 1e-9 * max(1.0, abs(m)):
        raise ValueError(f"lag {lag} is not a positive multiple of dt {dt}")
    if mi > n_steps:
        raise ValueError(f"lag {lag} exceeds the simulated horizon")
    return mi


def estimate_drift(ensemble: Ensemble, lag: float, direction: str = "forward"):
    """Conditional first-moment drift estimate at the anchor.

    Forward: mean of (x(t0+lag) - x0)/lag.  Backward (on backward
    ensembles): mean of (x0 - x(t0-lag))/lag.  Returns (estimate,
    standard error).
    """
    if ensemble.n_paths < 2:
        raise InsufficientPaths("need at least 2 paths for a standard error")
    if direction != ensemble.direction:
        raise ValueError(
            f"{direction} drift requested from a {ensemble.direction} ensemble")
    m = _lag_index(ensemble.dt, lag, ensemble.n_steps)
    x0 = ensemble.anchor[0]
    if direction == "forward":
        samples = (ensemble.states[:, m] - x0) / lag
    else:
        samples = (x0 - ensemble.states[:, m]) / lag
    est = float(np.mean(samples))
    se = float(np.std(samples, ddof=1) / math.sqrt(ensemble.n_paths))
    return est, se


def estimate_diffusion(ensemble: Ensemble, lag: float):
    """Conditional second-moment estimate of w: mean of (dx)^2 / (2 lag)."""
    if ensemble.n_paths < 2:
        raise InsufficientPaths("need at least 2 paths for a standard error")
    m = _lag_index(ensemble.dt, lag, ensemble.n_steps)
    x0 = ensemble.anchor[0]
    samples = (ensemble.states[:, m] - x0) ** 2 / (2.0 * lag)
    est = float(np.mean(samples))
    se = float(np.std(samples, ddof=1) / math.sqrt(ensemble.n_paths))
    return est, se


def quadratic_variation_exponent(path: SamplePath, lags: Sequence[float]):
    """Scaling exponent of mean squared increments and realized QV rate.

    Fits the least-squares slope of log E[(dx)^2] against log(lag) along
    the path (exponent 1 for diffusive roughness, 2 for smooth paths) and
    returns with it the realized quadratic variation per unit time at the
    finest lag, which approaches 2w for a diffusion.
    """
    if len(set(float(l) for l in lags)) < 3:
        raise ValueError("need at least 3 distinct lags")
    x = path.states
    if np.max(x) == np.min(x):
        raise DegeneratePath("constant path has no displacement statistics")
    ms = []
    idx = sorted(_lag_index(path.dt, lag, path.n_steps) for lag in set(lags))
    for m in idx:
        d = x[m:] - x[:-m]
        ms.append(np.mean(d * d))
    tau = np.asarray(idx, dtype=float) * path.dt
    slope = np.polyfit(np.log(tau), np.log(ms), 1)[0]
    m0 = idx[0]
    steps = x[::m0]
    d0 = np.diff(steps)
    covered = (steps.size - 1) * m0 * path.dt
    qv_rate = float(np.sum(d0 * d0) / covered)
    return float(slope), qv_rate
