"""Trajectory integration in the complex and Darboux descriptions.

Three one-step methods are provided:

* ``rk4``   - classical fixed-step Runge-Kutta, samples every dt;
* ``rk45``  - adaptive Dormand-Prince 5(4) with PI-free elementary step
  control, samples at accepted steps, dense output by cubic Hermite
  interpolation;
* ``split`` - Strang splitting of h = F(p1, x2) + G(x1, p2) in the Darboux
  frame; both partial flows are exactly solvable (F leaves (p1, x2) fixed,
  G leaves (x1, p2) fixed), so each step is an exact composition of
  Hamiltonian flows and preserves the standard symplectic two-form.

Escape through ``escape_radius`` is a normal termination (cubic and quartic
potentials reach infinity in finite time from generic data); a controller
step-size underflow is reported as ``terminated_by="step_failure"``.

Monitored invariants: the energy split (H_r, H_i) per sample, with maximum
drift from the initial value recorded on the trajectory.  H_i is an
independent integral of motion; its flow (the symmetry generated through
the standard bracket) is integrated by ``invariant_flow``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .hamiltonian import (
    ComplexPhasePoint,
    DarbouxPoint,
    SystemSpec,
    darboux_to_w,
    hamiltonian_split,
    w_to_darboux,
)
from .potentials import PotentialOverflowError

__all__ = [
    "METHOD_ALIASES",
    "IntegratorConfig",
    "FlowConfig",
    "Trajectory",
    "ConstraintUnsolvableError",
    "ConstraintFreeError",
    "GridMismatchError",
    "EquivalenceReport",
    "integrate_complex",
    "integrate_darboux",
    "split_step",
    "phase_to_darboux",
    "darboux_to_phase",
    "invariant_flow",
    "invariant_flow_field",
    "solve_invariant_zero",
    "equivalence_report",
]

_SQRT2 = math.sqrt(2.0)

METHOD_ALIASES = {
    "rk4": "rk4", "fixed-rk4": "rk4",
    "rk45": "rk45", "adaptive-rk45": "rk45",
    "split": "split", "split-step": "split",
}

# Adaptive controller underflow threshold: below this step size the
# integration is abandoned as a step failure.
_MIN_STEP = 1e-14


class ConstraintUnsolvableError(ZeroDivisionError):
    """H_i = 0 has no solution for x2: p1 = 0 while v_i != 0."""


class ConstraintFreeError(ValueError):
    """Every x2 satisfies H_i = 0: p1 = 0 and v_i = 0 at the point."""


class GridMismatchError(ValueError):
    """Trajectories cover different time ranges; no common comparison grid."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration settings.

    dt applies to the fixed-step methods, (rel_tol, abs_tol) to the adaptive
    one.  Defaults favor the conservation tests: adaptive rk45 at 1e-10.
    """

    method: str = "rk45"
    dt: float = 1e-3
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    t_end: float = 10.0
    escape_radius: float = 1e3

    def __post_init__(self):
        if self.method not in METHOD_ALIASES:
            raise ValueError(f"unknown method {self.method!r}; "
                             f"expected one of {sorted(set(METHOD_ALIASES))}")
        object.__setattr__(self, "method", METHOD_ALIASES[self.method])
        if not (self.t_end >= 0.0 and math.isfinite(self.t_end)):
            raise ValueError("t_end must be a finite nonnegative real")
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValueError("dt must be a positive finite real")
        if self.t_end > 0.0 and self.method != "rk45" and self.dt > self.t_end:
            raise ValueError("dt must not exceed t_end")
        for name in ("rel_tol", "abs_tol"):
            tol = getattr(self, name)
            if not (0.0 < tol <= 1e-2):
                raise ValueError(f"{name} must lie in (0, 1e-2], got {tol!r}")
        if not (self.escape_radius > 0.0):
            raise ValueError("escape_radius must be positive")


@dataclass(frozen=True)
class FlowConfig:
    """Settings for the H_i symmetry flow in the flow parameter epsilon."""

    epsilon_end: float = 1.0
    d_epsilon: float = 1e-3

    def __post_init__(self):
        if not math.isfinite(self.epsilon_end):
            raise ValueError("epsilon_end must be finite")
        if not (self.d_epsilon > 0.0 and math.isfinite(self.d_epsilon)):
            raise ValueError("d_epsilon must be a positive finite real")


@dataclass
class Trajectory:
    """Sampled trajectory with per-sample invariants and drift statistics.

    ``states`` holds w = (x, p, y, q) rows for frame "complex" and
    xi = (x1, p1, x2, p2) rows for frame "darboux"; ``derivs`` holds the
    vector field at each sample (used for cubic Hermite dense output).
    For flows in epsilon, ``t`` carries the flow parameter.  Treat instances
    as read-only once produced; batch runs over initial conditions may then
    integrate concurrently with no shared mutable state.
    """

    frame: str
    t: np.ndarray
    states: np.ndarray
    derivs: np.ndarray
    hr: np.ndarray
    hi: np.ndarray
    terminated_by: str
    n_steps: int
    drift_hr: float = field(init=False)
    drift_hi: float = field(init=False)

    def __post_init__(self):
        self.drift_hr = _max_drift(self.hr)
        self.drift_hi = _max_drift(self.hi)

    def state_at(self, t_query: float) -> np.ndarray:
        """Cubic Hermite interpolation between recorded samples."""
        return _hermite(self.t, self.states, self.derivs, float(t_query))

    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _max_drift(values: np.ndarray) -> float:
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return math.nan
    return float(np.max(np.abs(finite - values[0]))) if np.isfinite(values[0]) else math.nan


def _hermite(ts: np.ndarray, ys: np.ndarray, ds: np.ndarray, tq: float) -> np.ndarray:
    if len(ts) == 1:
        return ys[0].copy()
    i = int(np.searchsorted(ts, tq, side="right")) - 1
    i = min(max(i, 0), len(ts) - 2)
    h = ts[i + 1] - ts[i]
    if h == 0.0:
        return ys[i].copy()
    s = (tq - ts[i]) / h
    h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
    h10 = s * (1.0 - s) ** 2
    h01 = s * s * (3.0 - 2.0 * s)
    h11 = s * s * (s - 1.0)
    return h00 * ys[i] + h * h10 * ds[i] + h01 * ys[i + 1] + h * h11 * ds[i + 1]


# --------------------------------------------------------------------------
# Vector fields
# --------------------------------------------------------------------------


def _complex_rhs(spec: SystemSpec) -> Callable[[np.ndarray], np.ndarray]:
    dv = spec._dv  # raw compiled closure; overflow handled by the stepper
    m = spec.mass

    def rhs(w):
        d = dv(complex(w[0], w[2]))
        return np.array([w[1] / m, -d.real, w[3] / m, -d.imag])

    return rhs


def _darboux_rhs(spec: SystemSpec) -> Callable[[np.ndarray], np.ndarray]:
    dv = spec._dv
    m = spec.mass

    def rhs(xi):
        d = dv(complex(xi[0], xi[3]) / _SQRT2)
        return np.array([xi[1] / m, -_SQRT2 * d.real, -_SQRT2 * d.imag, xi[2] / m])

    return rhs


def invariant_flow_field(spec: SystemSpec, xi) -> np.ndarray:
    """Generator of the H_i symmetry through the standard bracket.

    d(xi)/d(epsilon) = {xi, H_i} = (x2/(2m), -Im v'/sqrt2, Re v'/sqrt2,
    -p1/(2m)) with v' evaluated at (x1 + i p2)/sqrt(2); one infinitesimal
    step xi + eps * field is the first-order symmetry transformation.
    """
    xi = np.asarray(xi, dtype=float)
    d = spec.dv(complex(xi[0], xi[3]) / _SQRT2)
    m2 = 2.0 * spec.mass
    return np.array([xi[2] / m2, -d.imag / _SQRT2, d.real / _SQRT2, -xi[1] / m2])


def _escape_complex(w, radius: float) -> bool:
    return math.hypot(w[0], w[2]) > radius or math.hypot(w[1], w[3]) > radius


def _escape_darboux(xi, radius: float) -> bool:
    return (math.hypot(xi[0], xi[3]) / _SQRT2 > radius
            or math.hypot(xi[1], xi[2]) / _SQRT2 > radius)


# --------------------------------------------------------------------------
# Steppers
# --------------------------------------------------------------------------

# Dormand-Prince 5(4) tableau; the fifth-order solution is propagated (FSAL).
# Stage times are omitted: every vector field integrated here is autonomous.
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_ERR = tuple(b5 - b4 for b5, b4 in zip(
    _DP_B5,
    (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40),
))


def _finite(y: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(y)))


def _rk45(rhs, y0, cfg: IntegratorConfig, escape) -> tuple[list, list, list, str, int]:
    t, y = 0.0, np.asarray(y0, dtype=float)
    ts, ys, ds = [t], [y.copy()], []
    terminated = "t_end"
    n_accepted = 0

    def eval_rhs(state):
        try:
            d = rhs(state)
        except (OverflowError, PotentialOverflowError, ZeroDivisionError):
            return None
        return d if _finite(d) else None

    k1 = eval_rhs(y)
    if k1 is None:
        # cannot even start; report failure with the initial sample only
        return ts, ys, [np.zeros_like(y)], "step_failure", 0
    ds.append(k1.copy())
    if escape(y, cfg.escape_radius):
        return ts, ys, ds, "escape", 0
    if cfg.t_end == 0.0:
        return ts, ys, ds, "t_end", 0

    h = min(1e-3, cfg.t_end)
    while t < cfg.t_end:
        remaining = cfg.t_end - t
        if remaining <= 1e-13 * max(1.0, cfg.t_end):
            break  # landed within rounding of t_end; not a failure
        h = min(h, remaining)
        if h < _MIN_STEP:
            terminated = "step_failure"
            break
        K = [k1]
        failed = False
        for i in range(1, 7):
            yi = y + h * sum(a * k for a, k in zip(_DP_A[i], K))
            ki = eval_rhs(yi)
            if ki is None:
                failed = True
                break
            K.append(ki)
        if not failed:
            y_new = y + h * sum(b * k for b, k in zip(_DP_B5, K) if b != 0.0)
            err_vec = h * sum(e * k for e, k in zip(_DP_ERR, K) if e != 0.0)
            if not (_finite(y_new) and _finite(err_vec)):
                failed = True
        if failed:
            h *= 0.25
            continue
        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(float(np.mean((err_vec / scale) ** 2)))
        if err <= 1.0:
            t += h
            y = y_new
            k1 = K[6]  # first-same-as-last
            ts.append(t)
            ys.append(y.copy())
            ds.append(k1.copy())
            n_accepted += 1
            if escape(y, cfg.escape_radius):
                terminated = "escape"
                break
        factor = 0.9 * (err + 1e-300) ** -0.2
        h *= min(5.0, max(0.2, factor))
    return ts, ys, ds, terminated, n_accepted


def _fixed_grid(t_end: float, dt: float) -> list[float]:
    n = int(math.ceil(t_end / dt - 1e-12))
    grid = [k * dt for k in range(n)]
    grid.append(t_end)
    return grid


def _rk4(rhs, y0, cfg: IntegratorConfig, escape) -> tuple[list, list, list, str, int]:
    y = np.asarray(y0, dtype=float)
    ts, ys, ds = [0.0], [y.copy()], []
    terminated = "t_end"
    n_steps = 0

    def eval_rhs(state):
        try:
            d = rhs(state)
        except (OverflowError, PotentialOverflowError, ZeroDivisionError):
            return None
        return d if _finite(d) else None

    k1 = eval_rhs(y)
    if k1 is None:
        return ts, ys, [np.zeros_like(y)], "step_failure", 0
    ds.append(k1.copy())
    if escape(y, cfg.escape_radius):
        return ts, ys, ds, "escape", 0

    grid = _fixed_grid(cfg.t_end, cfg.dt) if cfg.t_end > 0.0 else [0.0]
    for i in range(len(grid) - 1):
        h = grid[i + 1] - grid[i]
        k2 = eval_rhs(y + 0.5 * h * k1)
        k3 = eval_rhs(y + 0.5 * h * k2) if k2 is not None else None
        k4 = eval_rhs(y + h * k3) if k3 is not None else None
        if k4 is None:
            terminated = "step_failure"
            break
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        k1 = eval_rhs(y) if _finite(y) else None  # sample derivative, reused next step
        if k1 is None:
            terminated = "step_failure"
            break
        ts.append(grid[i + 1])
        ys.append(y.copy())
        ds.append(k1.copy())
        n_steps += 1
        if escape(y, cfg.escape_radius):
            terminated = "escape"
            break
    return ts, ys, ds, terminated, n_steps


def split_step(spec: SystemSpec, xi, dt: float) -> np.ndarray:
    """One Strang step of the Darboux-frame dynamics.

    Kick-drift-kick composition of the exact flows of G(x1, p2) (potential
    part) and F(p1, x2) (kinetic part); second-order accurate and exactly
    symplectic for the standard structure.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    x1, p1, x2, p2 = (float(c) for c in xi)
    m = spec.mass
    half = 0.5 * dt
    d = spec.dv(complex(x1, p2) / _SQRT2)
    p1 -= half * _SQRT2 * d.real
    x2 -= half * _SQRT2 * d.imag
    x1 += dt * p1 / m
    p2 += dt * x2 / m
    d = spec.dv(complex(x1, p2) / _SQRT2)
    p1 -= half * _SQRT2 * d.real
    x2 -= half * _SQRT2 * d.imag
    return np.array([x1, p1, x2, p2])


def _split(spec, y0, cfg: IntegratorConfig, escape, rhs) -> tuple[list, list, list, str, int]:
    y = np.asarray(y0, dtype=float)
    ts, ys, ds = [0.0], [y.copy()], [rhs(y)]
    terminated = "t_end"
    n_steps = 0
    if escape(y, cfg.escape_radius):
        return ts, ys, ds, "escape", 0
    grid = _fixed_grid(cfg.t_end, cfg.dt) if cfg.t_end > 0.0 else [0.0]
    for i in range(len(grid) - 1):
        h = grid[i + 1] - grid[i]
        try:
            y = split_step(spec, y, h)
            deriv = rhs(y)
        except (OverflowError, PotentialOverflowError):
            terminated = "step_failure"
            break
        if not (_finite(y) and _finite(deriv)):
            terminated = "step_failure"
            break
        ts.append(grid[i + 1])
        ys.append(y.copy())
        ds.append(deriv)
        n_steps += 1
        if escape(y, cfg.escape_radius):
            terminated = "escape"
            break
    return ts, ys, ds, terminated, n_steps


# --------------------------------------------------------------------------
# Public integration entry points
# --------------------------------------------------------------------------


def _invariants(spec, states, to_w) -> tuple[np.ndarray, np.ndarray]:
    hr = np.empty(len(states))
    hi = np.empty(len(states))
    for i, s in enumerate(states):
        try:
            hr[i], hi[i] = hamiltonian_split(spec, to_w(s))
        except PotentialOverflowError:
            hr[i] = hi[i] = math.nan
    return hr, hi


def _build(frame, spec, ts, ys, ds, terminated, n_steps, to_w) -> Trajectory:
    states = np.array(ys)
    hr, hi = _invariants(spec, states, to_w)
    return Trajectory(frame=frame, t=np.array(ts), states=states,
                      derivs=np.array(ds), hr=hr, hi=hi,
                      terminated_by=terminated, n_steps=n_steps)


def integrate_complex(spec: SystemSpec, z0: complex, p0: complex,
                      cfg: IntegratorConfig) -> Trajectory:
    """Integrate dz/dt = p/m, dp/dt = -v'(z) over real time.

    States are recorded as real rows w = (x, p, y, q).  The ``split`` method
    runs in the Darboux frame and maps back, which is exact (a scaled signed
    permutation).
    """
    w0 = np.array([z0.real, p0.real, z0.imag, p0.imag], dtype=float)
    if not _finite(w0):
        raise ValueError("initial data must be finite")
    rhs = _complex_rhs(spec)
    if cfg.method == "rk45":
        parts = _rk45(rhs, w0, cfg, _escape_complex)
    elif cfg.method == "rk4":
        parts = _rk4(rhs, w0, cfg, _escape_complex)
    else:
        xi_traj = integrate_darboux(spec, w_to_darboux(w0), cfg)
        states = np.array([darboux_to_w(xi) for xi in xi_traj.states])
        derivs = np.array([rhs(w) for w in states])
        return Trajectory(frame="complex", t=xi_traj.t, states=states,
                          derivs=derivs, hr=xi_traj.hr, hi=xi_traj.hi,
                          terminated_by=xi_traj.terminated_by,
                          n_steps=xi_traj.n_steps)
    return _build("complex", spec, *parts, to_w=lambda w: w)


def integrate_darboux(spec: SystemSpec, xi0, cfg: IntegratorConfig) -> Trajectory:
    """Integrate the standard Hamilton equations generated by h = 2 H_r.

    dx1/dt = p1/m, dp2/dt = x2/m, with the potential forces -sqrt(2) Re v'
    and -sqrt(2) Im v' on p1 and x2, all evaluated at (x1 + i p2)/sqrt(2).
    """
    xi0 = np.asarray(xi0, dtype=float)
    if xi0.shape != (4,) or not _finite(xi0):
        raise ValueError("initial Darboux point must be 4 finite reals")
    rhs = _darboux_rhs(spec)
    if cfg.method == "rk45":
        parts = _rk45(rhs, xi0, cfg, _escape_darboux)
    elif cfg.method == "rk4":
        parts = _rk4(rhs, xi0, cfg, _escape_darboux)
    else:
        parts = _split(spec, xi0, cfg, _escape_darboux, rhs)
    return _build("darboux", spec, *parts, to_w=darboux_to_w)


def phase_to_darboux(pt: ComplexPhasePoint) -> DarbouxPoint:
    """(z, p) -> (x1, p1, x2, p2) = sqrt(2) (x, p, q, y)."""
    return DarbouxPoint.from_array(w_to_darboux(pt.to_w()))


def darboux_to_phase(xi: DarbouxPoint) -> ComplexPhasePoint:
    w = darboux_to_w(xi.as_array())
    return ComplexPhasePoint(complex(w[0], w[2]), complex(w[1], w[3]))


def invariant_flow(spec: SystemSpec, xi0, flow: FlowConfig) -> Trajectory:
    """Integrate d(xi)/d(eps) = {xi, H_i} with fixed-step RK4.

    Both h and H_i are constant along the flow ({h, H_i} = 0).  The returned
    trajectory is parameterized by epsilon (stored in ``t``); negative
    ``epsilon_end`` flows backwards.
    """
    xi0 = np.asarray(xi0, dtype=float)
    if xi0.shape != (4,) or not _finite(xi0):
        raise ValueError("initial Darboux point must be 4 finite reals")
    sign = 1.0 if flow.epsilon_end >= 0.0 else -1.0
    span = abs(flow.epsilon_end)
    cfg = IntegratorConfig(method="rk4", dt=min(flow.d_epsilon, span) if span > 0 else flow.d_epsilon,
                           t_end=span, escape_radius=math.inf)

    def rhs(xi):
        f = invariant_flow_field(spec, xi)
        return sign * f

    parts = _rk4(rhs, xi0, cfg, lambda y, r: False)
    ts, ys, ds, terminated, n_steps = parts
    ts = [sign * t for t in ts]
    traj = _build("darboux", spec, ts, ys, ds, terminated, n_steps, to_w=darboux_to_w)
    return traj


def solve_invariant_zero(spec: SystemSpec, x1: float, p1: float, p2: float) -> float:
    """Solve H_i(x1, p1, x2, p2) = 0 for x2.

    x2 = -2 m v_i(x1/sqrt2, p2/sqrt2) / p1.  Raises
    ConstraintUnsolvableError when p1 = 0 with v_i != 0, and
    ConstraintFreeError when p1 = 0 with v_i = 0 (any x2 works).
    """
    x = x1 / _SQRT2
    y = p2 / _SQRT2
    vi = spec.v(complex(x, y)).imag
    if p1 == 0.0:
        if vi == 0.0:
            raise ConstraintFreeError(
                "p1 = 0 and v_i = 0: every x2 satisfies the constraint")
        raise ConstraintUnsolvableError(
            f"p1 = 0 while v_i = {vi!r}: H_i = 0 has no solution for x2")
    return -2.0 * spec.mass * vi / p1


@dataclass(frozen=True)
class EquivalenceReport:
    max_deviation: float
    tolerance: float
    passed: bool
    n_points: int
    t_worst: float


def equivalence_report(traj_complex: Trajectory, traj_darboux: Trajectory,
                       tol: float = 1e-6) -> EquivalenceReport:
    """Max pointwise deviation between the two descriptions of one motion.

    The complex-frame samples are mapped through xi = sqrt(2) (x, p, q, y)
    and both trajectories are interpolated (cubic Hermite, order >= 3) onto
    the union of their sample grids.  Raises GridMismatchError when the
    covered time ranges differ (e.g. one trajectory escaped early).
    """
    if traj_complex.frame != "complex" or traj_darboux.frame != "darboux":
        raise ValueError("expected (complex, darboux) trajectory pair")
    ta, tb = traj_complex.t, traj_darboux.t
    span = max(abs(ta[-1]), abs(tb[-1]), 1.0)
    if abs(ta[0] - tb[0]) > 1e-9 * span or abs(ta[-1] - tb[-1]) > 1e-9 * span:
        raise GridMismatchError(
            f"time ranges differ: [{ta[0]}, {ta[-1]}] vs [{tb[0]}, {tb[-1]}]")
    lo = max(ta[0], tb[0])
    hi = min(ta[-1], tb[-1])
    grid = np.union1d(ta, tb)
    grid = grid[(grid >= lo) & (grid <= hi)]
    worst = 0.0
    t_worst = float(grid[0]) if grid.size else float(lo)
    for tq in grid:
        w = _hermite(ta, traj_complex.states, traj_complex.derivs, float(tq))
        xi = _hermite(tb, traj_darboux.states, traj_darboux.derivs, float(tq))
        dev = float(np.max(np.abs(w_to_darboux(w) - xi)))
        if dev > worst:
            worst = dev
            t_worst = float(tq)
    return EquivalenceReport(max_deviation=worst, tolerance=tol,
                             passed=worst <= tol, n_points=int(grid.size),
                             t_worst=t_worst)
