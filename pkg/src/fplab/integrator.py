"""Adaptive explicit time integration of the nonlocal evolution.

The semi-discrete system ``u' = -A u + R(u) + f`` is advanced by an
explicit Heun predictor-corrector pair whose embedded Euler stage provides
the error estimate.  Steps are accepted when the relative L2 difference of
the two stages is below tolerance; the step size follows a standard
square-root controller.  Finite-time blow-up is flagged either by a norm
cap or by step-size underflow while the reaction dominates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .convex import _resolvent_values, project_lr_ball
from .core import Field, GridSpec, ModelParams, ParameterError, lp_norm
from .functionals import EnergyRecord, make_energy_record, phi_r, psi_q
from .operator import (
    OperatorContext,
    _apply_values,
    _odd_power,
    make_context,
    seminorm_p,
)

__all__ = [
    "StepFailure",
    "StepUnderflow",
    "StepControls",
    "BlowupPolicy",
    "SimState",
    "SimOutcome",
    "RunProblem",
    "rhs",
    "step_heun",
    "adapt_dt",
    "detect_blowup",
    "run",
    "DissipationReport",
    "check_dissipation",
    "strong_form_residual",
]


class StepFailure(RuntimeError):
    """A trial step produced non-finite values; retry with a smaller dt."""


class StepUnderflow(RuntimeError):
    """The controller pushed dt below the configured floor."""


@dataclass(frozen=True)
class StepControls:
    """Error tolerance and step-size bounds of the adaptive controller."""

    tol: float
    dt_min: float
    dt_max: float

    def __post_init__(self) -> None:
        if not (self.tol > 0.0 and math.isfinite(self.tol)):
            raise ParameterError(f"tol must be positive, got {self.tol}")
        if not 0.0 < self.dt_min <= self.dt_max:
            raise ParameterError("need 0 < dt_min <= dt_max")


@dataclass(frozen=True)
class BlowupPolicy:
    """Detection thresholds: cap on the L2 norm of the state."""

    norm_cap: float

    def __post_init__(self) -> None:
        if not self.norm_cap >= 0.0:
            raise ParameterError("norm_cap must be nonnegative")


@dataclass
class SimState:
    """Mutable integration state: current time, field and step bookkeeping."""

    t: float
    u: Field
    dt: float
    step_count: int = 0
    records: list[EnergyRecord] = field(default_factory=list)


@dataclass(frozen=True)
class SimOutcome:
    """Terminal status of a run.

    ``status`` is ``completed``, ``blowup_detected`` or ``step_underflow``.
    The blow-up time estimate is the upper end of ``blowup_interval`` and is
    present exactly when blow-up was detected.
    """

    status: str
    final_state: SimState
    blowup_time_estimate: float | None = None
    blowup_interval: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.status not in ("completed", "blowup_detected", "step_underflow"):
            raise ParameterError(f"unknown status {self.status!r}")
        if (self.status == "blowup_detected") != (
            self.blowup_time_estimate is not None
        ):
            raise ParameterError("blow-up estimate must accompany detection only")


@dataclass(frozen=True)
class RunProblem:
    """Everything `run` needs: problem data, horizon and controller knobs.

    Defaults: ``dt_min = 1e-14 T``, ``dt_max = T / 10``, initial step
    ``min(dt_max, 1e-3 T)``, norm cap ``1e8 ||u0||_2``.  ``rhs_fn`` replaces
    the built-in right-hand side (a test seam for scalar comparison
    problems) and takes nodal values and time.
    """

    grid: GridSpec
    params: ModelParams
    u0: Field
    t_end: float
    tol: float = 1e-6
    dt_init: float | None = None
    dt_min: float | None = None
    dt_max: float | None = None
    sigma_mode: bool = False
    norm_cap: float | None = None
    ctx: OperatorContext | None = None
    rhs_fn: Callable[[np.ndarray, float], np.ndarray] | None = None
    on_accept: Callable[[SimState], None] | None = None

    def __post_init__(self) -> None:
        if not (self.t_end > 0.0 and math.isfinite(self.t_end)):
            raise ParameterError(f"t_end must be positive, got {self.t_end}")
        if self.u0.grid != self.grid:
            raise ParameterError("initial data grid does not match")

    def controls(self) -> StepControls:
        return StepControls(
            tol=self.tol,
            dt_min=self.dt_min if self.dt_min is not None else 1e-14 * self.t_end,
            dt_max=self.dt_max if self.dt_max is not None else self.t_end / 10.0,
        )


def _reaction_values(v: np.ndarray, params: ModelParams) -> np.ndarray:
    if params.lam == 0.0:
        return _odd_power(v, params.q)
    return (v - _resolvent_values(v, params.q, params.lam)) / params.lam


def _rhs_values(
    v: np.ndarray, t: float, params: ModelParams, ctx: OperatorContext
) -> np.ndarray:
    out = -_apply_values(v, ctx) + _reaction_values(v, params)
    forcing = params.forcing
    if not getattr(forcing, "is_zero", False):
        out = out + forcing.sample(ctx.grid, t)
    return out


def rhs(u: Field, t: float, params: ModelParams, ctx: OperatorContext) -> Field:
    """Right-hand side ``-A u + R(u) + f(t)`` of the semi-discrete system.

    The reaction ``R`` is the plain power ``|u|^(q-2) u`` for ``lam = 0``
    and its Yosida approximation otherwise.
    """
    if u.grid != ctx.grid:
        raise ParameterError("field grid does not match context grid")
    return Field(u.grid, _rhs_values(u.values, t, params, ctx))


def _heun_core(
    v: np.ndarray,
    t: float,
    dt: float,
    f: Callable[[np.ndarray, float], np.ndarray],
    vol: float,
) -> tuple[np.ndarray, float]:
    k1 = f(v, t)
    euler = v + dt * k1
    if not np.all(np.isfinite(euler)):
        raise StepFailure(f"non-finite predictor at t={t:g}, dt={dt:g}")
    k2 = f(euler, t + dt)
    cand = v + 0.5 * dt * (k1 + k2)
    if not np.all(np.isfinite(cand)):
        raise StepFailure(f"non-finite corrector at t={t:g}, dt={dt:g}")
    diff = cand - euler
    err = math.sqrt(float((diff**2).sum()) * vol)
    base = max(1.0, math.sqrt(float((v**2).sum()) * vol))
    return cand, err / base


def step_heun(
    state: SimState, dt: float, params: ModelParams, ctx: OperatorContext
) -> tuple[Field, float]:
    """One trial Heun step from ``state`` with step size ``dt``.

    Returns the candidate field and the relative L2 error estimate
    ``||heun - euler|| / max(1, ||u||)``.  Raises `StepFailure` when the
    stages stop being finite, which callers treat as a rejected step.
    """
    if not dt > 0.0:
        raise ParameterError(f"dt must be positive, got {dt}")
    cand, err = _heun_core(
        state.u.values,
        state.t,
        dt,
        lambda v, t: _rhs_values(v, t, params, ctx),
        ctx.grid.cell_volume,
    )
    return Field(state.u.grid, cand), err


def adapt_dt(dt: float, err: float, controls: StepControls) -> float:
    """Square-root step controller with clamped growth.

    ``dt' = dt * clip(0.9 sqrt(tol / err), 0.2, 5.0)`` capped at ``dt_max``;
    a vanishing error estimate yields the maximal growth factor.

    Raises
    ------
    StepUnderflow
        If the adapted step falls below ``dt_min``.
    """
    if err > 0.0:
        factor = min(max(0.9 * math.sqrt(controls.tol / err), 0.2), 5.0)
    else:
        factor = 5.0
    dt_new = min(dt * factor, controls.dt_max)
    if dt_new < controls.dt_min:
        raise StepUnderflow(f"step size {dt_new:g} below floor {controls.dt_min:g}")
    return dt_new


def detect_blowup(state: SimState, policy: BlowupPolicy) -> bool:
    """Whether the state has escaped the norm cap."""
    return lp_norm(state.u, 2.0) > policy.norm_cap


def _underflow_status(
    v: np.ndarray, params: ModelParams, ctx: OperatorContext | None
) -> str:
    # dt underflow counts as blow-up only when the reaction outweighs the
    # diffusion, otherwise it is reported as a plain step failure
    if ctx is None:
        return "step_underflow"
    vol = ctx.grid.cell_volume
    reaction = math.sqrt(float((_reaction_values(v, params) ** 2).sum()) * vol)
    diffusion = math.sqrt(float((_apply_values(v, ctx) ** 2).sum()) * vol)
    return "blowup_detected" if reaction > diffusion else "step_underflow"


def run(problem: RunProblem) -> SimOutcome:
    """Advance the problem to its horizon, blow-up or step underflow.

    Every accepted step appends an `EnergyRecord` (the row at ``t = 0``
    has zero dt and dissipation entries).  In sigma mode the state is
    radially retracted onto the L^r energy ball after each accepted step,
    with radius ``params.sigma`` or ``phi_r(u0) + 1`` when unset.
    """
    controls = problem.controls()
    params = problem.params
    ctx = problem.ctx
    if ctx is None and problem.rhs_fn is None:
        ctx = make_context(problem.grid, params)
    if problem.rhs_fn is not None:
        f = problem.rhs_fn
    else:
        f = lambda v, t: _rhs_values(v, t, params, ctx)

    vol = problem.grid.cell_volume
    u = problem.u0
    norm_cap = (
        problem.norm_cap
        if problem.norm_cap is not None
        else 1e8 * lp_norm(u, 2.0)
    )
    policy = BlowupPolicy(norm_cap=norm_cap)
    sigma = None
    if problem.sigma_mode:
        sigma = params.sigma if params.sigma is not None else phi_r(u, params.r) + 1.0

    t = 0.0
    dt = (
        problem.dt_init
        if problem.dt_init is not None
        else min(controls.dt_max, 1e-3 * problem.t_end)
    )
    dt = max(dt, controls.dt_min)
    state = SimState(t=t, u=u, dt=dt, step_count=0)
    if ctx is not None:
        state.records.append(make_energy_record(0.0, 0.0, u, ctx))
    prev_vals = u.values
    prev_E = state.records[0].E if state.records else 0.0

    def finish(status: str, last_dt: float) -> SimOutcome:
        if status == "blowup_detected":
            return SimOutcome(
                status=status,
                final_state=state,
                blowup_time_estimate=state.t + last_dt,
                blowup_interval=(state.t, state.t + last_dt),
            )
        return SimOutcome(status=status, final_state=state)

    t_end = problem.t_end
    while state.t < t_end * (1.0 - 1e-12):
        dt_try = min(state.dt, t_end - state.t)
        try:
            cand, err = _heun_core(state.u.values, state.t, dt_try, f, vol)
        except StepFailure:
            halved = dt_try / 2.0
            if halved < controls.dt_min:
                return finish(_underflow_status(state.u.values, params, ctx), dt_try)
            state.dt = halved
            continue
        if err <= controls.tol:
            new_u = Field(problem.grid, cand)
            if sigma is not None:
                new_u = project_lr_ball(new_u, sigma, params.r)
            state.t += dt_try
            state.u = new_u
            state.step_count += 1
            if ctx is not None:
                velocity_sq = (
                    float(((new_u.values - prev_vals) ** 2).sum()) * vol / dt_try**2
                )
                sem = seminorm_p(new_u, ctx)
                phi = sem / params.p
                psi = psi_q(new_u, params.q)
                rec = EnergyRecord(
                    t=state.t,
                    dt=dt_try,
                    norm2=lp_norm(new_u, 2.0),
                    normr=lp_norm(new_u, params.r),
                    normq=lp_norm(new_u, params.q),
                    norminf=lp_norm(new_u, math.inf),
                    seminorm_p=sem,
                    Phi=phi,
                    psi=psi,
                    E=phi - psi,
                    dissipation_lhs=-(phi - psi - prev_E) / dt_try,
                    dissipation_rhs=velocity_sq,
                )
                state.records.append(rec)
                prev_E = rec.E
            prev_vals = new_u.values
            if problem.on_accept is not None:
                problem.on_accept(state)
            if detect_blowup(state, policy):
                return finish("blowup_detected", dt_try)
            try:
                state.dt = adapt_dt(dt_try, err, controls)
            except StepUnderflow:
                return finish(_underflow_status(state.u.values, params, ctx), dt_try)
        else:
            try:
                state.dt = adapt_dt(dt_try, err, controls)
            except StepUnderflow:
                return finish(_underflow_status(state.u.values, params, ctx), dt_try)
    return SimOutcome(status="completed", final_state=state)


@dataclass(frozen=True)
class DissipationReport:
    """Energy monotonicity audit over a record sequence.

    ``max_increase`` is the largest raw energy increase between consecutive
    accepted steps (zero when monotone), ``max_excess`` the largest increase
    beyond the per-step tolerance ``c dt (1 + ||du/dt||^2)``.  The median
    relative agreement between the two dissipation estimates is reported but
    carries no pass/fail weight.
    """

    max_increase: float
    max_excess: float
    passed: bool
    median_agreement: float
    steps: int


def check_dissipation(records: Sequence[EnergyRecord], c: float = 10.0) -> DissipationReport:
    """Audit energy decrease across consecutive records.

    Meaningful for unforced, unregularized runs, where the semi-discrete
    energy is a Lyapunov function and any increase is time-discretization
    error.
    """
    if len(records) < 2:
        raise ParameterError("need at least two records")
    max_inc = 0.0
    max_excess = -math.inf
    agreements = []
    for prev, cur in zip(records[:-1], records[1:]):
        if cur.dt <= 0.0:
            raise ParameterError("record steps must have positive dt")
        inc = cur.E - prev.E
        tol_k = c * cur.dt * (1.0 + cur.dissipation_rhs)
        max_inc = max(max_inc, inc)
        max_excess = max(max_excess, inc - tol_k)
        denom = max(abs(cur.dissipation_lhs), abs(cur.dissipation_rhs), 1e-300)
        agreements.append(
            abs(cur.dissipation_lhs - cur.dissipation_rhs) / denom
        )
    return DissipationReport(
        max_increase=max(max_inc, 0.0),
        max_excess=max_excess,
        passed=max_excess <= 0.0,
        median_agreement=float(np.median(agreements)),
        steps=len(records) - 1,
    )


def strong_form_residual(
    window: Sequence[tuple[float, Field]],
    ctx: OperatorContext,
    forcing=None,
) -> float:
    """Discrete L2(time x space) residual of the strong equation.

    Approximates ``du/dt + A u - |u|^(q-2) u - f`` with central time
    differences on the interior of the window and integrates the squared
    nodal residual with trapezoidal time weights.  The reaction is the plain
    power law regardless of any regularization used to produce the states.
    """
    if len(window) < 3:
        raise ParameterError("residual needs a window of at least 3 states")
    times = [t for t, _ in window]
    if any(b <= a for a, b in zip(times[:-1], times[1:])):
        raise ParameterError("window times must be strictly increasing")
    params = ctx.params
    vol = ctx.grid.cell_volume
    total = 0.0
    for k in range(1, len(window) - 1):
        t_prev, u_prev = window[k - 1]
        t_k, u_k = window[k]
        t_next, u_next = window[k + 1]
        span = t_next - t_prev
        dtu = (u_next.values - u_prev.values) / span
        res = dtu + _apply_values(u_k.values, ctx) - _odd_power(u_k.values, params.q)
        if forcing is not None:
            res = res - forcing.sample(ctx.grid, t_k)
        total += 0.5 * span * float((res**2).sum()) * vol
    return math.sqrt(total)
