"""Energy functionals, interpolation exponents and blow-up thresholds.

The evolution dissipates ``E = Phi - psi`` where ``Phi`` is the scaled
seminorm power and ``psi`` the reaction potential.  A potential-well
analysis of ``h(x) = x^p / p - (C^q / q) x^q`` turns an estimate of the
discrete Sobolev constant ``C`` into checkable sufficient conditions for
finite-time blow-up together with an explicit upper bound on the blow-up
time.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    Field,
    GridSpec,
    ModelParams,
    ParameterError,
    _admissibility,
    lp_norm,
    validate_params,
)
from .operator import OperatorContext, _seminorm_values, seminorm_p

__all__ = [
    "EnergyRecord",
    "BlowupCertificate",
    "HolderBranchError",
    "HypothesisViolation",
    "Thresholds",
    "EstimatorOptions",
    "SobolevEstimate",
    "phi_cap",
    "psi_q",
    "phi_r",
    "total_energy",
    "make_energy_record",
    "gn_exponent",
    "estimate_sobolev_constant",
    "potential_well",
    "blowup_thresholds",
    "solve_beta",
    "blowup_time_bound",
    "check_gn_inequality",
    "interpolation_margin",
]


class HolderBranchError(ParameterError):
    """Signals ``r > q``: no interpolation needed, use the Holder branch."""


class HypothesisViolation(ValueError):
    """A sufficient-condition hypothesis fails for the given data."""


@dataclass(frozen=True)
class EnergyRecord:
    """Scalar diagnostics of one accepted time step.

    ``dissipation_lhs`` is the backward-difference energy rate ``-dE/dt``
    and ``dissipation_rhs`` the squared L2 norm of the discrete velocity;
    the two agree up to time-discretization error.
    """

    t: float
    dt: float
    norm2: float
    normr: float
    normq: float
    norminf: float
    seminorm_p: float
    Phi: float
    psi: float
    E: float
    dissipation_lhs: float
    dissipation_rhs: float

    def __post_init__(self) -> None:
        vals = [getattr(self, f) for f in self.__dataclass_fields__]
        if not all(math.isfinite(v) for v in vals):
            raise ParameterError("energy record entries must be finite")
        if abs(self.E - (self.Phi - self.psi)) > 1e-12 * max(1.0, abs(self.E)):
            raise ParameterError("E must equal Phi - psi")


@dataclass(frozen=True)
class BlowupCertificate:
    """Threshold quantities and verdict of a blow-up experiment.

    ``verdict`` is one of ``certified``, ``bound-violated``,
    ``hypotheses-unmet`` or ``no-blowup-observed``; ``beta``,
    ``t_star_bound`` and ``observed_blowup_time`` are absent when the
    corresponding stage was never reached.
    """

    c_star: float
    alpha_crit: float
    E0: float
    beta: float | None
    t_star_bound: float | None
    observed_blowup_time: float | None
    hypotheses_met: bool
    verdict: str

    def __post_init__(self) -> None:
        if self.verdict not in (
            "certified",
            "bound-violated",
            "hypotheses-unmet",
            "no-blowup-observed",
        ):
            raise ParameterError(f"unknown verdict {self.verdict!r}")
        if self.beta is not None and not self.beta > self.alpha_crit:
            raise ParameterError("beta must exceed alpha_crit when defined")
        if self.t_star_bound is not None and not self.t_star_bound > 0.0:
            raise ParameterError("t_star_bound must be positive when defined")
        if self.verdict == "certified" and not (
            self.hypotheses_met
            and self.observed_blowup_time is not None
            and self.t_star_bound is not None
            and self.observed_blowup_time <= self.t_star_bound
        ):
            raise ParameterError("certified verdict contradicts its fields")


def phi_cap(u: Field, ctx: OperatorContext) -> float:
    """Gradient-part energy ``Phi(u) = seminorm_p(u) / p``."""
    return seminorm_p(u, ctx) / ctx.params.p


def psi_q(u: Field, q: float) -> float:
    """Reaction potential ``(1/q) int |u|^q``."""
    return lp_norm(u, q) ** q / q


def phi_r(u: Field, r: float) -> float:
    """Truncation functional ``(1/r) int |u|^r``."""
    return lp_norm(u, r) ** r / r


def total_energy(u: Field, ctx: OperatorContext) -> float:
    """Free energy ``E(u) = Phi(u) - psi(u)`` driving the evolution."""
    return phi_cap(u, ctx) - psi_q(u, ctx.params.q)


def make_energy_record(
    t: float,
    dt: float,
    u: Field,
    ctx: OperatorContext,
    dissipation_lhs: float = 0.0,
    dissipation_rhs: float = 0.0,
) -> EnergyRecord:
    """Assemble the per-step diagnostics for a field."""
    params = ctx.params
    sem = seminorm_p(u, ctx)
    phi = sem / params.p
    psi = psi_q(u, params.q)
    return EnergyRecord(
        t=t,
        dt=dt,
        norm2=lp_norm(u, 2.0),
        normr=lp_norm(u, params.r),
        normq=lp_norm(u, params.q),
        norminf=lp_norm(u, math.inf),
        seminorm_p=sem,
        Phi=phi,
        psi=psi,
        E=phi - psi,
        dissipation_lhs=dissipation_lhs,
        dissipation_rhs=dissipation_rhs,
    )


def gn_exponent(params: ModelParams, ndim: int) -> float:
    """Interpolation exponent ``alpha`` of the Gagliardo-Nirenberg bound.

    Solves ``1/q = alpha (N - sp) / (N p) + (1 - alpha) / r`` for the
    admissible branch ``r < q``; ``r = q`` returns 0.  The result always
    satisfies ``0 < alpha q < p`` on the interpolation branch.

    Raises
    ------
    HolderBranchError
        If ``r > q``; no interpolation is needed there.
    ParameterError
        If the parameters are inadmissible or ``r`` equals the critical
        exponent, which degenerates the defining equation.
    """
    s, p, q, r = params.s, params.p, params.q, params.r
    if r > q:
        raise HolderBranchError(
            f"r={r:g} >= q={q:g}: the plain Holder bound applies"
        )
    if r == q:
        return 0.0
    report = _admissibility(params, ndim)
    if not report.cond7_ok:
        raise ParameterError(
            f"inadmissible exponents: r={r:g} <= N(q-p)/(sp)={report.cond7_rhs:g}"
        )
    slope = (ndim - s * p) / (ndim * p)
    if slope == 0.0:
        alpha = 1.0 - r / q  # exact when N = sp
    else:
        den = 1.0 / r - slope
        if den == 0.0:
            raise ParameterError("r equals the critical exponent, exponent undefined")
        alpha = (1.0 / r - 1.0 / q) / den
    if not 0.0 < alpha * q < p:
        raise ParameterError(
            f"interpolation exponent out of range: alpha*q={alpha * q:g}, p={p:g}"
        )
    return alpha


@dataclass(frozen=True)
class EstimatorOptions:
    """Multi-start ascent controls for the Sobolev constant estimate."""

    starts: int = 8
    max_iters: int = 1500
    tol: float = 1e-10
    seed: int = 0
    patience: int = 6


@dataclass(frozen=True)
class SobolevEstimate:
    """Best Rayleigh-type quotient found, with per-start audit values."""

    value: float
    converged: bool
    start_values: tuple[float, ...]
    iterations: tuple[int, ...]


def _lp_values(v: np.ndarray, m: float, vol: float) -> float:
    return float((np.abs(v) ** m).sum() * vol) ** (1.0 / m)


def _ascend_quotient(
    u0: np.ndarray, ctx: OperatorContext, q: float, opts: EstimatorOptions
) -> tuple[float, bool, int]:
    # maximize the scale-invariant quotient ||u||_q / |||u|||; iterates are
    # kept on the unit-seminorm sphere by rescaling, and the ascent follows
    # the quotient gradient, whose seminorm part acts through the operator
    # and lets nodal signs flip on the way to the one-signed maximizer
    from .operator import _apply_values

    p = ctx.params.p
    vol = ctx.grid.cell_volume
    u = u0 / _seminorm_values(u0, ctx) ** (1.0 / p)
    best = _lp_values(u, q, vol)
    step = 0.5
    stall = 0
    for it in range(1, opts.max_iters + 1):
        nq = _lp_values(u, q, vol)
        grad_q = np.abs(u) ** (q - 2.0) * u * nq ** (1.0 - q)
        direction = grad_q - nq * _apply_values(u, ctx)  # on the sphere |||u||| = 1
        improved = False
        while step > 1e-14:
            trial = u + step * direction
            sem = _seminorm_values(trial, ctx)
            if sem > 0.0:
                trial = trial / sem ** (1.0 / p)
                val = _lp_values(trial, q, vol)
                if val > best:
                    improved = True
                    break
            step *= 0.5
        if not improved:
            return best, True, it
        gain = (val - best) / max(1.0, best)
        u, best = trial, val
        step = min(step * 1.5, 8.0)
        if gain < opts.tol:
            stall += 1
            if stall >= opts.patience:
                return best, True, it
        else:
            stall = 0
    return best, False, opts.max_iters


def estimate_sobolev_constant(
    grid: GridSpec, params: ModelParams, opts: EstimatorOptions | None = None
) -> SobolevEstimate:
    """Estimate the discrete best constant in ``||u||_q <= C |||u|||``.

    Maximizes the quotient ``lp_norm(u, q) / seminorm_p(u)^(1/p)`` by
    normalized projected gradient ascent from several seeded random starts,
    run in parallel and reduced deterministically (max value, ties broken by
    start index).  Requires ``q`` at or below the critical exponent.
    """
    from .operator import make_context

    opts = opts or EstimatorOptions()
    if opts.starts < 1:
        raise ParameterError("estimator needs at least one start")
    report = validate_params(params, grid)
    if not report.q_leq_pstar:
        raise ParameterError(
            f"q={params.q:g} exceeds the critical exponent {report.pstar:g}"
        )
    ctx = make_context(grid, params)
    q = params.q
    seeds = [np.random.default_rng([opts.seed, k]) for k in range(opts.starts)]
    starts = [rng.standard_normal(grid.num_nodes) for rng in seeds]
    with ThreadPoolExecutor(max_workers=min(8, opts.starts)) as pool:
        results = list(
            pool.map(lambda u0: _ascend_quotient(u0, ctx, q, opts), starts)
        )
    values = tuple(res[0] for res in results)
    iters = tuple(res[2] for res in results)
    best_idx = max(range(len(values)), key=lambda k: (values[k], -k))
    return SobolevEstimate(
        value=values[best_idx],
        converged=results[best_idx][1],
        start_values=values,
        iterations=iters,
    )


def potential_well(x, p: float, q: float, c_star: float):
    """Well function ``h(x) = x^p / p - (c^q / q) x^q`` of the seminorm level."""
    x = np.asarray(x, dtype=float)
    out = x**p / p - (c_star**q / q) * x**q
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Thresholds:
    """Critical seminorm level and well height of the blow-up criterion."""

    alpha_crit: float
    E0: float


def blowup_thresholds(params: ModelParams, c_star: float) -> Thresholds:
    """Peak location and height of the potential well.

    ``alpha_crit = c^(-q/(q-p))`` maximizes `potential_well` and
    ``E0 = (1/p - 1/q) c^(-qp/(q-p))`` is its value there; data with energy
    below ``E0`` and seminorm above ``alpha_crit`` cannot exist globally.
    """
    if not c_star > 0.0:
        raise ParameterError(f"c_star must be positive, got {c_star}")
    p, q = params.p, params.q
    if not q > p:
        raise ParameterError(f"q must exceed p, got q={q}, p={p}")
    alpha = c_star ** (-q / (q - p))
    e0 = (1.0 / p - 1.0 / q) * c_star ** (-q * p / (q - p))
    return Thresholds(alpha_crit=alpha, E0=e0)


def solve_beta(e_initial: float, params: ModelParams, c_star: float) -> float:
    """Root of ``potential_well(beta) = e_initial`` beyond the well peak.

    The well decreases strictly to minus infinity past its peak, so for any
    ``e_initial`` strictly below the peak height the root exists, is unique
    and is found by bisection to relative tolerance 1e-12.

    Raises
    ------
    HypothesisViolation
        If ``e_initial`` is not strictly below the well height ``E0``.
    """
    th = blowup_thresholds(params, c_star)
    if not e_initial < th.E0:
        raise HypothesisViolation(
            f"initial energy {e_initial:g} is not below the well height {th.E0:g}"
        )
    p, q = params.p, params.q
    lo = th.alpha_crit
    hi = 2.0 * lo
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(600):
            hv = potential_well(hi, p, q, c_star)
            if not (math.isfinite(hv) and hv > e_initial):
                break
            hi *= 2.0
        else:
            raise ArithmeticError("failed to bracket the well root")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if potential_well(mid, p, q, c_star) > e_initial:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * hi:
                break
    return 0.5 * (lo + hi)


def blowup_time_bound(
    u0: Field,
    params: ModelParams,
    alpha_crit: float,
    beta: float,
    grid: GridSpec | None = None,
) -> float:
    """Explicit upper bound on the blow-up time of supercritical data.

    ``t_star = (1/2)^(q-1) ||u0||_2^(q-2) |box|^(q/2-1)
    / ((q/2 - 1)(1 - (alpha/beta)^q)(q - p))``.  Requires ``q > 2`` and
    ``beta > alpha_crit``.
    """
    grid = grid or u0.grid
    if grid != u0.grid:
        raise ParameterError("grid does not match the field")
    p, q = params.p, params.q
    if not q > 2.0:
        raise ParameterError(f"the bound needs q > 2, got {q}")
    if not (beta > alpha_crit > 0.0):
        raise ParameterError("need beta > alpha_crit > 0")
    norm2 = lp_norm(u0, 2.0)
    if norm2 == 0.0:
        raise ParameterError("zero data cannot blow up")
    ratio = 1.0 - (alpha_crit / beta) ** q
    num = 0.5 ** (q - 1.0) * norm2 ** (q - 2.0) * grid.box_measure ** (q / 2.0 - 1.0)
    den = (q / 2.0 - 1.0) * ratio * (q - p)
    return num / den


def check_gn_inequality(
    u: Field, params: ModelParams, ctx: OperatorContext, c_gn: float
) -> float:
    """Margin ``c_gn |||u|||^alpha ||u||_r^(1-alpha) - ||u||_q``.

    Nonnegative whenever ``c_gn`` dominates the discrete interpolation
    constant.  The seminorm enters through its p-th power, hence the
    ``alpha / p`` exponent.
    """
    alpha = gn_exponent(params, ctx.grid.dim)
    lhs = (
        c_gn
        * seminorm_p(u, ctx) ** (alpha / params.p)
        * lp_norm(u, params.r) ** (1.0 - alpha)
    )
    return lhs - lp_norm(u, params.q)


def interpolation_margin(
    u: Field, params: ModelParams, ctx: OperatorContext, c: float
) -> float:
    """Margin of the reaction-potential interpolation bound.

    On the branch ``r < q``:
    ``c phi(u)^((1-alpha) q / r) (Phi(u) + 1)^(1-eps) - psi(u)`` with
    ``eps = 1 - alpha q / p``; for ``r >= q`` the Holder branch
    ``c phi(u)^(q/r) - psi(u)`` applies.
    """
    r, q = params.r, params.q
    phi = phi_r(u, r)
    psi = psi_q(u, q)
    if r >= q:
        return c * phi ** (q / r) - psi
    alpha = gn_exponent(params, ctx.grid.dim)
    eps = 1.0 - alpha * q / params.p
    return c * phi ** ((1.0 - alpha) * q / r) * (phi_cap(u, ctx) + 1.0) ** (
        1.0 - eps
    ) - psi
