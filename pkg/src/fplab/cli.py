"""Command line front end: simulate, verify, estimate-cstar, blowup-cert.

Configuration files are flat ``key = value`` text with dotted section keys
(``grid.n``, ``params.s``, ``time.T``) and ``#`` comment lines.  All numeric
output is printed with 17 significant digits so that identical inputs give
byte-identical output.

Exit codes: 0 success, 2 configuration error; ``simulate`` returns 10 when
blow-up is detected and 11 on step underflow; ``estimate-cstar`` returns 3
when the reaction exponent exceeds the critical exponent; ``blowup-cert``
returns 20 for a violated bound, 21 for unmet hypotheses, 22 when no
blow-up was observed.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .convex import (
    ProxSpec,
    _energy_comparison_terms,
    _resolvent_values,
    check_stroock_varopoulos,
    field_resolvent,
    moreau_yosida_value,
    resolvent_seminorm_decrease,
)
from .core import (
    ConstantForcing,
    Field,
    GridSpec,
    ModelParams,
    ParameterError,
    ZeroForcing,
    lp_norm,
    make_initial_data,
    validate_params,
)
from .functionals import (
    BlowupCertificate,
    EstimatorOptions,
    blowup_thresholds,
    blowup_time_bound,
    estimate_sobolev_constant,
    gn_exponent,
    solve_beta,
    total_energy,
)
from .integrator import RunProblem, run
from .operator import make_context, seminorm_p

__all__ = [
    "ConfigError",
    "RunConfig",
    "parse_config",
    "cmd_simulate",
    "cmd_verify",
    "cmd_estimate_cstar",
    "cmd_blowup_cert",
    "main",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PSTAR = 3
EXIT_BLOWUP = 10
EXIT_UNDERFLOW = 11
EXIT_BOUND_VIOLATED = 20
EXIT_HYPOTHESES_UNMET = 21
EXIT_NO_BLOWUP = 22

RECORD_HEADER = (
    "t,dt,norm2,normr,normq,norminf,seminorm_p,Phi,psi,E,"
    "dissipation_lhs,dissipation_rhs"
)


class ConfigError(ValueError):
    """Malformed or inconsistent configuration input."""


def _fmt(x) -> str:
    if x is None:
        return "none"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


# key -> (parser, default); None default means "unset"
def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_SCHEMA: dict[str, tuple] = {
    "grid.dim": (int, 1),
    "grid.box_min": (_floats, None),
    "grid.box_max": (_floats, None),
    "grid.n": (int, None),
    "params.s": (float, None),
    "params.p": (float, None),
    "params.q": (float, None),
    "params.r": (float, None),
    "params.lambda": (float, 0.0),
    "params.sigma": (float, None),
    "params.sigma_mode": (_bool, False),
    "initial.kind": (str, "bump"),
    "initial.amplitude": (float, 1.0),
    "forcing.kind": (str, "zero"),
    "forcing.value": (float, 0.0),
    "time.T": (float, None),
    "time.tol": (float, 1e-6),
    "time.dt_init": (float, None),
    "time.dt_min": (float, None),
    "time.dt_max": (float, None),
    "time.norm_cap": (float, None),
    "outputs.record_csv": (str, None),
    "outputs.snapshot_stride": (int, 0),
    "outputs.snapshot_stem": (str, None),
    "outputs.certificate": (str, None),
    "estimator.starts": (int, 8),
    "estimator.max_iters": (int, 1500),
    "seed": (int, 0),
}

_REQUIRED = ("grid.n", "params.s", "params.p", "params.q", "params.r", "time.T")


@dataclass
class RunConfig:
    """Resolved configuration values, one attribute per schema key."""

    entries: dict

    def __getitem__(self, key: str):
        return self.entries[key]


def parse_config(path: str) -> RunConfig:
    """Read a flat key-value configuration file.

    Raises `ConfigError` with a line-anchored message on malformed lines,
    unknown or duplicated keys, bad value types and missing required keys.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    entries = {key: default for key, (_, default) in _SCHEMA.items()}
    seen: set[str] = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        parser, _ = _SCHEMA[key]
        try:
            entries[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    missing = [key for key in _REQUIRED if entries[key] is None]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    return RunConfig(entries=entries)


def _build_grid(cfg: RunConfig) -> GridSpec:
    dim = cfg["grid.dim"]
    if dim not in (1, 2):
        raise ConfigError(f"grid.dim must be 1 or 2, got {dim}")
    box_min = cfg["grid.box_min"] or (0.0,) * dim
    box_max = cfg["grid.box_max"] or (1.0,) * dim
    if len(box_min) != dim or len(box_max) != dim:
        raise ConfigError("box corners must have one entry per axis")
    try:
        return GridSpec(dim, tuple(box_min), tuple(box_max), cfg["grid.n"])
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc


def _build_params(cfg: RunConfig) -> ModelParams:
    kind = cfg["forcing.kind"]
    if kind == "zero":
        forcing = ZeroForcing()
    elif kind == "constant":
        forcing = ConstantForcing(cfg["forcing.value"])
    else:
        raise ConfigError(f"unknown forcing kind {kind!r}")
    return ModelParams(
        s=cfg["params.s"],
        p=cfg["params.p"],
        q=cfg["params.q"],
        r=cfg["params.r"],
        lam=cfg["params.lambda"],
        sigma=cfg["params.sigma"],
        forcing=forcing,
    )


def _build_initial(cfg: RunConfig, grid: GridSpec, seed: int) -> Field:
    try:
        return make_initial_data(
            cfg["initial.kind"], grid, cfg["initial.amplitude"], seed=seed
        )
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc


def _build_problem(cfg: RunConfig, seed: int, on_accept=None) -> RunProblem:
    grid = _build_grid(cfg)
    params = _build_params(cfg)
    try:
        validate_params(params, grid)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    u0 = _build_initial(cfg, grid, seed)
    return RunProblem(
        grid=grid,
        params=params,
        u0=u0,
        t_end=cfg["time.T"],
        tol=cfg["time.tol"],
        dt_init=cfg["time.dt_init"],
        dt_min=cfg["time.dt_min"],
        dt_max=cfg["time.dt_max"],
        sigma_mode=cfg["params.sigma_mode"],
        norm_cap=cfg["time.norm_cap"],
        on_accept=on_accept,
    )


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_records_csv(path: str, records) -> None:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(RECORD_HEADER + "\n")
        for rec in records:
            fh.write(
                ",".join(
                    _fmt(v)
                    for v in (
                        rec.t,
                        rec.dt,
                        rec.norm2,
                        rec.normr,
                        rec.normq,
                        rec.norminf,
                        rec.seminorm_p,
                        rec.Phi,
                        rec.psi,
                        rec.E,
                        rec.dissipation_lhs,
                        rec.dissipation_rhs,
                    )
                )
                + "\n"
            )


def write_snapshot(stem: str, step_count: int, u: Field) -> None:
    path = f"{stem}-{step_count:06d}.csv"
    _ensure_parent(path)
    pts = u.grid.nodes()
    header = "x,u" if u.grid.dim == 1 else "x,y,u"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row, val in zip(pts, u.values):
            coords = ",".join(_fmt(c) for c in row)
            fh.write(f"{coords},{_fmt(val)}\n")


def write_certificate(path: str, cert: BlowupCertificate) -> None:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(certificate_text(cert))


def certificate_text(cert: BlowupCertificate) -> str:
    lines = [
        "schema_version=1",
        f"c_star={_fmt(cert.c_star)}",
        f"alpha_crit={_fmt(cert.alpha_crit)}",
        f"E0={_fmt(cert.E0)}",
        f"beta={_fmt(cert.beta)}",
        f"t_star_bound={_fmt(cert.t_star_bound)}",
        f"observed_blowup_time={_fmt(cert.observed_blowup_time)}",
        f"hypotheses_met={_fmt(cert.hypotheses_met)}",
        f"verdict={cert.verdict}",
    ]
    return "\n".join(lines) + "\n"


def cmd_simulate(config_path: str, seed: int | None = None, out: str | None = None) -> int:
    """Run the evolution described by the configuration file."""
    cfg = parse_config(config_path)
    use_seed = cfg["seed"] if seed is None else seed
    stride = cfg["outputs.snapshot_stride"]
    stem = cfg["outputs.snapshot_stem"]
    if stride < 0:
        raise ConfigError("outputs.snapshot_stride must be nonnegative")
    snapshots_on = stride > 0 and stem is not None

    def on_accept(state) -> None:
        if snapshots_on and state.step_count % stride == 0:
            write_snapshot(stem, state.step_count, state.u)

    problem = _build_problem(cfg, use_seed, on_accept=on_accept)
    if snapshots_on:
        write_snapshot(stem, 0, problem.u0)
    outcome = run(problem)

    csv_path = out if out is not None else cfg["outputs.record_csv"]
    if csv_path is not None:
        write_records_csv(csv_path, outcome.final_state.records)
    last = outcome.final_state
    print(f"status={outcome.status}")
    print(f"steps={last.step_count}")
    print(f"t_final={_fmt(last.t)}")
    if last.records:
        print(f"E_final={_fmt(last.records[-1].E)}")
        print(f"norm2_final={_fmt(last.records[-1].norm2)}")
    if outcome.blowup_time_estimate is not None:
        lo, hi = outcome.blowup_interval
        print(f"blowup_interval=[{_fmt(lo)},{_fmt(hi)}]")
        print(f"blowup_time_estimate={_fmt(hi)}")
    if csv_path is not None:
        print(f"records_csv={csv_path}")
    if outcome.status == "blowup_detected":
        return EXIT_BLOWUP
    if outcome.status == "step_underflow":
        return EXIT_UNDERFLOW
    return EXIT_OK


def cmd_estimate_cstar(
    config_path: str, seed: int | None = None, out: str | None = None
) -> int:
    """Estimate the discrete Sobolev constant for the configured problem."""
    cfg = parse_config(config_path)
    use_seed = cfg["seed"] if seed is None else seed
    grid = _build_grid(cfg)
    params = _build_params(cfg)
    try:
        report = validate_params(params, grid)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    if not report.q_leq_pstar:
        print(f"pstar={_fmt(report.pstar)}")
        print(
            f"error=q exceeds the critical exponent "
            f"(q={_fmt(params.q)}, pstar={_fmt(report.pstar)})"
        )
        return EXIT_PSTAR
    opts = EstimatorOptions(
        starts=cfg["estimator.starts"],
        max_iters=cfg["estimator.max_iters"],
        seed=use_seed,
    )
    est = estimate_sobolev_constant(grid, params, opts)
    print(f"c_star={_fmt(est.value)}")
    print(f"converged={_fmt(est.converged)}")
    print(f"pstar={_fmt(report.pstar)}")
    print("start_values=" + ",".join(_fmt(v) for v in est.start_values))
    print("iterations=" + ",".join(str(i) for i in est.iterations))
    if out is not None:
        _ensure_parent(out)
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"c_star={_fmt(est.value)}\n")
            fh.write(f"converged={_fmt(est.converged)}\n")
            fh.write("start_values=" + ",".join(_fmt(v) for v in est.start_values) + "\n")
    return EXIT_OK


def cmd_blowup_cert(
    config_path: str, seed: int | None = None, out: str | None = None
) -> int:
    """Check the sufficient blow-up conditions and confront them with a run."""
    cfg = parse_config(config_path)
    use_seed = cfg["seed"] if seed is None else seed
    grid = _build_grid(cfg)
    params = _build_params(cfg)
    try:
        report = validate_params(params, grid)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    u0 = _build_initial(cfg, grid, use_seed)

    opts = EstimatorOptions(
        starts=cfg["estimator.starts"],
        max_iters=cfg["estimator.max_iters"],
        seed=use_seed,
    )
    est = estimate_sobolev_constant(grid, params, opts)
    c_star = est.value
    th = blowup_thresholds(params, c_star)
    ctx = make_context(grid, params)
    e_init = total_energy(u0, ctx)
    sem_init = seminorm_p(u0, ctx) ** (1.0 / params.p)

    print(f"c_star={_fmt(c_star)}")
    print(f"alpha_crit={_fmt(th.alpha_crit)}")
    print(f"E0={_fmt(th.E0)}")
    print(f"E_initial={_fmt(e_init)}")
    print(f"seminorm_initial={_fmt(sem_init)}")

    failed = []
    if not report.q_leq_pstar:
        failed.append(
            f"q={_fmt(params.q)} exceeds the critical exponent {_fmt(report.pstar)}"
        )
    if not e_init < th.E0:
        failed.append(f"initial energy {_fmt(e_init)} not below E0={_fmt(th.E0)}")
    if not sem_init > th.alpha_crit:
        failed.append(
            f"initial seminorm {_fmt(sem_init)} not above "
            f"alpha_crit={_fmt(th.alpha_crit)}"
        )
    cert_path = out if out is not None else cfg["outputs.certificate"]
    if failed:
        cert = BlowupCertificate(
            c_star=c_star,
            alpha_crit=th.alpha_crit,
            E0=th.E0,
            beta=None,
            t_star_bound=None,
            observed_blowup_time=None,
            hypotheses_met=False,
            verdict="hypotheses-unmet",
        )
        for msg in failed:
            print(f"hypothesis_failed={msg}")
        print("verdict=hypotheses-unmet")
        if cert_path is not None:
            write_certificate(cert_path, cert)
        return EXIT_HYPOTHESES_UNMET

    beta = solve_beta(e_init, params, c_star)
    t_star = blowup_time_bound(u0, params, th.alpha_crit, beta, grid)
    print(f"beta={_fmt(beta)}")
    print(f"t_star_bound={_fmt(t_star)}")

    problem = _build_problem(cfg, use_seed)
    outcome = run(problem)
    print(f"run_status={outcome.status}")

    if outcome.status == "blowup_detected":
        observed = outcome.blowup_time_estimate
        verdict = "certified" if observed <= t_star else "bound-violated"
        cert = BlowupCertificate(
            c_star=c_star,
            alpha_crit=th.alpha_crit,
            E0=th.E0,
            beta=beta,
            t_star_bound=t_star,
            observed_blowup_time=observed,
            hypotheses_met=True,
            verdict=verdict,
        )
        print(f"observed_blowup_time={_fmt(observed)}")
        print(f"verdict={verdict}")
        if cert_path is not None:
            write_certificate(cert_path, cert)
        return EXIT_OK if verdict == "certified" else EXIT_BOUND_VIOLATED

    cert = BlowupCertificate(
        c_star=c_star,
        alpha_crit=th.alpha_crit,
        E0=th.E0,
        beta=beta,
        t_star_bound=t_star,
        observed_blowup_time=None,
        hypotheses_met=True,
        verdict="no-blowup-observed",
    )
    print("verdict=no-blowup-observed")
    if cert_path is not None:
        write_certificate(cert_path, cert)
    return EXIT_NO_BLOWUP


# -- verification suites ----------------------------------------------------

_SUITE_DEFAULT_SAMPLES = {
    "stroock-varopoulos": 100000,
    "energy-comparison": 1000,
    "resolvent": 1000,
    "moreau-yosida": 300,
    "gn-exponent": 10000,
}


def _suite_grid_ctx(p: float):
    grid = GridSpec.line(0.0, 1.0, 16)
    params = ModelParams(s=0.5, p=p, q=p + 2.0, r=3.0)
    return grid, make_context(grid, params)


def _array_lp(v: np.ndarray, m: float, vol: float) -> float:
    if math.isinf(m):
        return float(np.abs(v).max())
    return float((np.abs(v) ** m).sum() * vol) ** (1.0 / m)


def _suite_stroock(seed: int, samples: int) -> tuple[bool, list[str]]:
    report = check_stroock_varopoulos(samples, seed=seed)
    lines = [
        f"pairs={report.pairs_checked}",
        f"min_margin={_fmt(report.min_margin)}",
        f"scale={_fmt(report.scale)}",
        f"worst_z={_fmt(report.worst_pair[0])}",
        f"worst_t={_fmt(report.worst_pair[1])}",
    ]
    return report.ok, lines


def _suite_energy_comparison(seed: int, samples: int) -> tuple[bool, list[str]]:
    grid, ctx = _suite_grid_ctx(2.0)
    nn = grid.num_nodes
    rng = np.random.default_rng([seed, 1])
    worst = math.inf
    exps = [(p, r) for p in (2.0, 3.0) for r in (2.0, 3.0, 4.0)]
    for k in range(samples):
        p, r = exps[k % len(exps)]
        u = Field(grid, rng.standard_normal(nn))
        raw = rng.uniform(0.1, 2.0, size=(nn, nn))
        kernel = 0.5 * (raw + raw.T)
        lhs, rhs = _energy_comparison_terms(u, kernel, p, r, ctx)
        scale = max(1.0, abs(lhs), abs(rhs))
        worst = min(worst, (lhs - rhs) / scale)
    ok = worst >= -1e-10
    return ok, [f"fields={samples}", f"min_margin_over_scale={_fmt(worst)}"]


def _suite_resolvent(seed: int, samples: int) -> tuple[bool, list[str]]:
    grid, ctx2 = _suite_grid_ctx(2.0)
    _, ctx3 = _suite_grid_ctx(3.0)
    nn = grid.num_nodes
    vol = grid.cell_volume
    rng = np.random.default_rng([seed, 2])
    worst_contract = math.inf
    worst_lip = math.inf
    worst_drop = math.inf
    exponents = (1.0, 2.0, 3.5, math.inf)
    for k in range(samples):
        m = rng.uniform(2.0, 6.0)
        lam = 10.0 ** rng.uniform(-3.0, 1.0)
        a = 5.0 * rng.standard_normal(nn)
        b = 5.0 * rng.standard_normal(nn)
        ja = _resolvent_values(a, m, lam)
        jb = _resolvent_values(b, m, lam)
        for mm in exponents:
            lhs = _array_lp(ja - jb, mm, vol)
            rhs = _array_lp(a - b, mm, vol)
            worst_contract = min(
                worst_contract, (rhs - lhs) / max(rhs, 1e-300)
            )
        ya = (a - ja) / lam
        yb = (b - jb) / lam
        lip_rhs = (2.0 / lam) * _array_lp(a - b, 2.0, vol)
        lip_lhs = _array_lp(ya - yb, 2.0, vol)
        worst_lip = min(worst_lip, (lip_rhs - lip_lhs) / max(lip_rhs, 1e-300))
        if k % 10 == 0:
            ctx = ctx2 if k % 20 == 0 else ctx3
            u = Field(grid, a)
            drop = resolvent_seminorm_decrease(u, ProxSpec(m=m, lam=lam), ctx)
            scale = max(1.0, seminorm_p(u, ctx))
            worst_drop = min(worst_drop, drop / scale)
    ok = worst_contract >= -1e-12 and worst_lip >= -1e-12 and worst_drop >= -1e-10
    return ok, [
        f"pairs={samples}",
        f"min_contraction_margin={_fmt(worst_contract)}",
        f"min_lipschitz_margin={_fmt(worst_lip)}",
        f"min_seminorm_drop_over_scale={_fmt(worst_drop)}",
    ]


def _suite_moreau_yosida(seed: int, samples: int) -> tuple[bool, list[str]]:
    grid, _ = _suite_grid_ctx(2.0)
    nn = grid.num_nodes
    rng = np.random.default_rng([seed, 3])
    worst_low = math.inf
    worst_high = math.inf
    worst_ladder = math.inf
    for _ in range(samples):
        m = rng.uniform(2.0, 5.0)
        u = Field(grid, 3.0 * rng.standard_normal(nn))
        theta_u = lp_norm(u, m) ** m / m
        prev_env = -math.inf
        for lam in (1.0, 0.1, 0.01):
            spec = ProxSpec(m=m, lam=lam)
            env = moreau_yosida_value(u, spec)
            j = field_resolvent(u, spec)
            theta_j = lp_norm(j, m) ** m / m
            scale = max(1.0, theta_u)
            worst_low = min(worst_low, (env - theta_j) / scale)
            worst_high = min(worst_high, (theta_u - env) / scale)
            worst_ladder = min(worst_ladder, (env - prev_env) / scale)
            prev_env = env
    ok = worst_low >= -1e-12 and worst_high >= -1e-12 and worst_ladder >= -1e-12
    return ok, [
        f"fields={samples}",
        f"min_lower_sandwich={_fmt(worst_low)}",
        f"min_upper_sandwich={_fmt(worst_high)}",
        f"min_ladder_monotonicity={_fmt(worst_ladder)}",
    ]


def _suite_gn_exponent(seed: int, samples: int) -> tuple[bool, list[str]]:
    rng = np.random.default_rng([seed, 4])
    checked = 0
    worst_slack = math.inf
    attempts = 0
    while checked < samples and attempts < 50 * samples:
        attempts += 1
        ndim = int(rng.integers(1, 3))
        s = rng.uniform(0.05, 0.95)
        p = rng.uniform(2.0, 4.0)
        r_cap = 8.0
        if ndim > s * p:
            r_cap = min(r_cap, ndim * p / (ndim - s * p) - 1e-3)
        if r_cap <= 2.0:
            continue
        r = rng.uniform(2.0, r_cap)
        q_max = (ndim + s * r) * p / ndim
        q_lo = max(p, r) * (1.0 + 1e-9) + 1e-9
        if q_max <= q_lo * (1.0 + 1e-6):
            continue
        q = rng.uniform(q_lo, q_max * (1.0 - 1e-9))
        params = ModelParams(s=s, p=p, q=q, r=r)
        alpha = gn_exponent(params, ndim)
        worst_slack = min(worst_slack, alpha * q, p - alpha * q)
        checked += 1
    closed = gn_exponent(ModelParams(s=0.5, p=2.0, q=4.0, r=3.0), 1)
    ok = checked == samples and worst_slack > 0.0 and closed == 0.25
    return ok, [
        f"tuples={checked}",
        f"min_eq16_slack={_fmt(worst_slack)}",
        f"closed_form_alpha={_fmt(closed)}",
    ]


_SUITES = {
    "stroock-varopoulos": _suite_stroock,
    "energy-comparison": _suite_energy_comparison,
    "resolvent": _suite_resolvent,
    "moreau-yosida": _suite_moreau_yosida,
    "gn-exponent": _suite_gn_exponent,
}


def cmd_verify(
    suite: str = "all", seed: int = 0, samples: int | None = None
) -> int:
    """Run registered inequality suites; exit 0 only if every one passes."""
    if suite != "all" and suite not in _SUITES:
        raise ConfigError(
            f"unknown suite {suite!r}; choose from {', '.join(sorted(_SUITES))} or all"
        )
    if samples is not None and samples <= 0:
        raise ConfigError("samples must be positive")
    names = sorted(_SUITES) if suite == "all" else [suite]
    all_ok = True
    for name in names:
        count = samples if samples is not None else _SUITE_DEFAULT_SAMPLES[name]
        ok, lines = _SUITES[name](seed, count)
        all_ok = all_ok and ok
        status = "pass" if ok else "FAIL"
        detail = " ".join(lines)
        print(f"suite={name} {detail} status={status}")
    return EXIT_OK if all_ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fplab",
        description=(
            "Numerical laboratory for a degenerate nonlocal parabolic "
            "equation with fractional p-Laplacian diffusion and a "
            "power-law reaction."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="advance the evolution and record diagnostics")
    sim.add_argument("--config", required=True, help="path to a key=value config file")
    sim.add_argument("--seed", type=int, default=None, help="override the config seed")
    sim.add_argument("--out", default=None, help="override the records CSV path")

    ver = sub.add_parser("verify", help="run structural inequality suites")
    ver.add_argument("suite", nargs="?", default="all")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--samples", type=int, default=None)

    est = sub.add_parser("estimate-cstar", help="estimate the discrete Sobolev constant")
    est.add_argument("--config", required=True)
    est.add_argument("--seed", type=int, default=None)
    est.add_argument("--out", default=None, help="also write the estimate to this file")

    cert = sub.add_parser("blowup-cert", help="audit the finite-time blow-up bound")
    cert.add_argument("--config", required=True)
    cert.add_argument("--seed", type=int, default=None)
    cert.add_argument("--out", default=None, help="override the certificate path")

    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args.config, args.seed, args.out)
        if args.command == "verify":
            return cmd_verify(args.suite, args.seed, args.samples)
        if args.command == "estimate-cstar":
            return cmd_estimate_cstar(args.config, args.seed, args.out)
        if args.command == "blowup-cert":
            return cmd_blowup_cert(args.config, args.seed, args.out)
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
