"""Grids, fields, model parameters and discrete Lebesgue norms.

The computational domain is an open box in one or two dimensions with a
homogeneous condition on the whole complement: fields carry values only on
interior nodes and are extended by zero everywhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "ParameterError",
    "GridSpec",
    "Field",
    "Forcing",
    "ZeroForcing",
    "ConstantForcing",
    "TableForcing",
    "CallableForcing",
    "ModelParams",
    "AdmissibilityReport",
    "validate_params",
    "lp_norm",
    "make_initial_data",
]


class ParameterError(ValueError):
    """A parameter fell outside the supported domain."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform Cartesian grid on an open box, boundary excluded.

    Interior nodes sit at ``box_min[k] + i * h[k]`` for ``i = 1..n`` on each
    axis, with spacing ``h[k] = (box_max[k] - box_min[k]) / (n + 1)``.  Values
    on the complement of the box are identically zero, which is represented
    by simply not storing them.

    Parameters
    ----------
    dim : int
        Spatial dimension, 1 or 2.
    box_min, box_max : tuple of float
        Box corners, one entry per axis, ``box_min[k] < box_max[k]``.
    n : int
        Number of interior nodes per axis, at least 4.
    """

    dim: int
    box_min: tuple[float, ...]
    box_max: tuple[float, ...]
    n: int

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ParameterError(f"dim must be 1 or 2, got {self.dim}")
        lo = tuple(float(a) for a in self.box_min)
        hi = tuple(float(b) for b in self.box_max)
        if len(lo) != self.dim or len(hi) != self.dim:
            raise ParameterError("box corners must have one entry per axis")
        if not all(math.isfinite(a) and math.isfinite(b) for a, b in zip(lo, hi)):
            raise ParameterError("box corners must be finite")
        if not all(a < b for a, b in zip(lo, hi)):
            raise ParameterError("box_min must be strictly below box_max on every axis")
        if int(self.n) != self.n or self.n < 4:
            raise ParameterError(f"n must be an integer >= 4, got {self.n}")
        object.__setattr__(self, "box_min", lo)
        object.__setattr__(self, "box_max", hi)
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def line(cls, a: float, b: float, n: int) -> "GridSpec":
        return cls(1, (a,), (b,), n)

    @classmethod
    def rect(cls, corner_min, corner_max, n: int) -> "GridSpec":
        return cls(2, tuple(corner_min), tuple(corner_max), n)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(
            (b - a) / (self.n + 1) for a, b in zip(self.box_min, self.box_max)
        )

    @property
    def num_nodes(self) -> int:
        return self.n**self.dim

    @property
    def cell_volume(self) -> float:
        """Quadrature weight of a single node."""
        return math.prod(self.spacing)

    @property
    def box_measure(self) -> float:
        return math.prod(b - a for a, b in zip(self.box_min, self.box_max))

    def axis_nodes(self, axis: int) -> np.ndarray:
        a = self.box_min[axis]
        h = self.spacing[axis]
        return a + h * np.arange(1, self.n + 1)

    def nodes(self) -> np.ndarray:
        """Interior node coordinates, shape ``(num_nodes, dim)`` row-major."""
        if self.dim == 1:
            return self.axis_nodes(0)[:, None]
        xs, ys = np.meshgrid(self.axis_nodes(0), self.axis_nodes(1), indexing="ij")
        return np.column_stack([xs.ravel(), ys.ravel()])


@dataclass(frozen=True)
class Field:
    """Nodal values on a grid, extended by zero outside the box.

    Entries must be finite; the value array is copied and frozen on
    construction.
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float).reshape(-1)
        if arr.size != self.grid.num_nodes:
            raise ParameterError(
                f"expected {self.grid.num_nodes} nodal values, got {arr.size}"
            )
        if not np.all(np.isfinite(arr)):
            raise ParameterError("field values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values)


class Forcing:
    """Source term sampled on the grid at a given time."""

    def sample(self, grid: GridSpec, t: float) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroForcing(Forcing):
    def sample(self, grid: GridSpec, t: float) -> np.ndarray:
        return np.zeros(grid.num_nodes)

    @property
    def is_zero(self) -> bool:
        return True


@dataclass(frozen=True)
class ConstantForcing(Forcing):
    value: float

    def sample(self, grid: GridSpec, t: float) -> np.ndarray:
        return np.full(grid.num_nodes, float(self.value))


class TableForcing(Forcing):
    """Nodal forcing tabulated at increasing times, linear in between.

    Values are held constant beyond the first and last table times.
    """

    def __init__(self, times, values) -> None:
        self.times = np.array(times, dtype=float).reshape(-1)
        self.table = np.array(values, dtype=float)
        if self.table.ndim != 2 or self.table.shape[0] != self.times.size:
            raise ParameterError("forcing table must have one row per time")
        if self.times.size < 1 or np.any(np.diff(self.times) <= 0):
            raise ParameterError("forcing table times must be strictly increasing")

    def sample(self, grid: GridSpec, t: float) -> np.ndarray:
        if self.table.shape[1] != grid.num_nodes:
            raise ParameterError("forcing table does not match the grid")
        out = np.empty(grid.num_nodes)
        for j in range(grid.num_nodes):
            out[j] = np.interp(t, self.times, self.table[:, j])
        return out


class CallableForcing(Forcing):
    """Forcing given programmatically as ``fn(grid, t) -> values``."""

    def __init__(self, fn: Callable[[GridSpec, float], np.ndarray]) -> None:
        self.fn = fn

    def sample(self, grid: GridSpec, t: float) -> np.ndarray:
        return np.asarray(self.fn(grid, t), dtype=float).reshape(-1)


@dataclass(frozen=True)
class ModelParams:
    """Exponents and options of the evolution problem.

    ``s`` is the differentiability order of the nonlocal operator, ``p`` its
    integrability exponent, ``q`` the reaction exponent and ``r`` the extra
    Lebesgue exponent of the working space.  ``lam > 0`` replaces the reaction
    by its Yosida regularization, ``sigma`` optionally fixes the radius of the
    truncation ball.  Domain constraints are enforced by `validate_params`.
    """

    s: float
    p: float
    q: float
    r: float
    lam: float = 0.0
    sigma: float | None = None
    forcing: Forcing = field(default_factory=ZeroForcing)


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the parameter admissibility check.

    ``cond7_ok`` records whether ``r`` exceeds ``N (q - p) / (s p)`` strictly,
    which makes the intersection space embed into the reaction Lebesgue
    space.  ``pstar`` is the critical exponent ``N p / (N - s p)``, infinite
    when ``N <= s p``.
    """

    cond7_ok: bool
    cond7_lhs: float
    cond7_rhs: float
    q_leq_pstar: bool
    pstar: float
    messages: tuple[str, ...]


def validate_params(params: ModelParams, grid: GridSpec) -> AdmissibilityReport:
    """Check parameter domains and admissibility on the given grid.

    Raises
    ------
    ParameterError
        If ``s`` is outside (0, 1), ``p < 2``, ``q <= p`` or ``r < 2``.
    """
    return _admissibility(params, grid.dim)


def _admissibility(params: ModelParams, ndim: int) -> AdmissibilityReport:
    s, p, q, r = params.s, params.p, params.q, params.r
    for name, val in (("s", s), ("p", p), ("q", q), ("r", r)):
        if not (isinstance(val, (int, float)) and math.isfinite(val)):
            raise ParameterError(f"{name} must be a finite number, got {val!r}")
    if not 0.0 < s < 1.0:
        raise ParameterError(f"s must lie in (0, 1), got {s}")
    if p < 2.0:
        raise ParameterError(f"p must be at least 2, got {p}")
    if q <= p:
        raise ParameterError(f"q must exceed p, got q={q}, p={p}")
    if r < 2.0:
        raise ParameterError(f"r must be at least 2, got {r}")
    if not (math.isfinite(params.lam) and params.lam >= 0.0):
        raise ParameterError(f"lam must be a finite number >= 0, got {params.lam}")
    if params.sigma is not None and not params.sigma > 0.0:
        raise ParameterError(f"sigma must be positive when set, got {params.sigma}")

    lhs = float(r)
    rhs = ndim * (q - p) / (s * p)
    cond7_ok = lhs > rhs

    if ndim > s * p:
        pstar = ndim * p / (ndim - s * p)
    else:
        pstar = math.inf
    q_leq_pstar = q <= pstar

    messages = []
    if cond7_ok:
        messages.append(f"admissible: r={lhs:g} > N(q-p)/(sp)={rhs:g}")
    else:
        messages.append(f"not admissible: r={lhs:g} <= N(q-p)/(sp)={rhs:g}")
    if math.isinf(pstar):
        messages.append("critical exponent unbounded (N <= s p)")
    elif q_leq_pstar:
        messages.append(f"q={q:g} within critical exponent pstar={pstar:g}")
    else:
        messages.append(f"q={q:g} exceeds critical exponent pstar={pstar:g}")

    return AdmissibilityReport(
        cond7_ok=cond7_ok,
        cond7_lhs=lhs,
        cond7_rhs=rhs,
        q_leq_pstar=q_leq_pstar,
        pstar=pstar,
        messages=tuple(messages),
    )


def lp_norm(u: Field, m: float) -> float:
    """Discrete Lebesgue norm ``(sum |u_i|^m h^N)^(1/m)``.

    ``m = inf`` returns the nodal supremum.  Exponents below 1 are rejected.
    """
    if not m >= 1.0:
        raise ParameterError(f"Lebesgue exponent must be >= 1, got {m}")
    a = np.abs(u.values)
    if math.isinf(m):
        return float(a.max()) if a.size else 0.0
    vol = u.grid.cell_volume
    return float((a**m).sum() * vol) ** (1.0 / m)


def make_initial_data(
    kind: str, grid: GridSpec, amplitude: float = 1.0, seed: int = 0
) -> Field:
    """Construct initial data of a named shape.

    ``zero`` is the zero field; ``bump`` is the separable cosine profile
    ``A * prod_k cos(pi (x_k - c_k) / L_k)`` vanishing on the box boundary
    and peaking at the center; ``indicator`` is ``A`` on the middle half of
    the box (per axis) and zero elsewhere; ``random`` draws iid standard
    normal values scaled by ``A`` from a seeded generator.
    """
    if not math.isfinite(amplitude):
        raise ParameterError("amplitude must be finite")
    pts = grid.nodes()
    if kind == "zero":
        vals = np.zeros(grid.num_nodes)
    elif kind == "bump":
        vals = np.full(grid.num_nodes, float(amplitude))
        for k in range(grid.dim):
            a, b = grid.box_min[k], grid.box_max[k]
            center = 0.5 * (a + b)
            vals *= np.cos(np.pi * (pts[:, k] - center) / (b - a))
    elif kind == "indicator":
        inside = np.ones(grid.num_nodes, dtype=bool)
        for k in range(grid.dim):
            a, b = grid.box_min[k], grid.box_max[k]
            center, quarter = 0.5 * (a + b), 0.25 * (b - a)
            inside &= np.abs(pts[:, k] - center) <= quarter
        vals = np.where(inside, float(amplitude), 0.0)
    elif kind == "random":
        rng = np.random.default_rng(seed)
        vals = float(amplitude) * rng.standard_normal(grid.num_nodes)
    else:
        raise ParameterError(f"unknown initial data kind {kind!r}")
    return Field(grid, vals)
