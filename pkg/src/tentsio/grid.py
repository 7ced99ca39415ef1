"""Discretization of the parabolic upper half-space.

Time is sampled on a geometric ladder ``t_i = t_min * rho**i`` with
log-midpoint weights ``w_i = t_i * log(rho)``; space is a periodic lattice on
``[-X, X)**n`` with cell volume ``h = (2X/Nx)**n``.  A :class:`Field` is a
complex sample array of shape ``(Nt, Nx, ..., Nx)`` on such a grid.

Field files are JSON documents::

    {
      "format": "tentsio.field",
      "version": 1,
      "grid": {"n": 1, "X": 3.14, "Nx": 16, "t_min": 0.001, "t_max": 1.0, "Nt": 64},
      "support": null | {"t_upper": 1.0, "center": [0.0], "radius": 1.0},
      "shape": [64, 16],
      "real": [...], "imag": [...]
    }

``real`` and ``imag`` hold the row-major (C order) flattening of the sample
array.  Floats are written with ``repr`` precision so a save/load round trip is
exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, NumericRangeError, SamplingError

FIELD_FORMAT = "tentsio.field"
FIELD_VERSION = 1

# relative slack used when testing closed support boundaries on the lattice
_BOUNDARY_RTOL = 1e-12


def _is_power_of_two(k: int) -> bool:
    return k > 0 and (k & (k - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Parameters of a space-time grid.

    Parameters
    ----------
    n : int
        Spatial dimension, 1 to 3.
    X : float
        Spatial half-width; the domain is the torus ``[-X, X)**n``.
    Nx : int
        Points per spatial axis, a power of two, at least 8.
    t_min, t_max : float
        First and last time node, ``0 < t_min < t_max``.
    Nt : int
        Number of geometrically spaced time nodes, a power of two, at least 8.
    """

    n: int
    X: float
    Nx: int
    t_min: float
    t_max: float
    Nt: int

    def __post_init__(self):
        if int(self.n) != self.n or not 1 <= self.n <= 3:
            raise ConfigurationError(f"spatial dimension must be 1, 2 or 3, got {self.n}")
        if not (math.isfinite(self.X) and self.X > 0):
            raise ConfigurationError(f"half-width X must be positive, got {self.X}")
        if not (math.isfinite(self.t_min) and self.t_min > 0):
            raise ConfigurationError(f"t_min must be positive, got {self.t_min}")
        if not (math.isfinite(self.t_max) and self.t_min < self.t_max):
            raise ConfigurationError(
                f"need t_min < t_max, got t_min={self.t_min}, t_max={self.t_max}")
        for name in ("Nx", "Nt"):
            k = getattr(self, name)
            if int(k) != k or k < 8 or not _is_power_of_two(int(k)):
                raise ConfigurationError(f"{name} must be a power of two >= 8, got {k}")

    @property
    def log_ratio(self) -> float:
        return math.log(self.t_max / self.t_min) / (self.Nt - 1)

    @property
    def ratio(self) -> float:
        """Geometric ratio between consecutive time nodes."""
        return math.exp(self.log_ratio)

    @property
    def dx(self) -> float:
        return 2.0 * self.X / self.Nx

    @property
    def h(self) -> float:
        """Spatial cell volume."""
        return self.dx ** self.n

    @property
    def spatial_shape(self) -> tuple:
        return (self.Nx,) * self.n

    @property
    def shape(self) -> tuple:
        return (self.Nt,) + self.spatial_shape

    def times(self) -> np.ndarray:
        return self.t_min * np.exp(self.log_ratio * np.arange(self.Nt))

    def time_weights(self) -> np.ndarray:
        return self.times() * self.log_ratio

    def time_edges(self) -> np.ndarray:
        """Edges of the log-midpoint cells, ``Nt + 1`` values."""
        return self.t_min * np.exp(self.log_ratio * (np.arange(self.Nt + 1) - 0.5))

    def axis(self) -> np.ndarray:
        return -self.X + self.dx * np.arange(self.Nx)

    def with_time(self, t_min: float, t_max: float, Nt: Optional[int] = None) -> "GridSpec":
        return GridSpec(self.n, self.X, self.Nx, t_min, t_max, self.Nt if Nt is None else Nt)

    def to_dict(self) -> dict:
        return {"n": self.n, "X": self.X, "Nx": self.Nx,
                "t_min": self.t_min, "t_max": self.t_max, "Nt": self.Nt}

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        try:
            return cls(int(d["n"]), float(d["X"]), int(d["Nx"]),
                       float(d["t_min"]), float(d["t_max"]), int(d["Nt"]))
        except KeyError as exc:
            raise ConfigurationError(f"grid description lacks {exc}") from None


@dataclass(frozen=True, eq=False)
class Grid:
    """Node coordinates and quadrature weights of a :class:`GridSpec`."""

    spec: GridSpec
    t: np.ndarray
    w: np.ndarray
    axis: np.ndarray
    h: float

    @cached_property
    def coords(self) -> tuple:
        """Broadcastable spatial coordinate arrays, one per axis."""
        n = self.spec.n
        out = []
        for k in range(n):
            shape = [1] * n
            shape[k] = self.spec.Nx
            out.append(self.axis.reshape(shape))
        return tuple(out)

    def mass(self) -> float:
        """Total quadrature mass of the grid, ``sum_i w_i * h * Nx**n``."""
        return float(self.w.sum() * self.h * self.spec.Nx ** self.spec.n)


def make_grid(spec: GridSpec) -> Grid:
    t = spec.times()
    w = spec.time_weights()
    axis = spec.axis()
    for arr in (t, w, axis):
        arr.setflags(write=False)
    return Grid(spec, t, w, axis, spec.h)


def periodic_distance(spec: GridSpec, center: Sequence[float]) -> np.ndarray:
    """Minimum-image distance from ``center`` to every spatial node."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if center.shape != (spec.n,):
        raise DomainError(f"center must have {spec.n} coordinates, got {center.tolist()}")
    period = 2.0 * spec.X
    grid = make_grid(spec)
    sq = np.zeros(spec.spatial_shape)
    for k, c in enumerate(grid.coords):
        d = np.abs(c - center[k]) % period
        sq = sq + np.minimum(d, period - d) ** 2
    return np.sqrt(sq)


def lattice_offsets(spec: GridSpec) -> np.ndarray:
    """Minimum-image length of every lattice offset, in the spatial shape.

    Entry ``[k1, ..., kn]`` is the distance represented by a roll of
    ``(k1, ..., kn)`` cells.
    """
    k = np.arange(spec.Nx)
    k = np.minimum(k, spec.Nx - k) * spec.dx
    sq = np.zeros(spec.spatial_shape)
    for ax in range(spec.n):
        shape = [1] * spec.n
        shape[ax] = spec.Nx
        sq = sq + (k ** 2).reshape(shape)
    return np.sqrt(sq)


@dataclass(frozen=True)
class Support:
    """A tent ``(0, t_upper] x B(center, radius)`` (closed ball)."""

    t_upper: float
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        if not self.t_upper > 0 or not self.radius > 0:
            raise DomainError(f"support needs positive t_upper and radius, got {self}")

    def mask(self, spec: GridSpec) -> np.ndarray:
        t = spec.times()
        in_time = t <= self.t_upper * (1 + _BOUNDARY_RTOL)
        in_ball = periodic_distance(spec, self.center) <= self.radius * (1 + _BOUNDARY_RTOL)
        return in_time.reshape((-1,) + (1,) * spec.n) & in_ball[None]

    def to_dict(self) -> dict:
        return {"t_upper": self.t_upper, "center": list(self.center), "radius": self.radius}

    @classmethod
    def from_dict(cls, d: Optional[dict]) -> Optional["Support"]:
        if d is None:
            return None
        return cls(float(d["t_upper"]), tuple(d["center"]), float(d["radius"]))


@dataclass(frozen=True, eq=False)
class Field:
    """Complex samples on a grid, immutable after construction."""

    spec: GridSpec
    values: np.ndarray
    support: Optional[Support] = dc_field(default=None)

    def __post_init__(self):
        values = np.array(self.values, dtype=complex, copy=True)
        if values.shape != self.spec.shape:
            raise DomainError(f"values have shape {values.shape}, grid expects {self.spec.shape}")
        if not np.all(np.isfinite(values)):
            raise SamplingError("field contains non-finite values")
        if self.support is not None:
            outside = ~self.support.mask(self.spec)
            if np.any(values[outside] != 0):
                raise DomainError("field does not vanish outside its declared support")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def grid(self) -> Grid:
        return make_grid(self.spec)

    def replace(self, values, support: Optional[Support] = None) -> "Field":
        return Field(self.spec, values, support)

    def __mul__(self, scalar) -> "Field":
        return Field(self.spec, self.values * scalar, self.support)

    __rmul__ = __mul__

    def __add__(self, other: "Field") -> "Field":
        if other.spec != self.spec:
            raise DomainError("cannot add fields on different grids")
        return Field(self.spec, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        return self + (-1.0) * other

    def translate(self, cells: Sequence[int]) -> "Field":
        """Periodic shift by whole lattice cells along each spatial axis."""
        cells = tuple(int(c) for c in np.atleast_1d(cells))
        if len(cells) != self.spec.n:
            raise DomainError(f"need {self.spec.n} shifts, got {cells}")
        axes = tuple(range(1, self.spec.n + 1))
        return Field(self.spec, np.roll(self.values, cells, axis=axes))

    def to_dict(self) -> dict:
        flat = self.values.ravel()
        return {
            "format": FIELD_FORMAT,
            "version": FIELD_VERSION,
            "grid": self.spec.to_dict(),
            "support": None if self.support is None else self.support.to_dict(),
            "shape": list(self.values.shape),
            "real": flat.real.tolist(),
            "imag": flat.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Field":
        if d.get("format") != FIELD_FORMAT:
            raise ConfigurationError(f"not a field document (format={d.get('format')!r})")
        if d.get("version") != FIELD_VERSION:
            raise ConfigurationError(f"unsupported field version {d.get('version')!r}")
        spec = GridSpec.from_dict(d["grid"])
        shape = tuple(d["shape"])
        values = (np.asarray(d["real"], dtype=float)
                  + 1j * np.asarray(d["imag"], dtype=float)).reshape(shape)
        return cls(spec, values, Support.from_dict(d.get("support")))


def zeros(spec: GridSpec) -> Field:
    return Field(spec, np.zeros(spec.shape, dtype=complex))


def sample(fn: Callable, spec: GridSpec, support: Optional[Support] = None,
           chunk: int = 1 << 21) -> Field:
    """Evaluate ``fn(t, *y)`` on every grid node.

    ``fn`` receives broadcastable arrays: ``t`` of shape ``(k, 1, ..., 1)`` and
    one coordinate array per spatial axis.  Time slices are evaluated in chunks
    of at most ``chunk`` samples to bound temporary memory.
    """
    grid = make_grid(spec)
    n_spatial = spec.Nx ** spec.n
    step = max(1, chunk // n_spatial)
    out = np.empty(spec.shape, dtype=complex)
    tshape = (-1,) + (1,) * spec.n
    for start in range(0, spec.Nt, step):
        t = grid.t[start:start + step].reshape(tshape)
        vals = np.asarray(fn(t, *grid.coords), dtype=complex)
        vals = np.broadcast_to(vals, (t.shape[0],) + spec.spatial_shape)
        bad = ~np.isfinite(vals)
        if bad.any():
            idx = np.argwhere(bad)[0]
            i = start + int(idx[0])
            y = [float(grid.axis[j]) for j in idx[1:]]
            raise SamplingError(
                f"non-finite value {vals[tuple(idx)]} at node {tuple(int(k) for k in [i, *idx[1:]])}"
                f" (t={grid.t[i]!r}, y={y})")
        out[start:start + step] = vals
    return Field(spec, out, support)


def time_weights(spec: GridSpec, beta: float) -> np.ndarray:
    """Quadrature weights ``t_i**beta * w_i`` for the measure ``t**beta dt``."""
    grid = make_grid(spec)
    with np.errstate(over="ignore", under="ignore"):
        tw = grid.t ** beta * grid.w
    if not np.all(np.isfinite(tw)) or np.any(tw == 0):
        raise NumericRangeError(f"weights t**beta overflow or underflow for beta={beta}")
    return tw


def weighted_l2_norm(f: Field, beta: float) -> float:
    """Discrete norm in ``L^2(t**beta dt dy)``."""
    tw = time_weights(f.spec, beta)
    sq = np.abs(f.values) ** 2
    per_time = sq.reshape(f.spec.Nt, -1).sum(axis=1)
    total = float(np.dot(tw, per_time) * f.spec.h)
    if not math.isfinite(total):
        raise NumericRangeError("weighted L2 sum overflowed")
    return math.sqrt(total)


def inner(f: Field, g: Field, beta: float = 0.0) -> complex:
    """Discrete pairing ``iint f * conj(g) t**beta dt dy``."""
    if f.spec != g.spec:
        raise DomainError("fields live on different grids")
    tw = time_weights(f.spec, beta)
    prod = (f.values * np.conj(g.values)).reshape(f.spec.Nt, -1).sum(axis=1)
    return complex(np.dot(tw, prod) * f.spec.h)


def save_field(f: Field, path) -> None:
    Path(path).write_text(json.dumps(f.to_dict()))


def load_field(path) -> Field:
    return Field.from_dict(json.loads(Path(path).read_text()))
