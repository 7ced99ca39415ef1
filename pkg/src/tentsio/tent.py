"""Tent-space quasi-norms, Carleson norms, the homogeneity change and atoms.

The discrete square function of ``g`` at a lattice point ``x`` is

    A(x) = sum_{i, j : |y_j - x| < t_i**(1/m)} t_i**(-n/m) |g(t_i, y_j)|**2 t_i**beta w_i h

and the ``T^{p,2,m}(t**beta dt dy)`` quasi-norm is ``(sum_x h A(x)**(p/2))**(1/p)``.
Cone membership is strict.  For ``p = inf`` the Carleson norm is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, NumericRangeError, ParameterError
from .grid import Field, GridSpec, Support, lattice_offsets, make_grid, time_weights

# relative guard for the closed time bound t <= r**m in Carleson boxes
_TIME_RTOL = 1e-12
# above this many (offset x node) roll operations, ball sums go through FFT
_DIRECT_LIMIT = 2e8


@dataclass(frozen=True)
class TentParams:
    """Exponents ``(p, m, beta)`` of ``T^{p,2,m}(t**beta dt dy)``."""

    p: float
    m: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if not (self.p > 0):
            raise ParameterError(f"tent exponent p must be positive, got {self.p}")
        if not (math.isfinite(self.m) and self.m > 0):
            raise ParameterError(f"homogeneity m must be positive, got {self.m}")
        if not math.isfinite(self.beta):
            raise ParameterError(f"weight exponent beta must be finite, got {self.beta}")

    @property
    def size_exponent(self) -> float:
        """``n``-free exponent ``2/p - 1`` of the atom size bound."""
        return (0.0 if math.isinf(self.p) else 2.0 / self.p) - 1.0


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def cone_radii(spec: GridSpec, m: float) -> np.ndarray:
    return make_grid(spec).t ** (1.0 / m)


def discrete_ball_volume(spec: GridSpec, m: float) -> np.ndarray:
    """Per-time lattice volume ``h * #{k : |k| < R_i} / R_i**n`` of the cone sections.

    This is the constant that makes the ``p = 2`` identity exact on the grid;
    it tends to the unit-ball volume as ``dx / R_i -> 0`` (away from wrap-around).
    """
    radii = cone_radii(spec, m)
    lengths = np.sort(lattice_offsets(spec).ravel())
    counts = np.searchsorted(lengths, radii, side="left")
    return spec.h * counts / radii ** spec.n


def _squared_density(g: Field, m: float, beta: float) -> np.ndarray:
    spec = g.spec
    tw = time_weights(spec, beta)
    with np.errstate(over="ignore", under="ignore"):
        c = cone_radii(spec, m) ** (-spec.n) * tw * spec.h
    if not np.all(np.isfinite(c)) or np.any(c == 0):
        raise NumericRangeError(f"cone weights overflow for m={m}, beta={beta}")
    s = np.abs(g.values) ** 2 * c.reshape((-1,) + (1,) * spec.n)
    if not np.all(np.isfinite(s)):
        raise NumericRangeError("squared density overflowed")
    return s


def _ball_sums(layers: np.ndarray, radii: np.ndarray, spec: GridSpec) -> np.ndarray:
    """``sum_k sum_{|d| < radii[k]} layers[k](x + d)`` for every lattice ``x``.

    ``layers`` has shape ``(K,) + spatial_shape`` and ``radii`` increases.
    """
    lengths = lattice_offsets(spec)
    flat = lengths.ravel()
    n_points = flat.size
    # number of layers whose ball contains each offset
    first = np.searchsorted(radii, flat, side="right")
    inside = first < len(radii)
    axes = tuple(range(spec.n))
    if inside.sum() * n_points <= _DIRECT_LIMIT and spec.n == 1:
        # suffix sums: offset d sees every layer k >= first[d]
        suffix = np.cumsum(layers[::-1], axis=0)[::-1]
        out = np.zeros(spec.spatial_shape)
        for idx in np.flatnonzero(inside):
            shift = np.unravel_index(idx, spec.spatial_shape)
            out += np.roll(suffix[first[idx]], tuple(-int(s) for s in shift), axis=axes)
        return out
    # FFT path: group layers with the same lattice ball
    counts = np.searchsorted(np.sort(flat), radii, side="left")
    out_hat = np.zeros(np.fft.rfftn(np.zeros(spec.spatial_shape)).shape, dtype=complex)
    k = 0
    K = len(radii)
    while k < K:
        j = k
        while j + 1 < K and counts[j + 1] == counts[k]:
            j += 1
        if counts[k] > 0:
            ball = (lengths < radii[k]).astype(float)
            # correlation with a symmetric ball equals convolution
            out_hat += np.fft.rfftn(layers[k:j + 1].sum(axis=0)) * np.fft.rfftn(ball)
        k = j + 1
    out = np.fft.irfftn(out_hat, s=spec.spatial_shape, axes=axes)
    return np.maximum(out, 0.0)


def square_function(g: Field, m: float, beta: float) -> np.ndarray:
    """The discrete conical square function ``A(x)`` (squared), on the lattice."""
    s = _squared_density(g, m, beta)
    active = np.flatnonzero(s.reshape(s.shape[0], -1).any(axis=1))
    if active.size == 0:
        return np.zeros(g.spec.spatial_shape)
    radii = cone_radii(g.spec, m)[active]
    return _ball_sums(s[active], radii, g.spec)


def tent_norm(g: Field, params: TentParams) -> float:
    """Discrete ``T^{p,2,m}(t**beta dt dy)`` quasi-norm of ``g``.

    Parameters
    ----------
    g : Field
        Samples on a space-time grid.
    params : TentParams
        ``p = inf`` is redirected to :func:`carleson_norm`.

    Returns
    -------
    float
        ``(sum_x h A(x)**(p/2))**(1/p)``.
    """
    if math.isinf(params.p):
        return carleson_norm(g, params.m, params.beta)
    a = square_function(g, params.m, params.beta)
    if not np.any(a):
        return 0.0
    # factor out the max to keep A**(p/2) in range for small p
    top = a.max()
    # summing in sorted order makes the result independent of lattice position
    total = g.spec.h * np.sum(np.sort((a / top) ** (params.p / 2), axis=None))
    value = math.sqrt(top) * total ** (1.0 / params.p)
    if not math.isfinite(value):
        raise NumericRangeError(f"tent norm overflowed for {params}")
    return float(value)


def default_ladder(spec: GridSpec) -> np.ndarray:
    """Dyadic radii from below the cell width up to the half-width ``X``."""
    lo = math.floor(math.log2(spec.dx))
    hi = math.floor(math.log2(spec.X))
    return 2.0 ** np.arange(lo, hi + 1)


def carleson_norm(g: Field, m: float, beta: float,
                  ladder: Optional[Sequence[float]] = None) -> float:
    """Discrete Carleson norm, the ``p = inf`` endpoint.

    The supremum runs over lattice centres ``x`` and radii ``r`` on a dyadic
    ladder (by default :func:`default_ladder`) of
    ``(r**-n sum_{|y-x| < r, t <= r**m} |g|**2 t**beta w h)**(1/2)``.
    """
    spec = g.spec
    if not (m > 0):
        raise ParameterError(f"homogeneity m must be positive, got {m}")
    tw = time_weights(spec, beta)
    sq = np.abs(g.values) ** 2 * (tw * spec.h).reshape((-1,) + (1,) * spec.n)
    if not np.all(np.isfinite(sq)):
        raise NumericRangeError("Carleson box sums overflowed")
    if not np.any(sq):
        return 0.0
    prefix = np.cumsum(sq, axis=0)
    t = make_grid(spec).t
    radii = np.asarray(default_ladder(spec) if ladder is None else ladder, dtype=float)
    best = 0.0
    for r in radii:
        top = np.searchsorted(t, r ** m * (1 + _TIME_RTOL), side="right")
        if top == 0:
            continue
        box = _ball_sums(prefix[top - 1][None], np.array([r]), spec)
        best = max(best, float(box.max()) / r ** spec.n)
    return math.sqrt(best)


def companion_spec(spec: GridSpec, m: float) -> GridSpec:
    """Grid for ``j(f)``: times ``t**(1/m)`` over the same node count."""
    return spec.with_time(spec.t_min ** (1.0 / m), spec.t_max ** (1.0 / m))


def _same_grid(a: GridSpec, b: GridSpec) -> bool:
    return (a.n == b.n and a.Nx == b.Nx and a.Nt == b.Nt and a.X == b.X
            and math.isclose(a.t_min, b.t_min, rel_tol=1e-12)
            and math.isclose(a.t_max, b.t_max, rel_tol=1e-12))


@dataclass(frozen=True, eq=False)
class Atom:
    """A field supported in the tent ``(0, r**m] x B(x0, r)``."""

    field: Field
    r: float
    x0: tuple
    params: TentParams

    @property
    def support(self) -> Support:
        return Support(self.r ** self.params.m, self.x0, self.r)


@dataclass(frozen=True)
class AtomCheck:
    passed: bool
    slack: float
    support_ok: bool


def change_homogeneity(f, m: float, beta: float, target: Optional[GridSpec] = None):
    """Map ``f`` to ``j(f)(t, y) = sqrt(m) t**(m(1+beta)/2) f(t**m, y)``.

    ``j`` carries ``T^{p,2,m}(t**beta dt dy)`` onto ``T^{p,2,1}(t**-1 dt dy)``.
    The image is sampled on :func:`companion_spec`, whose nodes are exactly the
    ``m``-th roots of the input nodes, so no interpolation is involved.

    Parameters
    ----------
    f : Field or Atom
        An :class:`Atom` is mapped to an atom for ``(p, 1, -1)`` of the same
        scale and centre.
    target : GridSpec, optional
        Requested output grid; it must coincide with the companion grid.
    """
    if isinstance(f, Atom):
        if not (math.isclose(f.params.m, m) and math.isclose(f.params.beta, beta)):
            raise ParameterError("atom parameters do not match (m, beta)")
        image = change_homogeneity(f.field, m, beta, target)
        return Atom(image, f.r, f.x0, TentParams(f.params.p, 1.0, -1.0))
    if not (m > 0):
        raise ParameterError(f"homogeneity m must be positive, got {m}")
    spec = companion_spec(f.spec, m)
    if target is not None:
        if not _same_grid(target, spec):
            raise DomainError(
                f"target grid times ({target.t_min}, {target.t_max}, Nt={target.Nt}) do not"
                f" match the required ({spec.t_min}, {spec.t_max}, Nt={spec.Nt})")
        spec = target
    s = make_grid(f.spec).t ** (1.0 / m)
    with np.errstate(over="ignore", under="ignore"):
        factor = math.sqrt(m) * s ** (m * (1 + beta) / 2)
    if not np.all(np.isfinite(factor)) or np.any(factor == 0):
        raise NumericRangeError(f"homogeneity factor out of range for m={m}, beta={beta}")
    values = f.values * factor.reshape((-1,) + (1,) * spec.n)
    support = None
    if f.support is not None:
        support = Support(f.support.t_upper ** (1.0 / m), f.support.center, f.support.radius)
    return Field(spec, values, support)


def _atom_size(field: Field, beta: float) -> float:
    tw = time_weights(field.spec, beta)
    per_time = (np.abs(field.values) ** 2).reshape(field.spec.Nt, -1).sum(axis=1)
    return float(np.dot(tw, per_time) * field.spec.h)


def make_atom(kind: str, r: float, x0, params: TentParams, spec: GridSpec,
              seed: int = 0) -> Atom:
    """Build a normalized atom on ``(0, r**m] x B(x0, r)``.

    Parameters
    ----------
    kind : {"constant", "randomized", "oscillatory"}
        Profile inside the tent: a constant, i.i.d. complex Gaussian samples, or
        a product of cosines with a log-time phase (random frequencies).
    r : float
        Scale.
    x0 : sequence of float
        Centre.
    params : TentParams
    spec : GridSpec
    seed : int
        Seed for the randomized and oscillatory kinds.

    Returns
    -------
    Atom
        Scaled so that ``r**(n(2/p-1)) * iint |A|**2 t**beta = 1`` on the grid.
    """
    if not (r > 0):
        raise DomainError(f"atom scale must be positive, got {r}")
    x0 = tuple(float(c) for c in np.atleast_1d(x0))
    support = Support(r ** params.m, x0, r)
    mask = support.mask(spec)
    if not mask.any():
        raise DomainError(f"tent (0, {r ** params.m}] x B({list(x0)}, {r}) misses every grid node")
    rng = np.random.default_rng(seed)
    if kind == "constant":
        profile = np.ones(spec.shape, dtype=complex)
    elif kind == "randomized":
        profile = rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)
    elif kind == "oscillatory":
        grid = make_grid(spec)
        freq = rng.integers(1, 5, size=spec.n)
        phase = rng.uniform(0, 2 * np.pi, size=spec.n)
        theta = rng.uniform(-2.0, 2.0)
        profile = np.ones(spec.shape, dtype=complex)
        for ax, c in enumerate(grid.coords):
            profile = profile * np.cos(np.pi * freq[ax] * (c - x0[ax]) / r + phase[ax])[None]
        tt = grid.t.reshape((-1,) + (1,) * spec.n)
        profile = profile * np.exp(1j * theta * np.log(tt / r ** params.m))
    else:
        raise ParameterError(f"unknown atom kind {kind!r}")
    values = np.where(mask, profile, 0.0)
    draft = Field(spec, values)
    size = _atom_size(draft, params.beta)
    if size == 0:
        raise DomainError(f"{kind} profile vanishes on every node of the tent")
    target = r ** (-spec.n * params.size_exponent)
    scale = math.sqrt(target / size)
    return Atom(Field(spec, values * scale, support), r, x0, params)


def verify_atom(a: Atom, tol: float = 1e-10) -> AtomCheck:
    """Check support and size of an atom.

    ``slack = r**(n(2/p-1)) * iint |A|**2 t**beta - 1``; the atom passes when the
    support check holds and ``slack <= tol``.
    """
    spec = a.field.spec
    outside = ~a.support.mask(spec)
    support_ok = not np.any(a.field.values[outside] != 0)
    size = _atom_size(a.field, a.params.beta)
    slack = a.r ** (spec.n * a.params.size_exponent) * size - 1.0
    return AtomCheck(bool(support_ok and slack <= tol), float(slack), bool(support_ok))
