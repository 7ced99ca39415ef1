"""Semigroup models on the periodic lattice and off-diagonal decay fits.

Every model is self-adjoint and nonnegative, so all operators are evaluated by
spectral calculus ``f(L) = sum_k f(mu_k) <., phi_k> phi_k``.  The heat, Poisson
and scalar models are diagonal in the discrete Fourier basis; the
divergence-form and Schrodinger models are finite-difference matrices
factored once with ``eigh``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import linalg

from .errors import (DomainError, FitUnderdeterminedError, NearSingularityError, ParameterError,
                     ResourceError, UnsupportedOperationError)
from .grid import GridSpec, make_grid, periodic_distance

# smallest admissible |1 - z mu^k| over the spectrum
RESOLVENT_MARGIN = 1e-8
# asymptotic regime of the decay fits
ASYMPTOTIC_THRESHOLD = 4.0
# dense matrices are limited to this many rows (1-D) or this many in total (n >= 2)
DENSE_CAP_1D = 1024
DENSE_CAP_ND = 4096

PAIRS = {"2:2": (2.0, 2.0), "1:2": (1.0, 2.0), "2:inf": (2.0, math.inf)}


def _inv(q: float) -> float:
    return 0.0 if math.isinf(q) else 1.0 / q


def parse_pair(pair) -> tuple:
    """Normalize ``"2:2"``, ``"1:2"``, ``"2:inf"`` or a tuple to ``(q, r)``."""
    if isinstance(pair, str):
        key = pair.replace("->", ":").replace("∞", "inf").strip()
        if key not in PAIRS:
            raise ParameterError(f"exponent pair must be one of {sorted(PAIRS)}, got {pair!r}")
        return PAIRS[key]
    q, r = (float(v) for v in pair)
    if (q, r) not in PAIRS.values():
        raise ParameterError(f"exponent pair must be one of {sorted(PAIRS)}, got {pair!r}")
    return q, r


def pair_label(q: float, r: float) -> str:
    fmt = lambda v: "inf" if math.isinf(v) else str(int(v))
    return f"{fmt(q)}:{fmt(r)}"


def fourier_frequencies(spec: GridSpec) -> tuple:
    """Frequencies ``pi k / X`` of the FFT layout, one broadcastable array per axis."""
    k = np.fft.fftfreq(spec.Nx, d=1.0 / spec.Nx)
    xi = np.pi * k / spec.X
    out = []
    for ax in range(spec.n):
        shape = [1] * spec.n
        shape[ax] = spec.Nx
        out.append(xi.reshape(shape))
    return tuple(out)


def difference_operator(spec: GridSpec, a: Optional[np.ndarray] = None,
                        V: Optional[np.ndarray] = None) -> np.ndarray:
    """Periodic matrix of ``-D^-(a D^+) + V`` on a 1-D lattice.

    ``a[j]`` is the coefficient on the edge between nodes ``j`` and ``j+1``.
    """
    N = spec.Nx
    a = np.ones(N) if a is None else np.asarray(a, dtype=float)
    up = np.roll(np.arange(N), -1)
    L = np.zeros((N, N))
    idx = np.arange(N)
    left = np.roll(a, 1)
    L[idx, idx] = (a + left) / spec.dx ** 2
    L[idx, up] -= a / spec.dx ** 2
    L[up, idx] -= a / spec.dx ** 2
    if V is not None:
        L[idx, idx] += np.asarray(V, dtype=float)
    return L


def random_coefficient(spec: GridSpec, contrast: float = 10.0, seed: int = 0,
                       correlation: float = 0.0) -> np.ndarray:
    """Log-uniform coefficient with values in ``[1, contrast]``.

    A positive ``correlation`` length smooths the log-field with a periodic
    Gaussian filter before rescaling to the full range.
    """
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 1.0, spec.Nx)
    if correlation > 0:
        xi = fourier_frequencies(spec)[0]
        u = np.fft.ifft(np.fft.fft(u - 0.5) * np.exp(-(xi * correlation) ** 2)).real
        u = (u - u.min()) / max(u.max() - u.min(), 1e-300)
    return contrast ** u


@dataclass(frozen=True, eq=False)
class SemigroupModel:
    """A nonnegative self-adjoint generator on a periodic lattice.

    Parameters
    ----------
    family : str
        ``"heat"``, ``"poisson"``, ``"divform1d"``, ``"schrodinger1d"`` or
        ``"scalar"``; a ``"+sqrt"`` suffix marks a square root.
    m : float
        Homogeneity: 2 for second-order models, 1 for Poisson and square roots.
    spec : GridSpec
        Only the spatial part is used.
    mu : ndarray
        Eigenvalues; in the Fourier layout for diagonal families, as a vector
        for matrix families.
    phi : ndarray or None
        Orthonormal eigenvectors as columns (matrix families only).
    params : dict
        Coefficient samples and their recorded bounds.
    """

    family: str
    m: float
    spec: GridSpec
    mu: np.ndarray
    phi: Optional[np.ndarray] = None
    params: dict = dc_field(default_factory=dict)

    @property
    def is_matrix(self) -> bool:
        return self.phi is not None

    @property
    def n(self) -> int:
        return self.spec.n

    def sqrt(self) -> "SemigroupModel":
        """The model for ``L**(1/2)`` (homogeneity halves)."""
        return SemigroupModel(self.family + "+sqrt", self.m / 2, self.spec, np.sqrt(self.mu),
                              self.phi, dict(self.params))

    # spectral transforms act on the trailing spatial axes and keep leading batch axes

    def to_spectral(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        if self.is_matrix:
            return v @ self.phi
        axes = tuple(range(-self.n, 0))
        return np.fft.fftn(v, axes=axes)

    def from_spectral(self, c: np.ndarray) -> np.ndarray:
        if self.is_matrix:
            return c @ self.phi.T
        axes = tuple(range(-self.n, 0))
        return np.fft.ifftn(c, axes=axes)

    def apply_function(self, fn: Callable[[np.ndarray], np.ndarray], v) -> np.ndarray:
        """``fn(L) v`` for a batch of spatial vectors ``v``."""
        v = self._check_vector(v)
        return self.from_spectral(self.to_spectral(v) * fn(self.mu))

    def _check_vector(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        shape = self.spec.spatial_shape if not self.is_matrix else (self.spec.Nx,)
        if v.shape[v.ndim - len(shape):] != shape:
            raise DomainError(f"vector of shape {v.shape} does not fit the lattice {shape}")
        return v


def heat_model(spec: GridSpec) -> SemigroupModel:
    """The Laplacian ``-Delta`` diagonalized by the Fourier basis of the torus."""
    mu = sum(x ** 2 for x in fourier_frequencies(spec))
    mu = np.broadcast_to(mu, spec.spatial_shape).copy()
    mu.setflags(write=False)
    return SemigroupModel("heat", 2.0, spec, mu)


def poisson_model(spec: GridSpec) -> SemigroupModel:
    """``(-Delta)**(1/2)``, generating the Poisson semigroup."""
    base = heat_model(spec).sqrt()
    return SemigroupModel("poisson", 1.0, spec, base.mu)


def scalar_model(spec: GridSpec, w: float) -> SemigroupModel:
    """The multiple ``L = w I`` of the identity, ``w > 0``."""
    if not (w > 0):
        raise ParameterError(f"scalar generator needs w > 0, got {w}")
    mu = np.full(spec.spatial_shape, float(w))
    mu.setflags(write=False)
    return SemigroupModel("scalar", 2.0, spec, mu, params={"w": float(w)})


def _matrix_model(family: str, spec: GridSpec, L: np.ndarray, params: dict) -> SemigroupModel:
    if spec.n != 1:
        raise DomainError(f"{family} is one-dimensional, got n={spec.n}")
    mu, phi = linalg.eigh(L)
    # roundoff can leave the zero mode slightly negative
    mu = np.where(mu < 0, 0.0, mu)
    for arr in (mu, phi):
        arr.setflags(write=False)
    return SemigroupModel(family, 2.0, spec, mu, phi, params)


def divform_model(spec: GridSpec, a: np.ndarray) -> SemigroupModel:
    """Conservative discretization of ``-(a u')'`` with edge coefficients ``a``."""
    a = np.asarray(a, dtype=float)
    if a.shape != (spec.Nx,):
        raise DomainError(f"need {spec.Nx} coefficient samples, got shape {a.shape}")
    if not np.all(a > 0):
        raise ParameterError("coefficient must be positive")
    params = {"a": a.tolist(), "lower": float(a.min()), "upper": float(a.max())}
    return _matrix_model("divform1d", spec, difference_operator(spec, a=a), params)


def schrodinger_model(spec: GridSpec, V: np.ndarray) -> SemigroupModel:
    """``-u'' + V u`` with nonnegative potential samples ``V``."""
    V = np.asarray(V, dtype=float)
    if V.shape != (spec.Nx,):
        raise DomainError(f"need {spec.Nx} potential samples, got shape {V.shape}")
    if np.any(V < 0):
        raise ParameterError("potential must be nonnegative")
    params = {"V": V.tolist(), "upper": float(V.max())}
    return _matrix_model("schrodinger1d", spec, difference_operator(spec, V=V), params)


def make_model(family: str, spec: GridSpec, sqrt: bool = False, **kw) -> SemigroupModel:
    """Build a model by name (``heat``, ``poisson``, ``divform1d``, ``schrodinger1d``, ``scalar``)."""
    builders = {
        "heat": lambda: heat_model(spec),
        "poisson": lambda: poisson_model(spec),
        "divform1d": lambda: divform_model(spec, kw["a"]),
        "schrodinger1d": lambda: schrodinger_model(spec, kw["V"]),
        "scalar": lambda: scalar_model(spec, kw.get("w", 1.0)),
    }
    if family not in builders:
        raise ParameterError(f"unknown model family {family!r}")
    model = builders[family]()
    return model.sqrt() if sqrt else model


def _check_t(t: float) -> None:
    if not (t > 0 and math.isfinite(t)):
        raise ParameterError(f"time must be positive and finite, got {t}")


def semigroup_symbol(t: float) -> Callable:
    return lambda mu: np.exp(-t * mu)


def fractional_symbol(alpha: complex, t: float) -> Callable:
    """``(t mu)**alpha e**(-t mu)`` with principal powers and value 0 at ``mu = 0``."""
    alpha = complex(alpha)

    def fn(mu):
        x = t * np.asarray(mu, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        pos = x > 0
        out[pos] = np.exp(alpha * np.log(x[pos]) - x[pos])
        return out
    return fn


def apply_semigroup(S: SemigroupModel, t: float, v) -> np.ndarray:
    """``e^{-tL} v``."""
    _check_t(t)
    return S.apply_function(semigroup_symbol(t), v)


def apply_tL_exp(S: SemigroupModel, t: float, v) -> np.ndarray:
    """``tL e^{-tL} v``."""
    _check_t(t)
    return S.apply_function(lambda mu: t * mu * np.exp(-t * mu), v)


def apply_fractional(S: SemigroupModel, alpha: complex, t: float, v) -> np.ndarray:
    """``(tL)**alpha e^{-tL} v`` for ``Re alpha > 0``."""
    _check_t(t)
    if not complex(alpha).real > 0:
        raise ParameterError(f"need Re alpha > 0, got {alpha}")
    if S.mu is None:
        raise UnsupportedOperationError(f"{S.family} has no spectral data")
    return S.apply_function(fractional_symbol(alpha, t), v)


def resolvent_symbol(S: SemigroupModel, z: complex, power: int = 1) -> Callable:
    if power not in (1, 2):
        raise ParameterError(f"resolvent power must be 1 or 2, got {power}")
    z = complex(z)
    denom = 1.0 - z * np.asarray(S.mu, dtype=float) ** power
    margin = float(np.min(np.abs(denom)))
    if margin < RESOLVENT_MARGIN:
        raise NearSingularityError(
            f"1 - z mu^{power} comes within {margin:.3e} of 0 for z={z}")
    return lambda mu: 1.0 / (1.0 - z * np.asarray(mu, dtype=float) ** power)


def apply_resolvent(S: SemigroupModel, z: complex, v, power: int = 1) -> np.ndarray:
    """``(1 - z L**power)**-1 v``; ``power`` is 1 or 2."""
    return S.apply_function(resolvent_symbol(S, z, power), v)


def _dense_cap(spec: GridSpec) -> int:
    return DENSE_CAP_1D if spec.n == 1 else DENSE_CAP_ND


def dense_matrix(S: SemigroupModel, fn: Callable, rows=None, cols=None) -> np.ndarray:
    """Matrix of ``fn(L)`` acting on lattice samples, optionally restricted.

    ``rows`` and ``cols`` are boolean masks over the lattice (flattened in C
    order).  Entry ``[i, j]`` maps sample ``j`` to sample ``i``.
    """
    spec = S.spec
    N = spec.Nx ** spec.n
    if N > _dense_cap(spec):
        raise ResourceError(f"dense matrix with {N} rows exceeds the cap {_dense_cap(spec)}")
    rows = np.ones(N, bool) if rows is None else np.asarray(rows, bool).ravel()
    cols = np.ones(N, bool) if cols is None else np.asarray(cols, bool).ravel()
    if S.is_matrix:
        vals = fn(S.mu)
        return (S.phi[rows] * vals) @ S.phi[cols].T
    idx = np.flatnonzero(cols)
    basis = np.zeros((idx.size, N), dtype=complex)
    basis[np.arange(idx.size), idx] = 1.0
    out = S.apply_function(fn, basis.reshape((idx.size,) + spec.spatial_shape))
    return out.reshape(idx.size, N)[:, rows].T


def opnorm_qr(K: np.ndarray, pair="2:2", h: float = 1.0) -> float:
    """Exact ``L^q -> L^r`` norm of a lattice operator for the three admitted pairs.

    Parameters
    ----------
    K : ndarray
        Matrix acting on samples; discrete ``L^q`` norms carry the cell volume.
    pair : str or tuple
        ``"2:2"``, ``"1:2"`` or ``"2:inf"``.
    h : float
        Cell volume.
    """
    q, r = parse_pair(pair)
    K = np.atleast_2d(np.asarray(K))
    if K.size == 0:
        return 0.0
    if q == 2 and r == 2:
        return float(linalg.svdvals(K)[0])
    absq = np.abs(K) ** 2
    if q == 1:
        return float(np.sqrt(h * absq.sum(axis=0).max()) / h)
    return float(np.sqrt(absq.sum(axis=1).max() / h))


@dataclass(frozen=True)
class DecayEstimate:
    """Fitted off-diagonal order and its diagnostics."""

    q: float
    r: float
    m: float
    fittedM: float
    intercept: float
    fitRange: list
    residual: float
    model: str
    threshold: float = ASYMPTOTIC_THRESHOLD
    x_max: float = math.inf
    samples: list = dc_field(default_factory=list)

    def to_dict(self) -> dict:
        enc = lambda v: "inf" if isinstance(v, float) and math.isinf(v) else v
        return {"q": enc(self.q), "r": enc(self.r), "m": self.m, "fittedM": self.fittedM,
                "intercept": self.intercept, "fitRange": [list(p) for p in self.fitRange],
                "residual": self.residual, "model": self.model, "threshold": self.threshold,
                "x_max": enc(self.x_max),
                "samples": [list(s) for s in self.samples]}


def annulus_masks(spec: GridSpec, radius: float, d: float) -> tuple:
    """``E = B(0, radius)`` and ``F = {radius + d <= |y| < radius + 2d}``."""
    dist = periodic_distance(spec, [0.0] * spec.n)
    E = dist < radius
    F = (dist >= radius + d) & (dist < radius + 2 * d)
    return E, F


def _fit_decay(xs, norms, floor):
    xs = np.asarray(xs, float)
    norms = np.asarray(norms, float)
    keep = norms > floor
    if keep.sum() < 4:
        raise FitUnderdeterminedError(
            f"only {int(keep.sum())} points in the asymptotic regime above the noise floor")
    X = np.column_stack([np.ones(keep.sum()), -np.log1p(xs[keep])])
    y = np.log(norms[keep])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = float(np.max(np.abs(X @ coef - y)))
    return float(coef[0]), float(coef[1]), resid, keep


def _measure(S, fn_of, q, r, pairs, radius, hom, scale_of, x_of, x_min, x_max, tag, noise):
    spec = S.spec
    if x_min < ASYMPTOTIC_THRESHOLD:
        raise ParameterError(f"fit window must start at d^m/t >= {ASYMPTOTIC_THRESHOLD}")
    reach = max(d for _, d in pairs) + radius
    if reach > spec.X / 2 * (1 + 1e-12):
        raise DomainError(f"max d + ballRadius = {reach} exceeds X/2 = {spec.X / 2}")
    samples = []
    for s, d in pairs:
        E, F = annulus_masks(spec, radius, d)
        if not E.any() or not F.any():
            raise DomainError(f"empty set E or F at d={d}, radius={radius}")
        K = dense_matrix(S, fn_of(s), rows=F, cols=E)
        value = opnorm_qr(K, (q, r), spec.h) * scale_of(s)
        samples.append((float(s), float(d), float(x_of(s, d)), value))
    xs = np.array([x for _, _, x, _ in samples])
    vals = np.array([v for *_, v in samples])
    sel = (xs >= x_min) & (xs <= x_max)
    peak = max(vals.max(), 1e-300)
    c, M, resid, keep = _fit_decay(xs[sel], vals[sel], noise * peak)
    used = [(samples[i][0], samples[i][1]) for i, k in zip(np.flatnonzero(sel), keep) if k]
    return DecayEstimate(q, r, hom, M, c, used, resid, tag, x_min, x_max, samples)


def measure_offdiag(S: SemigroupModel, pair, t_ladder: Sequence[float],
                    d_ladder: Sequence[float], ball_radius: float, alpha: complex = 1.0,
                    x_min: float = ASYMPTOTIC_THRESHOLD, x_max: float = math.inf,
                    noise: float = 1e-11) -> DecayEstimate:
    """Fit the off-diagonal order of ``(tL)**alpha e^{-tL}`` (``tL e^{-tL}`` by default).

    For every ``(t, d)`` the normalized quantity
    ``||1_F T_t 1_E||_{q->r} * t**((n/m)(1/q - 1/r))`` is fitted to
    ``c (1 + d**m / t)**-M`` by least squares in log-log form, using only points
    with ``x_min <= d**m/t <= x_max`` (``x_min >= 4``) whose value exceeds
    ``noise`` times the largest sampled value.

    Parameters
    ----------
    S : SemigroupModel
    pair : str
        ``"2:2"``, ``"1:2"`` or ``"2:inf"``.
    t_ladder, d_ladder : sequence of float
        Times and separations; every combination is sampled.
    ball_radius : float
        Radius of ``E = B(0, ball_radius)``.
    alpha : complex
        Power of ``tL``; ``alpha = 1`` gives ``tL e^{-tL}``.

    Raises
    ------
    FitUnderdeterminedError
        Fewer than four usable points.
    """
    q, r = parse_pair(pair)
    for t in t_ladder:
        _check_t(t)
    alpha = complex(alpha)
    if alpha == 1:
        fn_of = lambda t: (lambda mu: t * mu * np.exp(-t * mu))
    else:
        if not alpha.real > 0:
            raise ParameterError(f"need Re alpha > 0, got {alpha}")
        fn_of = lambda t: fractional_symbol(alpha, t)
    exp = (S.n / S.m) * (_inv(q) - _inv(r))
    pairs = [(t, d) for t in t_ladder for d in d_ladder]
    return _measure(S, fn_of, q, r, pairs, ball_radius, S.m,
                    lambda t: t ** exp, lambda t, d: d ** S.m / t,
                    x_min, x_max, S.family, noise)


def measure_resolvent_offdiag(S: SemigroupModel, pair, theta: float, t_ladder: Sequence[float],
                              d_ladder: Sequence[float], ball_radius: float, power: int = 2,
                              x_min: float = ASYMPTOTIC_THRESHOLD, x_max: float = math.inf,
                              noise: float = 1e-11) -> DecayEstimate:
    """Fit the decay order ``K`` of ``(1 - z L**power)**-1`` along ``z = e^{i theta} t``.

    The normalization is ``|z|**((n/(power m))(1/q - 1/r))`` and the decay
    variable ``d**(power m) / |z|``.
    """
    q, r = parse_pair(pair)
    for t in t_ladder:
        _check_t(t)
    rot = complex(math.cos(theta), math.sin(theta))
    hom = power * S.m
    exp = (S.n / hom) * (_inv(q) - _inv(r))
    fn_of = lambda t: resolvent_symbol(S, rot * t, power)
    pairs = [(t, d) for t in t_ladder for d in d_ladder]
    return _measure(S, fn_of, q, r, pairs, ball_radius, hom,
                    lambda t: t ** exp, lambda t, d: d ** hom / t,
                    x_min, x_max, f"{S.family}-resolvent", noise)
