"""Operator-valued singular integrals on the half-line.

A :class:`KernelOp` pairs a semigroup model with a kernel ``K(t, s)``.  The
forward maximal-regularity kernel is ``L e^{-(t-s)L}`` on ``s < t``, the backward
one ``L e^{-(s-t)L}`` on ``s > t``, and the ``alpha`` variant is
``|t-s|**(alpha-1) L**alpha e^{-|t-s|L}``.

Quadrature, per output time ``t``:

* tail, ``int_0^{t/2}`` (forward) or ``int_{2t}^inf`` (backward): ``f`` is taken
  piecewise constant on the log-midpoint cells of the grid, the kernel is
  evaluated at the geometric centre of each cell's overlap with the range, and
  the weight is the matching fraction of the cell weight ``w_j``;
* singular, ``int_{t/2}^t`` (forward) or ``int_t^{2t}`` (backward): substitute
  ``u = |t - s|`` on a geometric sub-grid of 32 cells from ``u = t * 2**-20`` to
  ``t/2`` (forward) or ``t`` (backward).  Cells wider than the time grid's own
  resolution in ``s`` are split geometrically.  ``u**(alpha-1)`` is integrated
  exactly on each cell and ``f`` is interpolated linearly in ``log s``.

In both parts ``e^{-u mu}`` is replaced by its exact mean over the cell, so for
``alpha = 1`` the kernel is integrated exactly against the frozen ``f``.
Spectral models reduce everything to scalar kernels ``k(u, mu)`` per mode.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, ParameterError, TruncationWarning
from .grid import Field, GridSpec, make_grid, time_weights
from .kernels import SemigroupModel, dense_matrix, opnorm_qr
from .tent import TentParams, tent_norm

SUBGRID_CELLS = 32
SUBGRID_CUTOFF = 2.0 ** -20

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True, eq=False)
class KernelOp:
    """An operator-valued kernel on the half-line.

    Parameters
    ----------
    model : SemigroupModel
    orientation : {"forward", "backward"}
    kind : {"maxreg", "maxreg_alpha", "custom"}
    alpha : complex
        Exponent of the ``maxreg_alpha`` kind, ``Re alpha > 0``.
    callback : callable, optional
        For ``custom``: ``callback(t, s, v)`` returns ``K(t, s) v`` for a spatial
        vector ``v``.
    size_constant : float, optional
        Recorded estimate of ``C`` in ``||K(t,s)|| <= C |t-s|**-1``.
    """

    model: SemigroupModel
    orientation: str = FORWARD
    kind: str = "maxreg"
    alpha: complex = 1.0
    callback: Optional[Callable] = None
    size_constant: Optional[float] = None

    def __post_init__(self):
        if self.orientation not in (FORWARD, BACKWARD):
            raise ParameterError(f"orientation must be forward or backward, got {self.orientation!r}")
        if self.kind not in ("maxreg", "maxreg_alpha", "custom"):
            raise ParameterError(f"unknown kernel kind {self.kind!r}")
        object.__setattr__(self, "alpha", complex(1.0 if self.kind == "maxreg" else self.alpha))
        if not self.alpha.real > 0:
            raise ParameterError(f"need Re alpha > 0, got {self.alpha}")
        if self.kind == "custom" and self.callback is None:
            raise ParameterError("custom kernels need a callback")

    def amplitude(self, mu) -> np.ndarray:
        """``mu**alpha`` with principal powers, zero at ``mu = 0``."""
        mu = np.asarray(mu, dtype=float)
        if self.alpha == 1:
            return mu
        out = np.zeros(mu.shape, dtype=complex)
        pos = mu > 0
        out[pos] = np.exp(self.alpha * np.log(mu[pos]))
        return out

    def kernel(self, u, mu) -> np.ndarray:
        """Scalar kernel ``u**(alpha-1) mu**alpha e^{-u mu}`` on a spectral mode."""
        u = np.asarray(u, dtype=float)
        mu = np.asarray(mu, dtype=float)
        return u ** (self.alpha - 1) * self.amplitude(mu) * np.exp(-u * mu)

    def cell_kernel(self, ua, ub, uc, mu, frozen: bool) -> np.ndarray:
        """Kernel on the cell ``[ua, ub]`` with ``e^{-u mu}`` averaged exactly.

        The power ``uc**(alpha-1)`` at the centre is included unless ``frozen``
        says the quadrature weight already carries it.
        """
        mu = np.asarray(mu, dtype=float)
        x = mu * (ub - ua)
        small = x < 1e-12
        mean = np.exp(-mu * ua) * np.where(small, 1.0, -np.expm1(-x) / np.where(small, 1.0, x))
        val = self.amplitude(mu) * mean
        if not frozen:
            val = val * np.asarray(uc, dtype=float) ** (self.alpha - 1)
        return val


def maxreg(model: SemigroupModel, orientation: str = FORWARD) -> KernelOp:
    return KernelOp(model, orientation, "maxreg")


def maxreg_alpha(model: SemigroupModel, alpha: complex, orientation: str = FORWARD) -> KernelOp:
    return KernelOp(model, orientation, "maxreg_alpha", alpha)


def custom(model: SemigroupModel, callback: Callable, orientation: str = FORWARD) -> KernelOp:
    return KernelOp(model, orientation, "custom", 1.0, callback)


@dataclass
class _Nodes:
    """Quadrature for one output time: ``sum_k weight_k K(u_k) f(s_k)``.

    ``f(s_k) = c0_k f[j0_k] + c1_k f[j1_k]``; node ``k`` covers ``[ua_k, ub_k]``
    in ``u``.  ``frozen`` marks nodes whose weight already contains the
    ``u**(alpha-1)`` factor.
    """

    u: np.ndarray
    ua: np.ndarray
    ub: np.ndarray
    s: np.ndarray
    weight: np.ndarray
    j0: np.ndarray
    j1: np.ndarray
    c0: np.ndarray
    c1: np.ndarray
    frozen: bool

    def restrict(self, keep: np.ndarray) -> "_Nodes":
        return _Nodes(self.u[keep], self.ua[keep], self.ub[keep], self.s[keep],
                      self.weight[keep], self.j0[keep],
                      self.j1[keep], self.c0[keep], self.c1[keep], self.frozen)


def _interp(spec: GridSpec, s: np.ndarray):
    """Log-linear interpolation weights; constant on the end half-cells, zero outside."""
    p = (np.log(s) - math.log(spec.t_min)) / spec.log_ratio
    last = spec.Nt - 1
    j0 = np.clip(np.floor(p), 0, last).astype(int)
    j1 = np.minimum(j0 + 1, last)
    frac = np.clip(p - j0, 0.0, 1.0)
    c0, c1 = 1.0 - frac, frac
    c0 = np.where(j1 == j0, 1.0, c0)
    c1 = np.where(j1 == j0, 0.0, c1)
    outside = (p < -0.5) | (p > last + 0.5)
    c0 = np.where(outside, 0.0, c0)
    c1 = np.where(outside, 0.0, c1)
    return j0, j1, c0, c1


def _tail_nodes(spec: GridSpec, t: float, orientation: str) -> _Nodes:
    edges = spec.time_edges()
    w = spec.time_weights()
    if orientation == FORWARD:
        a = edges[:-1]
        b = np.minimum(edges[1:], t / 2)
    else:
        a = np.maximum(edges[:-1], 2 * t)
        b = edges[1:]
    j = np.flatnonzero(b > a)
    a, b = a[j], b[j]
    s = np.sqrt(a * b)
    weight = w[j] * np.log(b / a) / spec.log_ratio
    u = np.abs(t - s)
    ua, ub = np.sort(np.abs(t - np.stack([a, b])), axis=0)
    ones, zeros = np.ones(j.size), np.zeros(j.size)
    return _Nodes(u, ua, ub, s, weight, j, j, ones, zeros, False)


def _singular_edges(spec: GridSpec, t: float, orientation: str) -> np.ndarray:
    top = t / 2 if orientation == FORWARD else t
    lo = t * SUBGRID_CUTOFF
    base = lo * (top / lo) ** (np.arange(SUBGRID_CELLS + 1) / SUBGRID_CELLS)
    edges = [base[:1]]
    for a, b in zip(base[:-1], base[1:]):
        # keep each piece no wider than the grid spacing at the nearest s
        s_near = t - b if orientation == FORWARD else t + a
        pieces = max(1, math.ceil((b - a) / (s_near * spec.log_ratio)))
        edges.append(a * (b / a) ** (np.arange(1, pieces + 1) / pieces))
    return np.concatenate(edges)


def _singular_nodes(spec: GridSpec, t: float, orientation: str, alpha: complex) -> _Nodes:
    ue = _singular_edges(spec, t, orientation)
    ua, ub = ue[:-1], ue[1:]
    u = np.sqrt(ua * ub)
    if alpha == 1:
        weight = ub - ua
    else:
        weight = (ub ** alpha - ua ** alpha) / alpha
    s = t - u if orientation == FORWARD else t + u
    j0, j1, c0, c1 = _interp(spec, s)
    return _Nodes(u, ua, ub, s, weight, j0, j1, c0, c1, True)


def _check_field(T: KernelOp, f: Field) -> None:
    ms, fs = T.model.spec, f.spec
    if (ms.n, ms.X, ms.Nx) != (fs.n, fs.X, fs.Nx):
        raise DomainError("field and model live on different spatial lattices")


def _active_times(coeffs: np.ndarray) -> np.ndarray:
    return coeffs.reshape(coeffs.shape[0], -1).any(axis=1)


def _accumulate(T: KernelOp, nodes: _Nodes, coeffs: np.ndarray, active: np.ndarray,
                factor: Optional[np.ndarray] = None) -> Optional[np.ndarray]:
    """``sum_k weight_k k(u_k, mu) f(s_k, mu)`` on every spectral mode."""
    live = ((nodes.c0 != 0) & active[nodes.j0]) | ((nodes.c1 != 0) & active[nodes.j1])
    if not live.any():
        return None
    nd = nodes.restrict(live)
    mu = T.model.mu
    ext = (slice(None),) + (None,) * mu.ndim
    F = nd.c0[ext] * coeffs[nd.j0] + nd.c1[ext] * coeffs[nd.j1]
    weight = nd.weight.astype(complex)
    if factor is not None:
        weight = weight * factor[live]
    kern = T.cell_kernel(nd.ua[ext], nd.ub[ext], nd.u[ext], mu[None], nd.frozen)
    return np.einsum("k,k...->...", weight, kern * F)


def _assemble(T: KernelOp, f: Field, parts: Sequence[str], tail_factor=None) -> Field:
    _check_field(T, f)
    spec = f.spec
    t = make_grid(spec).t
    out_shape = (spec.Nt,) + spec.spatial_shape
    if T.kind == "custom":
        return Field(spec, _assemble_custom(T, f, parts, tail_factor))
    coeffs = T.model.to_spectral(f.values)
    active = _active_times(coeffs)
    out = np.zeros(coeffs.shape, dtype=complex)
    for i, ti in enumerate(t):
        for part in parts:
            if part == "tail":
                nodes = _tail_nodes(spec, ti, T.orientation)
                factor = None if tail_factor is None else tail_factor(ti, nodes.s)
            else:
                nodes = _singular_nodes(spec, ti, T.orientation, T.alpha)
                factor = None
            if nodes.u.size == 0:
                continue
            acc = _accumulate(T, nodes, coeffs, active, factor)
            if acc is not None:
                out[i] += acc
    values = T.model.from_spectral(out).reshape(out_shape)
    return Field(spec, values)


def _assemble_custom(T: KernelOp, f: Field, parts, tail_factor) -> np.ndarray:
    spec = f.spec
    t = make_grid(spec).t
    vals = f.values
    out = np.zeros(spec.shape, dtype=complex)
    for i, ti in enumerate(t):
        for part in parts:
            if part == "tail":
                nodes = _tail_nodes(spec, ti, T.orientation)
                factor = None if tail_factor is None else tail_factor(ti, nodes.s)
            else:
                nodes = _singular_nodes(spec, ti, T.orientation, 1.0)
                factor = None
            for k in range(nodes.u.size):
                v = nodes.c0[k] * vals[nodes.j0[k]] + nodes.c1[k] * vals[nodes.j1[k]]
                if not np.any(v):
                    continue
                wk = nodes.weight[k] * (1.0 if factor is None else factor[k])
                out[i] += wk * np.asarray(T.callback(ti, nodes.s[k], v))
    return out


def _parts(part: str) -> tuple:
    if part == "whole":
        return ("singular", "tail")
    if part in ("singular", "tail"):
        return (part,)
    raise ParameterError(f"part must be whole, singular or tail, got {part!r}")


def _warn_truncation(f: Field) -> None:
    if np.any(f.values[-1]):
        warnings.warn("backward integral truncated at t_max while the input is nonzero there",
                      TruncationWarning, stacklevel=3)


def apply(T: KernelOp, f: Field, part: str = "whole") -> Field:
    """Apply the kernel operator, or its singular or tail part.

    ``whole`` is computed as ``singular + tail`` with shared quadrature.
    """
    if T.orientation == BACKWARD:
        _warn_truncation(f)
    parts = _parts(part)
    if part == "whole":
        sing = _assemble(T, f, ("singular",))
        tail = _assemble(T, f, ("tail",))
        return Field(f.spec, sing.values + tail.values)
    return _assemble(T, f, parts)


def apply_backward(T: KernelOp, f: Field, part: str = "whole") -> Field:
    """Backward operator ``int_t^inf K(t, s) f(s) ds``, truncated at the top edge of the grid."""
    if T.orientation != BACKWARD:
        T = KernelOp(T.model, BACKWARD, T.kind, T.alpha, T.callback, T.size_constant)
    return apply(T, f, part)


def j_alpha_factor(alpha: complex) -> Callable:
    alpha = complex(alpha)
    return lambda t, s: (s / t) ** alpha


def apply_J_alpha(T: KernelOp, alpha: complex, f: Field, beta: float) -> Field:
    """The analytic family ``J_alpha f(t) = int_0^{t/2} (s/t)**alpha K(t, s) f(s) ds``.

    Raises
    ------
    ParameterError
        If ``Re alpha <= (beta - 1)/2``, where the weighted bound fails.
    """
    if T.orientation != FORWARD:
        raise ParameterError("J_alpha is defined for forward kernels")
    alpha = complex(alpha)
    if not alpha.real > (beta - 1) / 2:
        raise ParameterError(f"need Re alpha > (beta-1)/2 = {(beta - 1) / 2}, got {alpha}")
    if alpha == 0:
        return _assemble(T, f, ("tail",))
    return _assemble(T, f, ("tail",), tail_factor=j_alpha_factor(alpha))


def apply_M_alpha(alpha: complex, model: SemigroupModel, f: Field, part: str = "whole") -> Field:
    """``M_alpha f(t) = int_0^t (t-s)**(alpha-1) L**alpha e^{-(t-s)L} f(s) ds``."""
    alpha = complex(alpha)
    if not alpha.real > 0:
        raise ParameterError(f"need Re alpha > 0, got {alpha}")
    return apply(maxreg_alpha(model, alpha), f, part)


def time_matrix(T: KernelOp, mu: float, spec: GridSpec, part: str = "whole",
                tail_factor: Optional[Callable] = None) -> np.ndarray:
    """The ``Nt x Nt`` matrix of the operator on one spectral mode ``mu``.

    ``tail_factor(t, s)`` multiplies the tail weights, as in :func:`apply_J_alpha`.
    """
    t = make_grid(spec).t
    W = np.zeros((spec.Nt, spec.Nt), dtype=complex)
    for i, ti in enumerate(t):
        for p in _parts(part):
            nodes = (_tail_nodes(spec, ti, T.orientation) if p == "tail"
                     else _singular_nodes(spec, ti, T.orientation, T.alpha))
            k = T.cell_kernel(nodes.ua, nodes.ub, nodes.u, mu, nodes.frozen)
            wk = nodes.weight * k
            if p == "tail" and tail_factor is not None:
                wk = wk * tail_factor(ti, nodes.s)
            np.add.at(W[i], nodes.j0, wk * nodes.c0)
            np.add.at(W[i], nodes.j1, wk * nodes.c1)
    return W


def weighted_operator_norm(W: np.ndarray, spec: GridSpec, beta: float = 0.0) -> float:
    """Exact norm of a time matrix on ``L^2(t**beta dt)`` with the grid weights."""
    d = np.sqrt(time_weights(spec, beta))
    return float(np.linalg.norm(d[:, None] * W / d[None, :], 2))


def check_size_bound(T: KernelOp, sample_pairs: Sequence[tuple]) -> float:
    """Estimate ``C = max |t - s| * ||K(t, s)||_{2->2}`` over the given pairs."""
    best = 0.0
    for t, s in sample_pairs:
        if (T.orientation == FORWARD and not s < t) or (T.orientation == BACKWARD and not t < s):
            raise DomainError(f"pair (t={t}, s={s}) outside the {T.orientation} kernel's domain")
        u = abs(t - s)
        if T.kind == "custom":
            N = T.model.spec.Nx ** T.model.spec.n
            eye = np.eye(N, dtype=complex).reshape((N,) + T.model.spec.spatial_shape)
            K = np.stack([np.asarray(T.callback(t, s, e)).ravel() for e in eye], axis=1)
        else:
            K = dense_matrix(T.model, lambda mu: T.kernel(u, mu))
        best = max(best, u * opnorm_qr(K))
    return best


def hardy_operator(spec: GridSpec) -> np.ndarray:
    """Matrix of ``f -> (1/t) int_0^{t/2} f(s) ds`` with ``f`` piecewise constant in time."""
    t = make_grid(spec).t
    H = np.zeros((spec.Nt, spec.Nt))
    for i, ti in enumerate(t):
        nodes = _tail_nodes(spec, ti, FORWARD)
        H[i, nodes.j0] = nodes.weight / ti
    return H


def hardy_profiles(beta: float, spec: GridSpec, levels=(0.5, 0.9, 1.0)) -> list:
    """Profiles ``s**-gamma 1_{(0,1]}`` with ``gamma = c (beta+1)/2``; ``c = 1`` is critical."""
    t = make_grid(spec).t
    return [np.where(t <= 1.0, t ** (-c * (beta + 1) / 2), 0.0) for c in levels]


def hardy_check(beta: float, samples: Sequence, spec: GridSpec) -> float:
    """Largest discrete Hardy ratio over ``samples``.

    The ratio is
    ``int ((1/t) int_0^{t/2} |f|)**2 t**beta dt / int |f|**2 t**beta dt``.

    Parameters
    ----------
    beta : float
        Weight exponent, ``beta < 1``.
    samples : sequence
        Arrays of length ``Nt`` or callables of ``t``.
    spec : GridSpec
        Only the time grid is used.
    """
    if not beta < 1:
        raise ParameterError(f"Hardy inequality needs beta < 1, got {beta}")
    tw = time_weights(spec, beta)
    t = make_grid(spec).t
    H = hardy_operator(spec)
    best = 0.0
    for f in samples:
        f = np.abs(np.asarray(f(t) if callable(f) else f, dtype=complex))
        if f.shape != (spec.Nt,):
            raise DomainError(f"profile has shape {f.shape}, expected ({spec.Nt},)")
        den = float(np.dot(tw, f ** 2))
        if den == 0:
            continue
        best = max(best, float(np.dot(tw, (H @ f) ** 2)) / den)
    return best


def hardy_constant(beta: float) -> float:
    """Sharp continuum constant ``(2**((beta+1)/2) / (1 - beta))**2`` of the squared ratio."""
    if not beta < 1:
        raise ParameterError(f"Hardy inequality needs beta < 1, got {beta}")
    return (2 ** ((beta + 1) / 2) / (1 - beta)) ** 2


@dataclass(frozen=True)
class TentRatio:
    max_ratio: float
    ratios: list = dc_field(default_factory=list)


def tent_ratio(T: KernelOp, params: TentParams, inputs: Sequence[Field]) -> TentRatio:
    """``max tent_norm(T f) / tent_norm(f)`` over ``inputs`` (zero inputs are skipped)."""
    ratios = []
    for f in inputs:
        base = tent_norm(f, params)
        if base == 0:
            continue
        out = apply_backward(T, f) if T.orientation == BACKWARD else apply(T, f)
        ratios.append(tent_norm(out, params) / base)
    return TentRatio(max(ratios, default=0.0), ratios)
