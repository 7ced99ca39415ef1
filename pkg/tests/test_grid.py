import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tentsio.errors import ConfigurationError, DomainError, NumericRangeError, SamplingError
from tentsio.grid import (Field, GridSpec, Support, load_field, make_grid, sample, save_field,
                          time_weights, weighted_l2_norm, zeros)


def test_degenerate_range_rejected():
    with pytest.raises(ConfigurationError):
        GridSpec(1, 1.0, 8, 1.0, 1.0, 8)


@pytest.mark.parametrize("kwargs", [
    dict(n=1, X=1.0, Nx=12, t_min=0.1, t_max=1.0, Nt=8),
    dict(n=1, X=1.0, Nx=8, t_min=0.0, t_max=1.0, Nt=8),
    dict(n=1, X=1.0, Nx=8, t_min=0.1, t_max=1.0, Nt=4),
    dict(n=4, X=1.0, Nx=8, t_min=0.1, t_max=1.0, Nt=8),
    dict(n=1, X=-1.0, Nx=8, t_min=0.1, t_max=1.0, Nt=8),
])
def test_invalid_specs(kwargs):
    with pytest.raises(ConfigurationError):
        GridSpec(**kwargs)


def test_geometric_nodes():
    spec = GridSpec(1, math.pi, 16, 1e-3, 1.0, 64)
    g = make_grid(spec)
    assert g.t.shape == (64,)
    assert spec.ratio == pytest.approx(1000 ** (1 / 63), rel=1e-14)
    np.testing.assert_allclose(g.t[1:] / g.t[:-1], spec.ratio, rtol=1e-12)
    assert g.t[0] == pytest.approx(1e-3, rel=1e-14) and g.t[-1] == pytest.approx(1.0, rel=1e-13)
    np.testing.assert_allclose(g.w, g.t * math.log(spec.ratio), rtol=1e-14)
    assert g.h == pytest.approx(2 * math.pi / 16)


def test_total_mass_within_one_percent():
    # log-midpoint cells overhang the node range by half a cell at each end;
    # the defect is about log(rho)/2 relative, so the range is kept moderate
    spec = GridSpec(1, 1.5, 16, 1e-2, 1.0, 256)
    exact = (spec.t_max - spec.t_min) * 2 * spec.X
    assert abs(make_grid(spec).mass() / exact - 1) < 0.01


def test_sample_zero_and_indicator():
    spec = GridSpec(1, 2.0, 16, 1e-2, 2.0, 16)
    z = sample(lambda t, y: 0 * t * y, spec)
    assert not np.any(z.values)
    sup = Support(1.0, (0.0,), 1.0)
    ind = sample(lambda t, y: ((t <= 1) & (np.abs(y) <= 1)).astype(float), spec, support=sup)
    assert ind.support == sup
    np.testing.assert_array_equal(ind.values.real, sup.mask(spec))


def test_support_violation_rejected():
    spec = GridSpec(1, 2.0, 16, 1e-2, 2.0, 16)
    with pytest.raises(DomainError):
        sample(lambda t, y: 1 + 0 * t * y, spec, support=Support(1.0, (0.0,), 1.0))


def test_heat_kernel_normalization():
    t0 = 0.01
    spec = GridSpec(1, 10 * math.sqrt(t0) * 1.6, 256, t0, 1.0, 8)
    f = sample(lambda t, y: np.exp(-y ** 2 / (4 * t)) / np.sqrt(4 * np.pi * t), spec)
    mass = f.values[0].real.sum() * spec.h
    assert abs(mass - 1) < 1e-6


def test_sampling_error_names_node():
    spec = GridSpec(1, 1.0, 8, 0.1, 1.0, 8)
    with pytest.raises(SamplingError, match=r"node \(0, 4\)"), np.errstate(divide="ignore"):
        sample(lambda t, y: 1 / y + 0 * t, spec)


def test_time_weight_overflow():
    spec = GridSpec(1, 1.0, 8, 1e-300, 1.0, 8)
    with pytest.raises(NumericRangeError):
        time_weights(spec, 5.0)


def _bump_x(y):
    return np.where(np.abs(y) < 1, (1 - y ** 2) ** 2, 0.0)


def test_quadrature_order_space():
    # int (1-y^2)^2 over (-1, 1) = 16/15
    errs = []
    for Nx in (8, 16, 32):
        spec = GridSpec(1, 1.5, Nx, 0.1, 1.0, 8)
        f = sample(lambda t, y: _bump_x(y) + 0 * t, spec)
        errs.append(abs(f.values[0].real.sum() * spec.h - 16 / 15))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 2)


def test_quadrature_order_time():
    # hat in log t on (e^-1, e), integrated against t^beta dt, beta = 0.5
    beta = 0.5
    hat = lambda t: np.maximum(0.0, 1 - np.abs(np.log(t)))
    s = beta + 1
    exact = (math.exp(s) + math.exp(-s) - 2) / s ** 2
    errs = []
    for Nt in (16, 32, 64):
        spec = GridSpec(1, 1.0, 8, math.exp(-1.3), math.exp(1.7), Nt)
        g = make_grid(spec)
        errs.append(abs(np.dot(hat(g.t), time_weights(spec, beta)) - exact))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(-40, 40), st.integers(0, 2**31 - 1))
def test_translate_roundtrip(shift, seed):
    spec = GridSpec(1, 1.0, 16, 0.1, 1.0, 8)
    rng = np.random.default_rng(seed)
    f = Field(spec, rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape))
    back = f.translate([shift]).translate([-shift])
    np.testing.assert_array_equal(back.values, f.values)


def test_translate_wraps_2d():
    spec = GridSpec(2, 1.0, 8, 0.1, 1.0, 8)
    v = np.zeros(spec.shape)
    v[0, 7, 0] = 1
    out = Field(spec, v).translate([1, -1])
    assert out.values[0, 0, 7] == 1


def test_field_immutable(small_spec):
    f = zeros(small_spec)
    with pytest.raises(ValueError):
        f.values[0, 0] = 1


def test_save_load_roundtrip(tmp_path, rng, small_spec):
    vals = rng.standard_normal(small_spec.shape) + 1j * rng.standard_normal(small_spec.shape)
    mask = Support(0.5, (0.25,), 0.7).mask(small_spec)
    f = Field(small_spec, np.where(mask, vals, 0), Support(0.5, (0.25,), 0.7))
    path = tmp_path / "f.json"
    save_field(f, path)
    g = load_field(path)
    assert g.spec == f.spec and g.support == f.support
    np.testing.assert_array_equal(g.values, f.values)


def test_weighted_norm_matches_direct(rng, small_spec):
    vals = rng.standard_normal(small_spec.shape)
    f = Field(small_spec, vals)
    g = make_grid(small_spec)
    direct = math.sqrt(sum(vals[i, j] ** 2 * g.t[i] ** -0.3 * g.w[i] * g.h
                           for i in range(small_spec.Nt) for j in range(small_spec.Nx)))
    assert weighted_l2_norm(f, -0.3) == pytest.approx(direct, rel=1e-12)
