"""Dunkl kernel: closed form vs series oracle and the basic identities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dunkl.kernel import (
    KernelRangeError,
    bessel_j_normalized,
    dunkl_kernel,
    dunkl_kernel_record,
    dunkl_kernel_series,
    series_with_bound,
)
from dunkl.measure import rank1

from conftest import series_highprec


def test_normalized_at_zero():
    for k in (0.0, 0.3, 1.0, 2.5):
        cfg = rank1(k)
        assert dunkl_kernel(0.0, 1.7, cfg) == pytest.approx(1.0, abs=1e-14)
        assert dunkl_kernel(0.9, 0.0, cfg) == pytest.approx(1.0, abs=1e-14)


def test_k0_reduces_to_exponential():
    cfg = rank1(0.0)
    for x, y in ((0.7, 1.3), (-2.0, 0.4), (3.0, -3.0)):
        assert dunkl_kernel(x, y, cfg, mode="plain") == pytest.approx(
            math.exp(x * y), rel=1e-13
        )
        assert dunkl_kernel(x, y, cfg) == pytest.approx(
            complex(math.cos(x * y), -math.sin(x * y)), abs=1e-13
        )


def test_closed_form_vs_series_sample():
    rng = np.random.default_rng(7)
    for _ in range(200):
        k = float(rng.uniform(0.02, 3.0))
        x = float(rng.uniform(-4.5, 4.5))
        y = float(rng.uniform(-4.4, 4.4))
        cfg = rank1(k)
        plain = dunkl_kernel(x, y, cfg, mode="plain")
        ref = series_highprec(x, y, k)
        # plain mode grows like e^{|xy|}, so match relative above 1
        assert abs(plain - ref) / max(1.0, abs(ref)) < 1e-10
        osc = dunkl_kernel(x, y, cfg, mode="minus_i")
        assert abs(osc - series_highprec(x, -1j * y, k)) < 1e-10


def test_float64_series_route_at_moderate_products():
    # the in-package series is trustworthy while e^{|xy|} eps stays tiny
    rng = np.random.default_rng(8)
    for _ in range(100):
        k = float(rng.uniform(0.02, 3.0))
        x = float(rng.uniform(-2.4, 2.4))
        y = float(rng.uniform(-2.4, 2.4))
        cfg = rank1(k)
        assert abs(
            dunkl_kernel(x, y, cfg) - dunkl_kernel_series(x, -1j * y, k)
        ) < 1e-12


@given(
    x=st.floats(-4, 4),
    y=st.floats(-4, 4),
    k=st.floats(0.01, 3),
    t=st.floats(-2, 2),
)
@settings(max_examples=40, deadline=None)
def test_symmetry_and_scaling(x, y, k, t):
    cfg = rank1(k)
    assert dunkl_kernel(x, y, cfg) == pytest.approx(dunkl_kernel(y, x, cfg), abs=1e-12)
    assert dunkl_kernel(t * x, y, cfg, mode="plain") == pytest.approx(
        dunkl_kernel(x, t * y, cfg, mode="plain"), rel=1e-11, abs=1e-11
    )


def test_scaling_with_imaginary_factor():
    # E(tx, y) = E(x, ty) extends to t in C; t = -i connects the two modes
    for k in (0.4, 1.0, 2.2):
        for x, y in ((0.8, 1.9), (-1.5, 2.4)):
            lhs = dunkl_kernel(x, y, rank1(k), mode="minus_i")
            assert abs(lhs - series_highprec(x, -1j * y, k)) < 1e-11


def test_oscillatory_mode_bounded():
    rng = np.random.default_rng(11)
    for _ in range(60):
        k = float(rng.uniform(0.0, 3.0))
        x, y = rng.uniform(-5, 5, 2)
        assert abs(dunkl_kernel(float(x), float(y), rank1(k))) <= 1.0 + 1e-12


def test_reflection_invariance():
    # E(sigma x, sigma y) = E(x, y) for the sign flip in rank one
    cfg = rank1(1.3)
    for x, y in ((0.7, 2.0), (-1.1, 0.5)):
        assert dunkl_kernel(-x, -y, cfg, mode="plain") == pytest.approx(
            dunkl_kernel(x, y, cfg, mode="plain"), rel=1e-13
        )


def test_series_error_bound_is_honest():
    for k in (0.5, 1.7):
        for x, y in ((1.0, 2.0), (3.1, -2.7)):
            value, bound = series_with_bound(x, -1j * y, k)
            ref = series_highprec(x, -1j * y, k)
            # slack for float64 roundoff in the partial sums
            assert abs(value - ref) <= bound + 1e-13 * math.exp(abs(x * y))


def test_product_structure_d2():
    from dunkl.measure import RootSystemConfig

    cfg = RootSystemConfig(d=2, multiplicities=(0.5, 1.5))
    v = dunkl_kernel((0.7, -1.1), (1.2, 0.3), cfg, mode="plain")
    w = dunkl_kernel(0.7, 1.2, rank1(0.5), mode="plain") * dunkl_kernel(
        -1.1, 0.3, rank1(1.5), mode="plain"
    )
    assert v == pytest.approx(w, rel=1e-13)


def test_record_carries_regime():
    rec = dunkl_kernel_record(0.5, 0.7, rank1(1.0))
    assert rec.regime in ("series", "closed-form")
    assert np.isfinite(rec.value.real) and np.isfinite(rec.value.imag)


def test_bessel_normalization():
    assert bessel_j_normalized(0.5, 0.0) == pytest.approx(1.0, abs=1e-15)
    # j_{1/2}(t) = sin(t) / t after normalization
    t = 1.7
    assert bessel_j_normalized(0.5, t) == pytest.approx(math.sin(t) / t, rel=1e-13)


def test_range_guards():
    with pytest.raises(KernelRangeError):
        dunkl_kernel_series(1e5, 1e5, 1.0)
    with pytest.raises(KernelRangeError):
        bessel_j_normalized(-0.8, 1.0)
    with pytest.raises(KernelRangeError):
        dunkl_kernel(1.0, 1.0, rank1(1.0), mode="weird")
