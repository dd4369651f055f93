"""Dyadic decomposition: profiles, mollifier family, kernels, mass bounds."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dunkl.lp import (
    apply_L_N,
    apply_T_N,
    bound_suite,
    build_family,
    bump_profile,
    kernel_A_N,
    kernel_M_N,
    psi_profile,
    schur_contraction,
)
from dunkl.measure import (
    DEFAULT_SEED,
    GridError,
    RootSystemConfig,
    SampledFunction,
    build_grid,
    rank1,
)
from dunkl.translate import translate_radial_direct

from conftest import STD_R

PHI_AT_ZERO = 0.92983717
PHI_L1 = 22.98625982


def test_bump_plateau_and_support_exact():
    r = np.array([0.0, 0.3, 1.0, 2.0, 2.5, 7.0])
    b = bump_profile(r)
    assert b[0] == 1.0 and b[1] == 1.0 and b[2] == 1.0
    assert b[3] == 0.0 and b[4] == 0.0 and b[5] == 0.0
    assert bump_profile(-0.5) == 1.0  # radial


@given(r=st.floats(1.0, 2.0))
@settings(max_examples=60, deadline=None)
def test_bump_range_and_monotone(r):
    b = bump_profile(r)
    assert 0.0 <= b <= 1.0
    assert bump_profile(r + 1e-6) <= b + 1e-12


def test_psi_annulus_support_exact():
    for j in (1, 2, 4):
        lo, hi = 2.0 ** (j - 1), 2.0 ** (j + 1)
        assert psi_profile(j, lo * 0.99) == 0.0
        assert psi_profile(j, hi * 1.01) == 0.0
        assert psi_profile(j, 2.0**j) == 1.0
    assert psi_profile(0, 0.0) == 1.0  # psi_0 = b


def test_psi_telescoping_partition():
    r = np.linspace(0.0, 40.0, 1777)
    for N in (0, 2, 5):
        total = sum(psi_profile(j, r) for j in range(N + 1))
        assert np.array_equal(total, bump_profile(r * 2.0**-N))


def test_frozen_profile_values(family1):
    assert family1.phi_radial(0.0) == pytest.approx(PHI_AT_ZERO, abs=1e-7)
    assert family1.phi_l1 == pytest.approx(PHI_L1, abs=1e-6)
    assert family1.phi_j_l1(0) == pytest.approx(family1.phi_l1, rel=1e-12)


def test_phi_j_l1_scale_invariant(family1):
    for j in (1, 3, 6):
        assert family1.phi_j_l1(j) == pytest.approx(family1.phi_l1, rel=1e-6)


def test_table_transform_recovers_cutoff(family1):
    xi = np.array([0.0, 0.5, 1.0, 1.3, 1.7, 2.0, 2.6, 5.0])
    got = family1.transform_of_table(xi)
    assert np.max(np.abs(got - bump_profile(xi))) < 1e-7


def test_phi_spectral_matches_table_inside_box(family1):
    # the band-limited grid profile and the radial table agree in the box
    x = family1.grid.x
    sel = np.abs(x) < 8.0
    tab = family1.phi_j_radial(2, np.abs(x[sel]))
    spec = family1.phi_j_spectral(2).values[sel].real
    assert np.max(np.abs(tab - spec)) < 5e-7


def test_translated_row_vs_direct_oracle(family1):
    y = family1.grid.x
    for j, x in ((0, 0.7), (1, 1.9), (2, 0.05)):
        row = family1.translated_row(j, x, y)
        ref = translate_radial_direct(
            lambda u: family1.phi_j_radial(j, u), x, y, k=1.0, nodes=220
        )
        assert np.max(np.abs(row - ref)) < 1e-6


def test_translated_row_matches_scalar(family1):
    y = np.array([0.0, 1e-4, 0.3, 1.0, 2.7, -1.3, 11.0])
    for j in (0, 3):
        for x in (0.9, 2.0e-4, 3.1):
            row = family1.translated_row(j, x, y)
            pts = [family1.translated_phi_j(j, x, float(v)) for v in y]
            assert np.max(np.abs(row - np.asarray(pts))) < 1e-8


def test_generic_multiplicity_row():
    grid = build_grid(STD_R, 512, rank1(0.7))
    fam = build_family(3, grid)
    y = grid.x
    row = fam.translated_row(1, 1.1, y)
    ref = translate_radial_direct(
        lambda u: fam.phi_j_radial(1, u), 1.1, y, k=0.7, nodes=220
    )
    assert np.max(np.abs(row - ref)) < 1e-6


def test_k0_row_is_ordinary_shift():
    grid = build_grid(STD_R, 512, rank1(0.0))
    fam = build_family(3, grid)
    y = grid.x
    assert np.array_equal(
        fam.translated_row(2, 1.4, y), fam.phi_j_radial(2, np.abs(y - 1.4))
    )


def test_kernel_A_row_support(family1):
    # psi_j(x) all vanish for |x| > 2^(N+1), so those rows are zero
    assert kernel_A_N(9.0, 0.5, 2, family1) == 0.0
    assert kernel_A_N(0.5, 0.3, 0, family1) == pytest.approx(
        psi_profile(0, 0.5) * family1.translated_phi_j(0, 0.5, 0.3), rel=1e-12
    )


def test_kernel_M_forms_agree(family1):
    rng = np.random.default_rng(DEFAULT_SEED)
    xis = rng.uniform(-6.0, 6.0, 5)
    etas = rng.uniform(-6.0, 6.0, 5)
    for xi in xis:
        for eta in etas:
            a = kernel_M_N(xi, eta, 4, family1, form="direct")
            b = kernel_M_N(xi, eta, 4, family1, form="regrouped")
            assert abs(a - b) < 1e-7
    with pytest.raises(ValueError):
        kernel_M_N(1.0, 1.0, 4, family1, form="other")


def test_lt_partition_identity(family1, grid1024):
    # L_N f + T_N f = b(2^-N |x|) f exactly in the continuum; at N >= 4 the
    # factor is 1 on the whole box
    x = grid1024.x
    f = SampledFunction(grid1024, np.exp(-0.4 * x**2) * (1 + 0.2 * x))
    for N in (2, 4, 6):
        lhs = apply_L_N(f, N, family1).values + apply_T_N(f, N, family1).values
        rhs = bump_profile(np.abs(x) * 2.0**-N) * f.values
        assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_analytic_multiplier_avoids_profile_roundtrip(family1, grid1024, combs05):
    # forwarding the sampled band profile loses its box-truncated tail (the
    # defect below is O(1)), which is why the operators apply the cutoff
    # analytically; the partition stays exact even on rough inputs
    fh = family1.op.forward_values(family1.phi_j_spectral(4).values)
    b4 = bump_profile(np.abs(grid1024.x) * 2.0**-4)
    assert np.max(np.abs(fh - b4)) > 0.1
    S, _ = combs05
    rough = SampledFunction(
        grid1024,
        np.where(S.contains(grid1024.x), 1.0 + grid1024.x**2, 0.0).astype(
            np.complex128
        ),
    )
    lhs = apply_L_N(rough, 4, family1).values + apply_T_N(rough, 4, family1).values
    scale = float(np.max(np.abs(rough.values)))
    assert np.max(np.abs(lhs - rough.values)) < 1e-8 * scale


def test_kernel_consistency_with_operator(family1, grid1024):
    # row integrals of A_N against f reproduce L_N f at chosen nodes
    f = SampledFunction(grid1024, np.exp(-0.4 * grid1024.x**2))
    out = apply_L_N(f, 4, family1)
    w = grid1024.weights
    for x0 in (0.0, 0.4, 1.3):
        i = int(np.argmin(np.abs(grid1024.x - x0)))
        xi = float(grid1024.x[i])
        row = np.array(
            [kernel_A_N(xi, float(yv), 4, family1).real for yv in grid1024.x]
        )
        direct = float(np.sum(w * row * f.values.real))
        assert direct == pytest.approx(float(out.values[i].real), abs=1e-6)


def test_apply_range_checks(family1, grid1024):
    f = SampledFunction(grid1024, np.exp(-grid1024.x**2))
    with pytest.raises(GridError):
        apply_L_N(f, 7, family1)  # N_max is 6
    with pytest.raises(GridError):
        apply_T_N(f, -1, family1)


def test_build_family_errors(grid1024):
    with pytest.raises(GridError):
        build_family(11, grid1024)
    with pytest.raises(GridError):
        build_family(-1, grid1024)
    with pytest.raises(GridError):
        build_family(4, grid1024, allow_far_field=False)  # needs R >= 32
    with pytest.raises(GridError):
        build_family(2, grid1024, cfg=rank1(0.5))  # mismatched multiplicity


def test_bound_suite_quick(family1, combs05):
    S, Sigma = combs05
    rep = bound_suite(2, family1, S, Sigma)
    assert rep.passed
    v = rep.values
    assert v["bound_i"] <= rep.tolerances["bound_i"]
    # all six masses are finite and positive
    for key in ("bound_i", "bound_ii", "bound_iii", "bound_iv", "bound_v", "bound_vi"):
        assert 0.0 < v[key] < np.inf
    # restricted masses are genuinely smaller than the full ones
    assert v["bound_v"] < 0.5 * v["bound_i"]
    assert v["bound_vi"] < 0.5 * v["bound_iv"]


def test_schur_contraction_quick(family1, combs05):
    S, Sigma = combs05
    rep = schur_contraction(family1, S, Sigma, size=12, seed=DEFAULT_SEED)
    assert rep.passed
    assert rep.values["norm_H"] <= rep.tolerances["norm_H"]
    assert rep.values["slack"] <= 3.0
