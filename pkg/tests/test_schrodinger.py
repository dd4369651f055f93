"""Schroedinger flow: route agreement, conservation, Gaussian closed forms."""

import numpy as np
import pytest

from dunkl.measure import GridError, SampledFunction, build_grid, rank1
from dunkl.schrodinger import (
    AliasingError,
    gaussian_packet,
    gaussian_state,
    min_explicit_time,
    propagate,
    propagate_explicit,
    propagate_multiplier,
)
from dunkl.transform import transform_operator

from conftest import STD_R


def test_t0_is_identity(grid1024, op1024):
    u0 = gaussian_packet(grid1024, waist=1.0, focus_time=0.5)
    u = propagate_multiplier(u0, 0.0, op=op1024)
    assert np.max(np.abs(u.values - u0.values)) < 1e-8


def test_norm_conservation(grid1024, op1024):
    u0 = gaussian_packet(grid1024)
    n0 = u0.norm()
    for t in (0.1, 0.5, 1.0, 2.5, 4.0):
        u = propagate_multiplier(u0, t, op=op1024)
        assert u.norm() == pytest.approx(n0, rel=1e-5)


def test_group_property(grid1024, op1024):
    # packet chosen so the state stays inside the box over the whole horizon
    u0 = gaussian_packet(grid1024, waist=1.0, focus_time=0.65)
    one = propagate_multiplier(u0, 1.3, op=op1024)
    two = propagate_multiplier(propagate_multiplier(u0, 0.8, op=op1024), 0.5, op=op1024)
    assert np.max(np.abs(one.values - two.values)) < 1e-8


def test_gaussian_closed_form(grid1024, op1024):
    u0 = gaussian_packet(grid1024, waist=1.0, focus_time=0.65)
    for t in (0.3, 0.65, 1.3):
        u = propagate_multiplier(u0, t, op=op1024)
        ref = gaussian_state(grid1024, t, waist=1.0, focus_time=0.65)
        assert np.max(np.abs(u.values - ref.values)) < 1e-7


def test_boundary_tail_spoils_agreement(grid1024, op1024):
    # the same check with the wide default packet fails by orders of
    # magnitude: box truncation, not the propagator, is the limiting error
    u0 = gaussian_packet(grid1024)
    u = propagate_multiplier(u0, 2.0, op=op1024)
    ref = gaussian_state(grid1024, 2.0)
    assert np.max(np.abs(u.values - ref.values)) > 1e-5


def test_gaussian_closed_form_other_k():
    for k in (0.0, 0.5, 2.5):
        grid = build_grid(STD_R, 512, rank1(k))
        u0 = gaussian_packet(grid, waist=1.0, focus_time=0.65)
        u = propagate_multiplier(u0, 1.3)
        ref = gaussian_state(grid, 1.3, waist=1.0, focus_time=0.65)
        assert np.max(np.abs(u.values - ref.values)) < 1e-7


def test_k0_density_formula():
    # static unit Gaussian at k = 0: |u|^2 = (1+4t^2)^(-1/2) exp(-x^2/(1+4t^2))
    grid = build_grid(STD_R, 1024, rank1(0.0))
    u0 = SampledFunction(grid, np.exp(-0.5 * grid.x**2))
    for t in (0.3, 1.0):
        u = propagate_multiplier(u0, t)
        dens = np.abs(u.values) ** 2
        s = 1.0 + 4.0 * t * t
        ref = np.exp(-grid.x**2 / s) / np.sqrt(s)
        assert np.max(np.abs(dens - ref)) < 1e-6


def test_explicit_matches_multiplier(grid1024, op1024):
    u0 = gaussian_packet(grid1024, waist=1.0, focus_time=0.65)
    nrm = u0.norm()
    t0 = min_explicit_time(grid1024)
    for t in (1.25 * t0, 0.65, 1.3):
        a = propagate_explicit(u0, t, op=op1024)
        b = propagate_multiplier(u0, t, op=op1024)
        diff = SampledFunction(grid1024, a.values - b.values)
        assert diff.norm() / nrm < 1e-5


def test_explicit_matches_multiplier_k0():
    grid = build_grid(STD_R, 1024, rank1(0.0))
    u0 = gaussian_packet(grid)
    a = propagate_explicit(u0, 1.0)
    b = propagate_multiplier(u0, 1.0)
    assert SampledFunction(grid, a.values - b.values).norm() / u0.norm() < 1e-5


def test_explicit_refuses_aliased_times(grid1024):
    t0 = min_explicit_time(grid1024)
    assert 0.0 < t0 < 0.25
    u0 = gaussian_packet(grid1024)
    with pytest.raises(AliasingError):
        propagate_explicit(u0, 0.5 * t0)


def test_propagate_wrapper(grid1024, op1024):
    u0 = gaussian_packet(grid1024)
    st = propagate(u0, 1.0, method="multiplier", op=op1024)
    assert st.t == 1.0 and st.method == "multiplier"
    assert st.norm() == pytest.approx(u0.norm(), rel=1e-5)
    with pytest.raises(GridError):
        propagate(u0, 1.0, method="cayley")
    with pytest.raises(GridError):
        propagate_multiplier(u0, -1.0, op=op1024)


def test_focusing_packet_width():
    # the packet focuses to its waist at focus_time and re-expands after
    grid = build_grid(STD_R, 1024, rank1(1.0))
    op = transform_operator(grid)
    u0 = gaussian_packet(grid, waist=1.0, focus_time=2.0)

    def width(u):
        dens = np.abs(u.values) ** 2
        m = np.sum(grid.weights * dens)
        return float(np.sqrt(np.sum(grid.weights * grid.x**2 * dens) / m))

    w_start = width(propagate_multiplier(u0, 0.0, op=op))
    w_focus = width(propagate_multiplier(u0, 2.0, op=op))
    w_late = width(propagate_multiplier(u0, 4.0, op=op))
    assert w_focus < 0.5 * w_start
    assert w_late > 1.5 * w_focus
    assert w_late == pytest.approx(w_start, rel=0.05)
