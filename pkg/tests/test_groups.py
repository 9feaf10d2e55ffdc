import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import qha
from qha.groups import correlate_functions


LN2 = math.log(2.0)

finite_x = st.floats(-50, 50, allow_nan=False)
pos_a = st.floats(0.02, 50, allow_nan=False)


@given(finite_x, pos_a, finite_x, pos_a)
def test_affine_group_law_and_inverse(x, a, y, b):
    grp = qha.AffineGroup(LN2 / 8)
    g, h = (x, a), (y, b)
    cx, ca = grp.compose(g, h)
    assert cx == pytest.approx(x + a * y, abs=1e-9, rel=1e-9)
    assert ca == pytest.approx(a * b, rel=1e-12)
    inv = grp.inverse(g)
    back = grp.compose(g, inv)
    assert abs(back[0]) < 1e-9 * max(1.0, abs(x))
    assert back[1] == pytest.approx(1.0, rel=1e-12)
    ident = grp.compose(g, grp.identity())
    assert ident == pytest.approx(g)


@given(finite_x, pos_a, finite_x, pos_a, finite_x, pos_a)
@settings(max_examples=50)
def test_affine_metric_axioms(x, a, y, b, z, c):
    grp = qha.AffineGroup(LN2 / 8)
    g, h, k = (x, a), (y, b), (z, c)
    assert grp.metric(g, h) == pytest.approx(grp.metric(h, g), rel=1e-12, abs=1e-12)
    assert grp.metric(g, k) <= grp.metric(g, h) + grp.metric(h, k) + 1e-9


def test_affine_group_law_paper_values():
    grp = qha.AffineGroup(LN2 / 8)
    assert grp.compose((1.0, 2.0), (3.0, 4.0)) == (7.0, 8.0)
    assert grp.compose((0.0, 1.0), (2.5, 0.7)) == (2.5, 0.7)
    x, a = 1.7, 3.1
    inv = grp.inverse((x, a))
    assert inv == pytest.approx((-x / a, 1 / a))


def test_affine_rejects_nonpositive_dilation():
    grp = qha.AffineGroup(LN2 / 8)
    with pytest.raises(ValueError):
        grp.compose((0.0, -1.0), (0.0, 1.0))


def test_modular_function_density_identity():
    # d mu_r = Delta(g^{-1}) d mu_l pointwise
    grp = qha.AffineGroup(LN2 / 8)
    for g in [(0.3, 2.0), (-1.0, 0.25), (5.0, 1.0)]:
        delta_inv = grp.modular(grp.inverse(g))
        assert grp.right_density(g) == pytest.approx(
            delta_inv * grp.left_density(g), rel=1e-12
        )


def test_cyclic_group_reduction_and_law():
    grp = qha.CyclicPhaseSpace(12)
    assert grp.reduce((13, -1)) == (1, 11)
    assert grp.compose((7, 9), (8, 5)) == (3, 2)
    assert grp.compose((7, 9), grp.inverse((7, 9))) == (0, 0)
    assert grp.modular((3, 4)) == 1.0


# ---------------------------------------------------------------------------
# measures and boxes


def test_right_haar_measure_affine_closed_form():
    grp = qha.AffineGroup(LN2 / 8)
    box = qha.AffineBox(0.0, 1.0, 1.0, math.e)
    assert qha.right_haar_measure(box, grp) == pytest.approx(1.0, rel=1e-12)
    empty = qha.AffineBox(0.0, 0.0, 1.0, 2.0)
    assert qha.right_haar_measure(empty, grp) == 0.0


def test_scale_box_and_measure_scaling():
    grp = qha.AffineGroup(LN2 / 8)
    box = qha.AffineBox(0.0, 1.0, 1.0, math.e)
    for r in (1.0, 2.0, 3.5):
        scaled = qha.scale_box(r, box)
        assert scaled.x_max == pytest.approx(r)
        assert scaled.a_max == pytest.approx(math.e**r)
        assert qha.right_haar_measure(scaled, grp) == pytest.approx(
            r * r * qha.right_haar_measure(box, grp), rel=1e-12
        )
    assert qha.scale_box(1.0, box) == box
    round_trip = qha.scale_box(1.0 / 2.0, qha.scale_box(2.0, box))
    assert round_trip.x_min == pytest.approx(box.x_min)
    assert round_trip.x_max == pytest.approx(box.x_max)
    assert round_trip.a_min == pytest.approx(box.a_min)
    assert round_trip.a_max == pytest.approx(box.a_max)


def test_scale_box_rejects_cyclic():
    with pytest.raises(qha.groups.BackendMismatch):
        qha.scale_box(2.0, qha.CyclicBox(0, 3, 0, 3))


# ---------------------------------------------------------------------------
# grids


def test_affine_grid_weight_sum_matches_realized_window():
    grp = qha.AffineGroup(LN2 / 16)
    grid = qha.build_grid(qha.AffineBox(0.0, 1.0, 1.0, math.e), (64, 64), grp)
    total = grid.weight * grid.n_nodes
    assert total == pytest.approx(
        qha.right_haar_measure(grid.window, grp), rel=1e-12
    )
    # realized window differs from the request by at most half a lattice cell
    assert abs(grid.window.lam_min - 0.0) <= grid.lam_step / 2 + 1e-12
    assert abs(grid.window.lam_max - 1.0) <= grid.lam_step / 2 + 1e-12
    # nodes sit exactly on the dilation lattice
    assert np.allclose(
        grid.lams / grp.lattice_step, np.round(grid.lams / grp.lattice_step)
    )


def test_affine_grid_rejects_degenerate():
    grp = qha.AffineGroup(LN2 / 8)
    with pytest.raises(ValueError):
        qha.build_grid(qha.AffineBox(0, 1, 1, 2), (1, 16), grp)
    with pytest.raises(ValueError):
        qha.build_grid(qha.AffineBox(0, 0, 1, 2), (16, 16), grp)


def test_cyclic_grid_counting_measure():
    grp = qha.CyclicPhaseSpace(32)
    grid = qha.build_grid(None, None, grp)
    assert grid.weight * grid.n_nodes == 32 * 32
    with pytest.raises(ValueError):
        qha.build_grid(qha.CyclicBox(0, 40, 0, 3), None, grp)


def test_left_weights_match_modular_correction(affine_small):
    _, group, grid, _ = affine_small
    lam = np.repeat(grid.lams, grid.n_x)
    assert np.max(np.abs(grid.weights_l - grid.weight * np.exp(-lam))) < 1e-14


# ---------------------------------------------------------------------------
# indicator


def test_indicator_full_and_empty(affine_small):
    _, group, grid, _ = affine_small
    ones = qha.indicator(grid.window, grid)
    assert np.all(ones.values.real == 1.0)
    assert ones.integrate_r().real == pytest.approx(
        qha.right_haar_measure(grid.window, group), rel=1e-12
    )
    nothing = qha.indicator(qha.AffineBox(10.0, 11.0, 1.0, 2.0), grid)
    assert np.all(nothing.values == 0)


def test_indicator_lattice_aligned_box_mass(affine_small):
    # a box whose dilation edges sit on half-lattice points integrates exactly
    _, group, grid, _ = affine_small
    s = grid.lam_step
    box = qha.AffineBox(
        grid.xs[8] - grid.h_x / 2,
        grid.xs[40] + grid.h_x / 2,
        math.exp(-10.5 * s),
        math.exp(9.5 * s),
    )
    mass = qha.indicator(box, grid).integrate_r().real
    assert mass == pytest.approx(qha.right_haar_measure(box, group), rel=1e-12)


# ---------------------------------------------------------------------------
# convolution of functions


def test_convolve_zero_function(affine_small):
    _, _, grid, _ = affine_small
    z = qha.GroupFunction(grid, np.zeros(grid.n_nodes))
    f = qha.GroupFunction(grid, np.ones(grid.n_nodes))
    out = qha.convolve_functions(z, f)
    assert np.all(out.values == 0)


def test_cyclic_point_mass_convolution(cyclic16):
    _, _, grid, _ = cyclic16
    vals = np.zeros(grid.n_nodes)
    vals[0] = 1.0  # identity node (j=0, k=0)
    pm = qha.GroupFunction(grid, vals)
    out = qha.convolve_functions(pm, pm)
    assert out.values[0] == pytest.approx(1.0)
    assert np.max(np.abs(out.values[1:])) == 0.0


def test_affine_box_convolution_against_refined_oracle():
    """L1 mass of f*g against a direct double quadrature at 2x resolution."""
    grp = qha.AffineGroup(LN2 / 8)
    window = qha.AffineBox(-3.0, 3.0, math.exp(-1.4), math.exp(1.4))
    fbox = qha.AffineBox(-0.5, 0.5, math.exp(-0.25), math.exp(0.25))
    gbox = qha.AffineBox(-0.4, 0.3, math.exp(-0.2), math.exp(0.15))

    grid = qha.build_grid(window, (96, 32), grp)
    f = qha.indicator(fbox, grid)
    g = qha.indicator(gbox, grid)
    conv = qha.convolve_functions(f, g)
    mass = conv.integrate_r().real

    # oracle: independent double quadrature of the exact indicators at 2x
    # resolution (no interpolation; membership is evaluated analytically)
    fine = qha.build_grid(window, (192, 64), grp)
    coords = fine.node_coords()
    fmask = fine.membership(fbox)
    total = 0.0
    for x, a in coords[fmask]:
        lam = math.log(a)
        # g(z y^{-1}) over fine nodes z for this fixed y=(x, a)
        zx = coords[:, 0]
        za = coords[:, 1]
        tx = zx - x * (za / a)
        tl = np.log(za / a)
        inside = (
            (tx >= gbox.x_min)
            & (tx <= gbox.x_max)
            & (tl >= gbox.lam_min - 1e-12)
            & (tl <= gbox.lam_max + 1e-12)
        )
        total += fine.weight * fine.weight * float(np.count_nonzero(inside))
        del lam
    assert mass == pytest.approx(total, abs=2e-3 * max(total, 1e-12))
    # Young bound for L1
    assert mass <= f.norm_l1_r() * g.norm_l1_r() + 1e-3


def test_correlate_functions_cyclic_exact(cyclic16):
    _, group, grid, _ = cyclic16
    rng = np.random.default_rng(0)
    n = group.order
    f = qha.GroupFunction(grid, rng.standard_normal(grid.n_nodes))
    g = qha.GroupFunction(grid, rng.standard_normal(grid.n_nodes))
    out = correlate_functions(f, g)
    fv = f.values.reshape(n, n)
    gv = g.values.reshape(n, n)
    # brute: out(y) = sum_x f(x) g(x+y)
    y = (3, 7)
    acc = 0.0
    for k in range(n):
        for j in range(n):
            acc += fv[k, j] * gv[(k + y[1]) % n, (j + y[0]) % n]
    assert out.values.reshape(n, n)[y[1], y[0]] == pytest.approx(acc, rel=1e-12)


def test_grid_mismatch_rejected(affine_small, cyclic16):
    _, _, agrid, _ = affine_small
    _, _, cgrid, _ = cyclic16
    f = qha.GroupFunction(agrid, np.zeros(agrid.n_nodes))
    g = qha.GroupFunction(cgrid, np.zeros(cgrid.n_nodes))
    with pytest.raises(qha.groups.BackendMismatch):
        qha.convolve_functions(f, g)
