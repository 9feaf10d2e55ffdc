"""Proposition checklist: every library invariant as a pass/fail check.

``run_suite`` executes the whole list on both backends (affine at the
configured default geometry, cyclic at the configured order) and returns
one row per check and backend with the measured error, the tolerance it
was held to, and a status.  Tolerances can be overridden per check with
``suite.tol.<check_id>`` config keys and checks skipped with a
``suite.skip`` list; one check (compact-range membership) is structurally
vacuous at finite dimension and always reports ``skip``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cohen import cohen_map, scalogram
from .config import get_float, get_str
from .convolution import (
    admissibility_report,
    func_op_convolve,
    make_density_operator,
    op_op_at,
    op_op_convolve,
)
from .experiments import (
    Context,
    battery_vector,
    build_context,
    merged,
    random_positive_admissible,
    random_positive_trace_class,
    unit_index,
)
from .groups import (
    AffineBox,
    CyclicBox,
    GroupFunction,
    convolve_functions,
    correlate_functions,
    indicator,
    right_haar_measure,
)
from .localization import (
    approximate_identity_probe,
    localization_operator,
    minimax_check,
    operator_second_moment,
    s_tilde,
    scaling_experiment,
    second_moment,
)
from .operators import (
    OperatorRep,
    hs_inner,
    min_eigenvalue,
    operator_norm,
    rank_one,
    schatten_norm,
    spectral_decomposition,
)
from .representation import (
    apply_duflo_inv,
    conjugate,
    duflo_moore,
    log_gaussian,
    make_representation,
)
from .wavelet import (
    op_window_transform,
    transform_pair_function,
    vector_field_inner,
    window_pairing_constant,
)

__all__ = ["CheckRow", "run_suite", "CHECKS"]


@dataclass
class CheckRow:
    check: str
    backend: str
    measured: float
    tolerance: float
    status: str  # pass | fail | skip
    note: str = ""


def _row(check, backend, measured, tol, note=""):
    status = "pass" if measured <= tol else "fail"
    return CheckRow(check, backend, float(measured), float(tol), status, note)


def _rand_vec(basis, rng):
    v = rng.standard_normal(basis.size) + 1j * rng.standard_normal(basis.size)
    return v / basis.norm(v)


def _interior_vec(ctx, rng, spec=None):
    if ctx.backend == "affine":
        if spec is None:
            spec = (
                int(rng.integers(6, 14)),
                float(rng.uniform(5, 9)),
                float(rng.uniform(-0.4, 0.4)),
            )
        return battery_vector(ctx.basis, spec)
    return _rand_vec(ctx.basis, rng)


def _interior_op(ctx, rng, terms=2):
    mat = 0
    for _ in range(terms):
        mat = mat + float(rng.uniform(0.3, 1.0)) * rank_one(
            ctx.basis, _interior_vec(ctx, rng), _interior_vec(ctx, rng)
        ).matrix
    return OperatorRep(ctx.basis, mat)


def _narrow_bump(ctx, rng=None, x_radius=0.5, lam_radius=0.35):
    """Nonnegative bump supported well inside the grid window."""
    grid = ctx.grid
    if ctx.backend == "affine":
        lam = np.repeat(grid.lams, grid.n_x)
        x = np.tile(grid.xs, grid.n_lam)
        vals = np.where(
            (np.abs(x) <= x_radius) & (np.abs(lam) <= lam_radius),
            np.cos(np.pi * x / (2 * x_radius)) ** 2
            * np.cos(np.pi * lam / (2 * lam_radius)) ** 2,
            0.0,
        )
        return GroupFunction(grid, vals.astype(complex))
    n = ctx.group.order
    coords = grid.node_coords()
    dj = np.minimum(coords[:, 0] % n, (-coords[:, 0]) % n)
    dk = np.minimum(coords[:, 1] % n, (-coords[:, 1]) % n)
    vals = np.where((dj <= 3) & (dk <= 3), 1.0 + 0.25 * dj - 0.1 * dk, 0.0)
    return GroupFunction(grid, vals.astype(complex))


def _interior_mask(grid, x_margin=1.6, lam_margin=0.6):
    lam = np.repeat(grid.lams, grid.n_x)
    x = np.tile(grid.xs, grid.n_lam)
    win = grid.window
    return (
        (x >= win.x_min + x_margin)
        & (x <= win.x_max - x_margin)
        & (lam >= win.lam_min + lam_margin)
        & (lam <= win.lam_max - lam_margin)
    )


# ---------------------------------------------------------------------------
# group models


def check_group_associativity(actx, cctx, tol):
    rows = []
    rng = np.random.default_rng(7)
    worst = 0.0
    grp = actx.group
    step = grp.lattice_step
    for _ in range(64):
        pts = [
            (rng.uniform(-3, 3), math.exp(int(rng.integers(-20, 20)) * step))
            for _ in range(3)
        ]
        g, h, k = pts
        left = grp.compose(grp.compose(g, h), k)
        right = grp.compose(g, grp.compose(h, k))
        worst = max(worst, grp.metric(left, right))
    rows.append(_row("group.compose_associativity", "affine", worst, tol))
    cgrp = cctx.group
    worst = 0
    for _ in range(64):
        pts = [tuple(rng.integers(0, cgrp.order, 2)) for _ in range(3)]
        g, h, k = pts
        left = cgrp.compose(cgrp.compose(g, h), k)
        right = cgrp.compose(g, cgrp.compose(h, k))
        worst = max(worst, abs(left[0] - right[0]) + abs(left[1] - right[1]))
    rows.append(_row("group.compose_associativity", "cyclic", worst, 0.0))
    return rows


def check_quadrature_invariance(actx, cctx, tol):
    # analytic interior bump integrated before/after right translation
    grid = actx.grid
    lam = np.repeat(grid.lams, grid.n_x)
    x = np.tile(grid.xs, grid.n_lam)

    def bump(xv, lv):
        return np.exp(-(xv**2) / 0.32 - (lv**2) / 0.18)

    base = grid.weight * float(np.sum(bump(x, lam)))
    worst = 0.0
    step = actx.group.lattice_step
    for h in [(0.35, math.exp(4 * step)), (-0.2, math.exp(-6 * step)), (0.5, 1.0)]:
        xh, ah = h
        lh = math.log(ah)
        shifted = grid.weight * float(
            np.sum(bump(x + np.exp(lam) * xh, lam + lh))
        )
        worst = max(worst, abs(shifted - base) / abs(base))
    rows = [_row("group.quadrature_right_invariance", "affine", worst, tol)]
    cg = cctx.grid
    f = _narrow_bump(cctx)
    n = cctx.group.order
    fv = f.values.reshape(n, n)
    worst = 0.0
    for (jh, kh) in [(3, 5), (11, 2)]:
        shifted = np.roll(fv, (-kh, -jh), axis=(0, 1))
        worst = max(worst, abs(np.sum(shifted) - np.sum(fv)))
    rows.append(_row("group.quadrature_right_invariance", "cyclic", worst, 1e-12))
    return rows


def check_modular_consistency(actx, cctx, tol):
    grid = actx.grid
    lam = np.repeat(grid.lams, grid.n_x)
    wl = grid.weights_l
    wr = grid.weights_r
    delta_vals = np.exp(-lam)  # modular function at the node
    worst = float(np.max(np.abs(wl / wr - delta_vals)))
    # density identity dmu_r = Delta(g^{-1}) dmu_l, Delta(g^{-1}) = e^{lam}
    worst = max(worst, float(np.max(np.abs(wr - np.exp(lam) * wl))))
    rows = [_row("group.modular_weight_consistency", "affine", worst, tol)]
    rows.append(
        _row(
            "group.modular_weight_consistency",
            "cyclic",
            float(np.max(np.abs(cctx.grid.weights_l - cctx.grid.weights_r))),
            0.0,
        )
    )
    return rows


def check_metric_axioms(actx, cctx, tol):
    rng = np.random.default_rng(11)
    grp = actx.group
    worst = 0.0
    for _ in range(128):
        pts = [
            (rng.uniform(-4, 4), math.exp(rng.uniform(-2, 2))) for _ in range(3)
        ]
        g, h, k = pts
        worst = max(worst, abs(grp.metric(g, h) - grp.metric(h, g)))
        viol = grp.metric(g, k) - (grp.metric(g, h) + grp.metric(h, k))
        worst = max(worst, max(viol, 0.0))
    return [_row("group.metric_axioms", "affine", worst, tol)]


# ---------------------------------------------------------------------------
# representation


def check_phase_cancellation(actx, cctx, tol):
    rows = []
    rng = np.random.default_rng(13)
    for ctx in (actx, cctx):
        rep = make_representation(ctx.basis, ctx.group)
        s_op = _interior_op(ctx, rng)
        if ctx.backend == "affine":
            pt = (0.618, math.exp(5 * ctx.group.lattice_step))
        else:
            pt = (3, 11)
        mat = rep.matrix(pt)
        theta = rng.uniform(0, 2 * math.pi)
        phased = np.exp(1j * theta) * mat
        w = ctx.basis.weights
        adj = phased.conj().T * (w[None, :] / w[:, None])
        alpha_direct = adj @ s_op.matrix @ phased
        alpha_struct = conjugate(s_op, pt).matrix
        scale = max(float(np.max(np.abs(alpha_struct))), 1e-300)
        worst = float(np.max(np.abs(alpha_direct - alpha_struct))) / scale
        rows.append(_row("rep.projective_phase_cancellation", ctx.backend, worst, tol))
    return rows


def check_duflo_covariance(actx, cctx, tol_affine):
    rows = []
    # affine: sigma(g) D sigma(g)* = Delta(g)^{-1/2} D on interior vectors
    ctx = actx
    rep = make_representation(ctx.basis, ctx.group)
    dm = duflo_moore(ctx.basis)
    v = battery_vector(ctx.basis, (9, 6, 0.1))
    worst = 0.0
    step = ctx.group.lattice_step
    for pt in [(0.4, math.exp(6 * step)), (-1.1, math.exp(-8 * step)), (2.0, 1.0)]:
        lhs = rep.apply(pt, dm.diag * rep.apply_adjoint(pt, v))
        scale = 1.0 / math.sqrt(ctx.group.modular(pt))
        rhs = scale * dm.diag * v
        worst = max(worst, ctx.basis.norm(lhs - rhs) / ctx.basis.norm(rhs))
    rows.append(_row("rep.duflo_moore_covariance", "affine", worst, tol_affine))
    # cyclic: D is a multiple of the identity, conjugation exact
    rep = make_representation(cctx.basis, cctx.group)
    dmc = duflo_moore(cctx.basis)
    vc = _rand_vec(cctx.basis, np.random.default_rng(5))
    pt = (4, 9)
    lhs = rep.apply(pt, dmc.diag * rep.apply_adjoint(pt, vc))
    worst = cctx.basis.norm(lhs - dmc.diag * vc)
    rows.append(_row("rep.duflo_moore_covariance", "cyclic", worst, 1e-12))
    return rows


def check_duflo_orthogonality(actx, cctx, tol_affine):
    rows = []
    for ctx, tol in ((actx, tol_affine), (cctx, 1e-9)):
        rng = np.random.default_rng(17)
        dinv = duflo_moore(ctx.basis).diag_inv
        phi1 = _interior_vec(ctx, rng, (8, 7, 0.0))
        phi2 = _interior_vec(ctx, rng, (5, 9, -0.2))
        psi1 = _interior_vec(ctx, rng, (11, 7, 0.0))
        psi2 = _interior_vec(ctx, rng, (13, 8, 0.3))
        fn = op_op_convolve(
            rank_one(ctx.basis, phi1, phi2),
            rank_one(ctx.basis, psi2, psi1),
            ctx.grid,
        )
        lhs = fn.integrate_r()
        rhs = ctx.basis.inner(phi1, phi2) * np.conj(
            ctx.basis.inner(dinv * psi1, dinv * psi2)
        )
        rows.append(
            _row(
                "rep.duflo_moore_orthogonality",
                ctx.backend,
                abs(lhs - rhs) / abs(rhs),
                tol,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# operator space


def check_trace_cyclicity(actx, cctx, tol):
    rows = []
    rng = np.random.default_rng(19)
    for ctx in (actx, cctx):
        worst = 0.0
        for _ in range(8):
            a = _interior_op(ctx, rng)
            b = _interior_op(ctx, rng)
            ab = (a @ b).trace()
            ba = (b @ a).trace()
            worst = max(worst, abs(ab - ba) / max(abs(ab), 1e-300))
        rows.append(_row("op.trace_cyclicity", ctx.backend, worst, tol))
    return rows


def check_schatten_duality(actx, cctx, tol):
    rows = []
    rng = np.random.default_rng(23)
    pairs = [(1, math.inf), (2, 2), (math.inf, 1)]
    for ctx in (actx, cctx):
        worst = 0.0
        for _ in range(6):
            a = _interior_op(ctx, rng)
            b = _interior_op(ctx, rng)
            val = abs((a @ b).trace())
            for p, q in pairs:
                bound = schatten_norm(a, p) * schatten_norm(b, q)
                worst = max(worst, (val - bound) / max(bound, 1e-300))
        # ordering of the norms themselves
        for _ in range(2):
            a = _interior_op(ctx, rng)
            s_inf = schatten_norm(a, math.inf)
            s_2 = schatten_norm(a, 2)
            s_1 = schatten_norm(a, 1)
            worst = max(worst, s_inf - s_2, s_2 - s_1)
        rows.append(_row("op.schatten_duality", ctx.backend, max(worst, 0.0), tol))
    return rows


def check_positivity_detector(actx, cctx, tol):
    rows = []
    rng = np.random.default_rng(29)
    for ctx in (actx, cctx):
        worst = 0.0
        v = _interior_vec(ctx, rng)
        proj = rank_one(ctx.basis, v, v)
        f = _narrow_bump(ctx)
        fos = func_op_convolve(f, proj)
        for op in (proj, fos):
            floor = min_eigenvalue(op)
            worst = max(worst, -floor / max(operator_norm(op), 1e-300))
        rows.append(_row("op.positivity_detector", ctx.backend, max(worst, 0.0), tol))
    return rows


# ---------------------------------------------------------------------------
# convolutions


def check_compatibility_op(actx, cctx, tol_affine, tol_cyclic):
    rows = []
    rng = np.random.default_rng(31)
    for ctx, tol in ((actx, tol_affine), (cctx, tol_cyclic)):
        f = _narrow_bump(ctx)
        t_op = _interior_op(ctx, rng)
        s_op = _interior_op(ctx, rng)
        lhs = op_op_convolve(func_op_convolve(f, t_op), s_op, ctx.grid)
        rhs = convolve_functions(f, op_op_convolve(t_op, s_op, ctx.grid))
        diff = np.abs(lhs.values - rhs.values)
        scale = max(float(np.max(np.abs(rhs.values))), 1e-300)
        if ctx.backend == "affine":
            mask = _interior_mask(ctx.grid)
            measured = float(np.max(diff[mask])) / scale
        else:
            measured = float(np.max(diff)) / scale
        rows.append(_row("conv.compatibility_func_op_op", ctx.backend, measured, tol))
    return rows


def check_compatibility_fn(actx, cctx, tol_affine, tol_cyclic):
    rows = []
    rng = np.random.default_rng(37)
    for ctx, tol in ((actx, tol_affine), (cctx, tol_cyclic)):
        f = _narrow_bump(ctx)
        g = _narrow_bump(ctx, x_radius=0.4, lam_radius=0.3)
        if ctx.backend == "cyclic":
            g = GroupFunction(ctx.grid, np.roll(
                f.values.reshape(ctx.group.order, -1), (2, 3), (0, 1)).ravel())
        t_op = _interior_op(ctx, rng)
        lhs = func_op_convolve(f, func_op_convolve(g, t_op))
        rhs = func_op_convolve(convolve_functions(f, g), t_op)
        scale = max(operator_norm(lhs), 1e-300)
        measured = operator_norm(lhs - rhs) / scale
        rows.append(_row("conv.compatibility_func_func_op", ctx.backend, measured, tol))
    return rows


def check_adjoint_duality(actx, cctx, tol):
    rows = []
    rng = np.random.default_rng(41)
    for ctx in (actx, cctx):
        worst = 0.0
        for _ in range(16):
            vals = rng.standard_normal(ctx.grid.n_nodes) + 1j * rng.standard_normal(
                ctx.grid.n_nodes
            )
            f = GroupFunction(ctx.grid, vals)
            s_op = _interior_op(ctx, rng)
            t_op = _interior_op(ctx, rng)
            lhs = complex(np.trace(t_op.matrix @ func_op_convolve(f, s_op).matrix))
            ts = op_op_convolve(t_op, s_op, ctx.grid)
            rhs = ctx.grid.weight * complex(np.sum(f.values * ts.values))
            worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
        rows.append(_row("conv.adjoint_duality", ctx.backend, worst, tol))
    return rows


def check_interpolation_bounds(actx, cctx, tol):
    rows = []
    rng = np.random.default_rng(43)
    for ctx in (actx, cctx):
        s_op = random_positive_admissible(ctx.basis, rng)
        rep = admissibility_report(s_op)
        s1 = schatten_norm(s_op, 1)
        dsd1 = rep.trace_norm_dsd
        f = _narrow_bump(ctx)
        fv = np.abs(f.values)
        worst = 0.0
        for p, q in [(1, math.inf), (2, 2), (math.inf, 1)]:
            lhs = schatten_norm(func_op_convolve(f, s_op), p)
            if p == math.inf:
                fnorm = float(np.max(fv))
            else:
                fnorm = float(
                    (ctx.grid.weight * np.sum(fv**p)) ** (1.0 / p)
                )
            bound = fnorm * s1 ** (1.0 / p if p != math.inf else 0.0) * dsd1 ** (
                1.0 / q if q != math.inf else 0.0
            )
            worst = max(worst, (lhs - bound) / max(bound, 1e-300))
        rows.append(
            _row("conv.interpolation_bounds", ctx.backend, max(worst, 0.0), tol)
        )
    return rows


def check_integral_left_right(actx, cctx, tol_affine, tol_cyclic):
    rows = []
    rng = np.random.default_rng(47)
    for ctx, tol in ((actx, tol_affine), (cctx, tol_cyclic)):
        s_op = random_positive_admissible(ctx.basis, rng)
        t_op = random_positive_admissible(ctx.basis, rng)
        fn = op_op_convolve(t_op, s_op, ctx.grid)
        right = fn.integrate_r()
        left = fn.integrate_l()
        c_s = admissibility_report(s_op).constant
        c_t = admissibility_report(t_op).constant
        right_expect = t_op.trace().real * c_s
        left_expect = s_op.trace().real * c_t
        measured = max(
            abs(right - right_expect) / abs(right_expect),
            abs(left - left_expect) / abs(left_expect),
        )
        rows.append(_row("conv.integral_left_right", ctx.backend, measured, tol))
    return rows


def check_compactness_note(actx, cctx, tol):
    return [
        CheckRow(
            "conv.compact_range",
            "both",
            0.0,
            0.0,
            "skip",
            "range compactness is vacuous at finite dimension",
        )
    ]


# ---------------------------------------------------------------------------
# Cohen class


def check_cohen_covariance(actx, cctx, tol_affine):
    rows = []
    # affine: lattice dilation shifts only
    ctx = actx
    rep = make_representation(ctx.basis, ctx.group)
    psi = battery_vector(ctx.basis, (10, 6, 0.0))
    phi = battery_vector(ctx.basis, (8, 7, 0.2))
    s_op = rank_one(
        ctx.basis, battery_vector(ctx.basis, (9, 6, 0.1)),
        battery_vector(ctx.basis, (11, 8, 0.0))
    )
    stride = int(round(ctx.grid.lam_step / ctx.group.lattice_step))
    k = 3 * stride
    pt = (0.0, math.exp(k * ctx.group.lattice_step))
    q1 = cohen_map(s_op, rep.apply(pt, psi), rep.apply(pt, phi), ctx.grid)
    q2 = cohen_map(s_op, psi, phi, ctx.grid)
    v1 = q1.values.reshape(ctx.grid.n_lam, ctx.grid.n_x)
    v2 = q2.values.reshape(ctx.grid.n_lam, ctx.grid.n_x)
    # Q(sigma(x)psi, sigma(x)phi)(y) = Q(psi, phi)(y x); y x shifts the
    # dilation row by k/stride
    shift = k // stride
    diff = v1[:-shift] - v2[shift:]
    scale = max(float(np.max(np.abs(v2))), 1e-300)
    rows.append(
        _row(
            "cohen.covariance",
            "affine",
            float(np.max(np.abs(diff))) / scale,
            tol_affine,
        )
    )
    # cyclic: arbitrary shifts, exact
    ctxc = cctx
    repc = make_representation(ctxc.basis, ctxc.group)
    rng = np.random.default_rng(53)
    psi = _rand_vec(ctxc.basis, rng)
    phi = _rand_vec(ctxc.basis, rng)
    s_opc = _interior_op(ctxc, rng)
    pt = (5, 9)
    q1 = cohen_map(s_opc, repc.apply(pt, psi), repc.apply(pt, phi), ctxc.grid)
    q2 = cohen_map(s_opc, psi, phi, ctxc.grid)
    n = ctxc.group.order
    v1 = q1.values.reshape(n, n)
    v2 = q2.values.reshape(n, n)
    # node (j,k) -> (j,k)+(5,9) componentwise
    v2s = np.roll(v2, (-pt[1], -pt[0]), axis=(0, 1))
    scale = max(float(np.max(np.abs(v2))), 1e-300)
    rows.append(
        _row(
            "cohen.covariance",
            "cyclic",
            float(np.max(np.abs(v1 - v2s))) / scale,
            1e-10,
        )
    )
    return rows


def check_cohen_positivity(actx, cctx, tol):
    rows = []
    rng = np.random.default_rng(59)
    for ctx in (actx, cctx):
        psi = _interior_vec(ctx, rng)
        v1 = _interior_vec(ctx, rng)
        v2 = _interior_vec(ctx, rng)
        sym = rank_one(ctx.basis, v1, v1) + rank_one(ctx.basis, v2, v2)
        pos = sym
        qpos = cohen_map(pos, psi, psi, ctx.grid)
        scale = max(float(np.max(np.abs(qpos.values))), 1e-300)
        worst = float(np.max(np.abs(qpos.values.imag))) / scale
        worst = max(worst, -float(np.min(qpos.values.real)) / scale)
        # falsification probe: a genuinely non-positive self-adjoint kernel
        # must show a negative value for some state (its bottom eigenvector)
        indef = rank_one(ctx.basis, v1, v1) - 0.8 * rank_one(ctx.basis, v2, v2)
        spec = spectral_decomposition(indef)
        bottom = spec.eigenvectors[:, -1]
        neg = op_op_at(rank_one(ctx.basis, bottom, bottom), indef,
                       [_identity_point(ctx)])[0].real
        if neg >= -1e-12:
            worst = max(worst, 1.0)  # probe failed to expose nonpositivity
        rows.append(_row("cohen.positivity_reality", ctx.backend, worst, tol))
    return rows


def _identity_point(ctx):
    return (0.0, 1.0) if ctx.backend == "affine" else (0, 0)


def check_cohen_linearity(actx, cctx, tol):
    rows = []
    rng = np.random.default_rng(61)
    for ctx in (actx, cctx):
        psi = _interior_vec(ctx, rng)
        phi = _interior_vec(ctx, rng)
        s_op = _interior_op(ctx, rng)
        t_op = _interior_op(ctx, rng)
        a, b = 0.7 - 0.2j, -0.4 + 1.1j
        combo = OperatorRep(ctx.basis, a * s_op.matrix + b * t_op.matrix)
        q = cohen_map(combo, psi, phi, ctx.grid)
        qs = cohen_map(s_op, psi, phi, ctx.grid)
        qt = cohen_map(t_op, psi, phi, ctx.grid)
        diff = q.values - (a * qs.values + b * qt.values)
        scale = max(float(np.max(np.abs(q.values))), 1e-300)
        rows.append(
            _row(
                "cohen.linearity",
                ctx.backend,
                float(np.max(np.abs(diff))) / scale,
                tol,
            )
        )
    return rows


def check_cohen_conv_kernel(actx, cctx, tol_affine, tol_cyclic):
    # the kernel of a convolved operator acts by left correlation:
    # Q_{f*S}(y) = sum_x w f(x) Q_S(x.y); the plain convolution form only
    # reappears on abelian models with symmetric masks (checked second)
    rows = []
    rng = np.random.default_rng(67)
    for ctx, tol in ((actx, tol_affine), (cctx, tol_cyclic)):
        psi = _interior_vec(ctx, rng)
        phi = _interior_vec(ctx, rng)
        s_op = _interior_op(ctx, rng)
        f = _narrow_bump(ctx)
        q_conv = cohen_map(func_op_convolve(f, s_op), psi, phi, ctx.grid)
        q_s = cohen_map(s_op, psi, phi, ctx.grid)
        rhs = correlate_functions(f, GroupFunction(ctx.grid, q_s.values))
        diff = np.abs(q_conv.values - rhs.values)
        scale = max(float(np.max(np.abs(q_conv.values))), 1e-300)
        if ctx.backend == "affine":
            mask = _interior_mask(ctx.grid)
            measured = float(np.max(diff[mask])) / scale
        else:
            measured = float(np.max(diff)) / scale
            conv = convolve_functions(f, GroupFunction(ctx.grid, q_s.values))
            measured = max(
                measured,
                float(np.max(np.abs(q_conv.values - conv.values))) / scale,
            )
        rows.append(_row("cohen.conv_kernel_map", ctx.backend, measured, tol))
    return rows


# ---------------------------------------------------------------------------
# localization


def check_minimax(actx, cctx, tol_gap):
    rows = []
    rng = np.random.default_rng(71)
    for ctx in (actx, cctx):
        s_op = random_positive_admissible(ctx.basis, rng)
        f = _narrow_bump(ctx)
        rep = minimax_check(f, s_op, ctx.grid)
        overshoot = max(rep.best_probe - rep.top_eigenvalue - 1e-9, 0.0)
        shortfall = max(rep.top_eigenvalue - rep.best_probe - tol_gap, 0.0)
        measured = max(overshoot, shortfall, rep.identity_gap - 1e-10)
        rows.append(_row("loc.minimax", ctx.backend, max(measured, 0.0), 0.0))
    return rows


def check_lemma_bound(actx, cctx, cfg):
    rows = []
    # affine: spectra from a small scaling run, counting bound for several
    # delta values from the same eigenvalues
    from .experiments import SCALING_DEFAULTS, scaling_density
    from .representation import FrequencyBasis

    scfg = merged(cfg, SCALING_DEFAULTS)
    basis = FrequencyBasis(
        int(scfg["basis.n"]),
        float(scfg["basis.omega_min"]),
        float(scfg["basis.delta"]),
    )
    density = scaling_density(scfg, basis)
    box = AffineBox(0.0, 1.0, 1.0, math.e)
    reports = scaling_experiment(
        density.operator, box, 0.5, [1, 2],
        base_resolution=96, cap=256,
    )
    worst = 0.0
    for rep in reports:
        ev = rep.eigenvalues
        for delta in (0.3, 0.5, 0.7):
            count = int(np.sum(ev > 1 - delta))
            bound = max(1 / delta, 1 / (1 - delta)) * abs(
                np.sum(ev**2) - np.sum(ev)
            )
            worst = max(worst, abs(count - np.sum(ev)) - bound)
    rows.append(_row("loc.lemma_bound", "affine", max(worst, 0.0), 1e-6))
    # cyclic boxes, exact
    rng = np.random.default_rng(73)
    s_op = random_positive_admissible(cctx.basis, rng)
    n = cctx.group.order
    worst = 0.0
    for box_c in (CyclicBox(0, n // 2, 0, n // 2), CyclicBox(3, n - 4, 5, n // 2)):
        loc = localization_operator(box_c, s_op, cctx.grid)
        ev = spectral_decomposition(loc).eigenvalues
        for delta in (0.3, 0.5, 0.7):
            count = int(np.sum(ev > 1 - delta))
            bound = max(1 / delta, 1 / (1 - delta)) * abs(
                np.sum(ev**2) - np.sum(ev)
            )
            worst = max(worst, abs(count - np.sum(ev)) - bound)
    rows.append(_row("loc.lemma_bound", "cyclic", max(worst, 0.0), 1e-6))
    return rows


def check_density_construction(actx, cctx, tol_affine):
    rows = []
    rng = np.random.default_rng(79)
    for ctx, tol in ((actx, tol_affine), (cctx, 1e-9)):
        dinv = duflo_moore(ctx.basis).diag_inv
        psi = _interior_vec(ctx, rng)
        psi = psi / ctx.basis.norm(dinv * psi)  # now |D^-1 psi| = 1
        proj = rank_one(ctx.basis, psi, psi)
        c0 = admissibility_report(proj).constant
        worst = abs(c0 - 1.0)
        # f >= 0 with left-Haar mass 1 convolves a density into a density
        f = _narrow_bump(ctx)
        mass_l = f.integrate_l().real
        f = GroupFunction(ctx.grid, f.values / mass_l)
        fos = func_op_convolve(f, proj)
        c1 = admissibility_report(fos).constant
        worst = max(worst, abs(c1 - 1.0))
        rows.append(_row("loc.density_construction", ctx.backend, worst, tol))
    return rows


def check_eigenvalue_bounds(actx, cctx, cfg):
    rows = []
    slack = 1e-8
    # two cyclic combos (exact) on the context grid
    rng = np.random.default_rng(83)
    n = cctx.group.order
    worst_c = 0.0
    for box in (CyclicBox(2, n // 2, 1, n // 2 + 2), CyclicBox.full(n)):
        s_op = random_positive_admissible(cctx.basis, rng)
        ev = spectral_decomposition(
            localization_operator(box, s_op, cctx.grid)
        ).eigenvalues
        worst_c = max(worst_c, float(ev[0]) - 1.0, -float(ev[-1]))
    rows.append(_row("loc.eigenvalue_bounds", "cyclic", max(worst_c, 0.0), slack))
    # two affine combos at moderate scale from the calibrated geometry
    from .experiments import SCALING_DEFAULTS, scaling_density
    from .representation import FrequencyBasis

    scfg = merged(cfg, SCALING_DEFAULTS)
    basis = FrequencyBasis(
        int(scfg["basis.n"]),
        float(scfg["basis.omega_min"]),
        float(scfg["basis.delta"]),
    )
    worst_a = 0.0
    for centers, widths, weights, rr in (
        ("224 208", "16 22", "0.7 0.3", 2),
        ("216", "18", "1.0", 4),
    ):
        local = dict(scfg)
        local.update({"loc.centers": centers, "loc.widths": widths,
                      "loc.weights": weights})
        density = scaling_density(local, basis)
        reports = scaling_experiment(
            density.operator, AffineBox(0.0, 1.0, 1.0, math.e), 0.5, [rr],
            base_resolution=96, cap=256,
        )
        ev = reports[0].eigenvalues
        worst_a = max(worst_a, float(ev[0]) - 1.0, -float(ev[-1]))
    rows.append(_row("loc.eigenvalue_bounds", "affine", max(worst_a, 0.0), slack))
    return rows


def check_second_moment(actx, cctx, tol_affine, tol_cyclic):
    rows = []
    rng = np.random.default_rng(89)
    for ctx, tol in ((actx, tol_affine), (cctx, tol_cyclic)):
        s_op = random_positive_admissible(ctx.basis, rng)
        if ctx.backend == "affine":
            box = AffineBox(-0.9, 1.2, math.exp(-0.5), math.exp(0.8))
        else:
            n = ctx.group.order
            box = CyclicBox(2, n // 2 + 3, 1, n // 2)
        loc = localization_operator(box, s_op, ctx.grid)
        direct = operator_second_moment(loc)
        sampled = second_moment(box, s_op, ctx.grid)
        rows.append(
            _row(
                "loc.second_moment",
                ctx.backend,
                abs(sampled - direct) / max(abs(direct), 1e-300),
                tol,
            )
        )
    return rows


def check_stilde(actx, cctx, tol_affine, tol_cyclic):
    rows = []
    rng = np.random.default_rng(97)
    for ctx, tol in ((actx, tol_affine), (cctx, tol_cyclic)):
        s_op = random_positive_admissible(ctx.basis, rng)
        st = s_tilde(s_op, ctx.grid)
        worst = -float(np.min(st.values.real)) / max(
            float(np.max(st.values.real)), 1e-300
        )
        total = st.integrate_r().real
        worst = max(worst, abs(total - s_op.trace().real) / s_op.trace().real)
        ident = op_op_at(s_op, s_op, [_identity_point(ctx)])[0].real
        ev = spectral_decomposition(s_op).eigenvalues
        worst = max(worst, abs(ident - float(np.sum(ev**2))) / float(np.sum(ev**2)))
        rows.append(_row("loc.stilde", ctx.backend, max(worst, 0.0), tol))
    return rows


def check_approx_identity(actx, cctx, tol):
    from .experiments import SCALING_DEFAULTS, scaling_density
    from .representation import FrequencyBasis

    scfg = merged(None, SCALING_DEFAULTS)
    basis = FrequencyBasis(
        int(scfg["basis.n"]),
        float(scfg["basis.omega_min"]),
        float(scfg["basis.delta"]),
    )
    density = scaling_density(scfg, basis)
    box = AffineBox(0.0, 1.0, 1.0, math.e)
    vals = approximate_identity_probe(
        density.operator, box, (0.25, math.exp(0.4)), [1, 2, 4], resolution=64
    )
    increasing = all(b >= a - 5e-3 for a, b in zip(vals, vals[1:]))
    measured = abs(vals[-1] - 1.0)
    if not increasing:
        measured = max(measured, 1.0)
    return [_row("loc.approx_identity", "affine", measured, tol)]


# ---------------------------------------------------------------------------
# wavelet transforms


def check_wavelet_rank_one(actx, cctx, tol_affine, tol_cyclic):
    rows = []
    rng = np.random.default_rng(101)
    for ctx, tol in ((actx, tol_affine), (cctx, tol_cyclic)):
        xi = _interior_vec(ctx, rng)
        phi1 = _interior_vec(ctx, rng)
        phi2 = _interior_vec(ctx, rng)
        psi1 = _interior_vec(ctx, rng)
        psi2 = _interior_vec(ctx, rng)
        s1 = rank_one(ctx.basis, xi, phi1)
        s2 = rank_one(ctx.basis, xi, phi2)
        fn = transform_pair_function(s1, psi1, s2, psi2, ctx.grid)
        lhs = ctx.grid.weight * complex(np.sum(fn.values))
        dinv = duflo_moore(ctx.basis).diag_inv
        rhs = ctx.basis.inner(psi1, psi2) * np.conj(
            ctx.basis.inner(dinv * phi1, dinv * phi2)
        ) * ctx.basis.norm(xi) ** 2
        rows.append(
            _row(
                "wav.rank_one_reduction",
                ctx.backend,
                abs(lhs - rhs) / abs(rhs),
                tol,
            )
        )
    return rows


def check_wavelet_nodewise(actx, cctx, tol):
    rows = []
    rng = np.random.default_rng(103)
    for ctx in (actx, cctx):
        s1 = _interior_op(ctx, rng)
        s2 = _interior_op(ctx, rng)
        psi1 = _interior_vec(ctx, rng)
        psi2 = _interior_vec(ctx, rng)
        import warnings as _w

        with _w.catch_warnings():
            _w.simplefilter("ignore")
            f1 = op_window_transform(s1, psi1, ctx.grid)
            f2 = op_window_transform(s2, psi2, ctx.grid)
        pairing = np.sum(
            f1.samples * np.conj(f2.samples) * ctx.basis.weights, axis=1
        )
        fn = transform_pair_function(s1, psi1, s2, psi2, ctx.grid)
        scale = max(float(np.max(np.abs(fn.values))), 1e-300)
        measured = float(np.max(np.abs(pairing - fn.values))) / scale
        rows.append(_row("wav.nodewise_identity", ctx.backend, measured, tol))
    return rows


def check_wavelet_isometry(actx, cctx, tol_affine, tol_cyclic):
    rows = []
    rng = np.random.default_rng(107)
    for ctx, tol in ((actx, tol_affine), (cctx, tol_cyclic)):
        s_win = random_positive_admissible(ctx.basis, rng)
        # normalize so tr(D^-1 S*S D^-1) = 1: the transform is an isometry
        gram = s_win.adjoint() @ s_win
        c = apply_duflo_inv(gram).trace().real
        s_win = (1.0 / math.sqrt(c)) * s_win
        t_arg = _interior_op(ctx, rng)
        fn = op_op_convolve(
            t_arg @ t_arg.adjoint(), s_win.adjoint() @ s_win, ctx.grid
        )
        lhs = (ctx.grid.weight * complex(np.sum(fn.values))).real
        rhs = abs(hs_inner(t_arg, t_arg))
        rows.append(
            _row("wav.isometry", ctx.backend, abs(lhs - rhs) / rhs, tol)
        )
    return rows


# ---------------------------------------------------------------------------
# determinism


def check_determinism(actx, cctx, cfg):
    from .experiments import SCALING_DEFAULTS, scaling_density
    from .representation import FrequencyBasis

    scfg = merged(cfg, SCALING_DEFAULTS)
    basis = FrequencyBasis(
        int(scfg["basis.n"]),
        float(scfg["basis.omega_min"]),
        float(scfg["basis.delta"]),
    )
    density = scaling_density(scfg, basis)
    box = AffineBox(0.0, 1.0, 1.0, math.e)
    runs = [
        scaling_experiment(
            density.operator, box, 0.5, [1, 2],
            base_resolution=128, cap=256, workers=w,
        )
        for w in (1, 4)
    ]
    worst = 0.0
    for rep1, rep2 in zip(*runs):
        if not np.array_equal(rep1.eigenvalues, rep2.eigenvalues):
            worst = 1.0
        if (rep1.ratio, rep1.trace) != (rep2.ratio, rep2.trace):
            worst = 1.0
    return [_row("determinism.worker_count", "affine", worst, 0.0)]


# ---------------------------------------------------------------------------
# registry and runner

CHECKS = [
    ("group.compose_associativity", lambda a, c, cfg, t: check_group_associativity(a, c, t(1e-10))),
    ("group.quadrature_right_invariance", lambda a, c, cfg, t: check_quadrature_invariance(a, c, t(1e-3))),
    ("group.modular_weight_consistency", lambda a, c, cfg, t: check_modular_consistency(a, c, t(1e-12))),
    ("group.metric_axioms", lambda a, c, cfg, t: check_metric_axioms(a, c, t(1e-12))),
    ("rep.projective_phase_cancellation", lambda a, c, cfg, t: check_phase_cancellation(a, c, t(1e-12))),
    ("rep.duflo_moore_covariance", lambda a, c, cfg, t: check_duflo_covariance(a, c, t(2e-2))),
    ("rep.duflo_moore_orthogonality", lambda a, c, cfg, t: check_duflo_orthogonality(a, c, t(2e-2))),
    ("op.trace_cyclicity", lambda a, c, cfg, t: check_trace_cyclicity(a, c, t(1e-10))),
    ("op.schatten_duality", lambda a, c, cfg, t: check_schatten_duality(a, c, t(1e-10))),
    ("op.positivity_detector", lambda a, c, cfg, t: check_positivity_detector(a, c, t(1e-10))),
    ("conv.compatibility_func_op_op", lambda a, c, cfg, t: check_compatibility_op(a, c, t(2e-2), 1e-10)),
    ("conv.compatibility_func_func_op", lambda a, c, cfg, t: check_compatibility_fn(a, c, t(2e-2), 1e-10)),
    ("conv.adjoint_duality", lambda a, c, cfg, t: check_adjoint_duality(a, c, t(1e-9))),
    ("conv.interpolation_bounds", lambda a, c, cfg, t: check_interpolation_bounds(a, c, t(1e-9))),
    ("conv.integral_left_right", lambda a, c, cfg, t: check_integral_left_right(a, c, t(2e-2), 1e-10)),
    ("conv.compact_range", lambda a, c, cfg, t: check_compactness_note(a, c, t(0.0))),
    ("cohen.covariance", lambda a, c, cfg, t: check_cohen_covariance(a, c, t(1e-8))),
    ("cohen.positivity_reality", lambda a, c, cfg, t: check_cohen_positivity(a, c, t(1e-12))),
    ("cohen.linearity", lambda a, c, cfg, t: check_cohen_linearity(a, c, t(1e-12))),
    ("cohen.conv_kernel_map", lambda a, c, cfg, t: check_cohen_conv_kernel(a, c, t(2e-2), 1e-10)),
    ("loc.minimax", lambda a, c, cfg, t: check_minimax(a, c, t(5e-2))),
    ("loc.lemma_bound", lambda a, c, cfg, t: check_lemma_bound(a, c, cfg)),
    ("loc.density_construction", lambda a, c, cfg, t: check_density_construction(a, c, t(2e-2))),
    ("loc.eigenvalue_bounds", lambda a, c, cfg, t: check_eigenvalue_bounds(a, c, cfg)),
    ("loc.second_moment", lambda a, c, cfg, t: check_second_moment(a, c, t(2e-2), 1e-9)),
    ("loc.stilde", lambda a, c, cfg, t: check_stilde(a, c, t(2e-2), 1e-10)),
    ("loc.approx_identity", lambda a, c, cfg, t: check_approx_identity(a, c, t(5e-2))),
    ("wav.rank_one_reduction", lambda a, c, cfg, t: check_wavelet_rank_one(a, c, t(2e-2), 1e-9)),
    ("wav.nodewise_identity", lambda a, c, cfg, t: check_wavelet_nodewise(a, c, t(1e-10))),
    ("wav.isometry", lambda a, c, cfg, t: check_wavelet_isometry(a, c, t(2e-2), 1e-9)),
    ("determinism.worker_count", lambda a, c, cfg, t: check_determinism(a, c, cfg)),
]


def run_suite(cfg=None):
    """Run the full checklist; returns (rows, failed_ids)."""
    user_cfg = dict(cfg or {})
    cfg = merged(user_cfg)
    skip = set(get_str(cfg, "suite.skip", "").split())
    affine_cfg = dict(cfg)
    affine_cfg["backend"] = "affine"
    cyclic_cfg = dict(cfg)
    cyclic_cfg["backend"] = "cyclic"
    actx = build_context(affine_cfg)
    cctx = build_context(cyclic_cfg)
    rows = []
    for check_id, runner in CHECKS:
        if check_id in skip:
            rows.append(CheckRow(check_id, "both", 0.0, 0.0, "skip", "per config"))
            continue

        def tol_for(default, _cid=check_id):
            return get_float(cfg, f"suite.tol.{_cid}", str(default))

        # checks building their own scaled configs get the raw user config so
        # the scaling-geometry defaults are not shadowed by the suite defaults
        rows.extend(runner(actx, cctx, user_cfg, tol_for))
    failed = sorted({r.check for r in rows if r.status == "fail"})
    return rows, failed
