"""Named experiment runners shared by the CLI, the suite, and the tests.

Each runner takes a flat config dict (see :mod:`qha.config`), builds the
backend objects it needs, and returns plain rows plus a pass verdict; the
CLI layer handles files and exit codes.  Experiment batteries (window
vectors, random instances) are deterministic functions of the config's
``seed`` and the basis geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cohen import cohen_map, scalogram
from .config import ConfigError, get_choice, get_float, get_floats, get_int
from .convolution import (
    admissibility_report,
    make_density_operator,
    op_op_convolve,
)
from .groups import (
    AffineBox,
    AffineGroup,
    CyclicBox,
    CyclicPhaseSpace,
    GroupFunction,
    build_grid,
)
from .localization import (
    berezin_lieb_function_side,
    berezin_lieb_operator_side,
    scaling_experiment,
)
from .operators import hs_inner, rank_one
from .representation import (
    CyclicBasis,
    FrequencyBasis,
    apply_duflo_inv,
    duflo_moore,
    log_gaussian,
)
from .wavelet import window_pairing_constant

__all__ = [
    "Context",
    "build_context",
    "run_moyal",
    "run_admissibility",
    "run_cohen_map",
    "run_wavelet_moyal",
    "run_berezin_lieb",
    "run_localization_scaling",
    "PHI_CHOICES",
]

LN2 = math.log(2.0)

DEFAULTS = {
    "backend": "affine",
    "seed": "1",
    "workers": "1",
    "basis.n": "256",
    "basis.omega_min": str(2.0**-4),
    "basis.delta": str(LN2 / 16),
    "grid.x_min": "-4",
    "grid.x_max": "4",
    "grid.a_min": str(math.exp(-2.0)),
    "grid.a_max": str(math.exp(2.0)),
    "grid.resolution_x": "128",
    "grid.resolution_a": "128",
    "cyclic.order": "32",
}


@dataclass
class Context:
    backend: str
    group: object
    basis: object
    grid: object
    seed: int
    workers: int


def merged(cfg=None, extra=None):
    out = dict(DEFAULTS)
    if extra:
        out.update(extra)
    if cfg:
        out.update(cfg)
    return out


def build_context(cfg):
    """Validate the shared config keys and build group/basis/grid."""
    backend = get_choice(cfg, "backend", ("affine", "cyclic"))
    seed = get_int(cfg, "seed", minimum=0)
    workers = get_int(cfg, "workers", minimum=1, maximum=64)
    if backend == "cyclic":
        order = get_int(cfg, "cyclic.order", minimum=2, maximum=256)
        group = CyclicPhaseSpace(order)
        basis = CyclicBasis(order)
        grid = build_grid(CyclicBox.full(order), None, group)
        return Context(backend, group, basis, grid, seed, workers)
    n = get_int(cfg, "basis.n", minimum=4, maximum=4096)
    omega_min = get_float(cfg, "basis.omega_min", exclusive_min=0.0)
    delta = get_float(cfg, "basis.delta", exclusive_min=0.0)
    basis = FrequencyBasis(n, omega_min, delta)
    group = AffineGroup(delta)
    x_min = get_float(cfg, "grid.x_min")
    x_max = get_float(cfg, "grid.x_max")
    a_min = get_float(cfg, "grid.a_min", exclusive_min=0.0)
    a_max = get_float(cfg, "grid.a_max", exclusive_min=0.0)
    if x_max <= x_min or a_max <= a_min:
        raise ConfigError("grid.x_max", "grid window is degenerate")
    res_x = get_int(cfg, "grid.resolution_x", minimum=2, maximum=4096)
    res_a = get_int(cfg, "grid.resolution_a", minimum=2, maximum=4096)
    grid = build_grid(AffineBox(x_min, x_max, a_min, a_max), (res_x, res_a), group)
    return Context(backend, group, basis, grid, seed, workers)


# ---------------------------------------------------------------------------
# canonical test vectors


def unit_index(basis):
    """Lattice index of frequency 1 (center of the usable band)."""
    return round(math.log(1.0 / basis.omega_min) / basis.lattice_step)


def battery_vector(basis, spec, rng=None):
    """Vector from a ``(center_offset, width, x_shift)`` spec.

    Affine: a log-Gaussian offset from the ω = 1 index.  Cyclic: a seeded
    random unit vector (the spec only perturbs the stream).
    """
    if basis.backend == "affine":
        dc, width, xshift = spec
        return log_gaussian(basis, unit_index(basis) + dc, width, xshift)
    v = rng.standard_normal(basis.size) + 1j * rng.standard_normal(basis.size)
    return v / basis.norm(v)


MOYAL_BATTERY = [
    # (phi1, phi2, psi1, psi2) as (center offset, width, x shift)
    ((8, 7, 0.0), (4, 9, -0.2), (11, 7, 0.0), (14, 8, 0.3)),
    ((11, 6, 0.5), (11, 6, 0.5), (8, 9, 0.0), (8, 9, 0.0)),
    ((6, 8, -0.4), (10, 7, 0.1), (13, 6, 0.2), (9, 8, -0.3)),
    ((14, 5, 0.0), (12, 8, 0.0), (7, 7, 0.6), (10, 6, 0.0)),
    ((9, 9, 0.2), (7, 6, -0.1), (12, 8, -0.5), (12, 5, 0.4)),
    ((10, 7, 0.3), (13, 9, 0.0), (9, 6, 0.0), (6, 9, 0.2)),
]


def run_moyal(cfg=None):
    """Orthogonality battery: ``∫ (φ₁⊗φ₂) ⋆ (ψ₂⊗ψ₁) dμ_r`` against
    ``⟨φ₁, φ₂⟩·conj(⟨D⁻¹ψ₁, D⁻¹ψ₂⟩)`` for six window quadruples."""
    cfg = merged(cfg)
    ctx = build_context(cfg)
    default_tol = "2e-2" if ctx.backend == "affine" else "1e-9"
    tol = get_float(cfg, "moyal.tolerance", default_tol, exclusive_min=0.0)
    rng = np.random.default_rng(ctx.seed)
    dinv = duflo_moore(ctx.basis).diag_inv
    rows = []
    worst = 0.0
    for i, quad in enumerate(MOYAL_BATTERY):
        phi1, phi2, psi1, psi2 = (
            battery_vector(ctx.basis, spec, rng) for spec in quad
        )
        fn = op_op_convolve(
            rank_one(ctx.basis, phi1, phi2),
            rank_one(ctx.basis, psi2, psi1),
            ctx.grid,
        )
        lhs = fn.integrate_r()
        rhs = ctx.basis.inner(phi1, phi2) * np.conj(
            ctx.basis.inner(dinv * psi1, dinv * psi2)
        )
        rel = abs(lhs - rhs) / abs(rhs)
        worst = max(worst, rel)
        rows.append(
            {
                "pair": i,
                "lhs_re": lhs.real,
                "lhs_im": lhs.imag,
                "rhs_re": rhs.real,
                "rhs_im": rhs.imag,
                "rel_err": rel,
            }
        )
    return rows, worst, bool(worst <= tol)


# ---------------------------------------------------------------------------
# admissibility


def run_admissibility(cfg=None):
    """Admissibility reports for a small operator battery plus the
    integral-route cross-check ``(1/tr T)·∫ T⋆S dμ_r = tr(D⁻¹SD⁻¹)``."""
    cfg = merged(cfg)
    ctx = build_context(cfg)
    default_tol = "2e-2" if ctx.backend == "affine" else "1e-9"
    tol = get_float(cfg, "admissibility.tolerance", default_tol, exclusive_min=0.0)
    rng = np.random.default_rng(ctx.seed)
    basis = ctx.basis
    v1 = battery_vector(basis, (8, 7, 0.0), rng)
    v2 = battery_vector(basis, (12, 9, 0.4), rng)
    density = make_density_operator(basis, [v1, v2], [0.7, 0.3])
    battery = [("density-mixture", density.operator)]
    battery.append(("rank-one-interior", rank_one(basis, v1, v2)))
    if basis.backend == "affine":
        idx = np.arange(basis.size)
        edge = np.exp(-idx / 6.0) / np.sqrt(basis.omegas)
        edge = (edge / basis.norm(edge)).astype(complex)
        battery.append(("edge-concentrated", rank_one(basis, edge, edge)))
    rows = []
    for name, op in battery:
        rep = admissibility_report(op)
        rows.append(
            {
                "operator": name,
                "constant": rep.constant,
                "trace_norm": rep.trace_norm_dsd,
                "half_ratio": rep.half_ratio,
                "edge_share": rep.edge_share,
                "converged": rep.converged,
            }
        )
    # integral route on the density operator
    probe = rank_one(basis, battery_vector(basis, (10, 6, -0.2), rng),
                     battery_vector(basis, (10, 6, -0.2), rng))
    fn = op_op_convolve(probe, density.operator, ctx.grid)
    route = (fn.integrate_r() / probe.trace()).real
    rel = abs(route - 1.0)
    rows.append(
        {
            "operator": "integral-route",
            "constant": route,
            "trace_norm": 1.0,
            "half_ratio": 0.0,
            "edge_share": 0.0,
            "converged": rel <= tol,
        }
    )
    edge_ok = all(
        r["converged"] != (r["operator"] == "edge-concentrated") for r in rows
    )
    return rows, rel, bool(rel <= tol and edge_ok)


# ---------------------------------------------------------------------------
# Cohen map export


def run_cohen_map(cfg=None):
    """Scalogram/spectrogram map of a configured vector pair, plus the
    total-energy identity ``Σ w_r Q_S(ψ) = ‖ψ‖²·tr(D⁻¹SD⁻¹)``."""
    cfg = merged(cfg)
    ctx = build_context(cfg)
    default_tol = "2e-2" if ctx.backend == "affine" else "1e-10"
    tol = get_float(cfg, "cohen.tolerance", default_tol, exclusive_min=0.0)
    rng = np.random.default_rng(ctx.seed)
    if ctx.backend == "affine":
        sig_spec = (
            get_float(cfg, "cohen.signal_offset", "10"),
            get_float(cfg, "cohen.signal_width", "7", exclusive_min=0.0),
            get_float(cfg, "cohen.signal_shift", "0"),
        )
        win_spec = (
            get_float(cfg, "cohen.window_offset", "8"),
            get_float(cfg, "cohen.window_width", "6", exclusive_min=0.0),
            0.0,
        )
    else:
        sig_spec = win_spec = None
    psi = battery_vector(ctx.basis, sig_spec, rng)
    xi = battery_vector(ctx.basis, win_spec, rng)
    cmap = scalogram(ctx.basis, xi, psi, ctx.grid)
    kernel = rank_one(ctx.basis, xi, xi)
    energy = cmap.integrate_r().real
    expect = (
        ctx.basis.norm(psi) ** 2 * apply_duflo_inv(kernel).trace().real
    )
    rel = abs(energy - expect) / abs(expect)
    return cmap, energy, expect, bool(rel <= tol)


# ---------------------------------------------------------------------------
# wavelet-window Moyal identities


def _window_operator(basis, specs, coeffs, rng):
    mat = sum(
        c * rank_one(basis, battery_vector(basis, a, rng),
                     battery_vector(basis, b, rng)).matrix
        for c, (a, b) in zip(coeffs, specs)
    )
    from .operators import OperatorRep

    return OperatorRep(basis, mat)


def run_wavelet_moyal(cfg=None):
    """Moyal identities for the operator-window transforms.

    Vector version: ``Σ w ⟨S₁σψ₁, S₂σψ₂⟩ = ⟨ψ₁,ψ₂⟩·⟨S₁D⁻¹, S₂D⁻¹⟩_HS``;
    operator version with ``(T, R)`` Hilbert-Schmidt arguments.
    """
    cfg = merged(cfg)
    ctx = build_context(cfg)
    default_tol = "2e-2" if ctx.backend == "affine" else "1e-9"
    tol = get_float(cfg, "wavelet.tolerance", default_tol, exclusive_min=0.0)
    rng = np.random.default_rng(ctx.seed)
    basis = ctx.basis
    s1 = _window_operator(
        basis,
        [((8, 6, 0.0), (10, 7, 0.1)), ((12, 7, -0.2), (9, 8, 0.0))],
        [1.0, 0.5],
        rng,
    )
    s2 = _window_operator(
        basis,
        [((9, 7, 0.2), (11, 6, 0.0)), ((7, 8, 0.0), (12, 6, -0.3))],
        [0.8, 0.4],
        rng,
    )
    psi1 = battery_vector(basis, (11, 7, 0.0), rng)
    psi2 = battery_vector(basis, (9, 8, 0.25), rng)
    t_op = _window_operator(
        basis,
        [((10, 7, 0.0), (8, 6, 0.3)), ((13, 5, -0.1), (11, 9, 0.0))],
        [0.9, 0.6],
        rng,
    )
    r_op = _window_operator(
        basis,
        [((9, 6, 0.1), (12, 8, 0.0)), ((7, 7, 0.4), (10, 5, 0.0))],
        [1.1, 0.3],
        rng,
    )
    rows = []
    worst = 0.0
    # vector-argument identity
    fn = op_op_convolve(
        rank_one(basis, psi1, psi2), s2.adjoint() @ s1, ctx.grid
    )
    lhs = fn.integrate_r()
    rhs = ctx.basis.inner(psi1, psi2) * window_pairing_constant(s1, s2)
    rel = abs(lhs - rhs) / abs(rhs)
    worst = max(worst, rel)
    rows.append(
        {
            "identity": "vector",
            "lhs_re": lhs.real,
            "lhs_im": lhs.imag,
            "rhs_re": rhs.real,
            "rhs_im": rhs.imag,
            "rel_err": rel,
        }
    )
    # operator-argument identity
    fn = op_op_convolve(t_op @ r_op.adjoint(), s2.adjoint() @ s1, ctx.grid)
    lhs = fn.integrate_r()
    rhs = hs_inner(t_op, r_op) * window_pairing_constant(s1, s2)
    rel = abs(lhs - rhs) / abs(rhs)
    worst = max(worst, rel)
    rows.append(
        {
            "identity": "operator",
            "lhs_re": lhs.real,
            "lhs_im": lhs.imag,
            "rhs_re": rhs.real,
            "rhs_im": rhs.imag,
            "rel_err": rel,
        }
    )
    return rows, worst, bool(worst <= tol)


# ---------------------------------------------------------------------------
# Berezin-Lieb batteries


def _phi_square(t):
    return t * t


def _phi_hinge(t):
    return max(t - 0.5, 0.0)


PHI_CHOICES = {"square": _phi_square, "hinge": _phi_hinge}


def random_positive_admissible(basis, rng, terms=2):
    """Random positive admissible mixture (density-normalized)."""
    specs = [
        (int(rng.integers(6, 14)), float(rng.uniform(5, 9)),
         float(rng.uniform(-0.4, 0.4)))
        for _ in range(terms)
    ]
    vectors = [battery_vector(basis, s, rng) for s in specs]
    weights = [float(rng.uniform(0.3, 1.0)) for _ in range(terms)]
    return make_density_operator(basis, vectors, weights).operator


def random_positive_trace_class(basis, rng, terms=2):
    mat = 0
    for _ in range(terms):
        spec = (int(rng.integers(6, 14)), float(rng.uniform(5, 9)),
                float(rng.uniform(-0.4, 0.4)))
        v = battery_vector(basis, spec, rng)
        mat = mat + float(rng.uniform(0.3, 1.0)) * rank_one(basis, v, v).matrix
    from .operators import OperatorRep

    return OperatorRep(basis, mat)


def random_nonneg_function(grid, rng):
    """Smooth nonnegative test mask over the grid."""
    if hasattr(grid, "lams"):
        lam = np.repeat(grid.lams, grid.n_x)
        x = np.tile(grid.xs, grid.n_lam)
        x0 = rng.uniform(-0.5, 0.5)
        l0 = rng.uniform(-0.3, 0.3)
        vals = np.exp(-((x - x0) ** 2) / 0.8 - ((lam - l0) ** 2) / 0.5)
    else:
        coords = grid.node_coords()
        n = grid.group.order
        j0, k0 = rng.integers(0, n, size=2)
        dj = np.minimum((coords[:, 0] - j0) % n, (j0 - coords[:, 0]) % n)
        dk = np.minimum((coords[:, 1] - k0) % n, (k0 - coords[:, 1]) % n)
        vals = np.exp(-(dj**2 + dk**2) / (0.15 * n * n))
    return GroupFunction(grid, vals.astype(complex))


def run_berezin_lieb(cfg=None):
    """Both Jensen-type trace inequalities on random instances."""
    cfg = merged(cfg)
    ctx = build_context(cfg)
    count = get_int(cfg, "berezin.count", "8", minimum=1, maximum=64)
    slack = get_float(cfg, "berezin.slack", "1e-8", exclusive_min=0.0)
    rng = np.random.default_rng(ctx.seed)
    rows = []
    all_hold = True
    for i in range(count):
        phi_name = "square" if i % 2 == 0 else "hinge"
        phi = PHI_CHOICES[phi_name]
        s_op = random_positive_admissible(ctx.basis, rng)
        t_op = random_positive_trace_class(ctx.basis, rng)
        rep_op = berezin_lieb_operator_side(t_op, s_op, phi, ctx.grid, slack)
        f = random_nonneg_function(ctx.grid, rng)
        rep_fn = berezin_lieb_function_side(f, s_op, phi, ctx.grid, slack)
        all_hold = all_hold and rep_op.holds and rep_fn.holds
        rows.append(
            {
                "instance": i,
                "phi": phi_name,
                "side": "operator",
                "lhs": rep_op.lhs,
                "rhs": rep_op.rhs,
                "holds": rep_op.holds,
            }
        )
        rows.append(
            {
                "instance": i,
                "phi": phi_name,
                "side": "function",
                "lhs": rep_fn.lhs,
                "rhs": rep_fn.rhs,
                "holds": rep_fn.holds,
            }
        )
    return rows, bool(all_hold)


# ---------------------------------------------------------------------------
# localization scaling

SCALING_DEFAULTS = {
    "basis.n": "1024",
    "basis.omega_min": str(2.0**-6),
    "basis.delta": str(LN2 / 32),
    "loc.x_min": "0",
    "loc.x_max": "1",
    "loc.a_min": "1",
    "loc.a_max": str(math.e),
    "loc.delta": "0.5",
    "loc.r_list": "1 2 4 8",
    "loc.base_resolution": "128",
    "loc.cap": "512",
    "loc.margin": "2.0",
    "loc.final_ratio_tol": "0.2",
    "loc.centers": "224 208",
    "loc.widths": "16 22",
    "loc.weights": "0.7 0.3",
}


def scaling_density(cfg, basis):
    centers = get_floats(cfg, "loc.centers")
    widths = get_floats(cfg, "loc.widths")
    weights = get_floats(cfg, "loc.weights")
    if not (len(centers) == len(widths) == len(weights)):
        raise ConfigError("loc.centers", "centers/widths/weights lengths differ")
    vectors = [
        log_gaussian(basis, int(c), w) for c, w in zip(centers, widths)
    ]
    return make_density_operator(basis, vectors, weights)


def run_localization_scaling(cfg=None):
    """Eigenvalue-counting scaling experiment over the configured R list."""
    cfg = merged(cfg, SCALING_DEFAULTS)
    if get_choice(cfg, "backend", ("affine", "cyclic")) != "affine":
        raise ConfigError("backend", "localization scaling is affine-only")
    n = get_int(cfg, "basis.n", minimum=4, maximum=4096)
    omega_min = get_float(cfg, "basis.omega_min", exclusive_min=0.0)
    delta_step = get_float(cfg, "basis.delta", exclusive_min=0.0)
    basis = FrequencyBasis(n, omega_min, delta_step)
    delta = get_float(cfg, "loc.delta")
    if not 0.0 < delta < 1.0:
        raise ConfigError("loc.delta", f"must lie in (0, 1), got {delta}")
    box = AffineBox(
        get_float(cfg, "loc.x_min"),
        get_float(cfg, "loc.x_max"),
        get_float(cfg, "loc.a_min", exclusive_min=0.0),
        get_float(cfg, "loc.a_max", exclusive_min=0.0),
    )
    r_list = get_floats(cfg, "loc.r_list")
    density = scaling_density(cfg, basis)
    reports = scaling_experiment(
        density.operator,
        box,
        delta,
        r_list,
        base_resolution=get_int(cfg, "loc.base_resolution", minimum=8),
        cap=get_int(cfg, "loc.cap", minimum=16),
        margin=get_float(cfg, "loc.margin", minimum=0.5),
        workers=get_int(cfg, "workers", "1", minimum=1, maximum=64),
    )
    final_tol = get_float(cfg, "loc.final_ratio_tol", exclusive_min=0.0)
    lemma_ok = all(r.deviation <= r.lemma_bound + 1e-6 for r in reports)
    final_ok = abs(reports[-1].ratio - 1.0) <= final_tol
    return reports, bool(lemma_ok), bool(final_ok)
