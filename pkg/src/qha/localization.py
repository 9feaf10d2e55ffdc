"""Mixed-state localization operators, eigenvalue counting, Berezin-Lieb.

A localization operator is the convolution ``χ_Ω ⋆ S`` of a box indicator
with a density operator ``S`` (positive, ``tr(D⁻¹SD⁻¹) = 1``).  Its
eigenvalues lie in ``[0, 1]``, sum to ``tr(χ_Ω ⋆ S)``, and the number of
them above ``1 − δ`` deviates from the trace by at most
``max{1/δ, 1/(1−δ)}·|tr((χ_Ω⋆S)²) − tr(χ_Ω⋆S)|``; under the affine
dilation ``Γ_R`` the count divided by ``tr(S)·μ_r(RΩ)`` tends to one.

The counting bound is evaluated from the spectrum itself (trace and
second moment are the first two power sums), which keeps it an exact
algebraic inequality of the discretized model; the independently
quadratured second moment of the sampled autocorrelation function is
exposed separately for cross-checking.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .cohen import cohen_map
from .convolution import (
    admissibility_report,
    func_op_convolve,
    op_op_at,
    op_op_convolve,
)
from .groups import (
    AffineBox,
    AffineGrid,
    BackendMismatch,
    CyclicGrid,
    GroupFunction,
    build_grid,
    indicator,
    right_haar_measure,
    scale_box,
)
from .operators import (
    OperatorRep,
    min_eigenvalue,
    operator_norm,
    spectral_decomposition,
)

__all__ = [
    "localization_operator",
    "s_tilde",
    "second_moment",
    "operator_second_moment",
    "LocalizationReport",
    "scaling_experiment",
    "approximate_identity_probe",
    "BerezinLiebReport",
    "berezin_lieb_operator_side",
    "berezin_lieb_function_side",
    "MinimaxReport",
    "minimax_check",
    "check_density",
]


def _box_inside_grid(box, grid):
    win = grid.window
    if isinstance(grid, AffineGrid):
        return (
            box.x_min >= win.x_min - 1e-12
            and box.x_max <= win.x_max + 1e-12
            and box.lam_min >= win.lam_min - 1e-12
            and box.lam_max <= win.lam_max + 1e-12
        )
    return (
        box.j_min >= win.j_min
        and box.j_max <= win.j_max
        and box.k_min >= win.k_min
        and box.k_max <= win.k_max
    )


def localization_operator(box, S, grid):
    """Assemble ``χ_Ω ⋆ S`` for a coordinate box inside the grid window.

    A box outside the grid window is an error (the quadrature would
    silently truncate it).  On the affine backend the row structure of the
    indicator collapses the x-sums into one closed-form phase Gram matrix
    shared by all dilation rows, which is what makes large scaled boxes
    affordable.
    """
    if not _box_inside_grid(box, grid):
        raise ValueError("localization box exceeds the grid window")
    basis = S.basis
    if isinstance(grid, CyclicGrid):
        return func_op_convolve(indicator(box, grid), S)

    in_x = np.nonzero((grid.xs >= box.x_min) & (grid.xs <= box.x_max))[0]
    lams = grid.lams
    in_l = np.nonzero(
        (lams >= box.lam_min - 1e-12) & (lams <= box.lam_max + 1e-12)
    )[0]
    n = basis.size
    out = np.zeros((n, n), dtype=complex)
    if len(in_x) == 0 or len(in_l) == 0:
        return OperatorRep(basis, out)
    gram = _kernels.box_phase_matrix(
        basis.omegas, grid.xs[in_x[0]], grid.h_x, len(in_x)
    )
    block = S.matrix * gram * grid.lam_step
    from .convolution import _shift_add

    for m in grid.lattice_indices[in_l]:
        _shift_add(out, block, int(m))
    return OperatorRep(basis, out)


def check_density(S, tol=1e-8):
    """Verify positivity and ``tr(D⁻¹SD⁻¹) = 1`` within ``tol``."""
    if min_eigenvalue(S) < -tol * max(operator_norm(S), 1e-300):
        raise ValueError("density operator must be positive")
    const = admissibility_report(S).constant
    if abs(const - 1.0) > tol:
        raise ValueError(
            f"density operator needs tr(D^-1 S D^-1) = 1, got {const!r}"
        )


def s_tilde(S, grid, pos_tol=1e-10):
    """Autocorrelation function ``S̃ = S ⋆ S`` of a positive operator.

    Nonnegative, with ``S̃(identity) = Σ λ_n²``; for a density operator its
    total right/left Haar integral is ``tr(S)`` / ``tr(S)`` respectively in
    the continuum (up to truncation here).
    """
    if min_eigenvalue(S) < -pos_tol * max(operator_norm(S), 1e-300):
        raise ValueError("s_tilde needs a positive operator")
    vals = op_op_convolve(S, S, grid).values.real
    return GroupFunction(grid, vals.astype(complex))


def operator_second_moment(loc):
    """``tr(M²)`` of an assembled localization operator (spectral side)."""
    return float(np.sum(loc.matrix * loc.matrix.T).real)


def second_moment(box, S, grid, stilde=None):
    """Double quadrature ``∫_Ω ∫_Ω S̃(x y⁻¹) dμ_r dμ_r`` of the *sampled* S̃.

    Uses the grid-sampled autocorrelation with the same linear-in-x
    interpolation rule as the function convolution (cyclic lattice
    differences are exact).  Cross-check target: ``tr((χ_Ω ⋆ S)²)``.
    """
    if not _box_inside_grid(box, grid):
        raise ValueError("localization box exceeds the grid window")
    if stilde is None:
        stilde = s_tilde(S, grid)
    if isinstance(grid, CyclicGrid):
        if not grid.is_full:
            raise ValueError("cyclic second moment needs the full lattice")
        n = grid.group.order
        st = stilde.values.real.reshape(n, n)  # [k, j]
        js = np.arange(box.j_min, box.j_max + 1)
        ks = np.arange(box.k_min, box.k_max + 1)
        dj = (js[:, None] - js[None, :]) % n
        dk = (ks[:, None] - ks[None, :]) % n
        return float(np.sum(st[dk.ravel()[:, None], dj.ravel()[None, :]]))

    st = stilde.values.real.reshape(grid.n_lam, grid.n_x)
    in_x = np.nonzero((grid.xs >= box.x_min) & (grid.xs <= box.x_max))[0]
    lams = grid.lams
    in_l = np.nonzero(
        (lams >= box.lam_min - 1e-12) & (lams <= box.lam_max + 1e-12)
    )[0]
    if len(in_x) == 0 or len(in_l) == 0:
        return 0.0
    m0 = int(round(lams[0] / grid.lam_step))
    return _kernels.stilde_double_quad(
        st,
        grid.xs,
        grid.h_x,
        grid.lam_step,
        m0,
        int(in_l[0]),
        int(in_l[-1]),
        int(in_x[0]),
        int(in_x[-1]),
        grid.weight,
    )


# ---------------------------------------------------------------------------
# eigenvalue counting under dilation


@dataclass
class LocalizationReport:
    """Spectral counting data for one scaled region.

    ``mu_r`` is the closed-form measure of the scaled box, ``mu_r_quad``
    the grid quadrature of its indicator; ``trace`` and
    ``second_moment_spectral`` are the first two power sums of the
    spectrum, so ``deviation = |count_above − trace|`` obeys
    ``deviation ≤ lemma_bound`` exactly up to eigensolver rounding.
    ``ratio = count_above / (tr(S)·μ_r(RΩ))`` is the quantity that tends
    to one under dilation.
    """

    box: AffineBox
    R: float
    delta: float
    eigenvalues: np.ndarray
    mu_r: float
    mu_r_quad: float
    trace: float
    second_moment_spectral: float
    count_above: int
    nonzero_count: int
    ratio: float
    lemma_bound: float
    deviation: float


def _one_scaling_report(S, box, delta, R, base_resolution, cap, margin,
                        max_x_spacing, max_stride):
    from .groups import AffineGroup

    grp = AffineGroup(S.basis.lattice_step)
    scaled = scale_box(R, box)
    window = AffineBox(
        scaled.x_min - margin,
        scaled.x_max + margin,
        scaled.a_min * math.exp(-margin),
        scaled.a_max * math.exp(margin),
    )
    n_req = int(min(cap, base_resolution * R))
    grid = build_grid(window, n_req, grp)
    stride = int(round(grid.lam_step / grp.lattice_step))
    if grid.h_x > max_x_spacing or stride > max_stride:
        raise ValueError(
            f"scaled region at R={R} exceeds the resolution cap {cap} "
            f"(x spacing {grid.h_x:.4g}, dilation stride {stride})"
        )
    loc = localization_operator(scaled, S, grid)
    spec = spectral_decomposition(loc)
    ev = spec.eigenvalues
    trace = float(np.sum(ev))
    second = float(np.sum(ev**2))
    mu = right_haar_measure(scaled, grp)
    mu_quad = grid.weight * float(np.count_nonzero(grid.membership(scaled)))
    count = int(np.sum(ev > 1.0 - delta))
    nonzero = int(np.sum(ev > 1e-12))
    tr_s = S.trace().real
    bound = max(1.0 / delta, 1.0 / (1.0 - delta)) * abs(second - trace)
    return LocalizationReport(
        box=scaled,
        R=R,
        delta=delta,
        eigenvalues=ev,
        mu_r=mu,
        mu_r_quad=mu_quad,
        trace=trace,
        second_moment_spectral=second,
        count_above=count,
        nonzero_count=nonzero,
        ratio=count / (tr_s * mu),
        lemma_bound=bound,
        deviation=abs(count - trace),
    )


def scaling_experiment(
    S,
    box,
    delta,
    R_list,
    *,
    base_resolution=128,
    cap=512,
    margin=2.0,
    max_x_spacing=0.125,
    max_stride=2,
    workers=1,
):
    """Per-dilation localization reports for ``R ∈ R_list``.

    ``S`` must pass the density check; the grid is re-built per ``R`` so
    the scaled box keeps a ``margin`` (in the right-invariant metric) of
    interior, with resolution growing ∝ R up to the hard ``cap``.
    Reports come back in ``R_list`` order regardless of ``workers``.
    """
    if not isinstance(box, AffineBox):
        raise BackendMismatch("scaling_experiment runs on the affine backend")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    check_density(S)
    args = [
        (S, box, delta, R, base_resolution, cap, margin, max_x_spacing,
         max_stride)
        for R in R_list
    ]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda a: _one_scaling_report(*a), args))
    return [_one_scaling_report(*a) for a in args]


def approximate_identity_probe(S, box, point, R_list, resolution=64):
    """Kernel-mass probe ``R²·∫_Ω φ(Γ_R(g)·Γ_R(p)⁻¹) dμ_r(g)`` with
    ``φ = S̃/tr(S)``; tends to 1 for ``p`` interior to Ω.

    ``R_list`` must be integers so the composed dilations stay on the
    lattice; the probe evaluates S̃ directly at the composed points (no
    interpolation).
    """
    from .groups import AffineGroup

    grp = AffineGroup(S.basis.lattice_step)
    grid = build_grid(box, resolution, grp)
    y, b = point
    # the reference point's dilation is snapped to the lattice
    mb = round(math.log(b) / grp.lattice_step)
    tr_s = S.trace().real
    out = []
    xs = np.tile(grid.xs, grid.n_lam)
    mlat = np.repeat(grid.lattice_indices, grid.n_x)
    for R in R_list:
        if int(R) != R:
            raise ValueError("approximate-identity probe needs integer R")
        R = int(R)
        dm = R * (mlat - mb)
        c = np.exp(dm * S.basis.lattice_step)
        pts = [
            (R * x - R * y * cc, float(np.exp(m * S.basis.lattice_step)))
            for x, cc, m in zip(xs, c, dm)
        ]
        vals = op_op_at(S, S, pts).real / tr_s
        out.append(R * R * grid.weight * float(np.sum(vals)))
    return out


# ---------------------------------------------------------------------------
# Berezin-Lieb inequalities


@dataclass
class BerezinLiebReport:
    lhs: float
    rhs: float
    holds: bool


def berezin_lieb_operator_side(T, S, phi, grid, slack=1e-8):
    """Jensen-type bound ``∫ Φ∘(T⋆S) dμ_r ≤ tr(Φ(tr(S)·T))·tr(D⁻¹SD⁻¹)/tr(S)``.

    ``T`` positive trace-class, ``S`` positive admissible, ``Φ`` nonnegative
    convex with ``Φ(0) = 0`` (the last makes the discretized inequality
    exact under truncation).
    """
    from .operators import functional_calculus

    vals = op_op_convolve(T, S, grid).values.real
    lhs = grid.weight * float(np.sum([phi(v) for v in vals]))
    tr_s = S.trace().real
    const = admissibility_report(S).constant
    rhs = functional_calculus(tr_s * T, phi).trace().real * const / tr_s
    return BerezinLiebReport(lhs, rhs, bool(lhs <= rhs + slack * abs(rhs)))


def berezin_lieb_function_side(f, S, phi, grid, slack=1e-8):
    """Jensen-type bound ``tr(Φ(f⋆S)) ≤ (tr S / c)·∫ Φ(c·f) dμ_r``,
    ``c = tr(D⁻¹SD⁻¹)``; ``f`` bounded nonnegative, ``S`` positive
    admissible, ``Φ`` nonnegative convex with ``Φ(0) = 0``.
    """
    fos = func_op_convolve(f, S)
    spec = spectral_decomposition(fos)
    lhs = float(np.sum([phi(lam) for lam in spec.eigenvalues]))
    tr_s = S.trace().real
    const = admissibility_report(S).constant
    fv = f.values.real
    rhs = (tr_s / const) * grid.weight * float(
        np.sum([phi(const * v) for v in fv])
    )
    return BerezinLiebReport(lhs, rhs, bool(lhs <= rhs + slack * abs(rhs)))


# ---------------------------------------------------------------------------
# minimax probe


@dataclass
class MinimaxReport:
    top_eigenvalue: float
    best_probe: float
    identity_gap: float


def minimax_check(f, S, grid, n_probes=64, spread=0.15, seed=0):
    """Rayleigh-quotient probe of the top eigenvalue of ``f ⋆ S``.

    The quadratic form satisfies ``⟨(f⋆S)ψ, ψ⟩ = Σ w_r f·Q_S(ψ)`` exactly
    (same quadrature on both sides); probes are unit perturbations of the
    top eigenvector plus fully random vectors, so the best probe matches
    the top eigenvalue from below and never exceeds it.
    """
    loc = func_op_convolve(f, S)
    spec = spectral_decomposition(loc)
    top = float(spec.eigenvalues[0])
    h1 = spec.eigenvectors[:, 0]
    basis = S.basis
    rng = np.random.default_rng(seed)
    probes = [h1]
    for _ in range(n_probes - 1):
        noise = rng.standard_normal(basis.size) + 1j * rng.standard_normal(
            basis.size
        )
        if len(probes) % 4 == 0:
            cand = noise  # occasional fully random probe
        else:
            cand = h1 + spread * noise / basis.norm(noise)
        probes.append(cand / basis.norm(cand))
    best = -math.inf
    gap = 0.0
    fv = f.values.real
    for psi in probes:
        q = cohen_map(S, psi, psi, grid)
        val = grid.weight * float(np.sum(fv * q.values.real))
        direct = basis.inner(loc.apply(psi), psi).real
        gap = max(gap, abs(val - direct))
        best = max(best, val)
    return MinimaxReport(top, best, gap)
