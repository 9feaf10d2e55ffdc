"""Function-operator and operator-operator convolutions; admissibility.

The two central operations are

* ``func_op_convolve(f, S) = Σ_nodes w_r f(g) σ(g)* S σ(g)`` -- an operator,
* ``op_op_convolve(T, S, grid)(g) = tr(T σ(g)* S σ(g))`` -- a function,

both over a right-Haar grid.  On the affine backend the conjugation
``σ(g)* S σ(g)`` is a diagonal phase followed by an index shift, so the sum
over a grid row at fixed dilation collapses into one dense product with a
phase Gram matrix; rows are then accumulated by shifted adds in a fixed
order, which keeps results byte-stable across worker counts.

Admissibility of an operator is judged through ``D⁻¹ S D⁻¹``: its trace is
the admissibility constant, and a truncation probe flags constants whose
value hinges on the basis edges (the finite model cannot otherwise witness
a divergence under refinement).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import AffineGrid, BackendMismatch, CyclicGrid, GroupFunction
from .operators import OperatorRep, rank_one
from .representation import apply_duflo, apply_duflo_inv, duflo_moore

__all__ = [
    "func_op_convolve",
    "op_op_convolve",
    "op_op_at",
    "AdmissibilityReport",
    "admissibility_report",
    "DensityOperator",
    "make_density_operator",
    "quantize",
]


def _check_pair(grid, basis):
    if isinstance(grid, AffineGrid):
        if basis.backend != "affine":
            raise BackendMismatch("affine grid with non-affine basis")
        if grid.group.lattice_step != basis.lattice_step:
            raise BackendMismatch("grid and basis use different lattices")
    else:
        if basis.backend != "cyclic" or grid.group.order != basis.size:
            raise BackendMismatch("cyclic grid and basis orders differ")


def _phase_gram(basis, xs):
    """``U[p, i] = e^{2πi ω_p x_i}``."""
    return np.exp(2j * np.pi * np.outer(basis.omegas, xs))


def _shift_add(out, block, m):
    n = out.shape[0]
    if m >= n or m <= -n:
        return
    if m >= 0:
        out[m:, m:] += block[: n - m, : n - m]
    else:
        out[:m, :m] += block[-m:, -m:]


def func_op_convolve(f, S):
    """Operator-valued convolution ``f ⋆ S = Σ w_r f(g) α_g(S)``.

    Satisfies ``tr(f ⋆ S) = tr(S)·Σ w_r f`` exactly up to truncation
    clipping, preserves positivity for ``f ≥ 0``, and obeys the trace-norm
    bound ``‖f ⋆ S‖₁ ≤ ‖f‖_{L¹_r} ‖S‖₁``.
    """
    grid = f.grid
    basis = S.basis
    _check_pair(grid, basis)
    n = basis.size

    if isinstance(grid, AffineGrid):
        fv = f.values.reshape(grid.n_lam, grid.n_x)
        u = _phase_gram(basis, grid.xs)
        out = np.zeros((n, n), dtype=complex)
        for i, m in enumerate(grid.lattice_indices):
            c = grid.weight * fv[i]
            if not c.any():
                continue
            gram = (u * c[None, :]) @ u.conj().T
            _shift_add(out, S.matrix * gram, int(m))
        return OperatorRep(basis, out)

    fv = f.values.reshape(len(grid.ks), len(grid.js))
    dgrid = np.arange(n)
    mod_phase = np.exp(2j * np.pi * np.outer(grid.ks, dgrid) / n)
    diff = (dgrid[None, :] - dgrid[:, None]) % n  # (u - t) mod n as [t, u]
    out = np.zeros((n, n), dtype=complex)
    for ij, j in enumerate(grid.js):
        col = fv[:, ij]
        if not col.any():
            continue
        c = col @ mod_phase  # c[d] = Σ_k f(j,k) e^{2πi k d / n}
        rolled = np.roll(S.matrix, (-j, -j), axis=(0, 1))
        out += rolled * c[diff]
    return OperatorRep(basis, out)


def _paired_block(t_mat, s_mat, m):
    """``A[p, q] = T[q+m, p+m]·S[p, q]`` with zero fill outside the range."""
    n = t_mat.shape[0]
    a = np.zeros_like(s_mat)
    if m >= n or m <= -n:
        return a
    tt = t_mat.T
    if m >= 0:
        a[: n - m, : n - m] = s_mat[: n - m, : n - m] * tt[m:, m:]
    else:
        a[-m:, -m:] = s_mat[-m:, -m:] * tt[: n + m, : n + m]
    return a


def op_op_convolve(T, S, grid):
    """Scalar-valued convolution ``(T ⋆ S)(g) = tr(T σ(g)* S σ(g))``."""
    basis = S.basis
    T._check(S)
    _check_pair(grid, basis)
    n = basis.size

    if isinstance(grid, AffineGrid):
        u = _phase_gram(basis, grid.xs)
        uc = u.conj()
        vals = np.empty((grid.n_lam, grid.n_x), dtype=complex)
        for i, m in enumerate(grid.lattice_indices):
            a = _paired_block(T.matrix, S.matrix, int(m))
            vals[i] = np.einsum("px,px->x", u, a @ uc)
        return GroupFunction(grid, vals.ravel())

    dgrid = np.arange(n)
    vals = np.empty((len(grid.ks), len(grid.js)), dtype=complex)
    mod_phase = np.exp(2j * np.pi * np.outer(dgrid, grid.ks) / n)
    for ij, j in enumerate(grid.js):
        # B[t, u] = T[t, u] · S[u+j, t+j];  G[d] = Σ_{t-u ≡ d} B[t, u]
        rolled = np.roll(S.matrix, (-j, -j), axis=(0, 1))
        b = T.matrix * rolled.T
        g = np.zeros(n, dtype=complex)
        for d in range(n):
            g[d] = np.sum(b[(dgrid + d) % n, dgrid])
        vals[:, ij] = g @ mod_phase
    return GroupFunction(grid, vals.ravel())


def op_op_at(T, S, points):
    """``(T ⋆ S)`` evaluated at arbitrary group points (dilations on lattice)."""
    basis = S.basis
    T._check(S)
    out = np.empty(len(points), dtype=complex)
    if basis.backend == "affine":
        from .groups import AffineGroup

        group = AffineGroup(basis.lattice_step)
        ms = np.array([group.lattice_index(a) for _, a in points])
        for m in np.unique(ms):
            a_blk = _paired_block(T.matrix, S.matrix, int(m))
            for idx in np.nonzero(ms == m)[0]:
                x = points[idx][0]
                u = np.exp(2j * np.pi * basis.omegas * x)
                out[idx] = u @ (a_blk @ u.conj())
        return out
    from .representation import conjugate

    for idx, pt in enumerate(points):
        out[idx] = np.trace(T.matrix @ conjugate(S, pt).matrix)
    return out


# ---------------------------------------------------------------------------
# admissibility


@dataclass
class AdmissibilityReport:
    """Admissibility data of an operator.

    ``constant = tr(D⁻¹SD⁻¹)`` is the admissibility constant (equal to the
    trace norm for positive operators).  ``converged`` is a truncation
    probe: it is cleared when the trace norm fails to stabilize between the
    half-size and full basis, or when more than 5% of it sits on the lowest
    tenth of the frequency lattice, where a genuine ``ω → 0`` divergence
    would pile up.
    """

    constant: float
    trace_norm_dsd: float
    converged: bool
    half_ratio: float
    edge_share: float


def _trace_norm(mat):
    return float(np.sum(np.linalg.svd(mat, compute_uv=False)))


def admissibility_report(S):
    dsd = apply_duflo_inv(S)
    constant = dsd.trace().real
    mo = dsd.to_ortho()
    tn = _trace_norm(mo)
    if S.basis.backend == "cyclic":
        return AdmissibilityReport(constant, tn, True, 1.0, 0.0)
    n = S.basis.size
    tn_half = _trace_norm(mo[: n // 2, : n // 2])
    b = max(1, n // 10)
    tn_trim = _trace_norm(mo[b:, b:])
    half_ratio = tn / max(tn_half, 1e-300)
    edge_share = 1.0 - tn_trim / max(tn, 1e-300)
    converged = bool(half_ratio <= 1.05 and edge_share <= 0.05)
    return AdmissibilityReport(constant, tn, converged, half_ratio, edge_share)


@dataclass
class DensityOperator:
    """Positive trace-class operator normalized to ``tr(D⁻¹SD⁻¹) = 1``."""

    operator: OperatorRep
    scale: float
    trace: float


def make_density_operator(basis, vectors, weights):
    """Mixture ``S = c·Σ s_n ξ_n⊗ξ_n`` with ``c`` fixing ``tr(D⁻¹SD⁻¹) = 1``.

    Weights must be nonnegative with at least one strictly positive.
    """
    weights = [float(s) for s in weights]
    if len(vectors) != len(weights) or not vectors:
        raise ValueError("need matching, nonempty vectors and weights")
    if any(s < 0 for s in weights):
        raise ValueError("mixture weights must be nonnegative")
    if all(s == 0 for s in weights):
        raise ValueError("all mixture weights are zero")
    dinv = duflo_moore(basis).diag_inv
    denom = sum(
        s * basis.norm(dinv * np.asarray(v, dtype=complex)) ** 2
        for s, v in zip(weights, vectors)
        if s > 0
    )
    scale = 1.0 / denom
    mat = np.zeros((basis.size, basis.size), dtype=complex)
    for s, v in zip(weights, vectors):
        if s > 0:
            mat += (scale * s) * rank_one(basis, v, v).matrix
    op = OperatorRep(basis, mat)
    return DensityOperator(op, scale, op.trace().real)


def quantize(f, T):
    """Covariant quantization ``f ↦ f ⋆ (D T D)``.

    With ``f ≡ 1`` this resolves the identity: exactly ``tr(T)·I`` on the
    cyclic backend, and in the weak sense on interior vectors for the
    affine one.
    """
    return func_op_convolve(f, apply_duflo(T))
