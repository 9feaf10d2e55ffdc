"""Cohen-class quadratic distributions built from an operator kernel.

``cohen_map(S, ψ, φ, grid)`` samples ``Q_S(ψ, φ)(g) = ⟨S σ(g)ψ, σ(g)φ⟩``,
the operator-operator convolution of the rank-one ``ψ⊗φ`` with ``S``.
Rank-one kernels recover the scalogram (affine) / spectrogram (cyclic),
positive kernels expand into convex combinations of those, and the
sup-norm bound ``‖Q_S(ψ)‖_∞ ≤ ‖S‖·‖ψ‖²`` yields the concentration
estimate ``μ_r(Ω) ≥ 1 − ε`` for regions holding most of the mass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .convolution import op_op_convolve
from .groups import GroupFunction
from .operators import (
    OperatorRep,
    min_eigenvalue,
    operator_norm,
    rank_one,
    spectral_decomposition,
)

__all__ = [
    "CohenMap",
    "cohen_map",
    "scalogram",
    "positive_expansion",
    "UncertaintyReport",
    "uncertainty_check",
]


@dataclass
class CohenMap:
    """Sampled Cohen-class distribution with provenance references."""

    grid: object
    values: np.ndarray
    kernel: OperatorRep = field(repr=False)
    left: np.ndarray = field(repr=False)
    right: np.ndarray = field(repr=False)

    def function(self):
        return GroupFunction(self.grid, self.values)

    def integrate_r(self):
        return self.grid.weight * complex(np.sum(self.values))

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))


def cohen_map(S, psi, phi, grid):
    """Samples of ``Q_S(ψ, φ)(g) = ⟨S σ(g)ψ, σ(g)φ⟩`` on the grid."""
    psi = np.asarray(psi, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    pair = rank_one(S.basis, psi, phi)
    vals = op_op_convolve(pair, S, grid).values
    return CohenMap(grid, vals, S, psi, phi)


def scalogram(basis, xi, psi, grid):
    """Squared transform magnitude ``|⟨σ(g)ψ, ξ⟩|²`` as a Cohen map.

    Equals ``cohen_map`` with the rank-one kernel ``ξ⊗ξ``; values are real
    and nonnegative up to rounding and are stored with the imaginary part
    dropped.
    """
    xi = np.asarray(xi, dtype=complex)
    if basis.norm(xi) == 0:
        raise ValueError("scalogram window vector must be nonzero")
    out = cohen_map(rank_one(basis, xi, xi), psi, psi, grid)
    out.values = out.values.real.astype(complex)
    return out


def positive_expansion(S, psi, grid, pos_tol=1e-10):
    """Spectral expansion of ``Q_S(ψ)`` for a positive kernel.

    Returns ``(total, terms)`` where ``terms`` is the list of
    ``(eigenvalue, CohenMap)`` contributions ``λ_n·|⟨σ(g)ψ, φ_n⟩|²`` (only
    eigenvalues above the numerical-rank cutoff appear) and ``total`` is
    their sum; it agrees with ``cohen_map(S, ψ, ψ, grid)``.
    """
    floor = -pos_tol * max(operator_norm(S), 1e-300)
    if min_eigenvalue(S) < floor:
        raise ValueError("positive_expansion needs a positive kernel")
    spec = spectral_decomposition(S)
    terms = []
    total = np.zeros(grid.n_nodes, dtype=complex)
    for lam, vec in zip(spec.eigenvalues, spec.eigenvectors.T):
        if lam <= 1e-14 * max(abs(spec.eigenvalues[0]), 1e-300):
            continue
        part = scalogram(S.basis, vec, psi, grid)
        part.values = lam * part.values
        terms.append((float(lam), part))
        total += part.values
    out = CohenMap(grid, total, S, np.asarray(psi), np.asarray(psi))
    return out, terms


@dataclass
class UncertaintyReport:
    """Concentration bound data for one region.

    ``mass = ∫_Ω |Q_S(ψ)| dμ_r`` (grid quadrature), ``epsilon`` solves
    ``mass = (1−ε)·‖S‖``, and ``mu_r`` is the quadrature measure of the
    region, so ``mu_r ≥ 1 − ε`` holds whenever the region captures that
    share of the mass.
    """

    mass: float
    epsilon: float
    mu_r: float
    bound_holds: bool


def uncertainty_check(S, psi, box, grid, slack=1e-6):
    """Check ``μ_r(Ω) ≥ 1 − ε`` for the mass of ``Q_S(ψ)`` caught in Ω."""
    psi = np.asarray(psi, dtype=complex)
    qmap = cohen_map(S, psi, psi, grid)
    mask = grid.membership(box)
    mass = grid.weight * float(np.sum(np.abs(qmap.values[mask])))
    norm = operator_norm(S)
    eps = 1.0 - mass / norm
    mu = grid.weight * float(np.count_nonzero(mask))
    return UncertaintyReport(mass, eps, mu, bool(mu >= 1.0 - eps - slack))
