"""Dense operators on a truncated basis: Schatten norms, spectra, calculus.

An :class:`OperatorRep` stores the matrix acting on sample vectors of its
basis.  All traces, adjoints, singular values and eigendecompositions are
computed on the similarity transform ``W^{1/2} M W^{-1/2}`` (``W`` the
diagonal inner-product weights), which carries the weighted geometry onto
the standard one so stock dense routines apply; the trace is unaffected by
the transform.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .groups import BackendMismatch

logger = logging.getLogger(__name__)

__all__ = [
    "OperatorRep",
    "Spectrum",
    "rank_one",
    "identity_operator",
    "schatten_norm",
    "operator_norm",
    "hs_inner",
    "spectral_decomposition",
    "functional_calculus",
    "min_eigenvalue",
]


class OperatorRep:
    """A dense matrix interpreted against the weighted inner product."""

    def __init__(self, basis, matrix):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (basis.size, basis.size):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match basis size "
                f"{basis.size}"
            )
        self.basis = basis
        self.matrix = matrix

    def to_ortho(self):
        """Similarity transform onto the orthonormal coordinates."""
        s = self.basis.sqrt_weights
        return (s[:, None] / s[None, :]) * self.matrix

    @classmethod
    def from_ortho(cls, basis, mat):
        s = basis.sqrt_weights
        return cls(basis, (s[None, :] / s[:, None]) * mat)

    def trace(self):
        return complex(np.trace(self.matrix))

    def adjoint(self):
        """Adjoint with respect to the weighted pairing."""
        w = self.basis.weights
        return OperatorRep(
            self.basis, self.matrix.conj().T * (w[None, :] / w[:, None])
        )

    def apply(self, vec):
        return self.matrix @ vec

    def __add__(self, other):
        self._check(other)
        return OperatorRep(self.basis, self.matrix + other.matrix)

    def __sub__(self, other):
        self._check(other)
        return OperatorRep(self.basis, self.matrix - other.matrix)

    def __mul__(self, scalar):
        return OperatorRep(self.basis, self.matrix * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        return OperatorRep(self.basis, self.matrix @ other.matrix)

    def _check(self, other):
        if other.basis != self.basis:
            raise BackendMismatch("operators live on different bases")

    def __repr__(self):
        return f"OperatorRep(basis={self.basis!r})"


def rank_one(basis, psi, phi):
    """Rank-one operator ``ψ ⊗ φ : ξ ↦ ⟨ξ, φ⟩ ψ``; trace is ``⟨ψ, φ⟩``."""
    psi = np.asarray(psi, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    if psi.shape != (basis.size,) or phi.shape != (basis.size,):
        raise BackendMismatch("vector length does not match the basis")
    return OperatorRep(
        basis, psi[:, None] * np.conj(phi)[None, :] * basis.weights[None, :]
    )


def identity_operator(basis):
    return OperatorRep(basis, np.eye(basis.size, dtype=complex))


def schatten_norm(op, p):
    """Schatten p-norm: ℓ^p norm of the singular values (p = inf allowed)."""
    if p != math.inf and p < 1:
        raise ValueError("Schatten norms need p >= 1")
    sv = np.linalg.svd(op.to_ortho(), compute_uv=False)
    if p == math.inf:
        return float(sv[0]) if len(sv) else 0.0
    if p == 1:
        return float(np.sum(sv))
    if p == 2:
        return float(np.sqrt(np.sum(sv**2)))
    return float(np.sum(sv**p) ** (1.0 / p))


def operator_norm(op):
    return schatten_norm(op, math.inf)


def hs_inner(a, b):
    """Hilbert-Schmidt inner product ``tr(A B*)``."""
    a._check(b)
    return complex(np.sum(a.to_ortho() * np.conj(b.to_ortho())))


@dataclass
class Spectrum:
    """Eigendecomposition of a self-adjoint operator.

    ``eigenvalues`` descend; ``eigenvectors[:, k]`` are sample-space
    vectors, orthonormal under the weighted pairing.  Ties are broken by
    the ascending leading index of the eigenvector and each vector's
    phase is fixed so its leading component is real positive, which keeps
    golden outputs reproducible.
    """

    basis: object
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reassemble(self):
        from_ortho = OperatorRep.from_ortho
        s = self.basis.sqrt_weights
        vo = self.eigenvectors * s[:, None]
        return from_ortho(
            self.basis, (vo * self.eigenvalues[None, :]) @ vo.conj().T
        )


def _leading_index(col, tol=1e-8):
    big = np.nonzero(np.abs(col) > tol * np.max(np.abs(col)))[0]
    return int(big[0]) if len(big) else 0


def spectral_decomposition(op, sym_tol=1e-10):
    """Spectral decomposition of a (numerically) self-adjoint operator.

    The orthonormal-coordinate matrix is symmetrized before ``eigh``;
    asymmetry beyond ``sym_tol`` (relative to the Frobenius norm) is an
    error, smaller asymmetry is logged at debug level.
    """
    mo = op.to_ortho()
    scale = float(np.linalg.norm(mo))
    asym = float(np.linalg.norm(mo - mo.conj().T))
    if scale > 0 and asym > sym_tol * max(scale, 1e-300):
        raise ValueError(
            f"operator is not self-adjoint: asymmetry {asym:.3e} "
            f"exceeds {sym_tol:.1e} of scale {scale:.3e}"
        )
    if asym > 0:
        logger.debug("symmetrizing operator, asymmetry %.3e", asym)
    h = 0.5 * (mo + mo.conj().T)
    vals, vecs = np.linalg.eigh(h)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    # deterministic order and phase
    leading = np.array([_leading_index(vecs[:, k]) for k in range(len(vals))])
    order = np.lexsort((leading, -vals))
    vals = vals[order]
    vecs = vecs[:, order]
    for k in range(vecs.shape[1]):
        z = vecs[_leading_index(vecs[:, k]), k]
        if z != 0:
            vecs[:, k] *= np.conj(z) / abs(z)
    sample_vecs = vecs / op.basis.sqrt_weights[:, None]
    return Spectrum(op.basis, vals, sample_vecs)


def functional_calculus(op, fn, sym_tol=1e-10):
    """Apply a scalar map to a self-adjoint operator spectrally.

    Raises ``ValueError`` naming the offending eigenvalue when the map is
    undefined (raises or returns a non-finite value) there.
    """
    spec = spectral_decomposition(op, sym_tol=sym_tol)
    mapped = np.empty_like(spec.eigenvalues)
    for i, lam in enumerate(spec.eigenvalues):
        try:
            val = float(fn(lam))
        except Exception as exc:
            raise ValueError(
                f"scalar map undefined at eigenvalue {lam!r}: {exc}"
            ) from exc
        if not math.isfinite(val):
            raise ValueError(
                f"scalar map returned non-finite value at eigenvalue {lam!r}"
            )
        mapped[i] = val
    return Spectrum(op.basis, mapped, spec.eigenvectors).reassemble()


def min_eigenvalue(op, sym_tol=1e-8):
    """Smallest eigenvalue of the symmetrized operator (positivity probe)."""
    mo = op.to_ortho()
    h = 0.5 * (mo + mo.conj().T)
    return float(np.linalg.eigvalsh(h)[0])
