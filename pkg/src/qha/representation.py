"""Truncated Hilbert-space bases, unitary representations, Duflo-Moore data.

Affine backend
    The Hilbert space is ``L²(ℝ⁺, dω)`` truncated to a geometric frequency
    lattice ``ω_j = omega_min·e^{j·step}`` with inner-product weights
    ``w_j = ω_j·step``.  The group acts by

        ``(σ(x, a) ψ)(ω) = √a · e^{−2πi x ω} · ψ(a ω)``,

    so a dilation ``a = e^{m·step}`` is an exact index shift (with zero
    fill at the truncation edges) and the modulation is an exact diagonal
    phase at any real ``x``.  The Duflo-Moore operator is diagonal,
    ``D⁻¹ = diag(1/√ω_j)``, and satisfies ``σ(x)·D·σ(x)* = Δ(x)^{−1/2}·D``
    on interior vectors.

Cyclic backend
    ``ℂ^N`` with the standard inner product and the projective
    translation-modulation action ``(σ(j, k) ψ)(t) = e^{2πik(t−j)/N}
    ψ(t−j)``; composition holds up to the phase ``e^{2πi j'k/N}``.  With
    counting Haar measure the formal degree of this representation is
    ``N``, so ``D⁻¹ = √N·I``.

Representation matrices conjugate operators through
:func:`conjugate`; the heavy grid-summed paths in
:mod:`qha.convolution` use the same shift-plus-phase structure without
materializing matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .groups import AffineBox, AffineGroup, BackendMismatch, CyclicPhaseSpace

__all__ = [
    "FrequencyBasis",
    "CyclicBasis",
    "DufloMoore",
    "duflo_moore",
    "AffineRepresentation",
    "CyclicRepresentation",
    "make_representation",
    "conjugate",
    "apply_duflo_inv",
    "log_gaussian",
]


class FrequencyBasis:
    """Log-frequency discretization of ``L²(ℝ⁺)``.

    Parameters
    ----------
    size : int
        Number of frequency nodes.
    omega_min : float
        Lowest frequency node (must be positive).
    lattice_step : float
        Logarithmic spacing; dilations by ``e^{m·lattice_step}`` act as
        index shifts.
    edge_fraction : float
        Fraction of indices at each end regarded as the truncation edge;
        test vectors should live in the complementary interior band.
    """

    backend = "affine"

    def __init__(self, size, omega_min, lattice_step, edge_fraction=0.1):
        if size < 4:
            raise ValueError("basis size must be at least 4")
        if omega_min <= 0 or lattice_step <= 0:
            raise ValueError("omega_min and lattice_step must be positive")
        self.size = int(size)
        self.omega_min = float(omega_min)
        self.lattice_step = float(lattice_step)
        self.omegas = omega_min * np.exp(lattice_step * np.arange(size))
        self.weights = self.omegas * lattice_step
        self.sqrt_weights = np.sqrt(self.weights)
        margin = int(math.floor(edge_fraction * size))
        self.interior = slice(margin, size - margin)

    def inner(self, u, v):
        """Weighted pairing ``Σ w u conj(v)``."""
        return complex(np.sum(self.weights * u * np.conj(v)))

    def norm(self, u):
        return math.sqrt(float(np.sum(self.weights * np.abs(u) ** 2)))

    def __eq__(self, other):
        return (
            isinstance(other, FrequencyBasis)
            and other.size == self.size
            and other.omega_min == self.omega_min
            and other.lattice_step == self.lattice_step
        )

    def __hash__(self):
        return hash(("affine", self.size, self.omega_min, self.lattice_step))

    def __repr__(self):
        return (
            f"FrequencyBasis(size={self.size}, omega_min={self.omega_min!r}, "
            f"lattice_step={self.lattice_step!r})"
        )


class CyclicBasis:
    """Standard basis of ``ℂ^N`` for the cyclic phase-space backend."""

    backend = "cyclic"

    def __init__(self, order):
        if order < 2:
            raise ValueError("order must be >= 2")
        self.size = int(order)
        self.order = int(order)
        self.weights = np.ones(self.size)
        self.sqrt_weights = np.ones(self.size)
        self.interior = slice(0, self.size)

    def inner(self, u, v):
        return complex(np.vdot(v, u))  # conjugate-linear in the second slot

    def norm(self, u):
        return float(np.linalg.norm(u))

    def __eq__(self, other):
        return isinstance(other, CyclicBasis) and other.size == self.size

    def __hash__(self):
        return hash(("cyclic", self.size))

    def __repr__(self):
        return f"CyclicBasis(order={self.size})"


@dataclass(frozen=True)
class DufloMoore:
    """Diagonal Duflo-Moore data for a basis.

    ``diag_inv`` is the diagonal of the (possibly unbounded in the
    continuum) operator ``D⁻¹`` whose domain is the admissible vectors;
    ``diag`` is its reciprocal.
    """

    diag: np.ndarray
    diag_inv: np.ndarray


def duflo_moore(basis):
    """Duflo-Moore diagonal for a basis.

    Affine: ``D⁻¹ = diag(1/√ω_j)``.  Cyclic with counting Haar measure:
    the formal degree is the order ``N``, so ``D⁻¹ = √N·I``.
    """
    if basis.backend == "affine":
        dinv = 1.0 / np.sqrt(basis.omegas)
    else:
        dinv = np.full(basis.size, math.sqrt(basis.size))
    return DufloMoore(diag=1.0 / dinv, diag_inv=dinv)


# ---------------------------------------------------------------------------
# representations


class AffineRepresentation:
    """Affine group action on a :class:`FrequencyBasis`.

    ``matrix(point)`` returns the dense matrix acting on sample vectors;
    dilations must sit on the geometric lattice (no interpolation).  The
    matrix is exactly isometric on vectors whose support stays clear of
    the truncation edges under the shift; ``unitarity_domain`` describes
    the dilation band that keeps interior-band vectors clear.
    """

    backend = "affine"

    def __init__(self, basis, group=None):
        if group is None:
            group = AffineGroup(basis.lattice_step)
        if group.lattice_step != basis.lattice_step:
            raise BackendMismatch(
                "group lattice_step differs from the basis lattice_step"
            )
        self.basis = basis
        self.group = group
        margin = basis.interior.start
        lam_max = margin * basis.lattice_step
        self.unitarity_domain = AffineBox(
            -math.inf, math.inf, math.exp(-lam_max), math.exp(lam_max)
        )
        self._matrix = lru_cache(maxsize=128)(self._build_matrix)

    def shift_index(self, a):
        return self.group.lattice_index(a)

    def matrix(self, point):
        """Dense matrix of ``σ(x, a)`` (cached; cache is read-shared)."""
        x, a = point
        return self._matrix(float(x), self.shift_index(a))

    def _build_matrix(self, x, m):
        basis = self.basis
        n = basis.size
        sqrt_a = math.exp(0.5 * m * basis.lattice_step)
        diag = sqrt_a * np.exp(-2j * np.pi * x * basis.omegas)
        mat = np.zeros((n, n), dtype=complex)
        if m >= 0:
            idx = np.arange(n - m)
            mat[idx, idx + m] = diag[: n - m]
        else:
            idx = np.arange(n + m)
            mat[idx - m, idx] = diag[-m:]
        return mat

    def apply(self, point, vec):
        """``σ(x, a) ψ`` without building the matrix."""
        x, a = point
        m = self.shift_index(a)
        basis = self.basis
        n = basis.size
        out = np.zeros(n, dtype=complex)
        if m >= 0:
            out[: n - m] = vec[m:]
        else:
            out[-m:] = vec[: n + m]
        sqrt_a = math.exp(0.5 * m * basis.lattice_step)
        out *= sqrt_a * np.exp(-2j * np.pi * x * basis.omegas)
        return out

    def apply_adjoint(self, point, vec):
        return self.apply(self.group.inverse(point), vec)


class CyclicRepresentation:
    """Projective translation-modulation action on a :class:`CyclicBasis`.

    ``σ(j, k) σ(j', k') = e^{2πi j' k / N} σ(j+j', k+k')``; every matrix is
    exactly unitary, so the unitarity domain is the whole lattice.
    """

    backend = "cyclic"

    def __init__(self, basis, group=None):
        if group is None:
            group = CyclicPhaseSpace(basis.size)
        if group.order != basis.size:
            raise BackendMismatch("cyclic group order differs from basis size")
        self.basis = basis
        self.group = group
        self.unitarity_domain = None  # everything
        self._matrix = lru_cache(maxsize=256)(self._build_matrix)

    def matrix(self, point):
        j, k = self.group.reduce(point)
        return self._matrix(j, k)

    def _build_matrix(self, j, k):
        n = self.basis.size
        t = np.arange(n)
        phase = np.exp(2j * np.pi * k * (t - j) / n)
        mat = np.zeros((n, n), dtype=complex)
        mat[t, (t - j) % n] = phase
        return mat

    def apply(self, point, vec):
        j, k = self.group.reduce(point)
        n = self.basis.size
        t = np.arange(n)
        return np.exp(2j * np.pi * k * (t - j) / n) * np.roll(vec, j)

    def apply_adjoint(self, point, vec):
        j, k = self.group.reduce(point)
        n = self.basis.size
        t = np.arange(n)
        return np.roll(np.exp(-2j * np.pi * k * (t - j) / n) * vec, -j)


def make_representation(basis, group=None):
    if basis.backend == "affine":
        return AffineRepresentation(basis, group)
    return CyclicRepresentation(basis, group)


# ---------------------------------------------------------------------------
# operator conjugation and Duflo-Moore sandwiches


def conjugate(op, point):
    """Operator shift ``α_g(S) = σ(g)* S σ(g)``.

    Uses the shift-plus-phase structure of the representation; on the
    affine backend the dilation part of ``g`` must be on the lattice.
    Trace and positivity are preserved exactly on the cyclic backend and
    up to truncation clipping on the affine one.
    """
    from .operators import OperatorRep  # local import to avoid a cycle

    basis = op.basis
    mat = op.matrix
    n = basis.size
    if basis.backend == "affine":
        x, a = point
        m = AffineGroup(basis.lattice_step).lattice_index(a)
        u = np.exp(2j * np.pi * x * basis.omegas)
        phased = mat * np.outer(u, np.conj(u))
        out = np.zeros_like(mat)
        if m >= 0:
            out[m:, m:] = phased[: n - m, : n - m]
        else:
            out[:m, :m] = phased[-m:, -m:]
        return OperatorRep(basis, out)
    j, k = point
    j, k = int(j) % n, int(k) % n
    t = np.arange(n)
    ph = np.exp(2j * np.pi * k * t / n)
    rolled = np.roll(mat, (-j, -j), axis=(0, 1))
    return OperatorRep(basis, rolled * np.outer(np.conj(ph), ph))


def apply_duflo_inv(op):
    """Diagonal sandwich ``D⁻¹ S D⁻¹``."""
    from .operators import OperatorRep

    dinv = duflo_moore(op.basis).diag_inv
    return OperatorRep(op.basis, dinv[:, None] * op.matrix * dinv[None, :])


def apply_duflo(op):
    """Diagonal sandwich ``D S D``."""
    from .operators import OperatorRep

    d = duflo_moore(op.basis).diag
    return OperatorRep(op.basis, d[:, None] * op.matrix * d[None, :])


# ---------------------------------------------------------------------------
# test-vector factory


def log_gaussian(basis, center_index, width_indices, x_shift=0.0):
    """Unit-norm log-Gaussian vector on a :class:`FrequencyBasis`.

    Gaussian amplitude in the lattice index (hence log-Gaussian in ω),
    optionally carrying the linear phase ``e^{−2πi x_shift ω}`` of a
    translation by ``x_shift``.
    """
    idx = np.arange(basis.size)
    v = np.exp(-((idx - center_index) ** 2) / (4.0 * width_indices**2)).astype(
        complex
    )
    if x_shift:
        v *= np.exp(-2j * np.pi * x_shift * basis.omegas)
    return v / basis.norm(v)
