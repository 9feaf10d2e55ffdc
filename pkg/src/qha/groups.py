"""Group backends, Haar quadrature grids, and scalar group functions.

Two concrete groups are provided:

* :class:`AffineGroup` -- the ``ax+b`` group on ``ℝ × ℝ⁺`` in coordinates
  ``(x, a)`` with law ``(x, a)·(y, b) = (x + a·y, a·b)``.  Right Haar measure
  is ``dx da/a``, left Haar measure ``dx da/a²``, modular function
  ``Δ(x, a) = 1/a``.  In the chart ``(x, λ = ln a)`` the right Haar density
  is Lebesgue, so midpoint quadrature has uniform weights.  The dilation
  axis is restricted to a geometric lattice ``a = exp(m·lattice_step)`` so
  that dilations act on the companion frequency basis as exact index shifts.

* :class:`CyclicPhaseSpace` -- the finite phase-space lattice ``(ℤ/N)²``
  with componentwise addition, counting measure and trivial modular
  function.  Every identity of the continuous theory closes exactly here,
  which makes it the internal oracle backend.

Quadrature grids snap the dilation window outward to half-lattice points so
that node dilations sit exactly on the lattice while the weight sum still
equals the right Haar measure of the (recorded) realized window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

__all__ = [
    "AffineGroup",
    "CyclicPhaseSpace",
    "AffineBox",
    "CyclicBox",
    "AffineGrid",
    "CyclicGrid",
    "GroupFunction",
    "BackendMismatch",
    "build_grid",
    "right_haar_measure",
    "scale_box",
    "indicator",
    "convolve_functions",
    "correlate_functions",
]


class BackendMismatch(ValueError):
    """Objects from different group/basis backends were combined."""


# ---------------------------------------------------------------------------
# group models


class AffineGroup:
    """The ``ax+b`` group in ``(x, a)`` coordinates, ``a > 0``.

    Parameters
    ----------
    lattice_step : float
        Spacing of the geometric dilation lattice in ``ln a``.  Must match
        the step of any frequency basis used alongside this group.
    """

    dim = 2
    backend = "affine"

    def __init__(self, lattice_step):
        if lattice_step <= 0:
            raise ValueError("lattice_step must be positive")
        self.lattice_step = float(lattice_step)

    def identity(self):
        return (0.0, 1.0)

    def compose(self, g, h):
        x, a = g
        y, b = h
        self._check_point(g)
        self._check_point(h)
        return (x + a * y, a * b)

    def inverse(self, g):
        x, a = g
        self._check_point(g)
        return (-x / a, 1.0 / a)

    def modular(self, g):
        """Modular function ``Δ(x, a) = 1/a`` (``dμ_r = Δ(g⁻¹) dμ_l``)."""
        self._check_point(g)
        return 1.0 / g[1]

    def right_density(self, g):
        """Density of ``dμ_r`` against ``dx da``: ``1/a``."""
        self._check_point(g)
        return 1.0 / g[1]

    def left_density(self, g):
        """Density of ``dμ_l`` against ``dx da``: ``1/a²``."""
        self._check_point(g)
        return 1.0 / g[1] ** 2

    def metric(self, g, h):
        """Right-invariant-compatible distance ``|x−y| + |ln(a/b)|``."""
        return abs(g[0] - h[0]) + abs(math.log(g[1] / h[1]))

    def scale_point(self, R, g):
        """Dilation ``Γ_R(x, a) = (R·x, a^R)``."""
        if R <= 0:
            raise ValueError("scale parameter must be positive")
        self._check_point(g)
        return (R * g[0], g[1] ** R)

    def lattice_index(self, a, tol=1e-9):
        """Lattice index ``m`` with ``a = exp(m·lattice_step)``.

        Raises ``ValueError`` when ``ln a`` is off the lattice; dilation
        interpolation is deliberately unsupported.
        """
        t = math.log(a) / self.lattice_step
        m = round(t)
        if abs(t - m) > tol:
            raise ValueError(
                f"dilation a={a!r} is off the geometric lattice "
                f"(ln a / step = {t!r})"
            )
        return int(m)

    @staticmethod
    def _check_point(g):
        if g[1] <= 0:
            raise ValueError(f"affine point needs a > 0, got a={g[1]!r}")

    def __eq__(self, other):
        return (
            isinstance(other, AffineGroup)
            and other.lattice_step == self.lattice_step
        )

    def __hash__(self):
        return hash(("affine", self.lattice_step))

    def __repr__(self):
        return f"AffineGroup(lattice_step={self.lattice_step!r})"


class CyclicPhaseSpace:
    """Finite phase-space lattice ``(ℤ/N)²`` with componentwise addition.

    Counting measure serves as both Haar measures and the modular function
    is identically one.  Points are integer pairs reduced to ``[0, N)``.
    """

    dim = 2
    backend = "cyclic"

    def __init__(self, order):
        if order < 2:
            raise ValueError("order must be >= 2")
        self.order = int(order)

    def identity(self):
        return (0, 0)

    def reduce(self, g):
        n = self.order
        return (int(g[0]) % n, int(g[1]) % n)

    def compose(self, g, h):
        n = self.order
        return ((g[0] + h[0]) % n, (g[1] + h[1]) % n)

    def inverse(self, g):
        n = self.order
        return ((-g[0]) % n, (-g[1]) % n)

    def modular(self, g):
        return 1.0

    def __eq__(self, other):
        return isinstance(other, CyclicPhaseSpace) and other.order == self.order

    def __hash__(self):
        return hash(("cyclic", self.order))

    def __repr__(self):
        return f"CyclicPhaseSpace(order={self.order})"


# ---------------------------------------------------------------------------
# coordinate boxes


@dataclass(frozen=True)
class AffineBox:
    """Closed coordinate box ``[x_min, x_max] × [a_min, a_max]``, ``a > 0``."""

    x_min: float
    x_max: float
    a_min: float
    a_max: float

    def __post_init__(self):
        if self.a_min <= 0 or self.a_max <= 0:
            raise ValueError("affine box needs positive dilation bounds")

    @property
    def lam_min(self):
        return math.log(self.a_min)

    @property
    def lam_max(self):
        return math.log(self.a_max)

    def is_empty(self):
        return self.x_max <= self.x_min or self.a_max <= self.a_min

    def contains(self, x, lam):
        return (
            self.x_min <= x <= self.x_max
            and self.lam_min - 1e-12 <= lam <= self.lam_max + 1e-12
        )


@dataclass(frozen=True)
class CyclicBox:
    """Inclusive index box ``[j_min, j_max] × [k_min, k_max]`` on ``(ℤ/N)²``."""

    j_min: int
    j_max: int
    k_min: int
    k_max: int

    def is_empty(self):
        return self.j_max < self.j_min or self.k_max < self.k_min

    def contains(self, j, k):
        return self.j_min <= j <= self.j_max and self.k_min <= k <= self.k_max

    @staticmethod
    def full(order):
        return CyclicBox(0, order - 1, 0, order - 1)


def right_haar_measure(box, group):
    """Right Haar measure of a coordinate box, in closed form.

    Affine boxes integrate ``dx da/a`` to ``(x_max−x_min)·ln(a_max/a_min)``;
    cyclic boxes are counted.  Degenerate boxes give 0.
    """
    if isinstance(group, AffineGroup):
        if box.is_empty():
            return 0.0
        return (box.x_max - box.x_min) * (box.lam_max - box.lam_min)
    if box.is_empty():
        return 0.0
    return float(
        (box.j_max - box.j_min + 1) * (box.k_max - box.k_min + 1)
    )


def scale_box(R, box):
    """Image of an affine box under ``Γ_R``: ``[Rx]×[a^R]``.

    Only defined on the affine backend; the measure scales as
    ``μ_r(Γ_R(Ω)) = R²·μ_r(Ω)``.
    """
    if not isinstance(box, AffineBox):
        raise BackendMismatch("scale_box is only defined for affine boxes")
    if R <= 0:
        raise ValueError("scale parameter must be positive")
    return AffineBox(R * box.x_min, R * box.x_max, box.a_min**R, box.a_max**R)


# ---------------------------------------------------------------------------
# quadrature grids


@dataclass(frozen=True)
class AffineGrid:
    """Right-Haar quadrature nodes over an affine window.

    Nodes are midpoints in ``x`` and geometric-lattice points in the
    dilation direction; the dilation window is snapped outward to
    half-lattice cell edges so that the uniform weight ``h_x·lam_step``
    sums exactly to ``μ_r`` of the realized window.  Node order is
    dilation-major, ``x`` inner.
    """

    group: AffineGroup
    xs: np.ndarray              # x node coordinates, midpoints
    h_x: float                  # x spacing
    lattice_indices: np.ndarray  # dilation lattice indices (basis units)
    lam_step: float             # ln-a node spacing (stride · lattice_step)
    window: AffineBox           # realized window (snapped)
    requested: AffineBox = field(compare=False)

    @property
    def n_x(self):
        return len(self.xs)

    @property
    def n_lam(self):
        return len(self.lattice_indices)

    @property
    def n_nodes(self):
        return self.n_x * self.n_lam

    @property
    def lams(self):
        return self.lattice_indices * self.group.lattice_step

    @property
    def weight(self):
        """Uniform right-Haar weight per node."""
        return self.h_x * self.lam_step

    @property
    def weights_r(self):
        return np.full(self.n_nodes, self.weight)

    @property
    def weights_l(self):
        """Left-Haar weights ``w_l = Δ(g)·w_r`` (= ``e^{−λ} w_r``)."""
        wl = self.weight * np.exp(-self.lams)
        return np.repeat(wl, self.n_x)

    def node_coords(self):
        """Array of node ``(x, a)`` coordinates in node order."""
        a = np.exp(self.lams)
        x = np.tile(self.xs, self.n_lam)
        return np.column_stack([x, np.repeat(a, self.n_x)])

    def membership(self, box):
        """Boolean node mask for centers inside an :class:`AffineBox`."""
        in_x = (self.xs >= box.x_min) & (self.xs <= box.x_max)
        in_l = (self.lams >= box.lam_min - 1e-12) & (
            self.lams <= box.lam_max + 1e-12
        )
        return (in_l[:, None] & in_x[None, :]).ravel()


@dataclass(frozen=True)
class CyclicGrid:
    """Counting-measure nodes over a cyclic index box (k-major, j inner)."""

    group: CyclicPhaseSpace
    js: np.ndarray
    ks: np.ndarray
    window: CyclicBox

    @property
    def n_nodes(self):
        return len(self.js) * len(self.ks)

    @property
    def weight(self):
        return 1.0

    @property
    def weights_r(self):
        return np.ones(self.n_nodes)

    @property
    def weights_l(self):
        return np.ones(self.n_nodes)

    @property
    def is_full(self):
        n = self.group.order
        return len(self.js) == n and len(self.ks) == n

    def node_coords(self):
        j = np.tile(self.js, len(self.ks))
        k = np.repeat(self.ks, len(self.js))
        return np.column_stack([j, k])

    def membership(self, box):
        in_j = (self.js >= box.j_min) & (self.js <= box.j_max)
        in_k = (self.ks >= box.k_min) & (self.ks <= box.k_max)
        return (in_k[:, None] & in_j[None, :]).ravel()


def build_grid(window, resolution, group):
    """Build a right-Haar quadrature grid over ``window``.

    ``resolution`` is nodes-per-axis (int or ``(n_x, n_a)``); each axis
    needs at least 2.  For the affine backend the dilation axis resolution
    is a request: nodes land on the geometric lattice (stride chosen to
    approximate the request) and the realized window is recorded on the
    grid.  For the cyclic backend the lattice itself is the resolution and
    the argument is ignored.
    """
    if isinstance(group, CyclicPhaseSpace):
        box = window if window is not None else CyclicBox.full(group.order)
        n = group.order
        if box.j_min < 0 or box.k_min < 0 or box.j_max >= n or box.k_max >= n:
            raise ValueError("cyclic window exceeds the phase-space lattice")
        return CyclicGrid(
            group=group,
            js=np.arange(box.j_min, box.j_max + 1),
            ks=np.arange(box.k_min, box.k_max + 1),
            window=box,
        )

    n_x, n_a = (resolution, resolution) if np.isscalar(resolution) else resolution
    if n_x < 2 or n_a < 2:
        raise ValueError("grid resolution must be at least 2 per axis")
    if window.is_empty():
        raise ValueError("cannot grid a degenerate window")

    step = group.lattice_step
    lam_lo, lam_hi = window.lam_min, window.lam_max
    stride = max(1, round((lam_hi - lam_lo) / (n_a * step)))
    s = stride * step
    m_lo = round(lam_lo / s + 0.5)
    m_hi = round(lam_hi / s - 0.5)
    if m_hi < m_lo:
        m_lo = m_hi = round((lam_lo + lam_hi) / (2 * s))
    h_x = (window.x_max - window.x_min) / n_x
    xs = window.x_min + (np.arange(n_x) + 0.5) * h_x
    realized = AffineBox(
        window.x_min,
        window.x_max,
        math.exp((m_lo - 0.5) * s),
        math.exp((m_hi + 0.5) * s),
    )
    return AffineGrid(
        group=group,
        xs=xs,
        h_x=h_x,
        lattice_indices=np.arange(m_lo, m_hi + 1) * stride,
        lam_step=s,
        window=realized,
        requested=window,
    )


# ---------------------------------------------------------------------------
# scalar functions on grids


@dataclass
class GroupFunction:
    """Complex samples of a scalar function on a quadrature grid."""

    grid: AffineGrid | CyclicGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"expected {self.grid.n_nodes} samples, got {self.values.shape}"
            )

    def integrate_r(self):
        """Right-Haar integral ``Σ w_r f``."""
        return self.grid.weight * np.sum(self.values)

    def integrate_l(self):
        """Left-Haar integral ``Σ w_l f``."""
        return np.sum(self.grid.weights_l * self.values)

    def norm_l1_r(self):
        return self.grid.weight * float(np.sum(np.abs(self.values)))

    def norm_l2_r(self):
        return math.sqrt(
            self.grid.weight * float(np.sum(np.abs(self.values) ** 2))
        )

    def sup_norm(self):
        return float(np.max(np.abs(self.values))) if len(self.values) else 0.0


def indicator(box, grid):
    """Indicator function of a coordinate box sampled on the grid."""
    mask = grid.membership(box)
    return GroupFunction(grid, mask.astype(complex))


# ---------------------------------------------------------------------------
# function-function convolution


def _same_grid(f, g):
    if f.grid is not g.grid and f.grid != g.grid:
        raise BackendMismatch("group functions live on different grids")


def convolve_functions(f, g):
    """Group convolution ``(f ∗ g)(x) = Σ_y w_r f(y) g(x·y⁻¹)``.

    Both functions must share one grid.  On the affine backend the dilation
    part of ``x·y⁻¹`` is an exact lattice shift while the translation part
    is evaluated by linear interpolation in ``x`` with zero extension
    outside the window.  On the cyclic backend (full lattice) the
    convolution is the exact circular one.
    """
    _same_grid(f, g)
    grid = f.grid
    if isinstance(grid, CyclicGrid):
        if not grid.is_full:
            raise ValueError(
                "cyclic convolution is defined on the full phase-space lattice"
            )
        n = grid.group.order
        F = f.values.reshape(n, n)  # [k, j]
        G = g.values.reshape(n, n)
        out = np.zeros((n, n), dtype=complex)
        # out[z] = sum_y F[y] G[z - y], componentwise mod N
        for dk in range(n):
            for dj in range(n):
                if F[dk, dj] != 0:
                    out += F[dk, dj] * np.roll(G, (dk, dj), axis=(0, 1))
        return GroupFunction(grid, out.ravel())

    fv = f.values.reshape(grid.n_lam, grid.n_x)
    gv = g.values.reshape(grid.n_lam, grid.n_x)
    m0 = int(round(grid.lams[0] / grid.lam_step))
    out = _kernels.affine_fn_convolve(
        fv, gv, grid.xs, grid.h_x, grid.weight, grid.lam_step, m0
    )
    return GroupFunction(grid, out.ravel())


def correlate_functions(f, g):
    """Left correlation ``(f ⊛ g)(y) = Σ_x w_r f(x) g(x·y)``.

    This is the pairing that intertwines function-operator and
    operator-operator convolutions: ``T ⋆ (f ⋆ S) = f ⊛ (T ⋆ S)``.  (It
    coincides with ``f ∗ g`` only on abelian models with symmetric ``f``.)
    Interpolation rules match :func:`convolve_functions`.
    """
    _same_grid(f, g)
    grid = f.grid
    if isinstance(grid, CyclicGrid):
        if not grid.is_full:
            raise ValueError(
                "cyclic correlation is defined on the full phase-space lattice"
            )
        n = grid.group.order
        F = f.values.reshape(n, n)  # [k, j]
        G = g.values.reshape(n, n)
        out = np.zeros((n, n), dtype=complex)
        for k in range(n):
            for j in range(n):
                if F[k, j] != 0:
                    out += F[k, j] * np.roll(G, (-k, -j), axis=(0, 1))
        return GroupFunction(grid, out.ravel())

    fv = f.values.reshape(grid.n_lam, grid.n_x)
    gv = g.values.reshape(grid.n_lam, grid.n_x)
    m0 = int(round(grid.lams[0] / grid.lam_step))
    out = _kernels.affine_fn_correlate(
        fv, gv, grid.xs, grid.h_x, grid.weight, grid.lam_step, m0
    )
    return GroupFunction(grid, out.ravel())
