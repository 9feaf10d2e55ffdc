"""Hot numeric kernels: numba-compiled loops with pure-numpy fallbacks.

Each public function dispatches on :data:`qha._accel.USE_NUMBA`.  The two
implementations agree up to floating-point reordering and are cross-checked
in the tests.  See ``benchmarks/bench_kernels.py`` for a speed comparison.
"""

from __future__ import annotations

import numpy as np

from ._accel import USE_NUMBA, njit

__all__ = [
    "affine_fn_convolve",
    "affine_fn_correlate",
    "box_phase_matrix",
    "stilde_double_quad",
]

_TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# function-function convolution on an affine grid
#
# out[i, xi] = sum_{j, xj} w * f[j, xj] * g[i-j-m0](xs[xi] - e^{(i-j)s} xs[xj])
# with linear interpolation of g along x and zero extension outside the
# sampled window (rows and x alike).


def _affine_fn_convolve_np(fv, gv, xs, hx, wnode, lam_step, m0):
    n_lam, n_x = fv.shape
    out = np.zeros((n_lam, n_x), dtype=np.complex128)
    for i in range(n_lam):
        for j in range(n_lam):
            r = i - j - m0
            if r < 0 or r >= n_lam:
                continue
            fj = fv[j]
            if not fj.any():
                continue
            c = np.exp((i - j) * lam_step)
            t = xs[:, None] - c * xs[None, :]
            row = gv[r]
            g_t = np.interp(t, xs, row.real, left=0.0, right=0.0)
            if np.iscomplexobj(row) and row.imag.any():
                g_t = g_t + 1j * np.interp(t, xs, row.imag, left=0.0, right=0.0)
            out[i] += wnode * (g_t @ fj)
    return out


@njit(cache=True)
def _affine_fn_convolve_nb(fv, gv, xs, hx, wnode, lam_step, m0):  # pragma: no cover
    n_lam, n_x = fv.shape
    out = np.zeros((n_lam, n_x), dtype=np.complex128)
    x0 = xs[0]
    for i in range(n_lam):
        for j in range(n_lam):
            r = i - j - m0
            if r < 0 or r >= n_lam:
                continue
            c = np.exp((i - j) * lam_step)
            for xj in range(n_x):
                fval = fv[j, xj]
                if fval == 0:
                    continue
                coef = wnode * fval
                cxj = c * xs[xj]
                for xi in range(n_x):
                    u = (xs[xi] - cxj - x0) / hx
                    if u < 0.0 or u > n_x - 1:
                        continue
                    k = int(u)
                    if k >= n_x - 1:
                        gval = gv[r, n_x - 1]
                    else:
                        frac = u - k
                        gval = gv[r, k] * (1.0 - frac) + gv[r, k + 1] * frac
                    out[i, xi] += coef * gval
    return out


def affine_fn_convolve(fv, gv, xs, hx, wnode, lam_step, m0):
    fv = np.ascontiguousarray(fv, dtype=np.complex128)
    gv = np.ascontiguousarray(gv, dtype=np.complex128)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    if USE_NUMBA:
        return _affine_fn_convolve_nb(
            fv, gv, xs, float(hx), float(wnode), float(lam_step), int(m0)
        )
    return _affine_fn_convolve_np(
        fv, gv, xs, float(hx), float(wnode), float(lam_step), int(m0)
    )


# ---------------------------------------------------------------------------
# left correlation on an affine grid
#
# out[i, yi] = sum_{j, xj} w * f[j, xj] * g[j+i+m0](xs[xj] + e^{(m0+j)s} xs[yi])
# (the composite x·y for x in row j, y in row i), with the same linear
# interpolation and zero extension as the convolution.


def _affine_fn_correlate_np(fv, gv, xs, hx, wnode, lam_step, m0):
    n_lam, n_x = fv.shape
    out = np.zeros((n_lam, n_x), dtype=np.complex128)
    for i in range(n_lam):
        for j in range(n_lam):
            r = j + i + m0
            if r < 0 or r >= n_lam:
                continue
            fj = fv[j]
            if not fj.any():
                continue
            c = np.exp((m0 + j) * lam_step)
            t = xs[None, :] + c * xs[:, None]   # [yi, xj]
            row = gv[r]
            g_t = np.interp(t, xs, row.real, left=0.0, right=0.0)
            if np.iscomplexobj(row) and row.imag.any():
                g_t = g_t + 1j * np.interp(t, xs, row.imag, left=0.0, right=0.0)
            out[i] += wnode * (g_t @ fj)
    return out


@njit(cache=True)
def _affine_fn_correlate_nb(fv, gv, xs, hx, wnode, lam_step, m0):  # pragma: no cover
    n_lam, n_x = fv.shape
    out = np.zeros((n_lam, n_x), dtype=np.complex128)
    x0 = xs[0]
    for i in range(n_lam):
        for j in range(n_lam):
            r = j + i + m0
            if r < 0 or r >= n_lam:
                continue
            c = np.exp((m0 + j) * lam_step)
            for xj in range(n_x):
                fval = fv[j, xj]
                if fval == 0:
                    continue
                coef = wnode * fval
                for yi in range(n_x):
                    u = (xs[xj] + c * xs[yi] - x0) / hx
                    if u < 0.0 or u > n_x - 1:
                        continue
                    k = int(u)
                    if k >= n_x - 1:
                        gval = gv[r, n_x - 1]
                    else:
                        frac = u - k
                        gval = gv[r, k] * (1.0 - frac) + gv[r, k + 1] * frac
                    out[i, yi] += coef * gval
    return out


def affine_fn_correlate(fv, gv, xs, hx, wnode, lam_step, m0):
    fv = np.ascontiguousarray(fv, dtype=np.complex128)
    gv = np.ascontiguousarray(gv, dtype=np.complex128)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    if USE_NUMBA:
        return _affine_fn_correlate_nb(
            fv, gv, xs, float(hx), float(wnode), float(lam_step), int(m0)
        )
    return _affine_fn_correlate_np(
        fv, gv, xs, float(hx), float(wnode), float(lam_step), int(m0)
    )


# ---------------------------------------------------------------------------
# closed-form phase sums over a uniform x range
#
# K[p, q] = hx * sum_{i=0}^{count-1} exp(2πi (x0 + i hx) (ω_p − ω_q))
#
# evaluated through the Dirichlet-kernel form, with the coincident-phase
# limit handled explicitly.


def _box_phase_matrix_np(omega, x0, hx, count):
    d = omega[:, None] - omega[None, :]
    phi = _TWO_PI * hx * d
    half = 0.5 * phi
    den = np.sin(half)
    num = np.sin(count * half)
    safe = np.abs(den) > 1e-12
    ratio = np.where(safe, num / np.where(safe, den, 1.0), float(count))
    return (
        hx
        * np.exp(1j * (_TWO_PI * x0 * d + (count - 1) * half))
        * ratio
    )


@njit(cache=True)
def _box_phase_matrix_nb(omega, x0, hx, count):  # pragma: no cover
    n = omega.shape[0]
    out = np.empty((n, n), dtype=np.complex128)
    for p in range(n):
        for q in range(n):
            d = omega[p] - omega[q]
            half = np.pi * hx * d
            den = np.sin(half)
            if abs(den) > 1e-12:
                ratio = np.sin(count * half) / den
            else:
                ratio = float(count)
            theta = _TWO_PI * x0 * d + (count - 1) * half
            out[p, q] = hx * ratio * (np.cos(theta) + 1j * np.sin(theta))
    return out


def box_phase_matrix(omega, x0, hx, count):
    omega = np.ascontiguousarray(omega, dtype=np.float64)
    if USE_NUMBA:
        return _box_phase_matrix_nb(omega, float(x0), float(hx), int(count))
    return _box_phase_matrix_np(omega, float(x0), float(hx), int(count))


# ---------------------------------------------------------------------------
# double right-Haar quadrature of s(x·y⁻¹) over a box × box
#
# sum over rows p, q in [il0, il1] and x-indices xi, xj in [ix0, ix1] of
# w² · s[p−q−m0](xs[xi] − e^{(p−q)s} xs[xj]), grouped by the row difference
# (the inner x sum only depends on p−q, with multiplicity nb − |p−q|).


def _stilde_double_quad_np(st, xs, hx, lam_step, m0, il0, il1, ix0, ix1, wnode):
    n_lam, n_x = st.shape
    nb = il1 - il0 + 1
    xb = xs[ix0 : ix1 + 1]
    total = 0.0
    for dp in range(-(nb - 1), nb):
        r = dp - m0
        if r < 0 or r >= n_lam:
            continue
        mult = nb - abs(dp)
        c = np.exp(dp * lam_step)
        t = xb[:, None] - c * xb[None, :]
        vals = np.interp(t, xs, st[r], left=0.0, right=0.0)
        total += mult * float(np.sum(vals))
    return total * wnode * wnode


@njit(cache=True)
def _stilde_double_quad_nb(
    st, xs, hx, lam_step, m0, il0, il1, ix0, ix1, wnode
):  # pragma: no cover
    n_lam, n_x = st.shape
    nb = il1 - il0 + 1
    x0 = xs[0]
    total = 0.0
    for dp in range(-(nb - 1), nb):
        r = dp - m0
        if r < 0 or r >= n_lam:
            continue
        mult = nb - (dp if dp >= 0 else -dp)
        c = np.exp(dp * lam_step)
        inner = 0.0
        for xi in range(ix0, ix1 + 1):
            for xj in range(ix0, ix1 + 1):
                u = (xs[xi] - c * xs[xj] - x0) / hx
                if u < 0.0 or u > n_x - 1:
                    continue
                k = int(u)
                if k >= n_x - 1:
                    inner += st[r, n_x - 1]
                else:
                    frac = u - k
                    inner += st[r, k] * (1.0 - frac) + st[r, k + 1] * frac
        total += mult * inner
    return total * wnode * wnode


def stilde_double_quad(st, xs, hx, lam_step, m0, il0, il1, ix0, ix1, wnode):
    st = np.ascontiguousarray(st, dtype=np.float64)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    args = (
        st,
        xs,
        float(hx),
        float(lam_step),
        int(m0),
        int(il0),
        int(il1),
        int(ix0),
        int(ix1),
        float(wnode),
    )
    if USE_NUMBA:
        return _stilde_double_quad_nb(*args)
    return _stilde_double_quad_np(*args)
