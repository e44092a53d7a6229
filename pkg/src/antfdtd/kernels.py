"""Numba update kernels for the leapfrog scheme and the CPML corrections.

Parallelisation contract: every kernel partitions its writes over disjoint
index ranges (prange over one axis) and reads only arrays it does not
write, so results are bitwise identical for any thread count.  Thread
barriers fall out of the per-kernel call boundaries.

The bulk kernels take kappa-folded inverse cell sizes (1/(kappa*d) inside
the absorber, 1/d elsewhere); the CPML kernels recompute the raw
derivative with the unscaled 1/d and add the psi recursion on top,
multiplied by the local Cb/Db so that PEC edges (Cb = 0) stay pinned.

Tangential E on the outer domain faces is never updated (PEC backing wall
behind the absorber).
"""

import os

import numba
import numpy as np
from numba import njit, prange


def max_threads() -> int:
    return numba.config.NUMBA_NUM_THREADS


def set_threads(n: int) -> int:
    """Set the kernel thread count, clamped to the process-wide maximum."""
    n = max(1, min(int(n), max_threads()))
    numba.set_num_threads(n)
    return n


@njit(parallel=True, cache=True)
def update_e(ex, ey, ez, hx, hy, hz,
             ca_x, cb_x, ca_y, cb_y, ca_z, cb_z,
             inv_dx_e, inv_dy_e, inv_dz_e):
    nx = hz.shape[0]
    ny = hz.shape[1]
    nz = hy.shape[2]
    for i in prange(nx):
        for j in range(1, ny):
            for k in range(1, nz):
                curl = ((hz[i, j, k] - hz[i, j - 1, k]) * inv_dy_e[j]
                        - (hy[i, j, k] - hy[i, j, k - 1]) * inv_dz_e[k])
                ex[i, j, k] = ca_x[i, j, k] * ex[i, j, k] + cb_x[i, j, k] * curl
    for i in prange(1, nx):
        for j in range(ny):
            for k in range(1, nz):
                curl = ((hx[i, j, k] - hx[i, j, k - 1]) * inv_dz_e[k]
                        - (hz[i, j, k] - hz[i - 1, j, k]) * inv_dx_e[i])
                ey[i, j, k] = ca_y[i, j, k] * ey[i, j, k] + cb_y[i, j, k] * curl
    for i in prange(1, nx):
        for j in range(1, ny):
            for k in range(nz):
                curl = ((hy[i, j, k] - hy[i - 1, j, k]) * inv_dx_e[i]
                        - (hx[i, j, k] - hx[i, j - 1, k]) * inv_dy_e[j])
                ez[i, j, k] = ca_z[i, j, k] * ez[i, j, k] + cb_z[i, j, k] * curl


@njit(parallel=True, cache=True)
def update_h(ex, ey, ez, hx, hy, hz,
             db_x, db_y, db_z,
             inv_dx_h, inv_dy_h, inv_dz_h):
    nx = hz.shape[0]
    ny = hz.shape[1]
    nz = hy.shape[2]
    for i in prange(nx + 1):
        for j in range(ny):
            for k in range(nz):
                curl = ((ey[i, j, k + 1] - ey[i, j, k]) * inv_dz_h[k]
                        - (ez[i, j + 1, k] - ez[i, j, k]) * inv_dy_h[j])
                hx[i, j, k] = hx[i, j, k] + db_x[i, j, k] * curl
    for i in prange(nx):
        for j in range(ny + 1):
            for k in range(nz):
                curl = ((ez[i + 1, j, k] - ez[i, j, k]) * inv_dx_h[i]
                        - (ex[i, j, k + 1] - ex[i, j, k]) * inv_dz_h[k])
                hy[i, j, k] = hy[i, j, k] + db_y[i, j, k] * curl
    for i in prange(nx):
        for j in range(ny):
            for k in range(nz + 1):
                curl = ((ex[i, j + 1, k] - ex[i, j, k]) * inv_dy_h[j]
                        - (ey[i + 1, j, k] - ey[i, j, k]) * inv_dx_h[i])
                hz[i, j, k] = hz[i, j, k] + db_z[i, j, k] * curl


# --- CPML corrections, x axis (affects Ey, Ez and Hy, Hz) -------------------

@njit(parallel=True, cache=True)
def cpml_e_x(ey, ez, hy, hz, cb_y, cb_z, inv_dx,
             psi_ey_lo, psi_ez_lo, be_lo, ae_lo,
             psi_ey_hi, psi_ez_hi, be_hi, ae_hi, t):
    nx = hz.shape[0]
    ny = hz.shape[1]
    nz = hy.shape[2]
    for p in prange(1, t):
        for j in range(ny):
            for k in range(1, nz):
                d = (hz[p, j, k] - hz[p - 1, j, k]) * inv_dx
                psi = be_lo[p] * psi_ey_lo[p, j, k] + ae_lo[p] * d
                psi_ey_lo[p, j, k] = psi
                ey[p, j, k] -= cb_y[p, j, k] * psi
        for j in range(1, ny):
            for k in range(nz):
                d = (hy[p, j, k] - hy[p - 1, j, k]) * inv_dx
                psi = be_lo[p] * psi_ez_lo[p, j, k] + ae_lo[p] * d
                psi_ez_lo[p, j, k] = psi
                ez[p, j, k] += cb_z[p, j, k] * psi
    for p in prange(1, t):
        i = nx - t + p
        for j in range(ny):
            for k in range(1, nz):
                d = (hz[i, j, k] - hz[i - 1, j, k]) * inv_dx
                psi = be_hi[p] * psi_ey_hi[p, j, k] + ae_hi[p] * d
                psi_ey_hi[p, j, k] = psi
                ey[i, j, k] -= cb_y[i, j, k] * psi
        for j in range(1, ny):
            for k in range(nz):
                d = (hy[i, j, k] - hy[i - 1, j, k]) * inv_dx
                psi = be_hi[p] * psi_ez_hi[p, j, k] + ae_hi[p] * d
                psi_ez_hi[p, j, k] = psi
                ez[i, j, k] += cb_z[i, j, k] * psi


@njit(parallel=True, cache=True)
def cpml_h_x(ey, ez, hy, hz, db_y, db_z, inv_dx,
             psi_hy_lo, psi_hz_lo, bh_lo, ah_lo,
             psi_hy_hi, psi_hz_hi, bh_hi, ah_hi, t):
    nx = hz.shape[0]
    ny = hz.shape[1]
    nz = hy.shape[2]
    for p in prange(t):
        for j in range(ny + 1):
            for k in range(nz):
                d = (ez[p + 1, j, k] - ez[p, j, k]) * inv_dx
                psi = bh_lo[p] * psi_hy_lo[p, j, k] + ah_lo[p] * d
                psi_hy_lo[p, j, k] = psi
                hy[p, j, k] += db_y[p, j, k] * psi
        for j in range(ny):
            for k in range(nz + 1):
                d = (ey[p + 1, j, k] - ey[p, j, k]) * inv_dx
                psi = bh_lo[p] * psi_hz_lo[p, j, k] + ah_lo[p] * d
                psi_hz_lo[p, j, k] = psi
                hz[p, j, k] -= db_z[p, j, k] * psi
    for p in prange(t):
        i = nx - t + p
        for j in range(ny + 1):
            for k in range(nz):
                d = (ez[i + 1, j, k] - ez[i, j, k]) * inv_dx
                psi = bh_hi[p] * psi_hy_hi[p, j, k] + ah_hi[p] * d
                psi_hy_hi[p, j, k] = psi
                hy[i, j, k] += db_y[i, j, k] * psi
        for j in range(ny):
            for k in range(nz + 1):
                d = (ey[i + 1, j, k] - ey[i, j, k]) * inv_dx
                psi = bh_hi[p] * psi_hz_hi[p, j, k] + ah_hi[p] * d
                psi_hz_hi[p, j, k] = psi
                hz[i, j, k] -= db_z[i, j, k] * psi


# --- CPML corrections, y axis (affects Ez, Ex and Hz, Hx) -------------------

@njit(parallel=True, cache=True)
def cpml_e_y(ex, ez, hx, hz, cb_x, cb_z, inv_dy,
             psi_ez_lo, psi_ex_lo, be_lo, ae_lo,
             psi_ez_hi, psi_ex_hi, be_hi, ae_hi, t):
    nx = hz.shape[0]
    ny = hz.shape[1]
    nz = hx.shape[2]
    for i in prange(nx + 1):
        for p in range(1, t):
            j_hi = ny - t + p
            if 1 <= i < nx:
                for k in range(nz):
                    d = (hx[i, p, k] - hx[i, p - 1, k]) * inv_dy
                    psi = be_lo[p] * psi_ez_lo[i, p, k] + ae_lo[p] * d
                    psi_ez_lo[i, p, k] = psi
                    ez[i, p, k] -= cb_z[i, p, k] * psi
                    d = (hx[i, j_hi, k] - hx[i, j_hi - 1, k]) * inv_dy
                    psi = be_hi[p] * psi_ez_hi[i, p, k] + ae_hi[p] * d
                    psi_ez_hi[i, p, k] = psi
                    ez[i, j_hi, k] -= cb_z[i, j_hi, k] * psi
            if i < nx:
                for k in range(1, nz):
                    d = (hz[i, p, k] - hz[i, p - 1, k]) * inv_dy
                    psi = be_lo[p] * psi_ex_lo[i, p, k] + ae_lo[p] * d
                    psi_ex_lo[i, p, k] = psi
                    ex[i, p, k] += cb_x[i, p, k] * psi
                    d = (hz[i, j_hi, k] - hz[i, j_hi - 1, k]) * inv_dy
                    psi = be_hi[p] * psi_ex_hi[i, p, k] + ae_hi[p] * d
                    psi_ex_hi[i, p, k] = psi
                    ex[i, j_hi, k] += cb_x[i, j_hi, k] * psi


@njit(parallel=True, cache=True)
def cpml_h_y(ex, ez, hx, hz, db_x, db_z, inv_dy,
             psi_hz_lo, psi_hx_lo, bh_lo, ah_lo,
             psi_hz_hi, psi_hx_hi, bh_hi, ah_hi, t):
    nx = hz.shape[0]
    ny = hz.shape[1]
    nz = hx.shape[2]
    for i in prange(nx + 1):
        for p in range(t):
            j_hi = ny - t + p
            for k in range(nz):
                d = (ez[i, p + 1, k] - ez[i, p, k]) * inv_dy
                psi = bh_lo[p] * psi_hx_lo[i, p, k] + ah_lo[p] * d
                psi_hx_lo[i, p, k] = psi
                hx[i, p, k] -= db_x[i, p, k] * psi
                d = (ez[i, j_hi + 1, k] - ez[i, j_hi, k]) * inv_dy
                psi = bh_hi[p] * psi_hx_hi[i, p, k] + ah_hi[p] * d
                psi_hx_hi[i, p, k] = psi
                hx[i, j_hi, k] -= db_x[i, j_hi, k] * psi
            if i < nx:
                for k in range(nz + 1):
                    d = (ex[i, p + 1, k] - ex[i, p, k]) * inv_dy
                    psi = bh_lo[p] * psi_hz_lo[i, p, k] + ah_lo[p] * d
                    psi_hz_lo[i, p, k] = psi
                    hz[i, p, k] += db_z[i, p, k] * psi
                    d = (ex[i, j_hi + 1, k] - ex[i, j_hi, k]) * inv_dy
                    psi = bh_hi[p] * psi_hz_hi[i, p, k] + ah_hi[p] * d
                    psi_hz_hi[i, p, k] = psi
                    hz[i, j_hi, k] += db_z[i, j_hi, k] * psi


# --- CPML corrections, z axis (affects Ex, Ey and Hx, Hy) -------------------

@njit(parallel=True, cache=True)
def cpml_e_z(ex, ey, hx, hy, cb_x, cb_y, inv_dz,
             psi_ex_lo, psi_ey_lo, be_lo, ae_lo,
             psi_ex_hi, psi_ey_hi, be_hi, ae_hi, t):
    nx = hy.shape[0]
    ny = hx.shape[1]
    nz = hy.shape[2]
    for i in prange(nx + 1):
        for p in range(1, t):
            k_hi = nz - t + p
            if i < nx:
                for j in range(1, ny):
                    d = (hy[i, j, p] - hy[i, j, p - 1]) * inv_dz
                    psi = be_lo[p] * psi_ex_lo[i, j, p] + ae_lo[p] * d
                    psi_ex_lo[i, j, p] = psi
                    ex[i, j, p] -= cb_x[i, j, p] * psi
                    d = (hy[i, j, k_hi] - hy[i, j, k_hi - 1]) * inv_dz
                    psi = be_hi[p] * psi_ex_hi[i, j, p] + ae_hi[p] * d
                    psi_ex_hi[i, j, p] = psi
                    ex[i, j, k_hi] -= cb_x[i, j, k_hi] * psi
            if 1 <= i < nx:
                for j in range(ny):
                    d = (hx[i, j, p] - hx[i, j, p - 1]) * inv_dz
                    psi = be_lo[p] * psi_ey_lo[i, j, p] + ae_lo[p] * d
                    psi_ey_lo[i, j, p] = psi
                    ey[i, j, p] += cb_y[i, j, p] * psi
                    d = (hx[i, j, k_hi] - hx[i, j, k_hi - 1]) * inv_dz
                    psi = be_hi[p] * psi_ey_hi[i, j, p] + ae_hi[p] * d
                    psi_ey_hi[i, j, p] = psi
                    ey[i, j, k_hi] += cb_y[i, j, k_hi] * psi


@njit(parallel=True, cache=True)
def cpml_h_z(ex, ey, hx, hy, db_x, db_y, inv_dz,
             psi_hx_lo, psi_hy_lo, bh_lo, ah_lo,
             psi_hx_hi, psi_hy_hi, bh_hi, ah_hi, t):
    nx = hy.shape[0]
    ny = hx.shape[1]
    nz = hy.shape[2]
    for i in prange(nx + 1):
        for p in range(t):
            k_hi = nz - t + p
            for j in range(ny):
                d = (ey[i, j, p + 1] - ey[i, j, p]) * inv_dz
                psi = bh_lo[p] * psi_hx_lo[i, j, p] + ah_lo[p] * d
                psi_hx_lo[i, j, p] = psi
                hx[i, j, p] += db_x[i, j, p] * psi
                d = (ey[i, j, k_hi + 1] - ey[i, j, k_hi]) * inv_dz
                psi = bh_hi[p] * psi_hx_hi[i, j, p] + ah_hi[p] * d
                psi_hx_hi[i, j, p] = psi
                hx[i, j, k_hi] += db_x[i, j, k_hi] * psi
            if i < nx:
                for j in range(ny + 1):
                    d = (ex[i, j, p + 1] - ex[i, j, p]) * inv_dz
                    psi = bh_lo[p] * psi_hy_lo[i, j, p] + ah_lo[p] * d
                    psi_hy_lo[i, j, p] = psi
                    hy[i, j, p] -= db_y[i, j, p] * psi
                    d = (ex[i, j, k_hi + 1] - ex[i, j, k_hi]) * inv_dz
                    psi = bh_hi[p] * psi_hy_hi[i, j, p] + ah_hi[p] * d
                    psi_hy_hi[i, j, p] = psi
                    hy[i, j, k_hi] -= db_y[i, j, k_hi] * psi
