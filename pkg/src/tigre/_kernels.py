"""Compiled red-black sweep and residual kernels for the potential solve.

Neighbour couplings are stored as ``(nnb, ny, nx)`` coefficient arrays in the
order given by ``NEIGHBOURS`` (E, W, N, S); 1D grids (nnb == 2) use E, W only.
Stencil sums are written out by hand: routing them through a helper function
made the block sweep several times slower.
"""

import numba
import numpy as np

NEIGHBOURS = ((1, 0), (-1, 0), (0, 1), (0, -1))


@numba.njit(cache=True)
def sweep_scalar(sigma, f1, a11, k11, color):
    ny, nx = sigma.shape
    two_d = k11.shape[0] == 4
    for j in range(ny):
        jn = j + 1 if j + 1 < ny else 0
        js = j - 1 if j > 0 else ny - 1
        for i in range((j + color) % 2, nx, 2):
            ie = i + 1 if i + 1 < nx else 0
            iw = i - 1 if i > 0 else nx - 1
            nb = k11[0, j, i] * sigma[j, ie] + k11[1, j, i] * sigma[j, iw]
            if two_d:
                nb += k11[2, j, i] * sigma[jn, i] + k11[3, j, i] * sigma[js, i]
            sigma[j, i] = (f1[j, i] - nb) / a11[j, i]


@numba.njit(cache=True)
def sweep_block(sigma, chi, f1, f2, a11, a12, a21, a22, det, k1s, k1c, k2s, k2c, color):
    ny, nx = sigma.shape
    two_d = k1s.shape[0] == 4
    for j in range(ny):
        jn = j + 1 if j + 1 < ny else 0
        js = j - 1 if j > 0 else ny - 1
        for i in range((j + color) % 2, nx, 2):
            ie = i + 1 if i + 1 < nx else 0
            iw = i - 1 if i > 0 else nx - 1
            sE = sigma[j, ie]
            sW = sigma[j, iw]
            cE = chi[j, ie]
            cW = chi[j, iw]
            b1 = f1[j, i] - (k1s[0, j, i] * sE + k1s[1, j, i] * sW + k1c[0, j, i] * cE + k1c[1, j, i] * cW)
            b2 = f2[j, i] - (k2s[0, j, i] * sE + k2s[1, j, i] * sW + k2c[0, j, i] * cE + k2c[1, j, i] * cW)
            if two_d:
                sN = sigma[jn, i]
                sS = sigma[js, i]
                cN = chi[jn, i]
                cS = chi[js, i]
                b1 -= k1s[2, j, i] * sN + k1s[3, j, i] * sS + k1c[2, j, i] * cN + k1c[3, j, i] * cS
                b2 -= k2s[2, j, i] * sN + k2s[3, j, i] * sS + k2c[2, j, i] * cN + k2c[3, j, i] * cS
            d = det[j, i]
            sigma[j, i] = (b1 * a22[j, i] - a12[j, i] * b2) / d
            chi[j, i] = (a11[j, i] * b2 - a21[j, i] * b1) / d


@numba.njit(cache=True)
def residual_scalar(sigma, f1, a11, k11, color=-1):
    """Squared residual norm over one colour, or every cell when color < 0."""
    ny, nx = sigma.shape
    two_d = k11.shape[0] == 4
    step = 1 if color < 0 else 2
    num = 0.0
    for j in range(ny):
        jn = j + 1 if j + 1 < ny else 0
        js = j - 1 if j > 0 else ny - 1
        start = 0 if color < 0 else (j + color) % 2
        for i in range(start, nx, step):
            ie = i + 1 if i + 1 < nx else 0
            iw = i - 1 if i > 0 else nx - 1
            r = a11[j, i] * sigma[j, i] - f1[j, i] + k11[0, j, i] * sigma[j, ie] + k11[1, j, i] * sigma[j, iw]
            if two_d:
                r += k11[2, j, i] * sigma[jn, i] + k11[3, j, i] * sigma[js, i]
            num += r * r
    return num


@numba.njit(cache=True)
def residual_block(sigma, chi, f1, f2, a11, a12, a21, a22, k1s, k1c, k2s, k2c, color=-1):
    ny, nx = sigma.shape
    two_d = k1s.shape[0] == 4
    step = 1 if color < 0 else 2
    num = 0.0
    for j in range(ny):
        jn = j + 1 if j + 1 < ny else 0
        js = j - 1 if j > 0 else ny - 1
        start = 0 if color < 0 else (j + color) % 2
        for i in range(start, nx, step):
            ie = i + 1 if i + 1 < nx else 0
            iw = i - 1 if i > 0 else nx - 1
            s0 = sigma[j, i]
            c0 = chi[j, i]
            sE = sigma[j, ie]
            sW = sigma[j, iw]
            cE = chi[j, ie]
            cW = chi[j, iw]
            r1 = a11[j, i] * s0 + a12[j, i] * c0 - f1[j, i]
            r1 += k1s[0, j, i] * sE + k1s[1, j, i] * sW + k1c[0, j, i] * cE + k1c[1, j, i] * cW
            r2 = a21[j, i] * s0 + a22[j, i] * c0 - f2[j, i]
            r2 += k2s[0, j, i] * sE + k2s[1, j, i] * sW + k2c[0, j, i] * cE + k2c[1, j, i] * cW
            if two_d:
                sN = sigma[jn, i]
                sS = sigma[js, i]
                cN = chi[jn, i]
                cS = chi[js, i]
                r1 += k1s[2, j, i] * sN + k1s[3, j, i] * sS + k1c[2, j, i] * cN + k1c[3, j, i] * cS
                r2 += k2s[2, j, i] * sN + k2s[3, j, i] * sS + k2c[2, j, i] * cN + k2c[3, j, i] * cS
            num += r1 * r1 + r2 * r2
    return num


@numba.njit(cache=True)
def _check_colour(shape):
    # on odd periodic extents the colouring is not a true 2-colouring, so sum every cell
    ny, nx = shape
    return 0 if nx % 2 == 0 and (ny == 1 or ny % 2 == 0) else -1


@numba.njit(cache=True)
def solve_scalar(sigma, f1, a11, k11, target, max_sweeps, history):
    """Sweep until sqrt(residual_sq) <= target; history[n] holds the residual after n sweeps.

    After a black pass every black cell satisfies its own equation exactly, so
    only red cells are summed from then on.
    """
    res = np.sqrt(residual_scalar(sigma, f1, a11, k11))
    history[0] = res
    rc = _check_colour(sigma.shape)
    n = 0
    while res > target and n < max_sweeps and np.isfinite(res):
        sweep_scalar(sigma, f1, a11, k11, 0)
        sweep_scalar(sigma, f1, a11, k11, 1)
        n += 1
        res = np.sqrt(residual_scalar(sigma, f1, a11, k11, rc))
        history[n] = res
    return n


@numba.njit(cache=True)
def solve_block(sigma, chi, f1, f2, a11, a12, a21, a22, det, k1s, k1c, k2s, k2c, target, max_sweeps, history):
    res = np.sqrt(residual_block(sigma, chi, f1, f2, a11, a12, a21, a22, k1s, k1c, k2s, k2c))
    history[0] = res
    rc = _check_colour(sigma.shape)
    n = 0
    while res > target and n < max_sweeps and np.isfinite(res):
        sweep_block(sigma, chi, f1, f2, a11, a12, a21, a22, det, k1s, k1c, k2s, k2c, 0)
        sweep_block(sigma, chi, f1, f2, a11, a12, a21, a22, det, k1s, k1c, k2s, k2c, 1)
        n += 1
        res = np.sqrt(residual_block(sigma, chi, f1, f2, a11, a12, a21, a22, k1s, k1c, k2s, k2c, rc))
        history[n] = res
    return n


def neighbour_sum(k: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Vectorised sum over neighbours of ``k[nb] * f[neighbour nb]``."""
    out = np.zeros_like(f)
    for n in range(k.shape[0]):
        di, dj = NEIGHBOURS[n]
        out += k[n] * np.roll(f, (-dj, -di), axis=(0, 1))
    return out
