# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled ADMM inner loops; see ``_kernels_py`` for the reference semantics.

Complex arithmetic is spelled out on real/imaginary parts: Cython otherwise
promotes complex-by-real products and quotients to full complex operations.
"""
import numpy as np


CUBE_ROOT = 0
DUAL_ASCENT = 1


def mode_sweep(const double complex[::1] base, double nframes,
               double complex[:, ::1] S, double complex[::1] total,
               double[::1] omegas, const double[::1] grid, double alpha):
    cdef Py_ssize_t K = S.shape[0], n = S.shape[1], k, i
    cdef double d, inv, energy, moment, p, tr, ti, sr, si, two_alpha = 2.0 * alpha
    cdef double complex t
    for i in range(n):
        t = 0
        for k in range(K):
            t = t + S[k, i]
        total[i] = t
    for k in range(K):
        energy = 0.0
        moment = 0.0
        for i in range(n):
            tr = total[i].real - S[k, i].real
            ti = total[i].imag - S[k, i].imag
            d = grid[i] - omegas[k]
            inv = 1.0 / (nframes + two_alpha * d * d)
            sr = (base[i].real - nframes * tr) * inv
            si = (base[i].imag - nframes * ti) * inv
            S[k, i].real = sr
            S[k, i].imag = si
            total[i].real = tr + sr
            total[i].imag = ti + si
            p = sr * sr + si * si
            energy += p
            moment += grid[i] * p
        if energy > 0.0:
            omegas[k] = moment / energy


cdef extern from "_cbrt.h":
    void jvmd_principal_cbrt(double *zr, double *zi, double *wr, double *wi, long n) nogil


def principal_cbrt(z):
    z = np.asarray(z, dtype=np.complex128)
    flat = np.ascontiguousarray(z).ravel()
    cdef Py_ssize_t n = flat.shape[0]
    cdef double[::1] zr = np.ascontiguousarray(flat.real)
    cdef double[::1] zi = np.ascontiguousarray(flat.imag)
    wr_arr = np.empty(n)
    wi_arr = np.empty(n)
    cdef double[::1] wr = wr_arr
    cdef double[::1] wi = wi_arr
    if n:
        jvmd_principal_cbrt(&zr[0], &zi[0], &wr[0], &wi[0], n)
    return (wr_arr + 1j * wi_arr).reshape(z.shape)


def frame_sweep(const double complex[:, ::1] Y, const double complex[::1] total,
                double complex[:, ::1] b, double complex[:, ::1] lam,
                double noise_gain, int rule, double tau):
    cdef Py_ssize_t M = Y.shape[0], n = Y.shape[1], j, i
    cdef double rr, ri, br, bi
    cdef bint cube = rule == 0
    usum_arr = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] usum = usum_arr
    scratch = np.empty((4, n))
    cdef double[:, ::1] w = scratch
    for j in range(M):
        for i in range(n):
            rr = Y[j, i].real - total[i].real
            ri = Y[j, i].imag - total[i].imag
            br = (rr + 0.5 * lam[j, i].real) * noise_gain
            bi = (ri + 0.5 * lam[j, i].imag) * noise_gain
            b[j, i].real = br
            b[j, i].imag = bi
            if cube:
                w[0, i] = 4.0 * (rr - br + 0.5 * lam[j, i].real)
                w[1, i] = 4.0 * (ri - bi + 0.5 * lam[j, i].imag)
            else:
                lam[j, i].real = lam[j, i].real + tau * (rr - br)
                lam[j, i].imag = lam[j, i].imag + tau * (ri - bi)
                usum[i].real = usum[i].real + (Y[j, i].real - br + 0.5 * lam[j, i].real)
                usum[i].imag = usum[i].imag + (Y[j, i].imag - bi + 0.5 * lam[j, i].imag)
        if cube and n:
            jvmd_principal_cbrt(&w[0, 0], &w[1, 0], &w[2, 0], &w[3, 0], n)
            for i in range(n):
                lam[j, i].real = w[2, i]
                lam[j, i].imag = w[3, i]
                usum[i].real = usum[i].real + (Y[j, i].real - b[j, i].real + 0.5 * w[2, i])
                usum[i].imag = usum[i].imag + (Y[j, i].imag - b[j, i].imag + 0.5 * w[3, i])
    return usum_arr


def kappa(const double complex[:, ::1] S, const double complex[:, ::1] S_prev):
    cdef Py_ssize_t K = S.shape[0], n = S.shape[1], k, i
    cdef double num, den, dr, di, out = 0.0
    cdef bint any_energy = False
    for k in range(K):
        num = 0.0
        den = 0.0
        for i in range(n):
            dr = S[k, i].real - S_prev[k, i].real
            di = S[k, i].imag - S_prev[k, i].imag
            num += dr * dr + di * di
            den += S[k, i].real * S[k, i].real + S[k, i].imag * S[k, i].imag
        if den > 0.0:
            out += num / den
            any_energy = True
        elif num > 0.0:
            out += 1.0
    return out if any_energy else 0.0
