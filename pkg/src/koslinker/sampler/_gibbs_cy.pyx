# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled sweep kernel: the fast twin of ``_gibbs_py``.

Bit-for-bit interchangeable with the pure-Python kernel: same visit order,
same splitmix64 stream, same floating-point expression shapes (the build
disables FP contraction so the C arithmetic rounds exactly like CPython's).
Change both twins together or the cross-backend equality test will fail.
"""

import numpy as np

from libc.stdint cimport int32_t, int64_t, uint64_t

BACKEND_NAME = "cython"

cdef double _INV_2POW53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _next_u64(uint64_t *state) noexcept nogil:
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline void _resample_range(
    int64_t start, int64_t stop,
    int32_t[::1] tok, int32_t[::1] zz,
    int64_t lbase, int64_t n_labels, int32_t[::1] lflat,
    int64_t[::1] ndk, int64_t[:, ::1] nkv, int64_t[::1] nk,
    double alpha, double beta, double vbeta,
    double *cum, uint64_t *state,
) noexcept nogil:
    cdef int64_t i, j, j_old, j_new
    cdef int32_t v, old, k, k_new
    cdef double w, total, u
    cdef uint64_t r
    for i in range(start, stop):
        v = tok[i]
        old = zz[i]

        j_old = 0
        while lflat[lbase + j_old] != old:
            j_old += 1
        ndk[lbase + j_old] -= 1
        nkv[old, v] -= 1
        nk[old] -= 1

        total = 0.0
        for j in range(n_labels):
            k = lflat[lbase + j]
            w = (ndk[lbase + j] + alpha) * (nkv[k, v] + beta) / (nk[k] + vbeta)
            total += w
            cum[j] = total

        r = _next_u64(state)
        u = ((<double>(r >> 11)) * _INV_2POW53) * total

        j_new = n_labels - 1
        for j in range(n_labels):
            if u < cum[j]:
                j_new = j
                break
        k_new = lflat[lbase + j_new]

        ndk[lbase + j_new] += 1
        nkv[k_new, v] += 1
        nk[k_new] += 1
        zz[i] = k_new


def sweep_once(doc_start_w, token_w, z_w,
               doc_start_d, token_d, z_d,
               label_start, label_flat, n_dk,
               n_kv_w, n_k_w, n_kv_d, n_k_d,
               double alpha, double beta_w, double beta_d, rng_state):
    """Resample every token of every document once, in place."""
    cdef int64_t[::1] dsw = doc_start_w
    cdef int32_t[::1] tw = token_w
    cdef int32_t[::1] zw = z_w
    cdef int64_t[::1] dsd = doc_start_d
    cdef int32_t[::1] td = token_d
    cdef int32_t[::1] zd = z_d
    cdef int64_t[::1] lstart = label_start
    cdef int32_t[::1] lflat = label_flat
    cdef int64_t[::1] ndk = n_dk
    cdef int64_t[:, ::1] nkvw = n_kv_w
    cdef int64_t[::1] nkw = n_k_w
    cdef int64_t[:, ::1] nkvd = n_kv_d
    cdef int64_t[::1] nkd = n_k_d
    cdef uint64_t[::1] st = rng_state

    cdef int64_t n_docs = dsw.shape[0] - 1
    cdef double vbeta_w = <double>nkvw.shape[1] * beta_w
    cdef double vbeta_d = <double>nkvd.shape[1] * beta_d

    cdef int64_t d, lbase, n_labels
    cdef int64_t max_labels = 1
    for d in range(n_docs):
        if lstart[d + 1] - lstart[d] > max_labels:
            max_labels = lstart[d + 1] - lstart[d]
    cum_arr = np.empty(max_labels, dtype=np.float64)
    cdef double[::1] cum = cum_arr

    cdef uint64_t state = st[0]
    with nogil:
        for d in range(n_docs):
            lbase = lstart[d]
            n_labels = lstart[d + 1] - lbase
            _resample_range(dsw[d], dsw[d + 1], tw, zw,
                            lbase, n_labels, lflat, ndk, nkvw, nkw,
                            alpha, beta_w, vbeta_w, &cum[0], &state)
            _resample_range(dsd[d], dsd[d + 1], td, zd,
                            lbase, n_labels, lflat, ndk, nkvd, nkd,
                            alpha, beta_d, vbeta_d, &cum[0], &state)
    st[0] = state
