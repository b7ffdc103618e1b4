# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled exposure kernel. Keep in lock-step with ``_sim_py.py``."""

from libc.math cimport exp, pow, isfinite
from libc.stdlib cimport calloc, free

import numpy as np


def run_exposure(const double[::1] i_in, double[:, ::1] w, const double[::1] bias,
                 const double[::1] p, bint learn, long[::1] counts, int[:, ::1] rec=None):
    cdef Py_ssize_t M = i_in.shape[0]
    cdef Py_ssize_t N = bias.shape[0]
    cdef double dt = p[0]
    cdef long n_steps = <long>p[1]
    cdef double c_in = p[2], g_in = p[3], el_in = p[4], vt_in = p[5]
    cdef double c_out = p[6], g_out = p[7], el_out = p[8], vt_out = p[9]
    cdef double exc_i0 = p[10], exc_tm = p[11], exc_ts = p[12]
    cdef double inh_i0 = p[13], inh_tm = p[14], inh_ts = p[15]
    cdef double lat = p[16]
    cdef double a_up = p[17], a_down = p[18], mu = p[19]
    cdef double tau_up = p[20], tau_down = p[21], w_max = p[22]
    cdef bint record = rec is not None

    cdef double *v_in = <double *>calloc(M, sizeof(double))
    cdef double *v_out = <double *>calloc(N, sizeof(double))
    cdef double *ea = <double *>calloc(M, sizeof(double))
    cdef double *eb = <double *>calloc(M, sizeof(double))
    cdef double *ia = <double *>calloc(N, sizeof(double))
    cdef double *ib = <double *>calloc(N, sizeof(double))
    cdef double *last_pre = <double *>calloc(M, sizeof(double))
    cdef double *last_post = <double *>calloc(N, sizeof(double))
    cdef char *pre_free = <char *>calloc(M * N, sizeof(char))
    cdef char *post_free = <char *>calloc(M * N, sizeof(char))
    cdef char *spk_in = <char *>calloc(M, sizeof(char))
    cdef char *spk_out = <char *>calloc(N, sizeof(char))
    cdef long *rec_n = <long *>calloc(M + N, sizeof(long))
    if (v_in == NULL or v_out == NULL or ea == NULL or eb == NULL or ia == NULL
            or ib == NULL or last_pre == NULL or last_post == NULL or pre_free == NULL
            or post_free == NULL or spk_in == NULL or spk_out == NULL or rec_n == NULL):
        free(v_in); free(v_out); free(ea); free(eb); free(ia); free(ib)
        free(last_pre); free(last_post); free(pre_free); free(post_free)
        free(spk_in); free(spk_out); free(rec_n)
        raise MemoryError()

    cdef Py_ssize_t i, j, q
    cdef long k
    cdef double v, s, si, cur, wij, t_next
    cdef double k_in = dt / c_in
    cdef double k_out = dt / c_out
    cdef double dea = exp(-dt / exc_tm)
    cdef double deb = exp(-dt / exc_ts)
    cdef double dia = exp(-dt / inh_tm)
    cdef double dib = exp(-dt / inh_ts)
    cdef double inh_scale = inh_i0 * lat
    cdef int status = 0

    for i in range(M):
        v_in[i] = el_in
        last_pre[i] = -1.0
    for j in range(N):
        v_out[j] = el_out
        last_post[j] = -1.0

    for k in range(n_steps):
        t_next = (k + 1) * dt

        for i in range(M):
            v = v_in[i] + k_in * (-g_in * (v_in[i] - el_in) + i_in[i])
            if v >= vt_in:
                v = el_in
                spk_in[i] = 1
                counts[i] += 1
                if record:
                    rec[i, rec_n[i]] = k + 1
                    rec_n[i] += 1
            v_in[i] = v

        for j in range(N):
            s = 0.0
            for i in range(M):
                s += w[i, j] * (ea[i] - eb[i])
            si = 0.0
            for q in range(N):
                if q != j:
                    si += ia[q] - ib[q]
            cur = exc_i0 * s + inh_scale * si + bias[j]
            v = v_out[j] + k_out * (-g_out * (v_out[j] - el_out) + cur)
            if v >= vt_out:
                v = el_out
                spk_out[j] = 1
                counts[M + j] += 1
                if record:
                    rec[M + j, rec_n[M + j]] = k + 1
                    rec_n[M + j] += 1
            v_out[j] = v

        if learn:
            for j in range(N):
                if not spk_out[j]:
                    continue
                for i in range(M):
                    if pre_free[i * N + j] and last_pre[i] >= 0.0:
                        wij = w[i, j]
                        wij += a_up * pow(1.0 - wij / w_max, mu) * exp(-(t_next - last_pre[i]) / tau_up)
                        w[i, j] = min(max(wij, 0.0), w_max)
                        pre_free[i * N + j] = 0
                    post_free[i * N + j] = 1
                last_post[j] = t_next
            for i in range(M):
                if not spk_in[i]:
                    continue
                for j in range(N):
                    if post_free[i * N + j] and last_post[j] >= 0.0 and last_post[j] < t_next:
                        wij = w[i, j]
                        wij += a_down * pow(wij / w_max, mu) * exp((last_post[j] - t_next) / tau_down)
                        w[i, j] = min(max(wij, 0.0), w_max)
                        post_free[i * N + j] = 0
                    pre_free[i * N + j] = 1
                last_pre[i] = t_next

        for i in range(M):
            ea[i] *= dea
            eb[i] *= deb
            if spk_in[i]:
                ea[i] += 1.0
                eb[i] += 1.0
                spk_in[i] = 0
        for j in range(N):
            ia[j] *= dia
            ib[j] *= dib
            if spk_out[j]:
                ia[j] += 1.0
                ib[j] += 1.0
                spk_out[j] = 0

    for i in range(M):
        if not isfinite(v_in[i]):
            status = 1
    for j in range(N):
        if not isfinite(v_out[j]):
            status = 1

    free(v_in); free(v_out); free(ea); free(eb); free(ia); free(ib)
    free(last_pre); free(last_post); free(pre_free); free(post_free)
    free(spk_in); free(spk_out); free(rec_n)
    return status
