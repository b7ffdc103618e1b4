"""Pure-Python exposure kernel. Mirrors ``_sim.pyx`` operation for operation."""

from __future__ import annotations

import math

import numpy as np


def run_exposure(i_in, w, bias, p, learn, counts, rec=None):
    M = i_in.shape[0]
    N = bias.shape[0]
    dt = p[0]
    n_steps = int(p[1])
    c_in, g_in, el_in, vt_in = p[2], p[3], p[4], p[5]
    c_out, g_out, el_out, vt_out = p[6], p[7], p[8], p[9]
    exc_i0, exc_tm, exc_ts = p[10], p[11], p[12]
    inh_i0, inh_tm, inh_ts = p[13], p[14], p[15]
    lat = p[16]
    a_up, a_down, mu, tau_up, tau_down, w_max = p[17], p[18], p[19], p[20], p[21], p[22]

    cur_in = [float(v) for v in i_in]
    bias_l = [float(v) for v in bias]
    W = [[float(v) for v in row] for row in w]
    counts_l = [int(v) for v in counts]
    rec_n = [0] * (M + N)

    v_in = [el_in] * M
    v_out = [el_out] * N
    ea = [0.0] * M
    eb = [0.0] * M
    ia = [0.0] * N
    ib = [0.0] * N
    last_pre = [-1.0] * M
    last_post = [-1.0] * N
    pre_free = [[0] * N for _ in range(M)]
    post_free = [[0] * N for _ in range(M)]
    spk_in = [0] * M
    spk_out = [0] * N

    k_in = dt / c_in
    k_out = dt / c_out
    dea = math.exp(-dt / exc_tm)
    deb = math.exp(-dt / exc_ts)
    dia = math.exp(-dt / inh_tm)
    dib = math.exp(-dt / inh_ts)
    inh_scale = inh_i0 * lat

    for k in range(n_steps):
        t_next = (k + 1) * dt

        for i in range(M):
            v = v_in[i] + k_in * (-g_in * (v_in[i] - el_in) + cur_in[i])
            if v >= vt_in:
                v = el_in
                spk_in[i] = 1
                counts_l[i] += 1
                if rec is not None:
                    rec[i, rec_n[i]] = k + 1
                    rec_n[i] += 1
            v_in[i] = v

        for j in range(N):
            s = 0.0
            for i in range(M):
                s += W[i][j] * (ea[i] - eb[i])
            si = 0.0
            for q in range(N):
                if q != j:
                    si += ia[q] - ib[q]
            cur = exc_i0 * s + inh_scale * si + bias_l[j]
            v = v_out[j] + k_out * (-g_out * (v_out[j] - el_out) + cur)
            if v >= vt_out:
                v = el_out
                spk_out[j] = 1
                counts_l[M + j] += 1
                if rec is not None:
                    rec[M + j, rec_n[M + j]] = k + 1
                    rec_n[M + j] += 1
            v_out[j] = v

        if learn:
            for j in range(N):
                if not spk_out[j]:
                    continue
                for i in range(M):
                    if pre_free[i][j] and last_pre[i] >= 0.0:
                        wij = W[i][j]
                        wij += a_up * math.pow(1.0 - wij / w_max, mu) * math.exp(-(t_next - last_pre[i]) / tau_up)
                        W[i][j] = min(max(wij, 0.0), w_max)
                        pre_free[i][j] = 0
                    post_free[i][j] = 1
                last_post[j] = t_next
            for i in range(M):
                if not spk_in[i]:
                    continue
                for j in range(N):
                    if post_free[i][j] and last_post[j] >= 0.0 and last_post[j] < t_next:
                        wij = W[i][j]
                        wij += a_down * math.pow(wij / w_max, mu) * math.exp((last_post[j] - t_next) / tau_down)
                        W[i][j] = min(max(wij, 0.0), w_max)
                        post_free[i][j] = 0
                    pre_free[i][j] = 1
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

    if learn:
        w[:, :] = np.asarray(W)
    counts[:] = counts_l
    for v in v_in + v_out:
        if not math.isfinite(v):
            return 1
    return 0
