"""Pure-Python sweep kernel: the portable twin of the compiled one.

Must stay bit-for-bit interchangeable with ``_gibbs_cy``: same token visit
order (document, then language, then position), same
decrement-sample-increment discipline, same floating-point expression
shapes, same splitmix64 stream. The cross-backend equality test in the
suite holds both twins to that contract, so any change here needs the
mirror change there.

The hot loop runs over plain Python lists (scalar indexing into ndarrays
is several times slower); arrays are copied in on entry and written back
on exit.
"""

from __future__ import annotations

BACKEND_NAME = "python"

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2POW53 = 1.0 / 9007199254740992.0


def sweep_once(doc_start_w, token_w, z_w,
               doc_start_d, token_d, z_d,
               label_start, label_flat, n_dk,
               n_kv_w, n_k_w, n_kv_d, n_k_d,
               alpha, beta_w, beta_d, rng_state):
    """Resample every token of every document once, in place."""
    n_docs = len(doc_start_w) - 1
    v_words = n_kv_w.shape[1]
    v_desc = n_kv_d.shape[1]
    vbeta_w = v_words * beta_w
    vbeta_d = v_desc * beta_d

    dsw = doc_start_w.tolist()
    dsd = doc_start_d.tolist()
    lstart = label_start.tolist()
    lflat = label_flat.tolist()
    tok_w = token_w.tolist()
    tok_d = token_d.tolist()
    zz_w = z_w.tolist()
    zz_d = z_d.tolist()
    ndk = n_dk.tolist()
    nkv_w = n_kv_w.reshape(-1).tolist()
    nkv_d = n_kv_d.reshape(-1).tolist()
    nk_w = n_k_w.tolist()
    nk_d = n_k_d.tolist()

    max_labels = 0
    for d in range(n_docs):
        max_labels = max(max_labels, lstart[d + 1] - lstart[d])
    cum = [0.0] * max(max_labels, 1)

    state = int(rng_state[0])

    for d in range(n_docs):
        lbase = lstart[d]
        n_labels = lstart[d + 1] - lbase
        for lang in (0, 1):
            if lang == 0:
                start, stop = dsw[d], dsw[d + 1]
                tok, zz, nkv, nk = tok_w, zz_w, nkv_w, nk_w
                beta, vbeta, width = beta_w, vbeta_w, v_words
            else:
                start, stop = dsd[d], dsd[d + 1]
                tok, zz, nkv, nk = tok_d, zz_d, nkv_d, nk_d
                beta, vbeta, width = beta_d, vbeta_d, v_desc
            for i in range(start, stop):
                v = tok[i]
                old = zz[i]

                j_old = 0
                while lflat[lbase + j_old] != old:
                    j_old += 1
                ndk[lbase + j_old] -= 1
                nkv[old * width + v] -= 1
                nk[old] -= 1

                total = 0.0
                for j in range(n_labels):
                    k = lflat[lbase + j]
                    w = (ndk[lbase + j] + alpha) * (nkv[k * width + v] + beta) \
                        / (nk[k] + vbeta)
                    total += w
                    cum[j] = total

                state = (state + _GAMMA) & _MASK64
                r = state
                r = ((r ^ (r >> 30)) * _MIX1) & _MASK64
                r = ((r ^ (r >> 27)) * _MIX2) & _MASK64
                r ^= r >> 31
                u = ((r >> 11) * _INV_2POW53) * total

                j_new = n_labels - 1
                for j in range(n_labels):
                    if u < cum[j]:
                        j_new = j
                        break
                k_new = lflat[lbase + j_new]

                ndk[lbase + j_new] += 1
                nkv[k_new * width + v] += 1
                nk[k_new] += 1
                zz[i] = k_new

    z_w[:] = zz_w
    z_d[:] = zz_d
    n_dk[:] = ndk
    n_kv_w.reshape(-1)[:] = nkv_w
    n_kv_d.reshape(-1)[:] = nkv_d
    n_k_w[:] = nk_w
    n_k_d[:] = nk_d
    rng_state[0] = state
