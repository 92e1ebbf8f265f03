"""Compare the compiled and pure-Python sweep kernels.

Runs identical sweeps through both backends on one synthetic corpus,
reports token throughput, and verifies that the final states are
bit-for-bit identical (they share one RNG stream and one arithmetic
shape, so any divergence is a bug, not noise).

    python benchmarks/bench_sampler.py [--docs 2000] [--sweeps 20]
"""

import argparse
import time

import numpy as np

from koslinker.corpus import SyntheticSpec, generate_synthetic
from koslinker.plltm import Hyperparameters, initialize
from koslinker.sampler import _gibbs_py


def run_backend(impl, corpus, hyper, sweeps):
    state = initialize(corpus, hyper)
    start = time.perf_counter()
    for _ in range(sweeps):
        impl.sweep_once(
            state.doc_start_w, state.token_w, state.z_w,
            state.doc_start_d, state.token_d, state.z_d,
            state.label_start, state.label_flat, state.n_dk,
            state.n_kv_w, state.n_k_w, state.n_kv_d, state.n_k_d,
            hyper.alpha, hyper.beta_words, hyper.beta_desc, state.rng_state,
        )
    elapsed = time.perf_counter() - start
    return state, elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--docs", type=int, default=2000)
    parser.add_argument("--sweeps", type=int, default=20)
    parser.add_argument("--topics", type=int, default=10)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()

    spec = SyntheticSpec(k=args.topics, v_words=500, v_desc=200, docs=args.docs,
                         words_per_doc=50, descriptors_per_doc=10,
                         labels_per_doc=2, concentration=0.05, seed=args.seed)
    corpus, _, _ = generate_synthetic(spec)
    hyper = Hyperparameters(iterations=10, burn_in=5, sample_lag=1, seed=args.seed)
    tokens = corpus.n_word_tokens + corpus.n_descriptor_tokens
    total = tokens * args.sweeps
    print(f"corpus: {args.docs} docs, {tokens} tokens, K={args.topics}; "
          f"{args.sweeps} sweeps = {total} token updates\n")

    backends = []
    try:
        from koslinker.sampler import _gibbs_cy
        backends.append(("cython", _gibbs_cy))
    except ImportError:
        print("compiled kernel not built; benchmarking the fallback only\n")
    backends.append(("python", _gibbs_py))

    results = {}
    for name, impl in backends:
        state, elapsed = run_backend(impl, corpus, hyper, args.sweeps)
        results[name] = (state, elapsed)
        print(f"{name:>8}: {elapsed:8.2f}s  {total / elapsed / 1e6:8.2f} M tokens/s")

    if len(results) == 2:
        a, b = results["cython"], results["python"]
        identical = (
            np.array_equal(a[0].z_w, b[0].z_w)
            and np.array_equal(a[0].z_d, b[0].z_d)
            and np.array_equal(a[0].n_kv_w, b[0].n_kv_w)
            and np.array_equal(a[0].n_kv_d, b[0].n_kv_d)
            and a[0].rng_state[0] == b[0].rng_state[0]
        )
        print(f"\nspeedup: {b[1] / a[1]:.1f}x; final states identical: {identical}")
        if not identical:
            raise SystemExit("backend divergence detected")


if __name__ == "__main__":
    main()
