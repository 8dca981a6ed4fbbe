"""Compare the numba-compiled kernels with their interpreted twins.

    python benchmarks/bench_kernels.py --nodes 20000 --repeat 3

Kernel timings call both versions in-process through ``retnet._jit``.  The
end-to-end Louvain timing runs a fresh interpreter per backend, toggled with
``RETNET_DISABLE_JIT``, and checks that both produce the same partition.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from retnet import kernels
from retnet._jit import implementation
from retnet.community import symmetrized_weights
from retnet.synth import scale_free_digraph


def time_call(fn, setup, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        args = setup()
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_kernels(graph, repeat):
    indptr, indices, weights = symmetrized_weights(graph)
    fweights = weights.astype(np.float64)
    node_deg = graph.total_degrees.astype(np.float64)
    gamma = 1.0 / (2.0 * graph.total_weight)
    n = graph.n
    order = np.random.default_rng(0).permutation(n)

    def move_args():
        acc, seen, touched = kernels.scratch(n)
        return (indptr, indices, fweights, node_deg, node_deg.copy(), gamma,
                np.arange(n, dtype=np.int64), np.ones(n, dtype=np.int64),
                np.zeros(n, dtype=np.int64), np.zeros(1, dtype=np.int64), order, 1e-7 * graph.total_weight,
                acc, seen, touched)

    def lp_args():
        acc, seen, touched = kernels.scratch(n, float_acc=False)
        return indptr, indices, weights, np.arange(n, dtype=np.int64), order, acc, seen, touched

    rows = []
    for name, setup in (("move_sweep", move_args), ("lp_sweep", lp_args)):
        implementation(name, True)(*setup())  # compile outside the timed region
        t_jit, r_jit = time_call(implementation(name, True), setup, repeat)
        t_py, r_py = time_call(implementation(name, False), setup, max(1, repeat // 3))
        assert r_jit == r_py, f"{name}: backends disagree ({r_jit} vs {r_py})"
        rows.append((name, t_py, t_jit))
    return rows


_E2E = """
import hashlib, time
from retnet import louvain, DetectorConfig
from retnet.synth import scale_free_digraph
g = scale_free_digraph({n}, seed=1)
louvain(scale_free_digraph(50, seed=2))
t0 = time.perf_counter()
p = louvain(g, DetectorConfig(seed=0))
print(time.perf_counter() - t0, hashlib.sha256(p.labels.tobytes()).hexdigest())
"""


def bench_louvain(n):
    out = {}
    for flag, name in (("0", "numba"), ("1", "python")):
        env = dict(os.environ, RETNET_DISABLE_JIT=flag)
        res = subprocess.run([sys.executable, "-c", _E2E.format(n=n)], env=env, check=True,
                             capture_output=True, text=True)
        secs, digest = res.stdout.split()
        out[name] = (float(secs), digest)
    assert out["numba"][1] == out["python"][1], "backends produced different partitions"
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--nodes", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-louvain", action="store_true", help="only time single kernel sweeps")
    args = ap.parse_args()

    g = scale_free_digraph(args.nodes, seed=1)
    print(f"graph: n={g.n} m={g.m} total_weight={g.total_weight}")
    print(f"{'kernel':<14}{'python [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, t_py, t_jit in bench_kernels(g, args.repeat):
        print(f"{name:<14}{t_py:>12.4f}{t_jit:>12.4f}{t_py / t_jit:>9.1f}x")
    if not args.skip_louvain:
        e2e = bench_louvain(args.nodes)
        t_jit, t_py = e2e["numba"][0], e2e["python"][0]
        print(f"{'louvain':<14}{t_py:>12.4f}{t_jit:>12.4f}{t_py / t_jit:>9.1f}x  (identical partitions)")


if __name__ == "__main__":
    main()
