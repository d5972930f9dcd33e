"""Compiled vs pure-Python kernels on the workloads the solver generates.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are fed identical inputs and their outputs compared exactly
before timing.
"""
import argparse
import random
import time

from cartanhom import _pykernels as py
from cartanhom.families import FamilyConfig
from cartanhom.superpoly import random_homogeneous
from cartanhom.verify import random_element

try:
    from cartanhom import _ckernels as cy
except ImportError:
    cy = None


def workloads(seed=3):
    rng = random.Random(seed)
    out = []
    for cfg in (FamilyConfig("W", 4, 4), FamilyConfig("K", 5, 4), FamilyConfig("KO", 4, 5)):
        sig = cfg.sig
        pairs = []
        for _ in range(200):
            p, q = rng.randint(0, 1), rng.randint(0, 1)
            a, b = random_element(cfg, p, rng), random_element(cfg, q, rng)
            pairs.append((a.terms, b.terms, -1 if p and q else 1))
        polys = [(random_homogeneous(sig, rng.randint(0, 1), 4, rng, max_terms=8).terms,
                  random_homogeneous(sig, rng.randint(0, 1), 4, rng, max_terms=8).terms) for _ in range(400)]
        out.append((cfg, sig, pairs, polys))
    return out


def run(mod, loads):
    res = []
    for cfg, sig, pairs, polys in loads:
        m, n, g = sig.m, sig.n, sig.guard
        for a, b, s in pairs:
            res.append(mod.vf_bracket(a, b, s, m, n, g))
            res.append(mod.vf_apply(a, {k >> mod.RBITS: v for k, v in b.items()}, m, n, g))
        for f, h in polys:
            res.append(mod.poly_mul(f, h, n, g))
            for r in range(m + n):
                res.append(mod.poly_partial(f, r, m, n))
    return res


def timed(mod, loads, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        run(mod, loads)
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    loads = workloads()
    if cy is None:
        print("compiled kernels not built; timing pure Python only")
        print(f"python  {timed(py, loads, args.repeat):.3f}s")
        return
    assert run(py, loads) == run(cy, loads), "backends disagree"
    tp = timed(py, loads, args.repeat)
    tc = timed(cy, loads, args.repeat)
    print(f"python  {tp:.3f}s")
    print(f"cython  {tc:.3f}s")
    print(f"speedup {tp / tc:.2f}x")


if __name__ == "__main__":
    main()
