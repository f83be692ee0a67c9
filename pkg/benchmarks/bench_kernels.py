"""Compare the compiled and numpy relation kernels.

    python3 benchmarks/bench_kernels.py [--states 64 256 1024] [--repeat 5]
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from procontracts import kernels
from procontracts.lang import DomainConfig
from procontracts.relation import Denotation
from procontracts.sampling import random_relation


def _time(fn, repeat: int) -> float:
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs)


def _domain(states: int) -> DomainConfig:
    return DomainConfig(0, states - 1, ("x",))


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--states", type=int, nargs="+", default=[64, 256, 1024])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    compiled = kernels.compiled()
    backends = {"numpy": kernels.py}
    if compiled is not None:
        backends["cython"] = compiled
    else:
        print("compiled extension not built; timing numpy only")

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<10}{'states':>8}{'kind':>12}" + "".join(f"{b:>12}" for b in backends))
    for n in args.states:
        domain = _domain(n)
        for kind in ("sparse", "functional", "dense"):
            a = random_relation(domain, rng, kind).bits
            b = random_relation(domain, rng, kind).bits
            results = [kernel.compose(a, b) for kernel in backends.values()]
            assert all(np.array_equal(results[0], r) for r in results)
            times = [_time(lambda k=k: k.compose(a, b), args.repeat) for k in backends.values()]
            print(f"{'compose':<10}{n:>8}{kind:>12}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times))
        # a countdown loop: exit at 0, step to the predecessor
        succ = np.arange(n) - 1
        step = Denotation.from_successors(domain, np.where(succ >= 0, succ, -1)).bits
        exit_rows = Denotation.from_pairs(domain, [(0, 0)]).bits
        times = [_time(lambda k=k: k.while_lfp(exit_rows, step, n + 1), args.repeat) for k in backends.values()]
        print(f"{'while':<10}{n:>8}{'countdown':>12}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times))


if __name__ == "__main__":
    main()
