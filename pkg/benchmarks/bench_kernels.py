"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N] [--json] [--large]

``--large`` adds sparse H2 of A5, which takes over a minute on the fallback.

Each workload runs under both backends; results must agree before timings are
reported.
"""
import argparse
import json
import statistics
import time

import numpy as np

from galkan import kernels
from galkan.corpus import default_registry
from galkan.fingrp import enumerate_homs, group_from_table
from galkan.homology import h2_sparse, relation_rows


def _workloads(reg, large=False):
    a4, a5, s4, sl25 = (reg.group(n) for n in ("a4", "a5", "s4", "sl25"))
    rows = relation_rows(a4)

    out = {
        "associativity sl25 (120)": lambda: kernels.associativity_witness(sl25.table),
        "group_from_table a5": lambda: group_from_table(a5.table).order,
        "closure sl25": lambda: int(np.asarray(
            kernels.closure_mask(sl25.table, np.array([0]), np.array(sl25.generators))).sum()),
        "homs s4 -> s4": lambda: len(enumerate_homs(s4, s4)),
        "homs sl25 -> a5": lambda: len(enumerate_homs(sl25, a5)),
        "local elimination a4 relations": lambda: sorted(kernels.local_elimination(rows, 2, 3)),
        "sparse H2 a4": lambda: h2_sparse(a4).as_list(),
        "sparse H2 s4": lambda: h2_sparse(s4).as_list(),
    }
    if large:
        out["sparse H2 a5"] = lambda: h2_sparse(a5).as_list()
    return out


def _time(fn, repeat):
    out, samples = None, []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        samples.append(time.perf_counter() - t0)
    return out, statistics.median(samples)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--large", action="store_true")
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    reg = default_registry()
    rows = []
    for name, fn in _workloads(reg, args.large).items():
        results, times = {}, {}
        for b in backends:
            prev = kernels.use_backend(b)
            try:
                results[b], times[b] = _time(fn, args.repeat)
            finally:
                kernels.use_backend(prev)
        values = list(results.values())
        if any(v != values[0] for v in values[1:]):
            raise SystemExit(f"{name}: backends disagree: {results}")
        row = {"workload": name, **{f"{b}_ms": round(times[b] * 1000, 2) for b in backends}}
        if len(backends) == 2:
            row["speedup"] = round(times["python"] / max(times["compiled"], 1e-9), 1)
        rows.append(row)

    if args.json:
        print(json.dumps({"backends": backends, "repeat": args.repeat, "rows": rows}, indent=1))
        return
    cols = ["workload"] + [f"{b}_ms" for b in backends] + (["speedup"] if len(backends) == 2 else [])
    widths = [max(len(c), *(len(str(r[c])) for r in rows)) for c in cols]
    print("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
    for r in rows:
        print("  ".join(str(r[c]).ljust(w) for c, w in zip(cols, widths)))


if __name__ == "__main__":
    main()
