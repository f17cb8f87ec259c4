"""Sweep a seeded random corpus and cross-check the oracle, graph characterisations,
solver and robustness criteria on every enumerated execution.

Usage: python scripts/corpus_sweep.py [--size N] [--max-transactions K] [--seed S]
"""

import argparse
import time
from collections import Counter

from txncheck.axec import graphof
from txncheck.corpus import CorpusConfig, random_histories
from txncheck.depgraph import gspec, passes_gspec, robustness_check
from txncheck.oracle import compatible_graphs, enumerate_executions
from txncheck.solver import decide_membership
from txncheck.spec import catalog, satisfies

SIMPLE = ("cc", "ccser", "psi", "si", "ser")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--size", type=int, default=200)
    p.add_argument("--max-transactions", type=int, default=5)
    p.add_argument("--seed", type=int, default=CorpusConfig.seed)
    args = p.parse_args()
    cfg = CorpusConfig(size=args.size, max_transactions=args.max_transactions, seed=args.seed)

    start = time.perf_counter()
    stats, errors = Counter(), Counter()
    for h in random_histories(cfg):
        es = list(enumerate_executions(h))
        stats["histories"] += 1
        stats["satisfiable"] += bool(es)
        stats["executions"] += len(es)
        realised = {g: set() for g in compatible_graphs(h)}
        for e in es:
            g = graphof(e)
            for m in SIMPLE:
                if satisfies(e, catalog(m, h.objects)):
                    realised[g].add(m)
                    if m != "cc" and not robustness_check(m, g).certified:
                        errors["robustness"] += 1
        for g, models in realised.items():
            stats["graphs"] += 1
            for m in SIMPLE:
                if decide_membership(catalog(m, g.objects), g).member != (m in models):
                    errors["solver"] += 1
        for m, d in (("ser", "ser"), ("si", "si"), ("psi", "psi"), ("psi", "psi'")):
            oracle = any(m in ms for ms in realised.values())
            if oracle != any(passes_gspec(gspec(d, h.objects), g) for g in realised):
                errors[f"gspec {d}"] += 1
    for k, v in stats.items():
        print(f"{k:12} {v}")
    print(f"errors       {dict(errors) or 0}")
    print(f"elapsed      {time.perf_counter() - start:.1f}s")
    return 1 if errors else 0


if __name__ == "__main__":
    raise SystemExit(main())
