"""Print the allow/forbid matrix of the shipped anomalies, by oracle and by solver.

Usage: python scripts/anomaly_matrix.py
"""

import time

from txncheck.fixtures import MATRIX_MODELS, anomalies
from txncheck.oracle import oracle_graph_membership, oracle_membership
from txncheck.solver import decide_membership
from txncheck.spec import catalog


def cell(member: bool) -> str:
    return "allowed" if member else "forbidden"


def main():
    start = time.perf_counter()
    mismatches = 0
    header = f"{'anomaly':26}" + "".join(f"{m:>11}" for m in MATRIX_MODELS)
    print(header)
    for a in anomalies():
        h, g = a.history, a.graph()
        row = []
        for m in MATRIX_MODELS:
            sigma = catalog(m, h.objects)
            by_history = cell(oracle_membership(sigma, h).member)
            by_graph = cell(oracle_graph_membership(sigma, g).member)
            by_solver = cell(decide_membership(sigma, g).member)
            ok = by_history == a.expected[m] and by_graph == by_solver
            mismatches += not ok
            row.append(by_history[0].upper() + ("" if ok else "!"))
        print(f"{a.name:26}" + "".join(f"{c:>11}" for c in row))
    print(f"mismatches: {mismatches}  ({time.perf_counter() - start:.2f}s)")
    return 1 if mismatches else 0


if __name__ == "__main__":
    raise SystemExit(main())
