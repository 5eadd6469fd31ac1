"""Smoke test for the cvnet_py extension.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`
or `pip install crates/python`, then run `python python/smoke_test.py`.
"""

import math
import sys

import cvnet_py


def check(cond, what):
    if not cond:
        print(f"FAIL: {what}")
        sys.exit(1)
    print(f"ok: {what}")


def main():
    d5 = cvnet_py.generate("diamond", 5)
    check((d5.n, d5.edge_count) == (5, 6), "diamond D5 has 5 nodes and 6 edges")

    routed = d5.route(0, 4)
    check(abs(routed.logneg - math.log2(7)) < 1e-12, "routing across D5 gives log2 7")
    shortest = d5.route(0, 4, "shortest")
    check(abs(shortest.logneg - math.log2(3)) < 1e-12, "shortest path across D5 gives log2 3")
    check(routed.n_paths_used == 3 and shortest.n_paths_used == 1, "path bookkeeping")

    star = cvnet_py.generate("star", 100).cost()
    check(star.n_squeezers == 2, "star needs two squeezers")
    check(abs(star.total_db - cvnet_py.analytic_cost("star", 100, 1.0)) < 1e-9, "star closed form")

    ba = cvnet_py.generate("ba", 100, k=4, seed=7)
    check(ba.edge_count == 384, "BA(100, 4) has 384 edges")
    again = cvnet_py.Network.from_text(ba.to_text())
    check(again.edges() == ba.edges(), "text round trip")

    rows = cvnet_py.generate("star", 10).survey()
    check(len(rows) == 27 and all(r.alice == 0 for r in rows), "star survey picks the hub")

    check(abs(cvnet_py.diamond_logneg(3, 0.0, 1.0) - math.log2(7)) < 1e-12, "diamond closed form")

    try:
        cvnet_py.generate("er", 10, p=1.5)
    except ValueError:
        check(True, "invalid probability raises ValueError")
    else:
        check(False, "invalid probability raises ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
