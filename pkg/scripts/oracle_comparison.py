"""Compare the solver with the grid oracle and the per-case family oracle on random parameters."""
import argparse
import time

import numpy as np

from cddiso import CDDParams, bound_at
from cddiso.cdd_bound import bound_oracle_grid, case_dispatch, case_family_bound


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=12)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'rho':>7} {'m':>6} {'D':>6} {'v':>5} {'case':>5} {'bound':>12} {'grid gap':>10} {'family gap':>11} {'secs':>6}")
    for _ in range(args.count):
        rho, m, D = rng.uniform(-4, 4), rng.uniform(1, 20), rng.uniform(0.3, 5)
        v = float(rng.choice([0.1, 0.3, 0.5]))
        cdd = CDDParams(float(rho), 2, float(m) - 1.0, float(D))
        t0 = time.perf_counter()
        value = bound_at(cdd, v).value
        grid = bound_oracle_grid(cdd, v)
        family = case_family_bound(cdd, v)
        secs = time.perf_counter() - t0
        print(f"{rho:>7.3f} {m:>6.2f} {D:>6.3f} {v:>5.2f} {case_dispatch(cdd).value:>5} {value:>12.8f} "
              f"{abs(grid - value) / value:>10.2e} {abs(family - value) / value:>11.2e} {secs:>6.2f}")


if __name__ == "__main__":
    main()
