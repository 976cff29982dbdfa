"""Sweep the bound over v for a handful of parameter sets and print a table."""
import argparse
import math

import numpy as np

from cddiso import CDDParams, bound_at

SETS = {
    "sphere": CDDParams(1.0, 2, 0.0, math.pi),
    "capped": CDDParams(1.0, 3, 0.0, 2.0),
    "flat": CDDParams(0.0, 3, 1.0, 1.0),
    "hyperbolic": CDDParams(-1.0, 3, 1.0, 1.0),
    "gaussian": CDDParams(1.0, 2, math.inf, math.inf),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=9)
    args = parser.parse_args()
    vs = np.linspace(0.0, 0.5, args.points + 1)[1:]
    print("set".ljust(12) + "".join(f"{v:>10.3f}" for v in vs))
    for name, cdd in SETS.items():
        values = [bound_at(cdd, float(v)).value for v in vs]
        print(name.ljust(12) + "".join(f"{x:>10.5f}" for x in values))


if __name__ == "__main__":
    main()
