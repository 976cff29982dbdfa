"""Build the warped product at the solver's witness and shrink eps until the curvature bound holds."""
import argparse

from cddiso import CDDParams, bound_at
from cddiso.sharpness import WarpedProduct, check_cdd, slab_profile


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rho", type=float, default=-1.0)
    parser.add_argument("--n", type=int, default=3)
    parser.add_argument("--q", type=float, default=1.0)
    parser.add_argument("--D", type=float, default=1.0)
    parser.add_argument("--v", type=float, default=0.2)
    args = parser.parse_args()

    cdd = CDDParams(args.rho, args.n, args.q, args.D)
    r = bound_at(cdd, args.v)
    print(f"bound {r.value:.10f}  case {r.case_id.value}  H* {r.h_star:.6f}  a* {r.a_star:.6f}")
    print(f"{'eps':>8} {'margin':>14} {'slab profile':>14}")
    for eps in (10.0, 3.0, 1.0, 0.3, 0.1, 0.03, 0.01):
        wp = WarpedProduct.canonical(cdd.rho, cdd.n, cdd.q, r.h_star, r.a_star, cdd.D - r.a_star, eps)
        print(f"{eps:>8.2f} {check_cdd(wp, cdd.rho):>14.6g} {slab_profile(wp, args.v):>14.10f}")


if __name__ == "__main__":
    main()
