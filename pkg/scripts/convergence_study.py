#!/usr/bin/env python3
"""Time-step refinement study: global error of omega_T against a fine
reference, demonstrating second-order convergence of the midpoint scheme.

Example:
    python3 scripts/convergence_study.py --halvings 4
"""

import argparse

import numpy as np

from hfbdyn.lattice import LatticeSpec, named_potential
from hfbdyn.solver import evolve
from hfbdyn.titorus import lambda_state, shell_profile


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cutoff", type=int, default=3)
    ap.add_argument("--n-sigma", type=int, default=2)
    ap.add_argument("--v0", type=float, default=-0.5)
    ap.add_argument("--sigma", type=float, default=1.5)
    ap.add_argument("--t-final", type=float, default=0.5)
    ap.add_argument("--halvings", type=int, default=4)
    ap.add_argument("--method", choices=("midpoint", "rk4"),
                    default="midpoint")
    args = ap.parse_args()

    lat = LatticeSpec(dimension=1, cutoff=args.cutoff, spin_count=2,
                      particle_counts=(args.n_sigma, args.n_sigma))
    V = named_potential("gaussian", {"v0": args.v0, "sigma": args.sigma}, lat)
    _, g0 = lambda_state(lat, shell_profile(lat, args.n_sigma))

    dt0 = lat.epsilon / 10.0
    ref_dt = dt0 / 2 ** (args.halvings + 3)
    print(f"reference dt = {ref_dt:.3e} ({args.method})")
    ref = evolve(g0, V, lat, t_final=args.t_final, dt=ref_dt,
                 method=args.method).states[-1].omega

    errs = []
    print(f"{'dt':>12} {'error':>14} {'ratio':>8}")
    for k in range(args.halvings + 1):
        dt = dt0 / 2 ** k
        traj = evolve(g0, V, lat, t_final=args.t_final, dt=dt,
                      method=args.method)
        err = np.linalg.norm(traj.states[-1].omega - ref)
        ratio = errs[-1] / err if errs else float("nan")
        errs.append(err)
        print(f"{dt:12.6f} {err:14.6e} {ratio:8.3f}")
    orders = np.log2([errs[k] / errs[k + 1] for k in range(len(errs) - 1)])
    print(f"\nobserved orders per halving: {np.round(orders, 3)}")


if __name__ == "__main__":
    main()
