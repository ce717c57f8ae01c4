#!/usr/bin/env python3
"""Mean-field vs exact many-body evolution: tabulate the 2- and 4-point
error kernels and the normalized one-body error over time.

Requires a lattice small enough for the exact Fock backend (<= 16 modes).

Example:
    python3 scripts/oracle_comparison.py --cutoff 3 --counts 2 2 --t-final 0.5
"""

import argparse

import numpy as np

from hfbdyn.lattice import LatticeSpec, named_potential
from hfbdyn.quasifree import bloch_messiah
from hfbdyn.fock import (L_MAX, build_hamiltonian, evolve_exact,
                         gaussian_prepare, rdm1)
from hfbdyn.solver import evolve
from hfbdyn.diagnostics import error_kernel
from hfbdyn.titorus import lambda_state, shell_profile


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cutoff", type=int, default=3)
    ap.add_argument("--counts", type=int, nargs=2, default=(2, 2),
                    help="particles per spin")
    ap.add_argument("--v0", type=float, default=-0.5)
    ap.add_argument("--sigma", type=float, default=1.5)
    ap.add_argument("--t-final", type=float, default=0.5)
    ap.add_argument("--samples", type=int, default=6,
                    help="number of comparison times")
    ap.add_argument("--four-point", action="store_true",
                    help="also scan the L^4 four-point kernel (slower)")
    args = ap.parse_args()

    counts = tuple(args.counts)
    if counts[0] != counts[1]:
        raise SystemExit("paired initial state needs balanced spin counts")
    lat = LatticeSpec(dimension=1, cutoff=args.cutoff, spin_count=2,
                      particle_counts=counts)
    if lat.dim > L_MAX:
        raise SystemExit(f"lattice has {lat.dim} modes > exact limit {L_MAX}")
    V = named_potential("gaussian", {"v0": args.v0, "sigma": args.sigma}, lat)
    _, g0 = lambda_state(lat, shell_profile(lat, counts[0]))

    traj = evolve(g0, V, lat, t_final=args.t_final)
    psi0 = gaussian_prepare(bloch_messiah(g0))
    H = build_hamiltonian(lat, V)

    targets = np.linspace(0.0, args.t_final, args.samples)
    head = f"{'t':>8} {'|gamma-omega|/sqrtN':>20} {'err2':>12} {'ratio2':>10}"
    if args.four_point:
        head += f" {'err4':>12} {'ratio4':>10}"
    print(head)
    sqrt_n = np.sqrt(lat.total_particles)
    for t in targets:
        idx = int(np.argmin(np.abs(np.array(traj.times) - t)))
        t_i, g_t = traj.times[idx], traj.states[idx]
        psi_t = evolve_exact(psi0, H, t_i, lat.epsilon)
        one_body = np.linalg.norm(rdm1(psi_t) - g_t.omega) / sqrt_n
        r2 = error_kernel(psi_t, g_t, ("create", "annihilate"), t=t_i)
        line = f"{t_i:8.4f} {one_body:20.6e} {r2.err_hs:12.4e} {r2.ratio:10.2e}"
        if args.four_point:
            r4 = error_kernel(psi_t, g_t,
                              ("create", "create", "annihilate",
                               "annihilate"), t=t_i)
            line += f" {r4.err_hs:12.4e} {r4.ratio:10.2e}"
        print(line)


if __name__ == "__main__":
    main()
