#!/usr/bin/env python3
"""Evolve a paired Fermi-shell state and print the conservation log.

Example:
    python3 scripts/run_shell_benchmark.py --n-sigma 2 --cutoff 3 \
        --v0 -0.5 --sigma 1.5 --t-final 1.0
"""

import argparse

import numpy as np

from hfbdyn.lattice import LatticeSpec, named_potential
from hfbdyn.solver import evolve
from hfbdyn.diagnostics import semiclassical_report
from hfbdyn.titorus import lambda_state, shell_profile


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dimension", type=int, default=1)
    ap.add_argument("--cutoff", type=int, default=3)
    ap.add_argument("--n-sigma", type=int, default=2,
                    help="particles per spin")
    ap.add_argument("--width", type=float, default=0.5,
                    help="Fermi-surface interpolation width in |k|")
    ap.add_argument("--v0", type=float, default=-0.5)
    ap.add_argument("--sigma", type=float, default=1.5)
    ap.add_argument("--t-final", type=float, default=1.0)
    ap.add_argument("--dt", type=float, default=None,
                    help="time step (default eps/20)")
    ap.add_argument("--variant", choices=("hfb", "hf", "hb"), default="hfb")
    ap.add_argument("--stride", type=int, default=10,
                    help="print every STRIDE-th step")
    args = ap.parse_args()

    lat = LatticeSpec(dimension=args.dimension, cutoff=args.cutoff,
                      spin_count=2,
                      particle_counts=(args.n_sigma, args.n_sigma))
    V = named_potential("gaussian", {"v0": args.v0, "sigma": args.sigma}, lat)
    _, g0 = lambda_state(lat, shell_profile(lat, args.n_sigma,
                                            width=args.width))
    print(f"L={lat.dim} modes, N={lat.total_particles}, eps={lat.epsilon:.4f},"
          f" dt={args.dt or lat.epsilon / 20:.5f}, variant={args.variant}")
    traj = evolve(g0, V, lat, t_final=args.t_final, dt=args.dt,
                  variant=args.variant)

    print(f"{'t':>8} {'tr(omega)':>12} {'energy':>14} {'purity':>10}"
          f" {'|alpha|':>10} {'s1':>8} {'s3':>8}")
    for i, (t, g) in enumerate(zip(traj.times, traj.states)):
        if i % args.stride and i != len(traj.times) - 1:
            continue
        rep = semiclassical_report(g, lat, t=t)
        print(f"{t:8.4f} {traj.trace_omega[i]:12.8f} {traj.energy[i]:14.10f}"
              f" {traj.purity[i]:10.2e} {traj.alpha_hs[i]:10.6f}"
              f" {rep.s1:8.4f} {rep.s3:8.4f}")
    drift = max(abs(x - traj.trace_omega[0]) for x in traj.trace_omega)
    e_drift = max(abs(e - traj.energy[0]) for e in traj.energy)
    print(f"\nmax trace drift {drift:.2e}, max energy drift {e_drift:.2e},"
          f" max purity residual {max(traj.purity):.2e}")


if __name__ == "__main__":
    main()
