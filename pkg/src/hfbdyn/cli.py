"""Command-line surface: reproducible evolve / compare / appendix-a /
selftest runs driven by a JSON config.

Every run writes its resolved config and a manifest (config hash, file
checksums) next to its outputs; identical configs produce byte-identical
CSVs (floats are emitted with repr, the shortest round-trip form).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import copy
import datetime
import hashlib
import json
import os
import sys
import traceback

import numpy as np
import jsonschema

from . import __version__
from .lattice import LatticeSpec, PotentialSpec, named_potential
from .quasifree import bloch_messiah, purity_residual, random_bogoliubov
from .solver import FixedPointError, evolve, hfb_energy
from .diagnostics import error_kernel, semiclassical_report
from .titorus import (ffg_symbol, ground_state_scan, lambda_state,
                      pairing_bound_check, shell_profile,
                      admissible_shell_counts)
from . import fock, selftest as selftest_mod

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_GUARD = 4

_NUM = {"type": "number"}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "lattice", "potential"],
    "properties": {
        "schema_version": {"const": 1},
        "lattice": {
            "type": "object",
            "additionalProperties": False,
            "required": ["dimension", "cutoff", "particle_counts"],
            "properties": {
                "dimension": {"enum": [1, 2, 3]},
                "cutoff": {"type": "integer", "minimum": 0},
                "spin_count": {"enum": [1, 2]},
                "particle_counts": {"type": "array",
                                    "items": {"type": "integer", "minimum": 0}},
                "epsilon": {"type": ["number", "null"]},
            },
        },
        "potential": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["none", "gaussian", "delta-like",
                                  "attractive-gaussian"]},
                "params": {"type": "object",
                           "additionalProperties": False,
                           "properties": {"v0": _NUM, "sigma": _NUM}},
            },
        },
        "initial_state": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["ffg", "lambda-state", "lambda-shell",
                                  "random-pure"]},
                "profile": {"type": "array", "items": _NUM},
                "width": _NUM,
                "seed": {"type": "integer", "minimum": 0},
            },
        },
        "dynamics": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "variant": {"enum": ["hfb", "hf", "hb"]},
                "t_final": {"type": "number", "exclusiveMinimum": 0},
                "dt": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "method": {"enum": ["midpoint", "rk4"]},
                "snapshot_stride": {"type": "integer", "minimum": 0},
            },
        },
        "oracle": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "enabled": {"type": "boolean"},
                "l_max": {"type": "integer", "minimum": 1, "maximum": 16},
                "times": {"type": "array", "items": _NUM},
            },
        },
        "appendix_a": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "trials": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "n_grid": {"type": "array",
                           "items": {"type": "integer", "minimum": 1}},
                "width": _NUM,
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "particle_counts_list": {
                    "type": "array",
                    "items": {"type": "array",
                              "items": {"type": "integer", "minimum": 0}},
                },
            },
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "directory": {"type": ["string", "null"]},
                "formats": {"type": "array", "items": {"enum": ["csv", "json"]}},
            },
        },
    },
}

DEFAULTS = {
    "initial_state": {"kind": "ffg"},
    "dynamics": {"variant": "hfb", "t_final": 1.0, "dt": None,
                 "method": "midpoint", "snapshot_stride": 0},
    "oracle": {"enabled": False, "l_max": 14, "times": []},
    "appendix_a": {"trials": 1000, "seed": 0, "n_grid": [1, 3, 5, 7, 9],
                   "width": 0.5},
    "outputs": {"directory": None, "formats": ["csv"]},
}


class ConfigError(ValueError):
    pass


class GuardError(RuntimeError):
    pass


def fmt(x) -> str:
    """Shortest round-trip float formatting (17 significant digits cap)."""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: str, header: list[str], rows: list[list]):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")


def _deep_merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in extra.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def load_config(path: str, overrides: list[str]) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg = _deep_merge(DEFAULTS, raw)
    for ov in overrides:
        if "=" not in ov:
            raise ConfigError(f"override {ov!r} must look like dot.path=value")
        dotted, _, value = ov.partition("=")
        try:
            parsed = json.loads(value)
        except json.JSONDecodeError:
            parsed = value  # bare strings allowed
        node = cfg
        keys = dotted.split(".")
        for key in keys[:-1]:
            node = node.setdefault(key, {})
        node[keys[-1]] = parsed
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        pointer = "/" + "/".join(str(p) for p in exc.absolute_path)
        raise ConfigError(f"config invalid at {pointer!r}: {exc.message}") from exc
    return cfg


def build_lattice(cfg: dict) -> LatticeSpec:
    blk = cfg["lattice"]
    try:
        return LatticeSpec(
            dimension=blk["dimension"], cutoff=blk["cutoff"],
            spin_count=blk.get("spin_count", 2),
            particle_counts=tuple(blk["particle_counts"]),
            epsilon=blk.get("epsilon"),
        )
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"lattice block: {exc}") from exc


def build_potential(cfg: dict, lattice: LatticeSpec) -> PotentialSpec:
    blk = cfg["potential"]
    if blk["kind"] == "none":
        return PotentialSpec({}, lattice.total_particles)
    try:
        return named_potential(blk["kind"], blk.get("params", {}), lattice)
    except ValueError as exc:
        raise ConfigError(f"potential block: {exc}") from exc


def build_initial_state(cfg: dict, lattice: LatticeSpec):
    blk = cfg["initial_state"]
    kind = blk["kind"]
    try:
        if kind == "ffg":
            sym, _ = ffg_symbol(lattice)
            return sym.assemble()
        if kind == "lambda-state":
            if "profile" not in blk:
                raise ConfigError("lambda-state needs an explicit profile")
            _, g = lambda_state(lattice, np.asarray(blk["profile"], dtype=float))
            return g
        if kind == "lambda-shell":
            n_sigma = lattice.particle_counts[0]
            lam = shell_profile(lattice, n_sigma,
                                width=blk.get("width", 0.5))
            _, g = lambda_state(lattice, lam)
            return g
        if kind == "random-pure":
            return random_bogoliubov(lattice.dim, blk.get("seed", 0)).state()
    except ValueError as exc:
        raise ConfigError(f"initial_state block: {exc}") from exc
    raise ConfigError(f"unknown initial state kind {kind!r}")


def resolve_outdir(cfg: dict, cli_out: str | None, label: str) -> str:
    root = cli_out or cfg["outputs"]["directory"] \
        or os.environ.get("HFBDYN_OUT") or "runs"
    out = os.path.join(root, label)
    os.makedirs(out, exist_ok=True)
    return out


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def write_manifest(outdir: str, cfg: dict, started: str):
    with open(os.path.join(outdir, "resolved_config.json"), "w") as fh:
        json.dump(cfg, fh, indent=2, sort_keys=True)
    inventory = {}
    for name in sorted(os.listdir(outdir)):
        if name == "manifest.json":
            continue
        path = os.path.join(outdir, name)
        if os.path.isfile(path):
            with open(path, "rb") as fh:
                inventory[name] = hashlib.sha256(fh.read()).hexdigest()
    manifest = {
        "config_hash": config_hash(cfg),
        "code_version": __version__,
        "started": started,
        "finished": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "files": inventory,
    }
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)


def _snapshot(g) -> dict:
    return {
        "omega_re": g.omega.real.tolist(), "omega_im": g.omega.imag.tolist(),
        "alpha_re": g.alpha.real.tolist(), "alpha_im": g.alpha.imag.tolist(),
    }


def cmd_evolve(cfg: dict, outdir: str) -> int:
    lattice = build_lattice(cfg)
    potential = build_potential(cfg, lattice)
    g0 = build_initial_state(cfg, lattice)
    dyn = cfg["dynamics"]
    traj = evolve(g0, potential, lattice, t_final=dyn["t_final"], dt=dyn["dt"],
                  variant=dyn["variant"], method=dyn["method"])
    header = ["t", "trace_omega", "hfb_energy", "purity_residual",
              "alpha_hs_norm", "s1", "s2", "s3"]
    rows = []
    snapshots = {}
    stride = dyn["snapshot_stride"]
    for i, (t, g) in enumerate(zip(traj.times, traj.states)):
        rep = semiclassical_report(g, lattice, t=t)
        rows.append([t, traj.trace_omega[i], traj.energy[i], traj.purity[i],
                     traj.alpha_hs[i], rep.s1, rep.s2, rep.s3])
        if stride and i % stride == 0:
            snapshots[fmt(t)] = _snapshot(g)
    write_csv(os.path.join(outdir, "trajectory.csv"), header, rows)
    if snapshots and "json" in cfg["outputs"]["formats"]:
        with open(os.path.join(outdir, "snapshots.json"), "w") as fh:
            json.dump(snapshots, fh, sort_keys=True)
    return EXIT_OK


def _compare_one(cfg: dict, outdir: str, suffix: str = "") -> None:
    lattice = build_lattice(cfg)
    if lattice.dim > cfg["oracle"]["l_max"] or lattice.dim > fock.L_MAX:
        raise GuardError(
            f"oracle needs L = {lattice.dim} <= {min(cfg['oracle']['l_max'], fock.L_MAX)}; "
            "reduce the cutoff or the spin count")
    potential = build_potential(cfg, lattice)
    g0 = build_initial_state(cfg, lattice)
    bmap = bloch_messiah(g0)
    psi0 = fock.gaussian_prepare(bmap)
    H = fock.build_hamiltonian(lattice, potential)
    dyn = cfg["dynamics"]
    times = cfg["oracle"]["times"] or [dyn["t_final"]]
    traj = evolve(g0, potential, lattice, t_final=max(times), dt=dyn["dt"],
                  variant=dyn["variant"], method=dyn["method"])
    header = ["t", "err2_hs", "wick2_hs", "ratio2", "err4_hs", "wick4_hs",
              "ratio4"]
    sig2 = ("create", "annihilate")
    sig4 = ("create", "create", "annihilate", "annihilate")
    rows = []
    for t in [0.0] + sorted(times):
        idx = int(np.argmin(np.abs(np.array(traj.times) - t)))
        g_t = traj.states[idx]
        psi_t = fock.evolve_exact(psi0, H, traj.times[idx], lattice.epsilon)
        r2 = error_kernel(psi_t, g_t, sig2, t=traj.times[idx])
        r4 = error_kernel(psi_t, g_t, sig4, t=traj.times[idx])
        rows.append([traj.times[idx], r2.err_hs, r2.wick_hs, r2.ratio,
                     r4.err_hs, r4.wick_hs, r4.ratio])
    write_csv(os.path.join(outdir, f"error_kernels{suffix}.csv"), header, rows)


def cmd_compare(cfg: dict, outdir: str, workers: int = 1) -> int:
    sweep = cfg.get("sweep", {}).get("particle_counts_list")
    if not sweep:
        _compare_one(cfg, outdir)
        return EXIT_OK
    jobs = []
    for counts in sweep:
        sub = copy.deepcopy(cfg)
        sub["lattice"]["particle_counts"] = list(counts)
        sub.pop("sweep", None)
        label = "N" + "-".join(str(c) for c in counts)
        subdir = os.path.join(outdir, label)
        os.makedirs(subdir, exist_ok=True)
        jobs.append((sub, subdir))
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_compare_one, sub, subdir)
                       for sub, subdir in jobs]
            for fut in futures:
                fut.result()
    else:
        for sub, subdir in jobs:
            _compare_one(sub, subdir)
    return EXIT_OK


def cmd_appendix_a(cfg: dict, outdir: str) -> int:
    lattice = build_lattice(cfg)
    potential = build_potential(cfg, lattice)
    blk = cfg["appendix_a"]
    try:
        scan = ground_state_scan(lattice, potential, blk["trials"], blk["seed"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    write_csv(os.path.join(outdir, "ground_state_scan.csv"),
              list(scan.keys()), [list(scan.values())])
    pot_blk = cfg["potential"]

    def v_builder(lat):
        if pot_blk["kind"] == "none":
            return PotentialSpec({}, lat.total_particles)
        return named_potential(pot_blk["kind"], pot_blk.get("params", {}), lat)

    grid = [(lattice.dimension, max(lattice.cutoff, (n + 1) // 2 + 2), n)
            for n in blk["n_grid"]]
    rows = pairing_bound_check(grid, v_builder, width=blk["width"])
    write_csv(os.path.join(outdir, "pairing_bounds.csv"),
              list(rows[0].keys()), [list(r.values()) for r in rows])
    print(f"min_gap={fmt(scan['min_gap'])} "
          f"max_alpha_ratio={fmt(max(r['alpha_ratio'] for r in rows))} "
          f"max_s1_ratio={fmt(max(r['s1_ratio'] for r in rows))}")
    if scan["min_gap"] < -1e-9:
        raise RuntimeError(f"negative energy gap {scan['min_gap']}")
    return EXIT_OK


def cmd_selftest() -> int:
    failures = selftest_mod.run_all()
    if failures:
        for name, msg in failures:
            print(f"FAIL {name}: {msg}")
        return EXIT_NUMERICAL
    print("selftest: all suites passed")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hfbdyn",
        description="mean-field pairing dynamics on the momentum torus")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("evolve", "compare", "appendix-a"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--seed", type=lambda s: int(s, 0), default=None)
        p.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE")
    sub.add_parser("selftest")
    args = parser.parse_args(argv)

    if args.command == "selftest":
        return cmd_selftest()

    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    try:
        cfg = load_config(args.config, args.override)
        if args.seed is not None:
            cfg.setdefault("initial_state", {})["seed"] = args.seed
            cfg.setdefault("appendix_a", {})["seed"] = args.seed
        outdir = resolve_outdir(cfg, args.out,
                                f"{args.command}-{config_hash(cfg)[:12]}")
        if args.command == "evolve":
            code = cmd_evolve(cfg, outdir)
        elif args.command == "compare":
            code = cmd_compare(cfg, outdir, workers=args.workers)
        else:
            code = cmd_appendix_a(cfg, outdir)
        write_manifest(outdir, cfg, started)
        return code
    except ConfigError as exc:
        json.dump({"error": "config", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_CONFIG
    except GuardError as exc:
        json.dump({"error": "guard", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_GUARD
    except (FixedPointError, RuntimeError, AssertionError) as exc:
        json.dump({"error": "numerical", "message": str(exc),
                   "trace": traceback.format_exc()}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
