"""Command-line entry point.

Subcommands and their config keys (all optional unless noted)::

    symbol  p, r | spec, contour ("full" | "gamma1"), n_edge,
            kernel + beta + xi           (numerical Mellin symbol table)
    scan    p_min, p_max, p_step, r_min, r_max, r_step | p_grid, r_grid,
            tolerance, n_xi
    index   p, r | spec, n_edge
    solve   method ("both" | "mellin" | "nystrom"), beta, grid, n_bumps,
            nystrom_ratio, nystrom_nodes
    bvp     formula_id, extension_mode, grid, method, probes,
            criterion {p: [...], s: [...]}

Every config may carry ``schema_version``; it must equal the library's.
Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import __version__, config
from .errors import DomainError, NumericalError
from .fredholm import (
    bvp_criterion,
    full_ellipticity,
    index_report,
    local_invertibility_at_zero,
    scan_region,
)
from .mellin import MellinLine, kernel_from_json, mellin_symbol, mellin_symbol_closed_form, write_grid_csv
from .potentials import case_from_json, run_pipeline
from .solver import manufactured_instance, relative_difference, solve_mellin, solve_nystrom
from .symbols import RectanglePath, SpaceParams, sample_det_curve, spec_from_json, spec_to_json, write_curve_csv

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4

ALLOWED = {
    "symbol": {"p", "r", "spec", "contour", "n_edge", "kernel", "beta", "xi"},
    "scan": {"p_min", "p_max", "p_step", "r_min", "r_max", "r_step", "p_grid", "r_grid", "tolerance", "n_xi"},
    "index": {"p", "r", "spec", "n_edge"},
    "solve": {"method", "beta", "grid", "n_bumps", "nystrom_ratio", "nystrom_nodes"},
    "bvp": {"formula_id", "extension_mode", "grid", "method", "probes", "criterion"},
}


def _load_config(path, sub: str) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise DomainError("config must be a JSON object")
    version = doc.pop("schema_version", config.SCHEMA_VERSION)
    if version != config.SCHEMA_VERSION:
        raise DomainError(f"unsupported schema_version {version!r} (expected {config.SCHEMA_VERSION})")
    unknown = set(doc) - ALLOWED[sub]
    if unknown:
        raise DomainError(f"unknown config keys for '{sub}': {sorted(unknown)}")
    return doc


def _write_json(path, doc) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _clean(v):
    """JSON-safe copy: NaN/inf become None, numpy scalars become Python numbers."""
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.ndarray):
        return _clean(v.tolist())
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def _report(sub: str, cfg: dict, args, results: dict) -> dict:
    return _clean(
        {
            "schema_version": config.SCHEMA_VERSION,
            "version": __version__,
            "subcommand": sub,
            "config": cfg,
            "defaults": config.DEFAULTS,
            "seed": args.seed,
            "results": results,
        }
    )


def _target(cfg: dict):
    if "spec" in cfg:
        return spec_from_json(cfg["spec"])
    if "p" not in cfg or "r" not in cfg:
        raise DomainError("need either 'spec' or both 'p' and 'r'")
    return SpaceParams(float(cfg["p"]), float(cfg["r"]))


def _target_json(target):
    if isinstance(target, SpaceParams):
        return {"p": target.p, "r": target.r}
    return spec_to_json(target)


def cmd_symbol(cfg, args) -> dict:
    out = {}
    if "kernel" in cfg:
        kernel, c0, c1 = kernel_from_json(cfg["kernel"])
        line = MellinLine(float(cfg.get("beta", 0.5)))
        xi = np.asarray(cfg.get("xi", np.linspace(-10, 10, 41).tolist()), dtype=float)
        num = mellin_symbol(kernel, c0, c1, line, xi)
        ref = mellin_symbol_closed_form(kernel, c0, c1, line, xi)
        path = os.path.join(args.out, "mellin_symbol.csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["xi", "re_symbol", "im_symbol", "re_closed_form", "im_closed_form"])
            for x, a, b in zip(xi, num, ref):
                w.writerow([repr(float(v)) for v in (x, a.real, a.imag, b.real, b.imag)])
        out["mellin_symbol"] = {"beta": line.beta, "max_abs_deviation": float(np.max(np.abs(num - ref)))}
    if "spec" in cfg or "p" in cfg:
        target = _target(cfg)
        contour = cfg.get("contour", "full")
        n_edge = cfg.get("n_edge")
        if contour == "full":
            path = RectanglePath.full(n_edge)
        elif contour == "gamma1":
            path = RectanglePath.gamma1(n_edge)
        else:
            raise DomainError(f"contour must be 'full' or 'gamma1', got {contour!r}")
        curve = sample_det_curve(target, path)
        write_curve_csv(os.path.join(args.out, "curve.csv"), path, curve)
        k = int(np.argmin(np.abs(curve)))
        out["curve"] = {
            "target": _target_json(target),
            "contour": contour,
            "samples": len(path),
            "min_abs_det": float(np.abs(curve[k])),
            "argmin": {"edge": path.edges[k].value, "coord": float(path.coords[k])},
            "max_abs_det": float(np.abs(curve).max()),
        }
    if not out:
        raise DomainError("symbol needs 'p'/'r', 'spec' or 'kernel'")
    return out


def _axis(cfg, name, lo, hi, step):
    if f"{name}_grid" in cfg:
        return np.asarray(cfg[f"{name}_grid"], dtype=float)
    a = float(cfg.get(f"{name}_min", lo))
    b = float(cfg.get(f"{name}_max", hi))
    h = float(cfg.get(f"{name}_step", step))
    if not (h > 0 and b >= a):
        raise DomainError(f"invalid {name} range")
    m = int(round((b - a) / h))
    # integer multiples of the step keep lattice values such as p = 2 exact
    return np.round(a + h * np.arange(m + 1), 12)


def cmd_scan(cfg, args) -> dict:
    p_grid = _axis(cfg, "p", 1.5, 3.0, 0.05)
    r_grid = _axis(cfg, "r", -1.0, 2.0, 0.05)
    rmap = scan_region(p_grid, r_grid, cfg.get("tolerance"), cfg.get("n_xi"), threads=args.threads)
    rmap.to_csv(os.path.join(args.out, "region.csv"))
    summary = rmap.summary()
    _write_json(os.path.join(args.out, "region.json"), _clean({"schema_version": config.SCHEMA_VERSION, **summary}))
    return summary


def cmd_index(cfg, args) -> dict:
    target = _target(cfg)
    n_edge = cfg.get("n_edge")
    local = local_invertibility_at_zero(target)
    full = full_ellipticity(target, n_edge)
    rep = index_report(target, n_edge)
    return {
        "target": _target_json(target),
        "gamma1_relative_min": local.relative_min,
        "full_min_abs_det": full.min_abs_det,
        "winding_number": rep.winding_number,
        "operator_index": rep.operator_index,
        "residual": rep.residual,
        "max_step": rep.max_step,
    }


def cmd_solve(cfg, args) -> dict:
    method = cfg.get("method", "both")
    if method not in ("both", "mellin", "nystrom"):
        raise DomainError(f"unknown method {method!r}")
    beta = float(cfg.get("beta", config.get("solver_beta")))
    grid = config.get("solver_grid")
    grid.update(cfg.get("grid", {}))
    inst, phi_x, psi_x = manufactured_instance(args.seed, grid, MellinLine(beta), int(cfg.get("n_bumps", 3)))
    sols = {}
    if method in ("both", "mellin"):
        sols["mellin"] = solve_mellin(inst)
    if method in ("both", "nystrom"):
        sols["nystrom"] = solve_nystrom(inst, cfg.get("nystrom_ratio"), cfg.get("nystrom_nodes"))
    results = {"beta": beta, "grid": grid, "data_decays": inst.decays, "methods": {}}
    for name, sol in sols.items():
        write_grid_csv(os.path.join(args.out, f"{name}_phi.csv"), sol.phi.t, sol.phi.values)
        write_grid_csv(os.path.join(args.out, f"{name}_psi.csv"), sol.psi.t, sol.psi.values)
        info = {k: v for k, v in sol.info.items() if k != "seconds"}
        results["methods"][name] = {
            "method": sol.method,
            "residual": sol.residual_norm,
            "error_phi": relative_difference(sol.phi, phi_x, beta),
            "error_psi": relative_difference(sol.psi, psi_x, beta),
            "info": info,
        }
    if len(sols) == 2:
        a, b = sols["mellin"], sols["nystrom"]
        results["agreement"] = max(relative_difference(a.phi, b.phi, beta), relative_difference(a.psi, b.psi, beta))
    return results


def cmd_bvp(cfg, args) -> dict:
    results = {}
    if "criterion" in cfg:
        crit = cfg["criterion"]
        rows = []
        for p in crit.get("p", []):
            for s in crit.get("s", []):
                rows.append((float(p), float(s), bvp_criterion(p, s).value))
        with open(os.path.join(args.out, "criterion.csv"), "w") as fh:
            fh.write("p,s,verdict\n")
            for p, s, v in rows:
                fh.write(f"{p!r},{s!r},{v}\n")
        results["criterion"] = {"cells": len(rows)}
        if "formula_id" not in cfg:
            return results
    case, grid, mode = case_from_json(
        {
            "formula_id": cfg.get("formula_id", 1),
            "grid": cfg.get("grid", {}),
            "extension_mode": cfg.get("extension_mode", "true"),
        }
    )
    probes = cfg.get("probes")
    res = run_pipeline(case, mode, grid, probes, cfg.get("method", "mellin"))
    res.write_probe_csv(os.path.join(args.out, "probes.csv"))
    _write_json(os.path.join(args.out, "case.json"), case.to_json(grid, mode))
    results["pipeline"] = res.summary()
    return results


COMMANDS = {"symbol": cmd_symbol, "scan": cmd_scan, "index": cmd_index, "solve": cmd_solve, "bvp": cmd_bvp}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mellinbvp", description="Mellin symbols, Fredholm scans and model-system solves.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "symbol": "determinant curve of a system or composite symbol; Mellin symbol tables",
        "scan": "Fredholm region map over a (p, r) grid",
        "index": "ellipticity and winding number",
        "solve": "solve a manufactured model-system instance",
        "bvp": "manufactured mixed boundary value problem and the solvability criterion",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomised instances")
        sp.add_argument("--threads", type=int, default=1, help="worker threads for scans")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise DomainError("--threads must be positive")
        cfg = _load_config(args.config, args.command)
        os.makedirs(args.out, exist_ok=True)
        results = COMMANDS[args.command](cfg, args)
        _write_json(os.path.join(args.out, "report.json"), _report(args.command, cfg, args, results))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DomainError, ValueError, KeyError, TypeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
