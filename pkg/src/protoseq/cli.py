"""Command-line interface.

Subcommands: gen (construct sequence sets), verify (property audits),
alloc (hex reuse planning), params (frame-length search), sim (slot-level
superframe simulation), compare (scheme comparison table).

Exit codes: 0 = property holds / success, 1 = property violated,
2 = usage error or infeasible parameters.

Every run carries a manifest: the deterministic core (command, input
digest, seed, version) is embedded in data outputs; wall-clock timestamps
live only in the sidecar <out>.manifest.json so reruns with equal inputs
produce byte-identical data files.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .hexalloc import HexCell, ReusePlan, cluster_size
from .netsim import (Scenario, baseline_compare, check_block_free,
                     frame_offset_audit, run_superframe,
                     sequences_from_config)
from .rscpc import ParamSearchError, select_params_prop1, select_params_prop2
from .sequences import SequenceSet
from .verify import (StateCapExceeded, is_ui, max_conflict_free_gap,
                     min_conflict_free_count, separation_audit, window_audit,
                     xcorr_bound_audit)


class UsageError(ValueError):
    pass


def _digest(obj) -> str:
    return hashlib.sha256(
        json.dumps(obj, sort_keys=True, default=str).encode()).hexdigest()


def _manifest_core(args: argparse.Namespace, extra: dict | None = None) -> dict:
    payload = {k: v for k, v in vars(args).items()
               if k not in ("func", "out", "format") and v is not None}
    if extra:
        payload.update(extra)
    return {"command": args.command, "config_digest": _digest(payload),
            "seed": getattr(args, "seed", None), "version": __version__}


def _emit(doc: dict, args: argparse.Namespace, manifest: dict) -> None:
    doc = dict(doc)
    doc["manifest"] = manifest
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        _write_sidecar(args.out, manifest, [args.out])
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)


def _write_sidecar(out_path: str, manifest: dict, outputs: list[str]) -> None:
    side = dict(manifest)
    side["outputs"] = outputs
    side["created_utc"] = datetime.now(timezone.utc).isoformat()
    with open(out_path + ".manifest.json", "w") as fh:
        json.dump(side, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"missing required flag(s): "
                         + ", ".join("--" + n.replace("_", "-") for n in missing))


# ---------------------------------------------------------------------------

def _gen_config(args) -> dict:
    kind = args.kind
    cfg: dict = {"construction": kind}
    if kind in ("crt", "crt0"):
        _require(args, "p", "q")
        cfg.update(p=int(args.p), q=int(args.q))
    elif kind == "rs_cpc":
        _require(args, "n", "p", "k")
        cfg.update(n=int(args.n), p=int(args.p), k=int(args.k))
        if args.alpha is not None:
            cfg["alpha"] = int(args.alpha)
    elif kind == "product":
        _require(args, "x", "y")
        cfg.update(x={"file": args.x}, y={"file": args.y})
    elif kind == "expanded":
        _require(args, "base", "p", "m")
        cfg.update(base={"file": args.base}, p=int(args.p), M=int(args.m))
        if args.split:
            cfg["split_labels"] = args.split.split(",")
    elif kind == "tdma":
        _require(args, "g", "delta")
        cfg.update(G=int(args.g), delta=int(args.delta))
    else:
        raise UsageError(f"unknown construction {kind!r}")
    if args.pad:
        cfg["pad_slots"] = int(args.pad)
    return cfg


def cmd_gen(args) -> int:
    cfg = _gen_config(args)
    s = sequences_from_config(cfg)
    weights = sorted({seq.weight for seq in s.sequences})
    print(f"{len(s)} sequences, period {s.period}, weights {weights}",
          file=sys.stderr)
    _emit(s.to_json(), args, _manifest_core(args))
    return 0


def _load_set(args) -> SequenceSet:
    if getattr(args, "set", None):
        return SequenceSet.load(args.set)
    if getattr(args, "config", None):
        return sequences_from_config(json.loads(args.config))
    if args.property == "window" and getattr(args, "p", None):
        from .crt import crt0_set
        return crt0_set(int(args.p), 2 * int(args.p) - 1)
    raise UsageError("provide --set FILE or --config JSON"
                     + (" or --p" if args.property == "window" else ""))


def cmd_verify(args) -> int:
    s = _load_set(args)
    prop = args.property
    mode = args.mode
    protected = args.protected.split(",") if args.protected else None
    if prop == "ui":
        rep = is_ui(s, mode=mode, samples=args.samples, seed=args.seed,
                    jobs=args.jobs)
    elif prop == "xcorr":
        _require(args, "bound")
        rep = xcorr_bound_audit(s, int(args.bound))
    elif prop == "separation":
        rep = separation_audit(s, int(args.bound) if args.bound is not None else None)
    elif prop == "window":
        window = int(args.window) if args.window is not None else (
            2 * int(args.p) if args.p else None)
        rep = window_audit(s, window=window, mode=mode, samples=args.samples,
                           seed=args.seed)
    elif prop == "cf-count":
        rep = min_conflict_free_count(
            s, protected, mode=mode, samples=args.samples, seed=args.seed,
            threshold=int(args.threshold) if args.threshold is not None else None)
    elif prop == "cf-gap":
        rep = max_conflict_free_gap(
            s, protected, mode=mode, samples=args.samples, seed=args.seed,
            bound=int(args.bound) if args.bound is not None else None)
    else:
        raise UsageError(f"unknown property {prop!r}")
    _emit(rep.to_json(), args, _manifest_core(args))
    print(f"{prop}: {rep.verdict}", file=sys.stderr)
    return rep.exit_code


def cmd_alloc(args) -> int:
    import math
    _require(args, "r", "h")
    R, h = float(args.r), float(args.h)
    G, b1, b2 = cluster_size(R, h)
    d = math.sqrt(3.0) * h
    doc = {"G": G, "b1": b1, "b2": b2,
           "threshold": (2 * R / d) ** 2,
           "min_cochannel_m": d * math.sqrt(G)}
    if args.cell:
        m, n = (int(v) for v in args.cell.split(","))
        plan = ReusePlan(h, R, G, b1, b2)
        doc["cell"] = [m, n]
        doc["index"] = plan.allocate(HexCell(m, n))
        print(f"cell ({m},{n}) -> index {doc['index']}", file=sys.stderr)
    else:
        plan = ReusePlan(h, R, G, b1, b2)
        doc["plan"] = plan.to_json()
        print(f"G={G} (b1={b1}, b2={b2}), min cochannel "
              f"{doc['min_cochannel_m']:.3f} m", file=sys.stderr)
    _emit(doc, args, _manifest_core(args))
    return 0


def cmd_params(args) -> int:
    _require(args, "m", "g")
    if args.scheme == "prop1":
        _require(args, "delta")
        sel = select_params_prop1(int(args.m), int(args.g), int(args.delta))
    else:
        sel = select_params_prop2(int(args.m), int(args.g))
    doc = {"scheme": sel.scheme, "M": sel.M, "G": sel.G, "delta": sel.delta,
           "n": sel.n, "p": sel.p, "k": sel.k, "frame_slots": sel.period}
    _emit(doc, args, _manifest_core(args))
    print(f"{sel.scheme}: L={sel.period} at (n={sel.n}, p={sel.p}, k={sel.k})",
          file=sys.stderr)
    return 0


def cmd_sim(args) -> int:
    _require(args, "config")
    with open(args.config) as fh:
        cfg = json.load(fh)
    sc = Scenario.from_config(cfg, base_dir=os.path.dirname(args.config) or ".")
    seed = args.seed
    if seed is None:
        import numpy as np
        seed = int(np.random.SeedSequence().entropy % (2 ** 31))
        print(f"generated seed: {seed}", file=sys.stderr)
    log = run_superframe(sc, seed=seed)
    report = check_block_free(log, sc)
    doc = report.to_json()
    doc["frame_offset_audit"] = frame_offset_audit(log, sc)
    manifest = _manifest_core(args, {"config_content": cfg, "resolved_seed": seed})
    if args.out:
        report_path = args.out + ".report.json"
        csv_path = args.out + ".log.csv"
        doc["manifest"] = manifest
        with open(report_path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        log.to_csv(csv_path)
        _write_sidecar(args.out, manifest, [report_path, csv_path])
        print(f"wrote {report_path} and {csv_path}", file=sys.stderr)
    else:
        doc["manifest"] = manifest
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"block_free: {report.verdict}", file=sys.stderr)
    return report.exit_code


def cmd_compare(args) -> int:
    _require(args, "m", "g", "delta")
    table = baseline_compare(int(args.m), int(args.g), int(args.delta))
    if args.format == "csv":
        lines = ["scheme,frame_slots,meets_floor,params"]
        for r in table["rows"]:
            params = ";".join(f"{k}={v}" for k, v in sorted(r["params"].items()))
            lines.append(f"{r['scheme']},{r['frame_slots']},"
                         f"{int(r['meets_floor'])},{params}")
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
            _write_sidecar(args.out, _manifest_core(args), [args.out])
        else:
            sys.stdout.write(text)
    else:
        _emit(table, args, _manifest_core(args))
    print(f"winner: {table['winner']} (floor {table['floor']})", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    common.add_argument("--out", type=str, default=None)
    common.add_argument("--format", choices=["json", "csv"], default="json")

    ap = argparse.ArgumentParser(
        prog="protoseq",
        description="Construct, verify, allocate, and simulate feedback-free "
                    "transmission schedules.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common],
                       help="construct a sequence set and write it as JSON")
    g.add_argument("kind", choices=["crt", "crt0", "rs_cpc", "product",
                                    "expanded", "tdma"])
    g.add_argument("--p", type=int)
    g.add_argument("--q", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--alpha", type=int)
    g.add_argument("--g", type=int)
    g.add_argument("--delta", type=int)
    g.add_argument("--x", type=str, help="left factor set file (product)")
    g.add_argument("--y", type=str, help="right factor set file (product)")
    g.add_argument("--base", type=str, help="base set file (expanded)")
    g.add_argument("--m", type=int, help="local user bound (expanded)")
    g.add_argument("--split", type=str, help="comma-separated guard labels")
    g.add_argument("--pad", type=int, help="pad with this many silent slots per 1")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", parents=[common],
                       help="run a property audit and write a report")
    v.add_argument("property", choices=["ui", "xcorr", "separation", "window",
                                        "cf-count", "cf-gap"])
    v.add_argument("--set", type=str, help="sequence set JSON file")
    v.add_argument("--config", type=str, help="inline construction config JSON")
    v.add_argument("--mode", choices=["exhaustive", "random"],
                   default="exhaustive")
    v.add_argument("--samples", type=int, default=100_000)
    v.add_argument("--bound", type=int)
    v.add_argument("--threshold", type=int)
    v.add_argument("--window", type=int)
    v.add_argument("--p", type=int,
                   help="window shortcut: audit the p-member split family")
    v.add_argument("--protected", type=str,
                   help="comma-separated protected labels (cf-count/cf-gap)")
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("alloc", parents=[common],
                       help="compute reuse cluster size and cell allocation")
    a.add_argument("--r", "--R", dest="r", type=float, help="hearing radius (m)")
    a.add_argument("--h", type=float, help="cell radius (m)")
    a.add_argument("--cell", type=str, help="m,n cell to allocate")
    a.set_defaults(func=cmd_alloc)

    p = sub.add_parser("params", parents=[common],
                       help="search frame parameters for a scheme")
    p.add_argument("scheme", choices=["prop1", "prop2"])
    p.add_argument("--m", "--M", dest="m", type=int)
    p.add_argument("--g", "--G", dest="g", type=int)
    p.add_argument("--delta", type=int)
    p.set_defaults(func=cmd_params)

    s = sub.add_parser("sim", parents=[common],
                       help="simulate one superframe and audit block-free service")
    s.add_argument("--config", type=str, help="scenario config JSON file")
    s.set_defaults(func=cmd_sim)

    c = sub.add_parser("compare", parents=[common],
                       help="frame lengths of the baseline and both schemes")
    c.add_argument("--m", "--M", dest="m", type=int)
    c.add_argument("--g", "--G", dest="g", type=int)
    c.add_argument("--delta", type=int)
    c.set_defaults(func=cmd_compare)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except StateCapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (UsageError, ParamSearchError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
