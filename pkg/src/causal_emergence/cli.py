"""Command-line front end: ``emergence <command> ...``.

Exit codes: 0 success, 2 domain error, 3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import io as eio
from .config import AnalysisConfig
from .errors import EmergenceError, InvalidEndpoint, InvalidPartition, ParseError
from .paths import apportion, find_node, longest_path, select_endpoint
from .primitives import FIELDS, system_primitives
from .scales import Partition, aggregate_dist, coarsen, valid_macroscales
from .svd import svd_report
from .tpm import is_permutation, resolve_dist
from .zoo import block_partition, make_schedule

METRIC_COLUMNS = [
    "t",
    "cp_detspec",
    "cp_primitive",
    "ei_bits",
    "endpoint_delta_ei",
    "endpoint_delta_cp_detspec",
    "endpoint_delta_cp_primitive",
    "ce2_estimate",
    "ce1_vague",
]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(path: str):
    return eio.read_tpm(path)


def cmd_validate(args, cfg: AnalysisConfig) -> int:
    tpm = _load(args.tpm)
    perm = is_permutation(tpm)
    if cfg.output_format == "json":
        text = eio.dumps({"valid": True, "n": tpm.n, "permutation": perm})
    else:
        text = f"valid, n={tpm.n}, permutation={str(perm).lower()}\n"
    _emit(text, args.out)
    return 0


def cmd_primitives(args, cfg: AnalysisConfig) -> int:
    tpm = _load(args.tpm)
    report = system_primitives(tpm, resolve_dist(tpm, cfg.pc_kind))
    if cfg.output_format == "json":
        text = eio.dumps(report.to_dict())
    else:
        text = eio.csv_text(["n", *FIELDS], [[report.n, *(getattr(report, f) for f in FIELDS)]])
    _emit(text, args.out)
    return 0


def _scales(tpm, cfg: AnalysisConfig):
    pc = resolve_dist(tpm, cfg.pc_kind)
    return pc, valid_macroscales(
        tpm,
        pc,
        horizon=cfg.horizon,
        tol=cfg.consistency_tol,
        max_states=cfg.max_states,
        threads=cfg.threads,
    )


def cmd_scan(args, cfg: AnalysisConfig) -> int:
    tpm = _load(args.tpm)
    _, scales = _scales(tpm, cfg)
    rows = [
        {
            "partition": str(nd.partition),
            "k": nd.k,
            "divergence": nd.divergence,
            "cp": nd.cp(cfg.cp_kind),
        }
        for nd in scales
    ]
    if cfg.output_format == "json":
        text = eio.dumps({
            "n": tpm.n,
            "cp_kind": cfg.cp_kind,
            "pc_kind": cfg.pc_kind,
            "horizon": cfg.horizon,
            "scales": rows,
        })
    else:
        text = eio.csv_text(
            ["partition", "k", "divergence", "cp"],
            [[r["partition"], r["k"], r["divergence"], "undefined" if r["cp"] is None else r["cp"]]
             for r in rows],
        )
    _emit(text, args.out)
    return 0


def cmd_path(args, cfg: AnalysisConfig) -> int:
    tpm = _load(args.tpm)
    if args.endpoint is not None:
        try:
            wanted = Partition.parse(args.endpoint)
        except InvalidPartition as exc:
            raise InvalidEndpoint(str(exc)) from exc
        if wanted.n != tpm.n:
            raise InvalidEndpoint(f"endpoint covers {wanted.n} states, TPM has {tpm.n}")
        if wanted.k < 2:
            raise InvalidEndpoint("the single-block scale has no defined CP")
    _, scales = _scales(tpm, cfg)
    if args.endpoint is None:
        endpoint = select_endpoint(scales, cfg.cp_kind)
    else:
        endpoint = find_node(scales, wanted)
        if endpoint is None:
            raise InvalidEndpoint(f"{wanted} is not a dynamically consistent scale")
    micro = scales[0]
    report = apportion(longest_path(micro, endpoint, scales, cfg.cp_kind), epsilon_dr=cfg.epsilon_dr)
    if cfg.output_format == "json":
        text = eio.dumps(report.to_dict())
    else:
        rows = []
        for i, (part, k, cp) in enumerate(zip(report.partitions, report.ks, report.cps)):
            rows.append([i, part, k, cp, report.deltas[i - 1] if i else None])
        text = eio.csv_text(["step", "partition", "k", "cp", "delta"], rows)
    _emit(text, args.out)
    return 0


def cmd_svd(args, cfg: AnalysisConfig) -> int:
    tpm = _load(args.tpm)
    report = svd_report(tpm, cfg.epsilon_svd)
    if cfg.output_format == "json":
        text = eio.dumps(report.to_dict())
    else:
        rows = []
        for i, s in enumerate(report.sigmas, start=1):
            contrib = None if i == 1 else s - report.gamma_star
            rows.append([i, s, contrib])
        text = eio.csv_text(["i", "sigma", "contribution"], rows)
    _emit(text, args.out)
    return 0


def frame_metrics(t: int, frame, endpoint: Partition | None, cfg: AnalysisConfig) -> dict:
    """One row of the experiment metric table."""
    pc = resolve_dist(frame, cfg.pc_kind)
    micro = system_primitives(frame, pc)
    row = {
        "t": t,
        "cp_detspec": micro.cp_detspec,
        "cp_primitive": micro.cp_primitive,
        "ei_bits": micro.ei_bits,
        "endpoint_delta_ei": None,
        "endpoint_delta_cp_detspec": None,
        "endpoint_delta_cp_primitive": None,
    }
    if endpoint is not None:
        macro = system_primitives(coarsen(frame, endpoint, pc), aggregate_dist(pc, endpoint))
        row["endpoint_delta_ei"] = macro.ei_bits - micro.ei_bits
        row["endpoint_delta_cp_detspec"] = macro.cp_detspec - micro.cp_detspec
        row["endpoint_delta_cp_primitive"] = macro.cp_primitive - micro.cp_primitive
    svd = svd_report(frame, cfg.epsilon_svd)
    row["ce2_estimate"] = svd.ce2_estimate
    row["ce1_vague"] = svd.ce1_vague
    return row


def run_experiment(name: str, n: int, steps: int | None, blocks, endpoint: str | None, cfg: AnalysisConfig):
    schedule = make_schedule(name, n=n, steps=steps, block_sizes=blocks)
    if endpoint is not None:
        ep = Partition.parse(endpoint)
    elif schedule.kind == "fig4_selfloop":
        ep = block_partition(blocks)
    else:
        ep = None
    if ep is not None and (ep.n != schedule.frames[0].n or ep.k < 2):
        raise InvalidEndpoint(f"endpoint {ep} does not fit a {schedule.frames[0].n}-state system")

    def work(item):
        t, frame = item
        return frame_metrics(t, frame, ep, cfg)

    items = list(enumerate(schedule.frames))
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(work, items))
    else:
        rows = [work(it) for it in items]
    return schedule, ep, rows


def cmd_experiment(args, cfg: AnalysisConfig) -> int:
    blocks = [int(b) for b in args.blocks.split(",")]
    schedule, ep, rows = run_experiment(args.name, args.n, args.steps, blocks, args.endpoint, cfg)
    metrics = eio.csv_text(METRIC_COLUMNS, [[r[c] for c in METRIC_COLUMNS] for r in rows])
    if not args.out:
        sys.stdout.write(metrics)
        return 0
    out = Path(args.out)
    (out / "frames").mkdir(parents=True, exist_ok=True)
    names = []
    width = max(3, len(str(schedule.steps)))
    for t, frame in enumerate(schedule.frames):
        fname = f"frames/frame_{t:0{width}d}.json"
        eio.write_tpm(frame, out / fname)
        names.append(fname)
    (out / "metrics.csv").write_text(metrics, encoding="utf-8")
    manifest = {
        "experiment": schedule.kind,
        "steps": schedule.steps,
        "n": schedule.frames[0].n,
        "endpoint": None if ep is None else str(ep),
        "pc_kind": cfg.pc_kind,
        "frames": names,
        "metrics": "metrics.csv",
    }
    (out / "manifest.json").write_text(eio.dumps(manifest), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pc", choices=["uniform", "stationary"], default="uniform",
                        help="intervention distribution over causes")
    common.add_argument("--cp", choices=["detspec", "primitive"], default="detspec",
                        help="which CP value paths and scans use")
    common.add_argument("--tol", type=float, default=1e-9, help="consistency tolerance")
    common.add_argument("--horizon", type=int, default=5, help="random-walker steps for consistency")
    common.add_argument("--epsilon-svd", type=float, default=1e-9)
    common.add_argument("--epsilon-dr", type=float, default=1e-3, help="diminishing-returns threshold")
    common.add_argument("--max-states", type=int, default=None,
                        help="partition enumeration cap (default 12, or $EMERGENCE_MAX_STATES)")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", default=None, help="output file (directory for experiment)")
    common.add_argument("--threads", type=int, default=1)

    parser = argparse.ArgumentParser(prog="emergence", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, helptext in [
        ("validate", cmd_validate, "check a TPM file"),
        ("primitives", cmd_primitives, "causal primitives of the microscale"),
        ("scan", cmd_scan, "list every consistent coarse-graining"),
        ("path", cmd_path, "apportion CP gains along the longest micro-macro path"),
        ("svd", cmd_svd, "singular-value estimate of causal emergence"),
    ]:
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("tpm", help="TPM file (JSON or CSV)")
        if name == "path":
            p.add_argument("--endpoint", default=None, help="endpoint partition, e.g. 0,0,0,0,1,1,1,1")
        p.set_defaults(func=func)

    p = sub.add_parser("experiment", parents=[common], help="run a redistribution schedule")
    p.add_argument("name", help="noise | common_cause | combined | fig4")
    p.add_argument("--n", type=int, default=8, help="number of states (noise/common_cause/combined)")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--blocks", default="4,4", help="block sizes for fig4")
    p.add_argument("--endpoint", default=None, help="fixed endpoint partition for the delta columns")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = AnalysisConfig.from_args(args)
        return args.func(args, cfg)
    except EmergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ParseError.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
