"""Command line entry point: ``egocircles {synth,detect,eval,predict,report}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .corpus import CONFIG_ENV, CorpusError, load_config, load_corpus, snapshot, write_corpus
from .ego import DEFAULT_MIN_ALTERS, ego_network
from .linkpred import MODES, CircleIndex, LRConfig, PredictConfig, SplitSpec, SRWConfig, evaluate
from .metrics import overlapping_modularity, summarize
from .optimizer import OptimizerConfig
from .pipeline import detect_corpus
from .profiles import SnapshotStats, ego_profiles, profile_columns, similarity_edge_stats
from .synth import (PlantedEgoSpec, TemporalCorpusSpec, generate_ego,
                    generate_temporal_corpus)

TIMESTAMP_KEY = "generated_at"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_jsonable(v) for v in items]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return None if math.isnan(x) else x
    return obj


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, payload: dict, args: argparse.Namespace) -> None:
    meta = {
        "tool": "egocircles",
        "version": __version__,
        "kernel_backend": kernels.BACKEND,
        "config": {k: v for k, v in sorted(vars(args).items()) if k != "func"},
        TIMESTAMP_KEY: datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    atomic_write(path, json.dumps(_jsonable({"meta": meta, **payload}), indent=2, sort_keys=True) + "\n")


def write_tsv(path, rows: list[dict]) -> None:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), delimiter="\t", lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in r.items()})
    atomic_write(path, buf.getvalue())


def strip_timestamp(payload: dict) -> dict:
    out = json.loads(json.dumps(payload))
    out.get("meta", {}).pop(TIMESTAMP_KEY, None)
    return out


# ------------------------------------------------------------------ commands

def cmd_synth(args) -> str:
    out = Path(args.out)
    if args.kind == "corpus":
        spec = TemporalCorpusSpec(n_groups=args.groups, signal=args.signal,
                                  papers_per_year=args.papers_per_year, seed=args.seed)
        corpus, truth = generate_temporal_corpus(spec)
        out.mkdir(parents=True, exist_ok=True)
        tmp = out / ".corpus.csv.tmp"
        write_corpus(corpus, tmp, "csv")
        os.replace(tmp, out / "corpus.csv")
        write_json(out / "truth.json", {"spec": asdict(spec),
                                         "circles": [sorted(c) for c in truth.circles]}, args)
        return f"synth: {len(corpus)} papers, {len(truth.circles)} planted groups -> {out}"
    spec = PlantedEgoSpec(sizes=tuple(args.sizes), p_in=args.p_in, p_out=args.p_out,
                          sigma_within=args.sigma_within, sigma_between=args.sigma_between,
                          overlap=args.overlap, seed=args.seed)
    ego, profiles, truth = generate_ego(spec)
    write_json(out / "ego.json", {
        "spec": asdict(spec), "alters": list(ego.alters), "edges": ego.edge_ids(),
        "profiles": profiles.tolist(), "circles": [sorted(c) for c in truth.circles],
    }, args)
    return f"synth: ego network with {ego.n} alters, {len(ego.edges)} edges -> {out}"


def _optimizer_config(args) -> OptimizerConfig:
    return OptimizerConfig(tau_l=args.tau_l, patience=args.patience,
                           max_iterations=args.max_iterations, seed=args.seed)


def cmd_detect(args) -> str:
    config = load_config(args.config)
    corpus = load_corpus(args.corpus, config=config)
    payload = detect_corpus(corpus, _optimizer_config(args), args.cutoff_year,
                            args.min_alters, args.threads)
    write_json(args.out, payload, args)
    if args.profiles_out:
        snap = snapshot(corpus, args.cutoff_year) if args.cutoff_year is not None else corpus
        stats = SnapshotStats(snap)
        rows = []
        cols = profile_columns(config.n_fields)
        for ego in payload["egos"]:
            net = ego_network(stats.graph, ego["ego"])
            for alter, vec in zip(net.alters, ego_profiles(stats, net)):
                rows.append({"ego": net.ego_id, "alter": alter, **dict(zip(cols, map(float, vec)))})
        atomic_write(args.profiles_out, _csv(rows))
    n = sum(len(e["circles"]) for e in payload["egos"])
    return f"detect: {len(payload['egos'])} egos, {n} circles -> {args.out}"


def _csv(rows):
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def cmd_eval(args) -> str:
    detections = json.loads(Path(args.circles).read_text(encoding="utf-8"))
    config = load_config(args.config)
    corpus = load_corpus(args.corpus, config=config)
    cutoff = detections.get("cutoff_year")
    snap = snapshot(corpus, cutoff) if cutoff is not None else corpus
    stats = SnapshotStats(snap)
    graph = stats.graph
    majors = {a: stats.major_field(a) for a in stats.papers}
    pairs, qovs, skipped = [], [], 0
    fig2_counts: dict[int, list[int]] = {}
    for ego in detections["egos"]:
        net = ego_network(graph, ego["ego"])
        circles = [c["members"] for c in ego["circles"]]
        pairs.append((net, circles))
        if circles:
            qovs.append(overlapping_modularity(net, circles))
        else:
            skipped += 1
        if args.fig2_bin > 0:
            profs = dict(zip(net.alters, ego_profiles(stats, net)))
            for lo, _, e, n in similarity_edge_stats(graph, profs, args.fig2_bin):
                row = fig2_counts.setdefault(int(round(lo / args.fig2_bin)), [0, 0])
                row[0] += e
                row[1] += n
    tables = summarize(pairs, stats.citations, majors, config.n_fields)
    tables["fig2"] = [{"sim_bin_lo": b * args.fig2_bin, "p_edge": e / n, "n_edges": e, "n_pairs": n}
                      for b, (e, n) in sorted(fig2_counts.items())]
    out = Path(args.out_dir)
    for name, rows in tables.items():
        write_tsv(out / f"{name}.tsv", rows)
    summary = {
        "mean_q_ov": float(np.mean(qovs)) if qovs else None,
        "n_egos": len(pairs), "n_egos_scored": len(qovs), "n_egos_without_circles": skipped,
        "n_circles": sum(len(c) for _, c in pairs),
        "bands": tables["fig3_bands"],
    }
    write_json(out / "summary.json", summary, args)
    q = "n/a" if summary["mean_q_ov"] is None else f"{summary['mean_q_ov']:.4f}"
    return f"eval: {len(pairs)} egos, mean Q_ov {q} -> {out}"


def cmd_predict(args) -> str:
    config = load_config(args.config)
    corpus = load_corpus(args.corpus, config=config)
    spec = SplitSpec.parse(args.train_end, args.window)
    circles = None
    if args.circles:
        payload = json.loads(Path(args.circles).read_text(encoding="utf-8"))
        cutoff = payload.get("cutoff_year")
        if cutoff is not None and cutoff > spec.train_end:
            raise ValueError(f"circles detected up to {cutoff} leak past train_end {spec.train_end}")
        circles = CircleIndex.from_detections(payload)
    elif args.mode in ("NEB", "NEBC"):
        raise ValueError(f"mode {args.mode} needs --circles")
    pc = PredictConfig(mode=args.mode, model=args.model, seed=args.seed, neg_ratio=args.neg_ratio,
                       k=args.k, max_sources=args.max_sources,
                       lr=LRConfig(args.lr_rate, args.lr_epochs, args.lr_l2),
                       srw=SRWConfig(alpha=args.alpha, steps=args.srw_steps))
    report = evaluate(corpus, spec, circles, pc)
    report["predict_config"] = asdict(pc)
    write_json(args.out, report, args)
    return f"predict: {args.model}/{args.mode} AUC {report['auc']:.4f} Prec@{args.k} {report[f'prec@{args.k}']:.4f} -> {args.out}"


def cmd_report(args) -> str:
    rows = []
    for path in args.reports:
        r = json.loads(Path(path).read_text(encoding="utf-8"))
        cfg = r["meta"]["config"]
        prec_key = next(k for k in r if k.startswith("prec@"))
        rows.append({"report": str(path), "train_end": cfg.get("train_end"), "window": cfg.get("window"),
                     "model": cfg.get("model"), "mode": cfg.get("mode"),
                     "auc": r["auc"], prec_key.replace("@", "_at_"): r[prec_key]})
    if args.out:
        write_tsv(args.out, rows)
    else:
        write_tsv_stdout(rows)
    return f"report: {len(rows)} runs" + (f" -> {args.out}" if args.out else "")


def write_tsv_stdout(rows):
    if not rows:
        return
    w = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), delimiter="\t", lineterminator="\n")
    w.writeheader()
    w.writerows(rows)


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="egocircles", description=__doc__)
    p.add_argument("--version", action="version", version=f"egocircles {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed_required=True):
        sp.add_argument("--config", default=None,
                        help=f"INI file naming fields and decade bins (default ${CONFIG_ENV})")
        if seed_required:
            sp.add_argument("--seed", type=int, required=True)

    s = sub.add_parser("synth", help="write a synthetic corpus or ego network")
    common(s)
    s.add_argument("--kind", choices=("corpus", "ego"), default="corpus")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--groups", type=int, default=50)
    s.add_argument("--papers-per-year", type=int, default=25)
    s.add_argument("--signal", type=float, default=0.7)
    s.add_argument("--sizes", type=int, nargs="+", default=[10, 10, 10])
    s.add_argument("--overlap", type=float, default=0.0)
    s.add_argument("--p-in", type=float, default=0.8)
    s.add_argument("--p-out", type=float, default=0.05)
    s.add_argument("--sigma-within", type=float, default=0.02)
    s.add_argument("--sigma-between", type=float, default=0.3)
    s.set_defaults(func=cmd_synth)

    d = sub.add_parser("detect", help="detect circles in every ego network")
    common(d)
    d.add_argument("--corpus", required=True)
    d.add_argument("--cutoff-year", type=int, default=None)
    d.add_argument("--tau-l", type=float, default=0.2)
    d.add_argument("--min-alters", type=int, default=DEFAULT_MIN_ALTERS)
    d.add_argument("--patience", type=int, default=None, help="default: number of alters")
    d.add_argument("--max-iterations", type=int, default=None, help="default: 200 x alters")
    d.add_argument("--threads", type=int, default=1)
    d.add_argument("--profiles-out", default=None, help="optional CSV dump of alter profiles")
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_detect)

    e = sub.add_parser("eval", help="circle statistics and figure tables")
    common(e, seed_required=False)
    e.add_argument("--corpus", required=True)
    e.add_argument("--circles", required=True)
    e.add_argument("--fig2-bin", type=float, default=0.05,
                   help="similarity bin width for the edge-probability table (0 disables)")
    e.add_argument("--out-dir", required=True)
    e.set_defaults(func=cmd_eval)

    r = sub.add_parser("predict", help="temporal collaboration prediction")
    common(r)
    r.add_argument("--corpus", required=True)
    r.add_argument("--train-end", type=int, required=True)
    r.add_argument("--window", required=True, help="START:END years")
    r.add_argument("--mode", choices=MODES, default="NEBC")
    r.add_argument("--model", choices=("lr", "srw"), default="lr")
    r.add_argument("--circles", default=None)
    r.add_argument("--neg-ratio", type=int, default=5)
    r.add_argument("--k", type=int, default=20)
    r.add_argument("--max-sources", type=int, default=None)
    r.add_argument("--lr-rate", type=float, default=0.5)
    r.add_argument("--lr-epochs", type=int, default=2000)
    r.add_argument("--lr-l2", type=float, default=1e-3)
    r.add_argument("--alpha", type=float, default=0.15, help="SRW restart probability")
    r.add_argument("--srw-steps", type=int, default=30)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_predict)

    t = sub.add_parser("report", help="tabulate predict reports")
    t.add_argument("reports", nargs="+")
    t.add_argument("--out", default=None)
    t.set_defaults(func=cmd_report)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        msg = args.func(args)
    except OSError as exc:
        print(f"egocircles {args.command}: I/O error: {exc}", file=sys.stderr)
        return 1
    except (CorpusError, ValueError, KeyError, ArithmeticError) as exc:
        kind = type(exc).__name__
        print(f"egocircles {args.command}: {kind}: {exc}", file=sys.stderr)
        return 1
    print(msg)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
