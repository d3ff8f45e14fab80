"""Command-line entry points.

Subcommands: verify, predict, node-classify, rad, game, serve.
Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from ..core import AchievabilityError, StabilityError, all_sequences
from ..graphopt import (
    EdgeListError,
    RelaxedSet,
    WeightedGraph,
    build_laplacian,
    quad_values,
    rademacher_relaxed,
    relaxed_graph_phi,
    spectral_rad_bound,
)
from ..oracle import verify_achievability
from ..philib import FiniteVertexSet, finite_set_phi, rademacher_of_set
from ..predictors import PlayoutConfig, draw
from .runner import forecast_for, read_outcomes, run_transcript, transcript_summary
from .specs import ConfigError, build_phi, load_config

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _write(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_graph_file(path: str) -> WeightedGraph:
    try:
        return WeightedGraph.load(path)
    except OSError as exc:
        raise OSError(f"cannot read graph: {exc}") from None
    except EdgeListError as exc:
        raise ConfigError(str(exc)) from None


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    try:
        report = verify_achievability(cfg.phi, tol=args.tol)
    except (StabilityError, AchievabilityError) as exc:
        print(f"FAIL: {exc}")
        return EXIT_VERIFY
    print(f"regime: {report.regime}")
    print(f"uniform mean: {report.mean:.12g} (target {1 - 1 / cfg.k:.12g})")
    print(f"max gap: {report.max_gap:.3g} (tol {report.tol:g})")
    print("PASS" if report.ok else "FAIL")
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_predict(args) -> int:
    cfg = load_config(args.config)
    path = args.outcomes or cfg.outcomes_path
    if path is None:
        raise ConfigError("no outcome stream: pass --outcomes or set 'outcomes' in the config")
    outcomes = read_outcomes(path, cfg.k)
    tr = run_transcript(cfg.phi, outcomes, cfg.predictor, cfg.seed)
    _write(tr.to_jsonl(transcript_summary(cfg.phi, tr)), args.out)
    return EXIT_OK


def cmd_node_classify(args) -> int:
    g = _load_graph_file(args.graph)
    if args.kappa < 0:
        raise ConfigError("kappa must be >= 0")
    L = build_laplacian(g)
    rset = RelaxedSet(L, args.kappa)
    if args.relaxed:
        pen = rademacher_relaxed(rset, "mc", m=args.penalty_samples, seed=args.seed)
        phi = relaxed_graph_phi(rset, pen)
    else:
        Y = all_sequences(g.n, 2)
        member = quad_values(L, Y) <= args.kappa + 1e-9
        if not member.any():
            raise ConfigError(f"no labeling satisfies the cut budget kappa={args.kappa}")
        F = FiniteVertexSet(Y[member], g.n)
        phi = finite_set_phi(F, rademacher_of_set(F, "exhaustive"))
    labels = read_outcomes(args.labels)
    mode = "exact_mc" if args.playouts > 1 else "single_playout"
    cfg = PlayoutConfig(mode, m=args.playouts, seed=args.seed)
    tr = run_transcript(phi, labels, cfg, args.seed)
    _write(tr.to_jsonl(transcript_summary(phi, tr)), args.out)
    return EXIT_OK


def cmd_rad(args) -> int:
    g = _load_graph_file(args.graph)
    if args.kappa <= 0:
        raise ConfigError("the spectral bound needs kappa > 0")
    rset = RelaxedSet(build_laplacian(g), args.kappa)
    if args.exhaustive:
        est = rademacher_relaxed(rset, "exhaustive")
    else:
        est = rademacher_relaxed(rset, "mc", m=args.samples, seed=args.seed)
    bound = spectral_rad_bound(rset)
    print(f"rad_estimate: {est.value:.10f} (half_width {est.half_width:.3g}, {est.provenance})")
    print(f"spectral_bound: {bound:.10f}")
    print(f"ratio: {est.value / bound:.6f}")
    if est.value - est.half_width > bound + 1e-10:
        print("FAIL: estimate exceeds the spectral bound")
        return EXIT_VERIFY
    return EXIT_OK


def cmd_game(args) -> int:
    from .service import default_phi_spec

    phi = build_phi(default_phi_spec(args.n, args.max_period))
    cfg = PlayoutConfig("single_playout", seed=args.seed)
    score = 0
    prefix: list[int] = []
    print(f"Matching pennies, {args.n} rounds. I predict your next call;")
    print("I commit before you choose. Enter + or - (q to quit).")
    for t in range(1, args.n + 1):
        f = forecast_for(phi, prefix, cfg)
        pred = draw(f, args.seed, t)
        print(f"[round {t}/{args.n}] committed.", end=" ", flush=True)
        try:
            raw = input("your call [+/-]: ").strip()
        except EOFError:
            print()
            break
        if raw.lower() in ("q", "quit", "exit"):
            break
        if raw in ("+", "+1", "1"):
            y = 1
        elif raw in ("-", "-1"):
            y = -1
        else:
            print("  (unrecognized, skipping round)")
            continue
        hit = pred == y
        score += int(hit)
        prefix.append(y)
        played = len(prefix)
        print(f"  I predicted {'+' if pred == 1 else '-'} -> "
              f"{'I win' if hit else 'you win'} (my rate {score / played:.2f})")
    if prefix:
        print(f"final: {score}/{len(prefix)} correct predictions")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    port = int(os.environ.get("SEQPRED_PORT", args.port))
    app = create_app(cors_origins=args.cors_origin or None,
                     static_dir=args.static_dir, persist_dir=args.persist_dir)
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="seqpred",
                                description="online individual-sequence prediction toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", help="check a potential spec for achievability")
    sp.add_argument("--config", required=True)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("predict", help="replay an outcome stream, write a JSONL transcript")
    sp.add_argument("--config", required=True)
    sp.add_argument("--outcomes")
    sp.add_argument("--out", help="output path (default stdout)")
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("node-classify", help="online node classification on a weighted graph")
    sp.add_argument("--graph", required=True, help="edge-list file")
    sp.add_argument("--kappa", type=float, required=True, help="cut budget")
    sp.add_argument("--labels", required=True, help="label stream file (one per vertex)")
    sp.add_argument("--relaxed", action="store_true",
                    help="use the convex relaxation instead of enumerating the cut set")
    sp.add_argument("--playouts", type=int, default=1)
    sp.add_argument("--penalty-samples", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_node_classify)

    sp = sub.add_parser("rad", help="Rademacher estimate vs spectral bound for a relaxed cut set")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--samples", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--exhaustive", action="store_true")
    sp.set_defaults(func=cmd_rad)

    sp = sub.add_parser("game", help="terminal matching-pennies loop")
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--max-period", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_game)

    sp = sub.add_parser("serve", help="start the HTTP game service")
    sp.add_argument("--port", type=int, default=8000)
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--cors-origin", action="append",
                    help="allowed CORS origin (repeatable)")
    sp.add_argument("--static-dir", help="directory of UI assets to serve at /")
    sp.add_argument("--persist-dir", help="append per-session JSONL transcripts here")
    sp.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
