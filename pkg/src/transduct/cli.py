"""Command-line front door.

Subcommands: solve (full pipeline), pseudo-label (text-only baseline),
ensemble (average per-class prompt files), bench (seeded synthetic mixture).
Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import bench as bench_mod
from .errors import TransductError
from .evaluate import build_report, save_report_json
from .io import load_embeddings, load_prompt_matrix, save_embeddings, save_predictions
from .pseudo_labels import compute_pseudo_labels, ensemble_class_embeddings
from .solver import SolverConfig, solve

THREADS_ENV = "TRANSDUCT_THREADS"


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the contract reserves 2 for
    # data errors, so remap usage problems to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _add_solver_flags(p: argparse.ArgumentParser, tau_default: float, affinity_default: str) -> None:
    p.add_argument("--tau", type=float, default=tau_default, help="softmax temperature")
    p.add_argument("--affinity", choices=("auto", "gram", "clamped", "knn"),
                   default=affinity_default, help="affinity mode")
    p.add_argument("--knn", type=int, default=3, metavar="K", help="neighbors in knn mode")
    p.add_argument("--outer-iters", type=int, default=10)
    p.add_argument("--inner-iters", type=int, default=3)
    p.add_argument("--tol", type=float, default=1e-6, help="assignment-change tolerance")
    p.add_argument("--top-m", type=int, default=8, help="confident samples per initial mean")
    p.add_argument("--z-update", choices=("standard", "descent"), default="standard")
    p.add_argument("--gmm-weight", choices=("1", "1/N"), default="1",
                   help="log-density weight inside the standard update")
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("-v", "--verbose", action="store_true")


def _config_from_args(args) -> SolverConfig:
    return SolverConfig(
        tau=args.tau,
        affinity_mode=args.affinity,
        k_neighbors=args.knn,
        max_outer_iters=args.outer_iters,
        inner_z_iters=args.inner_iters,
        z_tolerance=args.tol,
        top_m_init=args.top_m,
        z_update=args.z_update,
        gmm_weight_in_z_update=1 if args.gmm_weight == "1" else "1/N",
        threads=args.threads,
    )


def _print_iterations(trace, stream=sys.stderr) -> None:
    for r in trace.records:
        obj = "n/a" if r.objective_total is None else f"{r.objective_total:.6f}"
        print(f"iter {r.iteration}: objective {obj}  max-z-change {r.max_z_change:.3e}  "
              f"{r.seconds:.3f}s", file=stream)


def _cmd_solve(args) -> int:
    t0 = time.perf_counter()
    images = load_embeddings(args.images, "image", normalize=not args.no_normalize)
    texts = load_embeddings(args.texts, "text", normalize=not args.no_normalize)
    truth = load_embeddings(args.labels, "labels").labels if args.labels else None
    load_seconds = time.perf_counter() - t0

    config = _config_from_args(args)
    y_hat = compute_pseudo_labels(images.data, texts.data, config.tau)
    z, trace = solve(images.data, texts.data, config)
    if args.verbose:
        _print_iterations(trace)

    timing = {
        "load_seconds": load_seconds,
        "affinity_seconds": trace.affinity_seconds,
        "solve_seconds": trace.solve_seconds,
    }
    report = build_report(y_hat, z, truth, trace, config, timing)
    save_predictions(report, args.out)
    if args.report:
        save_report_json(report, args.report)
    for line in report.summary_lines():
        print(line)
    print(f"predictions written to {args.out}")
    return 0


def _cmd_pseudo_label(args) -> int:
    images = load_embeddings(args.images, "image", normalize=not args.no_normalize)
    texts = load_embeddings(args.texts, "text", normalize=not args.no_normalize)
    truth = load_embeddings(args.labels, "labels").labels if args.labels else None
    y_hat = compute_pseudo_labels(images.data, texts.data, args.tau)
    report = build_report(y_hat, y_hat, truth)
    save_predictions(report, args.out)
    if truth is not None:
        print(f"inductive top-1: {report.inductive_top1:.1f}")
    print(f"pseudo-labels written to {args.out}")
    return 0


def _cmd_ensemble(args) -> int:
    prompts = [load_prompt_matrix(p) for p in args.inputs]
    ensembled = ensemble_class_embeddings(prompts)
    save_embeddings(ensembled, args.out)
    print(f"ensembled {len(prompts)} classes into {args.out}")
    return 0


def _cmd_bench(args) -> int:
    config = _config_from_args(args)
    result = bench_mod.run_benchmark(
        args.n, args.k, args.d, args.seed,
        separation=args.separation, noise=args.noise, text_bias=args.text_bias,
        config=config,
    )
    if args.verbose:
        _print_iterations(result["trace"])
    if args.dump_dir:
        os.makedirs(args.dump_dir, exist_ok=True)
        save_embeddings(result["features"], os.path.join(args.dump_dir, "images.rste"), kind="image")
        save_embeddings(result["texts"], os.path.join(args.dump_dir, "texts.rste"), kind="text")
        save_embeddings(result["labels"], os.path.join(args.dump_dir, "labels.rste"), kind="labels")
        print(f"tensors dumped to {args.dump_dir}", file=sys.stderr)
    timing = {
        "affinity_seconds": result["trace"].affinity_seconds,
        "solve_seconds": result["trace"].solve_seconds,
    }
    report = build_report(result["y_hat"], result["z"], result["labels"],
                          result["trace"], result["config"], timing)
    if args.out:
        save_predictions(report, args.out)
    if args.report:
        save_report_json(report, args.report)
    print(f"inductive top-1:    {report.inductive_top1:.1f}")
    print(f"transductive top-1: {report.transductive_top1:.1f}")
    print(f"delta:              {report.delta:+.1f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="transduct",
                     description="Transductive zero-shot classification on precomputed embeddings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[], help="run the full pipeline on embedding files")
    p.add_argument("--images", required=True, help="image embeddings (RSTE or NPY)")
    p.add_argument("--texts", required=True, help="class text embeddings (RSTE or NPY)")
    p.add_argument("--labels", help="optional ground-truth labels for accuracy reporting")
    p.add_argument("--out", required=True, help="predictions CSV path")
    p.add_argument("--report", help="JSON report path")
    p.add_argument("--no-normalize", action="store_true",
                   help="skip L2 normalization on load")
    _add_solver_flags(p, tau_default=100.0, affinity_default="auto")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("pseudo-label", help="emit the text-only baseline predictions")
    p.add_argument("--images", required=True)
    p.add_argument("--texts", required=True)
    p.add_argument("--labels")
    p.add_argument("--out", required=True)
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--tau", type=float, default=100.0)
    p.set_defaults(func=_cmd_pseudo_label)

    p = sub.add_parser("ensemble", help="average per-class prompt embedding files")
    p.add_argument("inputs", nargs="+", help="one M x d prompt file per class, in class order")
    p.add_argument("--out", required=True, help="output class-embeddings file")
    p.set_defaults(func=_cmd_ensemble)

    p = sub.add_parser("bench", help="seeded synthetic benchmark, prints both accuracies")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--d", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--separation", type=float, default=bench_mod.DEFAULT_SEPARATION)
    p.add_argument("--noise", type=float, default=bench_mod.DEFAULT_NOISE)
    p.add_argument("--text-bias", type=float, default=bench_mod.DEFAULT_TEXT_BIAS)
    p.add_argument("--out", help="optional predictions CSV path")
    p.add_argument("--report", help="optional JSON report path")
    p.add_argument("--dump-dir", help="write the generated tensors as RSTE files")
    _add_solver_flags(p, tau_default=bench_mod.DEFAULT_BENCH_TAU, affinity_default="knn")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TransductError as exc:
        print(f"transduct: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"transduct: io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
