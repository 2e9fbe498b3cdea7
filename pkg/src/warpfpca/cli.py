"""Command-line front end.

Subcommands cover the full pipeline: synthetic data generation, warping
transformation, joint model fitting, reconstruction, and report export.
Exit codes: 0 on success, 1 on validation failures (bad inputs, bad
parameters, malformed files), 2 on numerical failures.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import io as wio
from .datasets import make_toy_joint
from .joint import JointAmplitudePhasePCA
from .transforms import TRANSFORMS, WarpingTransformer

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the interface reserves
    # 2 for numerical failures, so remap command-line misuse to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="warpfpca",
        description="Joint amplitude-phase functional PCA with warping transforms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-toy", parents=[], help="generate a synthetic joint dataset")
    gen.add_argument("--output-dir", required=True)
    gen.add_argument("--samples", type=int, default=50)
    gen.add_argument("--grid-size", type=int, default=201)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--shape", type=float, default=5.0, help="gamma shape of the exponents")
    gen.add_argument("--rate", type=float, default=5.0, help="gamma rate of the exponents")
    gen.add_argument("--amplitude-scale", type=float, default=0.1)

    def add_fit_arguments(p, with_components_default=None):
        p.add_argument("--amplitude", required=True, help="CSV of registered functions")
        p.add_argument("--warpings", required=True, help="CSV of warping functions")
        p.add_argument("--transform", default="clr", choices=sorted(TRANSFORMS))
        weight = p.add_mutually_exclusive_group()
        weight.add_argument("--phase-weight", type=float, default=None)
        weight.add_argument("--optimize-weight", action="store_true")
        p.add_argument("--components", type=int, default=with_components_default)
        p.add_argument("--variance-threshold", type=float, default=0.95)
        p.add_argument("--tail-fraction", type=float, default=0.05)
        p.add_argument("--meta", default=None, help="CSV of per-sample metadata passed through")
        p.add_argument("--output-dir", required=True)

    fit = sub.add_parser("fit-joint", help="fit the joint model; write summary and scores")
    add_fit_arguments(fit)

    rep = sub.add_parser("report", help="fit and export summary, scores, and component tables")
    add_fit_arguments(rep)

    rec = sub.add_parser("reconstruct", help="fit and export truncated reconstructions")
    add_fit_arguments(rec)

    tra = sub.add_parser("transform", help="transform warping functions to function space")
    tra.add_argument("--warpings", required=True)
    tra.add_argument("--transform", default="clr", choices=sorted(TRANSFORMS))
    tra.add_argument("--tail-fraction", type=float, default=0.05)
    tra.add_argument("--output", required=True)

    return parser


def _fit_model(args) -> tuple:
    grid_w, W, _ = wio.read_function_table(args.amplitude)
    grid_g, G, _ = wio.read_function_table(args.warpings, warpings=True)
    grid_w.require_same(grid_g)
    if W.shape != G.shape:
        raise ValueError(
            f"amplitude table has {W.shape[0]} functions but warping table has {G.shape[0]}"
        )
    model = JointAmplitudePhasePCA(
        method=args.transform,
        phase_weight=1.0 if args.phase_weight is None else args.phase_weight,
        optimize_weight=args.optimize_weight,
        n_components=args.components,
        variance_threshold=args.variance_threshold,
        tail_fraction=args.tail_fraction,
    )
    model.fit(W, G, grid_w)
    meta = wio.read_metadata_table(args.meta) if args.meta else None
    return model, meta


def _cmd_gen_toy(args) -> None:
    data = make_toy_joint(
        args.samples,
        args.grid_size,
        shape=args.shape,
        rate=args.rate,
        amplitude_scale=args.amplitude_scale,
        seed=args.seed,
    )
    os.makedirs(args.output_dir, exist_ok=True)
    wio.write_function_table(
        os.path.join(args.output_dir, "amplitude.csv"), data.grid, data.W, prefix="w"
    )
    wio.write_function_table(
        os.path.join(args.output_dir, "warpings.csv"), data.grid, data.G, prefix="gamma"
    )
    wio.write_function_table(
        os.path.join(args.output_dir, "observed.csv"), data.grid, data.X, prefix="x"
    )
    print(f"wrote {args.samples}-sample dataset to {args.output_dir}")


def _cmd_transform(args) -> None:
    grid, G, names = wio.read_function_table(args.warpings, warpings=True)
    transformer = WarpingTransformer(
        method=args.transform, tail_fraction=args.tail_fraction
    ).fit(G, grid)
    V = transformer.transform(G)
    wio.write_function_table(args.output, transformer.image_grid_, V, names=names)
    print(f"wrote transformed functions to {args.output}")


def _cmd_fit_joint(args, *, components_table: bool = False) -> None:
    model, meta = _fit_model(args)
    os.makedirs(args.output_dir, exist_ok=True)
    wio.write_model_summary(os.path.join(args.output_dir, "summary.txt"), model)
    wio.write_scores_table(
        os.path.join(args.output_dir, "scores.csv"),
        model.scores_,
        model.n_components_,
        meta=meta,
    )
    if components_table:
        for m in range(model.n_components_):
            wio.write_component_table(
                os.path.join(args.output_dir, f"component_{m + 1}.csv"), model, m
            )
    print(
        f"fitted {args.transform} model: {model.n_components_} components, "
        f"phase weight {model.phase_weight_:.6g}; artifacts in {args.output_dir}"
    )


def _cmd_reconstruct(args) -> None:
    model, _ = _fit_model(args)
    os.makedirs(args.output_dir, exist_ok=True)
    W_hat, G_hat, X_hat = model.reconstruct()
    grid = model.grid_
    out = args.output_dir
    wio.write_function_table(os.path.join(out, "reconstructed_amplitude.csv"), grid, W_hat, prefix="w")
    wio.write_function_table(os.path.join(out, "reconstructed_warpings.csv"), grid, G_hat, prefix="gamma")
    wio.write_function_table(os.path.join(out, "reconstructed_observed.csv"), grid, X_hat, prefix="x")
    err = float(np.mean(np.sum((model.X_ - X_hat) ** 2 * grid.weights, axis=1)))
    print(
        f"reconstructed {W_hat.shape[0]} curves with {model.n_components_} components; "
        f"mean squared error {err:.6g}; artifacts in {out}"
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen-toy":
            _cmd_gen_toy(args)
        elif args.command == "transform":
            _cmd_transform(args)
        elif args.command == "fit-joint":
            _cmd_fit_joint(args)
        elif args.command == "report":
            _cmd_fit_joint(args, components_table=True)
        elif args.command == "reconstruct":
            _cmd_reconstruct(args)
    except ValueError as exc:
        print(f"warpfpca: validation error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"warpfpca: numerical error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"warpfpca: i/o error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
