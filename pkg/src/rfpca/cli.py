"""Command-line interface.

    rfpca simulate --manifold sphere:2 --n 100 --m 20 --seed 1 --out sim.csv
    rfpca fit --manifold sphere:2 --input sim.csv --kmax 6 --out model.json
    rfpca fve --model model.json --input sim.csv --baseline l2
    rfpca reconstruct --model model.json --K 3 --out recon.csv
    rfpca compositional --counts counts.csv --bandwidth 5 --grid 30 --out sphere.csv

Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O error.
Errors are reported as one line on stderr: ``error kind=<Class> message=<text>``.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from rfpca import io
from rfpca import manifold as mf
from rfpca.baseline import CHARTS, fit_l2_fpca, geodesic_fve_l2
from rfpca.compositional import counts_to_sphere, orthant_violations, sphere_to_composition
from rfpca.data import TrajectorySample, uniform_grid
from rfpca.errors import NumericalError, ValidationError
from rfpca.fpca import (
    compute_fve,
    fit_rfpca,
    mode_of_variation,
    select_num_components,
    truncate_representation,
)
from rfpca.frechet import FrechetConfig
from rfpca.simulate import SimConfig, draw_scores, gen_samples, true_fve

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


def _manifold(text):
    try:
        return mf.ManifoldSpec.parse(text)
    except ValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _truth_path(out):
    out = Path(out)
    return out.with_name(out.stem + ".truth.json")


def cmd_simulate(args):
    config = SimConfig(manifold=args.manifold, n=args.n, m=args.m, seed=args.seed)
    scores = None
    if args.rank is not None:
        scores = draw_scores(config)
        scores[:, args.rank:] = 0.0
    data = gen_samples(config, scores)
    io.write_trajectories_csv(args.out, data.samples)
    truth = {
        "manifold": str(config.manifold),
        "seed": config.seed,
        "score_variances": config.score_variances,
        "true_fve": true_fve(config) if args.rank is None else None,
        "subject_ids": [s.subject_id for s in data.samples],
        "scores": data.scores,
    }
    Path(args.truth or _truth_path(args.out)).write_text(io.dumps(truth))
    return EXIT_OK


def _fve_table(model):
    lines = ["K\tFVE"]
    lines += [f"{k}\t{io.fmt(f)}" for k, f in enumerate(model.fve, start=1)]
    return "\n".join(lines)


def cmd_fit(args):
    samples = io.ingest_trajectories_csv(args.input, args.manifold)
    config = FrechetConfig(max_iterations=args.max_iter, gradient_tolerance=args.tol)
    model = fit_rfpca(args.manifold, samples, args.kmax, config)
    if args.compositional:
        model = replace(model, compositional=True)
    io.save_model(args.out, model)
    print(_fve_table(model))
    print(f"K_selected\t{select_num_components(model, args.gamma)}\tgamma={args.gamma}")
    return EXIT_OK


def _write_curves(path, model, curves, ids):
    samples = [TrajectorySample(i, model.grid, c) for i, c in zip(ids, curves)]
    io.write_trajectories_csv(path, samples)
    if getattr(model, "compositional", False):
        flags = [orthant_violations(s.points) for s in samples]
        comps = [sphere_to_composition(s, allow_outside=True) for s in samples]
        io.write_compositions_csv(Path(path).with_suffix(".composition.csv"), comps, flags)


def cmd_reconstruct(args):
    model = io.load_model(args.model)
    if not hasattr(model, "spec"):
        raise ValidationError("reconstruct needs an RFPCA model")
    if args.mode is not None:
        curves = [mode_of_variation(model, args.mode, c) for c in (-args.multiplier, args.multiplier)]
        ids = [f"mode{args.mode}_minus", f"mode{args.mode}_plus"]
        _write_curves(args.out, model, curves, ids)
        return EXIT_OK
    if args.K is None:
        raise ValidationError("reconstruct needs --K or --mode")
    _, recon = truncate_representation(model, model.scores, args.K)
    _write_curves(args.out, model, recon, model.subject_ids)
    return EXIT_OK


def cmd_fve(args):
    model = io.load_model(args.model)
    if not hasattr(model, "spec"):
        raise ValidationError("fve needs an RFPCA model")
    spec = model.spec
    samples = io.ingest_trajectories_csv(args.input, spec)
    header = ["K", "U_K", "FVE"]
    l2 = None
    if args.baseline == "l2":
        l2 = fit_l2_fpca(samples, min(model.k_max, len(samples)), chart=args.l2_chart)
        header += ["U_K_L2", "FVE_L2"]
    print("\t".join(header))
    u0 = None
    for k in range(0, model.k_max + 1):
        u0, uk, fve = compute_fve(spec, samples, model, k)
        row = [str(k), io.fmt(uk), io.fmt(fve)]
        if l2 is not None:
            if k <= l2.k_max:
                _, uk2, fve2 = geodesic_fve_l2(spec, samples, l2, k, mean_curve=model.mean_curve)
                row += [io.fmt(uk2), io.fmt(fve2)]
            else:
                row += ["nan", "nan"]
        print("\t".join(row))
    print(f"U_0\t{io.fmt(u0)}")
    return EXIT_OK


def cmd_compositional(args):
    panels = io.read_counts_csv(args.counts)
    out = []
    for panel in panels:
        start, stop = panel.times[0], panel.times[-1]
        eval_grid = start + (stop - start) * uniform_grid(args.grid)
        out.append(counts_to_sphere(panel, args.bandwidth, eval_grid))
    io.write_trajectories_csv(args.out, out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="rfpca", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate simulated trajectories")
    p.add_argument("--manifold", type=_manifold, default=mf.ManifoldSpec.sphere(2))
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--m", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rank", type=int, default=None, help="keep only the first RANK scores")
    p.add_argument("--out", required=True)
    p.add_argument("--truth", default=None, help="ground-truth JSON (default: <out>.truth.json)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit RFPCA and write a model JSON")
    p.add_argument("--manifold", type=_manifold, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--gamma", type=float, default=0.95)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--compositional", action="store_true", help="tag the model as compositional")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("reconstruct", help="truncated reconstructions or modes of variation")
    p.add_argument("--model", required=True)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--mode", type=int, default=None, help="emit exp(mu +/- c sqrt(lambda_k) phi_k)")
    p.add_argument("--multiplier", type=float, default=3.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("fve", help="per-K residual variance and FVE table")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--baseline", choices=["none", "l2"], default="none")
    p.add_argument("--l2-chart", choices=CHARTS, default="ambient")
    p.set_defaults(func=cmd_fve)

    p = sub.add_parser("compositional", help="counts CSV to sphere trajectories")
    p.add_argument("--counts", required=True)
    p.add_argument("--bandwidth", type=float, required=True)
    p.add_argument("--grid", type=int, required=True, help="number of evaluation times")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compositional)
    return parser


def _fail(exc, code):
    message = " ".join(str(exc).split())
    print(f"error kind={type(exc).__name__} message={message}", file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        return _fail(exc, EXIT_VALIDATION)
    except NumericalError as exc:
        return _fail(exc, EXIT_NUMERICAL)
    except OSError as exc:
        return _fail(exc, EXIT_IO)


if __name__ == "__main__":
    sys.exit(main())
