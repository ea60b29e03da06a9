"""Sup-norm error of the sample Frechet mean curve as the sample size grows.

    python3 scripts/mean_convergence.py --manifold sphere:2 --n 100 400 1600 --reps 20

For root-n consistency the error should shrink by about half per fourfold increase of n.
"""

import argparse

import numpy as np

from rfpca.frechet import frechet_mean_curve
from rfpca.manifold import ManifoldSpec, geodesic_distance
from rfpca.simulate import SimConfig, gen_samples


def sup_error(spec, n, seed):
    data = gen_samples(SimConfig(manifold=spec, n=n, seed=seed))
    return np.max(geodesic_distance(spec, frechet_mean_curve(spec, data.curves), data.mean_curve))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--manifold", type=ManifoldSpec.parse, default=ManifoldSpec.sphere(2))
    parser.add_argument("--n", type=int, nargs="+", default=[100, 400])
    parser.add_argument("--reps", type=int, default=20)
    args = parser.parse_args()

    errors = np.array([[sup_error(args.manifold, n, seed) for seed in range(args.reps)] for n in args.n])
    print("n\tmedian_sup_error\tsqrt(n)*median")
    for n, row in zip(args.n, errors):
        print(f"{n}\t{np.median(row):.4g}\t{np.sqrt(n) * np.median(row):.4g}")
    for i in range(1, len(args.n)):
        ratio = errors[i] / errors[i - 1]
        print(f"n={args.n[i]} vs n={args.n[i - 1]}: median ratio {np.median(ratio):.3f}, "
              f"improved in {np.mean(ratio < 1):.0%} of seeds")


if __name__ == "__main__":
    main()
