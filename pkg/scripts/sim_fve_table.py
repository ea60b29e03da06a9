"""Mean geodesic FVE of RFPCA and the L2 baseline over Monte Carlo replicates.

    python3 scripts/sim_fve_table.py --manifold sphere:2 --n 100 --reps 20
    python3 scripts/sim_fve_table.py --manifold so3 --n 50 100 --reps 20 --no-l2

Each replicate draws a fresh dataset from the simulation design (seed = replicate
index) and fits both methods with K_max components.
"""

import argparse
import time

import numpy as np

from rfpca.baseline import fit_l2_fpca, geodesic_fve_l2
from rfpca.fpca import fit_rfpca
from rfpca.manifold import ManifoldSpec
from rfpca.simulate import SimConfig, gen_samples, true_fve


def replicate(spec, n, seed, k_max, with_l2):
    data = gen_samples(SimConfig(manifold=spec, n=n, seed=seed))
    model = fit_rfpca(spec, data.samples, k_max)
    l2 = np.full(k_max, np.nan)
    if with_l2:
        base = fit_l2_fpca(data.samples, k_max)
        l2 = [geodesic_fve_l2(spec, data.samples, base, k, mean_curve=model.mean_curve)[2]
              for k in range(1, k_max + 1)]
    return model.fve, np.asarray(l2)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--manifold", type=ManifoldSpec.parse, default=ManifoldSpec.sphere(2))
    parser.add_argument("--n", type=int, nargs="+", default=[50, 100])
    parser.add_argument("--reps", type=int, default=20)
    parser.add_argument("--kmax", type=int, default=4)
    parser.add_argument("--no-l2", action="store_true", help="skip the L2 baseline")
    args = parser.parse_args()

    truth = 100 * true_fve(SimConfig(manifold=args.manifold))[: args.kmax]
    print(f"manifold {args.manifold}; tangent-space truth " + " ".join(f"{v:.1f}" for v in truth))
    print("n\tmethod\t" + "\t".join(f"K={k}" for k in range(1, args.kmax + 1)) + "\tseconds")
    for n in args.n:
        start = time.perf_counter()
        results = [replicate(args.manifold, n, seed, args.kmax, not args.no_l2) for seed in range(args.reps)]
        elapsed = time.perf_counter() - start
        for label, idx in (("RFPCA", 0), ("L2", 1)):
            if label == "L2" and args.no_l2:
                continue
            mean = 100 * np.mean([r[idx] for r in results], axis=0)
            print(f"{n}\t{label}\t" + "\t".join(f"{v:.1f}" for v in mean) + f"\t{elapsed:.1f}")


if __name__ == "__main__":
    main()
