"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 10 30 50 100] [--repeat 200]
"""
import argparse
import timeit

import numpy as np

from egocircles import _pykernels, kernels
from egocircles.synth import PlantedEgoSpec, generate_ego
from egocircles.model import EgoModel, make_state


def case(n, seed=0):
    sizes = (n // 3, n // 3, n - 2 * (n // 3))
    ego, profiles, truth = generate_ego(PlantedEgoSpec(sizes=sizes, seed=seed))
    model = EgoModel(ego, profiles)
    circles = [{ego.index(a) for a in c} for c in truth.circles] + [{i} for i in range(0, n, 4)]
    state = make_state(model, circles)
    return model, state


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--sizes", type=int, nargs="+", default=[10, 30, 50, 100])
    p.add_argument("--repeat", type=int, default=200)
    args = p.parse_args(argv)
    if kernels.BACKEND != "cython":
        print("compiled kernels unavailable; only the numpy fallback will be timed")
    print(f"{'kernel':<18}{'alters':>7}{'circles':>8}{'compiled us':>13}{'numpy us':>11}{'speedup':>9}")
    for n in args.sizes:
        model, state = case(n)
        m, t = state.membership, state.taus
        jobs = {
            "log_likelihood": (lambda b: b.log_likelihood(model.sims, model.adj, m, t)),
            "circle_thresholds": (lambda b: b.circle_thresholds(model.dist, m)),
        }
        for name, fn in jobs.items():
            slow = min(timeit.repeat(lambda: fn(_pykernels), number=args.repeat, repeat=3)) / args.repeat
            fast = min(timeit.repeat(lambda: fn(kernels), number=args.repeat, repeat=3)) / args.repeat
            if name == "log_likelihood":
                assert np.isclose(fn(kernels), fn(_pykernels), rtol=1e-9)
            print(f"{name:<18}{n:>7}{len(t):>8}{fast * 1e6:>13.1f}{slow * 1e6:>11.1f}{slow / fast:>9.1f}x")


if __name__ == "__main__":
    main()
