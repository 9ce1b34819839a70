"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--rounds 100000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from reppricing import kernels
from reppricing.closed_form import equilibrium_distributions
from reppricing.market_model import Model, figure_params
from reppricing.market_sim import uninformed_count
from reppricing.oracle import TIE_TOL


def workloads(rounds: int):
    model, p = figure_params("fig1a")
    rng = np.random.default_rng(0)
    dists = equilibrium_distributions(p, model)
    prices = np.column_stack([d.ppf(rng.random(rounds)) for d in dists.values()])
    draws = rng.random((rounds, p.n))
    reps = np.array([p.r_L, p.r_H])
    alloc = (prices, reps, p.u, uninformed_count(p), draws, TIE_TOL * p.u)
    grid_l = np.linspace(p.c, p.r_L * p.u, 801)
    grid_h = np.linspace(p.c, p.r_H * p.u, 801)
    payoff = (grid_l, grid_h, p.r_L, p.r_H, p.u, p.c, p.k, float(p.n), TIE_TOL * p.u)
    return {"allocate_sales": alloc, "pure_payoffs": payoff}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rounds", type=int, default=100_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = {"python": kernels.python_backend}
    if kernels.compiled_backend is not None:
        backends["cython"] = kernels.compiled_backend
    else:
        print("compiled extension not built; timing the fallback only")

    print(f"{'kernel':<16}{'backend':<10}{'best [ms]':>12}{'speedup':>10}")
    for name, call_args in workloads(args.rounds).items():
        times = {}
        for label, module in backends.items():
            fn = getattr(module, name)
            times[label] = min(timeit.repeat(lambda: fn(*call_args), number=1, repeat=args.repeat))
        results = [getattr(m, name)(*call_args) for m in backends.values()]
        same = all(np.array_equal(np.asarray(a), np.asarray(b)) for a, b in zip(results[0], results[-1]))
        for label, seconds in times.items():
            speedup = times["python"] / seconds
            print(f"{name:<16}{label:<10}{1e3 * seconds:>12.2f}{speedup:>9.1f}x")
        print(f"{'':<16}outputs identical: {same}")


if __name__ == "__main__":
    main()
