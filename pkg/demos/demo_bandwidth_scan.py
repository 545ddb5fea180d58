"""Bandwidth stability scan: sweep the bandwidth and look for plateaus.

The number of non-atomic clusters is computed on a sweep of 100 bandwidths
between 5% and 50% of the maximum pairwise distance. Stretches where the
count is constant ("plateaus") indicate structure that is stable under the
smoothing scale; the midpoint of each plateau is reported as a candidate
bandwidth. On a mixture of two signal groups plus diffuse clutter the scan
exhibits a long plateau at three clusters.
"""

import numpy as np

from fmshift import (
    DensityModel,
    GeneratorSpec,
    Grid,
    builtin_pair,
    cluster,
    generate,
    scan,
)

GRID = Grid(np.linspace(0.0, 1.0, 50))
PAIR = builtin_pair("gaussian_gaussian")


def main():
    sample = generate(GeneratorSpec("signal_clutter", n=150, seed=0), GRID)
    res = scan(sample, PAIR)

    print(f"swept {res.bandwidths.size} bandwidths in "
          f"[{res.bandwidths[0]:.3f}, {res.bandwidths[-1]:.3f}] "
          f"(max pairwise distance {res.max_distance:.3f})")
    print()
    print("plateaus (start, end, non-atomic count, candidate bandwidth):")
    for (a, b), cand in zip(res.plateaus, res.candidates):
        print(f"  h in [{res.bandwidths[a]:.3f}, {res.bandwidths[b]:.3f}]  "
              f"count = {res.nonatomic_counts[a]}  candidate = {cand:.3f}")
    print()

    # recluster at the candidate from the three-cluster plateau
    for (a, b), cand in zip(res.plateaus, res.candidates):
        if res.nonatomic_counts[a] == 3:
            model = DensityModel(sample, PAIR, bandwidth=cand,
                                 normalized=False)
            ms = cluster(model)
            print(f"reclustering at h = {cand:.3f}: "
                  f"cluster sizes {ms.cluster_sizes()}")
            break


if __name__ == "__main__":
    main()
