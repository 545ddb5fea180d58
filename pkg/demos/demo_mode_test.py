"""Bootstrap significance test for candidate modes.

The sample is split in half: the first half proposes candidate modes via
mean-shift, the second half tests each candidate by bootstrapping the
largest eigenvalue of the Hessian quadratic form at the candidate. A mode is
declared significant when the bootstrap confidence interval stays entirely
negative (the surrogate density is locally concave there).

On a three-group sample — two tight signal groups around distinct mean
levels plus diffuse clutter — the two signal modes come out significant
while the clutter mode does not.
"""

import numpy as np

from fmshift import (
    DensityModel,
    GeneratorSpec,
    Grid,
    TestConfig,
    builtin_pair,
    generate,
    test_modes,
)

GRID = Grid(np.linspace(0.0, 1.0, 50))
PAIR = builtin_pair("gaussian_gaussian")


def percentile_bandwidth(sub1):
    """41st percentile of the pairwise distances within the proposal half."""
    model = DensityModel(sub1, PAIR, bandwidth=1.0, normalized=False)
    off = ~np.eye(len(sub1), dtype=bool)
    return float(np.percentile(model.pairwise_distances[off], 41))


def main():
    seed = 4
    sample = generate(GeneratorSpec("signal_clutter", n=150, seed=seed), GRID)
    rep = test_modes(sample, PAIR, bandwidth=percentile_bandwidth,
                     t_cfg=TestConfig(alpha=0.05, n_boot=1000), seed=seed)

    print(f"bandwidth (41st percentile rule): {rep.bandwidth:.3f}")
    print(f"candidate modes: {len(rep.candidates.modes)}")
    print()
    for j, rec in zip(rep.tested_mode_indices, rep.records):
        level = float(rep.candidates.modes[j].values.mean())
        mark = "significant" if rec.significant else "not significant"
        print(f"  mode {j}: mean level {level:+.2f}  "
              f"lambda = {rec.observed[rep.statistic]:+.3f}  "
              f"CI = ({rec.ci[0]:+.3f}, {rec.ci[1]:+.3f})  -> {mark}")


if __name__ == "__main__":
    main()
