"""
One study type, graded by p-value
=================================

Every study is a one-sided z test.  Successes report p <= 0.05, and we learn
that none of them reached p < 0.025.
"""

import numpy as np

from evidence_paradox import (
    GammaPrior,
    HomogeneousParams,
    NormalShiftCurve,
    homogeneous_paradox_threshold,
    homogeneous_posterior,
    normal_shift_power,
    ratio_monotonicity_check,
    shift_from_design,
)

alpha, floor = 0.05, 0.025
shift = shift_from_design(effect=0.25, sd=1.0, n=16)
print(f"shift from effect 0.25, sd 1, n 16: {shift}")
print(f"power at alpha: {normal_shift_power(alpha, shift):.4f}")

bound = homogeneous_paradox_threshold(alpha, floor, NormalShiftCurve(shift))
print(f"paradox iff beta < {bound.threshold:.6f}")

for beta in (0.5 * bound.threshold, 2 * bound.threshold):
    params = HomogeneousParams(alpha, NormalShiftCurve(shift), interest=GammaPrior(1.0, beta))
    column = "  ".join(f"{homogeneous_posterior(params, j, floor):.4f}" for j in range(6))
    print(f"beta={beta:.5f}: {column}")

# gamma(p)/p exceeds gamma(alpha)/alpha below alpha for every positive shift
grid = np.geomspace(1e-6, 0.0499, 50)
print("ratio check:", all(ratio_monotonicity_check(s, alpha, grid) for s in (0.25, 1, 2, 4)))
