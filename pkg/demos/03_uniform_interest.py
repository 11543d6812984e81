"""
Uniform interest prior
======================

With interest uniform on (0, C) the ordering between cells depends on the
total count j + k.  Large enough C gives the paradox for all j + k <= K.
"""

from evidence_paradox import (
    ErrorRates,
    FrameworkParams,
    UniformPrior,
    is_paradoxical_uniform_up_to,
    min_uniform_upper_for,
    posterior,
)

weak = ErrorRates(0.05, 0.2)
strong = ErrorRates(0.01, 0.9)

for K in range(6):
    c = min_uniform_upper_for(weak, strong, K)
    print(f"K={K}: smallest C = {c:8.4f}")

params = FrameworkParams(weak, strong, 1.0, 0.5, UniformPrior(30.0))
print("\nC = 30, posterior after j weak successes:")
print("  ".join(f"{posterior(params, j, 0):.4f}" for j in range(8)))
print("paradox up to K=3:", is_paradoxical_uniform_up_to(params, 3))
print("paradox up to K=7:", is_paradoxical_uniform_up_to(params, 7))
