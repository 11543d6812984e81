"""
Positive predictive value of a significant result
==================================================

A single study with size 0.05 and power 0.2 has likelihood ratio 4.
Combine that with a prior to get Pr(H | success).
"""

from evidence_paradox import ErrorRates, likelihood_ratio_at_least_one, likelihood_ratio_exactly_j, posterior_from_lr

rates = ErrorRates(alpha=0.05, power=0.2)

for prior in (0.2, 0.1):
    lr = rates.likelihood_ratio
    print(f"prior {prior:.2f}: one success, LR {lr:.3f}, posterior {posterior_from_lr(prior, lr):.4f}")

# Now suppose five groups tried and we only learn that at least one succeeded.
lr5 = likelihood_ratio_at_least_one(rates, 5)
for prior in (0.2, 0.1):
    print(f"prior {prior:.2f}: >=1 of 5, LR {lr5:.4f}, posterior {posterior_from_lr(prior, lr5):.4f}")

# The ratio for "at least one" keeps shrinking as the number of attempts grows,
# while seeing more of the successes pushes it the other way.
print("\n n   LR(>=1 of n)   LR(exactly 1 of n)")
for n in (1, 2, 5, 10, 20, 50):
    print(f"{n:3d}   {likelihood_ratio_at_least_one(rates, n):10.4f}   {likelihood_ratio_exactly_j(rates, n, 1):10.4f}")
