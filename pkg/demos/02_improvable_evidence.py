"""
Weak successes that lower the posterior
=======================================

Weak studies (size 0.05, power 0.2) and strong ones (size 0.01, power 0.9)
are attempted at Poisson rates driven by a gamma-distributed interest level.
Observers see successes only.
"""

import numpy as np

from evidence_paradox import (
    ErrorRates,
    FrameworkParams,
    GammaPrior,
    general_paradox_check,
    is_paradoxical,
    likelihood_ratio,
    paradox_rate_threshold,
    posterior,
    weak_only_likelihood_ratio,
)

weak = ErrorRates(0.05, 0.2)
strong = ErrorRates(0.01, 0.9)
beta_star = paradox_rate_threshold(weak, strong)
print(f"rate threshold beta* = {beta_star:.5f}  (1/beta* = {1 / beta_star:.4f})")


def params(beta, kappa=1.0, prior=0.5):
    return FrameworkParams(weak, strong, 1.0, prior, GammaPrior(kappa, beta))


# %%
# Posterior after j weak successes and no strong one, on both sides of beta*.
print("\n j   beta=0.05   beta=10")
for j in range(6):
    print(f"{j:2d}   {posterior(params(0.05), j, 0):.5f}     {posterior(params(10.0), j, 0):.5f}")

# %%
# The flag flips once along a rate grid, and the flip does not depend on kappa.
betas = np.linspace(0.1, 0.5, 9)
for kappa in (0.5, 1.0, 3.0):
    flags = "".join("P" if is_paradoxical(params(b, kappa)) else "." for b in betas)
    print(f"kappa={kappa:3.1f}  {flags}   (P = paradox, beta from 0.10 to 0.50)")

# %%
# Seeing some weak successes but no strong one, compared with seeing nothing.
for beta in (10, 1, 0.1, 0.01):
    p = params(beta)
    print(f"beta={beta:5}: LR(weak only) = {weak_only_likelihood_ratio(p):.5f}, "
          f"worse than silence: {general_paradox_check(p)}")

# %%
# Exploration: is the posterior increasing in the number of strong successes?
# The step ratio in k is (gamma_S/alpha_S)(beta+alpha_S+c_w alpha_w)/(beta+gamma_S+c_w gamma_w),
# which stays above 1 whenever strong studies beat weak ones.  Scan it anyway.
# Posteriors saturate near 1, so compare likelihood ratios.
worst = min(
    likelihood_ratio(params(b, kappa), j, k + 1) / likelihood_ratio(params(b, kappa), j, k)
    for b in np.geomspace(1e-6, 100, 30)
    for kappa in (0.3, 1.0, 3.0)
    for j in range(4)
    for k in range(4)
)
print(f"\nsmallest LR(j, k+1) / LR(j, k) over the scan: {worst:.4f}")
