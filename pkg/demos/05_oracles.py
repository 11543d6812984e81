"""
Checking the closed forms
=========================

Quadrature of the mixture integrals and a seeded Monte Carlo run, both
against the closed-form posteriors.
"""

from evidence_paradox import ErrorRates, FrameworkParams, GammaPrior, observation_probability
from evidence_paradox.simulator import (
    SimulationConfig,
    compare_framework_posteriors,
    poisson_thinning_check,
    quadrature_observation_probability,
    simulate_framework,
)

params = FrameworkParams(ErrorRates(0.05, 0.2), ErrorRates(0.01, 0.9), 1.0, 0.5, GammaPrior(1.0, 0.1))

worst = max(
    abs(quadrature_observation_probability(params, t, j, k) / observation_probability(params, t, j, k) - 1)
    for t in (True, False)
    for j in range(6)
    for k in range(6)
)
print(f"quadrature vs closed form, worst relative error: {worst:.2e}")

table = simulate_framework(params, SimulationConfig(2_000_000, seed=1, workers=4))
print("\n j  k  occupants  empirical  closed form     z")
for c in compare_framework_posteriors(params, table, min_occupants=1000):
    if c.estimate is not None and c.j + c.k <= 3:
        print(f"{c.j:2d} {c.k:2d} {c.occupants:10d}   {c.estimate:.5f}    {c.closed_form:.5f}   {c.z:5.2f}")

report = poisson_thinning_check(5.0, 0.3, SimulationConfig(1_000_000, seed=1))
print(f"\nthinned Poisson(5) by 0.3: largest deviation {report.worst_z:.2f} SE, passed={report.passed}")
