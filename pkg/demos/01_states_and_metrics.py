"""States and the distance that drives every robustness verdict.

A noisy preparation of a quantum state is "close" to the ideal one when
the fidelity F is near 1; the verifier measures closeness as
D = 1 - F.  This demo builds a few states, compares F with the trace
distance T, and shows the metric inequalities that sandwich one by the
other.
"""

import numpy as np

from qrv import (
    DensityMatrix,
    PureState,
    fidelity,
    pure_to_density,
    random_density_matrix,
    trace_distance,
)

zero = pure_to_density(PureState([1, 0]))
one = pure_to_density(PureState([0, 1]))
plus = pure_to_density(PureState([1, 1] / np.sqrt(2)))
mixed = DensityMatrix(np.eye(2) / 2)

print("pairwise distances (D = 1 - F on the left, trace distance on the right)")
for name, state in [("|1><1|", one), ("|+><+|", plus), ("I/2", mixed)]:
    d = 1 - fidelity(zero, state)
    t = trace_distance(zero, state)
    print(f"  |0><0|  vs {name:8s}  D = {d:.4f}   T = {t:.4f}")

print()
print("Fuchs-van de Graaf: 1 - sqrt(F) <= T <= sqrt(1 - F)")
rng = np.random.default_rng(1)
for trial in range(4):
    rho = random_density_matrix(4, rng)
    sigma = random_density_matrix(4, rng)
    f, t = fidelity(rho, sigma), trace_distance(rho, sigma)
    print(
        f"  random dim-4 pair {trial}:  "
        f"{1 - np.sqrt(f):.4f}  <=  {t:.4f}  <=  {np.sqrt(1 - f):.4f}"
    )

print()
print("For pure states the fidelity is just the squared overlap:")
psi = PureState([np.cos(0.4), np.sin(0.4)])
phi = PureState([np.cos(0.9), np.sin(0.9)])
print(f"  F = {fidelity(pure_to_density(psi), pure_to_density(phi)):.6f}")
print(f"  |<psi|phi>|^2 = {abs(psi.overlap(phi))**2:.6f}")
