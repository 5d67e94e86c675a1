"""Brute force as ground truth for the semidefinite machinery.

For a single qubit every mixed state is a point of the unit Bloch ball,
so the exact bound can be checked against plain enumeration: grid the
ball, keep the points the classifier sends to a different class, and
take the minimum distance.  The grid minimum can never undershoot the
certified bound, and it converges from above as the grid refines.
"""

import numpy as np

from qrv import (
    SearchGrid,
    bloch_grid_min_distance,
    classify,
    compute_optimal_bound,
    fidelity,
    random_classifier,
    random_density_matrix,
    random_neighborhood_probe,
)

rng = np.random.default_rng(5)
classifier = random_classifier(2, rng)
state = random_density_matrix(2, rng)
label = classify(classifier, state).label_index

bound = compute_optimal_bound(classifier, state, label)
print(f"certified optimal bound: delta = {bound.delta:.6f}")

print("\ngrid minimum converges from above:")
for resolution in (21, 51, 101, 201):
    delta_hat, _ = bloch_grid_min_distance(
        classifier, state, label, SearchGrid(resolution=resolution)
    )
    print(f"  resolution {resolution:>3}^3: grid minimum {delta_hat:.6f} "
          f"(gap {delta_hat - bound.delta:+.2e})")

eps = min(bound.delta + 0.05, 0.9)
sigma = random_neighborhood_probe(classifier, state, label, eps,
                                  samples=50_000, seed=11)
if sigma is not None:
    print(f"\nrandom probe inside eps = {eps:.4f}: found a class-changing "
          f"state at distance {1 - fidelity(state, sigma):.6f}")
else:
    print(f"\nrandom probe inside eps = {eps:.4f}: found nothing "
          "(which proves nothing)")
