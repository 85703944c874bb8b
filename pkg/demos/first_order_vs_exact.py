"""Compare the first-order distribution with exact diagonalization as the shift grows."""

import numpy as np

from bec2model.model import ModelParams, a1_for_m0, build_h2, couplings_from_constraints
from bec2model.oracle import exact_unitary
from bec2model.perturb import PerturbationKind, perturbed_distribution

N, THETA, M0 = 20, 1.0, 10
params = ModelParams(N, THETA, 0.0, a1_for_m0(M0), 1.0)
U_dag = exact_unitary(THETA, 0.0, N).matrix.conj().T
column = (M0 + N) // 2

for kind in ("omega", "lambda", "U", "Lambda", "mu"):
    print(kind)
    for delta in (1e-1, 1e-2, 1e-3):
        H = build_h2(couplings_from_constraints(params) + PerturbationKind(kind, delta).couplings(), 0.0, N)
        w, V = np.linalg.eigh(H)
        # the perturbed eigenvector that grew out of U^dagger |N, m0>
        v = V[:, np.argmax(np.abs(V.conj().T @ U_dag[:, column]))]
        exact = np.abs(v) ** 2
        approx = perturbed_distribution(kind, params, M0, delta, warn=False).total
        print(f"  delta={delta:<6g} max|P01 - exact| = {np.abs(approx - exact).max():.2e}")
