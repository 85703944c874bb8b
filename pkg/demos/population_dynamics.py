"""Relative population <m>(t) for a Gaussian initial state, with and without an omega shift."""

import numpy as np

from bec2model.dynamics import InitialState, relative_population, relative_population_corrected
from bec2model.model import ModelParams

params = ModelParams(50, 1.0, 0.0, -1.9, 1.0)
state = InitialState.gaussian(50, 0.0, 3.0)
t = np.linspace(0.0, 20.0, 2001)

base = relative_population(state, params, t)
print(f"unperturbed: time average {base.time_average():8.3f}, max |<m>| {np.abs(base.values).max():7.2f}")
for delta in (1 / 200, 1 / 20):
    s = relative_population_corrected(state, params, "omega", delta, t)
    flag = "  <- leaves [-N, N], first order has broken down" if s.breakdown else ""
    print(f"delta={delta:<6.3g} time average {s.time_average():8.3f}, max |<m>| {np.abs(s.values).max():7.2f}{flag}")
