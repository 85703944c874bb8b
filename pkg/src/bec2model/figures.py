"""Data recipes for the published figures (numbered 1 to 17).

Each recipe returns a :class:`FigureData`: named panels of equal-length
columns plus the parameters used.  Grid resolutions are arguments so tests
can run coarse versions of the same recipe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import InitialState, relative_population, relative_population_corrected
from .entangle import (degenerate_entropy_surface, entropy_surface, loss_entropy_surface)
from .loss import LossSpec, background_correction, tbr_correction
from .model import ModelParams, a1_for_m0
from .perturb import Kind, degenerate_distribution, degenerate_solve, perturbed_distribution
from .wigner import distribution

DIST_N = 1000
DIST_THETA = 1.0
DIST_M0S = (1000, 998, 996)
SURFACE_N = 100

# distribution figures: figure number -> [(kind, delta), ...]
DISTRIBUTION_SHIFTS = {
    2: [("omega", 15.0)],
    3: [("lambda", 15.0)],
    4: [("U", 2.0)],
    5: [("Lambda", 0.1), ("mu", 0.1)],
}

# evolution parameters: A1 is non-integer so no two levels are degenerate
DYNAMICS = {"N": 50, "theta": 1.0, "phi": 0.0, "A1": -1.9, "A2": 1.0, "centre": 0.0, "width": 3.0,
            "t_max": 20.0, "deltas": (1 / 200, 1 / 20)}

BACKGROUND_ALPHAS = [
    {2: -0.1, 4: -1e-3, 6: -5e-6},
    {2: -0.2, 4: -1e-3, 6: -5e-6},
    {2: -0.1, 4: -2e-3, 6: -5e-6},
    {2: -0.1, 4: -1e-3, 6: -1e-5},
]
TBR_SIGMAS = (-1e-3, 1e-3, 2e-3)


@dataclass
class Panel:
    columns: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)


@dataclass
class FigureData:
    number: int
    panels: dict[str, Panel]
    params: dict = field(default_factory=dict)


def _dist_panel(series) -> Panel:
    cols = {"m": series.m, "P0": series.p}
    if series.p1 is not None:
        cols["P01"] = series.total
    return Panel(cols, {"m0": series.m0, "theta": series.theta, **series.meta})


def distributions(number: int, N: int = DIST_N, theta: float = DIST_THETA, m0s=None, A2: float = 1.0) -> FigureData:
    """Figures 1 to 5: unperturbed and coupling-shifted distributions."""
    m0s = tuple(m0s) if m0s is not None else tuple(m - (DIST_N - N) for m in DIST_M0S)
    panels = {}
    shifts = DISTRIBUTION_SHIFTS.get(number, [])
    if number == 1:
        for m0 in m0s:
            panels[f"m0={m0}"] = _dist_panel(distribution(N, m0, theta))
    elif shifts:
        for kind, delta in shifts:
            for m0 in m0s:
                params = ModelParams(N, theta, 0.0, a1_for_m0(m0, A2), A2)
                series = perturbed_distribution(kind, params, m0, delta, warn=False)
                panels[f"{kind},m0={m0}"] = _dist_panel(series)
    else:
        raise ValueError(f"figure {number} is not a distribution figure")
    return FigureData(number, panels, {"N": N, "theta": theta, "m0s": list(m0s), "shifts": shifts, "A2": A2})


def _surface_panel(surf, which: str) -> Panel:
    th, m0 = np.meshgrid(surf.thetas, surf.m0s, indexing="ij")
    cols = {"theta": th.ravel(), "m0": m0.ravel().astype(float), "S0": surf.S0.ravel(), "dS": surf.dS.ravel()}
    if which == "S":
        cols["S"] = surf.S.ravel()
    return Panel(cols, dict(surf.meta))


def _thetas(n: int) -> np.ndarray:
    return np.linspace(0.0, math.pi, n)


def unperturbed_entropy(N: int = SURFACE_N, n_theta: int = 101) -> FigureData:
    """Figure 6."""
    s = entropy_surface(N, _thetas(n_theta))
    return FigureData(6, {"S0": _surface_panel(s, "S0")}, {"N": N})


def perturbed_entropy(N: int = SURFACE_N, n_theta: int = 101, small_N_omega: int = 50) -> FigureData:
    """Figure 7: ``S`` at ``delta = 0.01`` and ``dS`` at ``delta = 0.1`` for every coupling."""
    panels = {}
    for kind in Kind:
        n_a = small_N_omega if kind is Kind.OMEGA else N
        panels[f"{kind.value},S"] = _surface_panel(entropy_surface(n_a, _thetas(n_theta), kind=kind, delta=0.01), "S")
        panels[f"{kind.value},dS"] = _surface_panel(entropy_surface(N, _thetas(n_theta), kind=kind, delta=0.1), "dS")
    return FigureData(7, panels, {"N": N, "N_omega_surface": small_N_omega})


def entropy_cuts(N: int = SURFACE_N, theta: float = math.pi / 4, delta: float = 0.1) -> FigureData:
    """Figure 8: ``dS`` against ``m0`` at fixed ``theta``."""
    panels = {}
    for kind in Kind:
        s = entropy_surface(N, [theta], kind=kind, delta=delta)
        panels[kind.value] = Panel({"m0": s.m0s.astype(float), "dS": s.dS[0]}, dict(s.meta))
    return FigureData(8, panels, {"N": N, "theta": theta, "delta": delta})


def evolution(n_times: int = 2001) -> FigureData:
    """Figure 9: ``<m>(t)`` unperturbed and with two omega shifts."""
    p = DYNAMICS
    params = ModelParams(p["N"], p["theta"], p["phi"], p["A1"], p["A2"])
    state = InitialState.gaussian(p["N"], p["centre"], p["width"])
    t = np.linspace(0.0, p["t_max"], n_times)
    panels = {"unperturbed": Panel({"t": t, "m": relative_population(state, params, t).values})}
    for d in p["deltas"]:
        ts = relative_population_corrected(state, params, "omega", d, t)
        panels[f"delta={d:g}"] = Panel({"t": t, "m": ts.values}, {"breakdown": ts.breakdown, "delta": d})
    return FigureData(9, panels, dict(p))


def degenerate_levels(kind: str, N: int = DIST_N, n_theta: int = 501, theta: float = 1.0,
                      delta_levels: float = 1.0, delta_dist: float = 0.01) -> FigureData:
    """Figures 10 (omega) and 12 (lambda): ``eps_pm(theta)`` and the ``+-delta`` distributions."""
    number = {"omega": 10, "lambda": 12}[Kind.parse(kind).value]
    th = _thetas(n_theta)
    sols = [degenerate_solve(kind, t, N, delta_levels) for t in th]
    panels = {"levels": Panel({"theta": th, "eps_plus": np.array([s.eps_plus for s in sols]),
                               "eps_minus": np.array([s.eps_minus for s in sols])})}
    params = ModelParams(N, theta, 0.0, -(2 * N - 2), 1.0)
    for sign in (1, -1):
        series = degenerate_distribution(kind, params, (N - 2, N), sign * delta_dist)
        panels[f"delta={sign * delta_dist:g}"] = _dist_panel(series)
    return FigureData(number, panels, {"N": N, "theta": theta, "A1": -(2 * N - 2), "A2": 1.0})


def degenerate_entropy(kind: str, N: int = SURFACE_N, n_theta: int = 101, delta: float = 0.005) -> FigureData:
    """Figures 11 (omega) and 13 (lambda)."""
    number = {"omega": 11, "lambda": 13}[Kind.parse(kind).value]
    s = degenerate_entropy_surface(kind, N, _thetas(n_theta), delta=delta)
    return FigureData(number, {"S": _surface_panel(s, "S")}, {"N": N, "delta": delta})


def background_loss(N: int = DIST_N, theta: float = DIST_THETA, A2: float = 1.0) -> FigureData:
    """Figure 14: background collisions acting on ``|N, N>``."""
    panels = {}
    for i, alphas in enumerate(BACKGROUND_ALPHAS):
        series = background_correction(N, theta, alphas, a1_for_m0(N, A2), A2)
        panels["abcd"[i]] = _dist_panel(series)
    return FigureData(14, panels, {"N": N, "theta": theta, "A1": a1_for_m0(N, A2), "A2": A2})


def background_entropy(N: int = SURFACE_N, n_theta: int = 101) -> FigureData:
    """Figure 15."""
    s = loss_entropy_surface(LossSpec.background(BACKGROUND_ALPHAS[0]), N, _thetas(n_theta))
    return FigureData(15, {"S": _surface_panel(s, "S")}, {"N": N, "alphas": BACKGROUND_ALPHAS[0]})


def three_body_loss(N: int = DIST_N, theta: float = DIST_THETA, A2: float = 1.0) -> FigureData:
    """Figure 16: three-body recombination acting on ``|N, N>``."""
    panels = {}
    for sigma in TBR_SIGMAS:
        series = tbr_correction(N, theta, sigma, a1_for_m0(N, A2), A2)
        panels[f"sigma={sigma:g}"] = _dist_panel(series)
    return FigureData(16, panels, {"N": N, "theta": theta, "A1": a1_for_m0(N, A2), "A2": A2})


def three_body_entropy(N: int = SURFACE_N, n_theta: int = 101, sigma: float = 0.5) -> FigureData:
    """Figure 17."""
    s = loss_entropy_surface(LossSpec.tbr(sigma), N, _thetas(n_theta))
    return FigureData(17, {"S": _surface_panel(s, "S")}, {"N": N, "sigma": sigma})


def figure(number: int, **kw) -> FigureData:
    """Dispatch by figure number."""
    if 1 <= number <= 5:
        return distributions(number, **kw)
    table = {
        6: unperturbed_entropy,
        7: perturbed_entropy,
        8: entropy_cuts,
        9: evolution,
        10: lambda **k: degenerate_levels("omega", **k),
        11: lambda **k: degenerate_entropy("omega", **k),
        12: lambda **k: degenerate_levels("lambda", **k),
        13: lambda **k: degenerate_entropy("lambda", **k),
        14: background_loss,
        15: background_entropy,
        16: three_body_loss,
        17: three_body_entropy,
    }
    if number not in table:
        raise ValueError(f"no figure numbered {number}")
    return table[number](**kw)
