"""Acceptance criteria 1 to 9, each reported as one PASS/FAIL line.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from conftest import record
from bec2model import figures as F
from bec2model.cli import main as cli_main
from bec2model.dynamics import InitialState, relative_population_corrected
from bec2model.loss import LossSpec, background_correction, loss_distribution, tbr_correction
from bec2model.model import ModelParams, build_h0, build_h2, couplings_from_constraints
from bec2model.oracle import conjugate_numeric, exact_unitary
from bec2model.perturb import Kind, PerturbationKind, bare_perturbation, degenerate_solve, matrix_element, \
    perturbation_matrix
from bec2model.symbolic import count_general_terms, enumerate_general_families
from bec2model.verify import check_degenerate, check_dynamics
from bec2model.wigner import wigner_d, wigner_d_column, wigner_d_exact, wigner_d_matrix

TABLE_N_MODEL = [1, 3, 6, 13]
TABLE_GENERAL = [1, 4, 10, 20]
TABLE_MISSED = [0, 1, 4, 7]


def _report(number, passed, detail):
    record(number, passed, detail)
    print(f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'}  {detail}")
    assert passed, detail


# 1 -------------------------------------------------------------------------

def test_1_constrained_h2_equals_displaced_h0(rng):
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        th, ph = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
        A1, A2 = rng.uniform(-3, 3), rng.uniform(-2, 2)
        for N in (2, 6, 12, 20):
            p = ModelParams(N, th, ph, A1, A2)
            H2 = build_h2(couplings_from_constraints(p), ph, N)
            U = exact_unitary(th, ph, N).matrix
            H0 = build_h0(p)
            worst = max(worst, np.linalg.norm(H2 - U.conj().T @ H0 @ U) / np.linalg.norm(H0))
    elapsed = time.perf_counter() - start
    _report(1, worst < 1e-10 and elapsed < 10, f"max rel Frobenius error {worst:.2e} (< 1e-10), {elapsed:.2f}s (< 10s)")


# 2 -------------------------------------------------------------------------

def test_2_matrix_elements_and_selection_rules(rng):
    start = time.perf_counter()
    worst, band_ok = 0.0, True
    for _ in range(20):
        th, ph = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
        for N in (1, 2, 5, 8, 12):
            idx = np.arange(N + 1)
            dist = np.abs(idx[:, None] - idx[None, :])
            for kind in Kind:
                exact = conjugate_numeric(bare_perturbation(kind, 1.0, ph, N), th, ph).matrix
                closed = perturbation_matrix(kind, th, ph, N)
                worst = max(worst, float(np.abs(exact - closed).max()))
                # outside |dm| <= 2 band (in index units: band/2) the oracle vanishes
                outside = dist > kind.band // 2
                band_ok &= bool(np.all(np.abs(exact[outside]) < 1e-9))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-9 and band_ok and elapsed < 30
    _report(2, ok, f"max entry error {worst:.2e} (< 1e-9), selection rules {'hold' if band_ok else 'violated'}, "
                   f"{elapsed:.1f}s (< 30s)")


# 3 -------------------------------------------------------------------------

def _oracle_level(kind, p: ModelParams, m0: int, delta: float) -> float:
    c = couplings_from_constraints(p) + PerturbationKind(kind, delta).couplings()
    H = build_h2(c, p.phi, p.N)
    w, V = np.linalg.eigh(H)
    ref = exact_unitary(p.theta, p.phi, p.N).matrix.conj().T[:, (m0 + p.N) // 2]
    return float(w[int(np.argmax(np.abs(V.conj().T @ ref)))])


def test_3_first_order_energies_slope():
    N, m0 = 8, 2
    p = ModelParams(N, 0.9, 0.6, -2 * m0, 1.0)
    e0 = float(build_h0(p)[(m0 + N) // 2, (m0 + N) // 2])
    ratios = {}
    for kind in Kind:
        diag = matrix_element(kind, p.theta, p.phi, N, m0, m0).real
        disc = [abs((_oracle_level(kind, p, m0, d) - e0) / d - diag) for d in (1e-3, 1e-4)]
        ratios[kind.value] = disc[0] / disc[1]
    ok = all(7 <= r <= 13 for r in ratios.values())
    _report(3, ok, "discrepancy ratio 1e-3/1e-4: " + ", ".join(f"{k}={r:.2f}" for k, r in ratios.items())
            + " (10 +- 3)")


# 4 -------------------------------------------------------------------------

def test_4_wigner_layer():
    D = wigner_d_matrix(200, 1.234)
    unit = float(np.abs(D.T @ D - np.eye(201)).max())
    exact_err = 0.0
    for N in (1, 7, 20, 64):
        for m, m0 in [(N, N), (-N, N), (N % 2, N - 2 * (N // 3)), (N - 2, -N)]:
            for th in (0.4, 2.5):
                exact_err = max(exact_err, abs(wigner_d(N, m, m0, th) - float(wigner_d_exact(N, m, m0, th))))
    start = time.perf_counter()
    col = wigner_d_column(2000, 600, 1.1)
    elapsed = time.perf_counter() - start
    norm = abs(float(col @ col) - 1.0)
    ok = unit < 1e-10 and exact_err < 1e-12 and elapsed < 5 and norm < 1e-9
    _report(4, ok, f"unitarity {unit:.1e} (< 1e-10), exact {exact_err:.1e} (< 1e-12), "
                   f"N=2000 column {elapsed:.2f}s norm err {norm:.1e}")


# 5 -------------------------------------------------------------------------

def test_5_degenerate_closed_forms():
    chk = check_degenerate(ns=(10, 1000), n_theta=1000)
    collapse = True
    for N in (10, 1000):
        s = degenerate_solve("omega", 0.0, N, 1.0)
        collapse &= s.eps_plus == N and s.eps_minus == N - 2
    ok = chk.error <= 1e-12 and collapse
    _report(5, ok, f"max |eps - eigvalsh| {chk.error:.2e} (< 1e-12 abs), theta=0 collapse "
                   f"{'exact' if collapse else 'inexact'}")


# 6 -------------------------------------------------------------------------

def test_6_loss_formulas_and_parity_kill():
    worst, odd = 0.0, 0.0
    for N in (3, 4, 7, 12, 20):
        A1, A2 = -2.0 * N, 1.0
        for th in (0.4, 1.0, 2.3):
            bg = {k: (-1) ** k * 0.1 / k for k in range(2, min(N, 6) + 1, 2)}
            a = background_correction(N, th, bg, A1, A2)
            b = loss_distribution(LossSpec.background(bg), N, N, th, A1, A2, method="oracle")
            worst = max(worst, float(np.abs(a.p1 - b.p1).max()))
            a = tbr_correction(N, th, 0.2, A1, A2)
            b = loss_distribution(LossSpec.tbr(0.2), N, N, th, A1, A2, method="oracle")
            worst = max(worst, float(np.abs(a.p1 - b.p1).max()))
    for N in range(1, 21):
        for k in range(1, N + 1, 2):
            for th in (0.7, 1.9):
                s = loss_distribution(LossSpec.background({k: 0.3}), N, N, th, -2.0 * N, 1.0, method="oracle")
                odd = max(odd, float(np.abs(s.p1).max()))
    ok = worst < 1e-10 and odd < 1e-15
    _report(6, ok, f"closed vs enlarged oracle {worst:.1e} (< 1e-10), odd-k correction max {odd:.1e}")


# 7 -------------------------------------------------------------------------

def test_7_counting_table(capsys):
    code = cli_main(["count", "--format", "csv"])
    out = capsys.readouterr().out.strip().splitlines()
    rows = [list(map(int, r.split(","))) for r in out[1:]]
    n_model = [r[1] for r in rows]
    general = [r[2] for r in rows]
    missed = [r[3] for r in rows]
    chi_ok = all(count_general_terms(d) == len(enumerate_general_families(d)) for d in range(0, 21, 2))
    ok = code == 0 and n_model == TABLE_N_MODEL and general == TABLE_GENERAL and missed == TABLE_MISSED and chi_ok
    _report(7, ok, f"n-model {n_model} (want {TABLE_N_MODEL}), general {general} (want {TABLE_GENERAL}), "
                   f"missed {missed} (want {TABLE_MISSED}), chi vs enumeration {'ok' if chi_ok else 'mismatch'}")


# 8 -------------------------------------------------------------------------

def test_8_dynamics():
    chk = check_dynamics(N=8, t_max=20.0, n_t=401)
    p = F.DYNAMICS
    params = ModelParams(p["N"], p["theta"], p["phi"], p["A1"], p["A2"])
    state = InitialState.gaussian(p["N"], p["centre"], p["width"])
    t = np.linspace(0.0, p["t_max"], 2001)
    big = relative_population_corrected(state, params, "omega", 1 / 20, t)
    small = relative_population_corrected(state, params, "omega", 1 / 200, t)
    ok = chk.error < 1e-10 and big.breakdown and not small.breakdown
    _report(8, ok, f"oracle vs closed form {chk.error:.1e} (< 1e-10), breakdown at 1/20: {big.breakdown} "
                   f"(max {np.abs(big.values).max():.1f}), at 1/200: {small.breakdown}")


# 9 -------------------------------------------------------------------------

def _peaks(p, rel=1e-3):
    p = np.asarray(p)
    thr = rel * p.max()
    return int(np.sum((p[1:-1] > p[:-2]) & (p[1:-1] >= p[2:]) & (p[1:-1] > thr)))


def _shape_distributions():
    msgs, ok = [], True
    for n in range(1, 6):
        f = F.figure(n)
        kinds = sorted({k.split(",")[0] for k in f.panels}) if n > 1 else [None]
        for kind in kinds:
            labels = [k for k in f.panels if kind is None or k.startswith(kind + ",")]
            counts = [_peaks(f.panels[k].columns["P0"]) for k in labels]
            cols = f.panels[labels[0]].columns
            arg = cols["m"][np.argmax(cols["P0"])]
            good = counts == [1, 2, 3] and abs(arg - F.DIST_N * math.cos(F.DIST_THETA)) <= 4
            if n > 1:
                shifted = [f.panels[k].columns["m"][np.argmax(f.panels[k].columns["P01"])]
                           != f.panels[k].columns["m"][np.argmax(f.panels[k].columns["P0"])] for k in labels]
                good &= all(shifted)
            ok &= good
            if not good:
                msgs.append(f"fig {n} {kind}: peaks {counts}, argmax {arg}")
    return ok, msgs


def _shape_entropy_max():
    # m0 = 0 at theta = pi/2 has a parity dip (every other d vanishes), so the
    # maximum sits on the plateau beside it
    f = F.unperturbed_entropy(n_theta=61)
    c = f.panels["S0"].columns
    i = int(np.argmax(c["S0"]))
    good = abs(c["theta"][i] - math.pi / 2) < math.pi / 8 and c["m0"][i] == 0
    return good, [] if good else [f"fig 6 max at theta={c['theta'][i]:.2f} m0={c['m0'][i]:g}"]


def _shape_perturbed_ridges():
    msgs = []
    N = F.SURFACE_N
    thetas = np.linspace(0, math.pi, 41)
    peak = {}
    for kind in Kind:
        surf = F.entropy_surface(N, thetas, kind=kind, delta=0.1)
        a = np.abs(surf.dS)
        peak[kind.value] = a.max()
        if kind.value == "omega":
            inner = [i for i, t in enumerate(thetas) if 0.3 < t < math.pi - 0.3]
            on_ridge = np.mean([abs(abs(surf.m0s[np.argmax(a[i])]) - N * abs(math.cos(thetas[i]))) <= 0.1 * N
                                for i in inner])
    exchange = min(peak[k] for k in ("U", "Lambda", "mu"))
    single = max(peak[k] for k in ("omega", "lambda"))
    order_ok = exchange >= 10 * single
    ridge_ok = on_ridge >= 0.9
    if not order_ok:
        msgs.append(f"fig 7 exchange/single-particle peak ratio {exchange / single:.1f}")
    if not ridge_ok:
        msgs.append(f"fig 7 omega row maxima on |m0| = N|cos theta| in {on_ridge:.0%} of rows")
    return order_ok and ridge_ok, msgs


def _shape_degenerate_ridges():
    msgs, ok = [], True
    N = F.SURFACE_N
    for kind, number in (("omega", 11), ("lambda", 13)):
        f = F.degenerate_entropy(kind, n_theta=41)
        c = f.panels["S"].columns
        a = np.abs(c["dS"])
        i = int(np.argmax(a))
        th_i, m0_i = c["theta"][i], c["m0"][i]
        near_diag = min(abs(th_i - math.pi / 4), abs(th_i - 3 * math.pi / 4)) < 0.35
        low = a[c["m0"] < -N / 2].mean()
        high = a[c["m0"] > N / 2].mean()
        good = m0_i < -N / 2 and near_diag and high < 0.1 * low
        if kind == "lambda":
            good &= bool(np.all(c["dS"] >= -1e-12))
        ok &= good
        if not good:
            msgs.append(f"fig {number} max |dS| at theta={th_i:.2f} m0={m0_i:g}, mean |dS| m0<-N/2 {low:.2f} "
                        f"vs m0>N/2 {high:.2f}, min dS {c['dS'].min():.2f}")
    return ok, msgs


def _shape_background_ridge():
    N = F.SURFACE_N
    f = F.background_entropy(n_theta=41)
    c = f.panels["S"].columns
    i = int(np.argmax(np.abs(c["dS"])))
    good = bool(np.all(c["dS"] <= 1e-12)) and abs(c["theta"][i] - math.pi / 4) < 0.35 and c["m0"][i] < -N / 2
    return good, [] if good else [f"fig 15 max |dS| at theta={c['theta'][i]:.2f} m0={c['m0'][i]:g}, "
                                  f"max dS {c['dS'].max():.2f}"]


def _shape_sign_flips():
    msgs = []
    f = F.degenerate_levels("lambda", n_theta=11)
    a, b = f.panels["delta=0.01"].columns, f.panels["delta=-0.01"].columns
    corr = float(np.corrcoef(a["P01"] - a["P0"], b["P01"] - b["P0"])[0, 1])
    f16 = F.three_body_loss()
    d = {k: p.columns["P01"] - p.columns["P0"] for k, p in f16.panels.items()}
    flip = float(np.abs(d["sigma=-0.001"] + d["sigma=0.001"]).max())
    scale = float(np.abs(d["sigma=0.002"] - 2 * d["sigma=0.001"]).max())
    ok = corr < 0 and flip < 1e-15 and scale < 1e-15
    if not ok:
        msgs.append(f"fig 12 correlation {corr:.2f}, fig 16 flip {flip:.1e}")
    return ok, msgs


def _recipes_run():
    for n in range(1, 18):
        kw = {"n_theta": 5} if n in (6, 7, 10, 11, 12, 13, 15, 17) else {}
        if n == 7:
            kw["N"] = 20
            kw["small_N_omega"] = 10
        if n in (11, 13, 15, 17, 6):
            kw["N"] = 20
        if n == 9:
            kw = {"n_times": 11}
        F.figure(n, **kw)
    return True, []


SHAPE_CHECKS = {
    "recipes": _recipes_run,
    "figs 1-5 peaks and argmax": _shape_distributions,
    "fig 6 maximum": _shape_entropy_max,
    "fig 7 ridges": _shape_perturbed_ridges,
    "figs 11, 13 ridges": _shape_degenerate_ridges,
    "fig 15 ridge": _shape_background_ridge,
    "figs 12, 16 sign flip": _shape_sign_flips,
}


@pytest.mark.slow
@pytest.mark.parametrize("name", list(SHAPE_CHECKS))
def test_9_figure_shapes(name):
    ok, msgs = SHAPE_CHECKS[name]()
    _report(9, ok, f"{name}: {'ok' if ok else ' | '.join(msgs)}")


if __name__ == "__main__":
    import sys

    rng = np.random.default_rng(20240611)
    tests = [lambda: test_1_constrained_h2_equals_displaced_h0(rng), lambda: test_2_matrix_elements_and_selection_rules(rng),
             test_3_first_order_energies_slope, test_4_wigner_layer, test_5_degenerate_closed_forms,
             test_6_loss_formulas_and_parity_kill]
    for t in tests:
        try:
            t()
        except AssertionError:
            pass
    for name in SHAPE_CHECKS:
        try:
            test_9_figure_shapes(name)
        except AssertionError:
            pass
    sys.exit(0)
