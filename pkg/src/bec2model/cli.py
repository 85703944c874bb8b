"""Command-line interface: ``bec2model <command> [options]``.

Settings are layered: command-line flags override a ``--config`` file, which
overrides built-in defaults.  The config file holds ``key = value`` lines
whose keys are the long flag names without dashes (``t_max`` or ``t-max``).
Without ``--out`` the output goes to ``$BEC2MODEL_OUTPUT_DIR/<command>.<format>``
when that variable is set, otherwise to standard output.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import Bec2ModelError
from .model import ModelParams, a1_for_m0

OUTPUT_DIR_ENV = "BEC2MODEL_OUTPUT_DIR"
COMMANDS = ("distribution", "perturb", "entropy-surface", "dynamics", "degenerate", "loss", "count", "verify")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    n: int = 10
    theta: float | None = None
    phi: float = 0.0
    m0: list[int] | None = None
    a1: float | None = None
    a2: float = 1.0
    kind: str | None = None
    delta: float = 0.0
    alpha: dict[int, float] = field(default_factory=dict)
    sigma: float | None = None
    t_max: float = 20.0
    t_steps: int = 2001
    centre: float = 0.0
    width: float = 3.0
    initial: str = "eigen"
    n_theta: int = 101
    degenerate: bool = False
    method: str = "analytic"
    max_body: int = 3
    rule: str = "couplings"
    max_n: int = 12
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.n < 0:
            raise UsageError("--n must be non-negative")
        for m in self.m0 or []:
            if abs(m) > self.n or (self.n - m) % 2:
                raise UsageError(f"--m0 {m} is not an allowed label for N={self.n} (|m| <= N, same parity)")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if self.t_steps < 1 or self.n_theta < 1:
            raise UsageError("grid sizes must be positive")
        if self.alpha and self.sigma is not None:
            raise UsageError("give either --alpha or --sigma, not both")

    def a1_for(self, m0: int) -> float:
        """``--a1`` if given, else the value that makes ``m0`` the ground state."""
        return float(self.a1) if self.a1 is not None else float(a1_for_m0(m0, self.a2))

    def echo(self) -> dict:
        d = asdict(self)
        d["alpha"] = {str(k): v for k, v in sorted(self.alpha.items())}
        d.pop("out")
        return d


# ---------------------------------------------------------------------------
# parsing

def _alpha_item(text: str) -> tuple[int, float]:
    try:
        k, v = text.split("=", 1)
        return int(k), float(v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected k=value, got {text!r}") from None


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


_SCALARS = {"n": int, "theta": float, "phi": float, "a1": float, "a2": float, "kind": str, "delta": float,
            "sigma": float, "t_max": float, "t_steps": int, "centre": float, "width": float, "initial": str,
            "n_theta": int, "degenerate": _bool, "method": str, "max_body": int, "rule": str, "max_n": int,
            "out": str, "format": str}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bec2model", description="Two-mode condensate model: data generation and checks.")
    p.add_argument("command", choices=COMMANDS)
    S = argparse.SUPPRESS
    p.add_argument("--config", help="key = value settings file")
    p.add_argument("--n", type=int, default=S, help="total particle number N")
    p.add_argument("--theta", type=float, default=S)
    p.add_argument("--phi", type=float, default=S)
    p.add_argument("--m0", type=int, action="append", default=S, help="initial label (repeatable)")
    p.add_argument("--a1", type=float, default=S, help="default: -2 A2 m0, which makes m0 the ground state")
    p.add_argument("--a2", type=float, default=S)
    p.add_argument("--kind", choices=["omega", "lambda", "U", "Lambda", "mu"], default=S)
    p.add_argument("--delta", type=float, default=S)
    p.add_argument("--alpha", type=_alpha_item, action="append", default=S,
                   help="background loss k=alpha_k (repeatable)")
    p.add_argument("--sigma", type=float, default=S, help="three-body recombination strength")
    p.add_argument("--t-max", dest="t_max", type=float, default=S)
    p.add_argument("--t-steps", dest="t_steps", type=int, default=S)
    p.add_argument("--centre", type=float, default=S, help="Gaussian initial state centre")
    p.add_argument("--width", type=float, default=S, help="Gaussian initial state width")
    p.add_argument("--initial", choices=["eigen", "bare"], default=S)
    p.add_argument("--n-theta", dest="n_theta", type=int, default=S, help="theta grid size on [0, pi]")
    p.add_argument("--degenerate", action="store_true", default=S)
    p.add_argument("--method", choices=["analytic", "oracle", "closed-form"], default=S)
    p.add_argument("--max-body", dest="max_body", type=int, default=S)
    p.add_argument("--rule", choices=["couplings", "monomials", "families"], default=S)
    p.add_argument("--max-n", dest="max_n", type=int, default=S)
    p.add_argument("--out", default=S)
    p.add_argument("--format", choices=["csv", "json"], default=S)
    return p


def _read_config(path: str) -> dict:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    try:
        cp.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"bad config file: {exc}") from None
    out = {}
    for key, raw in cp["run"].items():
        k = key.replace("-", "_")
        try:
            if k == "m0":
                out[k] = [int(x) for x in raw.replace(",", " ").split()]
            elif k == "alpha":
                out[k] = dict(_alpha_item(x.strip()) for x in raw.split(",") if x.strip())
            elif k in _SCALARS:
                out[k] = _SCALARS[k](raw)
            else:
                raise UsageError(f"unknown config key {key!r}")
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"config key {key!r}: {exc}") from None
    return out


def build_config(argv=None) -> RunConfig:
    ns = vars(_parser().parse_args(argv))
    cfg_path = ns.pop("config", None)
    merged = _read_config(cfg_path) if cfg_path else {}
    if "alpha" in ns:
        ns["alpha"] = dict(ns["alpha"])
    merged.update(ns)
    names = {f.name for f in fields(RunConfig)}
    return RunConfig(**{k: v for k, v in merged.items() if k in names})


# ---------------------------------------------------------------------------
# commands; each returns (panels, meta) with panels: label -> {column: array}

def _thetas(cfg: RunConfig) -> np.ndarray:
    if cfg.theta is not None:
        return np.array([cfg.theta])
    return np.linspace(0.0, math.pi, cfg.n_theta)


def _theta(cfg: RunConfig) -> float:
    return 1.0 if cfg.theta is None else cfg.theta


def _dist_cols(series) -> dict:
    cols = {"m": series.m, "P0": series.p}
    if series.p1 is not None:
        cols["P01"] = series.total
    return cols


def cmd_distribution(cfg: RunConfig):
    from .perturb import perturbed_distribution
    from .wigner import distribution

    panels = {}
    for m0 in cfg.m0 or [cfg.n]:
        if cfg.kind:
            params = ModelParams(cfg.n, _theta(cfg), cfg.phi, cfg.a1_for(m0), cfg.a2)
            series = perturbed_distribution(cfg.kind, params, m0, cfg.delta, warn=False)
        else:
            series = distribution(cfg.n, m0, _theta(cfg), cfg.phi)
        panels[f"m0={m0}"] = _dist_cols(series)
    return panels, {}


def cmd_perturb(cfg: RunConfig):
    from .perturb import first_order_coefficients

    if not cfg.kind:
        raise UsageError("perturb needs --kind")
    panels, meta = {}, {}
    for m0 in cfg.m0 or [cfg.n]:
        params = ModelParams(cfg.n, _theta(cfg), cfg.phi, cfg.a1_for(m0), cfg.a2)
        corr = first_order_coefficients(cfg.kind, params, m0, cfg.delta or 1.0, warn=False)
        ms = sorted(corr.coefficients)
        a = np.array([corr.coefficients[m] for m in ms], dtype=complex)
        panels[f"m0={m0}"] = {"m": np.array(ms, dtype=float), "re_a": a.real, "im_a": a.imag}
        meta[f"m0={m0}"] = {"energy_shift": corr.energy_shift, "max_abs": corr.max_abs()}
    return panels, meta


def _loss_spec(cfg: RunConfig):
    from .loss import LossSpec

    if cfg.alpha:
        return LossSpec.background(cfg.alpha)
    if cfg.sigma is not None:
        return LossSpec.tbr(cfg.sigma)
    return None


def _surface_cols(s) -> dict:
    th, m0 = np.meshgrid(s.thetas, s.m0s, indexing="ij")
    return {"theta": th.ravel(), "m0": m0.ravel().astype(float), "S0": s.S0.ravel(), "dS": s.dS.ravel(),
            "S": s.S.ravel()}


def cmd_entropy_surface(cfg: RunConfig):
    from . import entangle

    thetas = _thetas(cfg)
    m0s = cfg.m0
    spec = _loss_spec(cfg)
    if cfg.degenerate:
        if cfg.kind is None:
            raise UsageError("--degenerate needs --kind")
        s = entangle.degenerate_entropy_surface(cfg.kind, cfg.n, thetas, m0s, cfg.delta or 0.005, cfg.a2, cfg.phi)
    elif spec is not None:
        s = entangle.loss_entropy_surface(spec, cfg.n, thetas, m0s, cfg.a2, None, cfg.phi)
    else:
        if cfg.kind is not None and cfg.delta == 0.0:
            raise UsageError("--kind needs a nonzero --delta")
        a1f = (lambda m0: float(cfg.a1)) if cfg.a1 is not None else None
        s = entangle.entropy_surface(cfg.n, thetas, m0s, cfg.kind, cfg.delta, cfg.phi, cfg.a2, a1f)
    return {"surface": _surface_cols(s)}, {k: v for k, v in s.meta.items() if k != "loss"}


def cmd_dynamics(cfg: RunConfig):
    from .dynamics import InitialState, relative_population, relative_population_corrected

    a1 = cfg.a1 if cfg.a1 is not None else -1.9
    params = ModelParams(cfg.n, _theta(cfg), cfg.phi, a1, cfg.a2)
    state = InitialState.gaussian(cfg.n, cfg.centre, cfg.width)
    t = np.linspace(0.0, cfg.t_max, cfg.t_steps)
    if cfg.kind and cfg.delta:
        ts = relative_population_corrected(state, params, cfg.kind, cfg.delta, t, cfg.initial)
    else:
        ts = relative_population(state, params, t)
    return {"evolution": {"t": ts.times, "m": ts.values}}, {"breakdown": ts.breakdown, "A1": a1,
                                                            "time_average": ts.time_average()}


def cmd_degenerate(cfg: RunConfig):
    from .perturb import degenerate_distribution, degenerate_solve

    kind = cfg.kind or "omega"
    delta = cfg.delta or 1.0
    if cfg.theta is None:
        th = _thetas(cfg)
        sols = [degenerate_solve(kind, t, cfg.n, delta, cfg.phi) for t in th]
        return {"levels": {"theta": th, "eps_plus": np.array([s.eps_plus for s in sols]),
                           "eps_minus": np.array([s.eps_minus for s in sols])}}, {"kind": kind, "delta": delta}
    m_hi = (cfg.m0 or [cfg.n])[0]
    a1 = cfg.a1 if cfg.a1 is not None else -(2 * m_hi - 2) * cfg.a2
    params = ModelParams(cfg.n, cfg.theta, cfg.phi, a1, cfg.a2)
    series = degenerate_distribution(kind, params, (m_hi - 2, m_hi), delta)
    return {"distribution": _dist_cols(series)}, {"kind": kind, "delta": delta, "A1": a1,
                                                  "eps": list(series.meta["eps"])}


def cmd_loss(cfg: RunConfig):
    from .loss import background_correction, loss_distribution, tbr_correction

    spec = _loss_spec(cfg)
    if spec is None:
        raise UsageError("loss needs --alpha or --sigma")
    panels, meta = {}, {}
    for m0 in cfg.m0 or [cfg.n]:
        a1 = cfg.a1_for(m0)
        if cfg.method == "closed-form":
            if m0 != cfg.n:
                raise UsageError("closed forms start from m0 = N")
            series = (background_correction(cfg.n, _theta(cfg), cfg.alpha, a1, cfg.a2, cfg.phi) if cfg.alpha
                      else tbr_correction(cfg.n, _theta(cfg), cfg.sigma, a1, cfg.a2, cfg.phi))
        else:
            series = loss_distribution(spec, cfg.n, m0, _theta(cfg), a1, cfg.a2, cfg.phi, cfg.method)
            meta[f"m0={m0}"] = {"skipped": [list(x) for x in series.meta["skipped"]]}
        panels[f"m0={m0}"] = _dist_cols(series)
    return panels, meta


def cmd_count(cfg: RunConfig):
    from .symbolic import count_table

    rows = count_table(cfg.max_body, cfg.rule)
    cols = {"n_body": [r.n_body for r in rows], "n_model": [r.n_model for r in rows],
            "general": [r.general for r in rows], "missed": [r.missed for r in rows]}
    return {"table": {k: np.array(v) for k, v in cols.items()}}, {"rule": cfg.rule}


def cmd_verify(cfg: RunConfig):
    from .verify import run_all

    checks = run_all(min(cfg.max_n, 12))
    cols = {"check": [c.name for c in checks], "error": np.array([c.error for c in checks]),
            "tol": np.array([c.tol for c in checks]), "passed": [c.passed for c in checks]}
    return {"report": cols}, {"all_passed": all(c.passed for c in checks)}


HANDLERS = {
    "distribution": cmd_distribution,
    "perturb": cmd_perturb,
    "entropy-surface": cmd_entropy_surface,
    "dynamics": cmd_dynamics,
    "degenerate": cmd_degenerate,
    "loss": cmd_loss,
    "count": cmd_count,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# output

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % (float(x) + 0.0)  # no "-0"
    return str(x)


def render_csv(panels: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    multi = len(panels) > 1
    header = None
    for label, cols in panels.items():
        names = list(cols)
        row_header = (["series"] if multi else []) + names
        if header is None:
            header = row_header
            w.writerow(header)
        elif row_header != header:
            raise ValueError("panels of one output must share columns")
        for row in zip(*(cols[n] for n in names)):
            w.writerow(([label] if multi else []) + [_fmt(x) for x in row])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def render_json(cfg: RunConfig, panels: dict, meta: dict) -> str:
    doc = {"config": cfg.echo(), "meta": meta, "panels": panels}
    return json.dumps(_jsonable(doc), sort_keys=True, indent=1) + "\n"


def _destination(cfg: RunConfig) -> Path | None:
    if cfg.out:
        return Path(cfg.out)
    d = os.environ.get(OUTPUT_DIR_ENV)
    if d:
        return Path(d) / f"{cfg.command}.{cfg.format}"
    return None


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    panels, meta = HANDLERS[cfg.command](cfg)
    text = render_csv(panels) if cfg.format == "csv" else render_json(cfg, panels, meta)
    dest = _destination(cfg)
    if dest is None:
        stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(text)
    if cfg.command == "verify":
        for name, err, tol, ok in zip(*panels["report"].values()):
            print(f"{'PASS' if ok else 'FAIL'}  {name:<28} err={err:.3e}  tol={tol:.0e}", file=sys.stderr)
        return 0 if meta["all_passed"] else 1
    return 0


def main(argv=None) -> int:
    try:
        cfg = build_config(argv)
        return run(cfg)
    except UsageError as exc:
        print(f"bec2model: error: {exc}", file=sys.stderr)
        return 2
    except (Bec2ModelError, ValueError) as exc:
        print(f"bec2model: error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
