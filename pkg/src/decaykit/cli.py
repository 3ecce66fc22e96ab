"""Command-line front end.

    decaykit <command> --scenario FILE [--out PATH] [--workers N] [--tol X]

Commands: norm, survival, tau, tau-time, winding, report, seed-scenarios.

Exit codes: 0 success, 2 bad configuration, 3 fewer than 90% of survival
points converged, 4 winding integral not an integer. ``report`` exits with
the largest code of its parts.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import detect_deviations, fit_exponential
from .contour import count_zeros_poles, winding_integral
from .errors import (CutoffTooSmall, DecayKitError, GuardViolation, NoExponentialWindow,
                     NonInteger, QuadratureFailure, ScenarioError)
from .quadrature import FrequencyDomain
from .scenario import Scenario, canonical_scenarios, load_scenario
from .smatrix import durations
from .spectral import norm, norm_closed_form
from .timedomain import TimeGrid, survival, tau_time_residues, tau_time_transform

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_NONINTEGER = 4

MIN_CONVERGED = 0.9

COMMANDS = ("norm", "survival", "tau", "tau-time", "winding", "report", "seed-scenarios")


def fmt(x: float) -> str:
    return format(float(x), ".16e")


def write_csv(out, header, rows):
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")


def _clean(obj):
    """Make ``obj`` JSON-safe: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return [_clean(obj.real), _clean(obj.imag)]
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


# --------------------------------------------------------------------------
# Commands. Each returns (exit code, text).
# --------------------------------------------------------------------------

def cmd_norm(sc: Scenario, workers: int):
    numeric = norm(sc.density, sc.domain, sc.quad)
    closed = norm_closed_form(sc.density, sc.domain)
    buf = io.StringIO()
    write_csv(buf, ["numeric", "closed", "diff"], [[numeric, closed, numeric - closed]])
    return EXIT_OK, buf.getvalue()


def _survival_code(curve) -> int:
    return EXIT_OK if curve.converged_fraction >= MIN_CONVERGED else EXIT_CONVERGENCE


def cmd_survival(sc: Scenario, workers: int):
    curve = survival(sc.density, sc.domain, sc.grid, sc.quad, sc.data["renormalize"], workers)
    buf = io.StringIO()
    rows = [[t, a.real, a.imag, p, "1" if ok else "0"]
            for t, a, p, ok in zip(curve.t, curve.amplitude, curve.probability, curve.converged)]
    write_csv(buf, ["t", "re_L", "im_L", "P", "converged"], rows)
    return _survival_code(curve), buf.getvalue()


def cmd_tau(sc: Scenario, workers: int):
    w = sc.omega_grid()
    tau = np.asarray(durations(sc.model, w))
    buf = io.StringIO()
    write_csv(buf, ["omega", "tau1", "tau2"], [[x, v.real, v.imag] for x, v in zip(w, tau)])
    return EXIT_OK, buf.getvalue()


def _cutoff(sc: Scenario) -> float:
    c = sc.data["tau_time"]["cutoff"]
    if c is not None:
        return float(c)
    top = max(p.omega_n + p.gamma_n for p in sc.model.pairs)
    return 200.0 * top


def _tau_time(sc: Scenario, workers: int):
    grid = sc.tau_grid()
    res = tau_time_residues(sc.model, grid)
    tr = tau_time_transform(sc.model, grid, _cutoff(sc), sc.quad, sc.data["tau_time"]["tail_tol"], workers)
    agree = np.abs(tr.values - res.residue_value) <= tr.errors
    return grid, res, tr, agree


def cmd_tau_time(sc: Scenario, workers: int):
    grid, res, tr, agree = _tau_time(sc, workers)
    buf = io.StringIO()
    rows = [[t, r.real, r.imag, e, v.real, v.imag, err, "1" if ok else "0"]
            for t, r, e, v, err, ok in zip(grid.points, res.residue_value, res.averaged_envelope,
                                          tr.values, tr.errors, agree)]
    write_csv(buf, ["t", "residue_re", "residue_im", "envelope", "transform_re", "transform_im",
                    "transform_err", "agree"], rows)
    code = EXIT_OK if np.mean(tr.converged) >= MIN_CONVERGED else EXIT_CONVERGENCE
    return code, buf.getvalue()


def _winding(sc: Scenario):
    c = sc.contour()
    try:
        w = winding_integral(sc.model, c, sc.quad)
    except NonInteger as e:
        inv = count_zeros_poles(sc.model, c)
        return EXIT_NONINTEGER, {"error": str(e), "raw": e.raw, "inventory": inv.to_dict(),
                                 "n_minus_p_inventory": inv.n_zeros - inv.n_poles}
    out = w.to_dict()
    out["contour"] = c.resolved(sc.model.gamma_min).to_dict()
    return EXIT_OK, out


def cmd_winding(sc: Scenario, workers: int):
    code, out = _winding(sc)
    return code, dumps_json(out)


def _survival_section(sc: Scenario, dom: FrequencyDomain, grid: TimeGrid, workers: int, tol: float):
    curve = survival(sc.density, dom, grid, sc.quad, sc.data["renormalize"], workers)
    section = {
        "domain": dom.to_dict(),
        "grid": {"t_min": float(grid.points[0]), "t_max": float(grid.points[-1]), "points": len(grid)},
        "converged_fraction": curve.converged_fraction,
        "norm_closed_form": norm_closed_form(sc.density, dom),
    }
    an = sc.data["analysis"]
    gamma_ref = an["gamma_ref"]
    if gamma_ref is None and len(sc.density.resonances) == 1:
        gamma_ref = sc.density.resonances[0].gamma
    window = an["fit_window"] or (float(grid.points[0]), float(grid.points[-1]))
    try:
        section["fit"] = fit_exponential(curve, tuple(window)).to_dict()
    except DecayKitError as e:
        section["fit"] = {"error": str(e)}
    try:
        section["deviation"] = detect_deviations(curve, gamma_ref, tol).to_dict()
    except (NoExponentialWindow, ValueError) as e:
        section["deviation"] = {"error": str(e)}
    return _survival_code(curve), section


def cmd_report(sc: Scenario, workers: int):
    codes = []
    doc = {"version": __version__, "scenario": sc.data, "scenario_hash": sc.hash}
    numeric = norm(sc.density, sc.domain, sc.quad)
    closed = norm_closed_form(sc.density, sc.domain)
    doc["norm"] = {"numeric": numeric, "closed": closed, "diff": numeric - closed}

    tol = sc.data["analysis"]["tol"]
    gmin = sc.density.gamma_min
    # full line: exponential regime, Gamma t up to 20, where the amplitude is resolved
    full_grid = TimeGrid.log(0.02 / gmin, 20.0 / gmin, 121)
    code, full = _survival_section(sc, FrequencyDomain.full_line(), full_grid, workers, min(tol, 1e-6))
    codes.append(code)
    code, half = _survival_section(sc, FrequencyDomain.half_line(), sc.grid, workers, tol)
    codes.append(code)
    doc["survival"] = {"FullLine": full, "HalfLine": half}

    if sc.model.mode.value == "UnitaryPair":
        grid, res, tr, agree = _tau_time(sc, workers)
        doc["tau_time"] = {
            "cutoff": _cutoff(sc),
            "t": grid.points.tolist(),
            "residue": [[v.real, v.imag] for v in res.residue_value],
            "averaged_envelope": res.averaged_envelope.tolist(),
            "transform": [[v.real, v.imag] for v in tr.values],
            "transform_error": tr.errors.tolist(),
            "max_abs_difference": float(np.max(np.abs(tr.values - res.residue_value))),
            "all_agree": bool(agree.all()),
        }
        codes.append(EXIT_OK if np.mean(tr.converged) >= MIN_CONVERGED else EXIT_CONVERGENCE)
    else:
        doc["tau_time"] = None

    if "contour" in sc.data:
        code, doc["winding"] = _winding(sc)
        codes.append(code)
    doc["exit_code"] = max(codes)
    return max(codes), dumps_json(doc)


def cmd_seed(out: str | None):
    scenarios = canonical_scenarios()
    if out is None:
        return EXIT_OK, dumps_json(scenarios)
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    for name, data in scenarios.items():
        (d / f"{name}.json").write_text(dumps_json(data), encoding="utf-8", newline="\n")
    return EXIT_OK, None


_HANDLERS = {
    "norm": cmd_norm,
    "survival": cmd_survival,
    "tau": cmd_tau,
    "tau-time": cmd_tau_time,
    "winding": cmd_winding,
    "report": cmd_report,
}


# --------------------------------------------------------------------------

def _positive_int(s):
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _positive_float(s):
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {s!r}")
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be a positive number")
    return v


def _common(suppress: bool) -> argparse.ArgumentParser:
    # the same flags are accepted before or after the command name
    d = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--scenario", default=d, help="scenario JSON file")
    p.add_argument("--out", default=d, help="output file (directory for seed-scenarios); default stdout")
    p.add_argument("--workers", type=_positive_int, default=d,
                   help="worker threads (default: $DECAYKIT_WORKERS or the CPU count)")
    p.add_argument("--tol", type=_positive_float, default=d,
                   help="absolute and relative quadrature tolerance")
    return p


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="decaykit", description="Resonance decay laws and scattering durations.",
                     parents=[_common(False)])
    parser.add_argument("--version", action="version", version=f"decaykit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "norm": "weight of the density on the domain, numeric and closed form",
        "survival": "CSV of L(t) and P(t) on the time grid",
        "tau": "CSV of tau1, tau2 on the omega grid",
        "tau-time": "CSV of tau(t): residue sum vs direct transform",
        "winding": "JSON winding integral and zero/pole inventory",
        "report": "JSON summary of the whole pipeline",
        "seed-scenarios": "write the canonical scenarios",
    }
    for name in COMMANDS:
        sub.add_parser(name, help=helps[name], parents=[_common(True)])
    return parser


def default_workers() -> int:
    env = os.environ.get("DECAYKIT_WORKERS")
    if env is not None and env.strip():
        try:
            v = int(env)
        except ValueError:
            raise ScenarioError(f"DECAYKIT_WORKERS must be a positive integer, got {env!r}") from None
        if v < 1:
            raise ScenarioError(f"DECAYKIT_WORKERS must be a positive integer, got {env!r}")
        return v
    return os.cpu_count() or 1


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "seed-scenarios":
            code, text = cmd_seed(args.out)
            if text is not None:
                _emit(text, None)
            return code
        workers = args.workers if args.workers is not None else default_workers()
        if args.scenario is None:
            raise ScenarioError(f"{args.command} needs --scenario")
        sc = load_scenario(args.scenario).with_overrides(args.tol)
        code, text = _HANDLERS[args.command](sc, workers)
    except ScenarioError as e:
        print(f"decaykit: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (CutoffTooSmall, GuardViolation) as e:
        print(f"decaykit: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NonInteger as e:
        print(f"decaykit: {e}", file=sys.stderr)
        return EXIT_NONINTEGER
    except QuadratureFailure as e:
        print(f"decaykit: {e}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ValueError as e:
        # invariants rejected by the numerical layer, e.g. a PoleOnly model for tau-time
        print(f"decaykit: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(text, args.out)
    if code:
        print(f"decaykit: finished with exit code {code}", file=sys.stderr)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
