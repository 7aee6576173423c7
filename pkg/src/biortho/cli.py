"""Command-line entry point.

Usage::

    biortho simulate  model.json
    biortho schmidt   model.json --format json
    biortho calibrate model.json --seed 3
    biortho ambiguity model.json --tolerance 1e-8
    biortho compare   model.json

Exit codes: 0 success, 1 usage or validation error, 2 the model's unitary
is not an ideal premeasurement.
"""

import argparse
import json
import sys

import numpy as np

from . import _backend, measurement, schmidt
from .errors import BiorthoError, NotAPremeasurement, SchemaError
from .modelfile import parse_model_file

COMMANDS = ("simulate", "schmidt", "calibrate", "ambiguity", "compare")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="biortho", description="Ideal premeasurement and preferred-basis analysis.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("file", help="JSON model file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--tolerance", type=float, default=None, help="degeneracy relative tolerance")
    p.add_argument("--seed", type=int, default=0, help="seed of the calibration generator")
    p.add_argument("--cutoff", type=float, default=None, help="Schmidt zero cutoff")
    return p


# ---------------------------------------------------------------- encoding

def _num(x):
    return float(x) + 0.0  # folds -0.0 into 0.0


def _cplx(z):
    return [_num(z.real), _num(z.imag)]


def _vec(v):
    return [_cplx(z) for z in np.asarray(v).reshape(-1)]


def _mat(m):
    return [_vec(row) for row in np.asarray(m)]


def _cols(m):
    return [_vec(col) for col in np.asarray(m).T]


def _decomposition(sd):
    return {
        "coefficients": [_num(c) for c in sd.coefficients],
        "leftBasis": _cols(sd.left_basis),
        "rightBasis": _cols(sd.right_basis),
        "classes": [list(map(int, c)) for c in sd.classes],
        "verdict": sd.verdict,
    }


def _calibration(cal):
    return {
        "systemBasis": _cols(cal.system_basis),
        "pointerStates": _cols(cal.pointer_states),
        "pointerValues": [_num(z) for z in cal.pointer_values],
        "sharp": list(cal.sharp),
        "residual": _num(cal.residual),
        "commutatorDefect": _num(cal.commutator_defect),
        "attempts": cal.attempts,
    }


def _state(bs):
    return {"dimS": bs.dim_s, "dimM": bs.dim_m, "amplitudes": _vec(bs.amplitudes)}


# ---------------------------------------------------------------- commands

def run(command, mf, seed=0, tolerance=None, cutoff=None):
    """Execute one command on a parsed :class:`ModelFile` and return the report dict."""
    rel_tol = tolerance if tolerance is not None else mf.tolerances.get("degeneracy", schmidt.DEFAULT_REL_TOL)
    cut = cutoff if cutoff is not None else mf.tolerances.get("cutoff", schmidt.DEFAULT_CUTOFF)
    cal_tol = mf.tolerances.get("calibration", measurement.CALIBRATION_TOL)
    model = mf.model

    if command == "simulate":
        final = measurement.premeasure(model, mf.system_state)
        results = {"finalState": _state(final), "norm": _num(np.linalg.norm(final.amplitudes))}
    elif command == "schmidt":
        final = measurement.premeasure(model, mf.system_state)
        sd = schmidt.schmidt_decompose(final, cutoff=cut, rel_tol=rel_tol)
        results = {
            "finalState": _state(final),
            "decomposition": _decomposition(sd),
            "reconstructionError": _num(sd.reconstruction_error(final)),
        }
    elif command == "calibrate":
        cal = measurement.extract_calibration_basis(model, tol=cal_tol, seed=seed)
        results = {"calibration": _calibration(cal)}
    elif command == "ambiguity":
        rep = measurement.ambiguity_report(
            model, mf.system_state, mf.sample_changes,
            cutoff=cut, rel_tol=rel_tol, tol=cal_tol, seed=seed,
        )
        decs = []
        for i, sd in enumerate(rep.decompositions):
            entry = _decomposition(sd)
            entry["kind"] = "dynamical" if i == 0 else "alternative"
            entry["matchScore"] = _num(rep.match_scores[i])
            entry["pointerPhysical"] = rep.pointer_physicality[i]
            entry["reconstructionError"] = _num(sd.reconstruction_error(rep.final_state))
            decs.append(entry)
        results = {
            "finalState": _state(rep.final_state),
            "verdict": rep.verdict,
            "schmidtCoefficients": [_num(c) for c in rep.schmidt.coefficients],
            "calibration": _calibration(rep.calibration),
            "decompositions": decs,
            "selectedIndex": rep.selected_index,
            "skippedChanges": [{"index": k, "reason": why} for k, why in rep.skipped],
        }
    elif command == "compare":
        if mf.targets is None:
            raise SchemaError(f"{mf.path}: compare needs a 'targets' object")
        cf = measurement.counterfactual_apparatus(model, *mf.targets)
        cal = measurement.extract_calibration_basis(cf.model, tol=cal_tol, seed=seed)
        results = {
            "distance": _num(cf.distance),
            "reachableDistance": _num(cf.reachable_distance),
            "original": {"label": model.label, "unitary": _mat(model.unitary)},
            "counterfactual": {
                "label": cf.model.label,
                "unitary": _mat(cf.unitary),
                "hInt": _mat(cf.model.h_int),
                "calibration": _calibration(cal),
            },
            "sameApparatus": model.same_apparatus(cf.model),
        }
    else:
        raise UsageError(f"unknown command {command!r}")

    return {
        "command": command,
        "input": {
            "path": str(mf.path),
            "sha256": mf.digest,
            "schemaVersion": mf.schema_version,
            "model": model.label,
        },
        "results": results,
        "diagnostics": {
            "seed": seed,
            "degeneracyTolerance": rel_tol,
            "cutoff": cut,
            "calibrationTolerance": cal_tol,
            "backend": _backend.BACKEND,
        },
    }


# ---------------------------------------------------------------- text output

def _fc(z):
    z = complex(z)
    return f"{_num(round(z.real, 6)):+.6f}{_num(round(z.imag, 6)):+.6f}i"


def _table(header, rows):
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(x).rjust(w) for x, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(str(x).rjust(w) for x, w in zip(r, widths)) for r in rows]
    return lines


def _basis_lines(title, cols):
    out = [title]
    for k, col in enumerate(cols):
        out.append(f"  [{k}] " + " ".join(_fc(complex(*z)) for z in col))
    return out


def _decomp_lines(d):
    rows = [(k, f"{c:.6f}", next(i for i, cl in enumerate(d["classes"]) if k in cl))
            for k, c in enumerate(d["coefficients"])]
    out = _table(("k", "c_k", "class"), rows)
    out += _basis_lines("left basis |a_k>:", d["leftBasis"])
    out += _basis_lines("right basis |z_k>:", d["rightBasis"])
    out.append(f"verdict: {d['verdict']}")
    return out


def _calib_lines(c):
    out = ["calibration |a_i>|z_0> -> |a_i>|z_i>:"]
    out += _basis_lines("system basis |a_i>:", c["systemBasis"])
    out += _basis_lines("pointer states |z_i>:", c["pointerStates"])
    rows = [(i, f"{v:+.6f}", "yes" if s else "NO") for i, (v, s) in enumerate(zip(c["pointerValues"], c["sharp"]))]
    out += _table(("i", "z_i", "sharp"), rows)
    out.append(f"residual: {c['residual']:.3e}")
    return out


def render_text(report):
    r = report["results"]
    lines = [f"biortho {report['command']}  model={report['input']['model']}  "
             f"sha256={report['input']['sha256'][:16]}"]
    if "finalState" in r:
        fs = r["finalState"]
        rows = [(f"({k // fs['dimM']},{k % fs['dimM']})", _fc(complex(*a))) for k, a in enumerate(fs["amplitudes"])]
        lines += ["final state (system, pointer):"] + _table(("index", "amplitude"), rows)
    cmd = report["command"]
    if cmd == "schmidt":
        lines += _decomp_lines(r["decomposition"])
        lines.append(f"reconstruction error: {r['reconstructionError']:.3e}")
    elif cmd == "calibrate":
        lines += _calib_lines(r["calibration"])
    elif cmd == "ambiguity":
        lines += _calib_lines(r["calibration"])
        lines.append(f"verdict: {r['verdict']}")
        for i, d in enumerate(r["decompositions"]):
            mark = "  <- selected by the dynamics" if i == r["selectedIndex"] else ""
            lines.append(f"decomposition {i} ({d['kind']}){mark}")
            lines += ["  " + x for x in _decomp_lines(d)]
            lines.append(f"  match score: {d['matchScore']:.6f}  pointer physical: "
                         f"{'yes' if d['pointerPhysical'] else 'no'}")
        for s in r["skippedChanges"]:
            lines.append(f"skipped sample change {s['index']}: {s['reason']}")
    elif cmd == "compare":
        cf = r["counterfactual"]
        lines += [f"counterfactual apparatus: {cf['label']}"]
        lines += _calib_lines(cf["calibration"])
        lines.append(f"operator distance ||U - U'||_F: {r['distance']:.6f}")
        lines.append(f"distance on reachable subspace: {r['reachableDistance']:.6f}")
    d = report["diagnostics"]
    lines.append(f"seed={d['seed']} degeneracy_tol={d['degeneracyTolerance']:g} cutoff={d['cutoff']:g} "
                 f"calibration_tol={d['calibrationTolerance']:g} backend={d['backend']}")
    return "\n".join(lines) + "\n"


def render_json(report):
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- main

def main(argv=None):
    fmt = "text"
    command = None
    try:
        args = build_parser().parse_args(argv)
        fmt, command = args.format, args.command
        mf = parse_model_file(args.file)
        report = run(command, mf, seed=args.seed, tolerance=args.tolerance, cutoff=args.cutoff)
    except UsageError as exc:
        print(f"biortho: usage error: {exc}", file=sys.stderr)
        return 1
    except NotAPremeasurement as exc:
        return _fail(fmt, command, exc, 2)
    except BiorthoError as exc:
        return _fail(fmt, command, exc, 1)

    sys.stdout.write(render_json(report) if fmt == "json" else render_text(report))
    return 0


def _fail(fmt, command, exc, code):
    print(f"biortho: {type(exc).__name__}: {exc}", file=sys.stderr)
    if fmt == "json":
        payload = {"command": command, "error": {"type": type(exc).__name__, "message": str(exc)}, "exitCode": code}
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
