"""Command-line front end.

    planar-bilinear analyze SYSTEM.json [--json]
    planar-bilinear simulate SYSTEM.json --u-schedule 1:0,2:1.5 (--x0 1,0 | --theta0 0.3) --dt 1e-3 --t 3 --out traj.csv
    planar-bilinear delta-scan SYSTEM.json --u-range -1,2 --n 301 --out delta.csv

Input files are JSON objects::

    {"A": [[2, -1], [0, 1]], "B": [[0, 1], [-1, 0]], "control_set": "reals", "label": "ej1"}

``control_set`` is ``"reals"`` (the default) or a closed interval ``[lo, hi]``.
Exit codes for ``analyze``: 0 controllable, 1 not controllable,
2 inconclusive; every command exits with 64 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import enum
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__
from .angular import classify_case, pqr, projective_controllable
from .delta import classify_exists_negative, delta_extremum, delta_quadratic
from .larc import DEFAULT_SEED, canonical_pair_indicators, decide_larc, indicator, shortcut_products, word_str
from .mat2 import Mat2, Vec2, bracket, default_eps
from .sim import DEFAULT_DT, ControlSchedule, StepTooLarge, integrate_angular, integrate_planar
from .spectrum import Status, controllability_verdict, eigenvalues_of_pencil, spectrum_summary
from .system import BilinearSystem, ControlSet

EXIT_CODES = {Status.CONTROLLABLE.value: 0, Status.NOT_CONTROLLABLE.value: 1, Status.INCONCLUSIVE.value: 2}
EXIT_INPUT_ERROR = 64


class InputError(Exception):
    """Bad user input; rendered as ``path:line: error: message``."""

    def __init__(self, message: str, path: str = "<args>", line: int | None = None):
        super().__init__(message)
        self.path = path
        self.line = line

    def __str__(self) -> str:
        where = self.path if self.line is None else f"{self.path}:{self.line}"
        return f"{where}: error: {self.args[0]}"


# ---------------------------------------------------------------- input


def _line_of_key(text: str, key: str) -> int:
    match = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, match.start()) + 1 if match else 1


def _reject_constant(name):
    raise ValueError(f"non-finite number {name}")


def _parse_matrix(value, key: str, path: str, line: int) -> Mat2:
    ok = (isinstance(value, list) and len(value) == 2
          and all(isinstance(row, list) and len(row) == 2 for row in value))
    if not ok:
        raise InputError(f'"{key}" must be a 2x2 array of numbers', path, line)
    for row in value:
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise InputError(f'"{key}" has a non-numeric entry {x!r}', path, line)
            if not math.isfinite(x):
                raise InputError(f'"{key}" has a non-finite entry', path, line)
    return Mat2.of(value)


def parse_system(text: str, path: str = "<input>") -> BilinearSystem:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc.msg} (column {exc.colno})", path, exc.lineno) from None
    except ValueError as exc:
        # parse_constant fired; json does not report where
        match = re.search(r"\b(NaN|-?Infinity)\b", text)
        line = text.count("\n", 0, match.start()) + 1 if match else 1
        raise InputError(str(exc), path, line) from None
    if not isinstance(doc, dict):
        raise InputError("top level must be a JSON object", path, 1)
    for key in ("A", "B"):
        if key not in doc:
            raise InputError(f'missing key "{key}"', path, 1)
    a = _parse_matrix(doc["A"], "A", path, _line_of_key(text, "A"))
    b = _parse_matrix(doc["B"], "B", path, _line_of_key(text, "B"))
    try:
        control_set = ControlSet.from_json(doc.get("control_set", "reals"))
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc), path, _line_of_key(text, "control_set")) from None
    label = doc.get("label", "")
    if not isinstance(label, str):
        raise InputError('"label" must be a string', path, _line_of_key(text, "label"))
    return BilinearSystem(a, b, control_set, label)


def load_system(path: str) -> BilinearSystem:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(exc.strerror or str(exc), path) from None
    return parse_system(text, path)


# ---------------------------------------------------------------- report


def _plain(value):
    """JSON-native copy: tuples become lists, infinities become strings."""
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(value, Mat2):
        return [list(r) for r in value.rows()]
    if isinstance(value, Vec2):
        return [value.x1, value.x2]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    raise TypeError(f"cannot serialise {type(value).__name__}")


@dataclass
class AnalysisReport:
    system: dict
    tolerances: dict
    seed: int
    larc: dict
    angular: dict
    delta: dict
    spectrum: dict
    verdict: dict

    @property
    def status(self) -> str:
        return self.verdict["status"]

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        doc = json.loads(text)
        return cls(**{f.name: doc[f.name] for f in fields(cls)})


def _larc_section(system: BilinearSystem, eps: float, seed: int):
    a, b = system.A, system.B
    verdict = decide_larc(a, b, eps=eps, seed=seed)
    det_a_br, det_b_br = shortcut_products(a, b)
    cert = verdict.certificate
    section = {
        "holds": verdict.holds,
        "decided_by": verdict.decided_by,
        "dim": verdict.basis.dim,
        "basis_words": [word_str(w) for w in verdict.basis.words],
        "indicator_AB": indicator(a, b),
        "det_bracket": bracket(a, b).det(),
        "det_A_det_bracket": det_a_br,
        "det_B_det_bracket": det_b_br,
        "shortcut_holds": det_a_br > 0 or det_b_br > 0,
        "canonical_pairs": [{"pair": [p, q], "indicator": v} for p, q, v in canonical_pair_indicators(a, b)],
        "certificate_found": verdict.certificate_found,
        "certificate": None if cert is None else {
            "label": cert.label,
            "source": cert.source,
            "indicator": cert.indicator,
            "first": cert.first,
            "second": cert.second,
            "first_coords": cert.first_coords,
            "second_coords": cert.second_coords,
        },
        "failure_point": verdict.failure_point,
        "checked_roots": list(verdict.checked_roots),
    }
    return verdict, _plain(section)


def _case_at(a: Mat2, b: Mat2, u: float, eps: float) -> dict:
    c = pqr(a, b, u)
    case = classify_case(c, eps)
    return {"u": u, "tag": case.tag, "P": c.P, "Q": c.Q, "R": c.R, "S": c.S,
            "parameters": case.parameters}


def build_report(system: BilinearSystem, eps: float | None = None, seed: int = DEFAULT_SEED) -> AnalysisReport:
    if eps is None:
        eps = default_eps()
    a, b, cset = system.A, system.B, system.control_set

    larc, larc_section = _larc_section(system, eps, seed)

    projective = projective_controllable(a, b, cset, eps=eps)
    angular = {
        "controllable": projective.controllable,
        "witness_u": projective.witness,
        "feasible_controls": projective.intervals,
        "case_at_zero": _case_at(a, b, 0.0, eps) if 0.0 in cset else None,
        "case_at_witness": None if projective.witness is None else _case_at(a, b, projective.witness, eps),
    }

    d = delta_quadratic(a, b, eps=eps)
    cls = classify_exists_negative(d)
    extremum = delta_extremum(d)
    delta = {
        "alpha": d.alpha,
        "beta": d.beta,
        "gamma": d.gamma,
        "det_bracket": d.det_bracket,
        "discriminant": d.discriminant(),
        "roots": d.roots(),
        "extremum": None if extremum is None else {"u": extremum[0], "value": extremum[1]},
        "case_label": cls.case_label,
        "exists_negative": cls.exists_negative,
        "negative_set": cls.negative_set,
        "A_complex": cls.a_complex,
        "B_complex": cls.b_complex,
        "B_repeated": cls.b_repeated,
        "trace_condition": cls.trace_condition,
        "margin": cls.margin,
    }

    spec = spectrum_summary(a, b, cset, projective.controllable, eps=eps)
    spectrum = {
        "trace_B": spec.trace_B,
        "re_range": spec.re_range,
        "u_window": spec.u_window,
        "zero_in_interior": spec.zero_in_interior,
        "lemma_used": spec.lemma_used,
        "product_discriminant": spec.product_discriminant,
    }

    verdict = controllability_verdict(a, b, cset, eps=eps, seed=seed, larc=larc,
                                      projective=projective, spectrum=spec)
    verdict_section = {
        "status": verdict.status,
        "criterion": verdict.criterion,
        "reasons": [{"condition": r.condition, "holds": r.holds, "evidence": r.evidence}
                    for r in verdict.reasons],
    }

    return AnalysisReport(
        system=_plain({"label": system.label, "A": a, "B": b, "control_set": cset.to_json()}),
        tolerances={"eps": eps},
        seed=seed,
        larc=larc_section,
        angular=_plain(angular),
        delta=_plain(delta),
        spectrum=_plain(spectrum),
        verdict=_plain(verdict_section),
    )


def _f(x) -> str:
    if isinstance(x, str):
        return x
    # round first so that tiny negatives do not print as -0.000000
    return f"{round(x, 6) + 0.0:.6f}"


def _intervals(items) -> str:
    if not items:
        return "(empty)"
    return " U ".join(f"[{_f(lo)}, {_f(hi)}]" for lo, hi in items)


def format_text(report: AnalysisReport) -> str:
    lines = []
    sysd = report.system
    lines.append(f"system {sysd['label'] or '(unlabelled)'}: A={sysd['A']} B={sysd['B']} U={sysd['control_set']}")

    lr = report.larc
    lines.append("")
    lines.append(f"Lie algebra rank condition: {'holds' if lr['holds'] else 'fails'} ({lr['decided_by']})")
    lines.append(f"  dim L = {lr['dim']}  basis words: {', '.join(lr['basis_words']) or '-'}")
    lines.append(f"  indicator(A, B) = {_f(lr['indicator_AB'])}")
    lines.append(f"  det(A) det[A,B] = {_f(lr['det_A_det_bracket'])}  det(B) det[A,B] = {_f(lr['det_B_det_bracket'])}"
                 f"  shortcut {'fires' if lr['shortcut_holds'] else 'silent'}")
    for item in lr["canonical_pairs"]:
        p, q = item["pair"]
        lines.append(f"    indicator({p}, {q}) = {_f(item['indicator'])}")
    if lr["certificate"] is not None:
        cert = lr["certificate"]
        lines.append(f"  certificate {cert['label']} [{cert['source']}] indicator {_f(cert['indicator'])}")
    elif lr["holds"]:
        lines.append("  no certificate pair found within the search budget")
    if lr["failure_point"] is not None:
        x1, x2 = lr["failure_point"]
        lines.append(f"  rank <= 1 at x = ({_f(x1)}, {_f(x2)})")

    ang = report.angular
    lines.append("")
    lines.append(f"projective controllability: {'yes' if ang['controllable'] else 'no'}")
    if ang["witness_u"] is not None:
        lines.append(f"  witness u = {_f(ang['witness_u'])}  feasible controls {_intervals(ang['feasible_controls'])}")
    for key in ("case_at_zero", "case_at_witness"):
        if ang[key] is not None:
            lines.append(f"  angular case at u={_f(ang[key]['u'])}: {ang[key]['tag']}")

    dl = report.delta
    lines.append("")
    lines.append(f"Delta(u) = {_f(dl['alpha'])} u^2 + {_f(dl['beta'])} u + {_f(dl['gamma'])}"
                 f"  (case {dl['case_label']})")
    lines.append(f"  det[A,B] = {_f(dl['det_bracket'])}  negative on {_intervals(dl['negative_set'])}")
    if dl["extremum"] is not None:
        lines.append(f"  extremum {_f(dl['extremum']['value'])} at u = {_f(dl['extremum']['u'])}")

    sp = report.spectrum
    lines.append("")
    lines.append(f"real parts of eigenvalues over u in {_intervals([sp['u_window']])}: {_intervals(sp['re_range'])}")
    lines.append(f"  tr(B) = {_f(sp['trace_B'])}  tr^2(AB) - 4 det(AB) = {_f(sp['product_discriminant'])}")
    lines.append(f"  0 interior: {'yes' if sp['zero_in_interior'] else 'no'} ({sp['lemma_used'] or '-'})")

    vd = report.verdict
    lines.append("")
    suffix = f" via {vd['criterion']}" if vd["criterion"] else ""
    lines.append(f"verdict: {vd['status']}{suffix}")
    for r in vd["reasons"]:
        lines.append(f"  [{'x' if r['holds'] else ' '}] {r['condition']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- CSV


def _g(x: float) -> str:
    return "%.17g" % x


def _open_out(path: str):
    if path == "-":
        return sys.stdout
    try:
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(exc.strerror or str(exc), path) from None


def _write_rows(path: str, header, rows):
    fh = _open_out(path)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()


def _pair(text: str, flag: str) -> tuple[float, float]:
    parts = text.split(",")
    try:
        if len(parts) != 2:
            raise ValueError
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise InputError(f"{flag} expects two comma-separated numbers, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise InputError(f"{flag} values must be finite")
    return lo, hi


def _positive(text: str, flag: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"{flag} expects a number, got {text!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise InputError(f"{flag} must be positive")
    return value


# ---------------------------------------------------------------- commands


def cmd_analyze(args) -> int:
    system = load_system(args.file)
    report = build_report(system, eps=args.eps, seed=args.seed)
    sys.stdout.write(report.to_json() if args.json else format_text(report))
    return report.exit_code


def cmd_simulate(args) -> int:
    system = load_system(args.file)
    try:
        schedule = ControlSchedule.parse(args.u_schedule)
    except ValueError as exc:
        raise InputError(f"--u-schedule: {exc}") from None
    dt = _positive(args.dt, "--dt")
    if args.t is not None:
        schedule = schedule.fitted(_positive(args.t, "--t"))
    for _, u in schedule.segments:
        if u not in system.control_set:
            raise InputError(f"control {u:g} lies outside the admissible set")
    try:
        if args.x0 is not None:
            x1, x2 = _pair(args.x0, "--x0")
            if x1 == 0 and x2 == 0:
                raise InputError("--x0 must be nonzero")
            traj = integrate_planar(system.A, system.B, schedule, Vec2(x1, x2), dt)
            rows = ((_g(t), _g(x[0]), _g(x[1]), _g(u))
                    for t, x, u in zip(traj.times, traj.states, traj.controls))
            header = ("t", "x1", "x2", "u")
        else:
            theta0 = float(args.theta0)
            traj = integrate_angular(system.A, system.B, schedule, theta0, dt)
            rows = ((_g(t), _g(th), _g(u)) for t, th, u in zip(traj.times, traj.states, traj.controls))
            header = ("t", "theta", "u")
    except StepTooLarge as exc:
        raise InputError(f"--dt too large: {exc}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _write_rows(args.out, header, rows)
    if traj.truncated:
        print(f"warning: state norm left [1e-300, 1e300] at t={traj.times[-1]:.6f}; "
              "trajectory truncated", file=sys.stderr)
    return 0


def cmd_delta_scan(args) -> int:
    system = load_system(args.file)
    lo, hi = _pair(args.u_range, "--u-range")
    if not lo < hi:
        raise InputError("--u-range needs lo < hi")
    if args.n < 2:
        raise InputError("--n must be at least 2")
    a, b = system.A, system.B
    d = delta_quadratic(a, b)
    rows = []
    for u in np.linspace(lo, hi, args.n):
        u = float(u)
        l1, l2 = eigenvalues_of_pencil(a, b, u)
        rows.append((_g(u), _g(d(u)), _g(l1.real), _g(l2.real), _g(l1.imag),
                     classify_case(pqr(a, b, u), args.eps).tag))
    _write_rows(args.out, ("u", "delta", "re_lambda1", "re_lambda2", "im_lambda1", "case_tag"), rows)
    return 0


class _Parser(argparse.ArgumentParser):
    # argparse's own exit status 2 would collide with "Inconclusive"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="planar-bilinear",
                     description="Controllability analysis of planar bilinear systems x' = (A + uB) x.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--eps", type=float, default=None,
                        help="zero tolerance (default: $PLANAR_BILINEAR_TOL or 1e-9)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="full controllability report")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="certificate search seed")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="integrate under a piecewise-constant control")
    p.add_argument("file")
    p.add_argument("--u-schedule", required=True, metavar="S", help='segments "dur:u,dur:u,..."')
    start = p.add_mutually_exclusive_group(required=True)
    start.add_argument("--x0", metavar="a,b", help="planar initial state")
    start.add_argument("--theta0", metavar="r", help="initial angle for the projective flow")
    p.add_argument("--dt", default=str(DEFAULT_DT))
    p.add_argument("--t", default=None, help="final time (default: schedule length)")
    p.add_argument("--out", required=True, help="CSV path, - for stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("delta-scan", help="tabulate Delta(u) and the eigenvalues")
    p.add_argument("file")
    p.add_argument("--u-range", required=True, metavar="lo,hi")
    p.add_argument("--n", type=int, default=201)
    p.add_argument("--out", required=True, help="CSV path, - for stdout")
    p.set_defaults(func=cmd_delta_scan)
    return parser


_PAIR_FLAGS = ("--u-range", "--x0", "--u-schedule")


def _glue_negative_values(argv: list[str]) -> list[str]:
    # "--u-range -1,2" would otherwise be read as an unknown option "-1,2"
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _PAIR_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative_values(argv))
    if args.eps is not None and not (math.isfinite(args.eps) and args.eps > 0):
        print("planar-bilinear: error: --eps must be positive", file=sys.stderr)
        return EXIT_INPUT_ERROR
    try:
        return args.func(args)
    except InputError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
