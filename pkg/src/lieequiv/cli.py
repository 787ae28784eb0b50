"""Command-line front end.

System files are INI documents with a ``[system]`` section::

    [system]
    vars = x, y
    drift = y^2, 0
    control_1 = 0, 1
    equilibrium = 0, 0        ; optional
    assert_complete = 0       ; optional field indices (0 = drift)

and an optional ``[options]`` section with ``max_dim``, ``max_depth``,
``samples``, ``horizon`` and ``seed``.  Command-line flags override it.

Exit codes: 0 success or pass, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import configparser
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import __version__
from .classify import ClassifyOptions, SystemSpec, classify_system, report_invariant_violations
from .equivmap import (
    heisenberg_equivalence_demo,
    heisenberg_probe,
    manufactured_word_pair,
    pushforward_residual,
    simulate_control_affine,
    well_definedness_residual,
    FlowWord,
)
from .groupsim import PiecewiseControl, catalog, get_group, read_trajectory, verification_suite
from .kernels import IntegrationError
from .liealg import VField, lie_bracket
from .symexpr import ParseError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
PROBE_TOL = 1e-5


class InputError(Exception):
    """Bad user input; ``kind`` tags the message for the exit-2 report."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


# ---------------------------------------------------------------------------
# system files


@dataclass
class SystemFile:
    path: str
    spec: SystemSpec
    options: dict = field(default_factory=dict)


_OPTION_TYPES = {"max_dim": int, "max_depth": int, "samples": int, "horizon": float, "seed": int}


def _split(value: str) -> list[str]:
    return [p.strip() for p in value.split(",") if p.strip()]


def parse_system_text(text: str, path: str = "<string>") -> SystemFile:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        cp.read_string(text, source=path)
    except configparser.Error as exc:
        raise InputError("malformed file", f"{path}: {exc}") from None
    if not cp.has_section("system"):
        raise InputError("malformed file", f"{path}: missing [system] section")
    sec = cp["system"]
    for key in ("vars", "drift"):
        if key not in sec:
            raise InputError("malformed file", f"{path}: missing key {key!r}")
    known = {"vars", "drift", "equilibrium", "assert_complete"}
    for key in sec:
        if key not in known and not (key.startswith("control_") and key[8:].isdigit()):
            raise InputError("malformed file", f"{path}: unknown key {key!r}")
    vars_ = _split(sec["vars"])
    if not vars_ or len(set(vars_)) != len(vars_):
        raise InputError("malformed file", f"{path}: vars must be distinct names")
    ctrl_keys = sorted((int(k[8:]), k) for k in sec if k.startswith("control_"))
    if [i for i, _ in ctrl_keys] != list(range(1, len(ctrl_keys) + 1)):
        raise InputError("malformed file", f"{path}: controls must be numbered control_1..control_m")
    if not ctrl_keys:
        raise InputError("malformed file", f"{path}: at least one control_k is required")

    def field_of(key):
        comps = _split(sec[key])
        if len(comps) != len(vars_):
            raise InputError("malformed file", f"{path}: {key} has {len(comps)} components, expected {len(vars_)}")
        try:
            return VField.parse(vars_, comps)
        except ParseError as exc:
            raise InputError("malformed file", f"{path}: {key}: {exc}") from None

    drift = field_of("drift")
    controls = [field_of(k) for _, k in ctrl_keys]
    eq = None
    if "equilibrium" in sec:
        try:
            eq = tuple(Fraction(v) for v in _split(sec["equilibrium"]))
        except (ValueError, ZeroDivisionError):
            raise InputError("malformed file", f"{path}: equilibrium must be rationals") from None
    asserted = frozenset()
    if "assert_complete" in sec:
        try:
            asserted = frozenset(int(v) for v in _split(sec["assert_complete"]))
        except ValueError:
            raise InputError("malformed file", f"{path}: assert_complete must be integers") from None
    try:
        spec = SystemSpec(tuple(vars_), drift, controls, eq, asserted)
    except ValueError as exc:
        raise InputError("malformed file", f"{path}: {exc}") from None
    options = {}
    if cp.has_section("options"):
        for key, raw in cp["options"].items():
            if key not in _OPTION_TYPES:
                raise InputError("malformed file", f"{path}: unknown option {key!r}")
            try:
                options[key] = _OPTION_TYPES[key](raw)
            except ValueError:
                raise InputError("malformed file", f"{path}: option {key} = {raw!r}") from None
    return SystemFile(path, spec, options)


def load_system(path: str) -> SystemFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError("unreadable file", f"{path}: {exc.strerror}") from None
    return parse_system_text(text, path)


def format_system(S: SystemSpec) -> str:
    """Inverse of :func:`parse_system_text` for the ``[system]`` section."""
    lines = ["[system]", "vars = " + ", ".join(S.vars), "drift = " + ", ".join(map(str, S.drift.components))]
    for k, g in enumerate(S.controls, 1):
        lines.append(f"control_{k} = " + ", ".join(map(str, g.components)))
    if S.candidate_equilibrium is not None:
        lines.append("equilibrium = " + ", ".join(str(Fraction(v)) for v in S.candidate_equilibrium))
    if S.assert_complete:
        lines.append("assert_complete = " + ", ".join(str(k) for k in sorted(S.assert_complete)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# reports


def num(x) -> str:
    """Decimal string; exact rationals as ``p/q``, floats by ``repr``."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _structure_entries(S) -> dict:
    out = {}
    for i in range(S.dim):
        for j in range(i + 1, S.dim):
            for k in range(S.dim):
                if S.c[i][j][k]:
                    out[f"c^{k + 1}_{i + 1},{j + 1}"] = num(S.c[i][j][k])
    return out


@dataclass
class Report:
    command: str
    dims: dict | None = None
    ranks: dict | None = None
    structure_constants: dict | None = None
    verdict: str | None = None
    residuals: dict | None = None
    details: dict = field(default_factory=dict)
    text: str | None = None  # preformatted body (tables, CSV)
    fmt: str = "text"
    out: str | None = None

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "dims": self.dims,
            "ranks": self.ranks,
            "structure_constants": self.structure_constants,
            "verdict": self.verdict,
            "residuals": self.residuals,
            "details": self.details,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        if self.text is not None and self.command in ("simulate", "bracket", "catalog"):
            return self.text if self.text.endswith("\n") else self.text + "\n"
        buf = io.StringIO()
        d = self.as_dict()
        for key in ("command", "verdict", "dims", "ranks", "structure_constants", "residuals", "details"):
            if d[key] is not None and d[key] != {}:
                _render(buf, key, d[key], 0)
        if self.text:
            buf.write(self.text.rstrip("\n") + "\n")
        return buf.getvalue()


def _render(buf, key, value, depth):
    pad = "  " * depth
    if isinstance(value, dict) and not value:
        buf.write(f"{pad}{key}: {{}}\n")
    elif isinstance(value, dict):
        buf.write(f"{pad}{key}:\n")
        for k in sorted(value):
            _render(buf, k, value[k], depth + 1)
    elif isinstance(value, list) and value and isinstance(value[0], (list, dict)):
        buf.write(f"{pad}{key}:\n")
        for item in value:
            if isinstance(item, dict):
                buf.write(f"{pad}  -\n")
                for k in sorted(item):
                    _render(buf, k, item[k], depth + 2)
            else:
                buf.write(f"{pad}  [{', '.join(map(str, item))}]\n")
    elif isinstance(value, list):
        buf.write(f"{pad}{key}: [{', '.join(map(str, value))}]\n")
    elif value is None:
        buf.write(f"{pad}{key}: null\n")
    elif isinstance(value, bool):
        buf.write(f"{pad}{key}: {'true' if value else 'false'}\n")
    else:
        buf.write(f"{pad}{key}: {value}\n")


# ---------------------------------------------------------------------------
# commands


def _options(sf: SystemFile, args) -> ClassifyOptions:
    merged = dict(sf.options)
    for key in ("max_dim", "max_depth", "samples", "seed"):
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    opts = ClassifyOptions(**merged)
    if opts.max_dim < 1 or opts.max_depth < 1 or opts.samples < 1:
        raise InputError("invalid option", "max_dim, max_depth and samples must be positive")
    if not opts.horizon > 0:
        raise InputError("invalid option", "horizon must be positive")
    return opts


def _classification(sf: SystemFile, args, full: bool) -> tuple[Report, int]:
    r = classify_system(sf.spec, _options(sf, args))
    rep = Report(args.command, verdict=r.verdict_label)
    if r.reason == "dimension":
        raise InputError("bound violation", f"{r.advice}; raise --max-dim or --max-depth")
    rep.dims = {"n": num(r.n), "L": num(r.dim_L), "L0": num(r.dim_L0)}
    rep.ranks = {
        name: {"generic": num(g.rank), "min": num(g.min_rank), "constant": g.constant, "samples": num(len(g.ranks))}
        for name, g in (("L", r.rank_L), ("L0", r.rank_L0))
    }
    rep.structure_constants = {"L": _structure_entries(r.structure_L), "L0": _structure_entries(r.structure_L0)}
    exact = {
        "jacobi_L": r.structure_L.jacobi_defect(),
        "antisymmetry_L": r.structure_L.antisymmetry_defect(),
        "jacobi_L0": r.structure_L0.jacobi_defect(),
        "antisymmetry_L0": r.structure_L0.antisymmetry_defect(),
        "leibniz_D": r.derivation.leibniz_defect(r.structure_L0),
    }
    rep.residuals = {k: num(v) for k, v in exact.items()}
    violations = report_invariant_violations(r)
    det = {
        "algebra": r.algebra.tag,
        "drift_zero": None if r.drift_zero is None else [num(Fraction(v)) for v in r.drift_zero],
        "completeness": [
            {"field": num(k), "status": c.status.value, "reason": c.reason}
            | ({"blowup_time": num(c.blowup_time)} if c.blowup_time is not None else {})
            for k, c in enumerate(r.completeness)
        ],
    }
    if r.reason:
        det["reason"] = r.reason
    if r.advice:
        det["advice"] = r.advice
    if r.unchecked_hypotheses:
        det["unchecked_hypotheses"] = list(r.unchecked_hypotheses)
    if violations:
        det["invariant_violations"] = violations
    if full:
        det["basis_L"] = [str(X) for X in r.L]
        det["basis_L0"] = [str(X) for X in r.L0]
        det["derivation"] = [[num(r.derivation.entries[i][j]) for j in range(r.derivation.dim)]
                             for i in range(r.derivation.dim)]
    rep.details = det
    failed = violations or any(v != 0 for v in exact.values())
    return rep, EXIT_FAIL if failed else EXIT_OK


def cmd_analyze(args):
    return _classification(load_system(args.file), args, full=True)


def cmd_classify(args):
    return _classification(load_system(args.file), args, full=False)


def cmd_bracket(args):
    sf = load_system(args.file)
    fields = sf.spec.fields
    m = len(fields) - 1

    def pick(k):
        if k == -1:
            k = 0
        if not 0 <= k <= m:
            raise InputError("bad index", f"field index {k} out of range (-1 or 0 = drift, 1..{m} = controls)")
        return fields[k]

    B = lie_bracket(pick(args.i), pick(args.j))
    rep = Report("bracket", details={"i": num(args.i), "j": num(args.j), "bracket": str(B),
                                     "components": [str(c) for c in B.components]})
    rep.text = str(B)
    return rep, EXIT_OK


def _control(spec: str, m: int) -> PiecewiseControl:
    try:
        return PiecewiseControl.parse(spec, m)
    except ValueError as exc:
        raise InputError("bad control", str(exc)) from None


def _positive(name: str, v: float):
    if not (v > 0 and math.isfinite(v)):
        raise InputError("invalid option", f"{name} must be positive and finite")


def cmd_simulate(args):
    sf = load_system(args.file)
    S = sf.spec
    _positive("T", args.T)
    _positive("dt", args.dt)
    u = _control(args.control, len(S.controls))
    x0 = [0.0] * S.n
    if args.x0 is not None:
        x0 = [float(v) for v in _split(args.x0)]
        if len(x0) != S.n:
            raise InputError("bad initial state", f"x0 has {len(x0)} entries, expected {S.n}")
    try:
        times, states = simulate_control_affine(S.drift, S.controls, u, args.T, x0, args.dt)
    except IntegrationError as exc:
        rep = Report("simulate", details={"error": str(exc)})
        return rep, EXIT_FAIL
    header = ["t", *S.vars]
    rows = [[num(t), *(num(v) for v in s)] for t, s in zip(times, states)]
    rep = Report("simulate", details={"columns": header, "rows": rows, "steps": num(len(times) - 1)})
    rep.text = "\n".join(",".join(r) for r in [header, *rows]) + "\n"
    return rep, EXIT_OK


def cmd_verify_group(args):
    try:
        G = get_group(args.catalog)
    except KeyError as exc:
        raise InputError("unknown group", exc.args[0]) from None
    if args.trials < 1:
        raise InputError("invalid option", "trials must be positive")
    _positive("tol", args.tol)
    worst = verification_suite(G, args.trials, args.seed)
    residuals = {k: num(v) for k, v in worst.items()}
    ok = all(v <= args.tol for v in worst.values())
    det = {"group": G.tag, "trials": num(args.trials), "seed": num(args.seed), "tol": num(args.tol)}
    if args.trajectory:
        try:
            with open(args.trajectory, encoding="utf-8") as fh:
                header, data = read_trajectory(fh)
        except (OSError, ValueError) as exc:
            raise InputError("bad trajectory", f"{args.trajectory}: {exc}") from None
        k = G.matrix_size
        if data.shape[1] != k * k:
            raise InputError("bad trajectory", f"{data.shape[1]} columns, {G.tag} needs {k * k}")
        member = max((G.membership_residual(row.reshape(k, k)) for row in data), default=0.0)
        residuals["trajectory_membership"] = num(member)
        det["trajectory_rows"] = num(len(data))
        ok = ok and member <= args.tol
    det["pass"] = ok
    rep = Report("verify-group", residuals=residuals, verdict="pass" if ok else "fail", details=det)
    return rep, EXIT_OK if ok else EXIT_FAIL


def _is_heisenberg_example(S: SystemSpec) -> bool:
    if S.n != 2 or len(S.controls) != 1:
        return False
    ref = SystemSpec(S.vars, VField.parse(S.vars, [f"{S.vars[1]}^2", "0"]), [VField.parse(S.vars, ["0", "1"])])
    return S.drift == ref.drift and S.controls[0] == ref.controls[0]


def cmd_verify_equivalence(args):
    sf = load_system(args.file)
    if not _is_heisenberg_example(sf.spec):
        raise InputError("unsupported system",
                         "verify-equivalence needs x' = y^2, y' = u (drift y^2 d/dx, control d/dy)")
    _positive("T", args.T)
    _positive("tol", args.tol)
    _positive("dt", args.dt)
    if args.trials < 1:
        raise InputError("invalid option", "trials must be positive")
    u = _control(args.control, 1)
    demo = heisenberg_equivalence_demo(u, args.T, args.dt, args.tol)
    P = heisenberg_probe()
    rng = np.random.default_rng(args.seed)
    wd, pf = 0.0, 0.0
    for _ in range(args.trials):
        w1, w2 = manufactured_word_pair(P, rng)
        r = well_definedness_residual(P, w1, w2)
        wd = max(wd, r if r is not None else math.inf)
        k = int(rng.integers(len(P.basis)))
        w = FlowWord([(int(rng.integers(3)), float(rng.uniform(-1, 1))) for _ in range(3)])
        pf = max(pf, pushforward_residual(P, w, k))
    ok = demo.passed and demo.closed_form_deviation <= args.tol and wd <= PROBE_TOL and pf <= PROBE_TOL
    residuals = {
        "max_deviation": num(demo.max_deviation),
        "closed_form_deviation": num(demo.closed_form_deviation),
        "well_definedness": num(wd),
        "pushforward": num(pf),
    }
    every = max(1, (len(demo.times) - 1) // 10)
    idx = list(range(0, len(demo.times), every))
    if idx[-1] != len(demo.times) - 1:
        idx.append(len(demo.times) - 1)
    rows = [[num(demo.times[k]), *(num(v) for v in demo.sigma[k]), *(num(v) for v in demo.mapped[k]),
             num(demo.deviation[k])] for k in idx]
    det = {
        "control": str(u),
        "T": num(args.T),
        "dt": num(args.dt),
        "tol": num(args.tol),
        "probe_tol": num(PROBE_TOL),
        "sigma_endpoint": [num(v) for v in demo.sigma[-1]],
        "mapped_endpoint": [num(v) for v in demo.mapped[-1]],
        "table_columns": ["t", "x", "y", "2z", "x_prime", "deviation"],
        "table": rows,
        "pass": ok,
    }
    rep = Report("verify-equivalence", residuals=residuals, verdict="pass" if ok else "fail", details=det)
    return rep, EXIT_OK if ok else EXIT_FAIL


def cmd_catalog(args):
    groups = []
    for tag, G in catalog().items():
        groups.append({"tag": tag, "kind": G.kind, "dim": num(G.dim), "matrix_size": num(G.matrix_size),
                       "basis": list(G.basis_names)})
    rep = Report("catalog", details={"groups": groups})
    rep.text = "\n".join(f"{g['tag']:<12} dim {g['dim']:>2}  {g['matrix_size']}x{g['matrix_size']}  "
                         f"{g['kind']:<10} {' '.join(g['basis'])}" for g in groups)
    return rep, EXIT_OK


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        if "invalid choice" in message and "COMMAND" in message:
            raise InputError("unknown command", message.split(": ", 1)[-1])
        raise InputError("usage", message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lieequiv", description="Lie-algebraic analysis of polynomial control-affine systems.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "json"), default="text")
    fmt.add_argument("--out", help="write the report here instead of standard output")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    def bounds(sp):
        sp.add_argument("--max-dim", dest="max_dim", type=int)
        sp.add_argument("--max-depth", dest="max_depth", type=int)
        sp.add_argument("--samples", type=int)
        sp.add_argument("--seed", type=int)

    sp = sub.add_parser("analyze", parents=[fmt], help="full classification report")
    sp.add_argument("file")
    bounds(sp)
    sp = sub.add_parser("classify", parents=[fmt], help="verdict, dimensions and ranks")
    sp.add_argument("file")
    bounds(sp)
    sp = sub.add_parser("bracket", parents=[fmt], help="bracket of two system fields")
    sp.add_argument("file")
    sp.add_argument("--i", type=int, required=True, help="-1 or 0 = drift, k = control k")
    sp.add_argument("--j", type=int, required=True)
    sp = sub.add_parser("simulate", parents=[fmt], help="RK4 trajectory as CSV")
    sp.add_argument("file")
    sp.add_argument("--control", required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--x0", help="comma-separated initial state (default origin)")
    sp = sub.add_parser("verify-group", parents=[fmt], help="automorphism and exponential suites")
    sp.add_argument("catalog")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trajectory", help="exported trajectory whose rows must lie in the group")
    sp = sub.add_parser("verify-equivalence", parents=[fmt], help="Heisenberg equivalence demonstration")
    sp.add_argument("file")
    sp.add_argument("--control", required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--trials", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sub.add_parser("catalog", parents=[fmt], help="list group models")
    return p


COMMANDS = {
    "analyze": cmd_analyze,
    "classify": cmd_classify,
    "bracket": cmd_bracket,
    "simulate": cmd_simulate,
    "verify-group": cmd_verify_group,
    "verify-equivalence": cmd_verify_equivalence,
    "catalog": cmd_catalog,
}


def run(argv: Sequence[str]) -> tuple[int, Report | None, str]:
    """Run one command; returns ``(exit_code, report, error_message)``."""
    try:
        args = build_parser().parse_args(list(argv))
        if args.command is None:
            raise InputError("usage", "no command given")
        report, code = COMMANDS[args.command](args)
    except InputError as exc:
        return EXIT_INPUT, None, str(exc)
    report.fmt, report.out = args.format, args.out
    return code, report, ""


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, report, err = run(argv)
    if report is None:
        print(f"lieequiv: {err}", file=sys.stderr)
        return code
    out = report.to_json() if report.fmt == "json" else report.to_text()
    if report.out:
        try:
            with open(report.out, "w", encoding="utf-8") as fh:
                fh.write(out)
        except OSError as exc:
            print(f"lieequiv: cannot write {report.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(out)
    return code
