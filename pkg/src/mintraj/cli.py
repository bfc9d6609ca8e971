"""Command-line front end: ``mintraj {classify,plan,sample,verify,batch}``.

Input is a YAML (or JSON) document::

    schema_version: 1
    scenarios:
      - name: merge
        v0: 0
        T: 3
        pT: 2.7
        u_min: -2
        u_max: 2
        v_min: 0
        v_max: 1

``t0`` and ``p0`` default to 0 and ``name`` to ``scenario-<k>``; the four
limits are required.  Structured output is JSON with every float written to
17 significant digits, so identical inputs give byte-identical outputs.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import yaml

from . import classifier as clf
from . import oracle, trajectory
from .core import Scenario, make_scenario, normalize
from .errors import InfeasibleProblem, ScenarioError
from .planner import TrajectoryPlan, denormalize, plan as plan_canonical

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_INFEASIBLE = 3
EXIT_VERIFY = 4

REQUIRED = ("v0", "T", "pT", "u_min", "u_max", "v_min", "v_max")
OPTIONAL = {"t0": 0.0, "p0": 0.0}


class SchemaError(Exception):
    def __init__(self, line: int | None, message: str):
        super().__init__(message)
        self.line = line

    def render(self, path: str) -> str:
        where = f"{path}:{self.line}" if self.line is not None else path
        return f"{where}: {self}"


@dataclass(frozen=True)
class Entry:
    name: str
    line: int
    scenario: Scenario


# --------------------------------------------------------------------------
# input
# --------------------------------------------------------------------------


def _line(node) -> int:
    return node.start_mark.line + 1


def _mapping(node, what: str) -> dict:
    if not isinstance(node, yaml.MappingNode):
        raise SchemaError(_line(node), f"{what} must be a mapping")
    out = {}
    for key_node, value_node in node.value:
        if not isinstance(key_node, yaml.ScalarNode):
            raise SchemaError(_line(key_node), f"{what}: keys must be plain names")
        key = key_node.value
        if key in out:
            raise SchemaError(_line(key_node), f"{what}: duplicate field '{key}'")
        out[key] = value_node
    return out


def _number(node, field: str, what: str) -> float:
    line = _line(node)
    if not isinstance(node, yaml.ScalarNode):
        raise SchemaError(line, f"{what}: field '{field}' must be a number")
    if node.style in ("'", '"'):
        raise SchemaError(line, f"{what}: field '{field}' must be a number, got string {node.value!r}")
    text = node.value.strip()
    if text in ("", "~", "null", "Null", "NULL"):
        raise SchemaError(line, f"{what}: field '{field}' has no value")
    if text.lower().lstrip("+-") in (".inf", ".nan"):
        # YAML spellings of non-finite floats
        raise SchemaError(line, f"{what}: field '{field}' must be finite, got {text!r}")
    try:
        value = float(text)
    except ValueError:
        raise SchemaError(line, f"{what}: field '{field}' is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise SchemaError(line, f"{what}: field '{field}' must be finite, got {text!r}")
    return value


def parse_scenarios(text: str) -> list[Entry]:
    """Parse and validate a scenario document; raises :class:`SchemaError`."""
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark is not None else None
        raise SchemaError(line, f"not valid YAML/JSON: {exc.problem}") from None
    if root is None:
        raise SchemaError(1, "empty document")
    top = _mapping(root, "document")
    unknown = sorted(set(top) - {"schema_version", "scenarios"})
    if unknown:
        raise SchemaError(_line(top[unknown[0]]), f"unknown top-level field '{unknown[0]}'")
    if "schema_version" not in top:
        raise SchemaError(_line(root), "missing 'schema_version'")
    version_node = top["schema_version"]
    if not (isinstance(version_node, yaml.ScalarNode) and version_node.value.strip() == str(SCHEMA_VERSION)):
        raise SchemaError(
            _line(version_node),
            f"unsupported schema_version {getattr(version_node, 'value', '?')!r}; expected {SCHEMA_VERSION}",
        )
    if "scenarios" not in top:
        raise SchemaError(_line(root), "missing 'scenarios'")
    seq = top["scenarios"]
    if isinstance(seq, yaml.ScalarNode) and seq.value.strip() in ("", "~", "null"):
        return []
    if not isinstance(seq, yaml.SequenceNode):
        raise SchemaError(_line(seq), "'scenarios' must be a list")

    entries = []
    for k, node in enumerate(seq.value, start=1):
        what = f"scenario {k}"
        fields = _mapping(node, what)
        name = f"scenario-{k}"
        if "name" in fields:
            name_node = fields.pop("name")
            if not isinstance(name_node, yaml.ScalarNode) or not name_node.value:
                raise SchemaError(_line(name_node), f"{what}: 'name' must be a non-empty string")
            name = name_node.value
            what = f"scenario {k} ({name})"
        extra = sorted(set(fields) - set(REQUIRED) - set(OPTIONAL))
        if extra:
            raise SchemaError(_line(fields[extra[0]]), f"{what}: unknown field '{extra[0]}'")
        # malformed values are reported before missing ones, in file order
        values = {f: _number(n, f, what) for f, n in fields.items()}
        missing = [f for f in REQUIRED if f not in values]
        if missing:
            raise SchemaError(_line(node), f"{what}: missing required field '{missing[0]}'")
        for f, default in OPTIONAL.items():
            values.setdefault(f, default)
        try:
            scenario = make_scenario(**values)
        except ScenarioError as exc:
            raise SchemaError(_line(node), f"{what}: {exc}") from None
        entries.append(Entry(name, _line(node), scenario))
    return entries


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def fmt_float(x) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero
    return format(x, ".17g")


def _scalar_json(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return "null" if not math.isfinite(x) else fmt_float(x)
    return json.dumps(str(x))


def to_json(obj, indent: int = 0) -> str:
    """Deterministic JSON; lists of scalars stay on one line."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_scalar_json(v) for v in obj) + "]"
        items = [pad + to_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _scalar_json(obj)


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "" if not math.isfinite(x) else fmt_float(x)
    return str(x)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


# --------------------------------------------------------------------------
# per-scenario work
# --------------------------------------------------------------------------


@dataclass
class Outcome:
    record: dict
    infeasible: str | None = None
    failed: bool = False


def _infeasible(entry: Entry, exc: InfeasibleProblem, frame) -> Outcome:
    record = {
        "name": entry.name,
        "status": "infeasible",
        "feasible": False,
        "mirrored": frame.mirrored,
        "L": exc.L,
        "L_max": exc.L_max,
        "message": str(exc),
    }
    msg = f"scenario '{entry.name}' (line {entry.line}): infeasible, {exc}"
    return Outcome(record, infeasible=msg)


def _limits(s: Scenario) -> dict:
    lim = s.limits
    return {"u_min": lim.u_min, "u_max": lim.u_max, "v_min": lim.v_min, "v_max": lim.v_max}


def _classify_record(entry: Entry) -> Outcome:
    problem, frame = normalize(entry.scenario)
    th = clf.thresholds(problem)
    try:
        profile = clf.classify(problem)
    except InfeasibleProblem as exc:
        out = _infeasible(entry, exc, frame)
        out.record.update(t_state=th.t_state, t_control=th.t_control)
        return out
    return Outcome({
        "name": entry.name,
        "status": "ok",
        "feasible": True,
        "profile": str(profile),
        "mirrored": frame.mirrored,
        "horizon": problem.T,
        "L": problem.L,
        "L_max": clf.feasibility_check(problem),
        "t_state": th.t_state,
        "t_control": th.t_control,
    })


def _active_limit(arc, mirrored: bool) -> str | None:
    kind = str(arc.kind)
    if kind == "Bang":
        return "u_min" if mirrored else "u_max"
    if kind == "Coast":
        return "v_min" if mirrored else "v_max"
    return None


def _arc_record(arc, mirrored: bool) -> dict:
    rec = {
        "kind": str(arc.kind),
        "t_start": arc.t_start,
        "t_end": arc.t_end,
        "slope": arc.slope,
        "intercept": arc.intercept,
        "v_entry": arc.v_entry,
        "p_entry": arc.p_entry,
    }
    limit = _active_limit(arc, mirrored)
    if limit is not None:
        rec["active_limit"] = limit
    return rec


def _plan_fields(p: TrajectoryPlan, scenario: Scenario) -> dict:
    rec = {"profile": str(p.profile), "mirrored": p.mirrored, "energy": p.energy}
    if p.tau_c is not None:
        rec["tau_c"] = p.tau_c
    if p.tau_s is not None:
        rec["tau_s"] = p.tau_s
    rec["limits"] = _limits(scenario)
    rec["arcs"] = [_arc_record(a, p.mirrored) for a in p.arcs]
    return rec


def _planned(entry: Entry):
    """``(plan in user frame, canonical plan, problem, frame)`` or raises."""
    problem, frame = normalize(entry.scenario)
    canon = plan_canonical(problem)
    return denormalize(canon, frame), canon, problem, frame


def _plan_record(entry: Entry) -> Outcome:
    try:
        p, _, _, _ = _planned(entry)
    except InfeasibleProblem as exc:
        return _infeasible(entry, exc, normalize(entry.scenario)[1])
    return Outcome({"name": entry.name, "status": "ok", **_plan_fields(p, entry.scenario)})


def _sample_record(entry: Entry, n: int) -> Outcome:
    try:
        p, _, _, _ = _planned(entry)
    except InfeasibleProblem as exc:
        return _infeasible(entry, exc, normalize(entry.scenario)[1])
    rows = [[pt.t, pt.u, pt.v, pt.p] for pt in trajectory.sample(p, n)]
    return Outcome({
        "name": entry.name,
        "status": "ok",
        "profile": str(p.profile),
        "columns": ["t", "u", "v", "p"],
        "rows": rows,
    })


def _batch_record(entry: Entry, n: int | None) -> Outcome:
    out = _classify_record(entry)
    if out.infeasible:
        return out
    p, _, _, _ = _planned(entry)
    rec = dict(out.record)
    rec.update(_plan_fields(p, entry.scenario))
    if n is not None:
        rec["samples"] = {
            "columns": ["t", "u", "v", "p"],
            "rows": [[pt.t, pt.u, pt.v, pt.p] for pt in trajectory.sample(p, n)],
        }
    return Outcome(rec)


def energy_tolerance(reference: float) -> float:
    """Allowed oracle-vs-planner energy gap: 1e-3 absolute or 0.5% relative."""
    return max(1e-3, 5e-3 * abs(reference))


def _perturbed(p: TrajectoryPlan, delta: float) -> TrajectoryPlan:
    arcs = tuple(replace(a, intercept=a.intercept + delta) for a in p.arcs)
    return replace(p, arcs=arcs, energy=math.fsum(a.energy() for a in arcs))


def _verify_record(entry: Entry, qp_grid: int, search_grid: int, tol: float,
                   perturb: float) -> Outcome:
    _, canon, problem, frame = _planned(entry)
    if perturb:
        canon = _perturbed(canon, perturb)
    user_plan = denormalize(canon, frame)
    failures = []

    diag = trajectory.validate(user_plan, entry.scenario, tol=tol)
    if not diag.ok:
        failures.append("plan violates limits or boundary conditions")

    e_tol = energy_tolerance(canon.energy)
    sol = oracle.solve_qp(problem, N=qp_grid, tol=tol)
    cmp = oracle.compare(canon, sol)
    if sol.status is not oracle.OracleStatus.OPTIMAL:
        failures.append(f"QP oracle status {sol.status}")
    elif not abs(cmp.energy_gap) <= e_tol:
        failures.append("QP energy gap exceeds tolerance")

    grid_rec = {"resolution": search_grid}
    try:
        g = oracle.grid_search_switch(problem, search_grid)
    except oracle.NoFeasibleCandidate:
        failures.append("grid search found no feasible candidate")
    else:
        shift = frame.time_shift

        def gap(a, b):
            return None if a is None or b is None else abs(a - b)

        tc_gap = gap(g.tau_c, canon.tau_c)
        ts_gap = gap(g.tau_s, canon.tau_s)
        grid_rec.update(
            profile=g.profile,
            tau_c=None if g.tau_c is None else g.tau_c + shift,
            tau_s=None if g.tau_s is None else g.tau_s + shift,
            energy=g.energy,
            energy_gap=g.energy - canon.energy,
            cell=g.cell,
            tau_c_gap=tc_gap,
            tau_s_gap=ts_gap,
        )
        slack = 1e-9 * max(1.0, problem.T)
        if g.profile != str(canon.profile):
            failures.append(f"grid search prefers {g.profile}")
        if any(x is not None and x > g.cell + slack for x in (tc_gap, ts_gap)):
            failures.append("switching time off by more than one grid cell")
        if not (-1e-6 <= g.energy - canon.energy <= e_tol):
            failures.append("grid-search energy gap exceeds tolerance")

    record = {
        "name": entry.name,
        "status": "ok" if not failures else "failed",
        "profile": str(canon.profile),
        "mirrored": frame.mirrored,
        "energy": canon.energy,
        "energy_tolerance": e_tol,
        "qp": {
            "N": qp_grid,
            "status": str(sol.status),
            "energy": sol.energy,
            "energy_gap": cmp.energy_gap,
            "control_gap": cmp.control_gap,
            "state_gap": cmp.state_gap,
        },
        "grid": grid_rec,
        "violations": {
            "control": diag.max_control_violation,
            "speed": diag.max_speed_violation,
            "terminal_position": diag.terminal_position_error,
            "junction": diag.junction_discontinuity,
            "terminal_control": diag.terminal_control,
        },
        "passed": not failures,
        "failures": failures,
    }
    return Outcome(record, failed=bool(failures))


# --------------------------------------------------------------------------
# tabular renderings
# --------------------------------------------------------------------------


def _classify_table(records) -> str:
    header = ["name", "feasible", "profile", "mirrored", "t_state", "t_control", "L", "L_max"]
    rows = [[r["name"], r["feasible"], r.get("profile"), r["mirrored"], r.get("t_state"),
             r.get("t_control"), r["L"], r["L_max"]] for r in records]
    return to_csv(header, rows)


def _plan_table(records) -> str:
    header = ["name", "profile", "energy", "tau_c", "tau_s", "arc", "kind", "t_start",
              "t_end", "slope", "intercept", "v_entry", "p_entry"]
    rows = []
    for r in records:
        if r["status"] != "ok":
            rows.append([r["name"], "infeasible"] + [None] * (len(header) - 2))
            continue
        for k, a in enumerate(r["arcs"]):
            rows.append([r["name"], r["profile"], r["energy"], r.get("tau_c"), r.get("tau_s"), k,
                         a["kind"], a["t_start"], a["t_end"], a["slope"], a["intercept"],
                         a["v_entry"], a["p_entry"]])
    return to_csv(header, rows)


def _sample_tables(records) -> str:
    blocks = []
    for r in records:
        if r["status"] != "ok":
            blocks.append(f"# scenario: {r['name']} (infeasible)\n")
            continue
        blocks.append(f"# scenario: {r['name']}\n" + to_csv(r["columns"], r["rows"]))
    return "\n".join(blocks)


def _verify_table(records) -> str:
    header = ["name", "profile", "energy", "qp_energy_gap", "grid_profile", "grid_energy_gap",
              "tau_c_gap", "tau_s_gap", "max_violation", "passed"]
    rows = []
    for r in records:
        v = r["violations"]
        g = r["grid"]
        rows.append([r["name"], r["profile"], r["energy"], r["qp"]["energy_gap"],
                     g.get("profile"), g.get("energy_gap"), g.get("tau_c_gap"),
                     g.get("tau_s_gap"), max(v["control"], v["speed"]), r["passed"]])
    return to_csv(header, rows)


# --------------------------------------------------------------------------
# driver
# --------------------------------------------------------------------------


def _run_all(fn, entries, workers: int | None = None) -> list[Outcome]:
    # results come back in input order whatever the completion order
    if len(entries) <= 1:
        return [fn(e) for e in entries]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, entries))


def _document(command: str, records) -> str:
    return to_json({"schema_version": SCHEMA_VERSION, "command": command,
                    "scenarios": records}) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mintraj",
        description="Energy-optimal double-integrator trajectories under speed "
                    "and acceleration limits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "classify": "report the active-constraint profile of each scenario",
        "plan": "emit the closed-form arcs, switching times and energy",
        "sample": "emit t,u,v,p tables including junction rows",
        "verify": "cross-check each plan against both numerical oracles",
        "batch": "classify and plan every scenario in one report",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--input", required=True, metavar="PATH", help="scenario file (YAML or JSON)")
        p.add_argument("--output", metavar="PATH", help="write here instead of standard output")
        p.add_argument("--format", choices=("structured", "tabular"), default=None,
                       help="JSON report or CSV tables (sample defaults to tabular)")
        p.add_argument("--samples", type=int, default=None, metavar="N",
                       help="uniform samples per scenario (sample: default 101)")
        p.add_argument("--qp-grid", type=int, default=2000, metavar="N",
                       help="intervals of the direct-transcription oracle")
        p.add_argument("--search-grid", type=int, default=2000, metavar="N",
                       help="resolution of the switching-time grid search")
        p.add_argument("--tolerance", type=float, default=1e-6,
                       help="constraint and solver tolerance for verify")
        p.add_argument("--jobs", type=int, default=None, metavar="K",
                       help="worker threads (default: executor's choice)")
        if name == "verify":
            p.add_argument("--debug-perturb-control", type=float, default=0.0, metavar="DU",
                           help="debugging aid: add DU to every arc's control before checking")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.samples is not None and args.samples < 2:
        parser.error("--samples must be at least 2")
    if args.qp_grid < 10:
        parser.error("--qp-grid must be at least 10")
    if args.search_grid < 100:
        parser.error("--search-grid must be at least 100")
    if not args.tolerance > 0.0:
        parser.error("--tolerance must be positive")

    try:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"mintraj: cannot read {args.input}: {exc.strerror}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        entries = parse_scenarios(text)
    except SchemaError as exc:
        print(f"mintraj: schema error: {exc.render(args.input)}", file=sys.stderr)
        return EXIT_SCHEMA

    cmd = args.command
    fmt = args.format or ("tabular" if cmd == "sample" else "structured")
    jobs = args.jobs

    if cmd == "verify":
        # feasibility is settled for every scenario before any oracle runs
        checked = _run_all(_classify_record, entries, jobs)
        bad = [o.infeasible for o in checked if o.infeasible]
        if bad:
            for msg in bad:
                print(f"mintraj: {msg}", file=sys.stderr)
            return EXIT_INFEASIBLE
        outcomes = _run_all(
            lambda e: _verify_record(e, args.qp_grid, args.search_grid, args.tolerance,
                                     args.debug_perturb_control),
            entries, jobs)
    elif cmd == "classify":
        outcomes = _run_all(_classify_record, entries, jobs)
    elif cmd == "plan":
        outcomes = _run_all(_plan_record, entries, jobs)
    elif cmd == "sample":
        n = 101 if args.samples is None else args.samples
        outcomes = _run_all(lambda e: _sample_record(e, n), entries, jobs)
    else:
        outcomes = _run_all(lambda e: _batch_record(e, args.samples), entries, jobs)

    records = [o.record for o in outcomes]
    if fmt == "structured":
        body = _document(cmd, records)
    elif cmd == "classify":
        body = _classify_table(records)
    elif cmd == "sample":
        body = _sample_tables(records)
    elif cmd == "verify":
        body = _verify_table(records)
    else:
        body = _plan_table(records)

    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)

    for o in outcomes:
        if o.infeasible:
            print(f"mintraj: {o.infeasible}", file=sys.stderr)
    if any(o.infeasible for o in outcomes):
        return EXIT_INFEASIBLE
    if any(o.failed for o in outcomes):
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
