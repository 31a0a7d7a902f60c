"""Scenario files: declarative JSON checklists over one structure.

A scenario names a structure on a box, a dictionary of scalar functions,
local maps, chart and family declarations, and an ordered list of tasks.
Each task is one check; a task may declare ``"expect": "fail"`` when the
failure itself is the point (obstructed integrability, a non-factoring
function, a family that is not closed).

Reports are emitted either as canonical JSON (stable ordering, 17-digit
floats, no timing) so that repeated runs are byte-identical, or as a human
text summary that includes the wall-clock time.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

from . import defaults
from .charts import build_spencer_chart, cocycle_check, factorize, transition_map
from .crsolve import (cr_equations_check, estimate_spencer_type,
                      solve_ah_polynomials)
from .errors import (ChartError, CompositionError, ConfigurationError,
                     DegenerateStructureError, DomainError, FitError,
                     IndependenceError, InversionError, OverlapError,
                     ScenarioError)
from .jfield import (ACStructure, Box, SampleGrid, check_acs,
                     integrability_report, split_type, standard_structure)
from .poly import Polynomial, fmt_float, parse_polynomial
from .pseudogroup import (GlueTest, LocalMap, OverDiagram, check_ah_map,
                          check_over_diagram, generate, validate_axioms)
from .report import Report, make_report

CHECK_FAILURES = (ChartError, IndependenceError, FitError, OverlapError,
                  CompositionError, InversionError, DomainError,
                  DegenerateStructureError)


@dataclass
class ChartSpec:
    label: str
    function_names: tuple
    box: object  # Box or None for the structure box


@dataclass
class FamilySpec:
    label: str
    member_names: tuple
    depth: int
    dedup_tol: object  # float or None
    restriction_targets: tuple
    glue_tests: tuple


@dataclass
class Scenario:
    name: str
    n: int
    box: Box
    structure: ACStructure
    functions: dict
    maps: dict
    chart_specs: dict
    family_specs: dict
    tasks: list
    tolerances: dict


@dataclass
class RunResult:
    scenario: str
    version: str
    reports: list
    overall: str
    duration: float = 0.0


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _require(data, key, where):
    if key not in data:
        raise ScenarioError(f"{where}: missing required key {key!r}")
    return data[key]


def _parse_box(data, where, dim=None):
    if not isinstance(data, dict) or "lo" not in data or "hi" not in data:
        raise ScenarioError(f'{where}: a box needs "lo" and "hi" lists')
    try:
        box = Box(tuple(data["lo"]), tuple(data["hi"]))
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: bad box: {exc}") from exc
    if dim is not None and box.dim != dim:
        raise ScenarioError(f"{where}: box dimension {box.dim}, expected {dim}")
    return box


def _parse_structure(data, n, box, where):
    size = 2 * n
    rows = _require(data, "J", where)
    if len(rows) != size or any(len(r) != size for r in rows):
        raise ScenarioError(f"{where}: J must be a {size}x{size} string matrix")
    matrix = []
    for i, row in enumerate(rows):
        parsed = []
        for j, text in enumerate(row):
            try:
                parsed.append(parse_polynomial(text, size,
                                               max_degree=defaults.DEGREE_CAP))
            except ScenarioError as exc:
                raise ScenarioError(f"{where}: J[{i}][{j}]: {exc}") from exc
        matrix.append(parsed)
    return ACStructure(n, box, matrix)


def _parse_map(name, data, dim, ambient, where):
    components = _require(data, "components", where)
    if len(components) != dim:
        raise ScenarioError(f"{where}: needs {dim} components")
    polys = []
    for k, text in enumerate(components):
        try:
            p = parse_polynomial(text, dim, max_degree=defaults.DEGREE_CAP)
        except ScenarioError as exc:
            raise ScenarioError(f"{where}: component {k}: {exc}") from exc
        if not p.is_real():
            raise ScenarioError(f"{where}: component {k} has complex coefficients")
        polys.append(p)
    domain = (_parse_box(data["domain"], f"{where}: domain", dim)
              if "domain" in data else ambient)
    return LocalMap.from_polynomials(polys, domain, name)


def parse_scenario(data):
    """Validate a scenario dictionary and resolve it into toolkit objects."""
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    name = str(_require(data, "name", "scenario"))
    try:
        n = int(_require(data, "n", "scenario"))
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f'scenario: "n" must be an integer: {exc}') from exc
    box = _parse_box(_require(data, "box", "scenario"), "scenario box", 2 * n)
    if "J" in data:
        structure = _parse_structure(data, n, box, f"scenario {name}")
    else:
        structure = standard_structure(n, box)

    functions = {}
    for fname, text in (data.get("functions") or {}).items():
        try:
            functions[str(fname)] = parse_polynomial(
                text, 2 * n, max_degree=defaults.DEGREE_CAP)
        except ScenarioError as exc:
            raise ScenarioError(f"function {fname!r}: {exc}") from exc

    maps = {}
    for mname, mdata in (data.get("maps") or {}).items():
        mname = str(mname)
        where = f"map {mname!r}"
        m = _parse_map(mname, mdata, 2 * n, box, where)
        if "inverse" in mdata:
            inv = _parse_map(f"{mname}_inv", mdata["inverse"], 2 * n, box,
                             f"{where} inverse")
            m.declared_inverse = inv
            inv.declared_inverse = m
            maps[inv.label] = inv
        maps[mname] = m

    chart_specs = {}
    for cname, cdata in (data.get("charts") or {}).items():
        cname = str(cname)
        fnames = tuple(_require(cdata, "functions", f"chart {cname!r}"))
        for fn in fnames:
            if fn not in functions:
                raise ScenarioError(f"chart {cname!r} references unknown function {fn!r}")
        cbox = (_parse_box(cdata["box"], f"chart {cname!r} box", 2 * n)
                if "box" in cdata else None)
        chart_specs[cname] = ChartSpec(cname, fnames, cbox)

    family_specs = {}
    for gname, gdata in (data.get("families") or {}).items():
        gname = str(gname)
        where = f"family {gname!r}"
        member_names = tuple(_require(gdata, "members", where))
        for mn in member_names:
            if mn not in maps:
                raise ScenarioError(f"{where} references unknown map {mn!r}")
        depth = int(gdata.get("depth", 2))
        if depth < 0:
            raise ScenarioError(f"{where}: depth must be nonnegative")
        dedup_tol = gdata.get("dedup_tol")
        targets = tuple(_parse_box(b, f"{where} restriction target", 2 * n)
                        for b in gdata.get("restriction_targets", ()))
        glue_tests = []
        for t, gt in enumerate(gdata.get("glue_tests", ())):
            labels = tuple(_require(gt, "members", f"{where} glue test {t}"))
            for lbl in labels:
                if lbl not in member_names:
                    raise ScenarioError(
                        f"{where} glue test {t} references non-member {lbl!r}")
            boxes = tuple(_parse_box(b, f"{where} glue test {t} box", 2 * n)
                          for b in _require(gt, "boxes", f"{where} glue test {t}"))
            if len(boxes) != len(labels):
                raise ScenarioError(
                    f"{where} glue test {t}: one box per member is required")
            target = _parse_box(_require(gt, "target", f"{where} glue test {t}"),
                                f"{where} glue test {t} target", 2 * n)
            glue_tests.append(GlueTest(labels, boxes, target))
        family_specs[gname] = FamilySpec(gname, member_names, depth, dedup_tol,
                                         targets, tuple(glue_tests))

    tolerances = dict(defaults.DEFAULT_TOLERANCES)
    for tname, tval in (data.get("tolerances") or {}).items():
        if tname not in tolerances:
            raise ScenarioError(f"unknown tolerance {tname!r}")
        tval = float(tval)
        if tval <= 0:
            raise ScenarioError(f"tolerance {tname!r} must be positive")
        tolerances[tname] = tval

    tasks = []
    for i, spec in enumerate(data.get("tasks") or ()):
        where = f"task {i}"
        kind = _require(spec, "task", where)
        if kind not in TASK_RUNNERS:
            raise ScenarioError(f"{where}: unknown task {kind!r}")
        expect = spec.get("expect", "pass")
        if expect not in ("pass", "fail"):
            raise ScenarioError(f'{where}: expect must be "pass" or "fail"')
        _validate_task_refs(kind, spec, functions, maps, chart_specs,
                            family_specs, where)
        tasks.append(dict(spec))
    if not tasks:
        raise ScenarioError("scenario declares no tasks")

    return Scenario(name=name, n=n, box=box, structure=structure,
                    functions=functions, maps=maps, chart_specs=chart_specs,
                    family_specs=family_specs, tasks=tasks,
                    tolerances=tolerances)


def load_scenario(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario file is not valid JSON: {exc}") from exc
    return parse_scenario(data)


def _validate_task_refs(kind, spec, functions, maps, chart_specs,
                        family_specs, where):
    def need_function(key):
        fn = _require(spec, key, where)
        if fn not in functions:
            raise ScenarioError(f"{where}: unknown function {fn!r}")

    def need_chart(label):
        if label not in chart_specs:
            raise ScenarioError(f"{where}: unknown chart {label!r}")

    if kind == "cr_check":
        need_function("function")
    elif kind == "chart":
        need_chart(_require(spec, "chart", where))
    elif kind == "factorize":
        need_chart(_require(spec, "chart", where))
        need_function("function")
    elif kind == "transition":
        labels = _require(spec, "charts", where)
        if len(labels) != 2:
            raise ScenarioError(f"{where}: transition takes two charts")
        for lbl in labels:
            need_chart(lbl)
    elif kind == "cocycle":
        labels = _require(spec, "charts", where)
        if len(labels) != 3:
            raise ScenarioError(f"{where}: cocycle takes three charts")
        for lbl in labels:
            need_chart(lbl)
    elif kind == "axioms":
        fam = _require(spec, "family", where)
        if fam not in family_specs:
            raise ScenarioError(f"{where}: unknown family {fam!r}")
    elif kind == "ah_map":
        if "family" in spec:
            if spec["family"] not in family_specs:
                raise ScenarioError(f"{where}: unknown family {spec['family']!r}")
        elif "map" in spec:
            if spec["map"] not in maps:
                raise ScenarioError(f"{where}: unknown map {spec['map']!r}")
        else:
            raise ScenarioError(f'{where}: ah_map needs "map" or "family"')
    elif kind == "over_diagram":
        for key in ("phi", "f_src", "f_dst", "psi"):
            mn = _require(spec, key, where)
            if mn not in maps:
                raise ScenarioError(f"{where}: unknown map {mn!r}")


# ---------------------------------------------------------------------------
# task runners
# ---------------------------------------------------------------------------

def _grid_of(scenario, spec, default_k=defaults.GRID_PER_AXIS):
    k = int(spec.get("grid", default_k))
    return SampleGrid(scenario.structure.box, k)


def _build_chart(scenario, label, tols, grid_override=None):
    spec = scenario.chart_specs[label]
    fields = [scenario.functions[fn] for fn in spec.function_names]
    grid_k = grid_override if grid_override else defaults.GRID_PER_AXIS
    return build_spencer_chart(
        scenario.structure, fields, box=spec.box, grid_k=grid_k,
        tol_cr=tols["tol_cr"], tol_det=tols["tol_det"],
        svd_rel_tol=tols["svd_rel_tol"], label=label)


def _build_family(scenario, label):
    spec = scenario.family_specs[label]
    seeds = [scenario.maps[mn] for mn in spec.member_names]
    family = generate(seeds, scenario.box, depth=spec.depth,
                      dedup_tol=spec.dedup_tol,
                      restriction_targets=spec.restriction_targets)
    return family, spec


def _run_check_acs(scenario, spec, tols):
    return check_acs(scenario.structure, grid=_grid_of(scenario, spec),
                     tol=tols["tol_acs"])


def _run_split_type(scenario, spec, tols):
    grid = _grid_of(scenario, spec)
    result = split_type(scenario.structure, grid.points,
                        svd_rel_tol=tols["svd_rel_tol"])
    return make_report(
        task="split_type",
        metrics={"eigen_residual": result.eigen_residual,
                 "dim_plus": float(result.dims[0]),
                 "dim_minus": float(result.dims[1])},
        tolerances={"eigen_residual": tols["tol_eigen"]},
    )


def _run_integrability(scenario, spec, tols):
    return integrability_report(scenario.structure,
                                grid=_grid_of(scenario, spec),
                                tol=tols["tol_integrability"])


def _run_cr_check(scenario, spec, tols):
    field = scenario.functions[spec["function"]]
    return cr_equations_check(scenario.structure, field,
                              grid=_grid_of(scenario, spec),
                              tol=tols["tol_cr"])


def _run_solve_ah(scenario, spec, tols):
    degree = int(spec.get("degree", 2))
    grid_k = int(spec["grid"]) if "grid" in spec else None
    solution = solve_ah_polynomials(scenario.structure, degree, grid_k=grid_k,
                                    svd_rel_tol=tols["svd_rel_tol"])
    sigma_max = float(solution.singular_values[0])
    bound = 10.0 * tols["svd_rel_tol"] * max(sigma_max, 1.0)
    metrics = {"nullity": float(solution.nullity),
               "solver_residual": solution.residual,
               "sigma_max": sigma_max}
    extra = True
    notes = []
    if "expect_dim" in spec:
        expected = int(spec["expect_dim"])
        extra = solution.nullity == expected
        notes.append(f"expected solution dimension {expected}, "
                     f"found {solution.nullity}")
    return make_report(task="solve_ah", metrics=metrics,
                       tolerances={"solver_residual": bound},
                       notes=notes, extra_pass=extra)


def _run_spencer_type(scenario, spec, tols):
    degree = int(spec.get("degree", 2))
    grid_k = int(spec["grid"]) if "grid" in spec else None
    estimate = estimate_spencer_type(scenario.structure, degree=degree,
                                     grid_k=grid_k,
                                     svd_rel_tol=tols["svd_rel_tol"])
    expected = int(spec.get("expect_m", scenario.n))
    return make_report(
        task="spencer_type",
        metrics={"m": float(estimate.m),
                 "rank_evidence": float(estimate.rank_evidence)},
        tolerances={},
        notes=list(estimate.notes) + [f"expected type {expected}"],
        extra_pass=estimate.m == expected,
    )


def _run_chart(scenario, spec, tols):
    chart = _build_chart(scenario, spec["chart"], tols,
                         grid_override=spec.get("grid"))
    return make_report(
        task="chart",
        metrics={"certificate": chart.certificate, "m": float(chart.m)},
        tolerances={"certificate": tols["tol_det"]},
        comparisons={"certificate": "ge"},
        notes=[f"passive pairs {list(chart.passive_pairs)}"],
    )


def _run_factorize(scenario, spec, tols):
    chart = _build_chart(scenario, spec["chart"], tols)
    h = scenario.functions[spec["function"]]
    result = factorize(chart, h, grid_k=spec.get("grid"),
                       fit_degree=int(spec.get("fit_degree", defaults.FIT_DEGREE)))
    return make_report(
        task="factorize",
        metrics={"fit_residual": result.fit_residual,
                 "fiber_variance": result.fiber_variance,
                 "cond": result.cond},
        tolerances={"fit_residual": tols["tol_fit"],
                    "fiber_variance": tols["tol_fit"]},
    )


def _run_transition(scenario, spec, tols):
    label_a, label_b = spec["charts"]
    chart_a = _build_chart(scenario, label_a, tols)
    chart_b = _build_chart(scenario, label_b, tols)
    result = transition_map(chart_a, chart_b, grid_k=spec.get("grid"),
                            fit_degree=int(spec.get("fit_degree",
                                                    defaults.FIT_DEGREE)))
    return make_report(
        task="transition",
        metrics={"fit_residual": result.fit_residual,
                 "holo_residual": result.holo_residual,
                 "jacobian_min_det": result.jacobian_min_det,
                 "cond": result.cond},
        tolerances={"fit_residual": tols["tol_fit"],
                    "holo_residual": tols["tol_holo"],
                    "jacobian_min_det": tols["tol_det"]},
        comparisons={"jacobian_min_det": "ge"},
        notes=[f"{label_a} to {label_b} on overlap"],
    )


def _run_cocycle(scenario, spec, tols):
    labels = spec["charts"]
    charts = [_build_chart(scenario, lbl, tols) for lbl in labels]
    result = cocycle_check(*charts, grid_k=spec.get("grid"),
                           fit_degree=int(spec.get("fit_degree",
                                                   defaults.FIT_DEGREE)))
    worst_holo = max(result.ab.holo_residual, result.bc.holo_residual,
                     result.ac.holo_residual)
    return make_report(
        task="cocycle",
        metrics={"cocycle_defect": result.defect,
                 "holo_residual": worst_holo},
        tolerances={"cocycle_defect": tols["tol_cocycle"]},
        notes=[f"charts {labels[0]}, {labels[1]}, {labels[2]}"],
    )


def _run_axioms(scenario, spec, tols):
    family, fam_spec = _build_family(scenario, spec["family"])
    reports = validate_axioms(family, glue_tests=fam_spec.glue_tests)
    metrics = {"members": float(len(family.members))}
    notes = []
    ok = True
    for rep in reports:
        metrics[f"{rep.task}_failures"] = rep.metrics["failures"]
        ok = ok and rep.passed
        notes.extend(f"{rep.task}: {note}" for note in rep.notes)
    return make_report(task="axioms", metrics=metrics, tolerances={},
                       notes=notes, extra_pass=ok)


def _run_ah_map(scenario, spec, tols):
    grid_k = int(spec.get("grid", defaults.GRID_PER_AXIS))
    if "map" in spec:
        report = check_ah_map(scenario.maps[spec["map"]], scenario.structure,
                              grid_k=grid_k, tol=tols["tol_map"])
        report.task = "ah_map"
        return report
    family, _ = _build_family(scenario, spec["family"])
    worst = 0.0
    failures = []
    checked = 0
    for member in family.members:
        try:
            rep = check_ah_map(member, scenario.structure, grid_k=grid_k,
                               tol=tols["tol_map"])
        except DomainError as exc:
            failures.append(f"{member.label}: {exc}")
            continue
        checked += 1
        worst = max(worst, rep.metrics["ah_map_residual"])
        if not rep.passed:
            failures.append(member.label)
    notes = [f"checked {checked} of {len(family.members)} members"]
    notes.extend(f"failed: {f}" for f in failures[:10])
    return make_report(
        task="ah_map",
        metrics={"ah_map_residual": worst, "members": float(len(family.members))},
        tolerances={"ah_map_residual": tols["tol_map"]},
        notes=notes,
        extra_pass=not failures,
    )


def _run_over_diagram(scenario, spec, tols):
    diagram = OverDiagram(
        phi=scenario.maps[spec["phi"]],
        f_src=scenario.maps[spec["f_src"]],
        f_dst=scenario.maps[spec["f_dst"]],
        psi=scenario.maps[spec["psi"]])
    return check_over_diagram(diagram,
                              grid_k=int(spec.get("grid", defaults.GRID_PER_AXIS)),
                              tol=tols["tol_diagram"])


TASK_RUNNERS = {
    "check_acs": _run_check_acs,
    "split_type": _run_split_type,
    "integrability": _run_integrability,
    "cr_check": _run_cr_check,
    "solve_ah": _run_solve_ah,
    "spencer_type": _run_spencer_type,
    "chart": _run_chart,
    "factorize": _run_factorize,
    "transition": _run_transition,
    "cocycle": _run_cocycle,
    "axioms": _run_axioms,
    "ah_map": _run_ah_map,
    "over_diagram": _run_over_diagram,
}


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------

def _run_one_task(scenario, spec, tols):
    kind = spec["task"]
    label = str(spec.get("label", kind))
    try:
        report = TASK_RUNNERS[kind](scenario, spec, tols)
    except CHECK_FAILURES as exc:
        report = Report(task=label, status="fail",
                        notes=[f"{type(exc).__name__}: {exc}"])
    report.task = label
    expect = spec.get("expect", "pass")
    if expect == "fail":
        if report.status == "fail":
            report.status = "pass"
            report.add_note("expected failure observed")
        else:
            report.status = "fail"
            report.add_note("expected a failure but the check passed")
    return report


def run_scenario(scenario, tol_overrides=None, grid_override=None,
                 degree_override=None, task_filter=None, threads=None):
    """Run the scenario's tasks and collect reports in declaration order.

    ``threads`` (or the SPENCERKIT_THREADS environment variable) sets the
    worker count; results are ordered by declaration regardless.  Overrides
    replace the grid density, solver degree and named tolerances everywhere.
    """
    import time
    started = time.perf_counter()
    tols = dict(scenario.tolerances)
    for tname, tval in (tol_overrides or {}).items():
        if tname not in tols:
            raise ScenarioError(f"unknown tolerance {tname!r}")
        tols[tname] = float(tval)
    specs = []
    for spec in scenario.tasks:
        if task_filter and spec["task"] != task_filter \
                and spec.get("label") != task_filter:
            continue
        spec = dict(spec)
        if grid_override:
            spec["grid"] = int(grid_override)
        if degree_override and spec["task"] in ("solve_ah", "spencer_type"):
            spec["degree"] = int(degree_override)
        specs.append(spec)
    if not specs:
        raise ScenarioError(
            f"task filter {task_filter!r} matches no task in {scenario.name!r}")

    if threads is None:
        threads = int(os.environ.get("SPENCERKIT_THREADS", "1") or "1")
    threads = max(1, threads)
    if threads == 1:
        reports = [_run_one_task(scenario, spec, tols) for spec in specs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(
                lambda spec: _run_one_task(scenario, spec, tols), specs))
    overall = "pass" if all(r.passed for r in reports) else "fail"
    return RunResult(scenario=scenario.name,
                     version=defaults.TOOLKIT_VERSION,
                     reports=reports, overall=overall,
                     duration=time.perf_counter() - started)


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def _json_escape(text):
    out = []
    for ch in text:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ord(ch) < 0x20:
            out.append({"\n": "\\n", "\t": "\\t", "\r": "\\r"}.get(
                ch, f"\\u{ord(ch):04x}"))
        else:
            out.append(ch)
    return "".join(out)


def _emit_number(value):
    return fmt_float(value)


def emit_json(result):
    """Canonical JSON: sorted metric keys, 17-digit floats, no timing."""
    lines = ["{"]
    lines.append(f'  "scenario": "{_json_escape(result.scenario)}",')
    lines.append(f'  "version": "{_json_escape(result.version)}",')
    lines.append(f'  "overall": "{result.overall}",')
    lines.append('  "tasks": [')
    for t, rep in enumerate(result.reports):
        lines.append("    {")
        lines.append(f'      "task": "{_json_escape(rep.task)}",')
        lines.append(f'      "status": "{rep.status}",')
        for key, mapping in (("metrics", rep.metrics),
                             ("tolerances", rep.tolerances)):
            if mapping:
                lines.append(f'      "{key}": {{')
                items = sorted(mapping.items())
                for i, (k, v) in enumerate(items):
                    comma = "," if i + 1 < len(items) else ""
                    lines.append(f'        "{_json_escape(k)}": '
                                 f"{_emit_number(v)}{comma}")
                lines.append("      },")
            else:
                lines.append(f'      "{key}": {{}},')
        if rep.notes:
            lines.append('      "notes": [')
            for i, note in enumerate(rep.notes):
                comma = "," if i + 1 < len(rep.notes) else ""
                lines.append(f'        "{_json_escape(note)}"{comma}')
            lines.append("      ]")
        else:
            lines.append('      "notes": []')
        lines.append("    }," if t + 1 < len(result.reports) else "    }")
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_text(result):
    """Human summary with per-task metrics and the total wall-clock time."""
    lines = [f"scenario {result.scenario}: {result.overall} "
             f"({len(result.reports)} tasks, {result.duration:.3f} s)"]
    for rep in result.reports:
        bits = []
        for k in sorted(rep.metrics):
            v = rep.metrics[k]
            if k in rep.tolerances:
                op = "<=" if rep.comparisons.get(k, "le") == "le" else ">="
                bits.append(f"{k}={v:.6g} {op} {rep.tolerances[k]:.6g}")
            else:
                bits.append(f"{k}={v:.6g}")
        lines.append(f"  [{rep.status}] {rep.task}  " + "  ".join(bits))
        for note in rep.notes:
            lines.append(f"      - {note}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# built-in scenarios
# ---------------------------------------------------------------------------

def _builtin_std_c1():
    unit = {"lo": [-1.0, -1.0], "hi": [1.0, 1.0]}
    return {
        "name": "std_c1",
        "n": 1,
        "box": unit,
        "functions": {
            "z": "x1 + (0+1i)*x2",
            "zbar": "x1 - (0+1i)*x2",
            "zsq": "x1^2 - x2^2 + (0+2i)*x1*x2",
            "z_cubic": ("x1 + 0.1*x1^3 - 0.3*x1*x2^2 + (0+1i)*x2 "
                        "+ (0+0.3i)*x1^2*x2 - (0+0.1i)*x2^3"),
            "z_quad": "x1 + 0.1*x1^2 - 0.1*x2^2 + (0+1i)*x2 + (0+0.2i)*x1*x2",
            "z_double": "2*x1 + (0+2i)*x2",
        },
        "maps": {
            "t": {"components": ["x1 + 0.8", "x2"],
                  "domain": {"lo": [-1.0, -1.0], "hi": [-0.7, 1.0]},
                  "inverse": {"components": ["x1 - 0.8", "x2"],
                              "domain": {"lo": [-0.2, -1.0], "hi": [0.1, 1.0]}}},
            "s": {"components": ["2*x1", "2*x2"],
                  "domain": {"lo": [0.2, 0.2], "hi": [0.45, 0.45]},
                  "inverse": {"components": ["0.5*x1", "0.5*x2"],
                              "domain": {"lo": [0.4, 0.4], "hi": [0.9, 0.9]}}},
            "m4": {"components": ["4*x1", "4*x2"],
                   "domain": {"lo": [0.2, 0.2], "hi": [0.225, 0.225]}},
            "sq": {"components": ["x1^2 - x2^2", "2*x1*x2"],
                   "domain": {"lo": [0.05, 0.05], "hi": [0.6, 0.6]}},
            "tr": {"components": ["x1 + 0.1", "x2 + 0.05"],
                   "domain": {"lo": [-0.5, -0.5], "hi": [0.5, 0.5]}},
            "conj": {"components": ["x1", "-x2"], "domain": unit},
            "amb_id": {"components": ["x1", "x2"], "domain": unit},
        },
        "charts": {
            "c_main": {"functions": ["z"]},
            "c_bad": {"functions": ["zsq"]},
            "c_a": {"functions": ["z"],
                    "box": {"lo": [-0.1, -0.1], "hi": [0.1, 0.1]}},
            "c_b": {"functions": ["z_quad"],
                    "box": {"lo": [-0.1, -0.1], "hi": [0.1, 0.1]}},
            "c_c": {"functions": ["z_double"],
                    "box": {"lo": [-0.1, -0.1], "hi": [0.1, 0.1]}},
            "c_t1": {"functions": ["z"]},
            "c_t2": {"functions": ["z_cubic"]},
        },
        "families": {
            "fam": {
                "members": ["t", "s"],
                "depth": 2,
                "glue_tests": [{
                    "members": ["s", "s"],
                    "boxes": [{"lo": [0.2, 0.2], "hi": [0.35, 0.45]},
                              {"lo": [0.3, 0.2], "hi": [0.45, 0.45]}],
                    "target": {"lo": [0.2, 0.2], "hi": [0.45, 0.45]},
                }],
            },
            "fam_no_inv": {"members": ["t", "s", "m4"], "depth": 0},
            "fam_ah": {"members": ["sq", "tr"], "depth": 2},
        },
        "tasks": [
            {"task": "check_acs"},
            {"task": "split_type"},
            {"task": "integrability"},
            {"task": "cr_check", "function": "z", "label": "cr_check_z"},
            {"task": "cr_check", "function": "zbar", "expect": "fail",
             "label": "cr_check_zbar"},
            {"task": "solve_ah", "degree": 2, "expect_dim": 2},
            {"task": "spencer_type", "degree": 2, "expect_m": 1},
            {"task": "chart", "chart": "c_main", "label": "chart_main"},
            {"task": "chart", "chart": "c_bad", "expect": "fail",
             "label": "chart_degenerate"},
            {"task": "factorize", "chart": "c_main", "function": "zsq",
             "grid": 7, "label": "factorize_zsq"},
            {"task": "factorize", "chart": "c_main", "function": "zbar",
             "grid": 7, "expect": "fail", "label": "factorize_zbar"},
            {"task": "transition", "charts": ["c_t1", "c_t2"], "grid": 7,
             "fit_degree": 4},
            {"task": "cocycle", "charts": ["c_a", "c_b", "c_c"], "grid": 9,
             "fit_degree": 6},
            {"task": "axioms", "family": "fam", "label": "axioms_closed"},
            {"task": "axioms", "family": "fam_no_inv", "expect": "fail",
             "label": "axioms_without_inverses"},
            {"task": "ah_map", "family": "fam_ah", "label": "ah_map_family"},
            {"task": "ah_map", "map": "conj", "expect": "fail",
             "label": "ah_map_conjugation"},
            {"task": "over_diagram", "phi": "tr", "f_src": "amb_id",
             "f_dst": "amb_id", "psi": "tr", "label": "diagram_translation"},
            {"task": "over_diagram", "phi": "tr", "f_src": "amb_id",
             "f_dst": "amb_id", "psi": "amb_id", "expect": "fail",
             "label": "diagram_broken"},
        ],
    }


def _builtin_std_c2():
    unit = {"lo": [-1.0] * 4, "hi": [1.0] * 4}
    return {
        "name": "std_c2",
        "n": 2,
        "box": unit,
        "functions": {
            "z1": "x1 + (0+1i)*x2",
            "z2": "x3 + (0+1i)*x4",
            "mix": "x1^2 - x2^2 + (0+2i)*x1*x2 + x3 + (0+1i)*x4",
            "z1_shift": "x1 + 0.5*x3 + (0+1i)*x2 + (0+0.5i)*x4",
        },
        "charts": {
            "cc": {"functions": ["z1", "z2"]},
            "cc_mix": {"functions": ["z1_shift", "z2"]},
        },
        "tasks": [
            {"task": "check_acs"},
            {"task": "split_type"},
            {"task": "integrability"},
            {"task": "cr_check", "function": "z1", "label": "cr_check_z1"},
            {"task": "solve_ah", "degree": 1, "expect_dim": 2,
             "label": "solve_ah_linear"},
            {"task": "solve_ah", "degree": 3, "grid": 7, "expect_dim": 9,
             "label": "solve_ah_cubic"},
            {"task": "spencer_type", "degree": 2, "expect_m": 2},
            {"task": "chart", "chart": "cc"},
            {"task": "factorize", "chart": "cc", "function": "mix"},
            {"task": "transition", "charts": ["cc", "cc_mix"]},
        ],
    }


def _builtin_twisted_r4():
    half = {"lo": [-0.5] * 4, "hi": [0.5] * 4}
    return {
        "name": "twisted_r4",
        "n": 2,
        "box": half,
        "J": [
            ["0", "-1", "-x1", "0"],
            ["1", "0", "0", "x1"],
            ["0", "0", "0", "-1"],
            ["0", "0", "1", "0"],
        ],
        "functions": {
            "w": "x3 + (0+1i)*x4",
            "w2": "x3^2 - x4^2 + (0+2i)*x3*x4",
            "zfirst": "x1 + (0+1i)*x2",
            "xcoord": "x1",
        },
        "charts": {
            "cw": {"functions": ["w"]},
        },
        "tasks": [
            {"task": "check_acs"},
            {"task": "split_type"},
            {"task": "integrability", "expect": "fail",
             "label": "integrability_obstructed"},
            {"task": "cr_check", "function": "w", "label": "cr_check_w"},
            {"task": "cr_check", "function": "zfirst", "expect": "fail",
             "label": "cr_check_zfirst"},
            {"task": "solve_ah", "degree": 2, "expect_dim": 2},
            {"task": "spencer_type", "degree": 2, "expect_m": 1},
            {"task": "chart", "chart": "cw"},
            {"task": "factorize", "chart": "cw", "function": "w2",
             "label": "factorize_w2"},
            {"task": "factorize", "chart": "cw", "function": "xcoord",
             "expect": "fail", "label": "factorize_transverse"},
        ],
    }


def builtin_scenarios():
    """Fresh dictionaries for the bundled demonstration scenarios."""
    return {
        "std_c1": _builtin_std_c1(),
        "std_c2": _builtin_std_c2(),
        "twisted_r4": _builtin_twisted_r4(),
    }
