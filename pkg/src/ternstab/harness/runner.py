"""Run a scenario and turn the outcome into reports, data series and an exit code.

Exit codes::

    0  every verdict passed (for ``axioms``: the checks ran)
    1  configuration error
    2  a hypothesis was violated
    3  an iteration did not converge, a series had no convergence
       certificate, or a value overflowed
    4  inconclusive or failed verdict

When several apply, 3 wins over 2 and 2 over 4.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__
from ..errors import (AssociativityFailed, BudgetExceeded, ConfigError, DegenerateInput,
                      DichotomyViolated, DomainMismatch, ExpressionError,
                      NoConvergenceCertificate, NotAnAlgebra, NotConverged, Overflow,
                      PreconditionUnmet, TooLarge, UnknownSeries)
from ..logdomain import LogScalar
from ..stability_direct import hyers_limit, hyers_term, verify_stability
from ..superstability import (baker_example, bounded_or_hom_classify, dichotomy_classify,
                              growth_witness, lemma_identity_residual,
                              pair_dichotomy_classify)
from ..target_spaces import TargetSpace, norm
from ..ternary_algebra import Poly, is_associative, is_commutative
from ..maps import MapSpec
from .scenario import Scenario, element_from_json, element_to_json

REPORT_SCHEMA = "ternstab-report 1"
EXIT_PASS, EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_NOT_CONVERGED, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
STATUS = {0: "pass", 1: "config-error", 2: "hypothesis-violated", 3: "not-converged",
          4: "inconclusive-or-failed"}
LEMMA_TOL = 1e-10


@dataclass
class Series:
    name: str
    x_label: str
    y_labels: tuple
    rows: list  # tuples (x, y1, y2, ...)

    def to_dict(self) -> dict:
        return {"x_label": self.x_label, "y_labels": list(self.y_labels),
                "rows": [[_jsonable(v) for v in row] for row in self.rows]}


@dataclass
class RunReport:
    scenario: dict
    suite: str
    exit_code: int
    verdicts: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def status(self) -> str:
        return STATUS[self.exit_code]

    def machine_dict(self) -> dict:
        """Everything except wall-clock timings, so reruns compare byte for byte."""
        return _jsonable({
            "schema": REPORT_SCHEMA, "version": __version__, "scenario": self.scenario,
            "suite": self.suite, "exit_code": self.exit_code, "status": self.status,
            "error": self.error, "verdicts": self.verdicts, "tables": self.tables,
            "series": {k: s.to_dict() for k, s in self.series.items()},
        })

    def to_machine(self) -> str:
        return json.dumps(self.machine_dict(), sort_keys=True, indent=1,
                          allow_nan=False) + "\n"

    def to_text(self) -> str:
        lines = [REPORT_SCHEMA,
                 f"scenario: {self.scenario.get('name', '?')} (suite {self.suite}, "
                 f"seed {self.scenario.get('seed', 0)})",
                 f"status: {self.status} (exit {self.exit_code})"]
        if self.error:
            lines.append(f"error: {self.error}")
        for key in sorted(self.verdicts):
            lines.append(f"  {key}: {_short(self.verdicts[key])}")
        for name in sorted(self.tables):
            rows = self.tables[name]
            lines.append(f"table {name} ({len(rows)} rows)")
            for row in rows:
                lines.append("  " + "  ".join(f"{k}={_short(v)}" for k, v in row.items()))
        for name in sorted(self.series):
            s = self.series[name]
            lines.append(f"series {name}: {len(s.rows)} rows ({s.x_label} -> "
                         f"{', '.join(s.y_labels)})")
        for k in sorted(self.timings):
            lines.append(f"time {k}: {self.timings[k]:.3f}s")
        return "\n".join(lines) + "\n"


def _short(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)) and len(v) > 6:
        return f"[{len(v)} items]"
    return str(_jsonable(v))


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [_jsonable(v.real), _jsonable(v.imag)]
    if isinstance(v, (LogScalar, Poly)) or hasattr(v, "as_tuple"):
        return element_to_json(v)
    return str(v)


def _value_json(S: TargetSpace, v):
    return S.serialize(v) if S is not None else _jsonable(v)


# --------------------------------------------------------------------------
# suites

def _suite_stability(sc: Scenario, report: RunReport):
    G, S = sc.build_structure(), sc.build_target()
    f, phi, probes = sc.build_map(G, S), sc.build_control(), sc.build_probes(G)
    rep = verify_stability(f, phi, probes, sc.tol, sc.iter_tol, sc.n_max)
    report.verdicts.update({
        "scope": rep.scope, "defect": rep.defect, "defect_argmax": rep.defect_argmax,
        "hypothesis_holds": rep.hypothesis_holds,
        "hypothesis_violations": rep.hypothesis_violations,
        "bound_ok": rep.bound_ok, "scaling_ok": rep.scaling_ok,
        "commutative": rep.commutative, "additivity_ok": rep.additivity_ok,
        "additivity_max": rep.additivity_max, "max_distance": rep.max_distance,
        "max_scaling_residual": rep.max_scaling_residual, "passed": rep.passed,
    })
    report.tables["hypothesis_violations"] = [
        {"triple": [element_to_json(e) for e in r["triple"]], "defect": r["defect"],
         "phi": r["phi"]} for r in rep.hypothesis_table]
    report.tables["probes"] = [
        {"x": element_to_json(r["x"]), "T": _value_json(S, r["T"]), "n_used": r["n_used"],
         "distance": r["distance"], "phi_tilde": r["phi_tilde"],
         "phi_tilde_certified": r["phi_tilde_certified"], "bound_ok": r["bound_ok"],
         "scaling_residual": r["scaling_residual"], "cauchy_residual": r["cauchy_residual"]}
        for r in rep.records]

    x0 = element_from_json(G, sc.params["series_point"]) if "series_point" in sc.params \
        else probes.elements[0]
    length = int(sc.params.get("series_length", 30))
    T0 = hyers_limit(f, x0, sc.iter_tol, sc.n_max).value
    rows = [(n, float(norm(S, hyers_term(f, x0, n) - T0))) for n in range(length + 1)]
    report.series["hyers_convergence"] = Series("hyers_convergence", "n",
                                                ("abs_error",), rows)
    if G.family == "reals-add" or G.is_finite:
        dist = sorted((r["x"], r["distance"], r["phi_tilde"]) for r in rep.records)
        report.series["stability_distance"] = Series("stability_distance", "x",
                                                     ("distance", "phi_tilde"), dist)
    if not rep.hypothesis_holds:
        return EXIT_HYPOTHESIS
    return EXIT_PASS if rep.passed else EXIT_INCONCLUSIVE


def _suite_superstability(sc: Scenario, report: RunReport):
    G, S = sc.build_structure(), sc.build_target()
    f, probes = sc.build_map(G, S), sc.build_probes(G)
    code = EXIT_PASS
    try:
        d = dichotomy_classify(f, probes, sc.tol)
        report.verdicts["dichotomy"] = d.to_dict()
        if d.tag == "Inconclusive":
            code = EXIT_INCONCLUSIVE
    except DichotomyViolated as exc:
        report.verdicts["dichotomy"] = {"tag": "Violated", "message": str(exc)}
        code = EXIT_INCONCLUSIVE
    if S.kind in ("complex", "real"):
        v = bounded_or_hom_classify(f, probes, sc.tol)
        report.verdicts["bounded_or_hom"] = v.to_dict()
        if v.tag == "Inconclusive":
            code = EXIT_INCONCLUSIVE
    p = sc.params
    hypothesis_violated = False
    if "phi_map" in p:
        phi = sc.build_map(G, S, p["phi_map"])
        alpha = sc.build_control(p["alpha"], ("y", "z"))
        v = pair_dichotomy_classify(phi, f, alpha, probes, sc.tol)
        report.verdicts["pair"] = v.to_dict()
        if v.tag == "HypothesisViolated":
            hypothesis_violated = True
        elif v.tag == "Inconclusive":
            code = EXIT_INCONCLUSIVE
    if "growth_u" in p:
        u = element_from_json(G, p["growth_u"])
        trace = growth_witness(f, u, int(p.get("growth_n_max", 40)), sc.tol,
                               probes=probes)
        report.verdicts["growth"] = {"u": element_to_json(u), "delta": trace.delta,
                                     "p": trace.p, "eps": trace.eps,
                                     "passed": trace.passed, "advisory": trace.advisory}
        report.series["growth_witness"] = Series(
            "growth_witness", "n", ("log_norm", "lower_bound"),
            [(n, a, b) for n, a, b, _ in trace.rows])
        if not trace.passed:
            code = EXIT_INCONCLUSIVE
    return EXIT_HYPOTHESIS if hypothesis_violated else code


def _suite_baker(sc: Scenario, report: RunReport):
    p = sc.params
    rep = baker_example(float(p["epsilon"]), int(p.get("triples", 100)), seed=sc.seed,
                        tol=LEMMA_TOL)
    report.verdicts["baker"] = {
        "epsilon": rep.eps, "delta": rep.delta, "defect_ok": rep.defect_ok,
        "defect_spread": rep.defect_spread, "unbounded_ok": rep.unbounded_ok,
        "hom_witness": list(rep.hom_witness), "hom_defect": rep.hom_defect,
        "multiplicativity_gap": rep.multiplicativity_gap,
        "dichotomy_threshold": rep.threshold, "passed": rep.passed}
    report.series["baker_defect"] = Series(
        "baker_defect", "triple", ("defect_norm",),
        [(i, v) for i, v in enumerate(rep.defect_norms)])
    report.series["baker_growth"] = Series("baker_growth", "x", ("norm", "exp_x"),
                                           list(rep.growth))
    return EXIT_PASS if rep.passed else EXIT_INCONCLUSIVE


def _suite_lemma(sc: Scenario, report: RunReport):
    G = sc.build_structure()
    n = G.size
    rng = sc.rng(1)
    draws = int(sc.params.get("draws", 1000))
    C = TargetSpace("complex")
    worst, rows = 0.0, []
    for i in range(draws):
        vals = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
        phi = MapSpec.from_table(G, C, vals[0])
        f = MapSpec.from_table(G, C, vals[1])
        q = tuple(int(v) for v in rng.integers(0, n, size=5))
        try:
            r = lemma_identity_residual(G, phi, f, q)
        except AssociativityFailed as exc:
            report.verdicts["lemma"] = {"draws_completed": i, "associativity_failed_at":
                                        list(q), "message": str(exc)}
            return EXIT_HYPOTHESIS
        worst = max(worst, r)
        rows.append((i, r))
    ok = worst <= LEMMA_TOL
    report.verdicts["lemma"] = {"draws": draws, "max_residual": worst, "tol": LEMMA_TOL,
                                "passed": ok}
    report.series["lemma_residuals"] = Series("lemma_residuals", "draw", ("residual",), rows)
    return EXIT_PASS if ok else EXIT_INCONCLUSIVE


def _suite_axioms(sc: Scenario, report: RunReport):
    G = sc.build_structure()
    probes = sc.build_probes(G) if sc.probes and not sc.probes.get("exhaustive") else None
    a = is_associative(G, probes)
    c = is_commutative(G, probes)
    report.verdicts["associativity"] = {
        "holds": a.holds, "verdict": "associative" if a.holds else "not associative",
        "witness": None if a.witness is None else [element_to_json(e) for e in a.witness],
        "values": None if a.values is None else [element_to_json(e) for e in a.values],
        "scope": a.scope}
    report.verdicts["commutativity"] = {
        "holds": c.holds, "verdict": "commutative" if c.holds else "not commutative",
        "witness": None if c.witness is None else _jsonable(c.witness), "scope": c.scope}
    if G.is_finite:
        report.verdicts["structure"] = {"name": G.name, "order": G.size,
                                        "table": G.flat_entries()}
    return EXIT_PASS


SUITE_RUNNERS = {
    "stability": _suite_stability,
    "superstability": _suite_superstability,
    "baker": _suite_baker,
    "lemma": _suite_lemma,
    "axioms": _suite_axioms,
}


def run(sc: Scenario) -> RunReport:
    """Run the scenario's suite; module errors become exit codes."""
    report = RunReport(scenario=sc.to_dict(), suite=sc.suite, exit_code=EXIT_PASS)
    start = time.perf_counter()
    try:
        report.exit_code = SUITE_RUNNERS[sc.suite](sc, report)
    except (NotConverged, NoConvergenceCertificate, Overflow) as exc:
        report.exit_code, report.error = EXIT_NOT_CONVERGED, f"{type(exc).__name__}: {exc}"
    except (AssociativityFailed,) as exc:
        report.exit_code, report.error = EXIT_HYPOTHESIS, f"{type(exc).__name__}: {exc}"
    except (PreconditionUnmet, DichotomyViolated, BudgetExceeded) as exc:
        report.exit_code, report.error = EXIT_INCONCLUSIVE, f"{type(exc).__name__}: {exc}"
    except (ConfigError, DegenerateInput, TooLarge, NotAnAlgebra, DomainMismatch,
            ExpressionError) as exc:
        report.exit_code, report.error = EXIT_CONFIG, f"{type(exc).__name__}: {exc}"
    report.timings["total"] = time.perf_counter() - start
    return report


# --------------------------------------------------------------------------
# output files

def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def series_csv(series: Series) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([series.name, series.x_label, *series.y_labels])
    for row in series.rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                    for v in row])
    return buf.getvalue()


def emit_plot_data(report: RunReport, name: str, out_dir: str | os.PathLike) -> Path:
    """Write one series as CSV (header: series name, x label, y labels)."""
    if name not in report.series:
        raise UnknownSeries(name)
    path = Path(out_dir) / f"{name}.csv"
    _atomic_write(path, series_csv(report.series[name]))
    return path


def write_outputs(report: RunReport, out_dir: str | os.PathLike) -> list[Path]:
    out = Path(out_dir)
    paths = [out / "report.json", out / "report.txt"]
    _atomic_write(paths[0], report.to_machine())
    _atomic_write(paths[1], report.to_text())
    for name in sorted(report.series):
        paths.append(emit_plot_data(report, name, out))
    return paths
