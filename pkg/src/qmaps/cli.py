"""Command-line driver: ``qmaps <command> [options]``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
parse and plan errors.  JSON output is key-sorted and free of timings, so a
fixed (plan, seed) always produces the same bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ParseError, QMapsError, UnknownPreset
from .presentations import (
    PRESET_NAMES,
    Presentation,
    apply_comultiplication,
    builtin_presentation,
    quotient_map_powers,
)
from .reports import CheckReport, CheckStatus
from .rewriting import Status, complete, orient_rules, reduce

SCHEMA = 1
VERIFY_CHECKS = ("relations", "comultiplication", "coaction", "state")
ACTIONS = ("circle", "so3-classical")


class PlanError(QMapsError):
    """A plan that cannot be run (missing q, bad dimension, unknown check)."""


@dataclass
class VerificationPlan:
    command: str
    preset: Optional[str] = None
    file: Optional[str] = None
    checks: Tuple[str, ...] = ()
    q: Optional[float] = None
    dim: int = 64
    margin: int = 2
    tol: float = 1e-9
    seed: int = 0
    format: str = "text"
    extra: Dict[str, object] = field(default_factory=dict)

    def echo(self) -> Dict[str, object]:
        out = asdict(self)
        out.pop("format")
        out["checks"] = list(self.checks)
        return out


@dataclass
class RunResult:
    report: CheckReport
    details: Dict[str, object] = field(default_factory=dict)


# ------------------------------------------------------------ models


def _need_q(plan: VerificationPlan) -> float:
    if plan.q is None:
        raise PlanError(f"--q is required for {plan.preset or 'this command'}")
    if not 0.0 < plan.q < 1.0:
        raise PlanError(f"--q must lie strictly between 0 and 1, got {plan.q}")
    return plan.q


def model_for(preset: str, plan: VerificationPlan):
    """A finite model of ``preset`` sized by the plan."""
    from . import representations as R
    from .so3 import haar_spoints

    if plan.dim < 2:
        raise PlanError("--dim must be at least 2")
    if preset in ("sqo3", "sqo3-matrix"):
        comult = "displayed" if preset == "sqo3" else "matrix"
        return R.rep_sqo3_truncated(_need_q(plan), plan.dim, plan.margin, plan.tol, comult)
    if preset == "qmap-powers":
        return R.rep_powers(_need_q(plan), plan.dim, plan.margin, plan.tol)
    if preset == "qmap-m2":
        return R.pullback(quotient_map_powers(), R.rep_powers(_need_q(plan), plan.dim, plan.margin, plan.tol), plan.tol)
    if preset == "qmap-omega0":
        return R.rep_q0_toeplitz(max(6, plan.dim - plan.dim % 3))
    if preset == "qmap-trace":
        return R.rep_trace_points(haar_spoints(plan.dim, plan.seed))
    if preset == "so3-classical":
        return R.rep_so3_points(haar_spoints(plan.dim, plan.seed))
    if preset == "circle":
        rng = np.random.default_rng(plan.seed)
        return R.rep_circle_points(rng.uniform(0, 2 * np.pi, plan.dim))
    if preset == "m2":
        return R.rep_m2()
    raise UnknownPreset(preset)


def _state_for(preset: str):
    from .verifier import StateSpec

    if preset in ("sqo3", "sqo3-matrix", "qmap-powers"):
        return StateSpec.powers()
    if preset in ("qmap-trace", "so3-classical"):
        return StateSpec.trace()
    if preset in ("qmap-omega0", "circle"):
        return StateSpec.omega0()
    return None


def _load_plan_presentation(plan: VerificationPlan) -> Tuple[Presentation, Optional[str]]:
    """The presentation to check and the preset whose model applies (if any)."""
    from .dsl import load_spec_file, presentations_equal

    if plan.file:
        pres = load_spec_file(plan.file).presentation
        for name in PRESET_NAMES:
            if name == pres.name and presentations_equal(pres, builtin_presentation(name)):
                return pres, name
        return pres, None
    if not plan.preset:
        raise PlanError("give --preset or --file")
    return builtin_presentation(plan.preset), plan.preset


def symbolic_checks(pres: Presentation) -> CheckReport:
    """Model-free checks: the counit kills each relation, and Delta of each
    relation reduces to zero under the relations completed to degree 4."""
    report = CheckReport(f"symbolic[{pres.name}]")
    if pres.counit is not None:
        for label, rel in pres.relations:
            ok = rel.counit_value(pres.counit).is_zero()
            report.add(f"counit-rel:{label}", CheckStatus.PASS_SYMBOLIC if ok else CheckStatus.FAIL, 0.0)
    if pres.comultiplication is not None:
        rules = complete(orient_rules(pres), 4).on_legs((1, 2))
        for label, rel in pres.relations:
            status = reduce(apply_comultiplication(rel, pres), rules).status
            mapped = CheckStatus.PASS_SYMBOLIC if status is Status.REDUCED_TO_ZERO else CheckStatus.INCONCLUSIVE
            report.add(f"delta-rel:{label}", mapped, None, symbolic=status.value)
    return report


# ------------------------------------------------------------ commands


def run_verify(plan: VerificationPlan) -> RunResult:
    from .verifier import CoactionSpec, check_coaction, check_comultiplication, check_relations, check_state_preservation

    checks = plan.checks or ("relations",)
    bad = [c for c in checks if c not in VERIFY_CHECKS]
    if bad:
        raise PlanError(f"unknown checks {bad}; choose from {', '.join(VERIFY_CHECKS)}")
    pres, preset = _load_plan_presentation(plan)
    if preset is None:
        return RunResult(symbolic_checks(pres), {"model": None})
    if pres.is_q_parameterized():
        _need_q(plan)
    rep = model_for(preset, plan)
    report = CheckReport(f"verify[{preset}]")
    if "relations" in checks:
        report.extend(check_relations(rep, plan.tol))
    if "comultiplication" in checks:
        if pres.comultiplication is None:
            report.add("comultiplication", CheckStatus.NOT_APPLICABLE, None, reason="no comultiplication")
        else:
            small = model_for(preset, _resized(plan, min(plan.dim, 32)))
            tiny = model_for(preset, _resized(plan, min(plan.dim, 12)))
            report.extend(check_comultiplication(pres, small, plan.tol, three_leg_rep=tiny, seed=plan.seed))
    if "coaction" in checks or "state" in checks:
        if pres.coaction is None:
            report.add("coaction", CheckStatus.NOT_APPLICABLE, None, reason="no coaction")
        else:
            coact = CoactionSpec.of(pres)
            if "coaction" in checks:
                report.extend(check_coaction(coact, model_for(preset, _resized(plan, min(plan.dim, 32))), plan.tol))
            state = _state_for(preset)
            if "state" in checks and state is not None:
                report.extend(check_state_preservation(coact, state, rep, plan.tol))
    return RunResult(report, {"model": rep.name, "dim": rep.dim})


def _resized(plan: VerificationPlan, dim: int) -> VerificationPlan:
    return VerificationPlan(**{**asdict(plan), "dim": dim})


def run_replay(plan: VerificationPlan) -> RunResult:
    from .proof_replay import proof_replay_theorem_main, replay_rep

    q = 0.5 if plan.q is None else plan.q
    if not 0.0 < q < 1.0:
        raise PlanError("--q must lie strictly between 0 and 1")
    rep = replay_rep(q, plan.dim, plan.margin, plan.tol)
    report = proof_replay_theorem_main(q, plan.dim, plan.tol, rep=rep)
    return RunResult(report, {"identities": len(report)})


def run_classify(plan: VerificationPlan) -> RunResult:
    from .classification import classify_action_pipeline, coaction_for_preset, conjugate_action, random_density, random_unitary
    from .verifier import StateSpec

    action = plan.extra.get("action") or plan.preset or "circle"
    if action == "so3":
        action = "so3-classical"
    if action not in ACTIONS:
        raise PlanError(f"--action must be one of {', '.join(ACTIONS)}")
    coact = coaction_for_preset(action)
    conj = plan.extra.get("conjugate_seed")
    if conj is not None:
        coact = conjugate_action(coact, random_unitary(int(conj)))
    state_seed = plan.extra.get("state_seed")
    phi = None if state_seed is None else StateSpec.from_density(random_density(int(state_seed)))
    samples = int(plan.extra.get("samples") or 4096)
    res = classify_action_pipeline(coact, action, phi, plan.tol, plan.seed, samples)
    details = res.to_dict()
    details.pop("report")
    return RunResult(res.report, details)


def run_derive(plan: VerificationPlan) -> RunResult:
    from .verifier import derive_state_constraints

    d = derive_state_constraints()
    report = CheckReport("derive-constraints")
    sym = lambda ok: CheckStatus.PASS_SYMBOLIC if ok else CheckStatus.FAIL
    report.add("alpha=-q^2 delta", sym(d.alpha_forced))
    report.add("reproduces:qmap-powers", sym(d.reproduces_powers), missing=d.missing, extra=d.extra)
    report.add("reproduces:qmap-trace(q=1)", sym(d.reproduces_trace))
    details = {
        "alpha": d.alpha_image.to_text(),
        "constraints": {k: v.to_text() for k, v in sorted(d.constraints.items())},
    }
    return RunResult(report, details)


def _exhibit(report: CheckReport, name: str, value: float, threshold: float):
    """Pass when ``value`` exceeds ``threshold``: the conclusion really fails."""
    status = CheckStatus.PASS_NUMERIC if value > threshold else CheckStatus.FAIL
    report.add(name, status, value, threshold=threshold)


def run_counterexample(plan: VerificationPlan) -> RunResult:
    from . import representations as R
    from .verifier import check_relations

    which = plan.extra.get("which")
    report = CheckReport(f"counterexample[{which}]")
    if which == "ck":
        m0, n0 = int(plan.extra.get("m0") or 1), int(plan.extra.get("n0") or 2)
        rep, q = R.rep_ck_counterexample(m0, n0, plan.dim if plan.dim != 64 else 16)
        report.numeric("q-equation", abs(q ** (2 * n0) + q ** (2 * m0) - 1.0), 1e-13)
        report.extend(check_relations(rep, 1e-12), "hypothesis:")
        _exhibit(report, "CK-q2KC", rep.notes["conclusion_residual"], 0.05)
        details = {"q": q, "AC-CA": rep.notes["commutation_residual"], "m0": m0, "n0": n0}
    elif which == "q1":
        grid = plan.dim if plan.dim != 64 else 128
        rep = R.rep_q1_counterexample(grid)
        for key in ("AK-KA", "AC-CA"):
            ok = rep.notes[key] == 0.0
            report.add(key, CheckStatus.PASS_NUMERIC if ok else CheckStatus.FAIL, rep.notes[key], exact=True)
        report.extend(check_relations(rep, 1e-12), "hypothesis:")
        _exhibit(report, "CK-KC", rep.notes["conclusion_residual"], 0.1)
        details = {"grid": grid}
    elif which == "q0":
        details = _q0_report(report, plan.dim if plan.dim != 64 else 48)
    else:
        raise PlanError("counterexample needs one of ck, q1, q0")
    return RunResult(report, details)


def _q0_report(report: CheckReport, dim: int) -> Dict[str, object]:
    from . import representations as R
    from .verifier import check_relations

    rep = R.rep_q0_toeplitz(max(6, dim - dim % 3))
    m = rep.interior_limit
    report.extend(check_relations(rep, 1e-12))
    top = set(range(rep.dim - 2 * m, rep.dim))
    worst = []
    for label, d in rep.defect_report.items():
        stray = sorted(set(d.defect_columns) - top)
        report.add(
            f"localized:{label}",
            CheckStatus.PASS_NUMERIC if not stray else CheckStatus.FAIL,
            d.full,
            defect_columns=len(d.defect_columns),
            outside_top=len(stray),
        )
        worst.append(d.full)
    proj = rep.notes["betastar_beta_is_projection"]
    report.add("beta*beta-projection", CheckStatus.PASS_NUMERIC if proj else CheckStatus.FAIL)
    _exhibit(report, "beta*beta-1", rep.notes["betastar_beta_defect"], 1.0 - 1e-12)
    report.extend(symbolic_checks(builtin_presentation("qmap-omega0")))
    return {"dim": rep.dim, "boundary": m}


COMMANDS = {
    "verify": run_verify,
    "replay-proof": run_replay,
    "classify": run_classify,
    "derive-constraints": run_derive,
    "counterexample": run_counterexample,
}


def run_plan(plan: VerificationPlan) -> Tuple[Dict[str, object], int]:
    """Execute a plan; returns the JSON-ready document and the exit code."""
    result = COMMANDS[plan.command](plan)
    return _document(plan, result), 0 if result.report.passed else 1


def _document(plan: VerificationPlan, result: RunResult) -> Dict[str, object]:
    from .reports import _jsonable

    return _jsonable({
        "schema": SCHEMA,
        "command": plan.command,
        "plan": plan.echo(),
        "report": result.report.to_dict(),
        "details": result.details,
        "passed": result.report.passed,
    })


# ------------------------------------------------------------ check catalogue


def check_catalogue() -> List[Tuple[str, str, str]]:
    """(command, check name, operation) for every name a command can emit."""
    from .proof_replay import _identities, bcd_relations

    rows: List[Tuple[str, str, str]] = []
    for preset in PRESET_NAMES:
        pres = builtin_presentation(preset)
        for label, _ in pres.relations:
            rows.append(("verify", f"relation:{label}", f"check_relations[{preset}]"))
        if pres.comultiplication is not None:
            for label, _ in pres.relations:
                rows.append(("verify", f"delta-rel:{label}", f"check_comultiplication[{preset}]"))
            for g in pres.generators:
                rows.append(("verify", f"coassoc:{g}", f"check_comultiplication[{preset}]"))
                for side in ("left", "right"):
                    rows.append(("verify", f"counit-{side}:{g}", f"check_comultiplication[{preset}]"))
        if pres.coaction is not None:
            for name in ("coaction-n-nilpotent", "coaction-n-unit", "coaction-square", "coaction-counit"):
                rows.append(("verify", name, f"check_coaction[{preset}]"))
            for b in ("e11", "e12", "e21", "e22"):
                rows.append(("verify", f"preserve:{b}", f"check_state_preservation[{preset}]"))
    op = "proof_replay_theorem_main"
    for label, _ in bcd_relations():
        rows.append(("replay-proof", label, op))
    for name in ("matrix:a*a=1", "matrix:aa*=1", "matrix:a=derived-form", "a*kappa(a)=1"):
        rows.append(("replay-proof", name, op))
    rows.append(("replay-proof", "kappa-involutive:<generator>", "kappa_self_consistency"))
    rows.append(("replay-proof", "counit(a)=1", "kappa_counit_check"))
    for name, _ in _identities():
        rows.append(("replay-proof", name, op))
    for label, _ in builtin_presentation("sqo3").relations:
        rows.append(("replay-proof", f"derived:{label}", op))
    for name in ("invariant-state", "u rho_q u* = rho", "ergodic-uniqueness"):
        rows.append(("classify", name, "classify_action_pipeline"))
    for b in ("e11", "e12", "e21", "e22"):
        rows.append(("classify", f"preserve:{b}", "check_state_preservation"))
    for name in ("alpha=-q^2 delta", "reproduces:qmap-powers", "reproduces:qmap-trace(q=1)"):
        rows.append(("derive-constraints", name, "derive_state_constraints"))
    rows.append(("counterexample ck", "q-equation", "solve_ck_parameter"))
    rows.append(("counterexample ck", "hypothesis:<label>", "rep_ck_counterexample"))
    rows.append(("counterexample ck", "CK-q2KC", "rep_ck_counterexample"))
    for name in ("AK-KA", "AC-CA", "hypothesis:<label>", "CK-KC"):
        rows.append(("counterexample q1", name, "rep_q1_counterexample"))
    for name in ("relation:<label>", "localized:<label>", "beta*beta-projection", "beta*beta-1",
                 "counit-rel:<label>", "delta-rel:<label>"):
        rows.append(("counterexample q0", name, "rep_q0_toeplitz"))
    seen, out = set(), []
    for row in rows:
        key = (row[0], row[1])
        if key not in seen:
            seen.add(key)
            out.append(row)
    return out


# ------------------------------------------------------------ argument parsing


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", help="builtin presentation (see list-checks)")
    common.add_argument("--file", help="presentation file in the text format")
    common.add_argument("--q", type=float, help="deformation parameter in ]0,1[")
    common.add_argument("--dim", type=int, default=64, help="truncation dimension (default 64)")
    common.add_argument("--margin", type=int, default=2, help="interior margin per degree (default 2)")
    common.add_argument("--tol", type=float, default=1e-9, help="residual tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    common.add_argument("--format", choices=("json", "text"), default="text")

    p = argparse.ArgumentParser(prog="qmaps", description="Checks for quantum families of maps on M2.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="check a presentation in a finite model")
    v.add_argument("--checks", default="relations", help=f"comma list from: {', '.join(VERIFY_CHECKS)}")
    sub.add_parser("replay-proof", parents=[common], help="replay the identities identifying the powers quotient with S_qO(3)")
    c = sub.add_parser("classify", parents=[common], help="classify a classical action on M2")
    c.add_argument("--action", choices=ACTIONS + ("so3",), default=None)
    c.add_argument("--state-seed", type=int, default=None, help="seed of the state averaged over Haar measure")
    c.add_argument("--conjugate-seed", type=int, default=None, help="conjugate the action by a seeded unitary")
    c.add_argument("--samples", type=int, default=4096)
    sub.add_parser("derive-constraints", parents=[common], help="replay the state-preservation derivation")
    ce = sub.add_parser("counterexample", parents=[common], help="operator models that block an implication")
    ce.add_argument("which", choices=("ck", "q1", "q0"))
    ce.add_argument("--m0", type=int, default=1)
    ce.add_argument("--n0", type=int, default=2)
    lc = sub.add_parser("list-checks", help="every check name and the operation behind it")
    lc.add_argument("--format", choices=("json", "text"), default="text")
    return p


def plan_from_args(ns: argparse.Namespace) -> VerificationPlan:
    extra = {}
    for key in ("action", "state_seed", "conjugate_seed", "samples", "which", "m0", "n0"):
        if getattr(ns, key, None) is not None:
            extra[key] = getattr(ns, key)
    checks = tuple(c.strip() for c in getattr(ns, "checks", "").split(",") if c.strip())
    return VerificationPlan(
        ns.command, ns.preset, ns.file, checks, ns.q, ns.dim, ns.margin, ns.tol, ns.seed, ns.format, extra
    )


def render_text(doc: Dict[str, object], report: CheckReport) -> str:
    lines = [report.to_text()]
    details = doc.get("details") or {}
    for k in sorted(details):
        lines.append(f"{k}: {json.dumps(details[k], sort_keys=True)}")
    return "\n".join(lines)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if ns.command == "list-checks":
        rows = check_catalogue()
        if ns.format == "json":
            doc = {"schema": SCHEMA, "checks": [{"command": c, "name": n, "operation": o} for c, n, o in rows]}
            print(json.dumps(doc, sort_keys=True, indent=2))
        else:
            w0 = max(len(r[0]) for r in rows)
            w1 = max(len(r[1]) for r in rows)
            for c, n, o in rows:
                print(f"{c.ljust(w0)}  {n.ljust(w1)}  {o}")
        return 0
    plan = plan_from_args(ns)
    try:
        result = COMMANDS[plan.command](plan)
    except UnknownPreset as exc:
        print(f"qmaps: error: unknown preset {exc}; choose from {', '.join(PRESET_NAMES)}", file=sys.stderr)
        return 2
    except (PlanError, ParseError, ValueError, OSError) as exc:
        print(f"qmaps: error: {exc}", file=sys.stderr)
        return 2
    doc = _document(plan, result)
    if plan.format == "json":
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        print(render_text(doc, result.report))
    return 0 if result.report.passed else 1
