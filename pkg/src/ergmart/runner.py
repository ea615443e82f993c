"""Executes a validated experiment plan and persists its artifacts.

Outputs are byte-deterministic for a fixed config+seed: trace.csv (decimal
text, 17 significant digits), reports.json (every inequality/orlicz report),
and manifest.json (config echo + seed + library version). All content is
assembled in memory before anything is written, so a failing run leaves no
partial files.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentPlan
from .inequalities import (
    InequalityReport,
    default_box,
    dominant_check,
    epsilon_sweep,
    orlicz_class_report,
    sup_field,
)
from .observables import linf_norm
from .processes import convergence_trace, limit_target, stabilized_reference

__all__ = ["RunResult", "execute_plan", "render_trace_csv"]


@dataclass(frozen=True)
class RunResult:
    ok: bool
    any_check_failed: bool
    files: tuple[str, ...]


def _report_dict(rep: InequalityReport) -> dict:
    return {
        "theorem": rep.theorem_tag,
        "lhs": rep.lhs,
        "rhs": rep.rhs,
        "constant": rep.constant,
        "p": rep.p,
        "epsilon": rep.epsilon,
        "satisfied": rep.satisfied,
        "margin": rep.margin,
        "alpha": rep.alpha,
        "truncation": rep.truncation.describe(),
    }


def render_trace_csv(trace) -> str:
    lines = ["n1,n2,lp_error,sup_error"]
    for row in trace.rows:
        lines.append(f"{row.n1},{row.n2},{row.lp_error:.17g},{row.sup_error:.17g}")
    return "\n".join(lines) + "\n"


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _run_checks(plan: ExperimentPlan) -> list[dict]:
    out: list[dict] = []
    for chk in plan.checks:
        box = default_box(plan.spec, n_factor=chk.box_factor)
        if chk.type == "dominant":
            out.append(_report_dict(dominant_check(plan.spec, chk.p, box)))
        elif chk.type == "maximal":
            eps = chk.epsilons
            if isinstance(eps, str):
                count = int(eps[4:])
                top = linf_norm(sup_field(plan.spec, box), plan.spec.norm)
                if top <= 0.0:
                    grid = tuple(float(v) for v in np.geomspace(1e-6, 1.0, count))
                else:
                    grid = tuple(float(v) for v in np.geomspace(0.05 * top, 1.2 * top, count))
            else:
                grid = eps
            out.extend(_report_dict(r) for r in epsilon_sweep(plan.spec, chk.p, grid, box))
        else:
            rep = orlicz_class_report(plan.spec, chk.m, box)
            out.append({
                "theorem": "orlicz-class",
                "m": rep.m,
                "input_functional": rep.input_functional,
                "sup_functional": rep.sup_functional,
                "both_finite": rep.both_finite,
                "satisfied": rep.both_finite,
                "truncation": rep.truncation.describe(),
            })
    return out


def execute_plan(plan: ExperimentPlan, out_dir: str | Path) -> RunResult:
    """Computes the trace and all checks, then writes the three artifacts."""
    spec = plan.spec
    if spec.is_weighted:
        reference = stabilized_reference(spec)
        desc = "stabilized reference (one exact weight/orbit period)"
    else:
        reference = limit_target(spec)
        desc = None
    trace = convergence_trace(spec, plan.n1_grid, plan.n2_grid, plan.trace_p,
                              reference=reference if spec.is_weighted else None)
    if desc is None:
        desc = trace.target_description
    reports = _run_checks(plan)
    manifest = {
        "config": plan.config_echo,
        "seed": plan.seed,
        "version": __version__,
        "target": desc,
    }
    trace_text = render_trace_csv(trace)
    reports_text = _json_text(reports)
    manifest_text = _json_text(manifest)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trace.csv").write_text(trace_text)
    (out / "reports.json").write_text(reports_text)
    (out / "manifest.json").write_text(manifest_text)
    any_failed = any(not r.get("satisfied", True) for r in reports)
    return RunResult(ok=not any_failed, any_check_failed=any_failed,
                     files=("trace.csv", "reports.json", "manifest.json"))
