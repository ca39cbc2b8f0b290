"""Batch front end: JSON problem specs in, JSON reports out.

Commands: gen, cocycle, closed-form, h0, sen, conjecture, sweep, validate.
Exit codes: 0 success, 2 validation failure, 3 computation error; failures
emit a structured {"error": {...}} object.  Reports are byte-deterministic
(sorted keys, canonical rationals), and sweep results are independent of
the worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .closedform import conjecture_residual, h_table, verify_commutative
from .cohomology import h0_solve
from .cosimplicial import CosimpCtx, theta_report
from .errors import (
    ComputationError,
    EngineError,
    NonCommutingSeeds,
    SeedShapeMismatch,
    ValidationError,
)
from .field import FieldDesc, KElem, field_init
from .matrix import KMat
from .sen import sen_operator_matrix, nearly_dR_report
from .series import Trunc
from .stratification import (
    Seeds,
    assemble_epsilon,
    check_near_HT,
    cocycle_residual,
    generate_Amn,
    residual_report,
    valuation_profile,
)

COMMANDS = ("gen", "cocycle", "closed-form", "h0", "sen", "conjecture", "sweep", "validate")


@dataclass
class ProblemSpec:
    field: FieldDesc
    seeds: Seeds
    trunc: Trunc
    prec: int
    options: dict
    raw: dict


def _parse_matrix(field: FieldDesc, data, rank: int) -> KMat:
    rows = []
    for row in data:
        out_row = []
        for entry in row:
            out_row.append(KElem.from_json(field, entry))
        rows.append(out_row)
    mat = KMat.from_rows(field, rows)
    if mat.nrows != rank or mat.ncols != rank:
        raise SeedShapeMismatch(
            f"seed matrix is {mat.nrows}x{mat.ncols}, expected {rank}x{rank}"
        )
    return mat


def load_problem(raw: dict, overrides: dict | None = None) -> ProblemSpec:
    """Validate a raw spec dict against the module preconditions."""
    data = dict(raw)
    if overrides:
        trunc = dict(data.get("trunc", {}))
        if overrides.get("trunc_t") is not None:
            trunc["t"] = overrides["trunc_t"]
        if overrides.get("trunc_x") is not None:
            trunc["x"] = overrides["trunc_x"]
        data["trunc"] = trunc
        if overrides.get("prec") is not None:
            data["padic_prec"] = overrides["prec"]
    for key in ("p", "E_coeffs", "rank", "seeds", "trunc"):
        if key not in data:
            raise ValidationError(f"spec is missing the {key!r} field")
    field = field_init(data["p"], [str(c) for c in data["E_coeffs"]])
    rank = int(data["rank"])
    if rank < 1:
        raise ValidationError("rank must be >= 1")
    trunc_raw = data["trunc"]
    try:
        trunc = Trunc(int(trunc_raw["t"]), int(trunc_raw["x"]))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"bad trunc block: {exc}") from exc
    seeds = Seeds.of([_parse_matrix(field, m, rank) for m in data["seeds"]])
    prec = int(data.get("padic_prec", 10))
    if prec < 1:
        raise ValidationError("padic_prec must be >= 1")
    options = dict(data.get("options", {}))
    return ProblemSpec(field, seeds, trunc, prec, options, data)


def validate_spec(raw: dict) -> dict:
    """List all violated preconditions without computing anything."""
    diagnostics = []

    def check(name, fn):
        try:
            fn()
            diagnostics.append({"check": name, "ok": True})
        except EngineError as exc:
            diagnostics.append(
                {"check": name, "ok": False, "error": type(exc).__name__, "message": str(exc)}
            )

    spec_holder = {}

    def parse():
        spec_holder["spec"] = load_problem(raw)

    check("parse", parse)
    spec = spec_holder.get("spec")
    if spec is None:
        return {"ok": False, "diagnostics": diagnostics}

    def seeds_cover():
        if len(spec.seeds.A1) < spec.trunc.t_order:
            raise SeedShapeMismatch(
                f"need {spec.trunc.t_order} seed matrices, got {len(spec.seeds.A1)}"
            )

    check("seeds_cover_t_order", seeds_cover)

    def commuting():
        if not spec.seeds.commutative():
            raise NonCommutingSeeds("A_{0,1} does not commute with all seeds")

    check("commuting_seeds", commuting)
    ok = all(d["ok"] for d in diagnostics if d["check"] != "commuting_seeds")
    return {"ok": ok, "diagnostics": diagnostics}


def _dispatch(command: str, spec: ProblemSpec) -> dict:
    ctx = CosimpCtx(spec.field, spec.trunc)
    opts = spec.options
    if command == "gen":
        n_max = int(opts.get("n_max", spec.trunc.pd_degree))
        table = generate_Amn(spec.seeds, ctx, n_max)
        return {
            "command": "gen",
            "table": table.to_json(),
            "theta": theta_report(ctx),
            "valuation_profile": valuation_profile(table),
            "near_HT": check_near_HT(
                spec.seeds.a01,
                "probe",
                n_probe=int(opts.get("n_probe", 64)),
                threshold=int(opts.get("threshold", 40)),
            ),
        }
    if command == "cocycle":
        table = generate_Amn(spec.seeds, ctx, spec.trunc.pd_degree)
        residual = cocycle_residual(assemble_epsilon(table, ctx), ctx)
        return {"command": "cocycle", "report": residual_report(residual)}
    if command == "closed-form":
        m_max = int(opts.get("m_max", spec.trunc.t_order - 1))
        report = verify_commutative(spec.seeds, ctx, m_max, spec.trunc.pd_degree)
        ht = h_table(spec.seeds, ctx, m_max)
        return {"command": "closed-form", "verify": report, "h_tilde": ht.to_json()}
    if command == "h0":
        table = generate_Amn(spec.seeds, ctx, spec.trunc.pd_degree)
        sol = h0_solve(table, ctx)
        return {"command": "h0", "solution": sol.to_json()}
    if command == "sen":
        rep = sen_operator_matrix(
            spec.seeds, ctx, spec.prec, int(opts.get("n_phi_max", 24))
        )
        out = rep.to_json()
        out["nearly_dR"] = nearly_dR_report(spec.seeds, ctx)
        return {"command": "sen", "report": out}
    if command == "conjecture":
        k_max = int(opts.get("k_max", 2))
        rep = conjecture_residual(spec.seeds, ctx, k_max)
        flagged = [k for k, r in rep["residuals"].items() if not r["zero"]]
        return {
            "command": "conjecture",
            "report": rep,
            "potential_counterexample": bool(flagged),
            "flagged_k": flagged,
        }
    raise ValidationError(f"unknown command {command!r}")


def _run_worker(payload):
    """Sweep worker: parse and run one instance; must stay picklable."""
    idx, command, raw = payload
    instance_id = raw.get("id", idx)
    try:
        spec = load_problem(raw)
        report = _dispatch(command, spec)
        return {"id": instance_id, "ok": True, "report": report}
    except EngineError as exc:
        return {
            "id": instance_id,
            "ok": False,
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }


def run_sweep(raw: dict, jobs: int) -> dict:
    command = raw.get("command")
    if command not in COMMANDS or command in ("sweep", "validate"):
        raise ValidationError(f"sweep needs a concrete engine command, got {command!r}")
    base = raw.get("base", {})
    instances = raw.get("instances")
    if not isinstance(instances, list) or not instances:
        raise ValidationError("sweep needs a nonempty 'instances' list")
    payloads = []
    for idx, inst in enumerate(instances):
        merged = dict(base)
        merged.update(inst)
        payloads.append((idx, command, merged))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_worker, payloads))
    else:
        results = [_run_worker(p) for p in payloads]
    flagged = []
    for res in results:
        if not res["ok"]:
            flagged.append({"id": res["id"], "reason": "error"})
            continue
        rep = res["report"]
        if rep.get("potential_counterexample"):
            flagged.append({"id": res["id"], "reason": "nonzero conjecture residual"})
        if rep.get("report", {}).get("verdict") == "NONZERO_RESIDUAL":
            flagged.append({"id": res["id"], "reason": "nonzero cocycle residual"})
    return {
        "command": "sweep",
        "engine_command": command,
        "n_instances": len(results),
        "flagged": flagged,
        "results": sorted(results, key=lambda r: str(r["id"])),
    }


def run(command: str, spec_path: str, out_path: str | None = None, **overrides) -> int:
    """File-level entry point; returns the process exit code."""
    jobs = overrides.pop("jobs", None)
    if jobs is None:
        jobs = int(os.environ.get("PRISMSTRAT_JOBS", "1"))
    try:
        with open(spec_path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _emit({"error": {"type": "BadSpecFile", "message": str(exc)}}, out_path)
        return 2
    try:
        if command == "validate":
            report = validate_spec(raw)
        elif command == "sweep":
            report = run_sweep(raw, jobs)
        else:
            spec = load_problem(raw, overrides)
            report = _dispatch(command, spec)
    except ValidationError as exc:
        _emit({"error": {"type": type(exc).__name__, "message": str(exc)}}, out_path)
        return 2
    except ComputationError as exc:
        _emit({"error": {"type": type(exc).__name__, "message": str(exc)}}, out_path)
        return 3
    _emit(report, out_path)
    return 0


def _emit(report: dict, out_path: str | None):
    text = json.dumps(report, sort_keys=True, indent=2)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="prismstrat",
        description="exact stratification calculus for de Rham crystals over O_K",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--spec", required=True, help="problem spec JSON")
        sp.add_argument("--out", default=None, help="report path (default stdout)")
        sp.add_argument("--jobs", type=int, default=None, help="sweep parallelism")
        sp.add_argument("--trunc-t", type=int, default=None, help="override t-order")
        sp.add_argument("--trunc-x", type=int, default=None, help="override pd degree")
        sp.add_argument("--prec", type=int, default=None, help="override p-adic precision")
    args = parser.parse_args(argv)
    return run(
        args.command,
        args.spec,
        args.out,
        jobs=args.jobs,
        trunc_t=args.trunc_t,
        trunc_x=args.trunc_x,
        prec=args.prec,
    )


if __name__ == "__main__":
    sys.exit(main())
