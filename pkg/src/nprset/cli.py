"""Command line front end.

Every subcommand prints one JSON document on stdout.  Exit status 0 means
the verdict holds (or a witness / extraction was produced), 1 means it fails
with a certificate printed, and 2 means the input was rejected.

    nprset check-npr --group "Z/4*Z/2*Z/2" --elements '[[1,1,0],[1,0,1]]' --n 2
    nprset batch jobs.json
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from .certify import (InterpolationProblem, Witness, brute_force_check, interpolate, is_independent,
                      is_npr, weak_kronecker_eps)
from .errors import CertificationError, NprError
from .extract import (cardinality_diagnostic, compose_npr, extract_any, extract_ppr,
                      max_independent_subset, staircase_extract)
from .groups import ElementSet, GroupSpec, parse_group_spec
from .structure import decompose_prop35, map_set, quotient_by_torsion, quotient_pn

COMMANDS = ("check-npr", "check-independent", "interpolate", "extract", "quotient",
            "decompose", "eps", "compose", "oracle")

# fields accepted by each command besides "command", "group" and "elements"
_FIELDS = {
    "check-npr": {"n"},
    "check-independent": set(),
    "interpolate": {"n", "targets"},
    "extract": {"p", "n", "method"},
    "quotient": {"p", "n", "torsion"},
    "decompose": {"n"},
    "eps": {"grid"},
    "compose": {"components", "pairings"},
    "oracle": {"n"},
}
_REQUIRED = {
    "check-npr": {"n"}, "interpolate": {"n", "targets"}, "decompose": {"n"},
    "eps": {"grid"}, "compose": {"components"}, "oracle": {"n"},
}
METHODS = ("any", "ppr", "staircase", "independent", "diagnostic")


class InputError(Exception):
    pass


def dumps(payload: Any) -> str:
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False)


def _int(value, name):
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{name} must be an integer, got {value!r}")
    return value


def _int_rows(rows, name):
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError(f"{name} must be a list of integer arrays")
    return [[_int(x, name) for x in r] for r in rows]


def _element_set(spec: GroupSpec, rows) -> ElementSet:
    return ElementSet.from_coords(spec, _int_rows(rows, "elements"))


def validate_job(job: Any) -> dict:
    if not isinstance(job, dict):
        raise InputError("a job must be a JSON object")
    cmd = job.get("command")
    if cmd not in COMMANDS:
        raise InputError(f"unknown command {cmd!r}")
    allowed = {"command", "group"} | _FIELDS[cmd] | (set() if cmd == "compose" else {"elements"})
    unknown = sorted(set(job) - allowed)
    if unknown:
        raise InputError(f"unknown fields for {cmd}: {', '.join(unknown)}")
    needed = {"group"} | _REQUIRED.get(cmd, set()) | (set() if cmd == "compose" else {"elements"})
    missing = sorted(k for k in needed if job.get(k) is None)
    if missing:
        raise InputError(f"missing fields for {cmd}: {', '.join(missing)}")
    return job


def run_job(job: dict) -> tuple[int, Any]:
    """Execute one validated job; returns ``(exit_code, payload)``."""
    job = validate_job(job)
    cmd = job["command"]
    spec = parse_group_spec(job["group"])
    E = None if cmd == "compose" else _element_set(spec, job["elements"])

    if cmd == "check-npr":
        cert = is_npr(E, _int(job["n"], "n"))
        return (0 if cert.holds else 1), cert.to_json()

    if cmd == "check-independent":
        cert = is_independent(E)
        return (0 if cert.holds else 1), cert.to_json()

    if cmd == "interpolate":
        targets = [_int(c, "targets") for c in job["targets"]]
        result = interpolate(InterpolationProblem(E, _int(job["n"], "n"), tuple(targets)))
        return (0 if isinstance(result, Witness) else 1), result.to_json()

    if cmd == "extract":
        method = job.get("method") or ("any" if job.get("p") is None else "ppr")
        if method not in METHODS:
            raise InputError(f"unknown extraction method {method!r}")
        if method == "any":
            return 0, extract_any(E).to_json()
        if method == "independent":
            S = max_independent_subset(E)
            return 0, {"subset": S.coords(), "certificate": is_independent(S).to_json()
                       if len(S) else {"verdict": "holds"}}
        p = _int(job.get("p"), "p")
        if method == "ppr":
            return 0, extract_ppr(E, p).to_json()
        if method == "staircase":
            return 0, staircase_extract(E, p).to_json()
        return 0, cardinality_diagnostic(E, p, _int(job.get("n", 1), "n")).to_json()

    if cmd == "quotient":
        if job.get("torsion"):
            Q = quotient_by_torsion(spec)
        else:
            Q = quotient_pn(spec, _int(job.get("p"), "p"), _int(job.get("n", 1), "n"))
        return 0, {"map": Q.to_json(), "image": map_set(Q, E).to_json()}

    if cmd == "decompose":
        try:
            return 0, decompose_prop35(E, _int(job["n"], "n")).to_json()
        except CertificationError as exc:
            if exc.certificate is None:
                raise
            return 1, exc.certificate.to_json()

    if cmd == "eps":
        est = weak_kronecker_eps(E, _int(job["grid"], "grid"))
        return 0, est.to_json()

    if cmd == "compose":
        comps = job["components"]
        if not isinstance(comps, list) or not comps:
            raise InputError("components must be a non-empty list")
        parsed = []
        for c in comps:
            if not isinstance(c, dict) or set(c) - {"elements", "p", "m"}:
                raise InputError("each component needs exactly elements, p and m")
            parsed.append((_element_set(spec, c.get("elements")), _int(c.get("p"), "p"),
                           _int(c.get("m", 1), "m")))
        pairings = job.get("pairings")
        if pairings is not None:
            pairings = _int_rows(pairings, "pairings")
        try:
            out = compose_npr(parsed, pairings)
        except CertificationError as exc:
            if exc.certificate is None:
                raise
            return 1, exc.certificate.to_json()
        N = 1
        for _, p, m in parsed:
            N *= p ** m
        return 0, {"modulus": N, "elements": out.coords(), "certificate": is_npr(out, N).to_json()}

    # oracle
    ok = brute_force_check(E, _int(job["n"], "n"))
    return (0 if ok else 1), {"npr": ok}


def _safe_run(job) -> tuple[int, Any]:
    try:
        return run_job(job)
    except (InputError, NprError, ValueError, TypeError) as exc:
        return 2, {"error": str(exc)}


def run_jobfile(path: str) -> tuple[int, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            jobs = json.load(fh)
    except (OSError, ValueError) as exc:
        return 2, {"error": f"cannot read job file: {exc}"}
    if not isinstance(jobs, list):
        return 2, {"error": "job file must contain a JSON array"}
    results, worst = [], 0
    for i, job in enumerate(jobs):
        code, payload = _safe_run(job)
        if code == 2:
            return 2, {"error": f"job {i}: {payload['error']}", "job": i}
        results.append(payload)
        worst = max(worst, code)
    return worst, results


def _json_arg(text, name):
    try:
        return json.loads(text)
    except ValueError as exc:
        raise InputError(f"--{name} is not valid JSON: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nprset", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        p = sub.add_parser(cmd)
        p.add_argument("--group", required=True, help='group spec, e.g. "Z^2 * Z/4"')
        if cmd != "compose":
            p.add_argument("--elements", required=True, help="JSON list of integer arrays")
        fields = _FIELDS[cmd]
        if "n" in fields:
            p.add_argument("--n", type=int)
        if "p" in fields:
            p.add_argument("--p", type=int)
        if "targets" in fields:
            p.add_argument("--targets", help="JSON integer array, values mod n")
        if "method" in fields:
            p.add_argument("--method", choices=METHODS)
        if "torsion" in fields:
            p.add_argument("--torsion", action="store_true", help="quotient by the torsion subgroup")
        if "grid" in fields:
            p.add_argument("--grid", type=int)
        if "components" in fields:
            p.add_argument("--components", required=True,
                           help='JSON list of {"elements": [...], "p": P, "m": M}')
            p.add_argument("--pairings", help="JSON list of permutations, one per extra component")
    b = sub.add_parser("batch", help="run a JSON array of jobs")
    b.add_argument("path")
    return parser


def run_command(argv) -> tuple[int, Any]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if not exc.code:
            raise
        return 2, {"error": "invalid command line"}
    if args.command == "batch":
        return run_jobfile(args.path)
    job = {"command": args.command, "group": args.group}
    try:
        if args.command != "compose":
            job["elements"] = _json_arg(args.elements, "elements")
        for name in ("targets", "components", "pairings"):
            value = getattr(args, name, None)
            if value is not None:
                job[name] = _json_arg(value, name)
    except InputError as exc:
        return 2, {"error": str(exc)}
    for name in ("n", "p", "method", "grid"):
        value = getattr(args, name, None)
        if value is not None:
            job[name] = value
    if getattr(args, "torsion", False):
        job["torsion"] = True
    return _safe_run(job)


def main(argv=None) -> int:
    code, payload = run_command(sys.argv[1:] if argv is None else argv)
    print(dumps(payload))
    if code == 2 and isinstance(payload, dict) and "error" in payload:
        print(f"nprset: {payload['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
