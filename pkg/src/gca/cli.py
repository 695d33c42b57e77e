"""Command-line entry point: JSON instances in, JSON reports out.

Exit codes: 0 when every verdict holds, 1 on a failed verification, 2 on
malformed input or usage errors.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import __version__
from .courant import CourantData, IsoData, check_axioms, check_iso, compose_iso, random_triples, untwist_locally
from .dirac import DiracQuadruple, adapted_basis, adapted_gram_ok, check_index_zero, engineered_quadruple, random_quadruple
from .errors import GcaError, InvalidInput, NoAdaptedSplit
from .exactnum import parse_scalar
from .gcs import GCSField, build_normal_form, build_wang_case, default_grid, full_report
from .lagrangian import (
    AdmissibleSystem,
    build_lagrangian,
    build_parabolic,
    is_weak_regular,
    simple_roots_of,
    system_from_json,
    v_catalogue,
    weak_regular_span,
)
from .liealg import QuadraticLieAlgebra, get_algebra, standard_roots, validate_quadratic

KINDS = ("algebra", "courant", "quadruple", "gcsfield", "lagrangian-system")


class UsageError(Exception):
    pass


def _max_degree(obj) -> int:
    """Largest total degree of any serialized polynomial term in obj."""
    if isinstance(obj, dict):
        if "exponents" in obj and isinstance(obj["exponents"], list):
            return sum(int(e) for e in obj["exponents"])
        return max((_max_degree(v) for v in obj.values()), default=-1)
    if isinstance(obj, list):
        return max((_max_degree(v) for v in obj), default=-1)
    return -1


def degree_cap():
    raw = os.environ.get("GCA_MAX_DEGREE")
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise UsageError(f"GCA_MAX_DEGREE must be an integer, got {raw!r}") from exc


def load_instance(path: str, kind: str) -> dict:
    """Read an instance file; accepts the {kind, body, meta} wrapper or a bare body."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    # a report written by a generating command carries its instance
    if isinstance(data, dict) and "command" in data and isinstance(data.get("report"), dict):
        data = data["report"].get("instance", data)
    if isinstance(data, dict) and "body" in data and "kind" in data:
        if kind is not None and data["kind"] != kind:
            raise UsageError(f"{path}: expected an instance of kind {kind!r}, got {data['kind']!r}")
        data = data["body"]
    if not isinstance(data, dict):
        raise UsageError(f"{path}: instance body must be a JSON object")
    cap = degree_cap()
    if cap is not None and _max_degree(data) > cap:
        raise UsageError(f"{path}: polynomial degree {_max_degree(data)} exceeds GCA_MAX_DEGREE={cap}")
    return data


def instance(kind: str, body: dict, seed) -> dict:
    return {"kind": kind, "body": body, "meta": {"seed": seed, "toolVersion": __version__}}


def _algebra(ref: str) -> QuadraticLieAlgebra:
    if os.path.exists(ref):
        return QuadraticLieAlgebra.from_json(load_instance(ref, "algebra"))
    try:
        return get_algebra(ref)
    except GcaError as exc:
        raise UsageError(str(exc)) from exc


def _cert_verdicts(cert_json: dict, prefix: str = ""):
    verdicts = {prefix + k: bool(v) for k, v in cert_json.get("checks", {}).items()}
    witnesses = {}
    if cert_json.get("failure") is not None:
        witnesses[prefix + cert_json["failure"]] = cert_json.get("witness")
    return verdicts, witnesses


# ---------------------------------------------------------------------------
# subcommands; each returns (verdicts, witnesses, report)


def cmd_validate_algebra(args):
    g = _algebra(args.algebra)
    res = validate_quadratic(g)
    verdicts = {k: res[k] for k in ("jacobi", "adInvariance", "nondegenerate")}
    report = {"algebra": g.to_json(), "validation": res}
    if args.roots:
        report["roots"] = standard_roots(g).to_json()
    return verdicts, {}, report


def _courant(args) -> CourantData:
    if args.file:
        return CourantData.from_json(load_instance(args.file, "courant"))
    return CourantData.untwisted(_algebra(args.algebra), args.n)


def cmd_check_axioms(args):
    data = _courant(args)
    triples = random_triples(data, args.count, args.seed, args.degree)
    cert = check_axioms(data, triples).to_json()
    v, w = _cert_verdicts(cert)
    return v, w, {"axioms": cert}


def cmd_untwist(args):
    data = CourantData.from_json(load_instance(args.file, "courant"))
    chain, final = untwist_locally(data)
    total = IsoData.identity(data.algebra, data.n)
    for step in chain:
        total = compose_iso(step, total)
    iso = check_iso(total, data, final).to_json()
    verdicts = {"untwisted": final.is_untwisted()}
    v, w = _cert_verdicts(iso, "composite:")
    verdicts.update(v)
    report = {"chain": [s.to_json() for s in chain], "final": instance("courant", final.to_json(), args.seed),
              "composite": iso}
    return verdicts, w, report


def cmd_index_zero(args):
    if args.file:
        q = DiracQuadruple.from_json(load_instance(args.file, "quadruple"))
    else:
        rng = random.Random(args.seed)
        g = _algebra(args.algebra)
        if args.engineered in ("positive", "negative"):
            q = None
            while q is None:
                q = engineered_quadruple(args.V, g, rng, args.engineered == "positive")
        else:
            q = random_quadruple(args.V, g, rng)
    rep = check_index_zero(q).to_json()
    verdicts = {"indexZero": rep["verdict"], "oracleAgrees": rep["oracleAgrees"]}
    witnesses = {} if rep["verdict"] else {"indexZero": {"failingCondition": rep["failingCondition"],
                                                          "oracleRealIndex": rep["oracleRealIndex"]}}
    return verdicts, witnesses, {"quadruple": instance("quadruple", q.to_json(), args.seed), "report": rep}


def _field_report(f: GCSField, args):
    rep = full_report(f, default_grid(f.n, args.grid))
    verdicts, witnesses = {}, {}
    for key in ("integrability", "indexZero", "regular"):
        v, w = _cert_verdicts(rep[key], key + ":")
        verdicts.update(v)
        witnesses.update(w)
    verdicts["integrability:oracleAgrees"] = bool(rep["integrability"].get("details", {}).get("oracleAgrees", True))
    return verdicts, witnesses, rep


def cmd_check(args):
    f = GCSField.from_json(load_instance(args.file, "gcsfield"))
    v, w, rep = _field_report(f, args)
    return v, w, {"report": rep}


def _split_failure(exc: NoAdaptedSplit):
    return {"cartanSplit": False}, {"cartanSplit": {"error": str(exc), "witness": exc.witness}}, {}


def cmd_normal_form(args):
    g = _algebra(args.algebra)
    try:
        f = build_normal_form(g, args.n, args.k, args.p, args.q)
    except NoAdaptedSplit as exc:
        return _split_failure(exc)
    v, w, rep = _field_report(f, args)
    return v, w, {"instance": instance("gcsfield", f.to_json(), args.seed), "report": rep}


def cmd_wang(args):
    g = _algebra(args.algebra)
    try:
        f = build_wang_case(g, args.k)
    except NoAdaptedSplit as exc:
        return _split_failure(exc)
    v, w, rep = _field_report(f, args)
    return v, w, {"instance": instance("gcsfield", f.to_json(), args.seed), "report": rep}


def cmd_adapted_basis(args):
    data = load_instance(args.file, None)
    try:
        if "metric" in data:
            G = [[parse_scalar(str(x)) for x in row] for row in data["metric"]]
        else:
            G = [list(r) for r in _algebra(data["algebraRef"]).metric]
        D = [[parse_scalar(str(x)) for x in v] for v in data["D"]]
    except (KeyError, TypeError) as exc:
        raise UsageError(f"D file needs 'D' and either 'metric' or 'algebraRef': {exc}") from exc
    ab = adapted_basis(D, G)
    ok = adapted_gram_ok(ab, G, D)
    return {"gramBlockForm": ok}, ({} if ok else {"gramBlockForm": {"p": ab.p, "q": ab.q}}), {
        "adaptedBasis": ab.to_json()}


def _index_list(text: str, roots, what: str):
    if not text.strip():
        return []
    out = []
    for tok in text.split(","):
        try:
            k = int(tok)
        except ValueError as exc:
            raise UsageError(f"{what}: expected 1-based simple-root indices, got {tok!r}") from exc
        if not 1 <= k <= len(roots):
            raise UsageError(f"{what}: index {k} out of range 1..{len(roots)}")
        out.append(roots[k - 1])
    return out


def _cli_system(args) -> AdmissibleSystem:
    g = _algebra(args.algebra)
    if args.system:
        return system_from_json(load_instance(args.system, "lagrangian-system"), g)
    R = standard_roots(g)
    neg = [R.neg(a) for a in R.positive]
    S = _index_list(args.S, R.simple, "--S")
    T = _index_list(args.T if args.T is not None else args.S, simple_roots_of(tuple(neg)), "--T")
    P, Q = build_parabolic(R, R.positive, S), build_parabolic(R, neg, T)
    if len(S) != len(T):
        raise UsageError("--S and --T must have the same size")
    dmap = dict(zip(S, T))
    if args.phases:
        vals = [parse_scalar(t) for t in args.phases.split(",")]
        if len(vals) != len(P.bracket_S):
            raise UsageError(f"--phases needs {len(P.bracket_S)} values, one per root of [S]")
    else:
        vals = [parse_scalar("1")] * len(P.bracket_S)
    phases = dict(zip(P.bracket_S, vals))
    if args.V:
        data = load_instance(args.V, "lagrangian-system")
        V = [[parse_scalar(str(x)) for x in v] for v in data.get("V", [])]
    else:
        V = v_catalogue(P, Q, random.Random(args.seed))[0][0]
    return AdmissibleSystem(P, Q, dmap, phases, V)


def cmd_lagrangian(args):
    sys_ = _cli_system(args)
    basis, cert = build_lagrangian(sys_)
    cj = cert.to_json()
    verdicts, witnesses = _cert_verdicts(cj)
    report = {"system": instance("lagrangian-system", sys_.to_json(), args.seed), "certificate": cj,
              "weakRegular": is_weak_regular(sys_)}
    if basis is not None:
        report["basis"] = [[str(x) for x in v] for v in basis]
    if basis is not None and report["weakRegular"] and set(sys_.pPrime.Rplus) == {
            sys_.p.R.neg(a) for a in sys_.p.Rplus}:
        span = weak_regular_span(sys_)
        report["weakRegularSpan"] = span.to_json()
        v, w = _cert_verdicts(span.certificate.to_json(), "span:")
        verdicts.update(v)
        witnesses.update(w)
    return verdicts, witnesses, report


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--grid", type=int, default=3, help="sample points per axis (default 3)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--quiet", action="store_true", help="do not print the report to stdout")

    ap = argparse.ArgumentParser(prog="gca", description="Exact checks for generalized complex structures "
                                 "on transitive Courant algebroids.")
    ap.add_argument("--version", action="version", version=f"gca {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-algebra", parents=[common], help="check a quadratic Lie algebra")
    p.add_argument("algebra", help="built-in name (su2, su3, su2x2, ...) or algebra JSON file")
    p.add_argument("--roots", action="store_true", help="include the standard root data")
    p.set_defaults(func=cmd_validate_algebra)

    p = sub.add_parser("check-axioms", parents=[common], help="Courant axioms on random sections")
    p.add_argument("file", nargs="?", help="CourantData JSON (default: untwisted)")
    p.add_argument("--algebra", default="su2x2")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--degree", type=int, default=2)
    p.set_defaults(func=cmd_check_axioms)

    p = sub.add_parser("untwist", parents=[common], help="untwist CourantData and verify the chain")
    p.add_argument("file")
    p.set_defaults(func=cmd_untwist)

    p = sub.add_parser("index-zero", parents=[common], help="index-zero test of a Dirac quadruple")
    p.add_argument("file", nargs="?", help="quadruple JSON (default: random)")
    p.add_argument("--algebra", default="su2x2")
    p.add_argument("--V", type=int, default=4, help="dimension of V for random quadruples")
    p.add_argument("--engineered", choices=("positive", "negative"))
    p.set_defaults(func=cmd_index_zero)

    p = sub.add_parser("check", parents=[common], help="integrability, index zero and regularity")
    p.add_argument("file", help="GCS field JSON")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("normal-form", parents=[common], help="build and check a normal form")
    p.add_argument("--algebra", default="su2x2")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--q", type=int, default=0)
    p.set_defaults(func=cmd_normal_form)

    p = sub.add_parser("wang", parents=[common], help="build and check the complex-base case")
    p.add_argument("--algebra", default="su3x3")
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(func=cmd_wang)

    p = sub.add_parser("adapted-basis", parents=[common], help="adapted basis of a maximal isotropic D")
    p.add_argument("file", help="JSON with D and a metric or algebraRef")
    p.set_defaults(func=cmd_adapted_basis)

    p = sub.add_parser("lagrangian", parents=[common], help="Lagrangian subalgebra of the double")
    p.add_argument("--algebra", default="su2")
    p.add_argument("--system", help="lagrangian-system JSON (overrides the flags below)")
    p.add_argument("--S", default="", help="1-based indices of simple roots, comma separated")
    p.add_argument("--T", default=None, help="indices into the simple roots of R-minus (default: --S)")
    p.add_argument("--phases", default="", help="phases for the roots of [S], comma separated")
    p.add_argument("--V", help="JSON file with a V basis in double coordinates")
    p.set_defaults(func=cmd_lagrangian)
    return ap


def _emit(doc: dict, args) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif not getattr(args, "quiet", False):
        sys.stdout.write(text)


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        verdicts, witnesses, report = args.func(args)
    except (UsageError, InvalidInput) as exc:
        doc = {"command": args.command, "error": str(exc), "witness": getattr(exc, "witness", None),
               "ok": False}
        _emit(doc, args)
        print(f"gca: error: {exc}", file=sys.stderr)
        return 2
    except GcaError as exc:
        doc = {"command": args.command, "ok": False, "verdicts": {type(exc).__name__: False},
               "witnesses": {type(exc).__name__: {"error": str(exc), "witness": exc.witness}}}
        _emit(doc, args)
        return 1
    ok = all(verdicts.values())
    doc = {"command": args.command, "ok": ok, "verdicts": verdicts, "witnesses": witnesses,
           "report": report, "meta": {"seed": args.seed, "toolVersion": __version__}}
    _emit(doc, args)
    return 0 if ok else 1


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
