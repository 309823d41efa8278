"""Command line front end.

Every command emits one document ``{command, inputs_digest, findings, pass}``
either as JSON (``--format structured``) or as plain text. Exit status is 0
when the document passes, 1 when a check fails and 2 on usage or input
errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from . import __version__
from .aal import (
    Report, finite_equivalential_refutation, implicative_report,
    isomorphism_failure_report, no_alg_sem_witness, pdt_consequence_on,
    pt_consequence_on,
)
from .algebra import (
    FinBiHA, algebra_from_document, algebra_to_document, all_congruences, c3,
    dn_stabilization, eq_consequence, interpret, lattice_filters,
    trivial_algebra, two_element, upset_algebra, validate,
)
from .hilbert import CANNED, LOGICS, canned, check, from_document, to_document
from .kripke import (
    countermodel_search, forces, global_consequence_on, local_consequence_on,
    model_from_document, model_to_document, n_bisimilar, validate_model,
)
from .syntax import ParseError, depth, parse, render, variables

BUILTIN_ALGEBRAS = {"@c3": c3, "@boolean": two_element, "@trivial": trivial_algebra}


class UsageError(Exception):
    """Bad input; reported with exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # keep argparse's exit status 2
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# input helpers

def _read_json(path: str, files: dict[str, str]) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    files[path] = hashlib.sha256(text.encode()).hexdigest()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _formula(text: str, what: str = "formula"):
    try:
        return parse(text)
    except ParseError as exc:
        raise UsageError(f"{what} {text!r}: {exc}") from None


def _equation(text: str):
    parts = text.split("=")
    if len(parts) != 2:
        raise UsageError(f"equation {text!r} must have exactly one '='")
    return _formula(parts[0], "equation side"), _formula(parts[1], "equation side")


def _load_model(path: str, files: dict[str, str]):
    doc = _read_json(path, files)
    try:
        return model_from_document(doc)
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load_algebra(path: str, files: dict[str, str]) -> FinBiHA:
    if path in BUILTIN_ALGEBRAS:
        return BUILTIN_ALGEBRAS[path]()
    doc = _read_json(path, files)
    try:
        return algebra_from_document(doc)
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _world(m, key: str) -> int:
    try:
        return m.world(key)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None


def _report(rep: Report) -> tuple[dict[str, Any], bool, str]:
    return rep.to_dict(), rep.passed, rep.to_text()


# ---------------------------------------------------------------------------
# commands; each returns (findings, passed, text)

def cmd_parse(args, files):
    f = _formula(args.formula)
    out = render(f, sugar=args.sugar, unicode=args.unicode)
    findings = {"rendered": out, "depth": depth(f), "variables": sorted(variables(f))}
    return findings, True, out


def cmd_model_check(args, files):
    m = _load_model(args.file, files)
    rep = validate_model(m)
    if not rep:
        return ({"valid": False, "violations": [list(v) for v in rep.violations]}, False,
                f"invalid model: {rep.violations}")
    f = _formula(args.formula)
    w = _world(m, args.world)
    val = forces(m, w, f)
    return ({"world": m.label(w), "formula": render(f), "forced": val}, val,
            f"{m.label(w)} {'forces' if val else 'does not force'} {render(f, sugar=True)}")


def cmd_model_consequence(args, files):
    m = _load_model(args.file, files)
    if not validate_model(m):
        raise UsageError(f"{args.file}: model is not valid")
    gamma = [_formula(g) for g in args.gamma]
    f = _formula(args.phi)
    fn = local_consequence_on if args.mode == "local" else global_consequence_on
    val = fn(m, gamma, f)
    text = f"{args.mode} consequence {'holds' if val else 'fails'}"
    return {"mode": args.mode, "holds": val}, val, text


def cmd_model_bisim(args, files):
    m1 = _load_model(args.file1, files)
    m2 = _load_model(args.file2, files)
    for path, m in ((args.file1, m1), (args.file2, m2)):
        if not validate_model(m):
            raise UsageError(f"{path}: model is not valid")
    w1, w2 = _world(m1, args.w1), _world(m2, args.w2)
    val = n_bisimilar(m1, w1, m2, w2, args.n)
    return ({"n": args.n, "bisimilar": val}, val,
            f"{args.n}-bisimilar: {'yes' if val else 'no'}")


def cmd_model_search(args, files):
    gamma = [_formula(g) for g in args.gamma]
    f = _formula(args.phi)
    if args.max_worlds < 1:
        raise UsageError("--max-worlds must be at least 1")
    found = countermodel_search(gamma, f, args.max_worlds, args.mode, args.jobs)
    if found is None:
        return ({"mode": args.mode, "max_worlds": args.max_worlds, "countermodel": None}, True,
                f"no countermodel with at most {args.max_worlds} worlds")
    m = found.model
    findings = {"mode": args.mode, "max_worlds": args.max_worlds,
                "countermodel": model_to_document(m),
                "world": None if found.world is None else m.label(found.world)}
    text = f"countermodel: {json.dumps(model_to_document(m), sort_keys=True)}"
    if found.world is not None:
        text += f" at world {m.label(found.world)}"
    return findings, False, text


def cmd_alg_validate(args, files):
    a = _load_algebra(args.file, files)
    rep = validate(a)
    return rep.to_dict(), rep.ok, "valid" if rep else rep.message


def _valid_algebra(path: str, files) -> FinBiHA:
    a = _load_algebra(path, files)
    rep = validate(a)
    if not rep:
        raise UsageError(f"{path}: not a bi-Heyting algebra ({rep.message})")
    return a


def cmd_alg_congruences(args, files):
    a = _valid_algebra(args.file, files)
    cons = all_congruences(a)
    blocks = [[[a.label(x) for x in cls] for cls in c.classes()] for c in cons]
    text = "\n".join(" | ".join(",".join(cls) for cls in b) for b in blocks)
    return {"count": len(cons), "congruences": blocks}, True, f"{len(cons)} congruences\n{text}"


def cmd_alg_filters(args, files):
    a = _valid_algebra(args.file, files)
    fs = [[a.label(x) for x in sorted(f)] for f in lattice_filters(a)]
    text = "\n".join("{" + ",".join(f) + "}" for f in fs)
    return {"count": len(fs), "filters": fs}, True, f"{len(fs)} lattice filters\n{text}"


def _valuation(a: FinBiHA, text: str) -> dict[str, int]:
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in item:
            raise UsageError(f"valuation entry {item!r} must look like p=value")
        name, value = (s.strip() for s in item.split("=", 1))
        try:
            out[name] = a.element(value)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
    return out


def cmd_alg_eval(args, files):
    a = _valid_algebra(args.file, files)
    v = _valuation(a, args.val)
    f = _formula(args.formula)
    try:
        x = interpret(a, v, f)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return {"element": x, "label": a.label(x)}, True, a.label(x)


def cmd_alg_entails(args, files):
    family = [_valid_algebra(p, files) for p in args.files]
    theta = [_equation(t) for t in args.theta]
    eq = _equation(args.eq)
    val = eq_consequence(family, theta, eq)
    return {"holds": val}, val, f"equational consequence {'holds' if val else 'fails'}"


def cmd_alg_upsets(args, files):
    m = _load_model(args.model, files)
    if not validate_model(m):
        raise UsageError(f"{args.model}: model is not valid")
    a = upset_algebra(m)
    doc = algebra_to_document(a)
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return {"size": a.size, "algebra": doc}, True, f"{a.size} upsets"


def cmd_alg_dn_stab(args, files):
    a = _valid_algebra(args.file, files)
    n = dn_stabilization(a)
    return {"index": n, "size": a.size}, n <= a.size, f"double negation stabilises at {n}"


def cmd_proof_check(args, files):
    doc = _read_json(args.file, files)
    try:
        d = from_document(doc)
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"{args.file}: {exc}") from None
    rep = check(d, args.logic)
    text = "valid" if rep.ok else f"invalid at {rep.path}: {rep.message}"
    return rep.to_dict(), rep.ok, text


def cmd_proof_canned(args, files):
    if args.name == "list":
        names = {k: {"arity": e.arity, "logics": list(e.logics), "doc": e.doc}
                 for k, e in sorted(CANNED.items())}
        text = "\n".join(f"{k}/{v['arity']} [{','.join(v['logics'])}] {v['doc']}"
                         for k, v in names.items())
        return {"canned": names}, True, text
    fs = [_formula(s) for s in args.args]
    try:
        d = canned(args.name, fs, args.logic)
    except KeyError:
        raise UsageError(f"unknown canned derivation {args.name!r}") from None
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    logic = args.logic or CANNED[args.name].logics[0]
    rep = check(d, logic)
    ctx = ", ".join(sorted(render(g) for g in d.context))
    findings = {"logic": logic, "check": rep.to_dict(), "derivation": to_document(d)}
    return findings, rep.ok, f"{ctx} |- {render(d.conclusion)} [{logic}, {d.size()} nodes]"


def cmd_repro_iso(args, files):
    return _report(isomorphism_failure_report())


def cmd_repro_xmas(args, files):
    try:
        return _report(finite_equivalential_refutation(args.n))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_repro_no_alg_sem(args, files):
    m = _load_model(args.model, files)
    e, d = _formula(args.epsilon), _formula(args.delta)
    w = _world(m, args.world)
    try:
        return _report(no_alg_sem_witness(e, d, m, w, args.var))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_repro_implicative(args, files):
    return _report(implicative_report())


def cmd_aal(args, files):
    family = [_valid_algebra(p, files) for p in args.files]
    gamma = [_formula(g) for g in args.gamma]
    f = _formula(args.phi)
    fn = pt_consequence_on if args.relation == "pt" else pdt_consequence_on
    val = fn(family, gamma, f)
    # truth preservation matches the strong logic, degrees of truth the weak one
    reading = "preserving truth (sBIL)" if args.relation == "pt" else "preserving degrees of truth (wBIL)"
    return {"relation": args.relation, "reading": reading, "holds": val}, val, \
        f"{args.relation} consequence {'holds' if val else 'fails'} [{reading}]"


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--output", help="write the document here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker cap (searches run in-process)")

    p = _Parser(prog="biint", description="Bi-intuitionistic logic workbench.")
    p.add_argument("--version", action="version", version=f"biint {__version__}")
    sub = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def leaf(parent, name, fn, help_text):
        q = parent.add_parser(name, parents=[common], help=help_text)
        q.set_defaults(fn=fn)
        return q

    q = leaf(sub, "parse", cmd_parse, "parse and render a formula")
    q.add_argument("formula")
    q.add_argument("--sugar", action="store_true", help="print ! and ~ where possible")
    q.add_argument("--unicode", action="store_true")

    model = sub.add_parser("model", help="Kripke models").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    q = leaf(model, "check", cmd_model_check, "forcing at a world")
    q.add_argument("file")
    q.add_argument("--formula", required=True)
    q.add_argument("--world", required=True)
    q = leaf(model, "consequence", cmd_model_consequence, "local or global consequence")
    q.add_argument("file")
    q.add_argument("--mode", choices=("local", "global"), default="local")
    q.add_argument("--gamma", nargs="*", default=[])
    q.add_argument("--phi", required=True)
    q = leaf(model, "bisim", cmd_model_bisim, "n-bisimilarity of two pointed models")
    q.add_argument("file1")
    q.add_argument("w1")
    q.add_argument("file2")
    q.add_argument("w2")
    q.add_argument("--n", type=int, required=True)
    q = leaf(model, "search", cmd_model_search, "bounded countermodel search")
    q.add_argument("--gamma", nargs="*", default=[])
    q.add_argument("--phi", required=True)
    q.add_argument("--max-worlds", type=int, default=3)
    q.add_argument("--mode", choices=("local", "global"), default="local")

    alg = sub.add_parser("algebra", help="finite bi-Heyting algebras").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    for name, fn, h in (("validate", cmd_alg_validate, "check the algebra laws"),
                        ("congruences", cmd_alg_congruences, "list all congruences"),
                        ("filters", cmd_alg_filters, "list lattice filters"),
                        ("dn-stab", cmd_alg_dn_stab, "double negation stabilisation index")):
        leaf(alg, name, fn, h).add_argument("file")
    q = leaf(alg, "eval", cmd_alg_eval, "evaluate a formula")
    q.add_argument("file")
    q.add_argument("--val", default="", help="e.g. p=1,q=0")
    q.add_argument("--formula", required=True)
    q = leaf(alg, "entails", cmd_alg_entails, "equational consequence over algebras")
    q.add_argument("files", nargs="+")
    q.add_argument("--theta", nargs="*", default=[])
    q.add_argument("--eq", required=True)
    q = leaf(alg, "upsets", cmd_alg_upsets, "upset algebra of a model frame")
    q.add_argument("model")
    q.add_argument("-o", "--out", help="algebra file to write")

    proof = sub.add_parser("proof", help="Hilbert derivations").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    q = leaf(proof, "check", cmd_proof_check, "check a derivation file")
    q.add_argument("file")
    q.add_argument("--logic", choices=LOGICS, required=True)
    q = leaf(proof, "canned", cmd_proof_canned, "build a library derivation ('list' to list)")
    q.add_argument("name")
    q.add_argument("--args", nargs="*", default=[])
    q.add_argument("--logic", choices=LOGICS)

    repro = sub.add_parser("repro", help="counterexample reproductions").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    leaf(repro, "c3-isomorphism-failure", cmd_repro_iso, "c3 congruences vs filters")
    q = leaf(repro, "xmas", cmd_repro_xmas, "finite equivalence formulas fail")
    q.add_argument("--n", type=int, default=1)
    q = leaf(repro, "no-alg-sem", cmd_repro_no_alg_sem, "no algebraic semantics witness")
    q.add_argument("--epsilon", required=True)
    q.add_argument("--delta", required=True)
    q.add_argument("--model", required=True)
    q.add_argument("--world", required=True)
    q.add_argument("--var", default="x")
    leaf(repro, "implicative", cmd_repro_implicative, "IL1-IL5 derivations")

    aal = sub.add_parser("aal", help="truth and degrees of truth").add_subparsers(
        dest="relation", required=True, parser_class=_Parser)
    for rel in ("pt", "pdt"):
        q = leaf(aal, rel, cmd_aal, f"{rel} consequence over algebra files")
        q.add_argument("files", nargs="+", help="algebra files or @c3, @boolean, @trivial")
        q.add_argument("--gamma", nargs="*", default=[])
        q.add_argument("--phi", required=True)
    return p


def _digest(args: argparse.Namespace, files: dict[str, str]) -> str:
    skip = {"fn", "format", "output", "jobs"}
    inputs = {k: v for k, v in vars(args).items() if k not in skip}
    blob = json.dumps({"args": inputs, "files": files}, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def _command_name(args: argparse.Namespace) -> str:
    parts = [args.group]
    for attr in ("cmd", "relation"):
        if getattr(args, attr, None):
            parts.append(getattr(args, attr))
    return " ".join(parts)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    files: dict[str, str] = {}
    if args.jobs < 1:
        print("biint: error: --jobs must be at least 1", file=sys.stderr)
        return 2
    try:
        findings, passed, text = args.fn(args, files)
    except UsageError as exc:
        print(f"biint: error: {exc}", file=sys.stderr)
        return 2
    doc = {"command": _command_name(args), "inputs_digest": _digest(args, files),
           "findings": findings, "pass": passed}
    if args.format == "structured":
        out = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        out = text.rstrip("\n") + "\n"
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
