"""``cartlog`` command line.

Exit codes: 0 proved/true/ok, 1 refuted/false, 2 unknown (budget ran out),
3 and above for usage, input and internal errors.  Artifacts are written
atomically; nothing time-dependent goes into them, so repeated runs are
byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import lab
from .dsl import ParseError, Printer, format_document, format_monoid, parse_document, parse_formula
from .kernel import check_proof
from .models import ModelError, counterexample, is_model, load_model, model_to_json, satisfies
from .search import ProofBudget, search
from .serialize import dumps, proof_dumps, proof_loads
from .syncat import (
    SynObject, canonical_interpretation, compose, cod_context, format_morphism, identity, make_morphism,
    subobject_leq,
)
from .syntax import Sequent, alpha_equal_sequent, rename_context
from .theories import (
    Theory, Translation, TranslationError, apply_translation, verify_translation,
)
from .wordprob import (
    MonoidPresentation, ReductionGap, WordError, certificate_to_closed_proof, certificate_to_proof,
    encode, encode_closed, equivalent, finite_quotient, monoid_algebra_model, truncated_quotient,
)

EXIT = {"proved": 0, "true": 0, "ok": 0, "refuted": 1, "false": 1, "unknown": 2, "error": 4}
USAGE = 3
DEFAULT_DEPTH = 6
BASES: dict[str, Callable[[], lab.FiniteCategory]] = {
    "2chain": lab.two_chain,
    "3chain": lambda: lab.chain(3),
    "diamond": lab.diamond,
}


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    verdict: str
    command: str
    details: dict = field(default_factory=dict)
    artifacts: dict[str, str] = field(default_factory=dict)
    budget: dict = field(default_factory=dict)
    show: bool = False  # echo the main artifact on stdout

    @property
    def exit_code(self) -> int:
        return EXIT[self.verdict]

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "command": self.command,
            "details": self.details,
            "artifacts": sorted(self.artifacts),
            "budget": self.budget,
        }


def write_atomic(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_theory(path: str) -> Theory:
    doc = parse_document(_read(path), source=path)
    names = [n or f"ax{i}" for i, n in enumerate(doc.axiom_names)]
    return Theory(doc.signature, tuple(doc.axioms), tuple(names))


def load_sequent(path: str, theory: Theory) -> Sequent:
    doc = parse_document(_read(path), theory.signature, source=path)
    if not doc.sequents:
        raise UsageError(f"{path} declares no sequent")
    return doc.sequents[0]


def budget_from(args) -> ProofBudget:
    return ProofBudget(args.depth, args.max_sequents, args.seed)


def _budget_json(b: ProofBudget) -> dict:
    return {"depth": b.max_depth, "max_sequents": b.max_sequents, "seed": b.seed}


# -- logic ------------------------------------------------------------------


def cmd_check(args) -> RunReport:
    doc = parse_document(_read(args.file), source=args.file)
    theory = Theory(doc.signature, tuple(doc.axioms), tuple(n or f"ax{i}" for i, n in enumerate(doc.axiom_names)))
    text = format_document(doc.signature, doc.axioms, theory.axiom_names, doc.sequents, doc.monoids)
    details = {"sorts": len(doc.signature.sorts), "functions": len(doc.signature.functions),
               "relations": len(doc.signature.relations), "axioms": len(doc.axioms),
               "sequents": len(doc.sequents), "formulas": len(doc.formulas)}
    verdict = "ok"
    if args.cartesian:
        certs = theory.certify_cartesian(budget_from(args))
        details["cartesian"] = [c.certified for c in certs]
        if not all(c.certified for c in certs):
            verdict = "unknown"
    return RunReport(verdict, "check", details, {"document.ct": text}, show=True)


def cmd_prove(args) -> RunReport:
    theory = load_theory(args.theory)
    seq = load_sequent(args.sequent, theory)
    budget = budget_from(args)
    res = search(theory, seq, budget)
    details = {"sequent": Printer(theory.signature).sequent(seq), "explored": res.explored}
    arts = {}
    if res.proved:
        ok = check_proof(theory, res.proof).ok
        details["checked"] = ok
        details["proof_nodes"] = res.proof.size()
        arts["proof.json"] = proof_dumps(res.proof)
        return RunReport("proved" if ok else "error", "prove", details, arts, _budget_json(budget))
    return RunReport("unknown", "prove", details, arts, _budget_json(budget))


def cmd_check_proof(args) -> RunReport:
    theory = load_theory(args.theory)
    try:
        proof = proof_loads(_read(args.proof), theory.signature)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{args.proof}: malformed proof file ({exc})") from None
    res = check_proof(theory, proof)
    details = {"valid": res.ok, "conclusion": Printer(theory.signature).sequent(proof.conclusion)}
    if not res.ok:
        details["path"] = list(res.path)
        details["reason"] = res.reason
        return RunReport("false", "check-proof", details)
    if args.sequent:
        want = load_sequent(args.sequent, theory)
        details["matches"] = alpha_equal_sequent(proof.conclusion, want)
        if not details["matches"]:
            return RunReport("false", "check-proof", details)
    return RunReport("true", "check-proof", details)


# -- syntactic category -----------------------------------------------------


def _object(text: str, theory: Theory) -> SynObject:
    return SynObject(parse_formula(text, theory.signature, source="<object>"))


def _morphism(text: str, dom: SynObject, cod: SynObject, theory: Theory, budget: ProofBudget):
    fic = parse_formula(text, theory.signature, source="<morphism>")
    ctx = dom.context + cod_context(dom, cod)
    if [v.sort for v in fic.context] != [v.sort for v in ctx]:
        raise UsageError(f"morphism context must list {len(dom.context)} domain then {len(ctx) - len(dom.context)} codomain variables")
    theta = rename_context(fic, ctx).formula
    return make_morphism(theory, theta, dom, cod, budget)


def cmd_syncat(args) -> RunReport:
    theory = load_theory(args.theory)
    budget = budget_from(args)
    bj = _budget_json(budget)
    if args.action == "id":
        o = _object(args.object, theory)
        m = identity(theory, o)
        return _morphism_report("syncat id", m, bj)
    if args.action == "leq":
        phi = parse_formula(args.lower, theory.signature, source="<lower>")
        psi = parse_formula(args.upper, theory.signature, source="<upper>")
        res = subobject_leq(theory, phi, psi, budget)
        arts = {"proof.json": proof_dumps(res.proof)} if res.proved else {}
        return RunReport(res.status, "syncat leq", {"explored": res.explored}, arts, bj)
    # compose
    if args.words:
        if len(args.words) != 2:
            raise UsageError("--words takes two words of unary symbols")
        ms = [canonical_interpretation(theory, list(w.split("."))) for w in args.words]
        g, f = ms
    else:
        if not all((args.dom, args.mid, args.cod, args.f, args.g)):
            raise UsageError("compose needs --dom --mid --cod --f --g, or --words")
        a, b, c = (_object(t, theory) for t in (args.dom, args.mid, args.cod))
        f = _morphism(args.f, a, b, theory, budget)
        g = _morphism(args.g, b, c, theory, budget)
        if f is None or g is None:
            return RunReport("unknown", "syncat compose",
                             {"uncertified": [n for n, m in (("f", f), ("g", g)) if m is None]}, {}, bj)
    return _morphism_report("syncat compose", compose(g, f), bj)


def _morphism_report(cmd: str, m, bj) -> RunReport:
    ok = m.check()
    arts = {f"{name}.json": proof_dumps(p) for name, p in
            zip(("containment", "single_valued", "totality"), m.certificate.proofs())}
    return RunReport("ok" if ok else "error", cmd, {"morphism": format_morphism(m)}, arts, bj)


# -- word problems ----------------------------------------------------------


def _presentation(text: str) -> MonoidPresentation:
    if os.path.exists(text):
        text = _read(text)
    return MonoidPresentation.parse(text)


def _word(w: str) -> str:
    return "" if w == "1" else w


def _cert_json(cert) -> list:
    return [{"position": s.position, "relation": s.relation, "direction": s.direction} for s in cert.steps]


def _countermodel(p: MonoidPresentation, verdict):
    m = verdict.quotient
    if m is None and verdict.normal_forms is not None:
        length = max(len(w) for w in verdict.normal_forms)
        m = truncated_quotient(p, length, verdict.system)
    return m


def pipeline_reduce(p: MonoidPresentation, u: str, v: str, budget: ProofBudget = ProofBudget()) -> RunReport:
    """Decide ``u = v``, then prove the encoded sequent or refute it in ``F_2[M]``."""
    u, v = p.check_word(u), p.check_word(v)
    res = equivalent(p, u, v)
    theory, seq = encode(p, u, v)
    pr = Printer(theory.signature)
    details = {"presentation": format_monoid(p.generators, p.relations), "u": u or "1", "v": v or "1",
               "status": res.status, "sequent": pr.sequent(seq)}
    arts = {"sequent.ct": format_document(theory.signature, theory.axioms, theory.axiom_names, [seq])}
    bj = _budget_json(budget)
    if res.status == "equivalent":
        details["certificate"] = _cert_json(res.certificate)
        try:
            proof = certificate_to_proof(p, res.certificate)
            details["form"] = "open"
        except ReductionGap as exc:
            details["form"] = "closed"
            details["gap"] = str(exc)
            theory, seq = encode_closed(p, u, v)
            proof = certificate_to_closed_proof(p, res.certificate)
            arts["sequent_closed.ct"] = format_document(theory.signature, theory.axioms, theory.axiom_names, [seq])
        ok = check_proof(theory, proof).ok and alpha_equal_sequent(proof.conclusion, seq)
        details["checked"] = ok
        arts["proof.json"] = proof_dumps(proof)
        return RunReport("proved" if ok else "error", "wp pipeline", details, arts, bj)
    if res.status == "inequivalent":
        details["normal_forms"] = [w or "1" for w in res.normal_forms]
        m = _countermodel(p, res)
        if m is None:
            return RunReport("unknown", "wp pipeline", details, arts, bj)
        model = monoid_algebra_model(m, 2, p.symbols())
        valid = is_model(model, theory)
        bad = counterexample(model, seq)
        details["quotient"] = [w or "1" for w in m.elements]
        details["model_valid"] = valid
        details["counterexample"] = None if bad is None else [model.label(v.sort, i) for v, i in zip(seq.context, bad)]
        arts["countermodel.json"] = dumps(model_to_json(model))
        return RunReport("refuted" if valid and bad is not None else "unknown", "wp pipeline", details, arts, bj)
    return RunReport("unknown", "wp pipeline", details, arts, bj)


def cmd_wp(args) -> RunReport:
    p = _presentation(args.presentation)
    if args.action == "table":
        m = finite_quotient(p, args.bound)
        if m is None:
            return RunReport("unknown", "wp table", {"bound": args.bound})
        names = [w or "1" for w in m.elements]
        rows = {names[a]: [names[m.mul(a, b)] for b in range(len(names))] for a in range(len(names))}
        return RunReport("ok", "wp table", {"elements": names, "table": rows})
    u, v = _word(args.u), _word(args.v)
    if args.action == "eq":
        res = equivalent(p, u, v)
        details = {"status": res.status}
        if res.certificate is not None:
            details["steps"] = len(res.certificate.steps)
            details["certificate"] = _cert_json(res.certificate)
            details["chain"] = [w or "1" for w in res.certificate.replay(p)]
        if res.normal_forms is not None:
            details["normal_forms"] = [w or "1" for w in res.normal_forms]
        verdict = {"equivalent": "true", "inequivalent": "false"}.get(res.status, "unknown")
        return RunReport(verdict, "wp eq", details)
    if args.action == "encode":
        theory, seq = (encode_closed if args.closed else encode)(p, u, v)
        text = format_document(theory.signature, theory.axioms, theory.axiom_names, [seq])
        return RunReport("ok", "wp encode", {"sequent": Printer(theory.signature).sequent(seq)},
                         {"sequent.ct": text}, show=True)
    if args.action == "refute":
        rep = pipeline_reduce(p, u, v, budget_from(args))
        rep.command = "wp refute"
        if rep.verdict == "proved":
            rep.verdict = "true"
        return rep
    return pipeline_reduce(p, u, v, budget_from(args))


# -- models -----------------------------------------------------------------


def cmd_model(args) -> RunReport:
    doc = parse_document(_read(args.document), source=args.document)
    model = load_model(args.model, doc.signature)
    if args.action == "validate":
        theory = Theory(doc.signature, tuple(doc.axioms))
        failing = [i for i, ax in enumerate(theory.axioms) if not satisfies(model, ax)]
        return RunReport("true" if not failing else "false", "model validate", {"failing_axioms": failing})
    if not doc.sequents:
        raise UsageError(f"{args.document} declares no sequent")
    pr = Printer(doc.signature)
    rows = []
    for s in doc.sequents:
        bad = counterexample(model, s)
        rows.append({"sequent": pr.sequent(s), "holds": bad is None,
                     "counterexample": None if bad is None else [model.label(v.sort, i) for v, i in zip(s.context, bad)]})
    verdict = "true" if all(r["holds"] for r in rows) else "false"
    return RunReport(verdict, "model eval", {"results": rows})


# -- lab --------------------------------------------------------------------


def cmd_lab(args) -> RunReport:
    C = BASES[args.base]()
    if args.action == "yoneda":
        ks = list(lab.enumerate_copresheaves(C, args.cap))
        ok = True
        for K in ks:
            for c in C.objects:
                r = lab.yoneda_bijection(C, c, K)
                ok &= r.bijective and r.natural and r.transformations == r.elements
        return RunReport("true" if ok else "false", "lab yoneda",
                         {"base": args.base, "cap": args.cap, "copresheaves": len(ks)})
    if args.action == "factor":
        ks = list(lab.enumerate_copresheaves(C, args.cap))
        count, ok = 0, True
        for F in ks:
            for G in ks:
                for eta in lab.transformations(F, G):
                    e, m, _ = lab.image_factorization(eta)
                    ok &= e.is_epi() and m.is_mono() and e.then(m) == eta
                    count += 1
                    if count >= args.limit:
                        break
                if count >= args.limit:
                    break
            if count >= args.limit:
                break
        return RunReport("true" if ok else "false", "lab factor", {"base": args.base, "transformations": count})
    if args.action == "projectives":
        rep = lab.verify_representable_characterization(C, args.cap, args.base)
        return RunReport("true" if rep.agree else "false", "lab projectives", rep.summary())
    # embed-check
    if args.assignment == "identity":
        objs, arrows = lab.identity_assignment(C)
    else:
        objs, arrows = lab.collapse_assignment(C, C)
    rep = lab.check_representation_embedding(C, C, objs, arrows)
    details = {"base": args.base, "assignment": args.assignment, "valid": rep.valid}
    if rep.valid:
        details["object_map"] = dict(rep.object_map)
    else:
        details["reason"] = rep.reason
        details["witness"] = rep.witness
    return RunReport("true" if rep.valid else "false", "lab embed-check", details)


# -- translations -----------------------------------------------------------


def _translation(args) -> Translation:
    src, tgt = load_theory(args.source), load_theory(args.target)
    try:
        spec = json.loads(_read(args.map))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.map}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return Translation(src, tgt, spec.get("sorts", {}), spec.get("functions", {}), spec.get("relations", {}))


def cmd_translate(args) -> RunReport:
    t = _translation(args)
    budget = budget_from(args)
    bj = _budget_json(budget)
    cert = verify_translation(t, budget)
    if args.action == "verify":
        if cert is None:
            return RunReport("unknown", "translate verify", {}, {}, bj)
        arts = {f"axiom{i}.json": proof_dumps(p) for i, p in enumerate(cert.proofs)}
        return RunReport("ok" if cert.check() else "error", "translate verify",
                         {"axioms": len(cert.proofs)}, arts, bj)
    doc = parse_document(_read(args.input), t.source.signature, source=args.input)
    out = [apply_translation(t, s) for s in doc.sequents]
    fics = [apply_translation(t, f) for f in doc.formulas]
    pr = Printer(t.target.signature)
    arts = {"translated.ct": format_document(t.target.signature, sequents=out)
            + "".join(f"formula {pr.fic(f)};\n" for f in fics)}
    details = {"sequents": [pr.sequent(s) for s in out], "formulas": [pr.fic(f) for f in fics]}
    if args.proof:
        proof = proof_loads(_read(args.proof), t.source.signature)
        if not check_proof(t.source, proof).ok:
            return RunReport("false", "translate apply", {"reason": "input proof does not check"}, {}, bj)
        if cert is None:
            return RunReport("unknown", "translate apply", details, arts, bj)
        q = apply_translation(t, proof, cert)
        ok = check_proof(t.target, q).ok
        details["proof_checked"] = ok
        arts["proof.json"] = proof_dumps(q)
        return RunReport("ok" if ok else "error", "translate apply", details, arts, bj)
    return RunReport("ok", "translate apply", details, arts, bj, show=True)


# -- entry point ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(USAGE)


def _env_depth() -> int:
    raw = os.environ.get("CARTLOG_BUDGET_DEPTH")
    if raw is None or raw == "":
        return DEFAULT_DEPTH
    try:
        d = int(raw)
    except ValueError:
        raise UsageError(f"CARTLOG_BUDGET_DEPTH must be an integer, got {raw!r}") from None
    if d <= 0:
        raise UsageError("CARTLOG_BUDGET_DEPTH must be positive")
    return d


def build_parser(default_depth: int = DEFAULT_DEPTH) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=default_depth, help="search depth bound")
    common.add_argument("--max-sequents", type=int, default=4000, help="search steps per depth round")
    common.add_argument("--seed", type=int, default=0, help="seed for witness ordering (0 = canonical order)")
    common.add_argument("--out", help="write the main artifact here")
    common.add_argument("--out-dir", help="write every artifact into this directory")
    common.add_argument("--report", help="write the JSON run report here")
    common.add_argument("--format", choices=("dsl", "json"), default="dsl", help="stdout format")
    common.add_argument("--timing", action="store_true", help="print elapsed time on stderr")

    ap = _Parser(prog="cartlog", description="Cartesian logic workbench.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="parse and pretty-print a document")
    p.add_argument("file")
    p.add_argument("--cartesian", action="store_true", help="also certify axioms as cartesian")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("prove", parents=[common], help="search for a proof")
    p.add_argument("theory")
    p.add_argument("sequent")
    p.set_defaults(run=cmd_prove)

    p = sub.add_parser("check-proof", parents=[common], help="check a proof file")
    p.add_argument("theory")
    p.add_argument("proof")
    p.add_argument("sequent", nargs="?")
    p.set_defaults(run=cmd_check_proof)

    p = sub.add_parser("syncat", parents=[common], help="syntactic category operations")
    p.add_argument("action", choices=("compose", "id", "leq"))
    p.add_argument("theory")
    p.add_argument("object", nargs="?", help="object for id, e.g. 'forallctx(x): top'")
    p.add_argument("--dom")
    p.add_argument("--mid")
    p.add_argument("--cod")
    p.add_argument("--f", help="first morphism, context = domain then codomain variables")
    p.add_argument("--g", help="second morphism")
    p.add_argument("--words", nargs="+", help="two dot-separated words of unary symbols (g then f)")
    p.add_argument("--lower")
    p.add_argument("--upper")
    p.set_defaults(run=cmd_syncat)

    p = sub.add_parser("wp", parents=[common], help="monoid word problems")
    p.add_argument("action", choices=("eq", "table", "encode", "refute", "pipeline"))
    p.add_argument("presentation", help="'monoid <a,b | ab=ba>' or a file holding it")
    p.add_argument("u", nargs="?")
    p.add_argument("v", nargs="?")
    p.add_argument("--bound", type=int, default=64, help="largest finite quotient to tabulate")
    p.add_argument("--closed", action="store_true", help="relations as axioms (encode)")
    p.set_defaults(run=cmd_wp)

    p = sub.add_parser("model", parents=[common], help="finite model evaluation")
    p.add_argument("action", choices=("eval", "validate"))
    p.add_argument("model", help="model JSON")
    p.add_argument("document", help="signature with sequents (eval) or axioms (validate)")
    p.set_defaults(run=cmd_model)

    p = sub.add_parser("lab", parents=[common], help="copresheaf laboratory")
    p.add_argument("action", choices=("yoneda", "factor", "projectives", "embed-check"))
    p.add_argument("--base", choices=sorted(BASES), default="2chain")
    p.add_argument("--cap", type=int, default=2)
    p.add_argument("--limit", type=int, default=2000, help="transformations to factor")
    p.add_argument("--assignment", choices=("identity", "collapse"), default="identity")
    p.set_defaults(run=cmd_lab)

    p = sub.add_parser("translate", parents=[common], help="theory translations")
    p.add_argument("action", choices=("apply", "verify"))
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("map", help="JSON with sorts/functions/relations maps")
    p.add_argument("input", nargs="?", help="document to translate (apply)")
    p.add_argument("--proof", help="proof over the source theory to carry across (apply)")
    p.set_defaults(run=cmd_translate)
    return ap


def _validate(args):
    if args.depth <= 0 or args.max_sequents <= 0:
        raise UsageError("budget bounds must be positive")
    if getattr(args, "cap", 1) < 0:
        raise UsageError("--cap must be non-negative")
    if args.command == "wp" and args.action not in ("table",) and (args.u is None or args.v is None):
        raise UsageError(f"wp {args.action} needs two words")
    if args.command == "syncat":
        if args.action == "id" and not args.object:
            raise UsageError("syncat id needs an object")
        if args.action == "leq" and not (args.lower and args.upper):
            raise UsageError("syncat leq needs --lower and --upper")
    if args.command == "translate" and args.action == "apply" and not args.input:
        raise UsageError("translate apply needs an input document")


def _emit(rep: RunReport, args):
    main = next(iter(rep.artifacts.values()), None)
    if args.out and main is not None:
        write_atomic(args.out, main)
    if args.out_dir:
        for name, text in sorted(rep.artifacts.items()):
            write_atomic(os.path.join(args.out_dir, name), text)
    if args.report:
        write_atomic(args.report, dumps(rep.to_json()))
    if args.format == "json":
        sys.stdout.write(dumps(rep.to_json()))
        return
    print(f"{rep.command}: {rep.verdict}")
    for k, v in rep.details.items():
        if isinstance(v, (list, dict)):
            v = json.dumps(v, sort_keys=True)
        print(f"  {k}: {v}")
    if rep.show and main is not None and not (args.out or args.out_dir):
        sys.stdout.write(main)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        depth = _env_depth()
    except UsageError as exc:
        print(f"cartlog: error: {exc}", file=sys.stderr)
        return USAGE
    args = build_parser(depth).parse_args(argv)
    start = time.perf_counter()
    try:
        _validate(args)
        rep = args.run(args)
        _emit(rep, args)
    except (ParseError, UsageError, WordError, ModelError, TranslationError, ValueError) as exc:
        print(f"cartlog: error: {exc}", file=sys.stderr)
        return USAGE
    if args.timing:
        print(f"elapsed {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return rep.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
