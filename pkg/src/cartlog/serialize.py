"""JSON encoding of terms, formulas, sequents and proofs.

Proofs are written as a node table: every distinct subproof appears once,
premises refer to earlier entries by index, and ``root`` names the
conclusion.  Shared subproofs (which equality reasoning produces in bulk)
therefore cost nothing extra.  Output is canonical: structurally equal
subproofs are merged and keys are sorted.
"""

from __future__ import annotations

import json

from .kernel import Proof, Rule
from .syntax import And, App, Eq, Exists, Formula, Rel, Sequent, Signature, Term, Top, Var

FORMAT = "cartlog-proof/1"


def term_to_json(t: Term):
    if isinstance(t, Var):
        return {"var": [t.sort.name, t.rank]}
    return {"app": t.fn.name, "args": [term_to_json(a) for a in t.args]}


def formula_to_json(phi: Formula):
    if isinstance(phi, Top):
        return {"top": True}
    if isinstance(phi, Eq):
        return {"eq": [term_to_json(phi.left), term_to_json(phi.right)]}
    if isinstance(phi, Rel):
        return {"rel": phi.symbol.name, "args": [term_to_json(a) for a in phi.args]}
    if isinstance(phi, And):
        return {"and": [formula_to_json(phi.left), formula_to_json(phi.right)]}
    return {"exists": term_to_json(phi.var), "body": formula_to_json(phi.body)}


def sequent_to_json(s: Sequent):
    return {
        "antecedent": formula_to_json(s.antecedent),
        "context": [term_to_json(v) for v in s.context],
        "consequent": formula_to_json(s.consequent),
    }


class _Reader:
    def __init__(self, sig: Signature):
        self.sig = sig

    def var(self, obj) -> Var:
        name, rank = obj["var"]
        return Var(self.sig.sort(name), int(rank))

    def term(self, obj) -> Term:
        if "var" in obj:
            return self.var(obj)
        return App(self.sig.function(obj["app"]), tuple(self.term(a) for a in obj["args"]))

    def formula(self, obj) -> Formula:
        if "top" in obj:
            return Top()
        if "eq" in obj:
            return Eq(self.term(obj["eq"][0]), self.term(obj["eq"][1]))
        if "rel" in obj:
            return Rel(self.sig.relation(obj["rel"]), tuple(self.term(a) for a in obj["args"]))
        if "and" in obj:
            return And(self.formula(obj["and"][0]), self.formula(obj["and"][1]))
        return Exists(self.var(obj["exists"]), self.formula(obj["body"]))

    def sequent(self, obj) -> Sequent:
        return Sequent(self.formula(obj["antecedent"]), tuple(self.var(v) for v in obj["context"]),
                       self.formula(obj["consequent"]))


def proof_to_json(p: Proof) -> dict:
    table: list[dict] = []
    index: dict[str, int] = {}
    where: dict[int, int] = {}
    for node in p.nodes():
        entry = {
            "rule": node.rule.name,
            "conclusion": sequent_to_json(node.conclusion),
            "premises": [where[id(q)] for q in node.premises],
        }
        if node.cut is not None:
            entry["cut"] = formula_to_json(node.cut)
        if node.binding:
            entry["binding"] = [[term_to_json(v), term_to_json(t)] for v, t in node.binding]
        if node.index is not None:
            entry["axiom"] = node.index
        if node.var is not None:
            entry["var"] = term_to_json(node.var)
        if node.motive is not None:
            entry["motive"] = formula_to_json(node.motive)
        key = json.dumps(entry, sort_keys=True)
        if key not in index:
            index[key] = len(table)
            table.append(entry)
        where[id(node)] = index[key]
    return {"format": FORMAT, "nodes": table, "root": where[id(p)]}


def proof_from_json(obj: dict, sig: Signature) -> Proof:
    if obj.get("format") != FORMAT:
        raise ValueError(f"not a {FORMAT} document")
    r = _Reader(sig)
    built: list[Proof] = []
    for i, e in enumerate(obj["nodes"]):
        prem = tuple(built[j] for j in e["premises"]) if all(j < i for j in e["premises"]) else None
        if prem is None:
            raise ValueError(f"node {i} refers forward")
        built.append(Proof(
            r.sequent(e["conclusion"]), Rule[e["rule"]], prem,
            cut=r.formula(e["cut"]) if "cut" in e else None,
            binding=tuple((r.var(v), r.term(t)) for v, t in e.get("binding", [])),
            index=e.get("axiom"),
            var=r.var(e["var"]) if "var" in e else None,
            motive=r.formula(e["motive"]) if "motive" in e else None,
        ))
    return built[obj["root"]]


def dumps(obj) -> str:
    """Canonical JSON text (sorted keys, fixed separators, trailing newline)."""
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def proof_dumps(p: Proof) -> str:
    return dumps(proof_to_json(p))


def proof_loads(text: str, sig: Signature) -> Proof:
    return proof_from_json(json.loads(text), sig)


