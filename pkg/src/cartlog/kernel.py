"""Proof objects for cartesian sequent calculus and the trusted checker.

``check_proof`` is the only component whose correctness matters for
soundness; everything that builds proofs (tactics, search, synthesis)
is untrusted and re-checked here.

Rules, for a conclusion ``G |-_x D``:

=================  ==========================================================
IDENTITY           ``G |-_x G``
CUT                ``G |-_x C`` and ``C |-_x D``
SUBSTITUTION       ``A |-_y B`` gives ``A[s] |-_x B[s]`` (simultaneous; every
                   variable of ``s(v)``, ``v`` in ``y``, lies in ``x``)
EQ_REFL            ``top |-_x t = t``
EQ_REPLACEMENT     ``(s = t) & chi[s/v] |-_x chi[t/v]``
AND_INTRO          ``G |-_x A`` and ``G |-_x B`` give ``G |-_x A & B``
AND_ELIM_LEFT      ``A & B |-_x A``
AND_ELIM_RIGHT     ``A & B |-_x B``
TOP_INTRO          ``G |-_x top``
EXISTS_ELIM        ``exists y. A |-_x B`` gives ``A |-_{x,y} B``
EXISTS_ADJOINT     ``A |-_{x,y} B`` gives ``exists y. A |-_x B``
FROBENIUS          ``A & exists y. B |-_x exists y. (A & B)``, ``y`` not free in ``A``
THEORY_AXIOM       an axiom of the theory, up to renaming of its context
=================  ==========================================================
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Optional

from .syntax import (
    And, Eq, Exists, Formula, Sequent, Term, Top, Var, alpha_eq_formula,
    alpha_equal_sequent, free_vars, sort_of, substitute, term_vars,
)

if TYPE_CHECKING:
    from .theories import Theory


class Rule(enum.IntEnum):
    IDENTITY = 0
    CUT = 1
    SUBSTITUTION = 2
    EQ_REFL = 3
    EQ_REPLACEMENT = 4
    AND_INTRO = 5
    AND_ELIM_LEFT = 6
    AND_ELIM_RIGHT = 7
    TOP_INTRO = 8
    EXISTS_ELIM = 9
    EXISTS_ADJOINT = 10
    THEORY_AXIOM = 11
    FROBENIUS = 12


@dataclass(frozen=True, eq=False)
class Proof:
    conclusion: Sequent
    rule: Rule
    premises: tuple["Proof", ...] = ()
    cut: Optional[Formula] = None
    binding: tuple[tuple[Var, Term], ...] = ()
    index: Optional[int] = None
    var: Optional[Var] = None
    motive: Optional[Formula] = None

    def nodes(self):
        """Distinct nodes in post-order (premises first)."""
        seen: set[int] = set()
        out = []
        stack = [(self, False)]
        while stack:
            node, done = stack.pop()
            if id(node) in seen:
                continue
            if done:
                seen.add(id(node))
                out.append(node)
            else:
                stack.append((node, True))
                for p in reversed(node.premises):
                    if id(p) not in seen:
                        stack.append((p, False))
        return out

    def size(self) -> int:
        return len(self.nodes())


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    path: tuple[int, ...] = ()
    reason: str = ""

    def __bool__(self):
        return self.ok


class ProofError(ValueError):
    def __init__(self, path, reason):
        super().__init__(f"invalid proof at {list(path)}: {reason}")
        self.path = tuple(path)
        self.reason = reason


def _fail(msg):
    raise _Invalid(msg)


class _Invalid(Exception):
    pass


def _need(cond, msg):
    if not cond:
        _fail(msg)


def _same(a: Formula, b: Formula, what: str):
    _need(alpha_eq_formula(a, b), f"{what} does not match")


def _check_node(theory: "Theory", p: Proof):
    c = p.conclusion
    sig = theory.signature
    _need(sig.owns_sequent(c), "conclusion uses symbols outside the signature")
    arity = {
        Rule.IDENTITY: 0, Rule.CUT: 2, Rule.SUBSTITUTION: 1, Rule.EQ_REFL: 0,
        Rule.EQ_REPLACEMENT: 0, Rule.AND_INTRO: 2, Rule.AND_ELIM_LEFT: 0,
        Rule.AND_ELIM_RIGHT: 0, Rule.TOP_INTRO: 0, Rule.EXISTS_ELIM: 1,
        Rule.EXISTS_ADJOINT: 1, Rule.THEORY_AXIOM: 0, Rule.FROBENIUS: 0,
    }[p.rule]
    _need(len(p.premises) == arity, f"{p.rule.name} takes {arity} premises")
    prem = [q.conclusion for q in p.premises]
    r = p.rule

    if r in (Rule.CUT, Rule.AND_INTRO):
        _need(all(q.context == c.context for q in prem), "premise contexts differ from conclusion")

    if r is Rule.IDENTITY:
        _same(c.antecedent, c.consequent, "identity: antecedent and consequent")
    elif r is Rule.CUT:
        _need(p.cut is not None, "cut formula missing")
        _same(prem[0].antecedent, c.antecedent, "cut: left antecedent")
        _same(prem[0].consequent, p.cut, "cut: left consequent vs cut formula")
        _same(prem[1].antecedent, p.cut, "cut: right antecedent vs cut formula")
        _same(prem[1].consequent, c.consequent, "cut: right consequent")
    elif r is Rule.SUBSTITUTION:
        binding = dict(p.binding)
        _need(len(binding) == len(p.binding), "substitution binds a variable twice")
        src = prem[0]
        _need(set(binding) <= set(src.context), "substitution binds variables outside the premise context")
        for v, t in binding.items():
            _need(sort_of(t) == v.sort, "substitution is not sort-correct")
            _need(sig.owns_term(t), "substituted term outside the signature")
        target = set(c.context)
        for v in src.context:
            _need(term_vars(binding.get(v, v)) <= target,
                  "substituted terms use variables outside the conclusion context")
        _same(substitute(src.antecedent, binding), c.antecedent, "substitution: antecedent")
        _same(substitute(src.consequent, binding), c.consequent, "substitution: consequent")
    elif r is Rule.EQ_REFL:
        _need(isinstance(c.antecedent, Top), "reflexivity needs antecedent top")
        _need(isinstance(c.consequent, Eq) and c.consequent.left == c.consequent.right,
              "reflexivity concludes t = t")
    elif r is Rule.EQ_REPLACEMENT:
        _need(p.var is not None and p.motive is not None, "replacement needs a motive and variable")
        a = c.antecedent
        _need(isinstance(a, And) and isinstance(a.left, Eq), "replacement antecedent is (s = t) & phi")
        s, t = a.left.left, a.left.right
        _need(sort_of(s) == p.var.sort, "replacement variable has the wrong sort")
        _same(substitute(p.motive, {p.var: s}), a.right, "replacement: motive at s")
        _same(substitute(p.motive, {p.var: t}), c.consequent, "replacement: motive at t")
    elif r is Rule.AND_INTRO:
        _need(isinstance(c.consequent, And), "conjunction introduction concludes A & B")
        _same(prem[0].antecedent, c.antecedent, "and-intro: left antecedent")
        _same(prem[1].antecedent, c.antecedent, "and-intro: right antecedent")
        _same(prem[0].consequent, c.consequent.left, "and-intro: left conjunct")
        _same(prem[1].consequent, c.consequent.right, "and-intro: right conjunct")
    elif r in (Rule.AND_ELIM_LEFT, Rule.AND_ELIM_RIGHT):
        _need(isinstance(c.antecedent, And), "conjunction elimination needs A & B on the left")
        part = c.antecedent.left if r is Rule.AND_ELIM_LEFT else c.antecedent.right
        _same(part, c.consequent, "and-elim: conjunct")
    elif r is Rule.TOP_INTRO:
        _need(isinstance(c.consequent, Top), "top introduction concludes top")
    elif r is Rule.EXISTS_ELIM:
        y = p.var
        src = prem[0]
        _need(y is not None and c.context == src.context + (y,), "exists-elim: context must be premise context + y")
        _need(y not in src.context, "exists-elim: y already in context")
        _same(Exists(y, c.antecedent), src.antecedent, "exists-elim: antecedent")
        _same(src.consequent, c.consequent, "exists-elim: consequent")
    elif r is Rule.EXISTS_ADJOINT:
        y = p.var
        src = prem[0]
        _need(y is not None and src.context == c.context + (y,), "exists-adjoint: premise context must be context + y")
        _need(y not in c.context, "exists-adjoint: y in conclusion context")
        _need(y not in free_vars(src.consequent), "exists-adjoint: y free in consequent")
        _same(Exists(y, src.antecedent), c.antecedent, "exists-adjoint: antecedent")
        _same(src.consequent, c.consequent, "exists-adjoint: consequent")
    elif r is Rule.FROBENIUS:
        a, d = c.antecedent, c.consequent
        _need(isinstance(a, And) and isinstance(a.right, Exists), "Frobenius antecedent is A & exists y. B")
        _need(isinstance(d, Exists) and isinstance(d.body, And), "Frobenius consequent is exists y. (A & B)")
        _need(d.var not in free_vars(a.left), "Frobenius: bound variable free in A")
        _same(d.body.left, a.left, "Frobenius: A")
        _same(Exists(d.var, d.body.right), a.right, "Frobenius: exists-part")
    elif r is Rule.THEORY_AXIOM:
        _need(p.index is not None and 0 <= p.index < len(theory.axioms), "no such axiom")
        _need(alpha_equal_sequent(theory.axioms[p.index], c), "conclusion is not the cited axiom")
    else:  # pragma: no cover
        _fail(f"unknown rule {r}")


_observers: list[Callable[["Theory", Proof], None]] = []


def add_observer(fn: Callable[["Theory", Proof], None]) -> Callable[[], None]:
    """Call ``fn(theory, proof)`` after every successful check; returns a remover."""
    _observers.append(fn)
    return lambda: _observers.remove(fn)


def check_proof(theory: "Theory", proof: Proof) -> CheckResult:
    """Check every node; the first invalid node (depth-first, premises first) is reported."""
    res = _check(theory, proof)
    if res.ok:
        for fn in list(_observers):
            fn(theory, proof)
    return res


def _check(theory: "Theory", proof: Proof) -> CheckResult:
    memo: dict[int, CheckResult] = {}

    def walk(p: Proof, path: tuple[int, ...]) -> CheckResult:
        key = id(p)
        if key in memo:
            return memo[key]
        for i, q in enumerate(p.premises):
            res = walk(q, path + (i,))
            if not res.ok:
                memo[key] = res
                return res
        try:
            _check_node(theory, p)
            res = CheckResult(True)
        except _Invalid as exc:
            res = CheckResult(False, path, f"{p.rule.name}: {exc}")
        memo[key] = res
        return res

    return walk(proof, ())


def assert_valid(theory: "Theory", proof: Proof) -> Proof:
    res = check_proof(theory, proof)
    if not res.ok:
        raise ProofError(res.path, res.reason)
    return proof


def proves(theory: "Theory", proof: Proof, sequent: Sequent) -> bool:
    """Checked and concluding ``sequent`` up to alpha-equivalence."""
    return alpha_equal_sequent(proof.conclusion, sequent) and check_proof(theory, proof).ok


def uses_rules(proof: Proof) -> set[Rule]:
    return {n.rule for n in proof.nodes()}


