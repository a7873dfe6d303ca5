"""Bounded proof search.

Backward goal decomposition (``top``, ``&``, existential witnesses, axiom
back-chaining) on top of a proof-producing congruence closure over the
antecedent's equations.  Search is iterative deepening on ``max_depth``;
each round gets the same node allowance, so outcomes are deterministic and
monotone in the budget.  ``unknown`` is never a refutation.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from . import tactics as tac
from .dsl import format_term
from .kernel import Proof, ProofError, check_proof
from .syntax import (
    And, App, Eq, Exists, Formula, FormulaInContext, Rel, Sequent, Term, Top, Var, all_vars,
    conjuncts, formula_terms, free_vars, fresh_var, is_free_for, rename_context, sort_of,
    substitute, subst_term, subterms, term_size, term_vars,
)


@dataclass(frozen=True)
class ProofBudget:
    max_depth: int = 6
    max_sequents: int = 4000
    seed: int = 0

    def __post_init__(self):
        if self.max_depth <= 0 or self.max_sequents <= 0:
            raise ValueError("budget bounds must be positive")


@dataclass(frozen=True)
class SearchResult:
    proof: Proof | None
    explored: int = 0

    @property
    def proved(self) -> bool:
        return self.proof is not None

    @property
    def status(self) -> str:
        return "proved" if self.proved else "unknown"


@dataclass(frozen=True)
class BiProvable:
    forward: Proof | None
    backward: Proof | None

    @property
    def proved(self) -> bool:
        return self.forward is not None and self.backward is not None


@dataclass(frozen=True)
class CartesianCertificate:
    certified: bool
    proofs: tuple[Proof, ...] = ()
    obligations: tuple[Sequent, ...] = ()


class _Exhausted(Exception):
    pass


MAX_TERMS = 300
AXIOM_ROUNDS = 2


def match_term(pat: Term, t: Term, pvars, sigma: dict) -> dict | None:
    if isinstance(pat, Var) and pat in pvars:
        if pat in sigma:
            return sigma if sigma[pat] == t else None
        if sort_of(t) != pat.sort:
            return None
        return {**sigma, pat: t}
    if isinstance(pat, Var):
        return sigma if pat == t else None
    if not isinstance(t, App) or t.fn != pat.fn:
        return None
    for a, b in zip(pat.args, t.args):
        sigma = match_term(a, b, pvars, sigma)
        if sigma is None:
            return None
    return sigma


def match_formula(pat: Formula, f: Formula, pvars, sigma: dict, benv=None) -> dict | None:
    """First-order matching; binders are matched up to renaming."""
    benv = benv or {}
    if type(pat) is not type(f):
        return None
    if isinstance(pat, Top):
        return sigma
    if isinstance(pat, Eq):
        pairs = [(pat.left, f.left), (pat.right, f.right)]
    elif isinstance(pat, Rel):
        if pat.symbol != f.symbol:
            return None
        pairs = list(zip(pat.args, f.args))
    elif isinstance(pat, And):
        sigma = match_formula(pat.left, f.left, pvars, sigma, benv)
        return None if sigma is None else match_formula(pat.right, f.right, pvars, sigma, benv)
    else:
        if pat.var.sort != f.var.sort:
            return None
        inner = {**benv, pat.var: f.var}
        return match_formula(pat.body, f.body, set(pvars) - {pat.var}, sigma, inner)
    for a, b in pairs:
        a = subst_term(a, benv) if benv else a
        sigma = match_term(a, b, pvars, sigma)
        if sigma is None:
            return None
    bound = set(benv.values())
    if any(term_vars(t) & bound for t in sigma.values()):
        return None
    return sigma


class EqualityEngine:
    """Congruence closure over ground terms with a proof for every merge.

    Merged classes are connected by a spanning forest of proved edges, so an
    explanation is the (unique) path between two terms.
    """

    def __init__(self, theory, ctx, g: Formula, tick):
        self.theory = theory
        self.ctx = tuple(ctx)
        self.g = g
        self.tick = tick
        self.terms: list[Term] = []
        self.index: dict[Term, int] = {}
        self.parent: list[int] = []
        self.edges: dict[int, list[tuple[int, Proof, bool]]] = {}
        self.eq_axioms = [
            (i, ax) for i, ax in enumerate(theory.axioms)
            if isinstance(ax.antecedent, Top) and isinstance(ax.consequent, Eq)
        ]
        self._rounds = 0
        for c in conjuncts(g):
            if isinstance(c, Eq):
                proof = tac.conj_lookup(self.ctx, g, c)
                a, b = self.add(c.left), self.add(c.right)
                self.merge(a, b, proof)
        self.close()

    def add(self, t: Term) -> int:
        for u in subterms(t):
            if u not in self.index:
                self.index[u] = len(self.terms)
                self.terms.append(u)
                self.parent.append(len(self.parent))
                self.edges[self.index[u]] = []
        return self.index[t]

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def same(self, a: Term, b: Term) -> bool:
        return self.find(self.add(a)) == self.find(self.add(b))

    def merge(self, a: int, b: int, proof: Proof):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        self.tick()
        self.edges[a].append((b, proof, True))
        self.edges[b].append((a, proof, False))
        lo, hi = min(ra, rb), max(ra, rb)
        self.parent[hi] = lo

    def close(self):
        changed = True
        while changed:
            changed = False
            table: dict = {}
            for i, t in enumerate(self.terms):
                if not isinstance(t, App):
                    continue
                key = (t.fn, tuple(self.find(self.index[a]) for a in t.args))
                j = table.setdefault(key, i)
                if j != i and self.find(i) != self.find(j):
                    u, v = self.terms[j], self.terms[i]
                    args = [None if x == y else self.explain(self.index[x], self.index[y])
                            for x, y in zip(u.args, v.args)]
                    self.merge(j, i, tac.congruence(self.g, self.ctx, u, v, args))
                    changed = True

    def saturate_axioms(self, rounds: int = AXIOM_ROUNDS):
        """Add instances of equational axioms whose one side matches a class
        (matching modulo the current congruence)."""
        while self._rounds < rounds and self.eq_axioms:
            self._rounds += 1
            members: dict[int, list[int]] = {}
            for i in range(len(self.terms)):
                members.setdefault(self.find(i), []).append(i)
            for k, ax in self.eq_axioms:
                pvars = set(ax.context)
                for root in sorted(members):
                    for pat, other, flip in ((ax.consequent.left, ax.consequent.right, False),
                                             (ax.consequent.right, ax.consequent.left, True)):
                        if isinstance(pat, Var):
                            continue
                        for sigma in self._ematch(pat, root, pvars, {}, members):
                            if not pvars <= set(sigma):
                                continue
                            lhs, rhs = subst_term(pat, sigma), subst_term(other, sigma)
                            fresh = (lhs not in self.index) + (rhs not in self.index)
                            if fresh and len(self.terms) + fresh > MAX_TERMS:
                                continue
                            if self.same(lhs, rhs):
                                continue
                            self.tick()
                            p = tac.from_top(self.g, tac.substitution(tac.axiom(self.theory, k), sigma, self.ctx))
                            if flip:
                                p = tac.sym(p)
                            self.merge(self.index[lhs], self.index[rhs], p)
            self.close()

    def _ematch(self, pat: Term, cls: int, pvars, sigma: dict, members, limit: int = 8):
        """Substitutions (into existing terms) making ``pat`` congruent to class ``cls``."""
        if isinstance(pat, Var):
            if pat in pvars:
                if pat in sigma:
                    if self.find(self.index[sigma[pat]]) == cls:
                        yield sigma
                    return
                yield {**sigma, pat: self.terms[min(members.get(cls, [cls]))]}
            elif pat in self.index and self.find(self.index[pat]) == cls:
                yield sigma
            return
        found = 0
        for i in members.get(cls, ()):
            t = self.terms[i]
            if not isinstance(t, App) or t.fn != pat.fn:
                continue
            partial = [sigma]
            for a, b in zip(pat.args, t.args):
                nxt = []
                for s in partial:
                    nxt.extend(self._ematch(a, self.find(self.index[b]), pvars, s, members, limit))
                partial = nxt[:limit]
            for s in partial:
                yield s
                found += 1
                if found >= limit:
                    return

    def explain(self, a: int, b: int) -> Proof:
        if a == b:
            return tac.from_top(self.g, tac.refl(self.ctx, self.terms[a]))
        prev: dict[int, tuple[int, Proof, bool]] = {a: None}
        queue = deque([a])
        while queue:
            i = queue.popleft()
            if i == b:
                break
            for j, p, fwd in self.edges[i]:
                if j not in prev:
                    prev[j] = (i, p, fwd)
                    queue.append(j)
        if b not in prev:
            raise ValueError("terms are not in the same class")
        steps = []
        i = b
        while prev[i] is not None:
            j, p, fwd = prev[i]
            steps.append(p if fwd else tac.sym(p))
            i = j
        steps.reverse()
        out = steps[0]
        for s in steps[1:]:
            out = tac.trans(out, s)
        return out

    def prove_eq(self, s: Term, t: Term) -> Proof | None:
        a, b = self.add(s), self.add(t)
        self.close()
        if self.find(a) != self.find(b):
            self.saturate_axioms()
        if self.find(a) != self.find(b):
            return None
        return self.explain(a, b)


class _Prover:
    def __init__(self, theory, cap: int, seed: int = 0):
        self.theory = theory
        self.cap = cap
        self.count = 0
        self.seed = seed
        self.engines: dict = {}
        self.memo: dict = {}

    def tick(self):
        self.count += 1
        if self.count > self.cap:
            raise _Exhausted

    def engine(self, g, ctx) -> EqualityEngine:
        key = (g, ctx)
        if key not in self.engines:
            self.engines[key] = EqualityEngine(self.theory, ctx, g, self.tick)
        return self.engines[key]

    def prove(self, g: Formula, ctx: tuple, d: Formula, depth: int) -> Proof | None:
        key = (g, ctx, d, depth)
        if key in self.memo:
            return self.memo[key]
        self.tick()
        out = self._prove(g, ctx, d, depth)
        self.memo[key] = out
        return out

    def _prove(self, g, ctx, d, depth):
        if isinstance(d, Top):
            return tac.top_intro(ctx, g)
        hit = tac.conj_lookup(ctx, g, d)
        if hit is not None:
            return hit
        if isinstance(d, And):
            a = self.prove(g, ctx, d.left, depth)
            if a is None:
                return None
            b = self.prove(g, ctx, d.right, depth)
            return None if b is None else tac.and_intro(a, b)
        g2, ys, lift = tac.prenex(ctx, g, all_vars(d))
        if ys:
            q = self.prove(g2, ctx + ys, d, depth)
            return None if q is None else lift(q)
        if depth <= 0:
            return None
        if isinstance(d, Eq):
            p = self.engine(g, ctx).prove_eq(d.left, d.right)
            if p is not None:
                return p
        p = self.by_axiom(g, ctx, d, depth)
        if p is not None:
            return p
        if isinstance(d, Exists):
            return self.witness(g, ctx, d, depth)
        return None

    def by_axiom(self, g, ctx, d, depth):
        for i, ax in enumerate(self.theory.axioms):
            pvars = set(ax.context)
            sigma = match_formula(ax.consequent, d, pvars, {})
            if sigma is None:
                continue
            for v in ax.context:
                if v not in sigma:
                    filler = next((c for c in ctx if c.sort == v.sort), None)
                    if filler is None:
                        break
                    sigma[v] = filler
            else:
                if not all(term_vars(t) <= set(ctx) for t in sigma.values()):
                    continue
                self.tick()
                inst = tac.substitution(tac.axiom(self.theory, i), sigma, ctx)
                need = inst.conclusion.antecedent
                if isinstance(need, Top):
                    return tac.from_top(g, inst)
                pa = self.prove(g, ctx, need, depth - 1)
                if pa is not None:
                    return tac.cut(pa, inst)
        return None

    def witness(self, g, ctx, d: Exists, depth):
        y, body = d.var, d.body
        pool: list[Term] = list(ctx)
        for t in formula_terms(g) + formula_terms(body):
            pool.extend(subterms(t))
        eng = self.engine(g, ctx)
        pool.extend(eng.terms)
        inside = set(ctx)
        seen = set()
        cands = []
        for t in pool:
            if t in seen or sort_of(t) != y.sort or not term_vars(t) <= inside:
                continue
            seen.add(t)
            if is_free_for(t, y, body):
                cands.append(t)
        cands.sort(key=lambda t: (term_size(t), format_term(t)))
        if self.seed:
            random.Random(self.seed).shuffle(cands)
        for t in cands:
            q = self.prove(g, ctx, substitute(body, {y: t}), depth - 1)
            if q is not None:
                return tac.exists_intro(q, t, y, body)
        return None


def search(theory, sequent: Sequent, budget: ProofBudget = ProofBudget()) -> SearchResult:
    """Look for a proof of ``sequent``; the result is checked before it is returned."""
    explored = 0
    for depth in range(1, budget.max_depth + 1):
        prover = _Prover(theory, budget.max_sequents, budget.seed)
        try:
            p = prover.prove(sequent.antecedent, sequent.context, sequent.consequent, depth)
        except _Exhausted:
            explored += prover.count
            break
        explored += prover.count
        if p is not None:
            res = check_proof(theory, p)
            if not res.ok:
                raise ProofError(res.path, "search produced an invalid proof: " + res.reason)
            return SearchResult(p, explored)
    return SearchResult(None, explored)


def bi_provable(theory, a: FormulaInContext, b: FormulaInContext,
                budget: ProofBudget = ProofBudget()) -> BiProvable:
    """Mutual entailment of two formulas over the same context (up to renaming)."""
    if len(a.context) != len(b.context) or any(x.sort != y.sort for x, y in zip(a.context, b.context)):
        raise ValueError("formulas live over different contexts")
    b = rename_context(b, a.context)
    fwd = search(theory, Sequent(a.formula, a.context, b.formula), budget)
    if not fwd.proved:
        return BiProvable(None, None)
    back = search(theory, Sequent(b.formula, a.context, a.formula), budget)
    return BiProvable(fwd.proof, back.proof) if back.proved else BiProvable(None, None)


def uniqueness_obligations(fic: FormulaInContext) -> list[Sequent]:
    """``B & B[z/y] |- y = z`` for each existential ``exists y. B`` of the formula."""
    out = []

    def walk(phi, ctx):
        if isinstance(phi, And):
            walk(phi.left, ctx)
            walk(phi.right, ctx)
        elif isinstance(phi, Exists):
            y, body = phi.var, phi.body
            if y in ctx:
                y2 = fresh_var(y.sort, set(ctx) | all_vars(body))
                body = substitute(body, {y: y2})
                y = y2
            inner = ctx + (y,)
            z = fresh_var(y.sort, set(inner) | all_vars(body))
            out.append(Sequent(And(body, substitute(body, {y: z})), inner + (z,), Eq(y, z)))
            walk(body, inner)

    walk(fic.formula, tuple(fic.context))
    return out


def is_cartesian_relative(fic: FormulaInContext, theory, budget: ProofBudget = ProofBudget()) -> CartesianCertificate:
    obligations = uniqueness_obligations(fic)
    proofs = []
    for ob in obligations:
        res = search(theory, ob, budget)
        if not res.proved:
            return CartesianCertificate(False, tuple(proofs), tuple(obligations))
        proofs.append(res.proof)
    return CartesianCertificate(True, tuple(proofs), tuple(obligations))


def free_vars_of(seq: Sequent):
    return free_vars(seq.antecedent) | free_vars(seq.consequent)
