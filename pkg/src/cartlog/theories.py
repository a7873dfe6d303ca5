"""Theories, the module theory of a presented algebra, ``T[phi]``, and translations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import tactics as tac
from .kernel import Proof, Rule, check_proof
from .syntax import (
    TOP, And, App, Eq, Exists, Formula, FormulaInContext, FunctionSymbol, Rel,
    Sequent, Signature, Sort, Term, Top, Var, alpha_eq_formula, alpha_equal_sequent, free_vars,
    substitute,
)


class TransportError(ValueError):
    """A proof cannot be moved between ``T`` and ``T[phi]``."""


class TranslationError(ValueError):
    pass


@dataclass(frozen=True)
class Theory:
    """A signature with ordered axioms; the order is the witness of cartesianness
    (each axiom is meant to be cartesian relative to those before it)."""

    signature: Signature
    axioms: tuple[Sequent, ...] = ()
    axiom_names: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "axioms", tuple(self.axioms))
        names = tuple(self.axiom_names) + tuple(
            f"ax{i}" for i in range(len(self.axiom_names), len(self.axioms)))
        object.__setattr__(self, "axiom_names", names[: len(self.axioms)])
        for ax in self.axioms:
            if not self.signature.owns_sequent(ax):
                raise ValueError("axiom uses symbols outside the signature")

    def prefix(self, n: int) -> "Theory":
        return Theory(self.signature, self.axioms[:n], self.axiom_names[:n])

    def with_axioms(self, extra: Sequence[Sequent], names: Sequence[str] = ()) -> "Theory":
        return Theory(self.signature, self.axioms + tuple(extra), self.axiom_names + tuple(names))

    def axiom_index(self, name: str) -> int:
        return self.axiom_names.index(name)

    def certify_cartesian(self, budget=None) -> list:
        """Uniqueness certificates for every axiom side, relative to the preceding axioms."""
        from .search import ProofBudget, is_cartesian_relative

        budget = budget or ProofBudget()
        out = []
        for i, ax in enumerate(self.axioms):
            sub = self.prefix(i)
            for side in (ax.antecedent, ax.consequent):
                out.append(is_cartesian_relative(FormulaInContext(ax.context, side), sub, budget))
        return out


# -- module theories --------------------------------------------------------

MODULE_SORT = Sort("A")


def _word(word) -> tuple[str, ...]:
    return tuple(word) if not isinstance(word, str) else tuple(word)


@dataclass(frozen=True)
class AlgebraPresentation:
    """Generators of a free algebra and monomial relations between words.

    Words are sequences of generator names; a plain string is read one
    character per generator.
    """

    generators: tuple[str, ...]
    relations: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...] = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        if len(set(gens)) != len(gens):
            raise ValueError("duplicate generators")
        rels = tuple((_word(u), _word(v)) for u, v in self.relations)
        for u, v in rels:
            bad = (set(u) | set(v)) - set(gens)
            if bad:
                raise ValueError(f"relation uses undeclared generators {sorted(bad)}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relations", rels)


def module_signature(generators: Sequence[str]) -> Signature:
    a = MODULE_SORT
    fns = [FunctionSymbol("plus", (a, a), a), FunctionSymbol("zero", (), a), FunctionSymbol("neg", (a,), a)]
    fns += [FunctionSymbol(g, (a,), a) for g in generators]
    return Signature((a,), tuple(fns))


def word_term(sig: Signature, word, x: Term) -> Term:
    """``a1 a2 ... an`` acts as ``a1(a2(...an(x)))``."""
    t = x
    for g in reversed(_word(word)):
        t = App(sig.function(g), (t,))
    return t


def module_theory(p: AlgebraPresentation) -> Theory:
    sig = module_signature(p.generators)
    a = MODULE_SORT
    x, y, z = Var(a, 0), Var(a, 1), Var(a, 2)
    plus, zero, neg = sig.function("plus"), App(sig.function("zero")), sig.function("neg")

    def add(s, t):
        return App(plus, (s, t))

    axioms = [
        Sequent(TOP, (x, y, z), Eq(add(add(x, y), z), add(x, add(y, z)))),
        Sequent(TOP, (x, y), Eq(add(x, y), add(y, x))),
        Sequent(TOP, (x,), Eq(add(x, zero), x)),
        Sequent(TOP, (x,), Eq(add(x, App(neg, (x,))), zero)),
    ]
    names = ["assoc", "comm", "unit", "inverse"]
    for g in p.generators:
        r = sig.function(g)
        axioms.append(Sequent(TOP, (x, y), Eq(App(r, (add(x, y),)), add(App(r, (x,)), App(r, (y,))))))
        axioms.append(Sequent(TOP, (), Eq(App(r, (zero,)), zero)))
        names += [f"additive_{g}", f"zero_{g}"]
    for i, (u, v) in enumerate(p.relations):
        axioms.append(Sequent(TOP, (x,), Eq(word_term(sig, u, x), word_term(sig, v, x))))
        names.append(f"relation_{i}")
    return Theory(sig, tuple(axioms), tuple(names))


# -- T[phi] -----------------------------------------------------------------


def adjoin(theory: Theory, phi: FormulaInContext, name: str = "adjoined") -> tuple[Theory, "Translation"]:
    if not theory.signature.owns(phi.formula):
        raise ValueError("formula is not over the theory's signature")
    ext = theory.with_axioms([Sequent(TOP, phi.context, phi.formula)], [name])
    return ext, Translation.inclusion(theory, ext)


def transport(theory: Theory, phi: FormulaInContext, proof: Proof, direction: str) -> Proof:
    """Move a proof between ``T`` and ``T[phi]``.

    ``into``: a ``T``-proof of ``phi |-_x psi`` becomes a ``T[phi]``-proof of
    ``top |-_x psi`` (cut against the adjoined axiom).

    ``out``: a ``T[phi]``-proof of ``top |-_x psi`` becomes a ``T``-proof of
    ``phi |-_x psi``, carrying ``phi`` as an extra conjunct through every
    node.  This needs ``phi``'s free variables to stay fixed along the proof;
    a proof that instantiates the adjoined axiom at other terms is rejected,
    since ``phi`` with free variables only holds at those variables.
    """
    c = proof.conclusion
    k = len(theory.axioms)
    if direction == "into":
        if not alpha_eq_formula(c.antecedent, phi.formula):
            raise TransportError("proof does not start from the adjoined formula")
        if not set(phi.context) <= set(c.context):
            raise TransportError("adjoined formula's context is not contained in the proof's")
        ext, _ = adjoin(theory, phi)
        ax = tac.weaken(tac.axiom(ext, k), c.context)
        return tac.cut(ax, proof)
    if direction == "out":
        if not isinstance(c.antecedent, Top):
            raise TransportError("proof does not conclude a sequent with antecedent top")
        q = _carry(phi.formula, proof, k, {}, _users(proof, k))
        start = tac.and_intro(tac.identity(c.context, phi.formula), tac.top_intro(c.context, phi.formula))
        return tac.cut(start, q)
    raise ValueError(f"unknown direction {direction!r}")


def _users(proof: Proof, k: int) -> set[int]:
    """Ids of the nodes whose subproof cites axiom ``k``."""
    out: set[int] = set()
    for node in proof.nodes():
        if (node.rule is Rule.THEORY_AXIOM and node.index == k) or any(id(q) in out for q in node.premises):
            out.add(id(node))
    return out


def _carry(ph: Formula, p: Proof, k: int, memo: dict, users: set[int]) -> Proof:
    """``G |-_c D`` becomes ``ph & G |-_c D``."""
    key = id(p)
    if key in memo:
        return memo[key]
    c = p.conclusion
    ctx, g = c.context, c.antecedent
    if not free_vars(ph) <= set(ctx):
        raise TransportError("a step leaves the adjoined formula's variables out of context")
    r = p.rule
    if key not in users:
        # the adjoined axiom is not used here: drop ph and reuse the subproof
        out = tac.cut(tac.and_elim_right(ctx, ph, g), p)
    elif r is Rule.THEORY_AXIOM and p.index == k:
        if not alpha_eq_formula(c.consequent, ph):
            raise TransportError("adjoined axiom is used at an instance other than itself")
        out = tac.cut(tac.and_elim_left(ctx, ph, g), tac.identity(ctx, ph))
    elif r is Rule.CUT:
        p1 = _carry(ph, p.premises[0], k, memo, users)
        p2 = _carry(ph, p.premises[1], k, memo, users)
        out = tac.cut(tac.and_intro(tac.and_elim_left(ctx, ph, g), p1), p2)
    elif r is Rule.AND_INTRO:
        out = tac.and_intro(_carry(ph, p.premises[0], k, memo, users), _carry(ph, p.premises[1], k, memo, users))
    elif r is Rule.SUBSTITUTION:
        binding = dict(p.binding)
        if any(binding.get(v, v) != v for v in free_vars(ph)):
            raise TransportError("substitution moves a variable of the adjoined formula")
        p1 = _carry(ph, p.premises[0], k, memo, users)
        out = tac.substitution(p1, binding, ctx)
    elif r is Rule.EXISTS_ELIM:
        y = p.var
        a = g
        p1 = _carry(ph, p.premises[0], k, memo, users)
        inner = tac.and_intro(
            tac.and_elim_left(ctx, ph, a),
            tac.exists_intro(tac.and_elim_right(ctx, ph, a), y, y, a),
        )
        back = tac.exists_adjoint(inner, y)
        out = tac.exists_elim(tac.cut(back, p1), y)
    elif r is Rule.EXISTS_ADJOINT:
        y = p.var
        p1 = _carry(ph, p.premises[0], k, memo, users)
        body = p.premises[0].conclusion.antecedent
        if y in free_vars(ph):
            raise TransportError("quantified variable occurs in the adjoined formula")
        out = tac.cut(tac.frobenius(ctx, ph, y, body), tac.exists_adjoint(p1, y))
    else:  # pragma: no cover
        raise TransportError(f"unexpected rule {r.name}")
    memo[key] = out
    return out


# -- translations -----------------------------------------------------------


@dataclass(frozen=True)
class Translation:
    source: Theory
    target: Theory
    sort_map: tuple[tuple[str, str], ...]
    function_map: tuple[tuple[str, str], ...]
    relation_map: tuple[tuple[str, str], ...] = ()
    _sorts: dict = field(default=None, compare=False, repr=False, hash=False)
    _fns: dict = field(default=None, compare=False, repr=False, hash=False)
    _rels: dict = field(default=None, compare=False, repr=False, hash=False)
    _slot: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        for name in ("sort_map", "function_map", "relation_map"):
            val = getattr(self, name)
            if isinstance(val, Mapping):
                val = tuple(val.items())
            object.__setattr__(self, name, tuple(sorted(tuple(kv) for kv in val)))
        src, tgt = self.source.signature, self.target.signature
        sm = dict(self.sort_map)
        fm = dict(self.function_map)
        rm = dict(self.relation_map)
        try:
            sorts = {s: tgt.sort(sm[s.name]) for s in src.sorts}
        except KeyError as exc:
            raise TranslationError(f"sort {exc.args[0]} is not mapped") from None
        fns = {}
        for f in src.functions:
            if f.name not in fm or not tgt.has_function(fm[f.name]):
                raise TranslationError(f"function symbol {f.name} is not mapped")
            g = tgt.function(fm[f.name])
            if g.arg_sorts != tuple(sorts[s] for s in f.arg_sorts) or g.result != sorts[f.result]:
                raise TranslationError(f"{f.name} and {g.name} have incompatible sorts")
            fns[f] = g
        rels = {}
        for r in src.relations:
            if r.name not in rm or not tgt.has_relation(rm[r.name]):
                raise TranslationError(f"relation symbol {r.name} is not mapped")
            q = tgt.relation(rm[r.name])
            if q.arg_sorts != tuple(sorts[s] for s in r.arg_sorts):
                raise TranslationError(f"{r.name} and {q.name} have incompatible sorts")
            rels[r] = q
        # variables keep their rank unless several sorts collapse, then interleave
        groups: dict[Sort, list[Sort]] = {}
        for s in src.sorts:
            groups.setdefault(sorts[s], []).append(s)
        slot = {s: (len(groups[sorts[s]]), groups[sorts[s]].index(s)) for s in src.sorts}
        object.__setattr__(self, "_sorts", sorts)
        object.__setattr__(self, "_fns", fns)
        object.__setattr__(self, "_rels", rels)
        object.__setattr__(self, "_slot", slot)

    @classmethod
    def identity(cls, theory: Theory) -> "Translation":
        sig = theory.signature
        return cls(theory, theory, tuple((s.name, s.name) for s in sig.sorts),
                   tuple((f.name, f.name) for f in sig.functions),
                   tuple((r.name, r.name) for r in sig.relations))

    @classmethod
    def inclusion(cls, source: Theory, target: Theory) -> "Translation":
        sig = source.signature
        return cls(source, target, tuple((s.name, s.name) for s in sig.sorts),
                   tuple((f.name, f.name) for f in sig.functions),
                   tuple((r.name, r.name) for r in sig.relations))

    def var(self, v: Var) -> Var:
        n, i = self._slot[v.sort]
        return Var(self._sorts[v.sort], v.rank * n + i)

    def term(self, t: Term) -> Term:
        if isinstance(t, Var):
            return self.var(t)
        if t.fn not in self._fns:
            raise TranslationError(f"unmapped symbol {t.fn.name}")
        return App(self._fns[t.fn], tuple(self.term(a) for a in t.args))

    def formula(self, phi: Formula) -> Formula:
        if isinstance(phi, Top):
            return phi
        if isinstance(phi, Eq):
            return Eq(self.term(phi.left), self.term(phi.right))
        if isinstance(phi, Rel):
            if phi.symbol not in self._rels:
                raise TranslationError(f"unmapped relation {phi.symbol.name}")
            return Rel(self._rels[phi.symbol], tuple(self.term(a) for a in phi.args))
        if isinstance(phi, And):
            return And(self.formula(phi.left), self.formula(phi.right))
        return Exists(self.var(phi.var), self.formula(phi.body))

    def sequent(self, s: Sequent) -> Sequent:
        return Sequent(self.formula(s.antecedent), tuple(self.var(v) for v in s.context),
                       self.formula(s.consequent))

    def fic(self, f: FormulaInContext) -> FormulaInContext:
        return FormulaInContext(tuple(self.var(v) for v in f.context), self.formula(f.formula))


@dataclass(frozen=True)
class TranslationCertificate:
    translation: Translation
    proofs: tuple[Proof, ...]

    def check(self) -> bool:
        t = self.translation
        return len(self.proofs) == len(t.source.axioms) and all(
            alpha_equal_sequent(p.conclusion, t.sequent(ax)) and check_proof(t.target, p).ok
            for p, ax in zip(self.proofs, t.source.axioms)
        )


def _axiom_proof(t: Translation, ax: Sequent) -> Proof | None:
    goal = t.sequent(ax)
    for j, tax in enumerate(t.target.axioms):
        if alpha_equal_sequent(tax, goal):
            return _rename_to(tac.axiom(t.target, j), goal.context)
    return None


def _rename_to(p: Proof, ctx) -> Proof:
    """Rename a proof's context positionally onto ``ctx`` (same sorts)."""
    ctx = tuple(ctx)
    if p.conclusion.context == ctx:
        return p
    binding = dict(zip(p.conclusion.context, ctx))
    return Proof(
        Sequent(_subst(p.conclusion.antecedent, binding), ctx, _subst(p.conclusion.consequent, binding)),
        Rule.SUBSTITUTION, (p,), binding=tuple(sorted(
            ((v, t) for v, t in binding.items() if v != t), key=lambda kv: (kv[0].sort.name, kv[0].rank))),
    )


def _subst(phi, binding):
    return substitute(phi, binding)


def verify_translation(t: Translation, budget=None) -> TranslationCertificate | None:
    """Prove every translated source axiom in the target; ``None`` means unknown."""
    from .search import ProofBudget, search

    budget = budget or ProofBudget()
    proofs = []
    for ax in t.source.axioms:
        p = _axiom_proof(t, ax)
        if p is None:
            res = search(t.target, t.sequent(ax), budget)
            if not res.proved:
                return None
            p = res.proof
        proofs.append(p)
    return TranslationCertificate(t, tuple(proofs))


def apply_translation(t: Translation, x, certificate: TranslationCertificate | None = None):
    """Translate a term, formula, formula-in-context, sequent or proof.

    Proof translation is rule by rule; axiom leaves are replaced by the
    certificate's proofs (renamed onto the leaf's context).
    """
    if isinstance(x, (Var, App)):
        return t.term(x)
    if isinstance(x, (Top, Eq, Rel, And, Exists)):
        return t.formula(x)
    if isinstance(x, FormulaInContext):
        return t.fic(x)
    if isinstance(x, Sequent):
        return t.sequent(x)
    if isinstance(x, Proof):
        return _translate_proof(t, x, certificate)
    raise TypeError(f"cannot translate {type(x).__name__}")


def _translate_proof(t: Translation, proof: Proof, cert: TranslationCertificate | None) -> Proof:
    cache: dict[int, Proof] = {}
    for node in proof.nodes():
        prem = tuple(cache[id(q)] for q in node.premises)
        concl = t.sequent(node.conclusion)
        if node.rule is Rule.THEORY_AXIOM:
            if cert is not None:
                base = cert.proofs[node.index]
            else:
                base = _axiom_proof(t, t.source.axioms[node.index])
                if base is None:
                    raise TranslationError("proof uses an axiom and no certificate was given")
            out = _rename_to(base, concl.context)
        else:
            out = Proof(
                concl, node.rule, prem,
                cut=None if node.cut is None else t.formula(node.cut),
                binding=tuple(sorted(((t.var(v), t.term(s)) for v, s in node.binding),
                                     key=lambda kv: (kv[0].sort.name, kv[0].rank))),
                index=None,
                var=None if node.var is None else t.var(node.var),
                motive=None if node.motive is None else t.formula(node.motive),
            )
        cache[id(node)] = out
    return cache[id(proof)]
