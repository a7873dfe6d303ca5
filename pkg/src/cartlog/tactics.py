"""Derived rules.  Each helper returns a ``Proof`` whose conclusion it computes;
nothing here is trusted, the checker re-validates every node."""

from __future__ import annotations

from typing import Callable, Iterable, Mapping

from .kernel import Proof, Rule
from .syntax import (
    TOP, And, App, Eq, Exists, Formula, Sequent, Term, Top, Var, all_vars, alpha_eq_formula,
    conj, conjuncts, exists_many, free_vars, fresh_var, is_free_for, sort_of, substitute, term_vars,
)


class SideConditionError(ValueError):
    """A derived rule was applied outside its side conditions."""


def _ctx(p: Proof):
    return p.conclusion.context


def identity(ctx, phi: Formula) -> Proof:
    return Proof(Sequent(phi, ctx, phi), Rule.IDENTITY)


def cut(p: Proof, q: Proof) -> Proof:
    return Proof(Sequent(p.conclusion.antecedent, _ctx(p), q.conclusion.consequent),
                 Rule.CUT, (p, q), cut=p.conclusion.consequent)


def top_intro(ctx, g: Formula) -> Proof:
    return Proof(Sequent(g, ctx, TOP), Rule.TOP_INTRO)


def and_intro(p: Proof, q: Proof) -> Proof:
    c = p.conclusion
    return Proof(Sequent(c.antecedent, c.context, And(c.consequent, q.conclusion.consequent)),
                 Rule.AND_INTRO, (p, q))


def and_elim_left(ctx, a: Formula, b: Formula) -> Proof:
    return Proof(Sequent(And(a, b), ctx, a), Rule.AND_ELIM_LEFT)


def and_elim_right(ctx, a: Formula, b: Formula) -> Proof:
    return Proof(Sequent(And(a, b), ctx, b), Rule.AND_ELIM_RIGHT)


def refl(ctx, t: Term) -> Proof:
    return Proof(Sequent(TOP, ctx, Eq(t, t)), Rule.EQ_REFL)


def axiom(theory, index: int) -> Proof:
    return Proof(theory.axioms[index], Rule.THEORY_AXIOM, index=index)


def from_top(g: Formula, p: Proof) -> Proof:
    """Turn ``top |- psi`` into ``g |- psi``."""
    if isinstance(g, Top):
        return p
    return cut(top_intro(_ctx(p), g), p)


def substitution(p: Proof, binding: Mapping[Var, Term], ctx) -> Proof:
    binding = {v: t for v, t in binding.items() if v != t}
    c = p.conclusion
    if not binding and tuple(ctx) == c.context:
        return p
    items = tuple(sorted(binding.items(), key=lambda kv: (kv[0].sort.name, kv[0].rank)))
    return Proof(Sequent(substitute(c.antecedent, binding), ctx, substitute(c.consequent, binding)),
                 Rule.SUBSTITUTION, (p,), binding=items)


def weaken(p: Proof, ctx) -> Proof:
    """Move a proof into a larger context (identity substitution)."""
    ctx = tuple(ctx)
    if not set(_ctx(p)) <= set(ctx):
        raise SideConditionError("weakening must not drop variables")
    return substitution(p, {}, ctx)


def replacement(ctx, v: Var, motive: Formula, s: Term, t: Term) -> Proof:
    return Proof(Sequent(And(Eq(s, t), substitute(motive, {v: s})), ctx, substitute(motive, {v: t})),
                 Rule.EQ_REPLACEMENT, var=v, motive=motive)


def _avoid_fresh(sort, *things) -> Var:
    avoid: set[Var] = set()
    for x in things:
        if isinstance(x, (Var, App)):
            avoid |= term_vars(x)
        elif isinstance(x, (set, frozenset, tuple, list)):
            avoid |= set(x)
        else:
            avoid |= all_vars(x)
    return fresh_var(sort, avoid)


def leibniz(p_eq: Proof, p_body: Proof, v: Var, motive: Formula) -> Proof:
    """From ``G |- s = t`` and ``G |- chi[s/v]`` infer ``G |- chi[t/v]``."""
    eq = p_eq.conclusion.consequent
    rep = replacement(_ctx(p_eq), v, motive, eq.left, eq.right)
    return cut(and_intro(p_eq, p_body), rep)


def sym(p: Proof) -> Proof:
    c = p.conclusion
    s, t = c.consequent.left, c.consequent.right
    v = _avoid_fresh(sort_of(s), s, t, c.context)
    return leibniz(p, from_top(c.antecedent, refl(c.context, s)), v, Eq(v, s))


def trans(p: Proof, q: Proof) -> Proof:
    """``G |- r = s`` and ``G |- s = t`` give ``G |- r = t``."""
    r = p.conclusion.consequent.left
    s, t = q.conclusion.consequent.left, q.conclusion.consequent.right
    v = _avoid_fresh(sort_of(s), r, s, t, p.conclusion.context)
    return leibniz(q, p, v, Eq(r, v))


def congruence(g: Formula, ctx, left: App, right: App, arg_proofs) -> Proof:
    """``G |- left = right`` from proofs of the argument equalities (``None`` where identical)."""
    cur = from_top(g, refl(ctx, left))
    args = list(left.args)
    for i, pi in enumerate(arg_proofs):
        if pi is None:
            continue
        v = _avoid_fresh(sort_of(args[i]), left, right, tuple(ctx))
        hole = App(left.fn, tuple(args[:i]) + (v,) + tuple(args[i + 1:]))
        cur = leibniz(pi, cur, v, Eq(left, hole))
        args[i] = right.args[i]
    return cur


def rewrite_formula(p_eq: Proof, p_body: Proof, target: Formula) -> Proof:
    """Given ``G |- s = t`` and ``G |- chi`` conclude ``G |- target`` where
    ``target`` is ``chi`` with (some) occurrences of the variable ``s`` replaced by ``t``."""
    eq = p_eq.conclusion.consequent
    s = eq.left
    if not isinstance(s, Var):
        raise SideConditionError("rewrite_formula replaces a variable")
    body = p_body.conclusion.consequent
    v = _avoid_fresh(s.sort, body, target, eq.right, tuple(_ctx(p_eq)))
    motive = _abstract_var(body, target, s, eq.right, v)
    return leibniz(p_eq, p_body, v, motive)


def _abstract_var(src: Formula, dst: Formula, s: Var, t: Term, v: Var) -> Formula:
    """Motive ``chi`` with ``chi[s/v] = src`` and ``chi[t/v] = dst`` (positions where they differ)."""
    if isinstance(src, Eq):
        return Eq(_abstract_term(src.left, dst.left, s, t, v), _abstract_term(src.right, dst.right, s, t, v))
    if isinstance(src, And):
        return And(_abstract_var(src.left, dst.left, s, t, v), _abstract_var(src.right, dst.right, s, t, v))
    if isinstance(src, Exists):
        if src.var != dst.var:
            raise SideConditionError("binders differ")
        return Exists(src.var, _abstract_var(src.body, dst.body, s, t, v))
    if src != dst:
        raise SideConditionError("formulas differ outside terms")
    return src


def _abstract_term(a: Term, b: Term, s: Var, t: Term, v: Var) -> Term:
    if a == b:
        return a
    if a == s and b == t:
        return v
    if isinstance(a, App) and isinstance(b, App) and a.fn == b.fn:
        return App(a.fn, tuple(_abstract_term(x, y, s, t, v) for x, y in zip(a.args, b.args)))
    raise SideConditionError("terms differ outside the rewritten variable")


def conj_lookup(ctx, g: Formula, target: Formula) -> Proof | None:
    """``g |- target`` when ``target`` is ``g`` or one of its (nested) conjuncts."""
    if isinstance(target, Top):
        return top_intro(ctx, g)

    def walk(h):
        if alpha_eq_formula(h, target):
            return identity(ctx, h)
        if isinstance(h, And):
            sub = walk(h.left)
            if sub is not None:
                return cut(and_elim_left(ctx, h.left, h.right), sub)
            sub = walk(h.right)
            if sub is not None:
                return cut(and_elim_right(ctx, h.left, h.right), sub)
        return None

    return walk(g)


def conj_build(ctx, g: Formula, parts: Iterable[Formula]) -> Proof:
    """``g |- conj(parts)`` where each part is a conjunct of ``g``."""
    parts = list(parts)
    proofs = []
    for part in parts:
        p = conj_lookup(ctx, g, part)
        if p is None:
            raise SideConditionError("not a conjunct of the antecedent")
        proofs.append(p)
    if not proofs:
        return top_intro(ctx, g)
    out = proofs[0]
    for p in proofs[1:]:
        out = and_intro(out, p)
    return out


def exists_elim(p: Proof, y: Var) -> Proof:
    """``exists y. A |-_x B`` gives ``A |-_{x,y} B``."""
    c = p.conclusion
    e = c.antecedent
    if not isinstance(e, Exists):
        raise SideConditionError("antecedent is not existential")
    body = e.body if e.var == y else substitute(e.body, {e.var: y})
    return Proof(Sequent(body, c.context + (y,), c.consequent), Rule.EXISTS_ELIM, (p,), var=y)


def exists_adjoint(p: Proof, y: Var) -> Proof:
    """``A |-_{x,y} B`` gives ``exists y. A |-_x B``."""
    c = p.conclusion
    if not c.context or c.context[-1] != y:
        raise SideConditionError("the quantified variable must close the context")
    return Proof(Sequent(Exists(y, c.antecedent), c.context[:-1], c.consequent),
                 Rule.EXISTS_ADJOINT, (p,), var=y)


def frobenius(ctx, a: Formula, y: Var, b: Formula) -> Proof:
    return Proof(Sequent(And(a, Exists(y, b)), ctx, Exists(y, And(a, b))), Rule.FROBENIUS, var=y)


def exists_intro(p: Proof, tau: Term, y: Var, psi: Formula) -> Proof:
    """Existential introduction as a macro: from ``phi |-_x psi[tau/y]`` derive
    ``phi |-_x exists y. psi`` using exists-elimination on an identity, a
    substitution ``y := tau`` and a cut."""
    c = p.conclusion
    x = c.context
    if sort_of(tau) != y.sort:
        raise SideConditionError("witness has the wrong sort")
    if not term_vars(tau) <= set(x):
        raise SideConditionError("witness uses variables outside the context")
    if not is_free_for(tau, y, psi):
        raise SideConditionError("witness is not free for the variable")
    if not alpha_eq_formula(c.consequent, substitute(psi, {y: tau})):
        raise SideConditionError("premise does not conclude psi[tau/y]")
    target = Exists(y, psi)
    if not free_vars(target) <= set(x):
        raise SideConditionError("context does not cover the conclusion")
    if y in x:
        y2 = fresh_var(y.sort, set(x) | all_vars(psi) | term_vars(tau))
        psi2 = substitute(psi, {y: y2})
    else:
        y2, psi2 = y, psi
    top = identity(x, target)
    opened = Proof(Sequent(psi2, x + (y2,), target), Rule.EXISTS_ELIM, (top,), var=y2)
    inst = Proof(Sequent(substitute(psi2, {y2: tau}), x, target), Rule.SUBSTITUTION, (opened,),
                 binding=((y2, tau),))
    return cut(p, inst)


def exists_intro_many(p: Proof, taus, ys, psi: Formula) -> Proof:
    """Iterated introduction: ``phi |- psi[taus/ys]`` gives ``phi |- exists ys. psi``."""
    taus, ys = list(taus), list(ys)
    if not ys:
        return p
    # introduce innermost first: exists y_n with the earlier ys already replaced
    binding = dict(zip(ys, taus))
    for k in range(len(ys) - 1, -1, -1):
        inner = psi
        for j in range(len(ys) - 1, k, -1):
            inner = Exists(ys[j], inner)
        partial = substitute(inner, {v: binding[v] for v in ys[:k]})
        p = exists_intro(p, taus[k], ys[k], partial)
    return p


def exists_lift_many(p: Proof, ys) -> Proof:
    """``A |-_{x,ys} B`` gives ``exists ys. A |-_x B``."""
    for y in reversed(list(ys)):
        p = exists_adjoint(p, y)
    return p


Lift = Callable[[Proof], Proof]


def prenex(ctx, g: Formula, avoid: Iterable[Var] = ()) -> tuple[Formula, tuple[Var, ...], Lift]:
    """Pull existentials out of the antecedent.

    Returns ``(g', ys, lift)`` where ``g'`` has no existential conjuncts and
    ``lift`` maps a proof of ``g' |-_{ctx,ys} D`` to one of ``g |-_ctx D``
    (``D`` must not mention the ``ys``; they are chosen fresh w.r.t. ``avoid``).
    """
    avoid = set(avoid) | set(ctx) | all_vars(g)
    cs = conjuncts(g)
    idx = next((i for i, c in enumerate(cs) if isinstance(c, Exists)), None)
    if idx is None:
        return g, (), lambda q: q
    e = cs[idx]
    y = e.var if e.var not in avoid else fresh_var(e.var.sort, avoid)
    body = e.body if y == e.var else substitute(e.body, {e.var: y})
    others = cs[:idx] + cs[idx + 1:]
    ctx = tuple(ctx)
    if not others:
        g1 = body

        def step(q):
            return exists_adjoint(q, y)
    else:
        a = conj(others)
        g1 = And(a, body)
        r1 = and_intro(conj_build(ctx, g, others), conj_lookup(ctx, g, e))
        r2 = frobenius(ctx, a, y, body)

        def step(q):
            return cut(r1, cut(r2, exists_adjoint(q, y)))
    g2, ys, lift2 = prenex(ctx + (y,), g1, avoid | {y})
    return g2, (y,) + ys, lambda q: step(lift2(q))


def proj_left(p: Proof) -> Proof:
    """``G |- A & B`` gives ``G |- A``."""
    c = p.conclusion.consequent
    return cut(p, and_elim_left(_ctx(p), c.left, c.right))


def proj_right(p: Proof) -> Proof:
    c = p.conclusion.consequent
    return cut(p, and_elim_right(_ctx(p), c.left, c.right))


def exists_mono(p: Proof, z: Var) -> Proof:
    """``A |-_{x,z} B`` gives ``exists z. A |-_x exists z. B``."""
    b = p.conclusion.consequent
    ctx = _ctx(p)
    return exists_adjoint(cut(p, exists_intro(identity(ctx, b), z, z, b)), z)


def frobenius_many(ctx, a: Formula, zs, b: Formula) -> Proof:
    """``a & exists zs. b |- exists zs. (a & b)``."""
    zs = tuple(zs)
    ctx = tuple(ctx)
    if not zs:
        return identity(ctx, And(a, b))
    z, rest = zs[0], zs[1:]
    first = frobenius(ctx, a, z, exists_many(rest, b))
    if not rest:
        return first
    inner = frobenius_many(ctx + (z,), a, rest, b)
    return cut(first, exists_mono(inner, z))


def open_exists(ctx, a: Formula, zs, b: Formula, q: Proof) -> Proof:
    """From ``a & b |-_{ctx,zs} D`` derive ``a & exists zs. b |-_ctx D``."""
    return cut(frobenius_many(ctx, a, zs, b), exists_lift_many(q, zs))


def swap(ctx, a: Formula, b: Formula) -> Proof:
    """``a & b |- b & a``."""
    return and_intro(and_elim_right(ctx, a, b), and_elim_left(ctx, a, b))


def rewrite_vars(eqs: Mapping[Var, Proof], p_body: Proof) -> Proof:
    """Replace free variables: ``eqs[a]`` proves ``G |- a = b``; from ``G |- chi``
    derive ``G |- chi[b/a]`` (one variable at a time)."""
    cur = p_body
    for a, pe in eqs.items():
        b = pe.conclusion.consequent.right
        body = cur.conclusion.consequent
        if a not in free_vars(body):
            continue
        v = _avoid_fresh(a.sort, body, b, tuple(_ctx(pe)), a)
        motive = substitute(body, {a: v})
        cur = leibniz(pe, cur, v, motive)
    return cur


def conj_proofs(proofs) -> Proof | None:
    """Fold ``G |- A_i`` into ``G |- A_1 & ... & A_n`` (left-associated)."""
    proofs = list(proofs)
    if not proofs:
        return None
    out = proofs[0]
    for p in proofs[1:]:
        out = and_intro(out, p)
    return out
