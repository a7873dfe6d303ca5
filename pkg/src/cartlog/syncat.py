"""Arithmetic in the syntactic category of a cartesian theory.

Objects are alpha-normal formulas-in-context.  A morphism ``{x.phi} -> {y.psi}``
is a formula ``theta`` over ``x`` followed by ``y`` (renamed apart) together
with three checked proofs: containment, single-valuedness and totality.

Certificates for identities, graphs of terms, projections and composites are
assembled by hand from derived rules; only ``make_morphism`` and ``pairing``
search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import tactics as tac
from .dsl import Printer
from .kernel import Proof, check_proof
from .search import BiProvable, CartesianCertificate, ProofBudget, SearchResult, bi_provable, is_cartesian_relative, search
from .syntax import (
    TOP, And, App, Eq, Exists, Formula, FormulaInContext, FunctionSymbol, Sequent, Sort, Term, Top, Var,
    all_vars, alpha_equal_sequent, canonical_context, conj, equalities, exists_many, free_vars,
    fresh_var, normalize, rename_context, substitute,
)


class BoundaryError(ValueError):
    pass


@dataclass(frozen=True)
class SynObject:
    representative: FormulaInContext
    cartesian: CartesianCertificate | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "representative", normalize(self.representative))

    @classmethod
    def of(cls, context: Sequence[Var], formula: Formula = TOP) -> "SynObject":
        return cls(FormulaInContext(tuple(context), formula))

    @classmethod
    def certified(cls, fic: FormulaInContext, theory, budget: ProofBudget = ProofBudget()) -> "SynObject":
        return cls(fic, is_cartesian_relative(normalize(fic), theory, budget))

    @property
    def context(self) -> tuple[Var, ...]:
        return self.representative.context

    @property
    def formula(self) -> Formula:
        return self.representative.formula


def _counts(ctx) -> dict[Sort, int]:
    out: dict[Sort, int] = {}
    for v in ctx:
        out[v.sort] = out.get(v.sort, 0) + 1
    return out


def cod_context(dom: SynObject, cod: SynObject) -> tuple[Var, ...]:
    """Codomain variables numbered after the domain's, per sort."""
    return canonical_context(cod.context, _counts(dom.context))


def _fresh_like(template: Sequence[Var], avoid) -> tuple[Var, ...]:
    avoid = set(avoid)
    out = []
    for v in template:
        w = fresh_var(v.sort, avoid)
        avoid.add(w)
        out.append(w)
    return tuple(out)


def functionality_sequents(dom: SynObject, cod: SynObject, theta: Formula) -> tuple[Sequent, Sequent, Sequent]:
    x = dom.context
    y = cod_context(dom, cod)
    psi = rename_context(cod.representative, y).formula
    y2 = _fresh_like(y, set(x) | set(y) | all_vars(theta))
    contain = Sequent(theta, x + y, And(dom.formula, psi))
    single = Sequent(And(theta, substitute(theta, dict(zip(y, y2)))), x + y + y2, equalities(y, y2))
    total = Sequent(dom.formula, x, exists_many(y, theta))
    return contain, single, total


@dataclass(frozen=True)
class FunctionalityCertificate:
    containment: Proof
    single_valued: Proof
    totality: Proof

    def proofs(self) -> tuple[Proof, Proof, Proof]:
        return (self.containment, self.single_valued, self.totality)


@dataclass(frozen=True, eq=False)
class SynMorphism:
    theory: object
    dom: SynObject
    cod: SynObject
    theta: Formula
    certificate: FunctionalityCertificate

    @property
    def x(self) -> tuple[Var, ...]:
        return self.dom.context

    @property
    def y(self) -> tuple[Var, ...]:
        return cod_context(self.dom, self.cod)

    @property
    def context(self) -> tuple[Var, ...]:
        return self.x + self.y

    def as_fic(self) -> FormulaInContext:
        return FormulaInContext(self.context, self.theta)

    def check(self) -> bool:
        """Every certificate proof is valid and proves the required sequent."""
        wanted = functionality_sequents(self.dom, self.cod, self.theta)
        return all(alpha_equal_sequent(p.conclusion, s) and check_proof(self.theory, p).ok
                   for p, s in zip(self.certificate.proofs(), wanted))

    def __str__(self):
        return format_morphism(self)


def format_morphism(m: SynMorphism, status: bool = False) -> str:
    pr = Printer(m.theory.signature)
    cod = FormulaInContext(m.y, rename_context(m.cod.representative, m.y).formula)
    text = f"[{pr.formula(m.theta)}] : {pr.fic(m.dom.representative)} -> {pr.fic(cod)}"
    if status:
        text += "  (certified)" if m.check() else "  (INVALID certificate)"
    return text


def _check_scope(dom: SynObject, cod: SynObject, theta: Formula):
    extra = free_vars(theta) - set(dom.context) - set(cod_context(dom, cod))
    if extra:
        raise ValueError(f"free variables {sorted(extra)} outside the concatenated context")


def make_morphism(theory, theta: Formula, dom: SynObject, cod: SynObject,
                  budget: ProofBudget = ProofBudget()) -> SynMorphism | None:
    """Search for the three functionality proofs; ``None`` means not certified within budget."""
    _check_scope(dom, cod, theta)
    proofs = []
    for s in functionality_sequents(dom, cod, theta):
        res = search(theory, s, budget)
        if not res.proved:
            return None
        proofs.append(res.proof)
    return SynMorphism(theory, dom, cod, theta, FunctionalityCertificate(*proofs))


# -- graphs of terms --------------------------------------------------------


def graph_morphism(theory, dom: SynObject, cod: SynObject, terms: Sequence[Term],
                   cod_proof: Proof | None = None, keep_domain: bool = True) -> SynMorphism:
    """The morphism ``[phi & t = y]`` (or ``[t = y]`` when the domain is ``top``
    and ``keep_domain`` is false).  ``cod_proof`` proves ``phi |-_x psi[t/y]``;
    it may be omitted when that is a conjunct lookup."""
    x, y = dom.context, cod_context(dom, cod)
    terms = tuple(terms)
    if len(terms) != len(y):
        raise BoundaryError("one term per codomain variable is needed")
    phi = dom.formula
    psi = rename_context(cod.representative, y).formula
    eqs = equalities(terms, y)
    keep = keep_domain or not isinstance(phi, Top)
    theta = And(phi, eqs) if keep else eqs
    psi_t = substitute(psi, dict(zip(y, terms)))
    if cod_proof is None:
        cod_proof = tac.conj_lookup(x, phi, psi_t)
        if cod_proof is None:
            raise BoundaryError("cannot see that the terms land in the codomain")

    contain, single, total = functionality_sequents(dom, cod, theta)
    xy = x + y

    def lk(ctx, g, f):
        p = tac.conj_lookup(ctx, g, f)
        assert p is not None, f
        return p

    # containment
    p_phi = lk(xy, theta, phi)
    cur = tac.cut(p_phi, tac.weaken(cod_proof, xy))
    avoid = set(xy) | all_vars(psi) | all_vars(theta)
    for j, (t, yj) in enumerate(zip(terms, y)):
        v = fresh_var(yj.sort, avoid)
        motive = substitute(psi, {yj: v, **{y[k]: terms[k] for k in range(j + 1, len(y))}})
        cur = tac.leibniz(lk(xy, theta, Eq(t, yj)), cur, v, motive)
    c1 = tac.and_intro(p_phi, cur)

    # single-valuedness
    ctx2 = single.context
    y2 = ctx2[len(xy):]
    theta2 = single.antecedent.right
    g2 = single.antecedent
    parts = []
    for t, a, b in zip(terms, y, y2):
        e1 = tac.cut(tac.and_elim_left(ctx2, theta, theta2), lk(ctx2, theta, Eq(t, a)))
        e2 = tac.cut(tac.and_elim_right(ctx2, theta, theta2), lk(ctx2, theta2, Eq(t, b)))
        parts.append(tac.trans(tac.sym(e1), e2))
    c2 = tac.conj_proofs(parts) or tac.top_intro(ctx2, g2)

    # totality
    refls = [tac.from_top(phi, tac.refl(x, t)) for t in terms]
    p_eqs = tac.conj_proofs(refls) or tac.top_intro(x, phi)
    inst = tac.and_intro(tac.identity(x, phi), p_eqs) if keep else p_eqs
    c3 = tac.exists_intro_many(inst, terms, y, theta)
    return SynMorphism(theory, dom, cod, theta, FunctionalityCertificate(c1, c2, c3))


def identity(theory, o: SynObject) -> SynMorphism:
    """``[phi & x = x']``."""
    return graph_morphism(theory, o, o, o.context, tac.identity(o.context, o.formula), keep_domain=True)


def canonical_interpretation(theory, word: Sequence, sort: Sort | None = None) -> SynMorphism:
    """``[w(x) = y] : {x.top} -> {y.top}``, leftmost letter outermost; the empty word gives the identity."""
    syms: list[FunctionSymbol] = [theory.signature.function(s) if isinstance(s, str) else s for s in word]
    for f in syms:
        if f.arity != 1 or f.arg_sorts[0] != f.result:
            raise ValueError(f"{f.name} is not a unary endo-symbol")
    if sort is None:
        if not syms:
            raise ValueError("the sort of an empty word must be given")
        sort = syms[0].result
    if any(f.result != sort for f in syms):
        raise ValueError("word mixes sorts")
    o = SynObject.of((Var(sort, 0),))
    if not syms:
        return identity(theory, o)
    t: Term = o.context[0]
    for f in reversed(syms):
        t = App(f, (t,))
    return graph_morphism(theory, o, o, (t,), keep_domain=False)


def product(theory, o1: SynObject, o2: SynObject) -> tuple[SynObject, SynMorphism, SynMorphism]:
    x1 = o1.context
    x2 = canonical_context(o2.context, _counts(x1))
    phi2 = rename_context(o2.representative, x2).formula
    parts = [f for f in (o1.formula, phi2) if not isinstance(f, Top)]
    p = SynObject.of(x1 + x2, conj(parts))
    n1 = len(x1)
    pc = p.context
    pi1 = graph_morphism(theory, p, o1, pc[:n1])
    pi2 = graph_morphism(theory, p, o2, pc[n1:])
    return p, pi1, pi2


def pairing(theory, f: SynMorphism, g: SynMorphism, budget: ProofBudget = ProofBudget()) -> SynMorphism | None:
    """``<f, g> : Z -> A x B``; certified by search."""
    if f.dom != g.dom:
        raise BoundaryError("pairing needs a common domain")
    p, _, _ = product(theory, f.cod, g.cod)
    y = cod_context(f.dom, p)
    n1 = len(f.cod.context)
    tf = substitute(f.theta, dict(zip(f.y, y[:n1])))
    tg = substitute(g.theta, dict(zip(g.y, y[n1:])))
    return make_morphism(theory, And(tf, tg), f.dom, p, budget)


# -- composition ------------------------------------------------------------


def _peel(phi: Formula, n: int) -> tuple[tuple[Var, ...], Formula]:
    vs = []
    for _ in range(n):
        assert isinstance(phi, Exists)
        vs.append(phi.var)
        phi = phi.body
    return tuple(vs), phi


def compose(g: SynMorphism, f: SynMorphism) -> SynMorphism:
    """``g . f`` represented by ``exists y. (theta & gamma)``; certificates are synthesized."""
    if f.cod != g.dom:
        raise BoundaryError("codomain of the first morphism differs from the domain of the second")
    theory = f.theory
    X = f.x
    Z = canonical_context(g.cod.context, _counts(X))
    Y = _fresh_like(f.y, set(X) | set(Z) | all_vars(f.theta) | all_vars(g.theta) | set(g.context))
    theta = substitute(f.theta, dict(zip(f.y, Y)))
    gamma = substitute(g.theta, {**dict(zip(g.x, Y)), **dict(zip(g.y, Z))})
    H = And(theta, gamma)
    rho = exists_many(Y, H)
    dom, cod = f.dom, g.cod
    contain, single, total = functionality_sequents(dom, cod, rho)

    fc, gc = f.certificate, g.certificate
    XY, YZ = X + Y, Y + Z
    F1 = tac.substitution(fc.containment, dict(zip(f.y, Y)), XY)
    F3 = fc.totality
    G1 = tac.substitution(gc.containment, {**dict(zip(g.x, Y)), **dict(zip(g.y, Z))}, YZ)
    G3 = tac.substitution(gc.totality, dict(zip(g.x, Y)), Y)

    # containment: exists Y. (theta & gamma) |- phi & chi
    c = X + Z + Y
    a = tac.cut(tac.and_elim_left(c, theta, gamma), tac.proj_left(tac.weaken(F1, c)))
    b = tac.cut(tac.and_elim_right(c, theta, gamma), tac.proj_right(tac.weaken(G1, c)))
    c1 = tac.exists_lift_many(tac.and_intro(a, b), Y)

    # totality: phi |- exists Z. exists Y. (theta & gamma)
    t1 = tac.and_intro(tac.identity(XY, theta),
                       tac.cut(tac.proj_right(F1), tac.weaken(G3, XY)))
    t2 = tac.frobenius_many(XY, theta, Z, gamma)
    inner = tac.exists_intro_many(tac.identity(XY + Z, H), Y, Y, H)
    t3 = inner
    for zv in reversed(Z):
        t3 = tac.exists_mono(t3, zv)
    t4 = tac.exists_lift_many(tac.cut(t1, tac.cut(t2, t3)), Y)
    c3 = tac.cut(F3, t4)

    # single-valuedness
    ctx2 = single.context
    if not Z:
        c2 = tac.top_intro(ctx2, single.antecedent)
    else:
        c2 = _composite_single(f, g, X, Y, Z, theta, gamma, rho, single)
    return SynMorphism(theory, dom, cod, rho, FunctionalityCertificate(c1, c2, c3))


def _composite_single(f, g, X, Y, Z, theta, gamma, rho, single: Sequent) -> Proof:
    ctx = single.context
    Zc = ctx[len(X) + len(Z):]
    rho2 = single.antecedent.right
    avoid = set(ctx) | all_vars(single.antecedent)
    Y1 = _fresh_like(Y, avoid)
    Y2 = _fresh_like(Y, avoid | set(Y1))
    ys1, body1 = _peel(rho, len(Y))
    ys2, body2 = _peel(rho2, len(Y))
    B1 = substitute(body1, dict(zip(ys1, Y1)))
    B2 = substitute(body2, dict(zip(ys2, Y2)))
    cc = ctx + Y1 + Y2
    H2 = And(B1, B2)
    t1, g1 = B1.left, B1.right
    t2, g2 = B2.left, B2.right

    def lk(f_):
        p = tac.conj_lookup(cc, H2, f_)
        assert p is not None
        return p

    f2 = f.certificate.single_valued
    fy2 = f2.conclusion.context[len(f.x) + len(f.y):]
    g2c = g.certificate.single_valued
    gz2 = g2c.conclusion.context[len(g.x) + len(g.y):]

    rewrites = {}
    if Y:
        inst = tac.substitution(f2, {**dict(zip(f.y, Y1)), **dict(zip(fy2, Y2))}, cc)
        eqs = tac.cut(tac.and_intro(lk(t1), lk(t2)), inst)
        econj = eqs.conclusion.consequent
        for a, b in zip(Y1, Y2):
            e = tac.cut(eqs, tac.conj_lookup(cc, econj, Eq(a, b)))
            rewrites[b] = tac.sym(e)
    g2r = tac.rewrite_vars(rewrites, lk(g2))
    inst2 = tac.substitution(g2c, {**dict(zip(g.x, Y1)), **dict(zip(g.y, Z)), **dict(zip(gz2, Zc))}, cc)
    q2 = tac.cut(tac.and_intro(lk(g1), g2r), inst2)

    c = ctx
    q1 = tac.cut(tac.swap(c + Y1, rho2, B1), tac.open_exists(c + Y1, B1, Y2, B2, q2))
    return tac.cut(tac.swap(c, rho, rho2), tac.open_exists(c, rho2, Y1, B1, q1))


# -- comparisons ------------------------------------------------------------


def same_morphism(m1: SynMorphism, m2: SynMorphism, budget: ProofBudget = ProofBudget()) -> BiProvable:
    """Morphism equality as mutual entailment of representatives (semi-decided)."""
    if m1.dom != m2.dom or m1.cod != m2.cod:
        raise BoundaryError("morphisms have different boundaries")
    return bi_provable(m1.theory, m1.as_fic(), m2.as_fic(), budget)


def subobject_leq(theory, phi: FormulaInContext, psi: FormulaInContext,
                  budget: ProofBudget = ProofBudget()) -> SearchResult:
    if len(phi.context) != len(psi.context):
        raise BoundaryError("subobjects of different contexts")
    psi = rename_context(psi, phi.context)
    return search(theory, Sequent(phi.formula, phi.context, psi.formula), budget)
