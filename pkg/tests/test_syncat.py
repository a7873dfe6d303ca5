import random

import pytest
from hypothesis import given, settings, strategies as st

import generators as gen
from cartlog import tactics as tac
from cartlog.kernel import proves
from cartlog.models import interpret_formula, is_model, linear_module_model, satisfies, trivial_model
from cartlog.search import ProofBudget
from cartlog.syncat import (
    BoundaryError, SynObject, canonical_interpretation, compose, format_morphism, functionality_sequents,
    graph_morphism, identity, make_morphism, pairing, product, same_morphism, subobject_leq,
)
from cartlog.syntax import TOP, And, App, Eq, FormulaInContext, Sequent, Var
from cartlog.theories import AlgebraPresentation, Theory, module_theory
from cartlog.wordprob import MonoidPresentation, bfs_equivalent, certificate_to_proof, encode

FREE = module_theory(AlgebraPresentation(("X", "Y")))
SIG = FREE.signature
A = SIG.sorts[0]
X, Y = SIG.function("X"), SIG.function("Y")
x, y, z = (Var(A, i) for i in range(3))
ONE = SynObject.of((x,))
UNARY = Theory(gen.UNARY)
SMALL = ProofBudget(max_depth=3, max_sequents=500)


def X_(t):
    return App(X, (t,))


def Y_(t):
    return App(Y, (t,))


# -- morphisms ----------------------------------------------------------------


def test_graph_of_a_generator_is_certified_by_search():
    m = make_morphism(FREE, Eq(X_(x), y), ONE, ONE)
    assert m is not None and m.check()
    assert format_morphism(m) == "[X(x) = y] : {x. top} -> {y. top}"


def test_top_is_not_single_valued():
    assert make_morphism(FREE, TOP, ONE, ONE, SMALL) is None
    _, single, _ = functionality_sequents(ONE, ONE, TOP)
    two = linear_module_model(SIG, {"X": [[1]], "Y": [[1]]})
    assert is_model(two, FREE) and not satisfies(two, single)


def test_identity_formula_is_a_morphism():
    ident = identity(FREE, ONE)
    assert ident.check()
    assert ident.theta == And(TOP, Eq(x, y))
    searched = make_morphism(FREE, And(TOP, Eq(x, y)), ONE, ONE)
    assert searched is not None and searched.check()


def test_identity_on_a_constrained_object():
    o = SynObject.certified(FormulaInContext((x,), Eq(X_(x), Y_(x))), FREE)
    assert o.cartesian.certified
    assert identity(FREE, o).check()


def test_scope_errors():
    with pytest.raises(ValueError):
        make_morphism(FREE, Eq(X_(z), y), ONE, ONE)
    with pytest.raises(BoundaryError):
        graph_morphism(FREE, ONE, ONE, (x, x))


# -- composition ----------------------------------------------------------------


def test_composite_of_graphs_is_the_graph_of_the_composite_term():
    f = canonical_interpretation(FREE, "X")
    g = canonical_interpretation(FREE, "Y")
    gf = compose(g, f)
    assert gf.check()
    assert same_morphism(gf, canonical_interpretation(FREE, "YX")).proved


def test_identity_laws():
    m = canonical_interpretation(FREE, "XY")
    i = identity(FREE, ONE)
    assert same_morphism(compose(i, m), m).proved
    assert same_morphism(compose(m, i), m).proved
    assert same_morphism(compose(i, i), i).proved


def test_associativity_on_generators():
    a, b, c = (canonical_interpretation(FREE, w) for w in ("X", "Y", "X"))
    left = compose(compose(a, b), c)
    right = compose(a, compose(b, c))
    assert left.check() and right.check()
    assert same_morphism(left, right).proved


def test_composition_boundary_mismatch():
    o = SynObject.of((x,), Eq(X_(x), x))
    f = identity(FREE, o)
    with pytest.raises(BoundaryError):
        compose(canonical_interpretation(FREE, "X"), f)


def test_composition_of_non_graph_morphisms():
    o = SynObject.of((x,), Eq(X_(x), Y_(x)))
    f = make_morphism(FREE, And(Eq(X_(x), Y_(x)), Eq(X_(x), y)), o, ONE)
    assert f is not None
    g = canonical_interpretation(FREE, "Y")
    gf = compose(g, f)
    assert gf.check()
    expected = make_morphism(FREE, And(Eq(X_(x), Y_(x)), Eq(Y_(X_(x)), y)), o, ONE)
    assert same_morphism(gf, expected).proved


# -- canonical interpretations --------------------------------------------------


def test_canonical_interpretation_of_a_letter_and_the_empty_word():
    m = canonical_interpretation(FREE, "X")
    assert m.theta == Eq(X_(x), y)
    e = canonical_interpretation(FREE, "", sort=A)
    assert same_morphism(e, identity(FREE, ONE)).proved
    with pytest.raises(ValueError):
        canonical_interpretation(FREE, "", sort=None)
    with pytest.raises(ValueError):
        canonical_interpretation(FREE, ["plus"])


def test_leftmost_letter_is_outermost():
    m = canonical_interpretation(FREE, "XY")
    assert m.theta == Eq(X_(Y_(x)), y)
    assert same_morphism(compose(canonical_interpretation(FREE, "X"), canonical_interpretation(FREE, "Y")), m).proved


@settings(max_examples=30)
@given(st.text("XYZ", min_size=1, max_size=5), st.text("XYZ", min_size=1, max_size=5))
def test_composite_of_words_is_the_concatenation(u, v):
    gu = canonical_interpretation(UNARY, u)
    fv = canonical_interpretation(UNARY, v)
    gf = compose(gu, fv)
    assert gf.check()
    assert same_morphism(gf, canonical_interpretation(UNARY, u + v), ProofBudget(max_depth=16)).proved


@settings(max_examples=15)
@given(st.text("XYZ", min_size=1, max_size=3), st.text("XYZ", min_size=1, max_size=3),
       st.text("XYZ", min_size=1, max_size=3))
def test_category_laws_on_random_words(a, b, c):
    ma, mb, mc = (canonical_interpretation(UNARY, w) for w in (a, b, c))
    i = identity(UNARY, ma.dom)
    budget = ProofBudget(max_depth=16)
    assert same_morphism(compose(compose(ma, mb), mc), compose(ma, compose(mb, mc)), budget).proved
    assert same_morphism(compose(i, ma), ma, budget).proved


def test_distinct_words_are_not_identified():
    m1, m2 = canonical_interpretation(FREE, "XY"), canonical_interpretation(FREE, "YX")
    assert not same_morphism(m1, m2, SMALL).proved
    M = linear_module_model(SIG, {"X": [[0, 1], [0, 0]], "Y": [[1, 0], [0, 0]]})
    assert is_model(M, FREE)
    assert interpret_formula(M, m1.context, m1.theta) != interpret_formula(M, m2.context, m2.theta)


# -- idempotents ----------------------------------------------------------------


def test_idempotent_automorphism_is_the_identity():
    # a is idempotent with two-sided inverse b
    T = module_theory(AlgebraPresentation(("a", "b"), (("aa", "a"), ("ab", ""), ("ba", ""))))
    a_, b_ = T.signature.function("a"), T.signature.function("b")
    m = canonical_interpretation(T, "a")
    assert same_morphism(compose(m, m), m).proved

    def at(name, t):
        return tac.substitution(tac.axiom(T, T.axiom_index(name)), {x: t}, (x,))

    # a(x) = a(a(b(x))) = a(b(x)) = x; the middle term is outside the goal, so search misses it
    bx = App(b_, (x,))
    e1 = at("relation_1", x)
    e2 = at("relation_0", bx)
    e3 = tac.congruence(TOP, (x,), App(a_, (App(a_, (bx,)),)), App(a_, (x,)), [e1])
    lemma = tac.trans(tac.trans(tac.sym(e3), e2), e1)
    assert proves(T, lemma, Sequent(TOP, (x,), Eq(App(a_, (x,)), x)))

    ident = identity(T, m.dom)
    hyp = m.theta
    lem = tac.from_top(hyp, tac.weaken(lemma, (x, y)))
    forward = tac.and_intro(tac.top_intro((x, y), hyp), tac.trans(tac.sym(lem), tac.identity((x, y), hyp)))
    assert proves(T, forward, Sequent(hyp, (x, y), ident.theta))
    eq = tac.cut(tac.and_elim_right((x, y), TOP, Eq(x, y)), tac.identity((x, y), Eq(x, y)))
    back = tac.trans(tac.from_top(ident.theta, tac.weaken(lemma, (x, y))), eq)
    assert proves(T, back, Sequent(ident.theta, (x, y), hyp))


def test_idempotent_without_inverse_is_not_the_identity():
    T = module_theory(AlgebraPresentation(("a",), (("aa", "a"),)))
    a = canonical_interpretation(T, "a")
    assert same_morphism(compose(a, a), a).proved
    assert not same_morphism(a, identity(T, a.dom), SMALL).proved
    proj = linear_module_model(T.signature, {"a": [[1, 0], [0, 0]]})
    assert is_model(proj, T)
    ident = identity(T, a.dom)
    assert interpret_formula(proj, a.context, a.theta) != interpret_formula(proj, ident.context, ident.theta)


# -- products -------------------------------------------------------------------


def test_product_of_top_objects():
    p, p1, p2 = product(FREE, ONE, ONE)
    assert p == SynObject.of((x, y))
    assert p1.check() and p2.check()


def test_pairing_with_projections_gives_back_the_components():
    f = canonical_interpretation(FREE, "X")
    g = canonical_interpretation(FREE, "Y")
    h = pairing(FREE, f, g)
    assert h is not None and h.check()
    _, p1, p2 = product(FREE, ONE, ONE)
    assert same_morphism(compose(p1, h), f).proved
    assert same_morphism(compose(p2, h), g).proved


def test_product_with_the_terminal_object():
    unit = SynObject.of(())
    p, p1, _ = product(FREE, ONE, unit)
    assert p == ONE
    assert same_morphism(p1, identity(FREE, ONE)).proved


# -- subobjects -----------------------------------------------------------------


def test_subobject_order():
    phi = FormulaInContext((x,), Eq(X_(x), Y_(x)))
    assert subobject_leq(FREE, phi, FormulaInContext((x,), TOP)).proved
    assert subobject_leq(FREE, phi, phi).proved
    assert not subobject_leq(FREE, FormulaInContext((x,), TOP), phi, SMALL).proved


def test_equivalent_words_give_comparable_subobjects():
    p = MonoidPresentation(("a", "b"), (("ab", "ba"),))
    theory, seq = encode(p, "aab", "aba")
    proof = certificate_to_proof(p, bfs_equivalent(p, "aab", "aba"))
    lhs = FormulaInContext(seq.context, seq.antecedent)
    rhs = FormulaInContext(seq.context, seq.consequent)
    assert subobject_leq(theory, lhs, rhs).proved
    assert proof.conclusion == seq


@given(st.integers(0, 10 ** 6))
def test_trivial_model_sees_every_morphism_as_total(seed):
    rng = random.Random(seed)
    w = gen.random_word(rng, "XYZ", 1, 4)
    m = canonical_interpretation(UNARY, w)
    M = trivial_model(gen.UNARY)
    assert interpret_formula(M, m.context, m.theta).tuples == {(0, 0)}
