import pytest
from hypothesis import given, strategies as st

from cartlog.syntax import (
    TOP, And, App, Eq, Exists, FormulaInContext, FunctionSymbol, Sequent, Signature, Sort, SortError, Var,
    alpha_eq_formula, alpha_equal, alpha_equal_sequent, bound_vars, canonical_formula, conj, conjuncts,
    free_vars, fresh_var, is_free_for, minimal_context, normalize, substitute,
)
from cartlog.theories import module_signature

SIG = module_signature(("X", "Y"))
A = SIG.sorts[0]
B = Sort("B")
PLUS, ZERO = SIG.function("plus"), SIG.function("zero")
X, Y = SIG.function("X"), SIG.function("Y")
x, y, z, w = (Var(A, i) for i in range(4))


def plus(a, b):
    return App(PLUS, (a, b))


def X_(t):
    return App(X, (t,))


def Y_(t):
    return App(Y, (t,))


zero = App(ZERO, ())


# -- hypothesis strategies ------------------------------------------------

VARS = st.sampled_from([x, y, z])


def terms(depth=2):
    leaf = st.one_of(VARS, st.just(zero))
    if depth == 0:
        return leaf
    sub = terms(depth - 1)
    return st.one_of(leaf, st.builds(X_, sub), st.builds(Y_, sub), st.builds(plus, sub, sub))


@st.composite
def formulas(draw, depth=2):
    kind = draw(st.integers(0, 3 if depth else 1))
    if kind == 0:
        return TOP
    if kind == 1:
        return Eq(draw(terms()), draw(terms()))
    if kind == 2:
        return And(draw(formulas(depth - 1)), draw(formulas(depth - 1)))
    v = draw(st.sampled_from([x, y, z, w]))
    return Exists(v, draw(formulas(depth - 1)))


def rename_bound(phi, start=10):
    """Rename every binder to a fresh high-rank variable."""
    counter = [start]

    def go(f):
        if isinstance(f, And):
            return And(go(f.left), go(f.right))
        if isinstance(f, Exists):
            v = Var(f.var.sort, counter[0])
            counter[0] += 1
            return Exists(v, go(substitute(f.body, {f.var: v})))
        return f

    return go(phi)


# -- construction ---------------------------------------------------------


def test_equality_operands_must_share_a_sort():
    with pytest.raises(SortError):
        Eq(x, Var(B, 0))


def test_application_is_sort_checked():
    with pytest.raises(SortError):
        App(X, (Var(B, 0),))
    with pytest.raises(SortError):
        App(PLUS, (x,))


def test_context_rejects_duplicates_and_missing_variables():
    with pytest.raises(ValueError):
        FormulaInContext((x, x), TOP)
    with pytest.raises(ValueError):
        FormulaInContext((x,), Eq(x, y))
    with pytest.raises(ValueError):
        Sequent(TOP, (x,), Eq(y, y))


def test_signature_rejects_undeclared_sorts_and_duplicates():
    with pytest.raises(ValueError):
        Signature((A,), (FunctionSymbol("f", (B,), A),))
    with pytest.raises(ValueError):
        Signature((A, Sort("A")))


def test_conj_of_nothing_is_top_and_conjuncts_flatten():
    assert conj([]) == TOP
    phi = conj([Eq(x, y), Eq(y, z), Eq(z, x)])
    assert conjuncts(phi) == [Eq(x, y), Eq(y, z), Eq(z, x)]


# -- substitution ---------------------------------------------------------


def test_substitute_without_binders():
    assert substitute(Eq(plus(x, y), y), {x: zero}) == Eq(plus(zero, y), y)


def test_substitute_avoids_capture():
    out = substitute(Exists(x, Eq(x, y)), {y: x})
    assert isinstance(out, Exists)
    assert out.var != x and out.var.sort == A
    assert out.body == Eq(out.var, x)
    assert alpha_eq_formula(out, Exists(z, Eq(z, x)))


def test_substitute_to_reflexive():
    assert substitute(Eq(y, X_(x)), {y: X_(x)}) == Eq(X_(x), X_(x))


def test_substitute_rejects_sort_mismatch():
    with pytest.raises((SortError, ValueError)):
        substitute(Eq(x, x), {x: Var(B, 0)})


def test_substitution_is_simultaneous():
    assert substitute(Eq(x, y), {x: y, y: x}) == Eq(y, x)


@given(formulas(), terms(1), terms(1))
def test_simultaneous_substitution_equals_sequential_through_fresh_variables(phi, s, t):
    u1, u2 = Var(A, 20), Var(A, 21)
    staged = substitute(substitute(substitute(phi, {x: u1, y: u2}), {u1: s}), {u2: t})
    assert alpha_eq_formula(substitute(phi, {x: s, y: t}), staged)


def test_free_for():
    phi = Exists(x, Eq(x, y))
    assert not is_free_for(x, y, phi)
    assert is_free_for(z, y, phi)


@given(formulas(), terms(1))
def test_substitution_idempotent_when_target_avoids_binders(phi, t):
    tv = free_vars(Eq(t, t))
    if y in tv or (tv | {y}) & bound_vars(phi):
        return
    once = substitute(phi, {y: t})
    assert substitute(once, {y: t}) == once


@given(formulas(), terms(1))
def test_substitution_respects_alpha(phi, t):
    psi = rename_bound(phi)
    assert alpha_eq_formula(phi, psi)
    assert alpha_eq_formula(substitute(phi, {y: t}), substitute(psi, {y: t}))


@given(formulas(), terms(1))
def test_substituted_occurrences_stay_free(phi, t):
    out = substitute(phi, {y: t})
    expected = (free_vars(phi) - {y}) | (free_vars(Eq(t, t)) if y in free_vars(phi) else set())
    assert free_vars(out) == expected


# -- alpha equivalence ----------------------------------------------------


def test_alpha_bound_rename():
    assert alpha_equal(FormulaInContext((x,), Exists(y, Eq(X_(x), y))),
                       FormulaInContext((x,), Exists(z, Eq(X_(x), z))))


def test_alpha_context_rename():
    assert alpha_equal(FormulaInContext((x,), Eq(x, x)), FormulaInContext((y,), Eq(y, y)))


def test_alpha_context_order_matters():
    assert not alpha_equal(FormulaInContext((x, y), Eq(x, y)), FormulaInContext((y, x), Eq(x, y)))


def test_alpha_distinguishes_free_from_bound():
    assert not alpha_equal(FormulaInContext((x, y), Exists(z, Eq(z, y))),
                           FormulaInContext((x, y), Exists(z, Eq(z, z))))


def test_alpha_sequents():
    s1 = Sequent(Eq(x, y), (x, y), Eq(y, x))
    s2 = Sequent(Eq(z, w), (z, w), Eq(w, z))
    assert alpha_equal_sequent(s1, s2)
    assert not alpha_equal_sequent(s1, Sequent(Eq(x, y), (y, x), Eq(y, x)))


@given(formulas(), formulas(), formulas())
def test_alpha_is_an_equivalence(a, b, c):
    fa, fb, fc = (FormulaInContext((x, y, z, w), f) for f in (a, b, c))
    assert alpha_equal(fa, fa)
    assert alpha_equal(fa, fb) == alpha_equal(fb, fa)
    if alpha_equal(fa, fb) and alpha_equal(fb, fc):
        assert alpha_equal(fa, fc)


@given(formulas())
def test_alpha_holds_for_renamed_copies_and_normal_forms(phi):
    fic = FormulaInContext((x, y, z, w), phi)
    assert alpha_equal(fic, FormulaInContext((x, y, z, w), rename_bound(phi)))
    assert alpha_equal(fic, normalize(fic))
    assert normalize(fic) == normalize(FormulaInContext((x, y, z, w), rename_bound(phi)))
    assert canonical_formula(phi) == canonical_formula(rename_bound(phi))


# -- contexts -------------------------------------------------------------


def test_minimal_context_examples():
    assert minimal_context(TOP) == ()
    assert minimal_context(Eq(plus(y, x), y)) == (x, y)
    assert minimal_context(Exists(y, Eq(X_(x), y))) == (x,)


def test_minimal_context_orders_per_sort():
    b0 = Var(B, 0)
    R = Signature((A, B))
    assert R.sorts == (A, B)
    ctx = minimal_context(And(Eq(b0, b0), Eq(z, x)))
    assert set(ctx) == {x, z, b0}
    assert ctx.index(x) < ctx.index(z)


@given(formulas())
def test_minimal_context_invariant_under_bound_renaming(phi):
    assert minimal_context(phi) == minimal_context(rename_bound(phi))


def test_fresh_variable_takes_least_unused_rank():
    assert fresh_var(A, [x, z]) == y
    assert fresh_var(B, [x]) == Var(B, 0)
