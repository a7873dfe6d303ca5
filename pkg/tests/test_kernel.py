import json
import random

import pytest
from hypothesis import given, strategies as st

import generators as gen
from cartlog import tactics as tac
from cartlog.kernel import Proof, ProofError, Rule, assert_valid, check_proof, proves, uses_rules
from cartlog.serialize import FORMAT, proof_dumps, proof_from_json, proof_loads, proof_to_json
from cartlog.syntax import TOP, And, App, Eq, Exists, Sequent, Var, alpha_equal_sequent, substitute
from cartlog.theories import AlgebraPresentation, Theory, module_theory

T = module_theory(AlgebraPresentation(("X", "Y")))
SIG = T.signature
A = SIG.sorts[0]
X, Y = SIG.function("X"), SIG.function("Y")
x, y, z = (Var(A, i) for i in range(3))


def X_(t):
    return App(X, (t,))


# -- single rules ---------------------------------------------------------


def test_identity_axiom():
    assert check_proof(T, tac.identity((x,), Eq(X_(x), x))).ok


def test_cut_with_disagreeing_formulas_is_rejected_at_that_node():
    p = tac.identity((x,), Eq(x, x))
    q = tac.identity((x,), Eq(X_(x), x))
    bad = Proof(Sequent(Eq(x, x), (x,), Eq(X_(x), x)), Rule.CUT, (p, q), cut=Eq(x, x))
    res = check_proof(T, bad)
    assert not res.ok and res.path == () and "cut" in res.reason
    nested = tac.and_intro(tac.identity((x,), Eq(x, x)), bad)
    res = check_proof(T, nested)
    assert not res.ok and res.path == (1,)
    with pytest.raises(ProofError):
        assert_valid(T, nested)


def test_theory_axiom_must_be_cited_correctly():
    assert check_proof(T, tac.axiom(T, 0)).ok
    wrong = Proof(T.axioms[1], Rule.THEORY_AXIOM, index=0)
    assert not check_proof(T, wrong).ok
    missing = Proof(T.axioms[1], Rule.THEORY_AXIOM, index=99)
    assert "no such axiom" in check_proof(T, missing).reason


def test_axiom_check_accepts_alpha_variants():
    ax = T.axioms[1]
    u, v = Var(A, 5), Var(A, 7)
    ren = {x: u, y: v}
    renamed = Sequent(substitute(ax.antecedent, ren), (u, v), substitute(ax.consequent, ren))
    assert renamed != ax
    assert check_proof(T, Proof(renamed, Rule.THEORY_AXIOM, index=1)).ok


def test_reflexivity_requires_top_and_identical_sides():
    assert check_proof(T, tac.refl((x,), X_(x))).ok
    assert not check_proof(T, Proof(Sequent(TOP, (x,), Eq(x, X_(x))), Rule.EQ_REFL)).ok
    assert not check_proof(T, Proof(Sequent(Eq(x, x), (x,), Eq(x, x)), Rule.EQ_REFL)).ok


def test_substitution_checks_contexts():
    p = tac.refl((x,), X_(x))
    assert check_proof(T, tac.substitution(p, {x: X_(y)}, (y,))).ok
    # z is neither bound nor kept in the conclusion context
    dropped = Proof(Sequent(TOP, (y,), Eq(X_(y), X_(y))), Rule.SUBSTITUTION, (tac.refl((x, z), X_(x)),),
                    binding=((x, y),))
    assert "outside the conclusion context" in check_proof(T, dropped).reason


def test_exists_rules_are_mutually_inverse():
    idp = tac.identity((x,), Exists(y, Eq(X_(x), y)))
    opened = tac.exists_elim(idp, y)
    assert check_proof(T, opened).ok
    closed = tac.exists_adjoint(opened, y)
    assert check_proof(T, closed).ok
    assert alpha_equal_sequent(closed.conclusion, idp.conclusion)


def test_exists_adjoint_requires_the_variable_to_leave_the_context():
    p = tac.identity((x, y), Eq(X_(x), y))
    bad = Proof(Sequent(Exists(y, Eq(X_(x), y)), (x, y), Eq(X_(x), y)), Rule.EXISTS_ADJOINT, (p,), var=y)
    assert not check_proof(T, bad).ok
    with pytest.raises(tac.SideConditionError):
        tac.exists_adjoint(p, x)


def test_foreign_symbols_are_rejected():
    other = module_theory(AlgebraPresentation(("Z",)))
    p = tac.refl((x,), App(other.signature.function("Z"), (x,)))
    assert check_proof(other, p).ok
    assert "outside the signature" in check_proof(T, p).reason


# -- existential introduction macro -----------------------------------------


def test_exists_intro_from_reflexivity():
    p = tac.refl((x,), X_(x))
    q = tac.exists_intro(p, X_(x), y, Eq(X_(x), y))
    assert check_proof(T, q).ok
    assert alpha_equal_sequent(q.conclusion, Sequent(TOP, (x,), Exists(y, Eq(X_(x), y))))
    assert q.rule is Rule.CUT and q.premises[0] is p
    inst = q.premises[1]
    assert inst.rule is Rule.SUBSTITUTION
    assert inst.premises[0].rule is Rule.EXISTS_ELIM
    assert inst.premises[0].premises[0].rule is Rule.IDENTITY
    assert uses_rules(q) == {Rule.CUT, Rule.SUBSTITUTION, Rule.EXISTS_ELIM, Rule.IDENTITY, Rule.EQ_REFL}


def test_exists_intro_with_a_context_variable_witness():
    q = tac.exists_intro(tac.refl((x,), x), x, y, Eq(y, x))
    assert proves(T, q, Sequent(TOP, (x,), Exists(y, Eq(y, x))))


def test_exists_intro_side_conditions():
    p = tac.refl((x, z), X_(x))
    # the witness x would be captured by the inner binder
    psi = And(Eq(X_(x), X_(x)), Exists(x, Eq(y, x)))
    with pytest.raises(tac.SideConditionError):
        tac.exists_intro(p, x, y, psi)
    with pytest.raises(tac.SideConditionError):
        tac.exists_intro(p, X_(x), y, Eq(y, x))
    with pytest.raises(tac.SideConditionError):
        tac.exists_intro(p, X_(Var(A, 9)), y, Eq(y, y))


def test_exists_intro_renames_a_bound_variable_already_in_context():
    p = tac.refl((x, y), X_(x))
    q = tac.exists_intro(p, X_(x), y, Eq(y, X_(x)))
    assert check_proof(T, q).ok
    assert alpha_equal_sequent(q.conclusion, Sequent(TOP, (x, y), Exists(z, Eq(z, X_(x)))))


@given(st.integers(0, 10 ** 6))
def test_exists_intro_on_generated_instances(seed):
    inst = gen.exists_instance(random.Random(seed))
    q = tac.exists_intro(inst.proof, inst.tau, inst.y, inst.psi)
    assert check_proof(inst.theory, q).ok
    c = inst.proof.conclusion
    assert alpha_equal_sequent(q.conclusion, Sequent(c.antecedent, c.context, Exists(inst.y, inst.psi)))


# -- derived equality tactics -------------------------------------------------


def test_symmetry_and_transitivity():
    hyp = And(Eq(x, y), Eq(y, z))
    ctx = (x, y, z)
    p = tac.conj_lookup(ctx, hyp, Eq(x, y))
    q = tac.conj_lookup(ctx, hyp, Eq(y, z))
    assert proves(T, tac.sym(p), Sequent(hyp, ctx, Eq(y, x)))
    assert proves(T, tac.trans(p, q), Sequent(hyp, ctx, Eq(x, z)))


def test_congruence():
    hyp = Eq(x, y)
    p = tac.identity((x, y), hyp)
    c = tac.congruence(hyp, (x, y), X_(X_(x)), X_(X_(y)), [tac.congruence(hyp, (x, y), X_(x), X_(y), [p])])
    assert proves(T, c, Sequent(hyp, (x, y), Eq(X_(X_(x)), X_(X_(y)))))


# -- serialization ----------------------------------------------------------


def test_serialization_round_trip_shares_subproofs():
    p = tac.refl((x,), X_(x))
    q = tac.and_intro(p, p)
    doc = proof_to_json(q)
    assert doc["format"] == FORMAT
    assert len(doc["nodes"]) == 2
    back = proof_from_json(json.loads(json.dumps(doc)), SIG)
    assert back.premises[0] is back.premises[1]
    assert check_proof(T, back).ok
    assert proof_dumps(back) == proof_dumps(q)


@given(st.integers(0, 10 ** 6))
def test_serialized_generated_proofs_still_check(seed):
    case = gen.transport_case(random.Random(seed))
    text = proof_dumps(case.proof)
    back = proof_loads(text, case.theory.signature)
    assert check_proof(case.theory, back).ok
    assert back.conclusion == case.proof.conclusion
    assert proof_dumps(back) == text


def test_loader_rejects_other_formats():
    with pytest.raises(ValueError):
        proof_from_json({"format": "other"}, SIG)


def test_empty_theory_accepts_pure_logic():
    bare = Theory(SIG)
    assert check_proof(bare, tac.sym(tac.identity((x, y), Eq(x, y)))).ok
