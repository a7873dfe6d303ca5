"""Seeded generators of theories, provable sequents, word pairs and models shared by the tests."""

from __future__ import annotations

import os
import random
from dataclasses import dataclass

from cartlog import tactics as tac
from cartlog.kernel import Proof
from cartlog.models import FiniteModel, linear_module_model, trivial_model
from cartlog.syntax import (
    TOP, And, App, Eq, Exists, FormulaInContext, FunctionSymbol, Rel, RelationSymbol, Sequent, Signature,
    Sort, Var, conj, conjuncts, replace_term, subterms,
)
from cartlog.theories import Theory, module_signature
from cartlog.wordprob import (
    MonoidPresentation, RewriteStep, finite_quotient, knuth_bendix, monoid_algebra_model, truncated_quotient,
)

A = Sort("A")
F = FunctionSymbol("f", (A,), A)
G = FunctionSymbol("g", (A, A), A)
C = FunctionSymbol("c", (), A)
R = RelationSymbol("R", (A, A))
SIG = Signature((A,), (F, G, C), (R,))
UNARY = Signature((A,), tuple(FunctionSymbol(n, (A,), A) for n in "XYZ"))

x, y, z, w = (Var(A, i) for i in range(4))

SEED = int(os.environ.get("CARTLOG_TEST_SEED", "20240601"))


def random_term(rng: random.Random, vs, depth: int = 2):
    if depth == 0 or rng.random() < 0.35:
        return rng.choice(list(vs) + [App(C, ())]) if rng.random() < 0.9 else App(C, ())
    k = rng.random()
    if k < 0.5:
        return App(F, (random_term(rng, vs, depth - 1),))
    return App(G, (random_term(rng, vs, depth - 1), random_term(rng, vs, depth - 1)))


def random_atom(rng: random.Random, vs, depth: int = 2):
    if rng.random() < 0.3:
        return Rel(R, (random_term(rng, vs, depth), random_term(rng, vs, depth)))
    return Eq(random_term(rng, vs, depth), random_term(rng, vs, depth))


def random_theory(rng: random.Random, n: int | None = None) -> Theory:
    """Equational axioms ``top |-_{x,y} l = r`` plus, sometimes, a Horn axiom."""
    n = rng.randint(1, 3) if n is None else n
    axioms = []
    for _ in range(n):
        ctx = (x, y)
        l, r = random_term(rng, ctx, 2), random_term(rng, ctx, 2)
        if isinstance(l, Var) and isinstance(r, Var):
            l = App(F, (l,))
        axioms.append(Sequent(TOP, ctx, Eq(l, r)))
    if rng.random() < 0.5:
        axioms.append(Sequent(Rel(R, (x, y)), (x, y), Rel(R, (y, x))))
    return Theory(SIG, tuple(axioms))


@dataclass(frozen=True)
class Instance:
    theory: Theory
    proof: Proof  # proves phi |-_ctx psi[tau/y]
    tau: object
    y: Var
    psi: object


def provable_premise(rng: random.Random, theory: Theory, ctx=(x, y)) -> Proof:
    """A checked proof of ``phi |-_ctx chi`` for random ``phi``; ``chi`` is a conjunct
    of ``phi`` or an instance of an equational axiom."""
    phi = conj([random_atom(rng, ctx) for _ in range(rng.randint(1, 3))])
    eqs = [i for i, ax in enumerate(theory.axioms) if ax.antecedent == TOP]
    if eqs and rng.random() < 0.5:
        i = rng.choice(eqs)
        ax = theory.axioms[i]
        sigma = {v: random_term(rng, ctx, 1) for v in ax.context}
        return tac.from_top(phi, tac.substitution(tac.axiom(theory, i), sigma, ctx))
    target = rng.choice(conjuncts(phi))
    return tac.conj_lookup(ctx, phi, target)


def exists_instance(rng: random.Random) -> Instance:
    theory = random_theory(rng)
    ctx = (x, y)
    p = provable_premise(rng, theory, ctx)
    chi = p.conclusion.consequent
    terms = sorted({t for side in _atom_terms(chi) for t in subterms(side)}, key=lambda t: (len(str(t)), str(t)))
    tau = rng.choice(terms)
    fresh = Var(A, 2)
    psi = abstract(chi, tau, fresh)
    return Instance(theory, p, tau, fresh, psi)


def abstract(chi, tau, v):
    """Replace every occurrence of ``tau`` in an atom or conjunction by ``v``."""
    if isinstance(chi, Eq):
        return Eq(replace_term(chi.left, tau, v), replace_term(chi.right, tau, v))
    if isinstance(chi, Rel):
        return Rel(chi.symbol, tuple(replace_term(a, tau, v) for a in chi.args))
    if isinstance(chi, And):
        return And(abstract(chi.left, tau, v), abstract(chi.right, tau, v))
    return chi


def _atom_terms(chi):
    if isinstance(chi, Eq):
        return (chi.left, chi.right)
    if isinstance(chi, Rel):
        return chi.args
    return ()


@dataclass(frozen=True)
class TransportCase:
    theory: Theory
    phi: FormulaInContext
    proof: Proof  # a T-proof of phi |-_ctx psi


def transport_case(rng: random.Random) -> TransportCase:
    theory = random_theory(rng)
    ctx = (x, y)
    kind = rng.randrange(3)
    atoms = [random_atom(rng, ctx) for _ in range(rng.randint(1, 3))]
    if kind == 2:
        # an existential conjunct in phi
        atoms.append(Exists(z, Eq(App(F, (z,)), x)))
    phi = conj(atoms)
    parts = []
    for _ in range(rng.randint(1, 2)):
        target = rng.choice(conjuncts(phi))
        parts.append(tac.conj_lookup(ctx, phi, target))
    eqs = [i for i, ax in enumerate(theory.axioms) if ax.antecedent == TOP]
    if eqs and kind != 0:
        i = rng.choice(eqs)
        sigma = {v: random_term(rng, ctx, 1) for v in theory.axioms[i].context}
        parts.append(tac.from_top(phi, tac.substitution(tac.axiom(theory, i), sigma, ctx)))
    proof = parts[0]
    for q in parts[1:]:
        proof = tac.and_intro(proof, q)
    if kind == 1:
        e = proof.conclusion.consequent
        first = conjuncts(e)[0]
        if isinstance(first, Eq):
            proof = tac.exists_intro(proof, first.left, Var(A, 5), abstract(e, first.left, Var(A, 5)))
    return TransportCase(theory, FormulaInContext(ctx, phi), proof)


# -- word problems ----------------------------------------------------------

PRESENTATIONS = {
    "commutative": MonoidPresentation(("a", "b"), (("ab", "ba"),)),
    "aaa=a": MonoidPresentation(("a",), (("aaa", "a"),)),
    "band": MonoidPresentation(("a", "b"), (("aa", "a"), ("bb", "b"), ("ab", "b"), ("ba", "a"))),
    "cyclic": MonoidPresentation(("a",), (("aaaa", "aa"),)),
    "free": MonoidPresentation(("a", "b"), ()),
}

EXTRA_FINITE = {
    "klein": MonoidPresentation(("a", "b"), (("aa", ""), ("bb", ""), ("ab", "ba"))),
}


def random_word(rng: random.Random, gens, lo: int = 0, hi: int = 5) -> str:
    return "".join(rng.choice(gens) for _ in range(rng.randint(lo, hi)))


def random_walk(rng: random.Random, p: MonoidPresentation, u: str, steps: int, bound: int = 8) -> str:
    w = u
    for _ in range(steps):
        options = []
        for i, (l, r) in enumerate(p.relations):
            for lhs, rhs, d in ((l, r, 1), (r, l, -1)):
                for k in range(len(w) + 1):
                    if w[k:k + len(lhs)] == lhs and len(w) - len(lhs) + len(rhs) <= bound:
                        options.append(RewriteStep(k, i, d))
        if not options:
            break
        w = rng.choice(options).apply(p, w)
    return w


def word_pairs(rng: random.Random, p: MonoidPresentation, n: int = 100) -> list[tuple[str, str]]:
    """Half random walks (equivalent by construction), half independent words."""
    out = []
    for i in range(n):
        u = random_word(rng, p.generators, 0, 5)
        if i % 2 == 0:
            out.append((u, random_walk(rng, p, u, rng.randint(0, 4))))
        else:
            out.append((u, random_word(rng, p.generators, 0, 5)))
    return out


# -- model corpus -----------------------------------------------------------


def _small_sig_models() -> list[FiniteModel]:
    """Models of SIG on Z/2 and Z/3 with a few operation choices."""
    out = []
    for n in (2, 3):
        elems = tuple(str(i) for i in range(n))
        for fa, ga, rel in (
            (lambda a: a, lambda a, b: (a + b) % n, "eq"),
            (lambda a: (a + 1) % n, lambda a, b: (a * b) % n, "all"),
            (lambda a: 0, lambda a, b: a, "none"),
        ):
            fun = {"f": [fa(a) for a in range(n)], "g": [ga(a, b) for a in range(n) for b in range(n)], "c": [0]}
            rels = {"eq": {(a, a) for a in range(n)}, "all": {(a, b) for a in range(n) for b in range(n)},
                    "none": set()}[rel]
            out.append(FiniteModel(SIG, {"A": elems}, fun, {"R": rels}))
    return out


def model_corpus() -> list[FiniteModel]:
    ms = [trivial_model(SIG), trivial_model(UNARY)] + _small_sig_models()
    for name in ("aaa=a", "band", "cyclic"):
        p = PRESENTATIONS[name]
        ms.append(monoid_algebra_model(finite_quotient(p), 2, p.symbols()))
    p = EXTRA_FINITE["klein"]
    ms.append(monoid_algebra_model(finite_quotient(p), 2, p.symbols()))
    for name in ("free", "commutative"):
        p = PRESENTATIONS[name]
        ms.append(monoid_algebra_model(truncated_quotient(p, 1, knuth_bendix(p)), 2, p.symbols()))
    ms.append(linear_module_model(module_signature(("X", "Y")), SUFFIX_COUNTERMODEL))
    ms.append(trivial_model(module_signature(("X",))))
    ms.append(trivial_model(module_signature(("X", "Y"))))
    ms.append(linear_module_model(UNARY, {"X": [[0, 1], [1, 0]], "Y": [[1, 1], [0, 1]], "Z": [[1, 0], [0, 0]]}))
    ms.append(linear_module_model(UNARY, {"X": [[1, 0], [0, 0]], "Y": [[0, 0], [1, 0]], "Z": [[0, 1], [0, 0]]}))
    return ms


# X e3 = e1, Y e1 = e2, Y e2 = e3 (column convention: mat[i][j] maps e_j to e_i)
SUFFIX_COUNTERMODEL = {
    "X": [[0, 0, 1], [0, 0, 0], [0, 0, 0]],
    "Y": [[0, 0, 0], [1, 0, 0], [0, 1, 0]],
}
