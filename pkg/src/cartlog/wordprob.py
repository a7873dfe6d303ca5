"""Word problems for finitely presented monoids and their reduction to
provability in module theories.

Words are strings, one character per generator; ``""`` is the unit.  A word
``a1 a2 ... an`` is encoded as the term ``A1(A2(...An(x)))``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from . import tactics as tac
from .kernel import Proof
from .syntax import TOP, Eq, Sequent, Var, conj
from .theories import MODULE_SORT, AlgebraPresentation, Theory, module_theory, word_term

SYMBOL_NAMES = ("X", "Y", "Z", "W", "V", "U", "T", "S", "R", "Q")


class WordError(ValueError):
    pass


class ReductionGap(ValueError):
    """The replacement sequence cannot be turned into a proof of the open-form sequent."""


@dataclass(frozen=True)
class MonoidPresentation:
    generators: tuple[str, ...]
    relations: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        if any(len(g) != 1 for g in gens) or len(set(gens)) != len(gens):
            raise WordError("generators must be distinct single characters")
        rels = tuple((str(u), str(v)) for u, v in self.relations)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relations", rels)
        for u, v in rels:
            self.check_word(u)
            self.check_word(v)

    def check_word(self, w: str) -> str:
        bad = set(w) - set(self.generators)
        if bad:
            raise WordError(f"undeclared generators {''.join(sorted(bad))!r} in word {w!r}")
        return w

    @classmethod
    def parse(cls, text: str) -> "MonoidPresentation":
        from .dsl import parse_document

        text = text.strip()
        if not text.endswith(";"):
            text += ";"
        doc = parse_document(text)
        if len(doc.monoids) != 1:
            raise WordError("expected exactly one monoid declaration")
        m = doc.monoids[0]
        return cls(tuple(m.generators), tuple(m.relations))

    def symbols(self) -> dict[str, str]:
        """Generator -> unary symbol name of the encoded module theory."""
        return {g: SYMBOL_NAMES[i] if i < len(SYMBOL_NAMES) else f"X{i}" for i, g in enumerate(self.generators)}

    def shortlex_key(self, w: str):
        order = {g: i for i, g in enumerate(self.generators)}
        return (len(w), tuple(order[c] for c in w))


# -- certificates -----------------------------------------------------------


@dataclass(frozen=True)
class RewriteStep:
    position: int
    relation: int
    direction: int  # +1 rewrites u_i -> v_i, -1 rewrites v_i -> u_i

    def sides(self, p: MonoidPresentation) -> tuple[str, str]:
        u, v = p.relations[self.relation]
        return (u, v) if self.direction > 0 else (v, u)

    def apply(self, p: MonoidPresentation, w: str) -> str:
        lhs, rhs = self.sides(p)
        if w[self.position:self.position + len(lhs)] != lhs:
            raise WordError(f"step {self} does not apply to {w!r}")
        return w[:self.position] + rhs + w[self.position + len(lhs):]

    def inverse(self) -> "RewriteStep":
        return RewriteStep(self.position, self.relation, -self.direction)

    def shifted(self, k: int) -> "RewriteStep":
        return RewriteStep(self.position + k, self.relation, self.direction)


def _reverse(steps: Sequence[RewriteStep]) -> tuple[RewriteStep, ...]:
    return tuple(s.inverse() for s in reversed(steps))


@dataclass(frozen=True)
class RewriteCertificate:
    start: str
    end: str
    steps: tuple[RewriteStep, ...] = ()

    def replay(self, p: MonoidPresentation) -> list[str]:
        words = [self.start]
        for s in self.steps:
            words.append(s.apply(p, words[-1]))
        if words[-1] != self.end:
            raise WordError("certificate does not end at its end word")
        return words

    def is_valid(self, p: MonoidPresentation) -> bool:
        try:
            self.replay(p)
        except WordError:
            return False
        return True

    def reversed(self) -> "RewriteCertificate":
        return RewriteCertificate(self.end, self.start, _reverse(self.steps))


def _neighbours(p: MonoidPresentation, w: str, bound: int):
    for i, (u, v) in enumerate(p.relations):
        for lhs, rhs, d in ((u, v, 1), (v, u, -1)):
            if len(w) - len(lhs) + len(rhs) > bound:
                continue
            start = 0
            while True:
                k = w.find(lhs, start) if lhs else start
                if k < 0 or k > len(w):
                    break
                yield RewriteStep(k, i, d), w[:k] + rhs + w[k + len(lhs):]
                start = k + 1
                if start > len(w):
                    break


def bfs_equivalent(p: MonoidPresentation, u: str, v: str, bound: int | None = None,
                   max_visited: int = 200_000) -> RewriteCertificate | None:
    """Bidirectional breadth-first search over the replacement graph.

    Returns a certificate of minimal length among words of length <= bound,
    or ``None`` if the bounded graph does not connect ``u`` and ``v``.
    """
    p.check_word(u)
    p.check_word(v)
    if u == v:
        return RewriteCertificate(u, v)
    if bound is None:
        longest = max((max(len(a), len(b)) for a, b in p.relations), default=0)
        bound = max(len(u), len(v)) + longest
    fwd = {u: None}
    bwd = {v: None}
    qf, qb = [u], [v]
    meet = None
    while qf and qb and meet is None:
        if len(fwd) + len(bwd) > max_visited:
            return None
        expand_fwd = len(qf) <= len(qb)
        q, seen, other = (qf, fwd, bwd) if expand_fwd else (qb, bwd, fwd)
        nxt = []
        for w in q:
            for step, w2 in _neighbours(p, w, bound):
                if w2 in seen:
                    continue
                seen[w2] = (w, step)
                if w2 in other:
                    meet = w2
                    break
                nxt.append(w2)
            if meet is not None:
                break
        if expand_fwd:
            qf = nxt
        else:
            qb = nxt
    if meet is None:
        return None
    left = []
    w = meet
    while fwd[w] is not None:
        prev, step = fwd[w]
        left.append(step)
        w = prev
    left.reverse()
    right = []
    w = meet
    while bwd[w] is not None:
        prev, step = bwd[w]
        right.append(step.inverse())
        w = prev
    # steps in bwd lead from v outward; inverses walk back toward v
    return RewriteCertificate(u, v, tuple(left) + tuple(right))


def suffix_certificate(p: MonoidPresentation, u: str, v: str, bound: int | None = None,
                       max_visited: int = 200_000) -> RewriteCertificate | None:
    """Like ``bfs_equivalent`` but only rewriting at the end of the word."""
    if u == v:
        return RewriteCertificate(u, v)
    if bound is None:
        longest = max((max(len(a), len(b)) for a, b in p.relations), default=0)
        bound = max(len(u), len(v)) + longest
    prev = {u: None}
    q = deque([u])
    while q and len(prev) <= max_visited:
        w = q.popleft()
        for step, w2 in _neighbours(p, w, bound):
            lhs, _ = step.sides(p)
            if step.position + len(lhs) != len(w) or w2 in prev:
                continue
            prev[w2] = (w, step)
            if w2 == v:
                steps = []
                x = v
                while prev[x] is not None:
                    x, s = prev[x]
                    steps.append(s)
                return RewriteCertificate(u, v, tuple(reversed(steps)))
            q.append(w2)
    return None


# -- Knuth-Bendix -----------------------------------------------------------


@dataclass(frozen=True)
class RewriteRule:
    lhs: str
    rhs: str
    steps: tuple[RewriteStep, ...]  # replacement steps taking lhs to rhs


@dataclass(frozen=True)
class RewritingSystem:
    presentation: MonoidPresentation
    rules: tuple[RewriteRule, ...]

    def reduce(self, w: str) -> tuple[str, tuple[RewriteStep, ...]]:
        steps: list[RewriteStep] = []
        changed = True
        while changed:
            changed = False
            for r in self.rules:
                k = w.find(r.lhs)
                if k >= 0:
                    steps.extend(s.shifted(k) for s in r.steps)
                    w = w[:k] + r.rhs + w[k + len(r.lhs):]
                    changed = True
                    break
        return w, tuple(steps)

    def normal_form(self, w: str) -> str:
        return self.reduce(w)[0]

    def is_irreducible(self, w: str) -> bool:
        return not any(r.lhs in w for r in self.rules)


def knuth_bendix(p: MonoidPresentation, max_rules: int = 200, max_steps: int = 5000) -> RewritingSystem | None:
    """Shortlex completion with the presentation's generator order.

    Every rule carries replacement steps deriving it from the relations, so
    normal forms yield checkable certificates.  ``None`` if the caps are hit.
    """
    key = p.shortlex_key
    pending: list[tuple[str, str, tuple[RewriteStep, ...]]] = [
        (u, v, (RewriteStep(0, i, 1),)) for i, (u, v) in enumerate(p.relations)
    ]
    rules: list[RewriteRule] = []
    steps_done = 0

    def system():
        return RewritingSystem(p, tuple(rules))

    while pending:
        steps_done += 1
        if steps_done > max_steps or len(rules) > max_rules:
            return None
        best = min(range(len(pending)), key=lambda i: len(pending[i][0]) + len(pending[i][1]))
        a, b, cert = pending.pop(best)
        sys_ = system()
        a2, ca = sys_.reduce(a)
        b2, cb = sys_.reduce(b)
        if a2 == b2:
            continue
        path = _reverse(ca) + cert + cb  # a2 -> b2
        if key(a2) > key(b2):
            new = RewriteRule(a2, b2, path)
        else:
            new = RewriteRule(b2, a2, _reverse(path))
        # interreduce: rules whose left side the new rule rewrites go back to pending
        keep = []
        for r in rules:
            if new.lhs in r.lhs:
                pending.append((r.lhs, r.rhs, r.steps))
            else:
                keep.append(r)
        rules = keep + [new]
        sys_ = system()
        rules = [RewriteRule(r.lhs, *_right_reduce(sys_, r)) for r in rules]
        new = rules[-1]
        for r in rules:
            pending.extend(_critical_pairs(new, r))
            if r is not new:
                pending.extend(_critical_pairs(r, new))
    return system()


def _right_reduce(sys_: RewritingSystem, r: RewriteRule):
    rhs, steps = sys_.reduce(r.rhs)
    return rhs, r.steps + steps


def _critical_pairs(r1: RewriteRule, r2: RewriteRule):
    """Overlaps of a suffix of ``r1.lhs`` with a prefix of ``r2.lhs`` and inclusions of ``r2.lhs`` in ``r1.lhs``."""
    out = []
    l1, l2 = r1.lhs, r2.lhs
    for k in range(1, min(len(l1), len(l2)) + (0 if r1 is r2 else 1)):
        if l1[len(l1) - k:] == l2[:k]:
            w1 = r1.rhs + l2[k:]
            w2 = l1[:len(l1) - k] + r2.rhs
            # w1 <- l1 l2[k:] -> w2
            cert = _reverse(r1.steps) + tuple(s.shifted(len(l1) - k) for s in r2.steps)
            out.append((w1, w2, cert))
    if r1 is not r2 and len(l2) < len(l1):
        i = l1.find(l2)
        while i >= 0:
            w1 = r1.rhs
            w2 = l1[:i] + r2.rhs + l1[i + len(l2):]
            out.append((w1, w2, _reverse(r1.steps) + tuple(s.shifted(i) for s in r2.steps)))
            i = l1.find(l2, i + 1)
    return out


# -- finite monoids ---------------------------------------------------------


@dataclass(frozen=True)
class FiniteMonoid:
    """Elements are normal-form words (shortlex order, unit first)."""

    elements: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    identity: int = 0
    generators: tuple[tuple[str, int], ...] = ()

    def __len__(self):
        return len(self.elements)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def element_of(self, word: str) -> int:
        gens = dict(self.generators)
        e = self.identity
        for c in word:
            e = self.mul(e, gens[c])
        return e

    def is_associative(self) -> bool:
        n = len(self.elements)
        return all(self.table[self.table[a][b]][c] == self.table[a][self.table[b][c]]
                   for a in range(n) for b in range(n) for c in range(n))

    def has_identity(self) -> bool:
        e = self.identity
        return all(self.table[e][a] == a == self.table[a][e] for a in range(len(self.elements)))

    def satisfies(self, p: MonoidPresentation) -> bool:
        return all(self.element_of(u) == self.element_of(v) for u, v in p.relations)


def finite_quotient(p: MonoidPresentation, bound: int = 64, system: RewritingSystem | None = None) -> FiniteMonoid | None:
    """The presented monoid as a table, when completion succeeds and it has at most ``bound`` elements."""
    system = system or knuth_bendix(p)
    if system is None:
        return None
    elements = [""]
    level = [""]
    while level:
        nxt = []
        for w in level:
            for g in p.generators:
                w2 = w + g
                if system.is_irreducible(w2):
                    nxt.append(w2)
                    if len(elements) + len(nxt) > bound:
                        return None
        elements.extend(nxt)
        level = nxt
    elements.sort(key=p.shortlex_key)
    index = {w: i for i, w in enumerate(elements)}
    table = tuple(tuple(index[system.normal_form(a + b)] for b in elements) for a in elements)
    gens = tuple((g, index[system.normal_form(g)]) for g in p.generators)
    return FiniteMonoid(tuple(elements), table, index[""], gens)


ZERO = "0"


def truncated_quotient(p: MonoidPresentation, length: int, system: RewritingSystem | None = None,
                       bound: int = 64) -> FiniteMonoid | None:
    """Normal forms of length <= ``length`` plus an absorbing ``0`` for everything longer.

    This is a monoid satisfying the relations only when long normal forms
    form an ideal (e.g. length-preserving relations); the table is checked
    and ``None`` returned otherwise.
    """
    if ZERO in p.generators:
        raise WordError(f"generator {ZERO!r} clashes with the absorbing element")
    system = system or knuth_bendix(p)
    if system is None:
        return None
    elements = [""]
    level = [""]
    for _ in range(length):
        level = [w + g for w in level for g in p.generators if system.is_irreducible(w + g)]
        elements.extend(level)
        if len(elements) + 1 > bound:
            return None
    elements.sort(key=p.shortlex_key)
    elements.append(ZERO)
    index = {w: i for i, w in enumerate(elements)}
    zero = index[ZERO]

    def prod(a: str, b: str) -> int:
        if ZERO in (a, b):
            return zero
        return index.get(system.normal_form(a + b), zero)

    table = tuple(tuple(prod(a, b) for b in elements) for a in elements)
    gens = tuple((g, index.get(system.normal_form(g), zero)) for g in p.generators)
    m = FiniteMonoid(tuple(elements), table, index[""], gens)
    if not (m.is_associative() and m.has_identity() and m.satisfies(p)):
        return None
    return m


# -- deciding equivalence ---------------------------------------------------


@dataclass(frozen=True)
class WordVerdict:
    status: str  # "equivalent" | "inequivalent" | "unknown"
    certificate: RewriteCertificate | None = None
    normal_forms: tuple[str, str] | None = None
    system: RewritingSystem | None = None
    quotient: FiniteMonoid | None = None


def equivalent(p: MonoidPresentation, u: str, v: str, bound: int | None = None,
               max_visited: int = 200_000) -> WordVerdict:
    """BFS for a replacement sequence; otherwise completion normal forms.

    Completion also decides equivalence when BFS is cut off by the length
    bound, and then the certificate is assembled from the rules' derivations.
    """
    p.check_word(u)
    p.check_word(v)
    cert = bfs_equivalent(p, u, v, bound, max_visited)
    if cert is not None:
        return WordVerdict("equivalent", cert)
    system = knuth_bendix(p)
    if system is None:
        return WordVerdict("unknown")
    nu, cu = system.reduce(u)
    nv, cv = system.reduce(v)
    if nu == nv:
        return WordVerdict("equivalent", RewriteCertificate(u, v, cu + _reverse(cv)), (nu, nv), system)
    return WordVerdict("inequivalent", None, (nu, nv), system, finite_quotient(p, system=system))


# -- encoding ---------------------------------------------------------------


def algebra_presentation(p: MonoidPresentation, with_relations: bool = False) -> AlgebraPresentation:
    sym = p.symbols()
    rels = [(tuple(sym[c] for c in u), tuple(sym[c] for c in v)) for u, v in p.relations] if with_relations else []
    return AlgebraPresentation(tuple(sym[g] for g in p.generators), tuple(rels))


def word_as_term(theory: Theory, p: MonoidPresentation, w: str, x=None):
    sym = p.symbols()
    x = x if x is not None else Var(MODULE_SORT, 0)
    return word_term(theory.signature, tuple(sym[c] for c in w), x)


def relation_formula(theory: Theory, p: MonoidPresentation, x=None):
    return conj(Eq(word_as_term(theory, p, u, x), word_as_term(theory, p, v, x)) for u, v in p.relations)


def encode(p: MonoidPresentation, u: str, v: str) -> tuple[Theory, Sequent]:
    """The free module theory and ``/\\ f_i(x) = g_i(x) |-_x f(x) = g(x)``."""
    p.check_word(u)
    p.check_word(v)
    t = module_theory(algebra_presentation(p))
    x = Var(MODULE_SORT, 0)
    return t, Sequent(relation_formula(t, p, x), (x,), Eq(word_as_term(t, p, u, x), word_as_term(t, p, v, x)))


def encode_closed(p: MonoidPresentation, u: str, v: str) -> tuple[Theory, Sequent]:
    """Relations as axioms of the theory, and ``top |-_x f(x) = g(x)``."""
    p.check_word(u)
    p.check_word(v)
    t = module_theory(algebra_presentation(p, with_relations=True))
    x = Var(MODULE_SORT, 0)
    return t, Sequent(TOP, (x,), Eq(word_as_term(t, p, u, x), word_as_term(t, p, v, x)))


def _under_prefix(g, ctx, theory, p, prefix: str, proof: Proof) -> Proof:
    """From ``g |- s = t`` derive ``g |- w1(s) = w1(t)``, one letter at a time."""
    from .syntax import App

    sym = p.symbols()
    for c in reversed(prefix):
        fn = theory.signature.function(sym[c])
        eq = proof.conclusion.consequent
        proof = tac.congruence(g, ctx, App(fn, (eq.left,)), App(fn, (eq.right,)), [proof])
    return proof


def _chain(g, ctx, theory, p, cert: RewriteCertificate, step_proof) -> Proof:
    x = ctx[0]
    words = cert.replay(p)
    if not cert.steps:
        return tac.from_top(g, tac.refl(ctx, word_as_term(theory, p, cert.start, x)))
    out = None
    for w, step in zip(words, cert.steps):
        lhs, _ = step.sides(p)
        prefix, suffix = w[:step.position], w[step.position + len(lhs):]
        q = step_proof(step, suffix)
        q = _under_prefix(g, ctx, theory, p, prefix, q)
        out = q if out is None else tac.trans(out, q)
    return out


def certificate_to_closed_proof(p: MonoidPresentation, cert: RewriteCertificate) -> Proof:
    """Proof of ``encode_closed(p, start, end)``'s sequent from a replacement sequence."""
    theory, seq = encode_closed(p, cert.start, cert.end)
    ctx = seq.context
    x = ctx[0]
    first = len(theory.axioms) - len(p.relations)

    def step_proof(step: RewriteStep, suffix: str) -> Proof:
        q = tac.axiom(theory, first + step.relation)
        q = tac.substitution(q, {x: word_as_term(theory, p, suffix, x)}, ctx)
        return q if step.direction > 0 else tac.sym(q)

    return _chain(TOP, ctx, theory, p, cert, step_proof)


def is_suffix_certificate(p: MonoidPresentation, cert: RewriteCertificate) -> bool:
    words = cert.replay(p)
    return all(s.position + len(s.sides(p)[0]) == len(w) for w, s in zip(words, cert.steps))


def certificate_to_proof(p: MonoidPresentation, cert: RewriteCertificate, bound: int | None = None) -> Proof:
    """Proof of ``encode(p, start, end)``'s sequent.

    The hypotheses ``f_i(x) = g_i(x)`` speak about ``x`` only, so a step can
    use a relation only at the end of the word (where it acts on ``x``
    itself); a prefix is handled by congruence.  Certificates with other steps
    are replaced by a suffix-only certificate when one exists within
    ``bound``.  Otherwise ``ReductionGap`` is raised: the encoded sequent then
    may fail in some module, so no proof exists at all.
    """
    cert.replay(p)
    if not is_suffix_certificate(p, cert):
        alt = suffix_certificate(p, cert.start, cert.end, bound)
        if alt is None:
            raise ReductionGap(
                f"{cert.start or '1'} = {cert.end or '1'} needs a replacement away from the end of the word")
        cert = alt
    theory, seq = encode(p, cert.start, cert.end)
    g, ctx = seq.antecedent, seq.context
    x = ctx[0]

    def step_proof(step: RewriteStep, suffix: str) -> Proof:
        u, v = p.relations[step.relation]
        hyp = Eq(word_as_term(theory, p, u, x), word_as_term(theory, p, v, x))
        q = tac.conj_lookup(ctx, g, hyp)
        return q if step.direction > 0 else tac.sym(q)

    return _chain(g, ctx, theory, p, cert, step_proof)


# -- monoid algebra ---------------------------------------------------------


def monoid_algebra_model(m: FiniteMonoid, prime: int = 2, symbols: dict[str, str] | None = None,
                         cap: int = 4096):
    """``F_p[m]`` as a model of the module theory; generator ``g`` acts by left multiplication by ``delta_g``."""
    from .models import FiniteModel

    if prime < 2 or any(prime % d == 0 for d in range(2, int(prime ** 0.5) + 1)):
        raise ValueError(f"{prime} is not prime")
    n = len(m.elements)
    size = prime ** n
    if size > cap:
        raise ValueError(f"carrier of size {size} exceeds the cap {cap}")
    gens = dict(m.generators)
    symbols = symbols or {g: SYMBOL_NAMES[i] if i < len(SYMBOL_NAMES) else f"X{i}" for i, (g, _) in enumerate(m.generators)}
    vecs = list(itertools.product(range(prime), repeat=n))
    vecs = [tuple(reversed(v)) for v in vecs]  # index = sum v[j] p^j
    index = {v: i for i, v in enumerate(vecs)}

    def idx(v):
        return index[tuple(x % prime for x in v)]

    plus = [idx(tuple(a + b for a, b in zip(va, vb))) for va in vecs for vb in vecs]
    neg = [idx(tuple(-a for a in va)) for va in vecs]
    tables = {"plus": plus, "zero": [0], "neg": neg}
    for g, e in gens.items():
        col = []
        for va in vecs:
            out = [0] * n
            for s, coeff in enumerate(va):
                out[m.mul(e, s)] += coeff
            col.append(idx(out))
        tables[symbols[g]] = col
    labels = ["".join(str(c) for c in v) for v in vecs]
    sig = module_theory(AlgebraPresentation(tuple(symbols[g] for g, _ in m.generators))).signature
    return FiniteModel(sig, {MODULE_SORT.name: tuple(labels)}, tables)


def delta(m: FiniteMonoid, element: int, prime: int = 2) -> int:
    """Carrier index of the basis vector at ``element``."""
    return prime ** element
