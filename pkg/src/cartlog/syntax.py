"""Sorted terms, cartesian formulas, contexts and sequents.

Every value here is an immutable dataclass.  Variables are identified by
``(sort, rank)``; the rank is the variable's place in the per-sort total
order, so fresh variables are always "the least unused rank".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union


class SortError(ValueError):
    """A term or formula is not well-sorted."""


@dataclass(frozen=True, order=True)
class Sort:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class Var:
    sort: Sort
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("variable rank must be non-negative")

    def __repr__(self):
        return f"Var({self.sort.name}, {self.rank})"


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    arg_sorts: tuple[Sort, ...]
    result: Sort

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    arg_sorts: tuple[Sort, ...]


@dataclass(frozen=True)
class App:
    fn: FunctionSymbol
    args: tuple["Term", ...] = ()

    def __post_init__(self):
        if len(self.args) != self.fn.arity:
            raise SortError(f"{self.fn.name} expects {self.fn.arity} arguments, got {len(self.args)}")
        for want, arg in zip(self.fn.arg_sorts, self.args):
            if sort_of(arg) != want:
                raise SortError(f"argument of sort {sort_of(arg)} where {self.fn.name} expects {want}")


Term = Union[Var, App]


def sort_of(t: Term) -> Sort:
    return t.sort if isinstance(t, Var) else t.fn.result


# -- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class Top:
    pass


TOP = Top()


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term

    def __post_init__(self):
        if sort_of(self.left) != sort_of(self.right):
            raise SortError(f"equality between sorts {sort_of(self.left)} and {sort_of(self.right)}")


@dataclass(frozen=True)
class Rel:
    symbol: RelationSymbol
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        if len(self.args) != len(self.symbol.arg_sorts):
            raise SortError(f"relation {self.symbol.name} has wrong arity")
        for want, arg in zip(self.symbol.arg_sorts, self.args):
            if sort_of(arg) != want:
                raise SortError(f"relation {self.symbol.name} argument sort mismatch")


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


Formula = Union[Top, Eq, Rel, And, Exists]


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-associated conjunction; the empty conjunction is ``TOP``."""
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def conjuncts(phi: Formula) -> list[Formula]:
    """Flatten nested conjunctions (``TOP`` leaves are kept)."""
    if isinstance(phi, And):
        return conjuncts(phi.left) + conjuncts(phi.right)
    return [phi]


def exists_many(vs: Iterable[Var], body: Formula) -> Formula:
    for v in reversed(list(vs)):
        body = Exists(v, body)
    return body


def equalities(left: Iterable[Term], right: Iterable[Term]) -> Formula:
    return conj(Eq(a, b) for a, b in zip(left, right, strict=True))


# -- contexts and sequents --------------------------------------------------


def _check_context(ctx: tuple[Var, ...]):
    if len(set(ctx)) != len(ctx):
        raise ValueError(f"context has duplicate variables: {ctx}")


@dataclass(frozen=True)
class FormulaInContext:
    context: tuple[Var, ...]
    formula: Formula

    def __post_init__(self):
        object.__setattr__(self, "context", tuple(self.context))
        _check_context(self.context)
        extra = free_vars(self.formula) - set(self.context)
        if extra:
            raise ValueError(f"free variables {sorted(extra)} not in context")


@dataclass(frozen=True)
class Sequent:
    antecedent: Formula
    context: tuple[Var, ...]
    consequent: Formula

    def __post_init__(self):
        object.__setattr__(self, "context", tuple(self.context))
        _check_context(self.context)
        extra = (free_vars(self.antecedent) | free_vars(self.consequent)) - set(self.context)
        if extra:
            raise ValueError(f"free variables {sorted(extra)} not in context")


# -- variables --------------------------------------------------------------


def term_vars(t: Term) -> frozenset[Var]:
    if isinstance(t, Var):
        return frozenset([t])
    out: set[Var] = set()
    for a in t.args:
        out |= term_vars(a)
    return frozenset(out)


def free_vars(phi: Formula) -> frozenset[Var]:
    if isinstance(phi, Top):
        return frozenset()
    if isinstance(phi, Eq):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, Rel):
        return frozenset().union(*(term_vars(a) for a in phi.args))
    if isinstance(phi, And):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, Exists):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(phi)


def all_vars(phi: Formula) -> frozenset[Var]:
    """Free and bound variables."""
    if isinstance(phi, And):
        return all_vars(phi.left) | all_vars(phi.right)
    if isinstance(phi, Exists):
        return all_vars(phi.body) | {phi.var}
    return free_vars(phi)


def bound_vars(phi: Formula) -> frozenset[Var]:
    if isinstance(phi, And):
        return bound_vars(phi.left) | bound_vars(phi.right)
    if isinstance(phi, Exists):
        return bound_vars(phi.body) | {phi.var}
    return frozenset()


def fresh_var(sort: Sort, avoid: Iterable[Var]) -> Var:
    used = {v.rank for v in avoid if v.sort == sort}
    rank = 0
    while rank in used:
        rank += 1
    return Var(sort, rank)


def minimal_context(phi: Formula) -> tuple[Var, ...]:
    """Free variables of ``phi`` in canonical (sort name, rank) order."""
    return tuple(sorted(free_vars(phi), key=lambda v: (v.sort.name, v.rank)))


def subterms(t: Term) -> list[Term]:
    """All subterms, children before parents, without duplicates."""
    out: list[Term] = []
    seen: set[Term] = set()

    def walk(u):
        if isinstance(u, App):
            for a in u.args:
                walk(a)
        if u not in seen:
            seen.add(u)
            out.append(u)

    walk(t)
    return out


def formula_terms(phi: Formula) -> list[Term]:
    """Maximal terms occurring in atoms of ``phi`` (left to right)."""
    if isinstance(phi, Eq):
        return [phi.left, phi.right]
    if isinstance(phi, Rel):
        return list(phi.args)
    if isinstance(phi, And):
        return formula_terms(phi.left) + formula_terms(phi.right)
    if isinstance(phi, Exists):
        return formula_terms(phi.body)
    return []


def term_size(t: Term) -> int:
    return 1 if isinstance(t, Var) else 1 + sum(term_size(a) for a in t.args)


# -- substitution -----------------------------------------------------------


Binding = Mapping[Var, Term]


def _check_binding(binding: Binding):
    for v, t in binding.items():
        if sort_of(t) != v.sort:
            raise SortError(f"cannot substitute a term of sort {sort_of(t)} for {v!r}")


def subst_term(t: Term, binding: Binding) -> Term:
    if isinstance(t, Var):
        return binding.get(t, t)
    return App(t.fn, tuple(subst_term(a, binding) for a in t.args))


def substitute(phi: Formula, binding: Binding) -> Formula:
    """Simultaneous capture-avoiding substitution."""
    _check_binding(binding)
    return _subst(phi, dict(binding))


def _subst(phi: Formula, binding: dict[Var, Term]) -> Formula:
    if not binding or isinstance(phi, Top):
        return phi
    if isinstance(phi, Eq):
        return Eq(subst_term(phi.left, binding), subst_term(phi.right, binding))
    if isinstance(phi, Rel):
        return Rel(phi.symbol, tuple(subst_term(a, binding) for a in phi.args))
    if isinstance(phi, And):
        return And(_subst(phi.left, binding), _subst(phi.right, binding))
    if isinstance(phi, Exists):
        body_free = free_vars(phi.body)
        inner = {v: t for v, t in binding.items() if v != phi.var and v in body_free}
        if not inner:
            return phi
        incoming: set[Var] = set()
        for t in inner.values():
            incoming |= term_vars(t)
        v = phi.var
        if v in incoming:
            v = fresh_var(v.sort, body_free | incoming | set(inner))
            inner[phi.var] = v
        return Exists(v, _subst(phi.body, inner))
    raise TypeError(phi)


def is_free_for(t: Term, y: Var, phi: Formula) -> bool:
    """No free occurrence of ``y`` in ``phi`` sits under a binder of a variable of ``t``."""
    tv = term_vars(t)

    def walk(f, bound):
        if isinstance(f, (Top, Eq, Rel)):
            return not (y in free_vars(f) and bound & tv)
        if isinstance(f, And):
            return walk(f.left, bound) and walk(f.right, bound)
        if f.var == y:
            return True
        return walk(f.body, bound | {f.var})

    return walk(phi, frozenset())


def replace_term(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    if isinstance(t, App):
        return App(t.fn, tuple(replace_term(a, old, new) for a in t.args))
    return t


# -- alpha equivalence ------------------------------------------------------


def _aeq_term(a: Term, b: Term, ma: dict, mb: dict) -> bool:
    if isinstance(a, Var) and isinstance(b, Var):
        la, lb = ma.get(a), mb.get(b)
        if la is None and lb is None:
            return a == b
        return la == lb
    if isinstance(a, App) and isinstance(b, App):
        return a.fn == b.fn and all(_aeq_term(x, y, ma, mb) for x, y in zip(a.args, b.args))
    return False


def _aeq(a: Formula, b: Formula, ma: dict, mb: dict, level: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Top):
        return True
    if isinstance(a, Eq):
        return _aeq_term(a.left, b.left, ma, mb) and _aeq_term(a.right, b.right, ma, mb)
    if isinstance(a, Rel):
        return a.symbol == b.symbol and all(_aeq_term(x, y, ma, mb) for x, y in zip(a.args, b.args))
    if isinstance(a, And):
        return _aeq(a.left, b.left, ma, mb, level) and _aeq(a.right, b.right, ma, mb, level)
    if a.var.sort != b.var.sort:
        return False
    return _aeq(a.body, b.body, {**ma, a.var: level}, {**mb, b.var: level}, level + 1)


def alpha_eq_formula(a: Formula, b: Formula) -> bool:
    """Equality up to renaming of bound variables (free variables must coincide)."""
    if a == b:
        return True
    return _aeq(a, b, {}, {}, 0)


def _context_maps(ca, cb):
    if len(ca) != len(cb) or any(x.sort != y.sort for x, y in zip(ca, cb)):
        return None
    return {v: i for i, v in enumerate(ca)}, {v: i for i, v in enumerate(cb)}


def alpha_equal(a: FormulaInContext, b: FormulaInContext) -> bool:
    """Equal up to order-preserving renaming of the context and of binders."""
    maps = _context_maps(a.context, b.context)
    if maps is None:
        return False
    return _aeq(a.formula, b.formula, *maps, len(a.context))


def alpha_equal_sequent(a: Sequent, b: Sequent) -> bool:
    maps = _context_maps(a.context, b.context)
    if maps is None:
        return False
    n = len(a.context)
    return _aeq(a.antecedent, b.antecedent, *maps, n) and _aeq(a.consequent, b.consequent, *maps, n)


# -- canonical forms --------------------------------------------------------


def _rename_term(t: Term, env: dict) -> Term:
    if isinstance(t, Var):
        return env.get(t, t)
    return App(t.fn, tuple(_rename_term(a, env) for a in t.args))


def _canon(phi: Formula, env: dict, depth: dict) -> Formula:
    if isinstance(phi, Top):
        return phi
    if isinstance(phi, Eq):
        return Eq(_rename_term(phi.left, env), _rename_term(phi.right, env))
    if isinstance(phi, Rel):
        return Rel(phi.symbol, tuple(_rename_term(a, env) for a in phi.args))
    if isinstance(phi, And):
        return And(_canon(phi.left, env, depth), _canon(phi.right, env, depth))
    s = phi.var.sort
    nv = Var(s, depth.get(s, 0))
    return Exists(nv, _canon(phi.body, {**env, phi.var: nv}, {**depth, s: depth.get(s, 0) + 1}))


def canonical_context(ctx: Iterable[Var], offset: Mapping[Sort, int] | None = None) -> tuple[Var, ...]:
    counts = dict(offset or {})
    out = []
    for v in ctx:
        out.append(Var(v.sort, counts.get(v.sort, 0)))
        counts[v.sort] = counts.get(v.sort, 0) + 1
    return tuple(out)


def rename_context(fic: FormulaInContext, new_ctx: tuple[Var, ...]) -> FormulaInContext:
    """Rename the context positionally (capture-avoiding)."""
    if len(new_ctx) != len(fic.context):
        raise ValueError("context length mismatch")
    binding = {old: new for old, new in zip(fic.context, new_ctx) if old != new}
    return FormulaInContext(tuple(new_ctx), substitute(fic.formula, binding))


def normalize(fic: FormulaInContext) -> FormulaInContext:
    """Canonical alpha representative: context ranks 0..n-1 per sort, binders numbered by depth."""
    ctx = canonical_context(fic.context)
    env = dict(zip(fic.context, ctx))
    depth: dict[Sort, int] = {}
    for v in ctx:
        depth[v.sort] = depth.get(v.sort, 0) + 1
    return FormulaInContext(ctx, _canon(fic.formula, env, depth))


def canonical_formula(phi: Formula) -> Formula:
    """Binder-canonical form of an open formula; free variables are kept."""
    depth: dict[Sort, int] = {}
    for v in free_vars(phi):
        depth[v.sort] = max(depth.get(v.sort, 0), v.rank + 1)
    return _canon(phi, {}, depth)


@dataclass(frozen=True)
class Signature:
    sorts: tuple[Sort, ...]
    functions: tuple[FunctionSymbol, ...] = ()
    relations: tuple[RelationSymbol, ...] = ()
    _fn: dict = field(default=None, compare=False, repr=False, hash=False)
    _rel: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "sorts", tuple(self.sorts))
        object.__setattr__(self, "functions", tuple(self.functions))
        object.__setattr__(self, "relations", tuple(self.relations))
        if len({s.name for s in self.sorts}) != len(self.sorts):
            raise ValueError("duplicate sort names")
        names = [f.name for f in self.functions] + [r.name for r in self.relations]
        if len(set(names)) != len(names):
            raise ValueError("duplicate symbol names")
        sorts = set(self.sorts)
        for sym in (*self.functions, *self.relations):
            used = set(sym.arg_sorts) | ({sym.result} if isinstance(sym, FunctionSymbol) else set())
            if not used <= sorts:
                raise ValueError(f"symbol {sym.name} uses undeclared sorts")
        object.__setattr__(self, "_fn", {f.name: f for f in self.functions})
        object.__setattr__(self, "_rel", {r.name: r for r in self.relations})

    def function(self, name: str) -> FunctionSymbol:
        return self._fn[name]

    def relation(self, name: str) -> RelationSymbol:
        return self._rel[name]

    def has_function(self, name: str) -> bool:
        return name in self._fn

    def has_relation(self, name: str) -> bool:
        return name in self._rel

    def sort(self, name: str) -> Sort:
        for s in self.sorts:
            if s.name == name:
                return s
        raise KeyError(name)

    def extend(self, functions=(), relations=(), sorts=()) -> "Signature":
        return Signature(self.sorts + tuple(sorts), self.functions + tuple(functions),
                         self.relations + tuple(relations))

    def owns_term(self, t: Term) -> bool:
        if isinstance(t, Var):
            return t.sort in self.sorts
        return self._fn.get(t.fn.name) == t.fn and all(self.owns_term(a) for a in t.args)

    def owns(self, phi: Formula) -> bool:
        if isinstance(phi, Top):
            return True
        if isinstance(phi, Eq):
            return self.owns_term(phi.left) and self.owns_term(phi.right)
        if isinstance(phi, Rel):
            return self._rel.get(phi.symbol.name) == phi.symbol and all(self.owns_term(a) for a in phi.args)
        if isinstance(phi, And):
            return self.owns(phi.left) and self.owns(phi.right)
        return phi.var.sort in self.sorts and self.owns(phi.body)

    def owns_sequent(self, s: Sequent) -> bool:
        return (all(v.sort in self.sorts for v in s.context)
                and self.owns(s.antecedent) and self.owns(s.consequent))
