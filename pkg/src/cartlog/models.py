"""Finite Set-models: exhaustive interpretation of terms, formulas and sequents.

Formulas denote relations over their free variables, built by joins and
projections. Nothing here consults the proof kernel, so it serves as an
independent oracle for it.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .syntax import And, Eq, Exists, Formula, Sequent, Signature, Term, Top, Var

DEFAULT_TUPLE_CAP = 4096


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteModel:
    """Carriers are labelled lists; a function table lists result indices in
    row-major order of its arguments; a relation table lists index tuples."""

    signature: Signature
    carriers: Mapping[str, tuple[str, ...]]
    functions: Mapping[str, Sequence[int]]
    relations: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        carriers = {k: tuple(v) for k, v in self.carriers.items()}
        functions = {k: tuple(v) for k, v in self.functions.items()}
        relations = {k: frozenset(tuple(t) for t in v) for k, v in self.relations.items()}
        object.__setattr__(self, "carriers", carriers)
        object.__setattr__(self, "functions", functions)
        object.__setattr__(self, "relations", relations)
        sig = self.signature
        for s in sig.sorts:
            if s.name not in carriers:
                raise ModelError(f"no carrier for sort {s.name}")
        for f in sig.functions:
            if f.name not in functions:
                raise ModelError(f"no table for {f.name}")
            want = 1
            for a in f.arg_sorts:
                want *= len(carriers[a.name])
            table = functions[f.name]
            if len(table) != want:
                raise ModelError(f"table for {f.name} has {len(table)} entries, expected {want}")
            n = len(carriers[f.result.name])
            if any(not 0 <= r < n for r in table):
                raise ModelError(f"table for {f.name} leaves the carrier")
        for r in sig.relations:
            sizes = [len(carriers[a.name]) for a in r.arg_sorts]
            for t in relations.get(r.name, ()):
                if len(t) != len(sizes) or any(not 0 <= x < n for x, n in zip(t, sizes)):
                    raise ModelError(f"relation {r.name} has an ill-formed tuple")

    def size(self, sort) -> int:
        return len(self.carriers[sort.name])

    def eval_term(self, t: Term, env: Mapping[Var, int]) -> int:
        if isinstance(t, Var):
            return env[t]
        idx = 0
        for a, s in zip(t.args, t.fn.arg_sorts):
            idx = idx * len(self.carriers[s.name]) + self.eval_term(a, env)
        return self.functions[t.fn.name][idx]

    def apply(self, name: str, *args: int) -> int:
        f = self.signature.function(name)
        idx = 0
        for a, s in zip(args, f.arg_sorts):
            idx = idx * len(self.carriers[s.name]) + a
        return self.functions[name][idx]

    def label(self, sort, i: int) -> str:
        return self.carriers[sort.name][i]


@dataclass(frozen=True)
class Interpretation:
    context: tuple[Var, ...]
    tuples: frozenset

    def __le__(self, other: "Interpretation") -> bool:
        return self.tuples <= other.tuples


def _check_cap(M: FiniteModel, vs: Sequence[Var], cap: int) -> None:
    total = 1
    for v in vs:
        total *= M.size(v.sort)
    if total > cap:
        raise ModelError(f"context of {total} tuples exceeds the cap {cap}")


def _atom_vars(phi: Formula) -> tuple[Var, ...]:
    out: dict = {}

    def walk(t):
        if isinstance(t, Var):
            out.setdefault(t, None)
        else:
            for a in t.args:
                walk(a)

    for t in ((phi.left, phi.right) if isinstance(phi, Eq) else phi.args):
        walk(t)
    return tuple(out)


def _join(M, left, right, cap):
    lv, lt = left
    rv, rt = right
    shared = [v for v in lv if v in rv]
    extra = tuple(v for v in rv if v not in lv)
    vs = lv + extra
    _check_cap(M, vs, cap)
    li = [lv.index(v) for v in shared]
    ri = [rv.index(v) for v in shared]
    xi = [rv.index(v) for v in extra]
    index: dict = {}
    for t in rt:
        index.setdefault(tuple(t[i] for i in ri), []).append(tuple(t[i] for i in xi))
    out = set()
    for t in lt:
        for rest in index.get(tuple(t[i] for i in li), ()):
            out.add(t + rest)
    return vs, out


def _relation(M: FiniteModel, phi: Formula, cap: int):
    """``phi`` as a set of tuples over its own free variables.

    Conjunction is a join and ``exists`` is a projection, so bound variables
    never clash with the surrounding context.
    """
    if isinstance(phi, Top):
        return (), {()}
    if isinstance(phi, And):
        return _join(M, _relation(M, phi.left, cap), _relation(M, phi.right, cap), cap)
    if isinstance(phi, Exists):
        vs, ts = _relation(M, phi.body, cap)
        if phi.var not in vs:
            return vs, (ts if M.size(phi.var.sort) else set())
        i = vs.index(phi.var)
        return vs[:i] + vs[i + 1:], {t[:i] + t[i + 1:] for t in ts}
    vs = _atom_vars(phi)
    _check_cap(M, vs, cap)
    out = set()
    for tup in itertools.product(*(range(M.size(v.sort)) for v in vs)):
        env = dict(zip(vs, tup))
        if isinstance(phi, Eq):
            ok = M.eval_term(phi.left, env) == M.eval_term(phi.right, env)
        else:
            ok = tuple(M.eval_term(a, env) for a in phi.args) in M.relations.get(phi.symbol.name, ())
        if ok:
            out.add(tup)
    return vs, out


def _expand(M: FiniteModel, rel, ctx: tuple[Var, ...]) -> frozenset:
    vs, ts = rel
    missing = [v for v in vs if v not in ctx]
    if missing:
        raise ModelError(f"free variable {missing[0]} is not in the context")
    rest = [v for v in ctx if v not in vs]
    pos = {v: i for i, v in enumerate(vs + tuple(rest))}
    order = [pos[v] for v in ctx]
    fill = list(itertools.product(*(range(M.size(v.sort)) for v in rest)))
    return frozenset(tuple((t + r)[i] for i in order) for t in ts for r in fill)


def interpret_formula(M: FiniteModel, ctx: Sequence[Var], phi: Formula, cap: int = DEFAULT_TUPLE_CAP) -> Interpretation:
    """The set of context tuples satisfying ``phi``; ``exists`` is the image of a projection."""
    ctx = tuple(ctx)
    for v in ctx:
        if v.sort not in M.signature.sorts:
            raise ModelError(f"variable of unknown sort {v.sort}")
    _check_cap(M, ctx, cap)
    return Interpretation(ctx, _expand(M, _relation(M, phi, cap), ctx))


def _restricted(M: FiniteModel, s: Sequent, cap: int):
    """Both sides over the context variables they mention.

    Unmentioned variables range freely on both sides, so inclusion can be
    decided on the rest; an empty carrier among them makes it vacuous.
    """
    for v in s.context:
        if v.sort not in M.signature.sorts:
            raise ModelError(f"variable of unknown sort {v.sort}")
    if any(M.size(v.sort) == 0 for v in s.context):
        return None
    a, c = _relation(M, s.antecedent, cap), _relation(M, s.consequent, cap)
    used = tuple(v for v in s.context if v in a[0] or v in c[0])
    _check_cap(M, used, cap)
    return used, _expand(M, a, used), _expand(M, c, used)


def satisfies(M: FiniteModel, s: Sequent, cap: int = DEFAULT_TUPLE_CAP) -> bool:
    r = _restricted(M, s, cap)
    return r is None or r[1] <= r[2]


def counterexample(M: FiniteModel, s: Sequent, cap: int = DEFAULT_TUPLE_CAP) -> tuple[int, ...] | None:
    """A context tuple satisfying the antecedent but not the consequent."""
    r = _restricted(M, s, cap)
    if r is None:
        return None
    used, a, b = r
    bad = sorted(a - b)
    if not bad:
        return None
    val = dict(zip(used, bad[0]))
    return tuple(val.get(v, 0) for v in s.context)


def is_model(M: FiniteModel, theory, cap: int = DEFAULT_TUPLE_CAP) -> bool:
    if M.signature != theory.signature:
        raise ModelError("model and theory have different signatures")
    return all(satisfies(M, ax, cap) for ax in theory.axioms)


# -- constructions ----------------------------------------------------------


def linear_module_model(signature: Signature, matrices: Mapping[str, Sequence[Sequence[int]]],
                        prime: int = 2) -> FiniteModel:
    """``F_p^n`` with each unary generator acting by the given matrix (column vectors).

    ``plus``, ``zero`` and ``neg`` are interpreted as vector operations when
    the signature has them.
    """
    dim = len(next(iter(matrices.values()))) if matrices else 1
    vecs = [tuple(reversed(v)) for v in itertools.product(range(prime), repeat=dim)]
    index = {v: i for i, v in enumerate(vecs)}

    def idx(v):
        return index[tuple(x % prime for x in v)]

    tables = {
        "plus": [idx(tuple(a + b for a, b in zip(va, vb))) for va in vecs for vb in vecs],
        "zero": [0],
        "neg": [idx(tuple(-a for a in va)) for va in vecs],
    }
    for name, mat in matrices.items():
        tables[name] = [idx(tuple(sum(mat[i][j] * va[j] for j in range(dim)) for i in range(dim))) for va in vecs]
    tables = {f.name: tables[f.name] for f in signature.functions if f.name in tables}
    labels = tuple("".join(map(str, v)) for v in vecs)
    return FiniteModel(signature, {signature.sorts[0].name: labels}, tables)


def trivial_model(signature: Signature) -> FiniteModel:
    """Every carrier a singleton."""
    tables = {f.name: [0] for f in signature.functions}
    rels = {r.name: {tuple(0 for _ in r.arg_sorts)} for r in signature.relations}
    return FiniteModel(signature, {s.name: ("*",) for s in signature.sorts}, tables, rels)


# -- files ------------------------------------------------------------------


def model_to_json(M: FiniteModel) -> dict:
    return {
        "carriers": {k: list(v) for k, v in sorted(M.carriers.items())},
        "functions": {k: list(v) for k, v in sorted(M.functions.items())},
        "relations": {k: sorted(list(t) for t in v) for k, v in sorted(M.relations.items())},
    }


def model_from_json(obj: dict, signature: Signature) -> FiniteModel:
    return FiniteModel(signature, obj["carriers"], obj["functions"],
                       {k: frozenset(tuple(t) for t in v) for k, v in obj.get("relations", {}).items()})


def load_model(path: str, signature: Signature) -> FiniteModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_json(json.load(fh), signature)
