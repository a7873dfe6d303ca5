"""Finite categories and copresheaves on them.

Everything is explicit tables and exhaustive search: hom-sets, functor
actions, natural transformations, epis (pointwise surjections), sections and
retractions.  Cartesian copresheaves are only considered on posets with
binary meets and a top element, where finite limits are meets.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence


class CategoryError(ValueError):
    pass


@dataclass(frozen=True)
class Arrow:
    name: str
    src: str
    dst: str


class FiniteCategory:
    """Objects, named arrows, a composition table ``(g, f) -> g.f`` and identities."""

    def __init__(self, objects: Sequence[str], arrows: Sequence[Arrow],
                 composition: Mapping[tuple[str, str], str], identities: Mapping[str, str],
                 order: Sequence[tuple[str, str]] | None = None):
        self.objects = tuple(objects)
        self.arrows = tuple(arrows)
        self.by_name = {a.name: a for a in self.arrows}
        self.composition = dict(composition)
        self.identities = dict(identities)
        self.order = None if order is None else frozenset(order)
        self._hom: dict[tuple[str, str], tuple[str, ...]] = {}
        for a in self.arrows:
            self._hom.setdefault((a.src, a.dst), ())
            self._hom[(a.src, a.dst)] += (a.name,)
        self.check()

    def __repr__(self):
        return f"FiniteCategory({len(self.objects)} objects, {len(self.arrows)} arrows)"

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        return self._hom.get((a, b), ())

    def compose(self, g: str, f: str) -> str:
        """``g . f`` (first ``f``, then ``g``)."""
        return self.composition[(g, f)]

    def src(self, f: str) -> str:
        return self.by_name[f].src

    def dst(self, f: str) -> str:
        return self.by_name[f].dst

    def non_identity(self) -> list[str]:
        ids = set(self.identities.values())
        return [a.name for a in self.arrows if a.name not in ids]

    def composable(self) -> Iterator[tuple[str, str]]:
        for f in self.arrows:
            for g in self.arrows:
                if g.src == f.dst:
                    yield g.name, f.name

    def check(self):
        if len(self.by_name) != len(self.arrows):
            raise CategoryError("duplicate arrow names")
        for o in self.objects:
            i = self.identities.get(o)
            if i not in self.by_name or self.src(i) != o or self.dst(i) != o:
                raise CategoryError(f"bad identity for {o}")
        for g, f in self.composable():
            h = self.composition.get((g, f))
            if h not in self.by_name or self.src(h) != self.src(f) or self.dst(h) != self.dst(g):
                raise CategoryError(f"composite {g}.{f} missing or mistyped")
        for f in self.arrows:
            if self.compose(self.identities[f.dst], f.name) != f.name or self.compose(f.name, self.identities[f.src]) != f.name:
                raise CategoryError(f"identity law fails at {f.name}")
        for g, f in self.composable():
            for h in self.arrows:
                if h.src == self.dst(g):
                    if self.compose(h.name, self.compose(g, f)) != self.compose(self.compose(h.name, g), f):
                        raise CategoryError("composition is not associative")

    # constructions

    @classmethod
    def from_poset(cls, elements: Sequence[str], leq: Callable[[str, str], bool] | Iterable[tuple[str, str]]):
        elements = tuple(elements)
        if not callable(leq):
            pairs = set(leq)
            rel = lambda a, b: a == b or (a, b) in pairs  # noqa: E731
        else:
            rel = leq
        # reflexive-transitive closure check
        for a in elements:
            for b in elements:
                for c in elements:
                    if rel(a, b) and rel(b, c) and not rel(a, c):
                        raise CategoryError("order is not transitive")
                if a != b and rel(a, b) and rel(b, a):
                    raise CategoryError("order is not antisymmetric")
        arrows, ids, comp, order = [], {}, {}, []
        for a in elements:
            for b in elements:
                if a == b or rel(a, b):
                    name = f"id_{a}" if a == b else f"{a}<{b}"
                    arrows.append(Arrow(name, a, b))
                    order.append((a, b))
                    if a == b:
                        ids[a] = name
        name_of = {(x.src, x.dst): x.name for x in arrows}
        for f in arrows:
            for g in arrows:
                if g.src == f.dst:
                    comp[(g.name, f.name)] = name_of[(f.src, g.dst)]
        return cls(elements, arrows, comp, ids, order)

    @classmethod
    def monoid(cls, elements: Sequence[str], table: Mapping[tuple[str, str], str], unit: str, obj: str = "*"):
        """One object; ``table[(g, f)]`` is ``g . f``."""
        arrows = [Arrow(e, obj, obj) for e in elements]
        return cls((obj,), arrows, table, {obj: unit})

    # posets

    def leq(self, a: str, b: str) -> bool:
        if self.order is None:
            raise CategoryError("not a poset category")
        return (a, b) in self.order

    def is_poset(self) -> bool:
        return self.order is not None

    def top(self) -> str | None:
        tops = [t for t in self.objects if all(self.leq(a, t) for a in self.objects)]
        return tops[0] if tops else None

    def meet(self, a: str, b: str) -> str | None:
        lower = [c for c in self.objects if self.leq(c, a) and self.leq(c, b)]
        best = [c for c in lower if all(self.leq(d, c) for d in lower)]
        return best[0] if best else None

    def is_meet_semilattice_with_top(self) -> bool:
        return self.is_poset() and self.top() is not None and all(
            self.meet(a, b) is not None for a in self.objects for b in self.objects)

    def arrow_between(self, a: str, b: str) -> str:
        (name,) = self.hom(a, b)
        return name

    # idempotents

    def idempotents(self) -> list[str]:
        return [a.name for a in self.arrows if a.src == a.dst and self.compose(a.name, a.name) == a.name]

    def splitting(self, e: str) -> tuple[str, str] | None:
        """``(r, s)`` with ``s.r = e`` and ``r.s = id``."""
        a = self.src(e)
        for b in self.objects:
            for r in self.hom(a, b):
                for s in self.hom(b, a):
                    if self.compose(s, r) == e and self.compose(r, s) == self.identities[b]:
                        return r, s
        return None

    def is_cauchy_complete(self) -> bool:
        return all(self.splitting(e) is not None for e in self.idempotents())


def chain(n: int) -> FiniteCategory:
    names = [str(i) for i in range(n)]
    return FiniteCategory.from_poset(names, lambda a, b: int(a) <= int(b))


def two_chain() -> FiniteCategory:
    return FiniteCategory.from_poset(("a", "T"), {("a", "T")})


def diamond() -> FiniteCategory:
    """``B <= a, b <= T`` with ``a`` and ``b`` incomparable."""
    return FiniteCategory.from_poset(("B", "a", "b", "T"),
                                     {("B", "a"), ("B", "b"), ("B", "T"), ("a", "T"), ("b", "T")})


def idempotent_monoid() -> FiniteCategory:
    """The monoid ``{1, e}`` with ``ee = e``."""
    table = {("1", "1"): "1", ("1", "e"): "e", ("e", "1"): "e", ("e", "e"): "e"}
    return FiniteCategory.monoid(("1", "e"), table, "1")


def split_idempotent_monoid() -> FiniteCategory:
    """``{1, e}`` with a splitting object ``d``: ``r: * -> d``, ``s: d -> *``, ``s.r = e``, ``r.s = 1_d``."""
    arrows = [Arrow("1", "*", "*"), Arrow("e", "*", "*"), Arrow("r", "*", "d"),
              Arrow("s", "d", "*"), Arrow("1d", "d", "d")]
    comp = {
        ("1", "1"): "1", ("1", "e"): "e", ("e", "1"): "e", ("e", "e"): "e",
        ("r", "1"): "r", ("r", "e"): "r", ("1d", "r"): "r",
        ("1", "s"): "s", ("e", "s"): "s", ("s", "1d"): "s",
        ("s", "r"): "e", ("r", "s"): "1d", ("1d", "1d"): "1d",
    }
    return FiniteCategory(("*", "d"), arrows, comp, {"*": "1", "d": "1d"})


# -- copresheaves -----------------------------------------------------------


@dataclass(frozen=True)
class Copresheaf:
    """``sizes[c]`` elements ``0..n-1`` at each object; ``maps[f]`` the action of arrow ``f``."""

    category: FiniteCategory = field(compare=False, hash=False)
    sizes: tuple[tuple[str, int], ...]
    maps: tuple[tuple[str, tuple[int, ...]], ...]

    def __post_init__(self):
        if isinstance(self.sizes, Mapping):
            object.__setattr__(self, "sizes", tuple(sorted(self.sizes.items())))
        if isinstance(self.maps, Mapping):
            object.__setattr__(self, "maps", tuple(sorted((k, tuple(v)) for k, v in self.maps.items())))
        object.__setattr__(self, "_size", dict(self.sizes))
        object.__setattr__(self, "_act", dict(self.maps))

    @classmethod
    def make(cls, C: FiniteCategory, sizes: Mapping[str, int], maps: Mapping[str, Sequence[int]]) -> "Copresheaf":
        full = dict(maps)
        for o, i in C.identities.items():
            full.setdefault(i, tuple(range(sizes[o])))
        F = cls(C, dict(sizes), {k: tuple(v) for k, v in full.items()})
        F.check()
        return F

    def size(self, c: str) -> int:
        return self._size[c]

    def act(self, f: str) -> tuple[int, ...]:
        return self._act[f]

    def check(self):
        C = self.category
        sizes, maps = dict(self.sizes), dict(self.maps)
        for a in C.arrows:
            fn = maps.get(a.name)
            if fn is None or len(fn) != sizes[a.src] or any(not 0 <= v < sizes[a.dst] for v in fn):
                raise CategoryError(f"action of {a.name} is not a function")
        for o, i in C.identities.items():
            if maps[i] != tuple(range(sizes[o])):
                raise CategoryError("identities must act trivially")
        for g, f in C.composable():
            h = C.compose(g, f)
            if tuple(maps[g][x] for x in maps[f]) != maps[h]:
                raise CategoryError(f"functoriality fails at {g}.{f}")

    def total(self) -> int:
        return sum(n for _, n in self.sizes)

    def is_cartesian(self) -> bool:
        """Terminal and meets go to singletons and pullbacks (poset bases only)."""
        C = self.category
        if not C.is_meet_semilattice_with_top():
            raise CategoryError("cartesianness is only checked on meet-semilattices with top")
        if self.size(C.top()) != 1:
            return False
        for a in C.objects:
            for b in C.objects:
                m = C.meet(a, b)
                fa = self.act(C.arrow_between(m, a))
                fb = self.act(C.arrow_between(m, b))
                for c in C.objects:
                    if not (C.leq(a, c) and C.leq(b, c)):
                        continue
                    ga = self.act(C.arrow_between(a, c))
                    gb = self.act(C.arrow_between(b, c))
                    pullback = {(x, y) for x in range(self.size(a)) for y in range(self.size(b)) if ga[x] == gb[y]}
                    image = [(fa[z], fb[z]) for z in range(self.size(m))]
                    if len(set(image)) != len(image) or set(image) != pullback:
                        return False
        return True


@dataclass(frozen=True)
class NatTransformation:
    source: Copresheaf
    target: Copresheaf
    components: tuple[tuple[str, tuple[int, ...]], ...]

    def __post_init__(self):
        if isinstance(self.components, Mapping):
            object.__setattr__(self, "components", tuple(sorted((k, tuple(v)) for k, v in self.components.items())))
        object.__setattr__(self, "_at", dict(self.components))

    def at(self, c: str) -> tuple[int, ...]:
        return self._at[c]

    def is_natural(self) -> bool:
        F, G, at = self.source, self.target, self._at
        for a in F.category.arrows:
            fa, ga, s, d = F.act(a.name), G.act(a.name), at[a.src], at[a.dst]
            if any(ga[s[i]] != d[fa[i]] for i in range(len(fa))):
                return False
        return True

    def is_epi(self) -> bool:
        return all(set(self.at(c)) == set(range(self.target.size(c))) for c in self.source.category.objects)

    def is_mono(self) -> bool:
        return all(len(set(self.at(c))) == len(self.at(c)) for c in self.source.category.objects)

    def is_iso(self) -> bool:
        return self.is_epi() and self.is_mono()

    def then(self, other: "NatTransformation") -> "NatTransformation":
        """``other . self``."""
        comps = {c: tuple(other.at(c)[v] for v in self.at(c)) for c in self.source.category.objects}
        return NatTransformation(self.source, other.target, comps)


def identity_transformation(F: Copresheaf) -> NatTransformation:
    return NatTransformation(F, F, {c: tuple(range(F.size(c))) for c in F.category.objects})


def transformations(F: Copresheaf, G: Copresheaf) -> Iterator[NatTransformation]:
    """All natural transformations, by backtracking over objects."""
    C = F.category
    objs = list(C.objects)
    chosen: dict[str, tuple[int, ...]] = {}
    touching = {c: [(a.src, a.dst, F.act(a.name), G.act(a.name)) for a in C.arrows if c in (a.src, a.dst)]
                for c in objs}

    def consistent(c: str) -> bool:
        for src, dst, fa, ga in touching[c]:
            if src in chosen and dst in chosen:
                s, d = chosen[src], chosen[dst]
                if any(ga[s[i]] != d[fa[i]] for i in range(len(fa))):
                    return False
        return True

    def rec(i: int):
        if i == len(objs):
            yield NatTransformation(F, G, dict(chosen))
            return
        c = objs[i]
        for comp in itertools.product(range(G.size(c)), repeat=F.size(c)):
            chosen[c] = comp
            if consistent(c):
                yield from rec(i + 1)
            del chosen[c]

    yield from rec(0)


def enumerate_copresheaves(C: FiniteCategory, cap: int, cartesian: bool = False) -> Iterator[Copresheaf]:
    """Every copresheaf with all values of size <= cap (labelled, not up to iso).

    With ``cartesian`` only finite-limit-preserving ones are kept; size
    assignments violating ``|F(a & b)| = |F(a)| |F(b)|`` or ``|F(top)| = 1``
    are skipped before any functions are tried.
    """
    objs = list(C.objects)
    arrows = C.non_identity()
    triples = [(g, f, C.compose(g, f)) for g, f in C.composable()]
    constraints = {a: [t for t in triples if a in t] for a in arrows}
    for sizes in itertools.product(range(cap + 1), repeat=len(objs)):
        sz = dict(zip(objs, sizes))
        if cartesian and not _cartesian_sizes(C, sz):
            continue
        maps: dict[str, tuple[int, ...]] = {C.identities[o]: tuple(range(sz[o])) for o in objs}

        def ok(name: str) -> bool:
            for g, f, h in constraints[name]:
                if g in maps and f in maps and h in maps:
                    if tuple(maps[g][x] for x in maps[f]) != maps[h]:
                        return False
            return True

        def rec(i: int):
            if i == len(arrows):
                F = Copresheaf(C, dict(sz), dict(maps))
                if not cartesian or F.is_cartesian():
                    yield F
                return
            name = arrows[i]
            a = C.by_name[name]
            for fn in itertools.product(range(sz[a.dst]), repeat=sz[a.src]):
                maps[name] = fn
                if ok(name):
                    yield from rec(i + 1)
                del maps[name]

        yield from rec(0)


def _cartesian_sizes(C: FiniteCategory, sz: Mapping[str, int]) -> bool:
    if not C.is_meet_semilattice_with_top() or sz[C.top()] != 1:
        return False
    return all(sz[C.meet(a, b)] == sz[a] * sz[b] for a in C.objects for b in C.objects)


# -- Yoneda -----------------------------------------------------------------


@functools.lru_cache(maxsize=256)
def yoneda(C: FiniteCategory, c: str) -> Copresheaf:
    """``C(c, -)``; elements at ``d`` are the arrows ``c -> d`` in table order."""
    homs = {d: C.hom(c, d) for d in C.objects}
    index = {d: {f: i for i, f in enumerate(homs[d])} for d in C.objects}
    maps = {}
    for a in C.arrows:
        maps[a.name] = tuple(index[a.dst][C.compose(a.name, f)] for f in homs[a.src])
    F = Copresheaf(C, {d: len(homs[d]) for d in C.objects}, maps)
    F.check()
    return F


def yoneda_element(C: FiniteCategory, c: str, f: str) -> int:
    return C.hom(c, C.dst(f)).index(f)


def yoneda_arrow(C: FiniteCategory, h: str) -> NatTransformation:
    """``y(h) : y(d) -> y(c)`` for ``h : c -> d`` (precompose with ``h``)."""
    c, d = C.src(h), C.dst(h)
    yc, yd = yoneda(C, c), yoneda(C, d)
    comps = {e: tuple(C.hom(c, e).index(C.compose(f, h)) for f in C.hom(d, e)) for e in C.objects}
    return NatTransformation(yd, yc, comps)


@dataclass(frozen=True)
class YonedaReport:
    obj: str
    transformations: int
    elements: int
    bijective: bool
    natural: bool


def yoneda_bijection(C: FiniteCategory, c: str, K: Copresheaf) -> YonedaReport:
    """Enumerate ``Nat(y(c), K)`` and compare with ``K(c)`` via evaluation at the identity."""
    yc = yoneda(C, c)
    idx = yoneda_element(C, c, C.identities[c])
    nats = list(transformations(yc, K))
    values = [eta.at(c)[idx] for eta in nats]
    natural = all(eta.is_natural() for eta in nats)
    # inverse x |-> (f |-> K(f)(x)) must land among the enumerated transformations
    found = {eta.components for eta in nats}
    inverse_ok = True
    for x in range(K.size(c)):
        comps = tuple(sorted((d, tuple(K.act(f)[x] for f in C.hom(c, d))) for d in C.objects))
        if comps not in found or dict(comps)[c][idx] != x:
            inverse_ok = False
    bijective = inverse_ok and len(set(values)) == len(values) == K.size(c)
    return YonedaReport(c, len(nats), K.size(c), bijective, natural)


# -- image factorization ----------------------------------------------------


def image_factorization(eta: NatTransformation) -> tuple[NatTransformation, NatTransformation, Copresheaf]:
    C = eta.source.category
    G = eta.target
    images = {c: sorted(set(eta.at(c))) for c in C.objects}
    pos = {c: {v: i for i, v in enumerate(images[c])} for c in C.objects}
    maps = {a.name: tuple(pos[a.dst][G.act(a.name)[v]] for v in images[a.src]) for a in C.arrows}
    im = Copresheaf(C, {c: len(images[c]) for c in C.objects}, maps)
    im.check()
    epi = NatTransformation(eta.source, im, {c: tuple(pos[c][v] for v in eta.at(c)) for c in C.objects})
    mono = NatTransformation(im, G, {c: tuple(images[c]) for c in C.objects})
    return epi, mono, im


# -- projectivity and retracts ---------------------------------------------


def has_section(eta: NatTransformation) -> NatTransformation | None:
    ident = identity_transformation(eta.target)
    for s in transformations(eta.target, eta.source):
        if s.then(eta) == ident:
            return s
    return None


@dataclass(frozen=True)
class ProjectivityWitness:
    projective: bool
    epi: NatTransformation | None = None  # an epi without a section, if not projective


def is_projective(C: FiniteCategory, P: Copresheaf, cap: int, universe: Iterable[Copresheaf] | None = None) -> ProjectivityWitness:
    """Every pointwise-surjective ``Q -> P`` with ``Q`` in the universe splits.

    The universe defaults to all copresheaves with values of size <= cap.
    """
    if universe is None:
        universe = enumerate_copresheaves(C, cap)
    for Q in universe:
        for eta in transformations(Q, P):
            if eta.is_epi() and has_section(eta) is None:
                return ProjectivityWitness(False, eta)
    return ProjectivityWitness(True)


def is_retract_of(P: Copresheaf, R: Copresheaf) -> bool:
    ident = identity_transformation(P)
    rs = [r for r in transformations(R, P) if r.is_epi()]
    for i in transformations(P, R):
        if not i.is_mono():
            continue
        if any(i.then(r) == ident for r in rs):
            return True
    return False


def retract_of_representable(C: FiniteCategory, P: Copresheaf) -> str | None:
    for c in C.objects:
        if is_retract_of(P, yoneda(C, c)):
            return c
    return None


def representing_object(C: FiniteCategory, P: Copresheaf) -> tuple[str, NatTransformation] | None:
    """An object ``c`` and an isomorphism ``y(c) -> P``, if any."""
    for c in C.objects:
        yc = yoneda(C, c)
        if any(yc.size(d) != P.size(d) for d in C.objects):
            continue
        for eta in transformations(yc, P):
            if eta.is_iso():
                return c, eta
    return None


def is_coproduct_of_representables(C: FiniteCategory, P: Copresheaf) -> bool:
    """``P`` is generated freely by some of its elements (each a copy of a representable)."""
    gens = []
    for c in C.objects:
        for x in range(P.size(c)):
            gens.append((c, x))
    covered: dict[str, list[int]] = {d: [0] * P.size(d) for d in C.objects}
    chosen = []
    for c, x in gens:
        # x must not be in the image of any other generator's action; minimal elements are generators
        hit = any(P.act(f)[y] == x for d in C.objects for y in range(P.size(d))
                  for f in C.hom(d, c) if f != C.identities[c] or y != x)
        if not hit:
            chosen.append((c, x))
    for c, x in chosen:
        for d in C.objects:
            for f in C.hom(c, d):
                covered[d][P.act(f)[x]] += 1
    return all(n == 1 for d in C.objects for n in covered[d])


@dataclass(frozen=True)
class CharacterizationReport:
    category: str
    cap: int
    cartesian_count: int
    rows: tuple[tuple[dict, bool, bool, bool], ...]
    agree: bool
    cauchy_complete: bool

    def summary(self) -> dict:
        return {
            "category": self.category,
            "cap": self.cap,
            "cartesian_copresheaves": self.cartesian_count,
            "projective": sum(r[1] for r in self.rows),
            "retract_of_representable": sum(r[2] for r in self.rows),
            "representable": sum(r[3] for r in self.rows),
            "agree": self.agree,
            "cauchy_complete": self.cauchy_complete,
        }


def verify_representable_characterization(C: FiniteCategory, cap: int, name: str = "") -> CharacterizationReport:
    """Among cartesian copresheaves with values <= cap: projective, retract of a
    representable and representable must coincide."""
    if not C.is_meet_semilattice_with_top():
        raise CategoryError("base must be a finite meet-semilattice with top")
    carts = list(enumerate_copresheaves(C, cap, cartesian=True))
    rows = []
    for P in carts:
        proj = is_projective(C, P, cap, universe=carts).projective
        retr = retract_of_representable(C, P) is not None
        rep = representing_object(C, P) is not None
        rows.append(({"sizes": dict(P.sizes), "maps": {k: list(v) for k, v in P.maps}}, proj, retr, rep))
    agree = all(r[1] == r[2] == r[3] for r in rows)
    return CharacterizationReport(name or repr(C), cap, len(carts), tuple(rows), agree, C.is_cauchy_complete())


# -- representation embeddings ---------------------------------------------


@dataclass(frozen=True)
class EmbeddingReport:
    valid: bool
    reason: str = ""
    witness: str | None = None  # an arrow of the first base
    object_map: tuple[tuple[str, str], ...] = ()
    arrow_map: tuple[tuple[str, str], ...] = ()


def check_representation_embedding(C1: FiniteCategory, C2: FiniteCategory,
                                   objects: Mapping[str, Copresheaf],
                                   arrows: Mapping[str, NatTransformation]) -> EmbeddingReport:
    """``objects[c]`` is the image of ``y(c)``; ``arrows[h]`` (for ``h : c -> d``)
    is the image of ``y(h) : y(d) -> y(c)``.

    Valid when every image is representable, the assignment is functorial, and
    epis between representables are preserved and reflected.  The induced
    base functor sends ``c`` to a representing object of ``objects[c]``.
    """
    for c in C1.objects:
        if c not in objects:
            return EmbeddingReport(False, f"no image for y({c})")
    for h in C1.arrows:
        t = arrows.get(h.name)
        if t is None:
            return EmbeddingReport(False, f"no image for y({h.name})", h.name)
        if t.source != objects[h.dst] or t.target != objects[h.src] or not t.is_natural():
            return EmbeddingReport(False, f"image of y({h.name}) is not a transformation between the images", h.name)
    for g, f in C1.composable():
        # y(g.f) = y(f) . y(g)
        if arrows[g].then(arrows[f]) != arrows[C1.compose(g, f)]:
            return EmbeddingReport(False, f"assignment is not functorial at {g}.{f}", g)
    for o in C1.objects:
        if arrows[C1.identities[o]] != identity_transformation(objects[o]):
            return EmbeddingReport(False, f"identity on {o} not preserved", C1.identities[o])
    reps = {}
    for c in C1.objects:
        r = representing_object(C2, objects[c])
        if r is None:
            return EmbeddingReport(False, f"image of y({c}) is not representable")
        reps[c] = r
    for h in C1.arrows:
        before = yoneda_arrow(C1, h.name).is_epi()
        after = arrows[h.name].is_epi()
        if before and not after:
            return EmbeddingReport(False, f"y({h.name}) is epi but its image is not", h.name)
        if after and not before:
            return EmbeddingReport(False, f"y({h.name}) is not epi but its image is", h.name)
    # induced functor: conjugate by the chosen isos and read off the Yoneda arrow
    amap = []
    for h in C1.arrows:
        c, d = h.src, h.dst
        c2, iso_c = reps[c]
        d2, iso_d = reps[d]
        # iso_d : y(d2) -> E(y d); arrows[h] : E(y d) -> E(y c); inverse of iso_c
        comp = iso_d.then(arrows[h.name]).then(_inverse(iso_c))
        # comp : y(d2) -> y(c2) equals y(k) for k : c2 -> d2, found at the identity of d2
        idx = yoneda_element(C2, d2, C2.identities[d2])
        k = C2.hom(c2, d2)[comp.at(d2)[idx]]
        amap.append((h.name, k))
    return EmbeddingReport(True, "", None, tuple((c, reps[c][0]) for c in C1.objects), tuple(amap))


def _inverse(iso: NatTransformation) -> NatTransformation:
    comps = {}
    for c in iso.source.category.objects:
        inv = [0] * iso.source.size(c)
        for x, v in enumerate(iso.at(c)):
            inv[v] = x
        comps[c] = tuple(inv)
    return NatTransformation(iso.target, iso.source, comps)


def identity_assignment(C: FiniteCategory):
    return ({c: yoneda(C, c) for c in C.objects},
            {h.name: yoneda_arrow(C, h.name) for h in C.arrows})


def collapse_assignment(C1: FiniteCategory, C2: FiniteCategory):
    """Every representable goes to the constant singleton copresheaf on ``C2``."""
    one = Copresheaf.make(C2, {d: 1 for d in C2.objects}, {a.name: (0,) for a in C2.arrows})
    ident = identity_transformation(one)
    return {c: one for c in C1.objects}, {h.name: ident for h in C1.arrows}


def precomposition_assignment(C1: FiniteCategory, C2: FiniteCategory, q: Mapping[str, str]):
    """``F |-> F . q`` for a monotone map ``q`` from the objects of ``C2`` to those of ``C1``."""
    for a in C2.arrows:
        if not C1.hom(q[a.src], q[a.dst]):
            raise CategoryError("q is not monotone")

    def pull(F: Copresheaf) -> Copresheaf:
        sizes = {d: F.size(q[d]) for d in C2.objects}
        maps = {a.name: F.act(C1.arrow_between(q[a.src], q[a.dst])) for a in C2.arrows}
        G = Copresheaf(C2, sizes, maps)
        G.check()
        return G

    objects = {c: pull(yoneda(C1, c)) for c in C1.objects}
    arrows = {}
    for h in C1.arrows:
        t = yoneda_arrow(C1, h.name)
        arrows[h.name] = NatTransformation(pull(t.source), pull(t.target), {d: t.at(q[d]) for d in C2.objects})
    return objects, arrows
