"""The computations behind the acceptance criteria, returning plain result records.

Shared by ``test_acceptance.py`` and ``artifacts.py`` (which serializes the
results to check byte-for-byte reproducibility).
"""

from __future__ import annotations

import hashlib
import random

import generators as gen
from cartlog import lab
from cartlog import tactics as tac
from cartlog.kernel import Rule, check_proof
from cartlog.search import ProofBudget
from cartlog.serialize import proof_dumps
from cartlog.syncat import canonical_interpretation, compose, same_morphism
from cartlog.syntax import Exists, alpha_equal_sequent, Sequent
from cartlog.theories import Theory, adjoin, transport
from cartlog.wordprob import (
    ReductionGap, bfs_equivalent, certificate_to_closed_proof, certificate_to_proof, encode, encode_closed,
    equivalent, finite_quotient, monoid_algebra_model,
)
from cartlog.models import is_model, satisfies


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _shape(p) -> bool:
    """``cut(premise, substitution(exists_elim(identity)))``."""
    if p.rule is not Rule.CUT or len(p.premises) != 2:
        return False
    inst = p.premises[1]
    if inst.rule is not Rule.SUBSTITUTION:
        return False
    opened = inst.premises[0]
    return opened.rule is Rule.EXISTS_ELIM and opened.premises[0].rule is Rule.IDENTITY


def exists_intro_runs(seed: int, n: int = 25) -> list[dict]:
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        inst = gen.exists_instance(rng)
        p = tac.exists_intro(inst.proof, inst.tau, inst.y, inst.psi)
        c = inst.proof.conclusion
        want = Sequent(c.antecedent, c.context, Exists(inst.y, inst.psi))
        out.append({
            "checked": check_proof(inst.theory, p).ok,
            "conclusion": alpha_equal_sequent(p.conclusion, want),
            "shape": _shape(p) and p.premises[0] is inst.proof,
            "proof": proof_dumps(p),
        })
    return out


def composition_runs(seed: int, n: int = 50, depth: int = 16) -> list[dict]:
    rng = random.Random(seed + 1)
    theory = Theory(gen.UNARY)
    budget = ProofBudget(max_depth=depth)
    out = []
    for _ in range(n):
        k = rng.choice((2, 3))
        letters = "XYZ"[:k]
        w1 = gen.random_word(rng, letters, 1, 4)
        w2 = gen.random_word(rng, letters, 1, 4)
        f = canonical_interpretation(theory, list(w2))
        g = canonical_interpretation(theory, list(w1))
        gf = compose(g, f)
        whole = canonical_interpretation(theory, list(w1 + w2))
        bi = same_morphism(gf, whole, budget)
        out.append({
            "words": [w1, w2],
            "certified": gf.check(),
            "biprovable": bi.proved,
            "checked": bi.proved and check_proof(theory, bi.forward).ok and check_proof(theory, bi.backward).ok,
            "forward": proof_dumps(bi.forward) if bi.forward else None,
        })
    return out


def reduction_runs(seed: int, pairs: int = 100) -> dict[str, dict]:
    """BFS certificates turned into proofs of the open-form encoded sequent."""
    rng = random.Random(seed + 2)
    out = {}
    for name, p in gen.PRESENTATIONS.items():
        rows = []
        for u, v in gen.word_pairs(rng, p, pairs):
            cert = bfs_equivalent(p, u, v)
            if cert is None:
                rows.append({"u": u, "v": v, "equivalent": False})
                continue
            row = {"u": u, "v": v, "equivalent": True, "steps": len(cert.steps)}
            theory, seq = encode(p, u, v)
            try:
                proof = certificate_to_proof(p, cert)
                row["proved"] = check_proof(theory, proof).ok and alpha_equal_sequent(proof.conclusion, seq)
                row["proof"] = digest(proof_dumps(proof))
            except ReductionGap as exc:
                row["proved"] = False
                row["gap"] = str(exc)
            ctheory, cseq = encode_closed(p, u, v)
            closed = certificate_to_closed_proof(p, cert)
            row["closed"] = check_proof(ctheory, closed).ok and alpha_equal_sequent(closed.conclusion, cseq)
            row["closed_proof"] = digest(proof_dumps(closed))
            rows.append(row)
        out[name] = {"pairs": rows}
    return out


def refutation_runs(seed: int, pairs: int = 100) -> dict[str, dict]:
    rng = random.Random(seed + 3)
    out = {}
    finite = {k: gen.PRESENTATIONS[k] for k in ("aaa=a", "band", "cyclic")} | gen.EXTRA_FINITE
    for name, p in finite.items():
        m = finite_quotient(p)
        model = monoid_algebra_model(m, 2, p.symbols())
        rows = []
        for u, v in gen.word_pairs(rng, p, pairs):
            res = equivalent(p, u, v)
            if res.status != "inequivalent":
                continue
            theory, seq = encode(p, u, v)
            rows.append({"u": u, "v": v, "model": is_model(model, theory), "refuted": not satisfies(model, seq),
                         "bfs_agrees": bfs_equivalent(p, u, v) is None})
        out[name] = {"quotient": list(m.elements), "carrier": 2 ** len(m), "pairs": rows}
    return out


def transport_runs(seed: int, n: int = 25) -> list[dict]:
    rng = random.Random(seed + 4)
    out = []
    for _ in range(n):
        case = gen.transport_case(rng)
        ext, _ = adjoin(case.theory, case.phi)
        into = transport(case.theory, case.phi, case.proof, "into")
        back = transport(case.theory, case.phi, into, "out")
        out.append({
            "into": check_proof(ext, into).ok,
            "out": check_proof(case.theory, back).ok,
            "round_trip": alpha_equal_sequent(back.conclusion, case.proof.conclusion),
            "into_proof": digest(proof_dumps(into)),
            "out_proof": digest(proof_dumps(back)),
        })
    return out


BASES = {"2chain": lab.two_chain, "3chain": lambda: lab.chain(3), "diamond": lab.diamond}


def characterization_runs(cap: int = 3) -> dict[str, dict]:
    return {name: lab.verify_representable_characterization(make(), cap, name).summary()
            for name, make in BASES.items()}


YONEDA_CAPS = {"2chain": 3, "3chain": 3, "diamond": 3}


def yoneda_runs(caps: dict[str, int] = YONEDA_CAPS) -> dict[str, dict]:
    out = {}
    for name, make in BASES.items():
        C = make()
        total, bad = 0, []
        for K in lab.enumerate_copresheaves(C, caps[name]):
            for c in C.objects:
                r = lab.yoneda_bijection(C, c, K)
                total += 1
                if not (r.bijective and r.natural and r.transformations == r.elements):
                    bad.append({"object": c, "sizes": dict(K.sizes)})
        out[name] = {"cap": caps[name], "checks": total, "failures": bad}
    return out


def embedding_runs() -> dict[str, dict]:
    out = {}
    for name, make in BASES.items():
        C = make()
        ident = lab.check_representation_embedding(C, C, *lab.identity_assignment(C))
        coll = lab.check_representation_embedding(C, C, *lab.collapse_assignment(C, C))
        witness_ok = False
        if coll.witness is not None:
            h = coll.witness
            witness_ok = (not lab.yoneda_arrow(C, h).is_epi()) and lab.collapse_assignment(C, C)[1][h].is_epi()
        out[name] = {"identity_valid": ident.valid, "collapse_valid": coll.valid,
                     "collapse_reason": coll.reason, "witness": coll.witness, "witness_verified": witness_ok}
    return out
