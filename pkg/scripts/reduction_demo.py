"""Run the word-problem reduction over a handful of presentations and tabulate outcomes.

For each presentation, random word pairs are classified as

* proved     certificate turned into a kernel-checked proof of the open-form sequent
* gap        equivalent, but only the closed form (relations as axioms) is provable
* refuted    inequivalent, with a monoid-algebra countermodel
* unknown    neither; infinite presentations land here, since their
             monoid algebra is not a finite model

Usage: python3 scripts/reduction_demo.py [--pairs N] [--seed S] [--json]
"""

from __future__ import annotations

import argparse
import json
import random
from collections import Counter
from dataclasses import asdict, dataclass

from cartlog.kernel import check_proof
from cartlog.models import is_model, satisfies
from cartlog.wordprob import (
    MonoidPresentation, ReductionGap, bfs_equivalent, certificate_to_closed_proof, certificate_to_proof, encode,
    encode_closed, equivalent, finite_quotient, monoid_algebra_model,
)

PRESENTATIONS = {
    "commutative": "monoid <a,b | ab=ba>",
    "aaa=a": "monoid <a | aaa=a>",
    "band": "monoid <a,b | aa=a, bb=b, ab=b, ba=a>",
    "cyclic": "monoid <a | aaaa=aa>",
    "free": "monoid <a,b>",
}


@dataclass(frozen=True)
class DemoConfig:
    pairs: int = 50
    seed: int = 0
    max_len: int = 5


def _pair(rng: random.Random, p: MonoidPresentation, max_len: int) -> tuple[str, str]:
    u = "".join(rng.choice(p.generators) for _ in range(rng.randint(0, max_len)))
    v = "".join(rng.choice(p.generators) for _ in range(rng.randint(0, max_len)))
    return u, v


def classify(p: MonoidPresentation, u: str, v: str, quotient) -> str:
    cert = bfs_equivalent(p, u, v)
    if cert is not None:
        try:
            proof = certificate_to_proof(p, cert)
            theory, _ = encode(p, u, v)
        except ReductionGap:
            proof = certificate_to_closed_proof(p, cert)
            theory, _ = encode_closed(p, u, v)
            return "gap" if check_proof(theory, proof).ok else "error"
        return "proved" if check_proof(theory, proof).ok else "error"
    if equivalent(p, u, v).status != "inequivalent" or quotient is None:
        return "unknown"
    M = monoid_algebra_model(quotient)
    theory, seq = encode_closed(p, u, v)
    return "refuted" if is_model(M, theory) and not satisfies(M, seq) else "unknown"


def run(cfg: DemoConfig) -> dict[str, dict[str, int]]:
    rng = random.Random(cfg.seed)
    out = {}
    for name, text in PRESENTATIONS.items():
        p = MonoidPresentation.parse(text)
        quotient = finite_quotient(p)
        counts = Counter(classify(p, *_pair(rng, p, cfg.max_len), quotient) for _ in range(cfg.pairs))
        out[name] = dict(sorted(counts.items()))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=DemoConfig.pairs)
    ap.add_argument("--seed", type=int, default=DemoConfig.seed)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    cfg = DemoConfig(pairs=args.pairs, seed=args.seed)
    table = run(cfg)
    if args.json:
        print(json.dumps({"config": asdict(cfg), "results": table}, indent=2, sort_keys=True))
        return
    cols = ["proved", "gap", "refuted", "unknown", "error"]
    print(f"{'presentation':<14}" + "".join(f"{c:>9}" for c in cols))
    for name, counts in table.items():
        print(f"{name:<14}" + "".join(f"{counts.get(c, 0):>9}" for c in cols))


if __name__ == "__main__":
    main()
