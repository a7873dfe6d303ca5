"""Summarise the copresheaf laboratory on the small meet-semilattices.

Prints, per base: how many cartesian copresheaves exist up to the value cap,
whether projective / retract-of-representable / representable coincide among
them, how many Yoneda bijections were checked, and what the embedding checker
says about the identity and collapsing assignments.

Usage: python3 scripts/lab_report.py [--cap N] [--yoneda-cap N] [--json]
"""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass

from cartlog import lab

BASES = {"2chain": lab.two_chain, "3chain": lambda: lab.chain(3), "diamond": lab.diamond}


@dataclass(frozen=True)
class LabConfig:
    cap: int = 3
    yoneda_cap: int = 2


def report(C: lab.FiniteCategory, name: str, cfg: LabConfig) -> dict:
    char = lab.verify_representable_characterization(C, cfg.cap, name).summary()
    checks = failures = 0
    for K in lab.enumerate_copresheaves(C, cfg.yoneda_cap):
        for c in C.objects:
            r = lab.yoneda_bijection(C, c, K)
            checks += 1
            failures += not (r.bijective and r.natural)
    ident = lab.check_representation_embedding(C, C, *lab.identity_assignment(C))
    coll = lab.check_representation_embedding(C, C, *lab.collapse_assignment(C, C))
    return {
        "characterization": char,
        "yoneda": {"checks": checks, "failures": failures},
        "embedding": {"identity": ident.valid, "collapse": coll.valid, "collapse_reason": coll.reason},
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cap", type=int, default=LabConfig.cap)
    ap.add_argument("--yoneda-cap", type=int, default=LabConfig.yoneda_cap)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    cfg = LabConfig(args.cap, args.yoneda_cap)
    results = {name: report(make(), name, cfg) for name, make in BASES.items()}
    if args.json:
        print(json.dumps({"config": asdict(cfg), "results": results}, indent=2, sort_keys=True))
        return
    for name, r in results.items():
        ch, y, e = r["characterization"], r["yoneda"], r["embedding"]
        print(f"{name}: {ch['cartesian_copresheaves']} cartesian copresheaves (cap {cfg.cap}), "
              f"classes agree: {ch['agree']}, Cauchy complete: {ch['cauchy_complete']}")
        print(f"  yoneda: {y['checks']} bijections checked, {y['failures']} failures")
        print(f"  embedding: identity valid={e['identity']}, collapse valid={e['collapse']} ({e['collapse_reason']})")


if __name__ == "__main__":
    main()
