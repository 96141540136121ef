#!/usr/bin/env python3
"""Congruence extension and effective codescent for finite embeddings.

For monomorphisms of these varieties, effective codescent is decided by
the congruence extension property over the full signature (the operation
together with all of its divisions).  The decision extends each source
congruence least and checks that it restricts back; an enumeration oracle
confirms the verdicts.  The unary case has a bonus: compatibility with a
finite permutation upgrades for free to compatibility with its inverse.
"""

from nquasi import (
    Embedding,
    cep_by_enumeration,
    check_cep,
    cyclic_loop,
    enumerate_congruences,
    generated_congruence,
    identity_embedding,
    is_effective_codescent,
    search_noncep_monomorphism,
    verify_prop_3_6,
)


def banner(title):
    print()
    print("=" * 60)
    print(title)
    print("=" * 60)


def main():
    z2, z4, z6 = cyclic_loop(2), cyclic_loop(4), cyclic_loop(6)

    banner("CONGRUENCES OF SMALL CYCLIC LOOPS")
    for alg in (z2, z4, z6):
        congs = enumerate_congruences(alg)
        print("%s has %d congruences:" % (alg.name, len(congs)))
        for cong in congs:
            print("   ", cong)

    banner("LEAST EXTENSIONS")
    emb = Embedding(z2, z4, {"0": "0", "1": "2"})
    seed = [("0", "2")]
    print("seed pairs %s generate on Z4:" % seed, generated_congruence(z4, seed))

    banner("EFFECTIVE CODESCENT DECISIONS")
    for emb in [
        identity_embedding(z4),
        Embedding(z2, z4, {"0": "0", "1": "2"}),
        Embedding(z2, z6, {"0": "0", "1": "3"}),
    ]:
        report = is_effective_codescent(emb)
        print("%s -> %s: %s" % (emb.source.name, emb.target.name,
                                "effective" if report.verdict else "NOT effective"))
        oracle_verdict, _ = cep_by_enumeration(emb)
        print("    enumeration oracle agrees:", oracle_verdict == report.verdict)
        for source_cong, extension, back in report.witnesses:
            print("    %-22s extends to %-28s restricts to %s"
                  % (source_cong, extension, back))

    banner("SCOPE MATTERS ONLY IN PRINCIPLE HERE")
    emb = Embedding(z2, z4, {"0": "0", "1": "2"})
    for scope in ("f", "full"):
        print("scope %-4s verdict:" % scope, check_cep(emb, scope=scope).verdict)

    banner("UNARY UPGRADE: f-COMPATIBLE PARTITIONS RESPECT THE INVERSE")
    print("orders 1..6, all cycle types, all compatible partitions:",
          "no counterexample" if verify_prop_3_6(6) is None else "counterexample!")

    banner("SEARCHING SMALL QUASIGROUPS FOR AN EXTENSION FAILURE")
    found, stats = search_noncep_monomorphism(4)
    print("orders 2..4: scanned %d multiplication tables, %d proper embeddings"
          % (stats["squares"], stats["embeddings"]))
    print("extension failure found:", "none at these sizes" if found is None else found)


if __name__ == "__main__":
    main()
