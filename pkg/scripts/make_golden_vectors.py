#!/usr/bin/env python3
"""Regenerate tests/golden/hash_vectors.json from hashlib alone.

This script deliberately imports nothing from the package. The test suite
compares the library's hash and Merkle construction against these values,
so they have to come from an independent computation: SHA-256 straight from
the standard library, with the tree rules written out longhand below.

Tree rules: leaves are hashed with a 0x00 prefix, inner nodes with 0x01 over
the concatenated children, the leaf row is padded to a power of two (minimum
two) with SHA-256("") sentinels, and the empty tree's root is SHA-256("").
"""
import hashlib
import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "golden" / "hash_vectors.json"


def sha(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


EMPTY = sha(b"")


def leaf_node(digest: bytes) -> bytes:
    return sha(b"\x00" + digest)


def inner_node(left: bytes, right: bytes) -> bytes:
    return sha(b"\x01" + left + right)


def merkle_root(leaves: list[bytes]) -> bytes:
    if not leaves:
        return EMPTY
    width = 2
    while width < len(leaves):
        width *= 2
    level = [leaf_node(d) for d in leaves + [EMPTY] * (width - len(leaves))]
    while len(level) > 1:
        level = [inner_node(level[i], level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def main() -> None:
    d = [sha(bytes([i])) for i in range(5)]
    vectors = {
        "empty_root": EMPTY.hex(),
        "inner_d0_d1": inner_node(leaf_node(d[0]), leaf_node(d[1])).hex(),
        "leaf_d0": leaf_node(d[0]).hex(),
        "leaves": {f"d{i}": d[i].hex() for i in range(5)},
        "sha256_abc": sha(b"abc").hex(),
        "sha256_empty": sha(b"").hex(),
    }
    for n in range(1, 6):
        vectors[f"root_{n}"] = merkle_root(d[:n]).hex()
    OUT.write_text(json.dumps(vectors, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(vectors)} vectors to {OUT}")


if __name__ == "__main__":
    main()
