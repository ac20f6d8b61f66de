"""Ed25519 identities for actors and sidechain provers.

Ed25519 is deterministic and its raw public keys are exactly 32 bytes, so
one key type serves actor identities, receiver addresses, and the per-
sidechain proving keys alike. Keys derive from 32-byte seeds, which keeps
whole simulations reproducible from a single scenario seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from .hashing import Digest, hash_bytes


class PubKey(bytes):
    """A raw 32-byte Ed25519 public key."""

    def __new__(cls, value: bytes) -> "PubKey":
        if len(value) != 32:
            raise ValueError(f"public key must be 32 bytes, got {len(value)}")
        return super().__new__(cls, value)


Signature = bytes


@lru_cache(maxsize=4096)
def _private_from_seed(seed: bytes) -> Ed25519PrivateKey:
    return Ed25519PrivateKey.from_private_bytes(seed)


@dataclass(frozen=True)
class KeyPair:
    seed: bytes
    public: PubKey = field(init=False)

    def __post_init__(self):
        if len(self.seed) != 32:
            raise ValueError("key seed must be 32 bytes")
        raw = (
            _private_from_seed(self.seed)
            .public_key()
            .public_bytes(serialization.Encoding.Raw, serialization.PublicFormat.Raw)
        )
        object.__setattr__(self, "public", PubKey(raw))

    @classmethod
    def from_label(cls, namespace: str, seed: int, label: str) -> "KeyPair":
        """Derive a reproducible keypair from a scenario seed and a name."""
        material = hash_bytes(namespace.encode() + seed.to_bytes(8, "big") + label.encode())
        return cls(seed=bytes(material))

    def sign(self, digest: Digest) -> Signature:
        return _private_from_seed(self.seed).sign(bytes(digest))


def sign(key: KeyPair, digest: Digest) -> Signature:
    return key.sign(digest)


def verify_sig(public: PubKey, digest: Digest, signature: Signature) -> bool:
    """True iff ``signature`` is a valid signature on ``digest`` under ``public``."""
    try:
        Ed25519PublicKey.from_public_bytes(bytes(public)).verify(bytes(signature), bytes(digest))
        return True
    except (InvalidSignature, ValueError):
        return False
