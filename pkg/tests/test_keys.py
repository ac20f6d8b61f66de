"""Signature layer: deterministic derivation, 32-byte keys, tamper rejection."""
import pytest

from mitto.hashing import hash_bytes
from mitto.keys import KeyPair, PubKey, verify_sig


def test_public_keys_are_32_bytes():
    kp = KeyPair.from_label("actor", 0, "alice")
    assert len(kp.public) == 32
    with pytest.raises(ValueError):
        PubKey(b"\x00" * 31)


def test_derivation_is_deterministic():
    a = KeyPair.from_label("actor", 3, "alice")
    b = KeyPair.from_label("actor", 3, "alice")
    assert a.public == b.public
    digest = hash_bytes(b"msg")
    assert a.sign(digest) == b.sign(digest)


def test_distinct_labels_namespaces_seeds_give_distinct_keys():
    base = KeyPair.from_label("actor", 3, "alice").public
    assert KeyPair.from_label("actor", 3, "bob").public != base
    assert KeyPair.from_label("wcert", 3, "alice").public != base
    assert KeyPair.from_label("actor", 4, "alice").public != base


def test_sign_verify_roundtrip():
    kp = KeyPair.from_label("actor", 0, "carol")
    digest = hash_bytes(b"payload")
    sig = kp.sign(digest)
    assert verify_sig(kp.public, digest, sig)


def test_wrong_digest_rejected():
    kp = KeyPair.from_label("actor", 0, "carol")
    sig = kp.sign(hash_bytes(b"one"))
    assert not verify_sig(kp.public, hash_bytes(b"two"), sig)


def test_wrong_key_rejected():
    kp = KeyPair.from_label("actor", 0, "carol")
    other = KeyPair.from_label("actor", 0, "dave")
    digest = hash_bytes(b"payload")
    assert not verify_sig(other.public, digest, kp.sign(digest))


def test_corrupt_signature_rejected():
    kp = KeyPair.from_label("actor", 0, "carol")
    digest = hash_bytes(b"payload")
    sig = bytearray(kp.sign(digest))
    sig[0] ^= 0x01
    assert not verify_sig(kp.public, digest, bytes(sig))


def test_garbage_signature_is_false_not_exception():
    kp = KeyPair.from_label("actor", 0, "carol")
    assert not verify_sig(kp.public, hash_bytes(b"x"), b"short")
    assert not verify_sig(kp.public, hash_bytes(b"x"), b"\x00" * 64)
