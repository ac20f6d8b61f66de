"""Canonical byte encoding: fixed-width integers, length prefixes, strict reads."""
import pytest
from hypothesis import given, settings, strategies as st

from mitto.encoding import (
    ByteReader,
    DecodeError,
    enc_bool,
    enc_bytes,
    enc_digest_list,
    enc_str,
    enc_u8,
    enc_u32,
    enc_u64,
)
from mitto.hashing import hash_bytes


def test_fixed_width_big_endian():
    assert enc_u8(0) == b"\x00"
    assert enc_u8(255) == b"\xff"
    assert enc_u32(1) == b"\x00\x00\x00\x01"
    assert enc_u32(0xDEADBEEF) == b"\xde\xad\xbe\xef"
    assert enc_u64(1) == b"\x00\x00\x00\x00\x00\x00\x00\x01"
    assert enc_u64(2**64 - 1) == b"\xff" * 8


def test_out_of_range_integers_rejected():
    with pytest.raises(ValueError):
        enc_u8(256)
    with pytest.raises(ValueError):
        enc_u32(-1)
    with pytest.raises(ValueError):
        enc_u64(2**64)


def test_bool_is_single_strict_byte():
    assert enc_bool(True) == b"\x01"
    assert enc_bool(False) == b"\x00"
    with pytest.raises(DecodeError):
        ByteReader(b"\x02").boolean()


def test_length_prefixed_bytes_and_str():
    assert enc_bytes(b"hi") == b"\x00\x00\x00\x02hi"
    assert enc_str("abc") == b"\x00\x00\x00\x03abc"
    assert enc_bytes(b"") == b"\x00\x00\x00\x00"


def test_digest_list_layout():
    d0, d1 = hash_bytes(b"0"), hash_bytes(b"1")
    assert enc_digest_list([d0, d1]) == b"\x00\x00\x00\x02" + d0 + d1


def test_reader_roundtrip():
    d0 = hash_bytes(b"x")
    blob = enc_u8(7) + enc_u32(9) + enc_u64(11) + enc_bool(True) + enc_bytes(b"pay") + enc_str("nm") + d0
    r = ByteReader(blob)
    assert r.u8() == 7
    assert r.u32() == 9
    assert r.u64() == 11
    assert r.boolean() is True
    assert r.raw_bytes() == b"pay"
    assert r.string() == "nm"
    assert r.digest() == d0
    r.finish()


def test_reader_rejects_truncation():
    r = ByteReader(b"\x00\x00\x00\x05ab")  # claims 5 bytes, has 2
    with pytest.raises(DecodeError):
        r.raw_bytes()


def test_reader_rejects_trailing_garbage():
    r = ByteReader(enc_u8(1) + b"\x00")
    r.u8()
    with pytest.raises(DecodeError):
        r.finish()


def test_expect_tag():
    r = ByteReader(b"\x04rest")
    r.expect_tag(0x04)
    with pytest.raises(DecodeError):
        ByteReader(b"\x05").expect_tag(0x04)


def test_reading_past_end_raises():
    with pytest.raises(DecodeError):
        ByteReader(b"\x00").u32()


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=2**64 - 1))
def test_u64_roundtrip_property(n):
    r = ByteReader(enc_u64(n))
    assert r.u64() == n
    r.finish()


@settings(max_examples=80, deadline=None)
@given(st.binary(max_size=128))
def test_bytes_roundtrip_property(buf):
    r = ByteReader(enc_bytes(buf))
    assert r.raw_bytes() == buf
    r.finish()


@settings(max_examples=80, deadline=None)
@given(st.text(max_size=40))
def test_str_roundtrip_property(text):
    r = ByteReader(enc_str(text))
    assert r.string() == text
    r.finish()


def test_encodings_are_prefix_free_by_length_prefix():
    # Two different payloads can never decode as each other: prefix carries length.
    a = enc_bytes(b"ab")
    b = enc_bytes(b"abc")
    assert not b.startswith(a) or a == b[: len(a)] and len(a) != len(b)
    ra, rb = ByteReader(a), ByteReader(b)
    assert ra.raw_bytes() != rb.raw_bytes()
