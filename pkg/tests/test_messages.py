"""Wire types: byte and JSON roundtrips, digest bindings, strict decoding."""
import pytest

from mitto.encoding import ByteReader, DecodeError, canonical_digest
from mitto.hashing import hash_bytes
from mitto.keys import KeyPair
from mitto.messages import (
    MSG_TYPE_TOKEN_TRANSFER,
    SCHEME_SIM_MERKLE,
    BlockHeader,
    CeasedSidechainWithdrawal,
    CscpMessage,
    CswRedeemTx,
    Proof,
    RedeemTx,
    SendTx,
    VerificationKey,
    WithdrawalCertificate,
    decode_block_header,
    decode_certificate,
    decode_csw,
    decode_message,
    message_digest,
    redeem_auth_digest,
)

ALICE = KeyPair.from_label("actor", 0, "alice").public
BOB = KeyPair.from_label("actor", 0, "bob").public


def sample_message(**overrides) -> CscpMessage:
    fields = dict(
        sending_sc_id=1,
        receiving_sc_id=2,
        msg_type=MSG_TYPE_TOKEN_TRANSFER,
        sender_id=ALICE,
        receiver_id=BOB,
        payload_hash=hash_bytes(b"payload"),
    )
    fields.update(overrides)
    return CscpMessage(**fields)


def sample_cert() -> WithdrawalCertificate:
    return WithdrawalCertificate(
        ledger_id=1,
        epoch_id=4,
        quality=9,
        bt_list=(b"bt-entry",),
        proofdata=(hash_bytes(b"a"), hash_bytes(b"b")),
        proof=Proof(scheme_id=SCHEME_SIM_MERKLE, body=b"\x01\x02"),
    )


def sample_csw() -> CeasedSidechainWithdrawal:
    return CeasedSidechainWithdrawal(
        ledger_id=3,
        receiver=ALICE,
        amount=0,
        nullifier=hash_bytes(b"null"),
        proofdata=(hash_bytes(b"pd"),),
        proof=Proof(scheme_id=SCHEME_SIM_MERKLE, body=b"\x07"),
    )


class TestByteRoundtrips:
    def test_message(self):
        m = sample_message()
        r = ByteReader(m.encode())
        assert decode_message(r) == m
        r.finish()

    def test_certificate(self):
        c = sample_cert()
        r = ByteReader(c.encode())
        assert decode_certificate(r) == c
        r.finish()

    def test_csw(self):
        w = sample_csw()
        r = ByteReader(w.encode())
        assert decode_csw(r) == w
        r.finish()

    def test_block_header(self):
        h = BlockHeader(height=5, parent_hash=hash_bytes(b"p"), stc_root=hash_bytes(b"s"))
        encoded = h.encode()
        assert len(encoded) == 73
        r = ByteReader(encoded)
        assert decode_block_header(r) == h
        r.finish()

    def test_truncated_message_rejected(self):
        blob = sample_message().encode()[:-1]
        with pytest.raises(DecodeError):
            decode_message(ByteReader(blob))


class TestJsonRoundtrips:
    def test_message(self):
        m = sample_message()
        assert CscpMessage.from_json(m.to_json()) == m

    def test_certificate(self):
        c = sample_cert()
        assert WithdrawalCertificate.from_json(c.to_json()) == c

    def test_csw(self):
        w = sample_csw()
        assert CeasedSidechainWithdrawal.from_json(w.to_json()) == w

    def test_verification_key(self):
        vk = VerificationKey(scheme_id=SCHEME_SIM_MERKLE, params=b"\x01\x02\x03")
        assert VerificationKey.from_json(vk.to_json()) == vk

    def test_transactions(self):
        m = sample_message()
        send = SendTx(message=m, payload=b"pl", signature=b"\x01" * 64)
        assert SendTx.from_json(send.to_json()) == send
        from mitto.proofs import CommitmentChain, RedeemProof, SourceKind
        from mitto.hashing import MerklePath

        proof = RedeemProof(
            source_kind=SourceKind.CERTIFICATE,
            msg_path=MerklePath(leaf_index=0, siblings=()),
            msg_tree_root=hash_bytes(b"mt"),
            commitment_path=CommitmentChain(posting_digest=hash_bytes(b"c"), segments=()),
            block_hash=hash_bytes(b"blk"),
        )
        redeem = RedeemTx(
            message=m, payload=b"pl", proof=proof, sender_sig=b"\x02" * 64, receiver_signature=b"\x03" * 64
        )
        assert RedeemTx.from_json(redeem.to_json()) == redeem
        cswr = CswRedeemTx(
            message=m,
            payload=b"pl",
            proof=proof,
            sender_sig=b"\x02" * 64,
            receiver_signature=b"\x03" * 64,
            csw_ref=(3, hash_bytes(b"null")),
        )
        assert CswRedeemTx.from_json(cswr.to_json()) == cswr


class TestDigestBindings:
    def test_message_digest_changes_with_every_field(self):
        base = message_digest(sample_message())
        variants = [
            sample_message(sending_sc_id=9),
            sample_message(receiving_sc_id=9),
            sample_message(msg_type=2),
            sample_message(sender_id=BOB),
            sample_message(receiver_id=ALICE),
            sample_message(payload_hash=hash_bytes(b"other")),
        ]
        digests = {message_digest(v) for v in variants}
        assert base not in digests
        assert len(digests) == len(variants)

    def test_redeem_auth_digest_binds_payload(self):
        m = sample_message()
        assert redeem_auth_digest(m, b"one") != redeem_auth_digest(m, b"two")
        assert redeem_auth_digest(m, b"one") != message_digest(m)

    def test_canonical_digest_distinguishes_types(self):
        # A certificate and a CSW must never share a digest even with aligned fields.
        assert canonical_digest(sample_cert()) != canonical_digest(sample_csw())
