"""Merkle-evidence proof scheme and redeem evidence chains.

Stand-in for succinct proofs: a Proof body is a serialized witness bundle
(entries, entity bytes, Merkle paths, anchoring headers) plus an Ed25519
signature over the digest of the public input, made with the sidechain key
whose public half was registered as the verification key. Verification
reparses the bundle, refolds every path, recomputes every root named by the
public input, and checks the signature. Verifier entry points see exactly
(vk, public_input, proof) and nothing else, so a swapped-in scheme with the
same signatures drops in unchanged.

Ceased-sidechain claims anchor through the last finalized certificate: the
claimed entity folds into the committed-state root the certificate carries
at proofdata index 1, the certificate digest folds into the block commitment
of the block named by the public input's last_cert_block_hash, and that hash
is recomputed from the header carried in the bundle. Sent-record claims add
return-leg evidence; its inclusion in a *confirmed* block is checked at
proving time against the mainchain view, standing in for a recursive
block-ancestry proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Protocol

from . import encoding as enc
from .encoding import ByteReader, DecodeError, canonical_digest
from .hashing import (
    Digest,
    EMPTY_ROOT,
    MerklePath,
    MerkleTree,
    Sibling,
    build_merkle,
    fold_path,
    hash_bytes,
    merkle_path,
    verify_path,
)
from .keys import KeyPair, PubKey, verify_sig
from .messages import (
    BlockHeader,
    CeasedSidechainWithdrawal,
    CscpMessage,
    Proof,
    SCHEME_SIM_MERKLE,
    VerificationKey,
    WithdrawalCertificate,
    decode_block_header,
    decode_certificate,
    decode_message,
    message_digest,
)


class SchemeMismatch(Exception):
    """Proof and verification key disagree on the proof scheme."""


class InconsistentWitness(Exception):
    """Prover witness does not reproduce the public input it was asked to bind."""


class EntityNotInState(Exception):
    """Claimed entity is not part of the committed state being withdrawn from."""


class MessageMismatch(Exception):
    """Embedded message does not commit to the claimed entity."""


class MessageNotCommitted(Exception):
    """Message is not a leaf of the committed epoch tree."""


class CertificateNotConfirmed(Exception):
    """No finalized certificate on the mainchain matches the evidence."""


class CswNotFound(Exception):
    """Referenced ceased-sidechain withdrawal is not on the mainchain."""


# ---------------------------------------------------------------------------
# Public inputs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WcertPublicInput:
    """What the mainchain pins down before verifying a certificate proof."""

    quality: int
    bt_list_root: Digest
    last_block_hash: Digest
    proofdata_root: Digest

    def encode(self) -> bytes:
        return (
            enc.enc_u8(enc.TAG_WCERT_INPUT)
            + enc.enc_u64(self.quality)
            + enc.enc_digest(self.bt_list_root)
            + enc.enc_digest(self.last_block_hash)
            + enc.enc_digest(self.proofdata_root)
        )


@dataclass(frozen=True)
class CswPublicInput:
    """What the mainchain pins down before verifying a withdrawal proof."""

    last_cert_block_hash: Digest
    nullifier: Digest
    receiver: PubKey
    amount: int
    proofdata_root: Digest

    def encode(self) -> bytes:
        return (
            enc.enc_u8(enc.TAG_CSW_INPUT)
            + enc.enc_digest(self.last_cert_block_hash)
            + enc.enc_digest(self.nullifier)
            + bytes(self.receiver)
            + enc.enc_u64(self.amount)
            + enc.enc_digest(self.proofdata_root)
        )


def make_wcert_input(
    quality: int,
    bt_list: tuple[bytes, ...],
    last_block_hash: Digest,
    proofdata: tuple[Digest, ...],
) -> WcertPublicInput:
    return WcertPublicInput(
        quality=quality,
        bt_list_root=build_merkle([hash_bytes(bt) for bt in bt_list]).root,
        last_block_hash=last_block_hash,
        proofdata_root=build_merkle(list(proofdata)).root,
    )


def make_csw_input(
    last_cert_block_hash: Digest,
    nullifier: Digest,
    receiver: PubKey,
    amount: int,
    proofdata: tuple[Digest, ...],
) -> CswPublicInput:
    return CswPublicInput(
        last_cert_block_hash=last_cert_block_hash,
        nullifier=nullifier,
        receiver=receiver,
        amount=amount,
        proofdata_root=build_merkle(list(proofdata)).root,
    )


def decode_wcert_input(reader: ByteReader) -> WcertPublicInput:
    reader.expect_tag(enc.TAG_WCERT_INPUT)
    return WcertPublicInput(
        quality=reader.u64(),
        bt_list_root=reader.digest(),
        last_block_hash=reader.digest(),
        proofdata_root=reader.digest(),
    )


def decode_csw_input(reader: ByteReader) -> CswPublicInput:
    reader.expect_tag(enc.TAG_CSW_INPUT)
    return CswPublicInput(
        last_cert_block_hash=reader.digest(),
        nullifier=reader.digest(),
        receiver=PubKey(reader.take(32)),
        amount=reader.u64(),
        proofdata_root=reader.digest(),
    )


def csw_nullifier(sc_id: int, entity_digest: Digest) -> Digest:
    """Replay tag for a ceased-sidechain claim: binds chain and entity, so a
    second withdrawal of the same entity collides no matter how the embedded
    message is addressed."""
    return hash_bytes(enc.enc_u32(sc_id) + entity_digest)


def sim_merkle_vk(signer_public: PubKey) -> VerificationKey:
    return VerificationKey(scheme_id=SCHEME_SIM_MERKLE, params=bytes(signer_public))


# ---------------------------------------------------------------------------
# Path serialization shared by bundles and redeem proofs
# ---------------------------------------------------------------------------

def encode_path(path: MerklePath) -> bytes:
    parts = [enc.enc_u32(path.leaf_index), enc.enc_u32(len(path.siblings))]
    for s in path.siblings:
        parts.append(enc.enc_digest(s.digest))
        parts.append(enc.enc_bool(s.on_left))
    return b"".join(parts)


def decode_path(reader: ByteReader) -> MerklePath:
    leaf_index = reader.u32()
    count = reader.u32()
    sibs = tuple(Sibling(digest=reader.digest(), on_left=reader.boolean()) for _ in range(count))
    return MerklePath(leaf_index=leaf_index, siblings=sibs)


# ---------------------------------------------------------------------------
# Mainchain view protocol (what evidence builders and verify_redeem may read)
# ---------------------------------------------------------------------------

class MainchainView(Protocol):
    def block_by_hash(self, block_hash: Digest): ...

    def posting(self, digest: Digest): ...

    def finalized_cert(self, sc_id: int, epoch_id: int): ...

    def stc_tree(self, block_hash: Digest): ...

    def csw_inclusion(self, sc_id: int, nullifier: Digest): ...


# ---------------------------------------------------------------------------
# Withdrawal certificate proofs
# ---------------------------------------------------------------------------

def prove_wcert(
    signer: KeyPair,
    public_input: WcertPublicInput,
    bt_list: tuple[bytes, ...],
    proofdata: tuple[Digest, ...],
) -> Proof:
    """Bundle the epoch witness and sign the public input.

    Raises InconsistentWitness when the witness does not reproduce the roots
    the public input names.
    """
    if build_merkle([hash_bytes(bt) for bt in bt_list]).root != public_input.bt_list_root:
        raise InconsistentWitness("backward-transfer list does not match bt_list_root")
    if build_merkle(list(proofdata)).root != public_input.proofdata_root:
        raise InconsistentWitness("proofdata does not match proofdata_root")
    signature = signer.sign(canonical_digest(public_input))
    parts = [enc.enc_u32(len(bt_list))]
    parts.extend(enc.enc_bytes(bt) for bt in bt_list)
    parts.append(enc.enc_digest_list(proofdata))
    parts.append(enc.enc_bytes(signature))
    return Proof(scheme_id=SCHEME_SIM_MERKLE, body=b"".join(parts))


def verify_wcert(vk: VerificationKey, public_input: WcertPublicInput, proof: Proof) -> bool:
    """True iff the bundle reproduces the input's roots and the signature
    over the input digest verifies under the registered key."""
    if proof.scheme_id != vk.scheme_id:
        raise SchemeMismatch(f"proof scheme {proof.scheme_id} vs vk scheme {vk.scheme_id}")
    try:
        reader = ByteReader(proof.body)
        bt_list = [reader.raw_bytes() for _ in range(reader.u32())]
        proofdata = reader.digest_list()
        signature = reader.raw_bytes()
        reader.finish()
        key = PubKey(vk.params)
    except (DecodeError, ValueError):
        return False
    if build_merkle([hash_bytes(bt) for bt in bt_list]).root != public_input.bt_list_root:
        return False
    if build_merkle(proofdata).root != public_input.proofdata_root:
        return False
    return verify_sig(key, canonical_digest(public_input), signature)


# ---------------------------------------------------------------------------
# Ceased-sidechain withdrawal proofs
# ---------------------------------------------------------------------------

class ClaimKind(IntEnum):
    PAYLOAD_ENTITY = 0
    SENT_RECORD = 1


@dataclass(frozen=True)
class CommittedState:
    """Sorted entity digests a certificate committed to, with their tree."""

    leaves: tuple[Digest, ...]
    tree: MerkleTree

    @classmethod
    def from_digests(cls, digests) -> "CommittedState":
        leaves = tuple(sorted(digests))
        return cls(leaves=leaves, tree=build_merkle(list(leaves)))

    @property
    def root(self) -> Digest:
        return self.tree.root

    def path_for(self, entity_digest: Digest) -> MerklePath:
        if entity_digest not in self.leaves:
            raise EntityNotInState(entity_digest.hex())
        return merkle_path(self.tree, self.leaves.index(entity_digest))


@dataclass(frozen=True)
class StateAnchor:
    """Chains a committed-state root to a mainchain block hash: the final
    certificate carries the root at proofdata[1], its digest is a leaf of the
    block's sidechain commitment, and the header reproduces the block hash."""

    cert: WithdrawalCertificate
    stc_path: MerklePath
    header: BlockHeader


@dataclass(frozen=True)
class ReturnEvidence:
    """Evidence for a sent-record claim: the counterparty's return message,
    committed in its certificate, wrapping an instance this chain issued."""

    return_message: CscpMessage
    msg_path: MerklePath
    holder_cert: WithdrawalCertificate
    holder_stc_path: MerklePath
    holder_header: BlockHeader
    returned_instance_bytes: bytes


@dataclass(frozen=True)
class CswClaim:
    """Everything the prover asserts about one ceased-sidechain withdrawal."""

    kind: ClaimKind
    entity_bytes: bytes
    committed: CommittedState
    anchor: StateAnchor
    message: CscpMessage | None = None
    return_evidence: ReturnEvidence | None = None


def claim_proofdata(claim: CswClaim) -> tuple[Digest, ...]:
    """Withdrawal proofdata implied by a claim; the withdrawal entity and the
    proof bundle must agree on it."""
    if claim.kind is ClaimKind.SENT_RECORD:
        if claim.message is None or claim.return_evidence is None:
            raise InconsistentWitness("sent-record claim needs an embedded message and return evidence")
        return (
            message_digest(claim.message),
            canonical_digest(claim.return_evidence.holder_header),
        )
    if claim.message is not None:
        return (message_digest(claim.message),)
    return (EMPTY_ROOT,)


def prove_csw(signer: KeyPair, sc_id: int, public_input: CswPublicInput, claim: CswClaim) -> Proof:
    """Bundle a ceased-sidechain claim and sign the public input.

    The prover refuses dishonest claims: the entity must be a leaf of the
    committed state, a payload claim's message must commit to the entity
    bytes, and the finished bundle must survive its own verification.
    """
    entity_digest = hash_bytes(claim.entity_bytes)
    if entity_digest not in claim.committed.leaves:
        raise EntityNotInState(f"entity {entity_digest.hex()} not in committed state")
    if claim.kind is ClaimKind.PAYLOAD_ENTITY and claim.message is not None:
        if claim.message.payload_hash != entity_digest:
            raise MessageMismatch("message payload hash does not commit to the claimed entity")
    # For sent-record claims this also pins the block that confirmed the
    # return leg, binding every bit of the carried holder header through
    # the proofdata root.
    proofdata = claim_proofdata(claim)
    state_path = claim.committed.path_for(entity_digest)

    parts = [
        enc.enc_u32(sc_id),
        enc.enc_u8(int(claim.kind)),
        enc.enc_bytes(claim.entity_bytes),
    ]
    if claim.message is not None:
        parts.append(enc.enc_u8(1))
        parts.append(claim.message.encode())
    else:
        parts.append(enc.enc_u8(0))
    parts.append(enc.enc_digest_list(proofdata))
    parts.append(encode_path(state_path))
    parts.append(enc.enc_digest(claim.committed.root))
    parts.append(enc.enc_bytes(claim.anchor.cert.encode()))
    parts.append(encode_path(claim.anchor.stc_path))
    parts.append(claim.anchor.header.encode())
    if claim.return_evidence is not None:
        ev = claim.return_evidence
        parts.append(enc.enc_u8(1))
        parts.append(ev.return_message.encode())
        parts.append(encode_path(ev.msg_path))
        parts.append(enc.enc_bytes(ev.holder_cert.encode()))
        parts.append(encode_path(ev.holder_stc_path))
        parts.append(ev.holder_header.encode())
        parts.append(enc.enc_bytes(ev.returned_instance_bytes))
    else:
        parts.append(enc.enc_u8(0))
    signature = signer.sign(canonical_digest(public_input))
    parts.append(enc.enc_bytes(signature))
    proof = Proof(scheme_id=SCHEME_SIM_MERKLE, body=b"".join(parts))

    if not verify_csw(sim_merkle_vk(signer.public), public_input, proof):
        raise InconsistentWitness("claim does not bind the public input")
    return proof


def verify_csw(vk: VerificationKey, public_input: CswPublicInput, proof: Proof) -> bool:
    """Structural verification of a withdrawal claim, no side channels.

    Refolds entity -> committed-state root -> certificate -> block hash and
    compares against the public input, recomputes the nullifier from the
    claimed entity, re-derives the proofdata root, applies the sent-record
    consistency rules when present, then checks the signature.
    """
    if proof.scheme_id != vk.scheme_id:
        raise SchemeMismatch(f"proof scheme {proof.scheme_id} vs vk scheme {vk.scheme_id}")
    try:
        reader = ByteReader(proof.body)
        sc_id = reader.u32()
        kind = ClaimKind(reader.u8())
        entity_bytes = reader.raw_bytes()
        message = decode_message(reader) if reader.boolean() else None
        proofdata = reader.digest_list()
        state_path = decode_path(reader)
        state_root = reader.digest()
        cert_bytes = reader.raw_bytes()
        cert = decode_certificate(ByteReader(cert_bytes))
        stc_path = decode_path(reader)
        header = decode_block_header(reader)
        evidence = None
        if reader.boolean():
            ev_message = decode_message(reader)
            ev_msg_path = decode_path(reader)
            holder_cert_bytes = reader.raw_bytes()
            holder_cert = decode_certificate(ByteReader(holder_cert_bytes))
            holder_stc_path = decode_path(reader)
            holder_header = decode_block_header(reader)
            returned_bytes = reader.raw_bytes()
            evidence = (ev_message, ev_msg_path, holder_cert_bytes, holder_cert,
                        holder_stc_path, holder_header, returned_bytes)
        signature = reader.raw_bytes()
        reader.finish()
        key = PubKey(vk.params)
    except (DecodeError, ValueError):
        return False

    entity_digest = hash_bytes(entity_bytes)
    if public_input.nullifier != csw_nullifier(sc_id, entity_digest):
        return False
    expected_len = 2 if kind is ClaimKind.SENT_RECORD else 1
    if len(proofdata) != expected_len:
        return False
    if message is not None:
        if proofdata[0] != message_digest(message):
            return False
        if public_input.amount != 0:
            return False
        if message.sending_sc_id != sc_id:
            return False
    elif proofdata[0] != EMPTY_ROOT:
        return False
    if build_merkle(proofdata).root != public_input.proofdata_root:
        return False

    # Entity -> committed state -> final certificate -> block hash.
    if not verify_path(state_root, entity_digest, state_path):
        return False
    if len(cert.proofdata) < 2 or cert.proofdata[1] != state_root:
        return False
    if cert.ledger_id != sc_id:
        return False
    if not verify_path(header.stc_root, hash_bytes(cert_bytes), stc_path):
        return False
    if canonical_digest(header) != public_input.last_cert_block_hash:
        return False

    if kind is ClaimKind.SENT_RECORD:
        if message is None or evidence is None:
            return False
        if not _check_return_evidence(sc_id, entity_bytes, message, evidence, proofdata[1]):
            return False
    elif evidence is not None:
        return False

    return verify_sig(key, canonical_digest(public_input), signature)


def _check_return_evidence(
    sc_id: int,
    record_bytes: bytes,
    embedded: CscpMessage,
    evidence,
    holder_block_hash: Digest,
) -> bool:
    from .tokens import decode_sent_record, decode_token_instance

    (ev_message, ev_msg_path, holder_cert_bytes, holder_cert,
     holder_stc_path, holder_header, returned_bytes) = evidence
    try:
        record = decode_sent_record(record_bytes)
        instance = decode_token_instance(returned_bytes)
    except (DecodeError, ValueError):
        return False
    if canonical_digest(holder_header) != holder_block_hash:
        return False
    # The return leg targets this chain, comes from the recorded counterparty,
    # and is committed through the counterparty's certificate.
    if ev_message.receiving_sc_id != sc_id:
        return False
    if ev_message.sending_sc_id != record.receiver_sc_id:
        return False
    if not holder_cert.proofdata:
        return False
    if not verify_path(holder_cert.proofdata[0], message_digest(ev_message), ev_msg_path):
        return False
    if holder_cert.ledger_id != ev_message.sending_sc_id:
        return False
    if not verify_path(holder_header.stc_root, hash_bytes(holder_cert_bytes), holder_stc_path):
        return False
    # The returned instance is one this chain issued, covered by the record,
    # and the embedded onward message wraps exactly those bytes.
    if ev_message.payload_hash != hash_bytes(returned_bytes):
        return False
    if embedded.payload_hash != hash_bytes(returned_bytes):
        return False
    if instance.issuer_sc_id != sc_id:
        return False
    if instance.token_name != record.token_name:
        return False
    if instance.fungibility != record.fungibility:
        return False
    if record.fungibility:
        if instance.amount is None or record.amount is None or instance.amount > record.amount:
            return False
    else:
        if instance.token_id != record.token_id:
            return False
    return True


# ---------------------------------------------------------------------------
# Redeem evidence
# ---------------------------------------------------------------------------

class SourceKind(IntEnum):
    CERTIFICATE = 0
    CSW = 1


@dataclass(frozen=True)
class CommitmentChain:
    """Merkle-path chain from a mainchain posting into a block commitment.

    posting_digest is the chain's leaf; each segment's fold result is the
    next segment's leaf; the last fold must equal the block's stc_root.
    Certificates take one segment (certificate leaf in the block
    commitment); withdrawals take two (tx-tree leaf, then tx root leaf).
    """

    posting_digest: Digest
    segments: tuple[MerklePath, ...]

    def encode(self) -> bytes:
        parts = [enc.enc_digest(self.posting_digest), enc.enc_u32(len(self.segments))]
        parts.extend(encode_path(p) for p in self.segments)
        return b"".join(parts)

    def to_json(self) -> dict:
        return {
            "posting_digest": self.posting_digest.hex(),
            "segments": [p.to_json() for p in self.segments],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CommitmentChain":
        return cls(
            posting_digest=Digest(bytes.fromhex(obj["posting_digest"])),
            segments=tuple(MerklePath.from_json(p) for p in obj["segments"]),
        )


@dataclass(frozen=True)
class RedeemProof:
    """Evidence that a message was committed and mainchain-confirmed.

    For certificate-sourced messages msg_path folds the message digest into
    the epoch tree root at the certificate's proofdata[0]. For withdrawal-
    sourced messages the message digest sits directly at the withdrawal's
    proofdata[0], so msg_path is empty and msg_tree_root must equal the
    message digest itself.
    """

    source_kind: SourceKind
    msg_path: MerklePath
    msg_tree_root: Digest
    commitment_path: CommitmentChain
    block_hash: Digest

    def encode(self) -> bytes:
        return (
            enc.enc_u8(enc.TAG_REDEEM_PROOF)
            + enc.enc_u8(int(self.source_kind))
            + encode_path(self.msg_path)
            + enc.enc_digest(self.msg_tree_root)
            + self.commitment_path.encode()
            + enc.enc_digest(self.block_hash)
        )

    def to_json(self) -> dict:
        return {
            "source_kind": "certificate" if self.source_kind is SourceKind.CERTIFICATE else "csw",
            "msg_path": self.msg_path.to_json(),
            "msg_tree_root": self.msg_tree_root.hex(),
            "commitment_path": self.commitment_path.to_json(),
            "block_hash": self.block_hash.hex(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RedeemProof":
        return cls(
            source_kind=SourceKind.CERTIFICATE if obj["source_kind"] == "certificate" else SourceKind.CSW,
            msg_path=MerklePath.from_json(obj["msg_path"]),
            msg_tree_root=Digest(bytes.fromhex(obj["msg_tree_root"])),
            commitment_path=CommitmentChain.from_json(obj["commitment_path"]),
            block_hash=Digest(bytes.fromhex(obj["block_hash"])),
        )


def decode_redeem_proof(reader: ByteReader) -> RedeemProof:
    reader.expect_tag(enc.TAG_REDEEM_PROOF)
    source = SourceKind(reader.u8())
    msg_path = decode_path(reader)
    msg_tree_root = reader.digest()
    posting_digest = reader.digest()
    segments = tuple(decode_path(reader) for _ in range(reader.u32()))
    block_hash = reader.digest()
    return RedeemProof(
        source_kind=source,
        msg_path=msg_path,
        msg_tree_root=msg_tree_root,
        commitment_path=CommitmentChain(posting_digest=posting_digest, segments=segments),
        block_hash=block_hash,
    )


def build_redeem_proof(
    mainchain: MainchainView,
    sender_sc_id: int,
    epoch_id: int,
    message: CscpMessage,
    message_tree: MerkleTree,
) -> RedeemProof:
    """Assemble certificate-sourced redeem evidence from the sender's
    archived epoch tree and the mainchain's finalized certificate index."""
    md = message_digest(message)
    if md not in message_tree.leaves:
        raise MessageNotCommitted(f"message {md.hex()} not in epoch {epoch_id} tree")
    confirmed = mainchain.finalized_cert(sender_sc_id, epoch_id)
    if confirmed is None:
        raise CertificateNotConfirmed(f"no finalized certificate for sidechain {sender_sc_id} epoch {epoch_id}")
    cert, block_hash = confirmed
    if cert.proofdata[0] != message_tree.root:
        raise CertificateNotConfirmed("finalized certificate commits a different epoch tree")
    stc = mainchain.stc_tree(block_hash)
    return RedeemProof(
        source_kind=SourceKind.CERTIFICATE,
        msg_path=merkle_path(message_tree, message_tree.leaves.index(md)),
        msg_tree_root=message_tree.root,
        commitment_path=CommitmentChain(
            posting_digest=canonical_digest(cert),
            segments=(stc.cert_path(sender_sc_id),),
        ),
        block_hash=block_hash,
    )


def build_csw_redeem_proof(
    mainchain: MainchainView,
    sc_id: int,
    nullifier: Digest,
    message: CscpMessage,
) -> RedeemProof:
    """Assemble withdrawal-sourced redeem evidence for the message embedded
    in an accepted, block-included withdrawal."""
    inclusion = mainchain.csw_inclusion(sc_id, nullifier)
    if inclusion is None:
        raise CswNotFound(f"no included withdrawal for sidechain {sc_id} nullifier {nullifier.hex()}")
    csw, block_hash = inclusion
    md = message_digest(message)
    if not csw.proofdata or csw.proofdata[0] != md:
        raise MessageMismatch("withdrawal does not embed this message")
    stc = mainchain.stc_tree(block_hash)
    txs_tree = stc.txs_trees[sc_id]
    csw_digest = canonical_digest(csw)
    return RedeemProof(
        source_kind=SourceKind.CSW,
        msg_path=MerklePath(leaf_index=0, siblings=()),
        msg_tree_root=md,
        commitment_path=CommitmentChain(
            posting_digest=csw_digest,
            segments=(
                merkle_path(txs_tree, txs_tree.leaves.index(csw_digest)),
                stc.txs_path(sc_id),
            ),
        ),
        block_hash=block_hash,
    )


def verify_redeem(
    mainchain: MainchainView,
    message: CscpMessage,
    payload: bytes,
    proof: RedeemProof,
) -> bool:
    """Check payload binding, tree membership, posting linkage, and block
    confirmation for one redeem claim."""
    if hash_bytes(payload) != message.payload_hash:
        return False
    block = mainchain.block_by_hash(proof.block_hash)
    if block is None:
        return False
    posting = mainchain.posting(proof.commitment_path.posting_digest)
    if posting is None or canonical_digest(posting) != proof.commitment_path.posting_digest:
        return False

    md = message_digest(message)
    if proof.source_kind is SourceKind.CERTIFICATE:
        if not isinstance(posting, WithdrawalCertificate):
            return False
        if len(proof.commitment_path.segments) != 1:
            return False
        if not verify_path(proof.msg_tree_root, md, proof.msg_path):
            return False
        if not posting.proofdata or posting.proofdata[0] != proof.msg_tree_root:
            return False
        if posting.ledger_id != message.sending_sc_id:
            return False
    else:
        if not isinstance(posting, CeasedSidechainWithdrawal):
            return False
        if len(proof.commitment_path.segments) != 2:
            return False
        if proof.msg_path.siblings or proof.msg_path.leaf_index != 0:
            return False
        if proof.msg_tree_root != md:
            return False
        if not posting.proofdata or posting.proofdata[0] != md:
            return False
        if posting.amount != 0:
            return False
        if posting.ledger_id != message.sending_sc_id:
            return False

    node = proof.commitment_path.posting_digest
    for segment in proof.commitment_path.segments:
        folded = fold_path(node, segment)
        if folded is None:
            return False
        node = folded
    return node == block.stc_root
