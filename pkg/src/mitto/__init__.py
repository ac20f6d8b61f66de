"""Cross-sidechain message passing and token transfers, simulated at desk scale.

A mainchain accepts sidechain registrations, withdrawal certificates, and
ceased-sidechain withdrawals; sidechains exchange messages whose epoch trees
are committed through certificate proofdata; a token-transfer handler rides
on top with burn-on-send / mint-on-redeem accounting. Proof objects are
Merkle-evidence bundles standing in for succinct proofs, behind verifier
interfaces that never see more than (vk, public input, proof).
"""

from .fuzz import generate_trace, run_fuzz, run_trace
from .harness import HarnessError, Runner, World, dump_state, render_report, run_scenario
from .hashing import (
    EMPTY_ROOT,
    Digest,
    MerklePath,
    MerkleTree,
    build_merkle,
    build_stc,
    hash_bytes,
    merkle_path,
    verify_path,
)
from .keys import KeyPair, PubKey, Signature, verify_sig
from .mainchain import (
    STATUS_ALIVE,
    STATUS_CEASED,
    STATUS_PENDING,
    Mainchain,
    NotFound,
)
from .messages import (
    MSG_TYPE_TOKEN_TRANSFER,
    CeasedSidechainWithdrawal,
    CscpMessage,
    CswRedeemTx,
    Proof,
    RedeemTx,
    SendTx,
    WithdrawalCertificate,
    message_digest,
    redeem_auth_digest,
)
from .proofs import (
    RedeemProof,
    SourceKind,
    build_csw_redeem_proof,
    build_redeem_proof,
    csw_nullifier,
    make_csw_input,
    make_wcert_input,
    sim_merkle_vk,
    verify_csw,
    verify_redeem,
    verify_wcert,
)
from .scenario import ParseError, Scenario, load_scenario, parse_scenario
from .sidechain import ByzantineSidechain, Sidechain
from .tokens import (
    CswPackage,
    MittoState,
    SentRecord,
    TokenInstance,
    TokenNameRegistry,
    TokenTransferHandler,
    withdraw_foreign,
    withdraw_native_held,
    withdraw_native_sent,
)
from .vectors import check_vectors, emit_vectors
from .verdict import Verdict

__all__ = [
    "ByzantineSidechain",
    "CeasedSidechainWithdrawal",
    "CscpMessage",
    "CswPackage",
    "CswRedeemTx",
    "Digest",
    "EMPTY_ROOT",
    "HarnessError",
    "KeyPair",
    "MSG_TYPE_TOKEN_TRANSFER",
    "Mainchain",
    "MerklePath",
    "MerkleTree",
    "MittoState",
    "NotFound",
    "ParseError",
    "Proof",
    "PubKey",
    "RedeemProof",
    "RedeemTx",
    "Runner",
    "STATUS_ALIVE",
    "STATUS_CEASED",
    "STATUS_PENDING",
    "Scenario",
    "SendTx",
    "SentRecord",
    "Sidechain",
    "Signature",
    "SourceKind",
    "TokenInstance",
    "TokenNameRegistry",
    "TokenTransferHandler",
    "Verdict",
    "WithdrawalCertificate",
    "World",
    "build_csw_redeem_proof",
    "build_merkle",
    "build_redeem_proof",
    "build_stc",
    "check_vectors",
    "csw_nullifier",
    "dump_state",
    "emit_vectors",
    "generate_trace",
    "hash_bytes",
    "load_scenario",
    "make_csw_input",
    "make_wcert_input",
    "merkle_path",
    "message_digest",
    "parse_scenario",
    "redeem_auth_digest",
    "render_report",
    "run_fuzz",
    "run_scenario",
    "run_trace",
    "sim_merkle_vk",
    "verify_csw",
    "verify_path",
    "verify_redeem",
    "verify_sig",
    "verify_wcert",
    "withdraw_foreign",
    "withdraw_native_held",
    "withdraw_native_sent",
]
