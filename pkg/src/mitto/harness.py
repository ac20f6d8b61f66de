"""Scenario execution: a deterministic multi-chain world, step dispatch,
automatic replay probes, and the invariant accountant wired in after every
step.

The runner is deliberately paranoid about its own host: every rejected
transaction is followed by a dump comparison proving no chain state moved,
and every accepted redeem or withdrawal is immediately replayed to prove
the replay defenses hold. Violations of either are reported the same way
as accountant findings rather than silently trusted.
"""
from __future__ import annotations

import difflib
import json
from dataclasses import dataclass
from pathlib import Path

from .accountant import Accountant
from .encoding import canonical_digest
from .hashing import Digest, hash_bytes
from .keys import KeyPair, PubKey
from .mainchain import Mainchain, STATUS_CEASED
from .messages import (
    MSG_TYPE_TOKEN_TRANSFER,
    CscpMessage,
    CswRedeemTx,
    RedeemTx,
    SendTx,
    message_digest,
    redeem_auth_digest,
)
from .proofs import (
    CertificateNotConfirmed,
    CswNotFound,
    EntityNotInState,
    MessageMismatch,
    MessageNotCommitted,
    build_csw_redeem_proof,
    build_redeem_proof,
)
from .scenario import Scenario
from .sidechain import ByzantineSidechain, Sidechain
from .tokens import (
    AmountExceedsSent,
    CswPackage,
    MittoState,
    NoSentRecord,
    NotOwner,
    TokenInstance,
    TokenNameRegistry,
    TokenTransferHandler,
    withdraw_foreign,
    withdraw_native_held,
    withdraw_native_sent,
)
from .verdict import Verdict


class HarnessError(Exception):
    """A step could not be executed as written (not a protocol verdict)."""


class InvariantViolation(Exception):
    """An assert step failed; carries the step index and a state trace."""

    def __init__(self, step: int, invariant: str, trace: str):
        super().__init__(f"step {step}: {invariant} failed\n{trace}")
        self.step = step
        self.invariant = invariant
        self.trace = trace


class World:
    """Fresh mainchain plus the scenario's sidechains, keys, and accountant."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.mainchain = Mainchain()
        self.registry = TokenNameRegistry()
        self.chains: dict[str, Sidechain] = {}
        self.states: dict[str, MittoState] = {}
        self.accountant = Accountant()
        self._actors: dict[str, KeyPair] = {}
        self._actor_by_key: dict[PubKey, KeyPair] = {}

        for spec in scenario.chains:
            cls = ByzantineSidechain if spec.byzantine else Sidechain
            wcert = KeyPair.from_label("wcert", scenario.seed, spec.label)
            csw = KeyPair.from_label("csw", scenario.seed, spec.label)
            sc_id = self.mainchain.register_sidechain(
                spec.epoch_length,
                wcert_vk=_vk(wcert.public),
                csw_vk=_vk(csw.public),
            )
            chain = cls(self.mainchain, sc_id, wcert, csw, label=spec.label)
            state = MittoState(sc_id=sc_id, registry=self.registry, variant=spec.variant)
            chain.register_handler(MSG_TYPE_TOKEN_TRANSFER, TokenTransferHandler(state))
            self.chains[spec.label] = chain
            self.states[spec.label] = state
            self.accountant.register_chain(spec.label, sc_id, spec.byzantine, spec.variant)
        self.mainchain.advance_block()

        for spec in scenario.chains:
            for issuance in spec.issuances:
                self.issue(spec.label, issuance)

    def actor(self, name: str) -> KeyPair:
        if name not in self._actors:
            pair = KeyPair.from_label("actor", self.scenario.seed, name)
            self._actors[name] = pair
            self._actor_by_key[pair.public] = pair
        return self._actors[name]

    def actor_for_key(self, public: PubKey) -> KeyPair:
        pair = self._actor_by_key.get(public)
        if pair is None:
            raise HarnessError(f"no known actor for key {public.hex()}")
        return pair

    def issue(self, label: str, fields: dict) -> TokenInstance:
        state = self.states[label]
        instance = state.issue(
            fields["name"],
            fields["fungible"],
            self.actor(fields["owner"]).public,
            hash_bytes(fields.get("data", fields["name"]).encode()),
            amount=fields.get("amount"),
            token_id=fields.get("token_id"),
        )
        self.accountant.note_issue(label, instance)
        return instance

    def label_by_sc_id(self, sc_id: int) -> str:
        for label, chain in self.chains.items():
            if chain.sc_id == sc_id:
                return label
        raise HarnessError(f"no declared chain has id {sc_id}")

    def pick_instance(self, label: str, owner: PubKey, name: str, amount=None, token_id=None) -> TokenInstance:
        """Resolve a holding to one concrete instance, splitting or merging
        as needed. Deterministic: candidates ordered by (amount, digest)."""
        state = self.states[label]
        candidates = sorted(
            (
                (ti.amount or 0, digest.hex(), digest, ti)
                for digest, ti in state.s_tks.items()
                if ti.token_name == name and ti.owner == owner
            ),
        )
        if token_id is not None:
            for _, _, _, ti in candidates:
                if ti.token_id == token_id:
                    return ti
            raise HarnessError(f"chain {label}: no instance of {name!r} id {token_id} held by that owner")
        if not candidates:
            raise HarnessError(f"chain {label}: no instance of {name!r} held by that owner")
        if amount is None:
            return candidates[0][3]
        for _, _, _, ti in candidates:
            if ti.amount == amount:
                return ti
        for _, _, digest, ti in candidates:
            if ti.amount > amount:
                first, _rest = state.split(digest, amount)
                return first
        total = sum(entry[0] for entry in candidates)
        if total >= amount and len(candidates) > 1:
            merged = state.merge([entry[2] for entry in candidates])
            if merged.amount == amount:
                return merged
            first, _rest = state.split(canonical_digest(merged), amount)
            return first
        raise HarnessError(f"chain {label}: holds {total} of {name!r}, step needs {amount}")

    def snapshot_for_accountant(self) -> dict:
        out = {}
        for label, chain in self.chains.items():
            record = self.mainchain.record(chain.sc_id)
            frozen = None
            if record.status == STATUS_CEASED and record.last_epoch is not None:
                frozen = chain.epochs[record.last_epoch].snapshots[MSG_TYPE_TOKEN_TRANSFER].dump()
            out[label] = {
                "status": record.status,
                "live": self.states[label].dump(),
                "frozen": frozen,
                "used_nullifiers": {n.hex() for n in record.used_nullifiers},
            }
        return out

    def dump(self) -> dict:
        chains = {}
        for label, chain in self.chains.items():
            status = self.mainchain.get_status(chain.sc_id)
            chains[label] = {
                "status": status["status"],
                "last_finalized_epoch": status["last_finalized_epoch"],
                "state_root": chain.current_committed_state().root.hex(),
                "state": chain.dump_state(),
            }
        return {
            "mainchain": {
                "height": self.mainchain.tip_height,
                "tip_hash": self.mainchain.tip.hash.hex(),
            },
            "chains": chains,
        }


def _vk(public: PubKey):
    from .proofs import sim_merkle_vk

    return sim_merkle_vk(public)


def dump_state(world: World, path: str | Path) -> None:
    Path(path).write_text(json.dumps(world.dump(), indent=2, sort_keys=True) + "\n")


def diff_state(a: dict, b: dict) -> str:
    left = json.dumps(a, indent=2, sort_keys=True).splitlines(keepends=True)
    right = json.dumps(b, indent=2, sort_keys=True).splitlines(keepends=True)
    return "".join(difflib.unified_diff(left, right, fromfile="a", tofile="b"))


@dataclass
class _SendRecord:
    message: CscpMessage
    payload: bytes
    sender_sig: bytes
    from_label: str
    fabricated: bool = False
    epoch_id: int | None = None


class Runner:
    """Executes one scenario and produces its deterministic report."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.world = World(scenario)
        self.sends: dict[str, _SendRecord] = {}
        self.withdrawals: dict[str, CswPackage] = {}
        self.violations: list[str] = []
        self.steps: list[dict] = []
        self.failure: dict | None = None

    # -- step helpers -----------------------------------------------------------

    def _verdict_dict(self, verdict: Verdict) -> dict:
        out = {"accepted": verdict.accepted, "reason": verdict.reason}
        if verdict.rule is not None:
            out["rule"] = verdict.rule
        return out

    def _note(self, index: int, findings: list[str]) -> None:
        for finding in findings:
            self.violations.append(f"step {index}: {finding}")

    def _chain_dumps(self) -> str:
        return json.dumps(
            {label: chain.dump_state() for label, chain in self.world.chains.items()}, sort_keys=True
        )

    def _atomic(self, index: int, op: str, pre: str, accepted: bool) -> None:
        """A rejected submission must leave every chain's state untouched.

        The snapshot is taken after wallet-level instance resolution (split
        or merge to match the step's amount), which is the submitter's own
        bookkeeping, not part of the protocol operation under test.
        """
        if not accepted and self._chain_dumps() != pre:
            self.violations.append(f"step {index}: atomicity: rejected {op} changed chain state")

    def _build_message(self, step: dict, instance: TokenInstance) -> CscpMessage:
        return CscpMessage(
            sending_sc_id=self.world.chains[step["from"]].sc_id,
            receiving_sc_id=self.world.chains[step["to"]].sc_id,
            msg_type=MSG_TYPE_TOKEN_TRANSFER,
            sender_id=instance.owner,
            receiver_id=self.world.actor(step["receiver"]).public,
            payload_hash=canonical_digest(instance),
        )

    def _assign_epochs(self, label: str) -> None:
        chain = self.world.chains[label]
        if not chain.epochs:
            return
        epoch_id = len(chain.epochs) - 1
        committed = {message_digest(m) for m, _ in chain.epochs[epoch_id].messages}
        for record in self.sends.values():
            if record.from_label == label and record.epoch_id is None:
                if message_digest(record.message) in committed:
                    record.epoch_id = epoch_id

    def _redeem_tx(self, record: _SendRecord) -> RedeemTx:
        if record.epoch_id is None:
            raise MessageNotCommitted("send was never committed by an epoch close")
        chain = self.world.chains[record.from_label]
        proof = build_redeem_proof(
            self.world.mainchain, chain.sc_id, record.epoch_id, record.message, chain.epochs[record.epoch_id].tree
        )
        receiver = self.world.actor_for_key(record.message.receiver_id)
        return RedeemTx(
            message=record.message,
            payload=record.payload,
            proof=proof,
            sender_sig=record.sender_sig,
            receiver_signature=receiver.sign(redeem_auth_digest(record.message, record.payload)),
        )

    def _csw_redeem_tx(self, package: CswPackage) -> CswRedeemTx:
        proof = build_csw_redeem_proof(
            self.world.mainchain, package.csw.ledger_id, package.csw.nullifier, package.message
        )
        receiver = self.world.actor_for_key(package.message.receiver_id)
        return CswRedeemTx(
            message=package.message,
            payload=package.payload,
            proof=proof,
            sender_sig=package.sender_sig,
            receiver_signature=receiver.sign(redeem_auth_digest(package.message, package.payload)),
            csw_ref=(package.csw.ledger_id, package.csw.nullifier),
        )

    # -- step executors ----------------------------------------------------------

    def _op_issue(self, index: int, step: dict) -> dict:
        instance = self.world.issue(step["chain"], step)
        return {
            "outcome": {"accepted": True, "reason": "Accepted"},
            "summary": f"issued {step['name']} on {step['chain']}",
            "digest": canonical_digest(instance).hex(),
        }

    def _op_send(self, index: int, step: dict) -> dict:
        owner = self.world.actor(step["owner"])
        instance = self.world.pick_instance(
            step["from"], owner.public, step["name"], amount=step.get("amount"), token_id=step.get("token_id")
        )
        message = self._build_message(step, instance)
        signature = owner.sign(message_digest(message))
        tx = SendTx(message=message, payload=instance.encode(), signature=signature)
        pre = self._chain_dumps()
        verdict = self.world.chains[step["from"]].accept_send(tx)
        self._atomic(index, "send", pre, verdict.accepted)
        self._note(index, self.world.accountant.note_send(step["from"], instance, message, verdict.accepted))
        if verdict.accepted and "id" in step:
            self.sends[step["id"]] = _SendRecord(message, tx.payload, signature, step["from"])
        return {
            "outcome": self._verdict_dict(verdict),
            "summary": f"send {step['name']} {step['from']} -> {step['to']}",
        }

    def _op_fabricate_send(self, index: int, step: dict) -> dict:
        chain = self.world.chains[step["from"]]
        if not isinstance(chain, ByzantineSidechain):
            raise HarnessError(f"chain {step['from']} is not byzantine, it cannot fabricate sends")
        owner = self.world.actor(step["owner"])
        instance = TokenInstance(
            token_name=step["name"],
            fungibility=step["fungible"],
            issuer_sc_id=self.world.chains[step["issuer"]].sc_id,
            owner=owner.public,
            data_hash=hash_bytes(step.get("data", step["name"]).encode()),
            amount=step.get("amount"),
            token_id=step.get("token_id"),
        )
        message = self._build_message(step, instance)
        signature = owner.sign(message_digest(message))
        chain.fabricate_send(message, instance.encode())
        if "id" in step:
            self.sends[step["id"]] = _SendRecord(
                message, instance.encode(), signature, step["from"], fabricated=True
            )
        return {
            "outcome": {"accepted": True, "reason": "Fabricated"},
            "summary": f"fabricated send of {step['name']} {step['from']} -> {step['to']}",
        }

    def _op_close_epoch(self, index: int, step: dict) -> dict:
        requested = step.get("chains", "all")
        if requested == "all":
            labels = [
                spec.label
                for spec in self.scenario.chains
                if self.world.mainchain.record(self.world.chains[spec.label].sc_id).status != STATUS_CEASED
            ]
        else:
            labels = list(requested)
        parts = []
        for label in labels:
            chain = self.world.chains[label]
            _cert, verdict = chain.close_epoch(quality=step.get("quality", 1))
            if verdict.accepted:
                self._assign_epochs(label)
            parts.append({"chain": label, **self._verdict_dict(verdict)})
        accepted = all(part["accepted"] for part in parts)
        return {
            "outcome": {"accepted": accepted, "reason": "Accepted" if accepted else "PartialOrRejected"},
            "parts": parts,
            "summary": f"close epoch on {', '.join(labels)}",
        }

    def _op_advance_mainchain(self, index: int, step: dict) -> dict:
        self.world.mainchain.advance_blocks(step["blocks"])
        return {
            "outcome": {"accepted": True, "reason": "Accepted"},
            "summary": f"advanced {step['blocks']} block(s) to height {self.world.mainchain.tip_height}",
        }

    def _op_cease_by_silence(self, index: int, step: dict) -> dict:
        chain = self.world.chains[step["chain"]]
        record = self.world.mainchain.record(chain.sc_id)
        limit = 3 * record.epoch_length + 2
        advanced = 0
        while record.status != STATUS_CEASED:
            if advanced >= limit:
                raise HarnessError(f"chain {step['chain']} did not cease within {limit} blocks")
            self.world.mainchain.advance_block()
            advanced += 1
        return {
            "outcome": {"accepted": True, "reason": "Accepted"},
            "summary": f"{step['chain']} ceased after {advanced} silent block(s)",
        }

    def _op_redeem(self, index: int, step: dict) -> dict:
        record = self.sends.get(step["send"])
        if record is None:
            return {
                "outcome": {"accepted": False, "reason": "EvidenceUnavailable"},
                "summary": f"redeem {step['send']!r}: the referenced send was never accepted",
            }
        label = self.world.label_by_sc_id(record.message.receiving_sc_id)
        chain = self.world.chains[label]
        try:
            tx = self._redeem_tx(record)
        except (MessageNotCommitted, CertificateNotConfirmed) as err:
            return {
                "outcome": {"accepted": False, "reason": "EvidenceUnavailable"},
                "summary": f"redeem {step['send']!r} on {label}: {err}",
            }
        pre = self._chain_dumps()
        verdict = chain.accept_redeem(tx)
        self._atomic(index, "redeem", pre, verdict.accepted)
        instance = _decode_instance(record.payload)
        if instance is not None:
            self._note(index, self.world.accountant.note_redeem(label, instance, record.message, verdict.accepted))
        result = {
            "outcome": self._verdict_dict(verdict),
            "summary": f"redeem {step['send']!r} on {label}",
        }
        if verdict.accepted:
            replay = chain.accept_redeem(tx)
            result["replay"] = self._verdict_dict(replay)
            if replay.accepted:
                self.violations.append(f"step {index}: replay-safety: duplicate redeem accepted on {label}")
        return result

    def _op_csw(self, index: int, step: dict) -> dict:
        chain = self.world.chains[step["chain"]]
        owner = self.world.actor(step["owner"])
        receiver = self.world.actor(step["receiver"]).public
        try:
            package = self._build_withdrawal(step, chain, owner, receiver)
        except (EntityNotInState, NotOwner, NoSentRecord, AmountExceedsSent, CertificateNotConfirmed, ValueError) as err:
            return {
                "outcome": {"accepted": False, "reason": "EvidenceUnavailable"},
                "summary": f"withdrawal {step['id']!r} from {step['chain']}: {err}",
            }
        pre = self._chain_dumps()
        verdict = self.world.mainchain.submit_csw(package.csw)
        self._atomic(index, "csw", pre, verdict.accepted)
        if verdict.accepted:
            self.withdrawals[step["id"]] = package
        result = {
            "outcome": self._verdict_dict(verdict),
            "summary": f"withdrawal {step['id']!r} ({step['mode']}) from {step['chain']}",
            "nullifier": package.csw.nullifier.hex(),
        }
        if verdict.accepted:
            replay = self.world.mainchain.submit_csw(package.csw)
            result["replay"] = self._verdict_dict(replay)
            if replay.accepted:
                self.violations.append(f"step {index}: replay-safety: duplicate withdrawal accepted")
        return result

    def _build_withdrawal(self, step: dict, chain: Sidechain, owner: KeyPair, receiver: PubKey) -> CswPackage:
        mode = step["mode"]
        if mode == "sent_record":
            holder = self.world.chains[step["holder"]]
            ret = self.sends.get(step["return_send"])
            if ret is None:
                raise EntityNotInState("the referenced return send was never accepted")
            if ret.epoch_id is None:
                raise CertificateNotConfirmed("the return send was never committed")
            return withdraw_native_sent(
                chain,
                holder,
                ret.message,
                ret.payload,
                ret.epoch_id,
                owner,
                self.world.chains[step["target"]].sc_id,
                receiver,
            )
        frozen = chain.finalized_epoch().snapshots[MSG_TYPE_TOKEN_TRANSFER]
        candidates = sorted(
            (digest.hex(), digest)
            for digest, ti in frozen.s_tks.items()
            if ti.token_name == step["name"]
            and ti.owner == owner.public
            and (step.get("token_id") is None or ti.token_id == step.get("token_id"))
            and (step.get("amount") is None or ti.amount == step.get("amount"))
        )
        if not candidates:
            raise EntityNotInState(f"no committed {step['name']!r} instance for that owner")
        digest = candidates[0][1]
        if mode == "held":
            return withdraw_native_held(
                chain, owner, digest, self.world.chains[step["target"]].sc_id, receiver
            )
        return withdraw_foreign(chain, owner, digest, receiver)

    def _op_csw_redeem(self, index: int, step: dict) -> dict:
        package = self.withdrawals.get(step["withdrawal"])
        if package is None:
            return {
                "outcome": {"accepted": False, "reason": "EvidenceUnavailable"},
                "summary": f"csw redeem {step['withdrawal']!r}: the referenced withdrawal was never accepted",
            }
        label = self.world.label_by_sc_id(package.message.receiving_sc_id)
        chain = self.world.chains[label]
        try:
            tx = self._csw_redeem_tx(package)
        except (CswNotFound, MessageMismatch) as err:
            return {
                "outcome": {"accepted": False, "reason": "EvidenceUnavailable"},
                "summary": f"csw redeem {step['withdrawal']!r} on {label}: {err}",
            }
        pre = self._chain_dumps()
        verdict = chain.accept_csw_redeem(tx)
        self._atomic(index, "csw_redeem", pre, verdict.accepted)
        instance = _decode_instance(package.payload)
        if instance is not None:
            self._note(
                index, self.world.accountant.note_csw_redeem(label, instance, package.message, verdict.accepted)
            )
        result = {
            "outcome": self._verdict_dict(verdict),
            "summary": f"csw redeem {step['withdrawal']!r} on {label}",
        }
        if verdict.accepted:
            replay = chain.accept_csw_redeem(tx)
            result["replay"] = self._verdict_dict(replay)
            if replay.accepted:
                self.violations.append(f"step {index}: replay-safety: duplicate csw redeem accepted on {label}")
        return result

    def _op_notify(self, index: int, step: dict) -> dict:
        state = self.world.states[step["chain"]]
        try:
            ok = self._apply_notification(state, step)
        except ValueError as err:
            return {
                "outcome": {"accepted": False, "reason": "NotSupported"},
                "summary": f"notify {step['chain']}: {err}",
            }
        return {
            "outcome": {"accepted": ok, "reason": "Accepted" if ok else "NoMatchingRecord"},
            "summary": f"notify {step['chain']} of {step['name']} move {step['from']} -> {step['to']}",
        }

    def _apply_notification(self, state: MittoState, step: dict) -> bool:
        return state.apply_notification(
            self.world.chains[step["from"]].sc_id,
            self.world.chains[step["to"]].sc_id,
            step["name"],
            amount=step.get("amount"),
            token_id=step.get("token_id"),
        )

    def _op_assert(self, index: int, step: dict) -> dict:
        label = step["chain"]
        chain = self.world.chains[label]
        state = self.world.states[label]
        problems = []
        if "status" in step:
            actual = self.world.mainchain.record(chain.sc_id).status
            if actual != step["status"]:
                problems.append(f"status: expected {step['status']!r}, found {actual!r}")
        if "holdings" in step:
            expected: dict[tuple, int] = {}
            for h in step["holdings"]:
                if "token_id" in h:
                    key = (h["name"], h.get("owner", ""), "id", h["token_id"])
                    expected[key] = expected.get(key, 0) + 1
                else:
                    key = (h["name"], h.get("owner", ""), "amount")
                    expected[key] = expected.get(key, 0) + h["amount"]
            actual: dict[tuple, int] = {}
            for ti in state.s_tks.values():
                owner = next(
                    (n for n, kp in self.world._actors.items() if kp.public == ti.owner), ti.owner.hex()
                )
                if ti.fungibility:
                    key = (ti.token_name, owner, "amount")
                    actual[key] = actual.get(key, 0) + ti.amount
                else:
                    key = (ti.token_name, owner, "id", ti.token_id)
                    actual[key] = actual.get(key, 0) + 1
            if expected != actual:
                problems.append(
                    f"holdings: expected {sorted(expected.items())}, found {sorted(actual.items())}"
                )
        if "sent_records" in step:
            expected = sorted(
                (r["name"], self.world.chains[r["receiver"]].sc_id, r.get("amount", r.get("token_id")))
                for r in step["sent_records"]
            )
            actual_rows = sorted(
                (rec.token_name, rec.receiver_sc_id, rec.amount if rec.fungibility else rec.token_id)
                for rec in state.s_sent.values()
            )
            if expected != actual_rows:
                problems.append(f"sent_records: expected {expected}, found {actual_rows}")
        if problems:
            trace = json.dumps(
                {"chain": label, "problems": problems, "state": state.dump()}, indent=2, sort_keys=True
            )
            raise InvariantViolation(index, "assert", trace)
        return {
            "outcome": {"accepted": True, "reason": "Accepted"},
            "summary": f"assert on {label} held",
        }

    # -- main loop ---------------------------------------------------------------

    def run(self) -> dict:
        handlers = {
            "issue": self._op_issue,
            "send": self._op_send,
            "fabricate_send": self._op_fabricate_send,
            "close_epoch": self._op_close_epoch,
            "advance_mainchain": self._op_advance_mainchain,
            "cease_by_silence": self._op_cease_by_silence,
            "redeem": self._op_redeem,
            "csw": self._op_csw,
            "csw_redeem": self._op_csw_redeem,
            "notify": self._op_notify,
            "assert": self._op_assert,
        }
        for index, step in enumerate(self.scenario.steps):
            op = step["op"]
            try:
                entry = handlers[op](index, step)
            except InvariantViolation as err:
                self.failure = {"step": err.step, "invariant": err.invariant, "trace": err.trace}
                self.steps.append(
                    {"index": index, "op": op, "outcome": {"accepted": False, "reason": "AssertFailed"}}
                )
                break
            entry.update({"index": index, "op": op})
            if "expect" in step:
                self._check_expectation(index, step["expect"], entry["outcome"])
            self._note(index, self.world.accountant.check(self.world.snapshot_for_accountant()))
            self.steps.append(entry)
        return self._report()

    def _check_expectation(self, index: int, expect: dict, outcome: dict) -> None:
        for key, wanted in expect.items():
            found = outcome.get(key)
            if found != wanted:
                self.violations.append(
                    f"step {index}: expectation: {key} was {found!r}, scenario expects {wanted!r}"
                )

    def _report(self) -> dict:
        final = self.world.dump()
        deduped = sorted(set(self.violations))
        ok = (
            self.failure is None
            and (bool(deduped) == self.scenario.expect_violations)
        )
        return {
            "scenario": self.scenario.name,
            "seed": self.scenario.seed,
            "steps": self.steps,
            "violations": deduped,
            "expect_violations": self.scenario.expect_violations,
            "failure": self.failure,
            "final": final,
            "ok": ok,
        }


def run_scenario(scenario: Scenario) -> dict:
    return Runner(scenario).run()


def render_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _decode_instance(payload: bytes) -> TokenInstance | None:
    from .encoding import DecodeError
    from .tokens import decode_token_instance

    try:
        return decode_token_instance(payload)
    except (DecodeError, ValueError):
        return None
