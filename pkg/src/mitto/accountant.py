"""Global invariant checking over raw state dumps.

The accountant is the harness's independent bookkeeper. It watches the
event stream (issues, sends, redeems, withdrawal redeems) to maintain its
own counters, and re-derives the balance-sheet invariants from the JSON
state dumps each step, never from the token module's internal maps. A
disagreement between the two bookkeepers is exactly what it exists to
catch.

Scope: tokens issued by non-byzantine chains. A byzantine issuer's books
are garbage by construction, so nothing is promised about them. Chains
running a deliberately weakened rule variant stay tracked; only the
invariants their weakening makes structurally unsatisfiable are waived
(a chain that keeps no sent records cannot balance held + recorded
against issued), so the checks the weakening is supposed to endanger
still fire. That is the point of running those variants at all.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .hashing import Digest
from .messages import CscpMessage, message_digest
from .proofs import csw_nullifier
from .tokens import (
    VARIANT_NO_RECEIVER_TRACKING,
    VARIANT_NO_SENT_RECORDS,
    VARIANT_STANDARD,
    TokenInstance,
)

ISSUER_EQUALITY = "issuer-equality"
COVERAGE = "sent-record-coverage"
NFT_UNIQUENESS = "nft-uniqueness"
CONSERVATION = "conservation"
ROUTING = "routing-restriction"
REPLAY = "replay-safety"
OVER_RETURN = "over-return"


@dataclass
class ChainInfo:
    sc_id: int
    byzantine: bool = False
    variant: str = VARIANT_STANDARD

    @property
    def honest(self) -> bool:
        return not self.byzantine and self.variant == VARIANT_STANDARD


@dataclass
class IssueInfo:
    issuer_label: str
    fungible: bool
    total: int = 0


def _units(entry: dict) -> int:
    return entry["amount"] if entry.get("fungibility") else 1


@dataclass
class Accountant:
    chains: dict[str, ChainInfo] = field(default_factory=dict)
    issues: dict[str, IssueInfo] = field(default_factory=dict)
    sent_units: dict[tuple[str, int], int] = field(default_factory=dict)
    returned_units: dict[tuple[str, int], int] = field(default_factory=dict)
    csw_credit: dict[tuple[int, str], int] = field(default_factory=dict)
    accepted_redeems: dict[str, set[Digest]] = field(default_factory=dict)
    accepted_csw_redeems: dict[str, set[Digest]] = field(default_factory=dict)

    # -- event stream ----------------------------------------------------------

    def register_chain(self, label: str, sc_id: int, byzantine: bool, variant: str) -> None:
        self.chains[label] = ChainInfo(sc_id=sc_id, byzantine=byzantine, variant=variant)
        self.accepted_redeems[label] = set()
        self.accepted_csw_redeems[label] = set()

    def label_of(self, sc_id: int) -> str | None:
        for label, info in self.chains.items():
            if info.sc_id == sc_id:
                return label
        return None

    def note_issue(self, label: str, instance: TokenInstance) -> None:
        info = self.issues.setdefault(
            instance.token_name,
            IssueInfo(issuer_label=label, fungible=instance.fungibility),
        )
        info.total += instance.amount if instance.fungibility else 1

    def _tracked(self, name: str) -> bool:
        info = self.issues.get(name)
        return info is not None and not self.chains[info.issuer_label].byzantine

    def note_send(self, label: str, instance: TokenInstance, message: CscpMessage, accepted: bool) -> list[str]:
        """Record an ordinary (non-fabricated) send attempt."""
        violations = []
        if not accepted or not self._tracked(instance.token_name):
            return violations
        issuer_sc = self.chains[self.issues[instance.token_name].issuer_label].sc_id
        if message.sending_sc_id != issuer_sc and message.receiving_sc_id != issuer_sc:
            violations.append(
                f"{ROUTING}: chain {label} sent foreign {instance.token_name!r} "
                f"to {message.receiving_sc_id}, issuer is {issuer_sc}"
            )
        if message.sending_sc_id == issuer_sc:
            key = (instance.token_name, message.receiving_sc_id)
            self.sent_units[key] = self.sent_units.get(key, 0) + _units_of(instance)
        return violations

    def note_redeem(self, label: str, instance: TokenInstance, message: CscpMessage, accepted: bool) -> list[str]:
        violations = []
        if not accepted:
            return violations
        digest = message_digest(message)
        if digest in self.accepted_redeems[label]:
            violations.append(f"{REPLAY}: chain {label} accepted message {digest.hex()} twice")
        self.accepted_redeems[label].add(digest)
        violations.extend(self._count_return(label, instance, message))
        return violations

    def note_csw_redeem(self, label: str, instance: TokenInstance, message: CscpMessage, accepted: bool) -> list[str]:
        violations = []
        if not accepted:
            return violations
        digest = message_digest(message)
        if digest in self.accepted_csw_redeems[label] or digest in self.accepted_redeems[label]:
            violations.append(f"{REPLAY}: chain {label} accepted withdrawn message {digest.hex()} twice")
        self.accepted_csw_redeems[label].add(digest)
        self.accepted_redeems[label].add(digest)
        if self._tracked(instance.token_name):
            issuer_sc = self.chains[self.issues[instance.token_name].issuer_label].sc_id
            if self.chains[label].sc_id != issuer_sc:
                key = (self.chains[label].sc_id, instance.token_name)
                self.csw_credit[key] = self.csw_credit.get(key, 0) + _units_of(instance)
        violations.extend(self._count_return(label, instance, message))
        return violations

    def _count_return(self, label: str, instance: TokenInstance, message: CscpMessage) -> list[str]:
        if not self._tracked(instance.token_name):
            return []
        issuer_label = self.issues[instance.token_name].issuer_label
        if label != issuer_label:
            return []
        key = (instance.token_name, message.sending_sc_id)
        self.returned_units[key] = self.returned_units.get(key, 0) + _units_of(instance)
        if self.returned_units[key] > self.sent_units.get(key, 0):
            return [
                f"{OVER_RETURN}: issuer {issuer_label} accepted {self.returned_units[key]} "
                f"units of {instance.token_name!r} back from chain {message.sending_sc_id}, "
                f"only {self.sent_units.get(key, 0)} were sent there"
            ]
        return []

    # -- balance sheet from dumps ------------------------------------------------

    def check(self, snapshot: dict[str, dict]) -> list[str]:
        """Re-derive the standing invariants from raw state dumps.

        ``snapshot`` maps chain label to::

            {"status": "alive"|"ceased"|"pending",
             "live": <MittoState dump>,
             "frozen": <final committed dump or None>,
             "used_nullifiers": set of hex strings}
        """
        violations = []
        # A byzantine chain's dump is a self-report nobody vouches for; its
        # claimed holdings stay off the balance sheet. What it managed to
        # push INTO honest chains is counted through the event stream.
        books = {
            label: self._effective_book(label, entry)
            for label, entry in snapshot.items()
            if not self.chains[label].byzantine
        }

        for name, info in self.issues.items():
            if not self._tracked(name):
                continue
            issuer = info.issuer_label
            issuer_sc = self.chains[issuer].sc_id
            variant = self.chains[issuer].variant
            held = {label: _held_units(book, name) for label, book in books.items()}
            records = _record_units(books[issuer], name)

            if snapshot[issuer]["status"] == "alive" and variant != VARIANT_NO_SENT_RECORDS:
                recorded_total = sum(records.values())
                if held[issuer] + recorded_total != info.total:
                    violations.append(
                        f"{ISSUER_EQUALITY}: {name!r} issuer {issuer} holds {held[issuer]} "
                        f"and records {recorded_total}, issued {info.total}"
                    )

            if variant not in (VARIANT_NO_SENT_RECORDS, VARIANT_NO_RECEIVER_TRACKING):
                for label, book in books.items():
                    if label == issuer:
                        continue
                    sc_id = self.chains[label].sc_id
                    allowance = records.get(sc_id, 0) + self.csw_credit.get((sc_id, name), 0)
                    if held[label] > allowance:
                        violations.append(
                            f"{COVERAGE}: chain {label} holds {held[label]} of {name!r}, "
                            f"issuer records allow {allowance}"
                        )

            if sum(held.values()) > info.total:
                violations.append(
                    f"{CONSERVATION}: {sum(held.values())} units of {name!r} exist, "
                    f"issued {info.total}"
                )

            if not info.fungible:
                seen: dict[int, str] = {}
                for label, book in books.items():
                    for entry in book.get("s_tks", []):
                        if entry["token_name"] != name:
                            continue
                        token_id = entry["token_id"]
                        if token_id in seen:
                            violations.append(
                                f"{NFT_UNIQUENESS}: {name!r} id {token_id} live on both "
                                f"{seen[token_id]} and {label}"
                            )
                        seen[token_id] = label
        return violations

    def _effective_book(self, label: str, entry: dict) -> dict:
        """What a chain truly holds: live state while alive, the final
        committed state minus already-withdrawn entities once ceased."""
        if entry["status"] != "ceased":
            return entry["live"]
        frozen = entry["frozen"]
        if frozen is None:
            return {"s_tks": [], "s_sent": []}
        sc_id = self.chains[label].sc_id
        used = entry["used_nullifiers"]
        kept = [
            e
            for e in frozen.get("s_tks", [])
            if csw_nullifier(sc_id, bytes.fromhex(e["digest"])).hex() not in used
        ]
        return {"s_tks": kept, "s_sent": frozen.get("s_sent", [])}


def _units_of(instance: TokenInstance) -> int:
    return instance.amount if instance.fungibility else 1


def _held_units(book: dict, name: str) -> int:
    return sum(_units(e) for e in book.get("s_tks", []) if e["token_name"] == name)


def _record_units(book: dict, name: str) -> dict[int, int]:
    out: dict[int, int] = {}
    for entry in book.get("s_sent", []):
        if entry["token_name"] != name:
            continue
        out[entry["receiver_sc_id"]] = out.get(entry["receiver_sc_id"], 0) + _units(entry)
    return out
