"""Scenario files: schema, validation, loading.

A scenario is a JSON document declaring a chain roster and an ordered list
of steps. Validation is strict and front-loaded so that a running scenario
never trips over a missing field halfway through; every complaint names
the offending step and field.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .tokens import (
    VARIANT_ISSUER_NOTIFICATION,
    VARIANT_NO_RECEIVER_TRACKING,
    VARIANT_NO_SENT_RECORDS,
    VARIANT_STANDARD,
)


class ParseError(Exception):
    """Scenario file rejected; the message names the field at fault."""


FAULTY_MODES = (
    VARIANT_NO_RECEIVER_TRACKING,
    VARIANT_NO_SENT_RECORDS,
    VARIANT_ISSUER_NOTIFICATION,
)

STEP_OPS = (
    "issue",
    "send",
    "fabricate_send",
    "close_epoch",
    "advance_mainchain",
    "cease_by_silence",
    "redeem",
    "csw",
    "csw_redeem",
    "notify",
    "assert",
)

CSW_MODES = ("held", "foreign", "sent_record")


@dataclass(frozen=True)
class ChainSpec:
    label: str
    epoch_length: int
    byzantine: bool = False
    faulty_mode: str | None = None
    issuances: tuple[dict, ...] = ()

    @property
    def variant(self) -> str:
        return self.faulty_mode or VARIANT_STANDARD


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    chains: tuple[ChainSpec, ...]
    steps: tuple[dict, ...]
    expect_violations: bool = False

    def chain(self, label: str) -> ChainSpec:
        for spec in self.chains:
            if spec.label == label:
                return spec
        raise KeyError(label)


def _need(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    value = obj[key]
    if kind is int and isinstance(value, bool):
        raise ParseError(f"{where}: field {key!r} must be an integer, got a boolean")
    if not isinstance(value, kind):
        raise ParseError(f"{where}: field {key!r} must be {kind.__name__}, got {type(value).__name__}")
    return value


def _issuance(obj: dict, where: str) -> dict:
    name = _need(obj, "name", str, where)
    fungible = _need(obj, "fungible", bool, where)
    owner = _need(obj, "owner", str, where)
    out = {"name": name, "fungible": fungible, "owner": owner, "data": obj.get("data", name)}
    if fungible:
        amount = _need(obj, "amount", int, where)
        if amount <= 0:
            raise ParseError(f"{where}: field 'amount' must be positive")
        out["amount"] = amount
        if "token_id" in obj:
            raise ParseError(f"{where}: fungible issuance cannot carry 'token_id'")
    else:
        out["token_id"] = _need(obj, "token_id", int, where)
        if "amount" in obj:
            raise ParseError(f"{where}: non-fungible issuance cannot carry 'amount'")
    return out


def _chain_spec(obj: dict, index: int) -> ChainSpec:
    where = f"chains[{index}]"
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: must be an object")
    unknown = set(obj) - {"label", "epoch_length", "byzantine", "faulty_mode", "issuances"}
    if unknown:
        raise ParseError(f"{where}: unknown field(s) {', '.join(sorted(unknown))}")
    label = _need(obj, "label", str, where)
    epoch_length = _need(obj, "epoch_length", int, where)
    if epoch_length < 2:
        raise ParseError(f"{where}: field 'epoch_length' must be at least 2")
    faulty = obj.get("faulty_mode")
    if faulty is not None and faulty not in FAULTY_MODES:
        raise ParseError(
            f"{where}: unknown faulty_mode {faulty!r}, expected one of {', '.join(FAULTY_MODES)}"
        )
    issuances = tuple(
        _issuance(entry, f"{where}.issuances[{i}]") for i, entry in enumerate(obj.get("issuances", []))
    )
    return ChainSpec(
        label=label,
        epoch_length=epoch_length,
        byzantine=bool(obj.get("byzantine", False)),
        faulty_mode=faulty,
        issuances=issuances,
    )


_STEP_FIELDS = {
    "issue": {"chain": str, "name": str, "fungible": bool, "owner": str},
    "send": {"from": str, "to": str, "name": str, "owner": str, "receiver": str},
    "fabricate_send": {
        "from": str,
        "to": str,
        "name": str,
        "fungible": bool,
        "issuer": str,
        "owner": str,
        "receiver": str,
    },
    "close_epoch": {},
    "advance_mainchain": {"blocks": int},
    "cease_by_silence": {"chain": str},
    "redeem": {"send": str},
    "csw": {"id": str, "mode": str, "chain": str, "owner": str, "receiver": str},
    "csw_redeem": {"withdrawal": str},
    "notify": {"chain": str, "from": str, "to": str, "name": str},
    "assert": {"chain": str},
}


def _validate_step(step: dict, index: int, labels: set[str], send_ids: set[str], csw_ids: set[str]):
    where = f"steps[{index}]"
    if not isinstance(step, dict):
        raise ParseError(f"{where}: must be an object")
    op = _need(step, "op", str, where)
    if op not in STEP_OPS:
        raise ParseError(f"{where}: unknown op {op!r}, expected one of {', '.join(STEP_OPS)}")
    for key, kind in _STEP_FIELDS[op].items():
        _need(step, key, kind, where)
    for key in ("chain", "from", "to", "issuer"):
        if key in step and op != "notify":
            if step[key] not in labels:
                raise ParseError(f"{where}: field {key!r} references undeclared chain {step[key]!r}")
    if op == "notify":
        for key in ("chain", "from", "to"):
            if step[key] not in labels:
                raise ParseError(f"{where}: field {key!r} references undeclared chain {step[key]!r}")
    if op == "issue":
        _issuance(step, where)
        if step["chain"] not in labels:
            raise ParseError(f"{where}: field 'chain' references undeclared chain {step['chain']!r}")
    if op in ("send", "fabricate_send"):
        if step["from"] == step["to"] and op == "send" and not step.get("expect"):
            raise ParseError(f"{where}: self-send must declare its expected rejection")
        if "amount" in step and "token_id" in step:
            raise ParseError(f"{where}: give either 'amount' or 'token_id', not both")
        if "id" in step:
            if not isinstance(step["id"], str):
                raise ParseError(f"{where}: field 'id' must be str")
            if step["id"] in send_ids:
                raise ParseError(f"{where}: duplicate send id {step['id']!r}")
            send_ids.add(step["id"])
    if op == "fabricate_send" and step["fungible"] and "amount" not in step:
        raise ParseError(f"{where}: missing field 'amount'")
    if op == "fabricate_send" and not step["fungible"] and "token_id" not in step:
        raise ParseError(f"{where}: missing field 'token_id'")
    if op == "close_epoch":
        chains = step.get("chains", "all")
        if chains != "all":
            if not isinstance(chains, list) or not chains:
                raise ParseError(f"{where}: field 'chains' must be \"all\" or a non-empty list")
            for label in chains:
                if label not in labels:
                    raise ParseError(f"{where}: field 'chains' references undeclared chain {label!r}")
    if op == "advance_mainchain" and step["blocks"] < 1:
        raise ParseError(f"{where}: field 'blocks' must be positive")
    if op == "redeem" and step["send"] not in send_ids:
        raise ParseError(f"{where}: field 'send' references unknown send id {step['send']!r}")
    if op == "csw":
        if step["mode"] not in CSW_MODES:
            raise ParseError(f"{where}: unknown mode {step['mode']!r}, expected one of {', '.join(CSW_MODES)}")
        if step["id"] in csw_ids:
            raise ParseError(f"{where}: duplicate csw id {step['id']!r}")
        csw_ids.add(step["id"])
        if step["mode"] in ("held", "foreign") and "name" not in step:
            raise ParseError(f"{where}: missing field 'name'")
        if step["mode"] == "held" and "target" not in step:
            raise ParseError(f"{where}: missing field 'target'")
        if step["mode"] == "sent_record":
            for key in ("holder", "return_send", "target"):
                if key not in step:
                    raise ParseError(f"{where}: missing field {key!r}")
            if step["return_send"] not in send_ids:
                raise ParseError(
                    f"{where}: field 'return_send' references unknown send id {step['return_send']!r}"
                )
    if op == "csw_redeem" and step["withdrawal"] not in csw_ids:
        raise ParseError(f"{where}: field 'withdrawal' references unknown csw id {step['withdrawal']!r}")
    if "expect" in step:
        expect = step["expect"]
        if not isinstance(expect, dict) or not expect:
            raise ParseError(f"{where}: field 'expect' must be a non-empty object")
        for key in expect:
            if key not in ("accepted", "reason", "rule"):
                raise ParseError(f"{where}: unknown expect field {key!r}")


def parse_scenario(obj, source: str = "<memory>") -> Scenario:
    if not isinstance(obj, dict):
        raise ParseError(f"{source}: top level must be an object")
    name = _need(obj, "name", str, source)
    seed = _need(obj, "seed", int, source)
    if not 0 <= seed < 2**64:
        raise ParseError(f"{source}: field 'seed' must fit in 64 bits")
    raw_chains = _need(obj, "chains", list, source)
    if not raw_chains:
        raise ParseError(f"{source}: field 'chains' must declare at least one chain")
    chains = tuple(_chain_spec(entry, i) for i, entry in enumerate(raw_chains))
    labels = [spec.label for spec in chains]
    if len(set(labels)) != len(labels):
        raise ParseError(f"{source}: duplicate chain labels in 'chains'")
    raw_steps = _need(obj, "steps", list, source)
    send_ids: set[str] = set()
    csw_ids: set[str] = set()
    for i, step in enumerate(raw_steps):
        _validate_step(step, i, set(labels), send_ids, csw_ids)
    unknown = set(obj) - {"name", "seed", "chains", "steps", "expect_violations"}
    if unknown:
        raise ParseError(f"{source}: unknown top-level field {sorted(unknown)[0]!r}")
    return Scenario(
        name=name,
        seed=seed,
        chains=chains,
        steps=tuple(raw_steps),
        expect_violations=bool(obj.get("expect_violations", False)),
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ParseError(f"{path}: {err.strerror or err}") from err
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"{path}:{err.lineno}: {err.msg}") from err
    return parse_scenario(obj, source=str(path))
