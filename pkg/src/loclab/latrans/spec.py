"""JSON family specs.

``{"theory": "pure"|"mixed", "kind": "unitary"|"isometry"|"kraus"|"zoo",
"name": <zoo name>, "matrices": [<matrix JSON>, ...], "params": {...}}``
"""

from __future__ import annotations

from .. import linalg as la
from ..smt import Theory
from .family import TransFamily, lift_channel, lift_isometry, lift_unitary
from .zoo import ZOO, zoo

KINDS = ("unitary", "isometry", "kraus", "zoo")


def family_from_spec(spec: dict) -> TransFamily:
    if not isinstance(spec, dict):
        raise ValueError("family spec must be a JSON object")
    kind = spec.get("kind")
    if kind not in KINDS:
        raise ValueError(f"family spec kind must be one of {KINDS}, got {kind!r}")
    if kind == "zoo":
        name = spec.get("name")
        if not isinstance(name, str):
            raise ValueError("zoo family spec needs a string 'name'")
        params = spec.get("params") or {}
        family = zoo(name, **params)
    else:
        mats = spec.get("matrices")
        if not isinstance(mats, list) or not mats:
            raise ValueError("family spec needs a non-empty 'matrices' list")
        ms = [la.matrix_from_json(m) for m in mats]
        if kind == "kraus":
            family = lift_channel(ms)
        elif len(ms) != 1:
            raise ValueError(f"{kind} spec takes exactly one matrix")
        elif kind == "unitary":
            family = lift_unitary(ms[0])
        else:
            family = lift_isometry(ms[0])
    theory = spec.get("theory")
    if theory is not None and Theory(theory) is not family.theory:
        raise ValueError(f"spec declares theory {theory!r} but {kind} families are {family.theory.value}")
    return family


def family_to_spec(family: TransFamily) -> dict:
    if family.kind == "zoo":
        return {
            "theory": family.theory.value,
            "kind": "zoo",
            "name": family.name,
            "params": dict(family.params),
        }
    if family.kind in ("unitary", "isometry", "kraus"):
        return {
            "theory": family.theory.value,
            "kind": family.kind,
            "matrices": [la.matrix_to_json(m) for m in family.matrices],
        }
    raise ValueError(f"family of kind {family.kind!r} has no JSON spec")


def zoo_names() -> list[str]:
    return sorted(ZOO)
