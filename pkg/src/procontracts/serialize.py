"""JSON encodings of states, denotations, environments and contracts.

Output is deterministic: pairs are sorted by state index and keys are sorted.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Mapping

from .contracts import DenotContract
from .errors import SemanticError
from .lang import DomainConfig, Interface
from .relation import Denotation
from .semantics import ProcEnv


def denotation_to_json(d: Denotation) -> list[list[dict]]:
    return [[s, t] for s, t in d.state_pairs()]


def denotation_from_json(pairs: Any, domain: DomainConfig) -> Denotation:
    if not isinstance(pairs, list):
        raise SemanticError("a relation must be a list of [state, state] pairs")
    out = []
    for item in pairs:
        if not (isinstance(item, (list, tuple)) and len(item) == 2):
            raise SemanticError(f"malformed pair {item!r}")
        out.append((domain.index(item[0]), domain.index(item[1])))
    return Denotation.from_pairs(domain, out)


def env_to_json(env: ProcEnv) -> dict[str, list]:
    return {p: denotation_to_json(r) for p, r in env.items()}


def env_from_json(obj: Any, domain: DomainConfig) -> ProcEnv:
    if not isinstance(obj, Mapping):
        raise SemanticError("an environment must map procedure names to pair lists")
    return ProcEnv(domain, {str(p): denotation_from_json(v, domain) for p, v in obj.items()})


def contract_to_json(c: DenotContract) -> dict:
    return {
        "domain": c.domain.to_dict(),
        "interface": c.interface.to_dict(),
        "assume": env_to_json(c.assume),
        "guarantee": env_to_json(c.guarantee),
    }


def contract_from_json(obj: Any) -> DenotContract:
    try:
        domain = DomainConfig.from_dict(obj["domain"])
        assume = env_from_json(obj["assume"], domain)
        guarantee = env_from_json(obj["guarantee"], domain)
    except (KeyError, TypeError) as exc:
        raise SemanticError(f"malformed contract file: {exc}") from None
    iface = obj.get("interface")
    if iface is not None:
        declared = Interface(frozenset(iface.get("required", [])), frozenset(iface.get("provided", [])))
        if declared != Interface(assume.scope, guarantee.scope):
            raise SemanticError("contract interface disagrees with its assume/guarantee names")
    return DenotContract.make(assume, guarantee)


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def load_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SemanticError(f"{path}: invalid JSON ({exc})") from None


def digest(paths) -> dict[str, str]:
    """sha256 of each input file, keyed by the path as given."""
    return {str(p): hashlib.sha256(Path(p).read_bytes()).hexdigest() for p in paths}
