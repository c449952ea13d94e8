"""Instance files.

Two formats:

* canonical JSON document:
    {"n": 5,
     "edges": [{"from": 1, "to": 2, "weight": 1.0}, ...],
     "disturbances": [1], "targets": ["v4"],
     "inputs": [...], "outputs": [...]}     # inputs/outputs optional
  Node ids may be integers or "v<k>" labels; omitted weights default
  to 1.0.

* whitespace edge list:
    n 5
    1 2 1.0
    2 3
    D: v1
    T: v4
    B: v2          # optional, same for C:

Both round-trip exactly (weights are written with repr precision).
"""

from __future__ import annotations

import json
from pathlib import Path

from netdecouple.errors import FileFormatError
from netdecouple.network import Network, NodeSet, ProblemInstance


def _node_id(value, n: int) -> int:
    if isinstance(value, str):
        text = value.strip()
        if text.lower().startswith("v"):
            text = text[1:]
        if not text.lstrip("-").isdigit():
            raise FileFormatError(f"bad node id {value!r}")
        value = int(text)
    if not isinstance(value, int) or isinstance(value, bool):
        raise FileFormatError(f"bad node id {value!r}")
    if not 1 <= value <= n:
        raise FileFormatError(f"node id {value} outside 1..{n}")
    return value


def _node_list(values, n: int) -> NodeSet:
    if not isinstance(values, (list, tuple)):
        raise FileFormatError(f"expected a list of node ids, got {values!r}")
    return NodeSet.of([_node_id(v, n) for v in values], n)


def loads_instance(text: str) -> ProblemInstance:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _parse_json(stripped)
    return _parse_edgelist(text)


def load_instance(path: str | Path) -> ProblemInstance:
    return loads_instance(Path(path).read_text())


def _parse_json(text: str) -> ProblemInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FileFormatError("top-level JSON value must be an object")
    try:
        n = int(doc["n"])
        raw_edges = doc["edges"]
        raw_d = doc["disturbances"]
        raw_t = doc["targets"]
    except KeyError as exc:
        raise FileFormatError(f"missing field {exc.args[0]!r}") from None
    edges = []
    for item in raw_edges:
        if not isinstance(item, dict) or "from" not in item or "to" not in item:
            raise FileFormatError(f"bad edge entry {item!r}")
        edges.append(
            (
                _node_id(item["from"], n),
                _node_id(item["to"], n),
                float(item.get("weight", 1.0)),
            )
        )
    try:
        net = Network(n, tuple(edges))
    except ValueError as exc:
        raise FileFormatError(str(exc)) from None
    inputs = _node_list(doc["inputs"], n) if "inputs" in doc else None
    outputs = _node_list(doc["outputs"], n) if "outputs" in doc else None
    return ProblemInstance(
        network=net,
        disturbances=_node_list(raw_d, n),
        targets=_node_list(raw_t, n),
        inputs=inputs,
        outputs=outputs,
    )


_ROLE_KEYS = {"D": "disturbances", "T": "targets", "B": "inputs", "C": "outputs"}


def _parse_edgelist(text: str) -> ProblemInstance:
    n = None
    edges = []
    roles: dict[str, list] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "n":
                raise FileFormatError(f"line {lineno}: expected header 'n <count>'")
            try:
                n = int(parts[1])
            except ValueError:
                raise FileFormatError(f"line {lineno}: bad node count") from None
            continue
        key = line.split(":", 1)[0].strip()
        if key in _ROLE_KEYS and ":" in line:
            ids = line.split(":", 1)[1].split()
            roles[key] = [_node_id(tok, n) for tok in ids]
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise FileFormatError(f"line {lineno}: expected 'tail head [weight]'")
        try:
            weight = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise FileFormatError(f"line {lineno}: bad weight {parts[2]!r}") from None
        edges.append((_node_id(parts[0], n), _node_id(parts[1], n), weight))
    if n is None:
        raise FileFormatError("missing header 'n <count>'")
    for role in ("D", "T"):
        if role not in roles:
            raise FileFormatError(f"missing role line '{role}: ...'")
    try:
        net = Network(n, tuple(edges))
    except ValueError as exc:
        raise FileFormatError(str(exc)) from None
    return ProblemInstance(
        network=net,
        disturbances=NodeSet.of(roles["D"], n),
        targets=NodeSet.of(roles["T"], n),
        inputs=NodeSet.of(roles["B"], n) if "B" in roles else None,
        outputs=NodeSet.of(roles["C"], n) if "C" in roles else None,
    )


def dumps_instance(inst: ProblemInstance, fmt: str = "json") -> str:
    if fmt == "json":
        doc = {
            "n": inst.network.n,
            "edges": [
                {"from": t, "to": h, "weight": w} for t, h, w in inst.network.edges
            ],
            "disturbances": list(inst.disturbances),
            "targets": list(inst.targets),
        }
        if inst.inputs is not None:
            doc["inputs"] = list(inst.inputs)
        if inst.outputs is not None:
            doc["outputs"] = list(inst.outputs)
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "edgelist":
        lines = [f"n {inst.network.n}"]
        lines += [f"{t} {h} {w!r}" for t, h, w in inst.network.edges]
        lines.append("D: " + " ".join(str(v) for v in inst.disturbances))
        lines.append("T: " + " ".join(str(v) for v in inst.targets))
        if inst.inputs is not None:
            lines.append("B: " + " ".join(str(v) for v in inst.inputs))
        if inst.outputs is not None:
            lines.append("C: " + " ".join(str(v) for v in inst.outputs))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def save_instance(path: str | Path, inst: ProblemInstance, fmt: str | None = None) -> None:
    if fmt is None:
        fmt = "json" if str(path).endswith(".json") else "edgelist"
    Path(path).write_text(dumps_instance(inst, fmt))
