"""Instance files: JSON in, JSON out.

Numbers may be JSON numbers or ``"p/q"`` strings; both load as exact
``Fraction`` values (a float literal such as ``0.3`` becomes ``3/10``).
The layout is documented in docs/instance_schema.md.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import jsonschema

from .errors import InvalidInstance
from .matroids import GraphicMatroid, Matchoid, Matroid, PartitionMatroid, TransversalMatroid
from .model import Hypergraph, IndependenceSystem, WeightDistribution, WeightFunction

_NUM = {"oneOf": [{"type": "number"}, {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}]}
_IDS = {"type": "array", "items": {"type": "integer", "minimum": 0}}

_MATROID = {
    "type": "object",
    "required": ["kind"],
    "oneOf": [
        {"properties": {"kind": {"const": "partition"}, "parts": {"type": "array", "items": _IDS}},
         "required": ["parts"]},
        {"properties": {"kind": {"const": "graphic"}, "n_vertices": {"type": "integer", "minimum": 0},
                        "edges": {"type": "array", "items": {**_IDS, "minItems": 2, "maxItems": 2}}},
         "required": ["n_vertices", "edges"]},
        {"properties": {"kind": {"const": "transversal"}, "n_right": {"type": "integer", "minimum": 0},
                        "adjacency": {"type": "array", "items": _IDS}},
         "required": ["n_right", "adjacency"]},
    ],
}

SCHEMA = {
    "type": "object",
    "required": ["system", "agents", "distributions"],
    "properties": {
        "system": {
            "type": "object",
            "required": ["type"],
            "oneOf": [
                {"properties": {"type": {"const": "hypergraph"}, "n_nodes": {"type": "integer", "minimum": 0},
                                "edges": {"type": "array", "items": {**_IDS, "minItems": 1}}},
                 "required": ["n_nodes", "edges"]},
                {"properties": {"type": {"const": "matroid"}, "matroid": _MATROID}, "required": ["matroid"]},
                {"properties": {"type": {"const": "matchoid"}, "ground_size": {"type": "integer", "minimum": 0},
                                "components": {"type": "array", "items": {
                                    "type": "object", "required": ["matroid", "active"],
                                    "properties": {"matroid": _MATROID, "active": _IDS}}}},
                 "required": ["ground_size", "components"]},
            ],
        },
        "agents": {"type": "integer", "minimum": 1},
        "distributions": {
            "type": "array", "minItems": 1,
            "items": {"type": "array", "minItems": 1, "items": {
                "type": "object", "required": ["weights"],
                "properties": {
                    "p": _NUM,
                    "weights": {"type": "array", "items": {
                        "type": "object", "required": ["element", "w"],
                        "properties": {"element": {"type": "integer", "minimum": 0}, "w": _NUM}}},
                }}},
        },
    },
}


@dataclass
class Instance:
    system: IndependenceSystem
    distributions: list      # one WeightDistribution per agent, or one shared
    agents: int

    @property
    def shared(self) -> bool:
        return len(self.distributions) == 1 and self.agents > 1

    def dists(self) -> dict:
        if len(self.distributions) == 1:
            return {a: self.distributions[0] for a in range(self.agents)}
        return dict(enumerate(self.distributions))


def _num(v) -> Fraction:
    if isinstance(v, str):
        return Fraction(v.replace(" ", ""))
    if isinstance(v, float):
        return Fraction(repr(v))
    return Fraction(v)


def _fmt(v):
    """Integers stay integers, other rationals become ``"p/q"``."""
    v = Fraction(v)
    return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def matroid_from_json(d) -> Matroid:
    kind = d["kind"]
    if kind == "partition":
        return PartitionMatroid(d["parts"])
    if kind == "graphic":
        return GraphicMatroid(d["n_vertices"], [tuple(e) for e in d["edges"]])
    return TransversalMatroid(d["n_right"], d["adjacency"])


def matroid_to_json(mat: Matroid) -> dict:
    if isinstance(mat, PartitionMatroid):
        return {"kind": "partition", "parts": [list(p) for p in mat.parts]}
    if isinstance(mat, GraphicMatroid):
        return {"kind": "graphic", "n_vertices": mat.n_vertices, "edges": [list(e) for e in mat.edges]}
    if isinstance(mat, TransversalMatroid):
        return {"kind": "transversal", "n_right": mat.n_right, "adjacency": [list(a) for a in mat.adj]}
    raise InvalidInstance(f"cannot serialise {type(mat).__name__}")


def system_from_json(d) -> IndependenceSystem:
    kind = d["type"]
    if kind == "hypergraph":
        return Hypergraph(d["n_nodes"], d["edges"])
    if kind == "matroid":
        return matroid_from_json(d["matroid"])
    return Matchoid(d["ground_size"], [(matroid_from_json(c["matroid"]), c["active"])
                                       for c in d["components"]])


def system_to_json(system) -> dict:
    if isinstance(system, Hypergraph):
        return {"type": "hypergraph", "n_nodes": system.n_nodes,
                "edges": [sorted(system.edge_nodes(e)) for e in range(system.ground_size)]}
    if isinstance(system, Matchoid):
        return {"type": "matchoid", "ground_size": system.ground_size,
                "components": [{"matroid": matroid_to_json(m), "active": list(a)}
                               for m, a in system.components]}
    return {"type": "matroid", "matroid": matroid_to_json(system)}


def distribution_from_json(atoms) -> WeightDistribution:
    if all("p" not in a for a in atoms):
        probs = [Fraction(1, len(atoms))] * len(atoms)
    elif all("p" in a for a in atoms):
        probs = [_num(a["p"]) for a in atoms]
    else:
        raise InvalidInstance("give p on every atom of a distribution or on none")
    wfs = []
    for a in atoms:
        pairs = [(w["element"], _num(w["w"])) for w in a["weights"]]
        if len({e for e, _ in pairs}) != len(pairs):
            raise InvalidInstance("an atom lists the same element twice")
        wfs.append(WeightFunction(pairs))
    return WeightDistribution(tuple(zip(probs, wfs)))


def distribution_to_json(dist: WeightDistribution) -> list:
    return [{"p": _fmt(p), "weights": [{"element": e, "w": _fmt(wf[e])} for e in wf.support()]}
            for p, wf in dist.atoms]


def instance_from_json(data) -> Instance:
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InvalidInstance(f"instance file invalid at {where}: {exc.message}") from None
    system = system_from_json(data["system"])
    dists = [distribution_from_json(atoms) for atoms in data["distributions"]]
    m = data["agents"]
    if len(dists) not in (1, m):
        raise InvalidInstance(f"{len(dists)} distributions for {m} agents; give 1 (shared) or {m}")
    for d in dists:
        system.check_elements(d.support_elements())
    return Instance(system, dists, m)


def instance_to_json(inst: Instance) -> dict:
    return {"system": system_to_json(inst.system), "agents": inst.agents,
            "distributions": [distribution_to_json(d) for d in inst.distributions]}


def load_instance(path) -> Instance:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInstance(f"{path}: not JSON ({exc})") from None
    return instance_from_json(data)


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_json(inst), indent=1) + "\n")


def jsonable(obj):
    """Fractions to ``"p/q"`` strings, numpy scalars to Python, recursively."""
    if isinstance(obj, Fraction):
        return _fmt(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    if hasattr(obj, "item"):
        return obj.item()
    return obj
