"""JSON (de)serialization of systems, sum instances and walks.

Every rational is written as a ``"p/q"`` or ``"p"`` string.  Each instance
document carries a ``kind`` so that one loader handles all of them.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

from ..errors import ContractError
from ..polyhedron import StandardFormSystem, Walk
from ..ratmat import RationalMatrix, format_rational, parse_rational
from ..threesum import ThreeSumInstance
from ..twosum import TwoSumInstance


def _vec(values) -> list[str]:
    return [format_rational(v) for v in values]


def _mat(M: RationalMatrix) -> list[list[str]]:
    return [_vec(r) for r in M]


def _parse_vec(values, where: str) -> tuple:
    if not isinstance(values, list):
        raise ContractError(f"{where}: expected a list of rationals")
    try:
        return tuple(parse_rational(v) for v in values)
    except ValueError as exc:
        raise ContractError(f"{where}: {exc}") from None


def _parse_mat(rows, where: str, cols: int | None = None) -> RationalMatrix:
    if not isinstance(rows, list):
        raise ContractError(f"{where}: expected a list of rows")
    parsed = [_parse_vec(r, f"{where}[{i}]") for i, r in enumerate(rows)]
    try:
        return RationalMatrix(parsed, cols=cols)
    except ValueError as exc:
        raise ContractError(f"{where}: {exc}") from None


def _field(doc: dict, key: str, where: str):
    if key not in doc:
        raise ContractError(f"{where}: missing field {key!r}")
    return doc[key]


def system_to_json(S: StandardFormSystem) -> dict:
    return {"kind": "system", "name": S.name, "A": _mat(S.A), "b": _vec(S.b)}


def system_from_json(doc: dict, where: str = "system") -> StandardFormSystem:
    b = _parse_vec(_field(doc, "b", where), f"{where}.b")
    rows = _field(doc, "A", where)
    cols = len(rows[0]) if rows else doc.get("cols", 0)
    A = _parse_mat(rows, f"{where}.A", cols)
    if A.rows != len(b):
        raise ContractError(f"{where}: A has {A.rows} rows but b has {len(b)} entries")
    return StandardFormSystem(A, b, doc.get("name", ""))


def two_sum_to_json(inst: TwoSumInstance) -> dict:
    return {"kind": "two_sum", "name": inst.name, "A": _mat(inst.A), "a_row": _vec(inst.a_row),
            "b_row": _vec(inst.b_row), "B": _mat(inst.B), "c_A": _vec(inst.c_A),
            "c_shared": format_rational(inst.c_shared), "c_B": _vec(inst.c_B),
            "split": _vec(inst.split)}


def two_sum_from_json(doc: dict, where: str = "two_sum") -> TwoSumInstance:
    a = _parse_vec(_field(doc, "a_row", where), f"{where}.a_row")
    b = _parse_vec(_field(doc, "b_row", where), f"{where}.b_row")
    try:
        c = parse_rational(_field(doc, "c_shared", where))
    except ValueError as exc:
        raise ContractError(f"{where}.c_shared: {exc}") from None
    return TwoSumInstance(
        _parse_mat(_field(doc, "A", where), f"{where}.A", len(a)), a, b,
        _parse_mat(_field(doc, "B", where), f"{where}.B", len(b)),
        _parse_vec(_field(doc, "c_A", where), f"{where}.c_A"), c,
        _parse_vec(_field(doc, "c_B", where), f"{where}.c_B"),
        _parse_vec(doc["split"], f"{where}.split") if "split" in doc else None,
        doc.get("name", ""))


def three_sum_to_json(inst: ThreeSumInstance) -> dict:
    doc = {"kind": "three_sum", "name": inst.name, "A": _mat(inst.A),
           "a1_row": _vec(inst.a1_row), "a2_row": _vec(inst.a2_row),
           "b1_row": _vec(inst.b1_row), "b2_row": _vec(inst.b2_row), "B": _mat(inst.B),
           "c_A": _vec(inst.c_A), "c1_shared": format_rational(inst.c1_shared),
           "c2_shared": format_rational(inst.c2_shared), "c_B": _vec(inst.c_B),
           "splits": [_vec(s) for s in inst.splits]}
    if inst.sources is not None:
        doc["sources"] = [system_to_json(S) for S in inst.sources]
    return doc


def three_sum_from_json(doc: dict, where: str = "three_sum") -> ThreeSumInstance:
    rows = {k: _parse_vec(_field(doc, k, where), f"{where}.{k}")
            for k in ("a1_row", "a2_row", "b1_row", "b2_row")}
    try:
        c1 = parse_rational(_field(doc, "c1_shared", where))
        c2 = parse_rational(_field(doc, "c2_shared", where))
    except ValueError as exc:
        raise ContractError(f"{where}: {exc}") from None
    sources = None
    if "sources" in doc:
        sources = tuple(system_from_json(s, f"{where}.sources[{i}]")
                        for i, s in enumerate(doc["sources"]))
    splits = doc.get("splits")
    return ThreeSumInstance(
        _parse_mat(_field(doc, "A", where), f"{where}.A", len(rows["a1_row"])),
        rows["a1_row"], rows["a2_row"], rows["b1_row"], rows["b2_row"],
        _parse_mat(_field(doc, "B", where), f"{where}.B", len(rows["b1_row"])),
        _parse_vec(_field(doc, "c_A", where), f"{where}.c_A"), c1, c2,
        _parse_vec(_field(doc, "c_B", where), f"{where}.c_B"),
        tuple(_parse_vec(s, f"{where}.splits") for s in splits) if splits else None,
        doc.get("name", ""), sources)


class UnitColumnInstance:
    """A system whose last column is a unit column appended on ``row``."""

    def __init__(self, system: StandardFormSystem, row: int, name: str = ""):
        self.system, self.row, self.name = system, row, name or system.name

    def __eq__(self, other):
        return isinstance(other, UnitColumnInstance) and (self.system, self.row) == (other.system, other.row)

    def __hash__(self):
        return hash((self.system, self.row))


class ProductInstance:
    """Two factors and their block-diagonal product."""

    def __init__(self, P: StandardFormSystem, Q: StandardFormSystem, name: str = ""):
        from ..polyhedron import block_diagonal
        self.P, self.Q, self.name = P, Q, name
        self.system = block_diagonal(P, Q, name)

    def __eq__(self, other):
        return isinstance(other, ProductInstance) and (self.P, self.Q) == (other.P, other.Q)

    def __hash__(self):
        return hash((self.P, self.Q))


def instance_to_json(inst) -> dict:
    if isinstance(inst, TwoSumInstance):
        return two_sum_to_json(inst)
    if isinstance(inst, ThreeSumInstance):
        return three_sum_to_json(inst)
    if isinstance(inst, UnitColumnInstance):
        return {**system_to_json(inst.system), "kind": "unit_column", "name": inst.name,
                "unit_row": inst.row}
    if isinstance(inst, ProductInstance):
        return {"kind": "product", "name": inst.name,
                "factors": [system_to_json(inst.P), system_to_json(inst.Q)]}
    if isinstance(inst, StandardFormSystem):
        return system_to_json(inst)
    raise TypeError(f"cannot serialize {type(inst).__name__}")


def instance_from_json(doc) -> object:
    if not isinstance(doc, dict):
        raise ContractError("instance document must be a JSON object")
    kind = doc.get("kind")
    if kind is None:
        kind = "two_sum" if "a_row" in doc else "three_sum" if "a1_row" in doc else "system"
    if kind == "two_sum":
        return two_sum_from_json(doc)
    if kind == "three_sum":
        return three_sum_from_json(doc)
    if kind == "unit_column":
        S = system_from_json(doc, "unit_column")
        row = doc.get("unit_row")
        if not isinstance(row, int):
            raise ContractError("unit_column: field 'unit_row' must be an integer")
        return UnitColumnInstance(S, row, doc.get("name", ""))
    if kind == "product":
        f = _field(doc, "factors", "product")
        if not isinstance(f, list) or len(f) != 2:
            raise ContractError("product: 'factors' must hold two systems")
        return ProductInstance(system_from_json(f[0], "product.factors[0]"),
                               system_from_json(f[1], "product.factors[1]"), doc.get("name", ""))
    if kind == "system":
        return system_from_json(doc)
    raise ContractError(f"unknown instance kind {kind!r}")


def dumps(doc) -> str:
    """Canonical JSON text (sorted keys, compact separators)."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def content_hash(inst) -> str:
    doc = dict(instance_to_json(inst))
    doc.pop("name", None)
    return hashlib.sha256(dumps(doc).encode()).hexdigest()[:16]


def load_instance(path) -> object:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ContractError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ContractError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return instance_from_json(doc)
    except ContractError as exc:
        raise ContractError(f"{path}: {exc}") from None


def save_json(doc, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def walk_to_json(walk: Walk) -> dict:
    return {"vertices": [_vec(s) for s in walk.steps], "budget_log": walk.budget_log,
            "length": walk.length}


def walk_from_json(doc: dict) -> Walk:
    steps = [_parse_vec(v, f"walk.vertices[{i}]") for i, v in enumerate(_field(doc, "vertices", "walk"))]
    return Walk(steps, list(doc.get("budget_log", [])))


def point_to_json(point) -> list[str]:
    return _vec(point)


def fraction_or_none(value) -> str | None:
    return None if value is None else format_rational(Fraction(value))
