"""JSON documents for jets and results.

A jet document looks like::

    {"kind": "metric", "dim": 2, "order": 0,
     "entries": [{"multi_index": [0, 0], "indices": [0, 0], "value": "1/1"}, ...]}

``multi_index`` is the exponent vector of the Taylor monomial, ``indices``
the tensor indices (0-based), ``value`` an exact rational string.  Tensor
documents also carry ``valence`` and ``symmetry``.  An optional
``"packing": "multinomial"`` marks values scaled by ``|multi_index|!``.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import StructuralError
from .jet_algebra import ScalarJet, from_packing, to_packing
from .jet_groups import ConnectionJet, DiffeoJet, MetricJet, PoissonJet, TensorJet

KINDS = ("scalar", "tensor", "metric", "connection", "poisson", "diffeo")
PACKINGS = ("taylor", "multinomial")

_RATIONAL = re.compile(r"-?\d+(/\d+)?")


def parse_rational(text) -> Fraction:
    if not isinstance(text, str) or not _RATIONAL.fullmatch(text.strip()):
        raise StructuralError(f"value {text!r} is not a rational string of the form 'p' or 'p/q'")
    num, _, den = text.strip().partition("/")
    if den and int(den) == 0:
        raise StructuralError(f"value {text!r} has a zero denominator")
    return Fraction(int(num), int(den or 1))


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def kind_of(jet) -> str:
    if isinstance(jet, ScalarJet):
        return "scalar"
    if isinstance(jet, DiffeoJet):
        return "diffeo"
    if isinstance(jet, ConnectionJet):
        return "connection"
    if isinstance(jet, MetricJet):
        return "metric"
    if isinstance(jet, PoissonJet):
        return "poisson"
    if isinstance(jet, TensorJet):
        return "tensor"
    raise StructuralError(f"cannot serialize a {type(jet).__name__}")


def _triples(jet) -> list[tuple[tuple, tuple, Fraction]]:
    if isinstance(jet, ScalarJet):
        return [(mono, (), v) for mono, v in jet.items()]
    if isinstance(jet, DiffeoJet):
        return [(mono, (a,), v) for a, c in enumerate(jet.components) for mono, v in c.items()]
    return jet.entries()


def jet_to_document(jet, packing: str = "taylor") -> dict[str, Any]:
    if packing not in PACKINGS:
        raise StructuralError(f"unknown packing {packing!r}")
    kind = kind_of(jet)
    doc: dict[str, Any] = {"kind": kind, "dim": jet.dim, "order": jet.order}
    if isinstance(jet, TensorJet):
        doc["valence"] = list(jet.valence)
        doc["symmetry"] = jet.symmetry
    if packing != "taylor":
        doc["packing"] = packing
    doc["entries"] = [
        {
            "multi_index": list(mono),
            "indices": list(idx),
            "value": format_rational(to_packing(v, mono, packing)),
        }
        for mono, idx, v in sorted(_triples(jet), key=lambda t: (t[1], t[0]))
        if v
    ]
    return doc


def _require(doc: dict, key: str, typ):
    if key not in doc:
        raise StructuralError(f"jet document is missing {key!r}")
    value = doc[key]
    if not isinstance(value, typ) or isinstance(value, bool):
        raise StructuralError(f"{key!r} must be of type {typ.__name__}")
    return value


def document_to_jet(doc: dict):
    if not isinstance(doc, dict):
        raise StructuralError("jet document must be a JSON object")
    kind = _require(doc, "kind", str)
    if kind not in KINDS:
        raise StructuralError(f"unknown jet kind {kind!r}; expected one of {', '.join(KINDS)}")
    dim = _require(doc, "dim", int)
    order = _require(doc, "order", int)
    if dim < 1 or order < 0:
        raise StructuralError("dim must be >= 1 and order >= 0")
    packing = doc.get("packing", "taylor")
    if packing not in PACKINGS:
        raise StructuralError(f"unknown packing {packing!r}")
    entries: dict[tuple, Fraction] = {}
    for e in _require(doc, "entries", list):
        if not isinstance(e, dict):
            raise StructuralError("each entry must be a JSON object")
        mono = tuple(_require(e, "multi_index", list))
        idx = tuple(_require(e, "indices", list))
        if len(mono) != dim or any(not isinstance(x, int) or x < 0 for x in mono):
            raise StructuralError(f"multi_index {list(mono)} must be {dim} non-negative integers")
        if sum(mono) > order:
            raise StructuralError(f"multi_index {list(mono)} exceeds the declared order {order}")
        if any(not isinstance(x, int) or not 0 <= x < dim for x in idx):
            raise StructuralError(f"indices {list(idx)} out of range for dim {dim}")
        key = (mono, idx)
        if key in entries:
            raise StructuralError(f"duplicate entry {list(mono)} {list(idx)}")
        entries[key] = from_packing(parse_rational(e.get("value")), mono, packing)

    def expect_rank(r: int):
        bad = [list(i) for _, i in entries if len(i) != r]
        if bad:
            raise StructuralError(f"{kind} entries need {r} indices, got {bad[0]}")

    if kind == "scalar":
        expect_rank(0)
        return ScalarJet(dim, order, {m: v for (m, _), v in entries.items()})
    if kind == "diffeo":
        expect_rank(1)
        comps = [{} for _ in range(dim)]
        for (m, (a,)), v in entries.items():
            comps[a][m] = v
        return DiffeoJet([ScalarJet(dim, order, c) for c in comps])
    if kind == "connection":
        expect_rank(3)
        return ConnectionJet.from_entries(dim, order, {(m, i): v for (m, i), v in entries.items()})
    valence = tuple(doc.get("valence", {"metric": (0, 2), "poisson": (2, 0)}.get(kind, ())))
    if len(valence) != 2:
        raise StructuralError("tensor documents need a 'valence' pair [p, q]")
    expect_rank(sum(valence))
    if kind == "metric":
        if valence != (0, 2):
            raise StructuralError(f"metric documents must have valence [0, 2], got {list(valence)}")
        return MetricJet.from_entries(dim, order, entries)
    if kind == "poisson":
        if valence != (2, 0):
            raise StructuralError(f"poisson documents must have valence [2, 0], got {list(valence)}")
        return PoissonJet.from_entries(dim, order, entries)
    return TensorJet.from_entries(dim, order, valence, entries, doc.get("symmetry", "none"))


def parse_jet(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructuralError(f"malformed JSON: {exc}") from None
    return document_to_jet(doc)


def parse_jet_file(source):
    """Parse a jet from a path or from JSON text."""
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise StructuralError(f"cannot read {source}: {exc.strerror}") from None
        return parse_jet(text)
    return parse_jet(source)


def serialize(jet, packing: str = "taylor") -> str:
    return dumps(jet_to_document(jet, packing))


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
