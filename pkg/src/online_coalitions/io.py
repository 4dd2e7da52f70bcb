"""JSON files for instances, partitions and instance families.

Instance::

    {"n": 3, "utilities": [[0, -1, 3], [-1, 0, 3], [3, 3, 0]],
     "arrival": [0, 1, 2], "class_hint": "AFG"}

Rationals are bare integers or reduced ``"p/q"`` strings.  Partition::

    {"blocks": [[0, 2], [1]]}
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

from .adversary import Entry, InstanceDistribution
from .errors import DomainError, ParseError
from .game import Game, Partition

__all__ = [
    "format_rational",
    "parse_rational",
    "instance_to_dict",
    "instance_from_dict",
    "parse_instance",
    "write_instance",
    "parse_partition",
    "write_partition",
    "partition_to_dict",
    "write_distribution",
    "read_distribution",
]

_RATIONAL = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def format_rational(value: Fraction):
    value = Fraction(value)
    return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def parse_rational(value, where: str = "value") -> Fraction:
    """Strict reader: integers or reduced ``p/q`` strings with ``q > 0``."""
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ParseError(f"{where}: expected an integer or 'p/q' string, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    match = _RATIONAL.match(value)
    if not match:
        raise ParseError(f"{where}: malformed rational {value!r}")
    p, q = int(match.group(1)), int(match.group(2) or 1)
    if q == 0:
        raise ParseError(f"{where}: zero denominator in {value!r}")
    if Fraction(p, q).denominator != q:
        raise ParseError(f"{where}: rational {value!r} is not in reduced form")
    return Fraction(p, q)


def _load(path) -> object:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def instance_to_dict(game: Game, order=None, class_hint: str | None = None) -> dict:
    doc = {"n": game.n, "utilities": [[format_rational(v) for v in row] for row in game.utilities]}
    if order is not None:
        doc["arrival"] = list(order)
    if class_hint is not None:
        doc["class_hint"] = class_hint
    return doc


def instance_from_dict(doc, source: str = "instance") -> tuple[Game, tuple[int, ...] | None]:
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: top level must be an object")
    n = doc.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParseError(f"{source}: field 'n' must be a positive integer")
    rows = doc.get("utilities")
    if not isinstance(rows, list) or len(rows) != n:
        raise ParseError(f"{source}: field 'utilities' must be a list of {n} rows")
    matrix = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"{source}: utilities[{i}] must have {n} entries (matrix is not square)")
        matrix.append(tuple(parse_rational(v, f"{source}: utilities[{i}][{j}]") for j, v in enumerate(row)))
    try:
        game = Game(tuple(matrix))
    except DomainError as exc:
        raise ParseError(f"{source}: {exc}") from exc
    order = doc.get("arrival")
    if order is not None:
        if (
            not isinstance(order, list)
            or any(isinstance(a, bool) or not isinstance(a, int) for a in order)
            or sorted(order) != list(range(n))
        ):
            raise ParseError(f"{source}: field 'arrival' must be a permutation of 0..{n - 1}")
        order = tuple(order)
    hint = doc.get("class_hint")
    if hint is not None and not isinstance(hint, str):
        raise ParseError(f"{source}: field 'class_hint' must be a string")
    return game, order


def parse_instance(path) -> tuple[Game, tuple[int, ...] | None]:
    return instance_from_dict(_load(path), str(path))


def write_instance(path, game: Game, order=None, class_hint: str | None = None) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(game, order, class_hint)) + "\n", encoding="utf-8")


def partition_to_dict(partition: Partition) -> dict:
    return {"blocks": [list(b) for b in partition.blocks]}


def parse_partition(path) -> Partition:
    doc = _load(path)
    blocks = doc.get("blocks") if isinstance(doc, dict) else None
    if not isinstance(blocks, list) or not all(
        isinstance(b, list) and all(isinstance(a, int) and not isinstance(a, bool) for a in b) for b in blocks
    ):
        raise ParseError(f"{path}: field 'blocks' must be a list of integer lists")
    try:
        return Partition(tuple(tuple(b) for b in blocks))
    except DomainError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def write_partition(path, partition: Partition) -> None:
    Path(path).write_text(json.dumps(partition_to_dict(partition)) + "\n", encoding="utf-8")


def write_distribution(dist: InstanceDistribution, out_dir) -> Path:
    """One instance file per entry plus ``manifest.json``; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for idx, entry in enumerate(dist.entries):
        name = f"entry_{idx:04d}.json"
        write_instance(out / name, entry.game, entry.order, dist.family)
        files.append(
            {
                "file": name,
                "probability": str(entry.probability),
                "stops_after": entry.stops_after,
                "info": {k: list(v) if isinstance(v, tuple) else v for k, v in entry.info.items()},
            }
        )
    manifest = {
        "schema_version": 1,
        "family": dist.family,
        "distributional": dist.distributional,
        "params": {k: str(v) for k, v in dist.params.items()},
        "seed": dist.seed,
        "entries": files,
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def read_distribution(in_dir) -> InstanceDistribution:
    root = Path(in_dir)
    manifest = _load(root / "manifest.json")
    try:
        entries = []
        for item in manifest["entries"]:
            game, order = parse_instance(root / item["file"])
            stops = item.get("stops_after")
            entries.append(Entry(game, order or tuple(range(game.n)), parse_rational(item["probability"], item["file"]), stops, item.get("info", {})))
        return InstanceDistribution(
            manifest["family"], tuple(entries), bool(manifest.get("distributional", True)), manifest.get("params", {}), manifest.get("seed")
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{root / 'manifest.json'}: missing or malformed field {exc}") from exc
    except DomainError as exc:
        raise ParseError(f"{root / 'manifest.json'}: {exc}") from exc
