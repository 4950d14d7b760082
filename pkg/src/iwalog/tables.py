"""Ingestion of layered class-group tables.

A table row records, for one field (labelled by d) and one tower type, the
group shapes observed at successive layers: the logarithmic class group
(``clog``), optionally its wild part (``clog_ell``) and the quotient of the
classical class group by the classes of primes above ell (``clp``), plus
optionally the invariants the row is expected to exhibit.  Rows arrive as a
JSON array or as CSV with one line per layer.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .classgroups import AbelianLGroup, _log_int
from .padic import require_odd_prime

__all__ = [
    "TableParseError",
    "InvalidGroupShapeError",
    "LayerData",
    "ExpectedInvariants",
    "TableRow",
    "parse_tables",
    "parse_rows",
    "bundled_fixtures",
]

CSV_COLUMNS = ("ell", "d", "tower", "n", "clog", "clog_ell", "clp")
TOWERS = ("cyclotomic", "anticyclotomic")


class TableParseError(Exception):
    """A table file could not be understood; the message carries row/field
    context."""


class InvalidGroupShapeError(TableParseError):
    """A printed group factor is not a power of the row's ell."""


@dataclass(frozen=True)
class LayerData:
    n: int
    clog: AbelianLGroup
    clog_ell: Optional[AbelianLGroup] = None
    clp: Optional[AbelianLGroup] = None


@dataclass(frozen=True)
class ExpectedInvariants:
    mu: Optional[int] = None
    lambda_: Optional[int] = None
    nu: Optional[int] = None
    lambda_classical: Optional[int] = None
    nu_classical: Optional[int] = None
    e_diffs: Optional[tuple] = None


@dataclass(frozen=True)
class TableRow:
    ell: int
    d: int
    tower: str
    layers: tuple
    expected: Optional[ExpectedInvariants] = None

    def __post_init__(self) -> None:
        require_odd_prime(self.ell)
        if self.tower not in TOWERS:
            raise ValueError(f"tower must be one of {TOWERS}, got {self.tower!r}")
        layers = tuple(self.layers)
        for i, layer in enumerate(layers):
            if layer.n != i:
                raise ValueError(f"layer indices must be contiguous from 0, found n={layer.n} at position {i}")
        object.__setattr__(self, "layers", layers)

    @property
    def key(self) -> tuple:
        return (self.ell, self.d, self.tower)

    def clog_exponents(self) -> list:
        return [layer.clog.order_exponent for layer in self.layers]

    def clp_exponents(self) -> Optional[list]:
        if any(layer.clp is None for layer in self.layers):
            return None
        return [layer.clp.order_exponent for layer in self.layers]


def _group_from_factors(factors, ell: int, where: str) -> AbelianLGroup:
    if not isinstance(factors, (list, tuple)):
        raise TableParseError(f"{where}: group shape must be a list, got {factors!r}")
    parsed = []
    for f in factors:
        try:
            value = int(f)
        except (TypeError, ValueError):
            raise TableParseError(f"{where}: factor {f!r} is not an integer") from None
        if value < ell or _log_int(value, ell) < 1:
            raise InvalidGroupShapeError(
                f"{where}: factor {value} is not a power of {ell}")
        parsed.append(value)
    exps = sorted((_log_int(v, ell) for v in parsed), reverse=True)
    return AbelianLGroup.from_exponents(ell, exps)


_EXPECTED_KEYS = ("mu", "lambda", "nu", "lambda_classical", "nu_classical", "e_diffs")


def _expected_from_dict(data: dict, where: str) -> ExpectedInvariants:
    unknown = set(data) - set(_EXPECTED_KEYS)
    if unknown:
        raise TableParseError(f"{where}: unknown expected fields {sorted(unknown)}")
    kwargs = {}
    for key in ("mu", "lambda", "nu", "lambda_classical", "nu_classical"):
        if key in data:
            try:
                kwargs["lambda_" if key == "lambda" else key] = int(data[key])
            except (TypeError, ValueError):
                raise TableParseError(f"{where}: expected.{key} must be an integer") from None
    if "e_diffs" in data:
        diffs = data["e_diffs"]
        if not isinstance(diffs, (list, tuple)):
            raise TableParseError(f"{where}: expected.e_diffs must be a list")
        kwargs["e_diffs"] = tuple(int(x) for x in diffs)
    return ExpectedInvariants(**kwargs)


_ROW_KEYS = ("ell", "d", "tower", "layers", "expected")
_LAYER_KEYS = ("n", "clog", "clog_ell", "clp")


def _row_from_dict(data: dict, where: str) -> TableRow:
    if not isinstance(data, dict):
        raise TableParseError(f"{where}: row must be an object, got {type(data).__name__}")
    unknown = set(data) - set(_ROW_KEYS)
    if unknown:
        raise TableParseError(f"{where}: unknown row fields {sorted(unknown)}")
    for required in ("ell", "d", "tower", "layers"):
        if required not in data:
            raise TableParseError(f"{where}: missing field {required!r}")
    try:
        ell = int(data["ell"])
        d = int(data["d"])
    except (TypeError, ValueError):
        raise TableParseError(f"{where}: ell and d must be integers") from None
    layers = []
    raw_layers = data["layers"]
    if not isinstance(raw_layers, list):
        raise TableParseError(f"{where}: layers must be a list")
    for j, raw in enumerate(raw_layers):
        lw = f"{where}, layer {j}"
        if not isinstance(raw, dict):
            raise TableParseError(f"{lw}: layer must be an object")
        unknown = set(raw) - set(_LAYER_KEYS)
        if unknown:
            raise TableParseError(f"{lw}: unknown layer fields {sorted(unknown)}")
        if "n" not in raw or "clog" not in raw:
            raise TableParseError(f"{lw}: layers need at least n and clog")
        layer = LayerData(
            n=int(raw["n"]),
            clog=_group_from_factors(raw["clog"], ell, f"{lw}, clog"),
            clog_ell=(_group_from_factors(raw["clog_ell"], ell, f"{lw}, clog_ell")
                      if raw.get("clog_ell") is not None else None),
            clp=(_group_from_factors(raw["clp"], ell, f"{lw}, clp")
                 if raw.get("clp") is not None else None),
        )
        layers.append(layer)
    expected = None
    if data.get("expected") is not None:
        if not isinstance(data["expected"], dict):
            raise TableParseError(f"{where}: expected must be an object")
        expected = _expected_from_dict(data["expected"], f"{where}, expected")
    try:
        return TableRow(ell, d, data["tower"], tuple(layers), expected)
    except ValueError as exc:
        raise TableParseError(f"{where}: {exc}") from None


def parse_rows(data: list) -> list:
    """Validate a decoded JSON array of row objects."""
    if not isinstance(data, list):
        raise TableParseError(f"top level must be an array, got {type(data).__name__}")
    return [_row_from_dict(raw, f"row {i}") for i, raw in enumerate(data)]


def _parse_csv_cell(cell: str, ell: int, where: str) -> Optional[list]:
    """A factor list like ``9;3``; brackets tolerated; empty means absent."""
    text = cell.strip()
    if text in ("[]", "[ ]"):
        return []
    text = text.strip("[]").strip()
    if not text:
        return None
    try:
        return [int(part) for part in text.split(";") if part.strip()]
    except ValueError:
        raise TableParseError(f"{where}: cannot read factor list {cell!r}") from None


def _parse_csv(lines: list) -> list:
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        return []
    if tuple(h.strip() for h in header) != CSV_COLUMNS:
        raise TableParseError(
            f"line 1: CSV header must be {','.join(CSV_COLUMNS)}")
    grouped: list = []  # list of (key, [ (lineno, n, clog, clog_ell, clp) ])
    for lineno, record in enumerate(reader, start=2):
        if not record or all(not cell.strip() for cell in record):
            continue
        if len(record) != len(CSV_COLUMNS):
            raise TableParseError(f"line {lineno}: expected {len(CSV_COLUMNS)} cells, got {len(record)}")
        where = f"line {lineno}"
        try:
            ell = int(record[0])
            d = int(record[1])
            n = int(record[3])
        except ValueError:
            raise TableParseError(f"{where}: ell, d and n must be integers") from None
        tower = record[2].strip()
        key = (ell, d, tower)
        clog = _parse_csv_cell(record[4], ell, f"{where}, clog")
        entry = (where, n,
                 [] if clog is None else clog,
                 _parse_csv_cell(record[5], ell, f"{where}, clog_ell"),
                 _parse_csv_cell(record[6], ell, f"{where}, clp"))
        if grouped and grouped[-1][0] == key:
            grouped[-1][1].append(entry)
        else:
            grouped.append((key, [entry]))
    rows = []
    for (ell, d, tower), entries in grouped:
        layers = []
        for where, n, clog, clog_ell, clp in entries:
            layers.append(LayerData(
                n=n,
                clog=_group_from_factors(clog, ell, f"{where}, clog"),
                clog_ell=(_group_from_factors(clog_ell, ell, f"{where}, clog_ell")
                          if clog_ell is not None else None),
                clp=(_group_from_factors(clp, ell, f"{where}, clp")
                     if clp is not None else None),
            ))
        where = entries[0][0]
        try:
            rows.append(TableRow(ell, d, tower, tuple(layers), None))
        except ValueError as exc:
            raise TableParseError(f"{where}: {exc}") from None
    return rows


def parse_tables(path) -> list:
    """Read table rows from a JSON array or a CSV file.

    The format is sniffed from the first non-blank character ('[' means
    JSON) with the file extension as a tiebreaker, so either format can
    arrive under any name.
    """
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise TableParseError(f"cannot read {p}: {exc}") from None
    stripped = text.lstrip()
    looks_json = stripped.startswith("[") or p.suffix.lower() == ".json"
    if looks_json:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TableParseError(f"{p}: invalid JSON: {exc}") from None
        return parse_rows(data)
    return _parse_csv(text.splitlines())


def bundled_fixtures() -> dict:
    """Paths of the table fixtures shipped with the package, keyed by name."""
    data_dir = Path(__file__).resolve().parent / "data"
    return {path.stem: path for path in sorted(data_dir.glob("*.json"))}
