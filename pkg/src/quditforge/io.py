"""JSON circuit files and CSV result tables."""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .errors import ParseError, UnknownGateKind
from .ir import Circuit, Control, Gate, Kind


def gate_to_json(g: Gate) -> dict:
    return {
        "kind": g.kind.value,
        "params": list(g.params),
        "targets": list(g.targets),
        "controls": [{"q": c.qudit, "v": c.value} for c in g.controls],
    }


def circuit_to_json(c: Circuit) -> dict:
    return {"width": c.width, "radix": c.radix, "gates": [gate_to_json(g) for g in c.gates]}


def _int(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"{where}: expected an integer, got {v!r}")
    return v


def gate_from_json(d: dict, where: str = "gate") -> Gate:
    if not isinstance(d, dict):
        raise ParseError(f"{where}: expected an object")
    for key in ("kind", "targets"):
        if key not in d:
            raise ParseError(f"{where}: missing field {key!r}")
    try:
        kind = Kind(d["kind"])
    except ValueError:
        raise UnknownGateKind(f"{where}: unknown gate kind {d['kind']!r}") from None
    raw = d.get("params", [])
    if kind is Kind.PHASE:
        params = tuple(float(p) for p in raw)
    else:
        params = tuple(_int(p, where) for p in raw)
    targets = tuple(_int(t, where) for t in d["targets"])
    controls = []
    for c in d.get("controls", []):
        if not isinstance(c, dict) or "q" not in c:
            raise ParseError(f"{where}: control needs field 'q'")
        controls.append(Control(_int(c["q"], where), _int(c.get("v", 1), where)))
    return Gate(kind, targets, tuple(controls), params)


def circuit_from_json(d: dict) -> Circuit:
    if not isinstance(d, dict):
        raise ParseError("circuit: expected an object")
    for key in ("width", "radix", "gates"):
        if key not in d:
            raise ParseError(f"circuit: missing field {key!r}")
    gates = [gate_from_json(g, f"gate {i}") for i, g in enumerate(d["gates"])]
    return Circuit(_int(d["width"], "width"), _int(d["radix"], "radix"), gates)


def dumps_circuit(c: Circuit) -> str:
    return json.dumps(circuit_to_json(c), separators=(",", ":")) + "\n"


def loads_circuit(text: str) -> Circuit:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}: {exc.msg}") from None
    return circuit_from_json(data)


def atomic_write(path, text: str) -> None:
    """Write through a temp file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_circuit(c: Circuit, path) -> None:
    atomic_write(path, dumps_circuit(c))


def load_circuit(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return loads_circuit(fh.read())


# ------------------------------------------------------------------- CSV

def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def render_csv(columns: Sequence[str], rows: Iterable[dict], config: dict, seed) -> str:
    buf = _io.StringIO()
    buf.write(f"# quditforge {__version__} config={config_hash(config)} seed={seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def read_csv(path) -> tuple[str, list[dict]]:
    """Returns (comment header, rows as string dicts)."""
    with open(path, encoding="utf-8", newline="") as fh:
        head = fh.readline().rstrip("\n")
        return head, list(csv.DictReader(fh))
