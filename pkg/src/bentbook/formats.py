"""On-disk formats: set files, codebook exports, metrics and run manifests."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
import struct
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .quadperm import Perm

_INNER_LIST = re.compile(r"\[\s*(-?\d+(?:,\s*-?\d+)*)\s*\]")


def dumps(obj: Any) -> str:
    """Indented JSON with integer lists kept on one line; stable across runs."""
    text = json.dumps(obj, indent=2)
    return _INNER_LIST.sub(lambda m: "[" + ", ".join(m.group(1).replace(",", " ").split()) + "]", text) + "\n"


def write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def write_json(path: Path, obj: Any) -> None:
    write_text(path, dumps(obj))


def set_payload(perms: Sequence[Perm], provenance: dict | None = None) -> dict:
    perms = list(perms)
    n = perms[0].n if perms else 0
    return {"n": n, "perms": [p.to_list() for p in perms], "provenance": provenance or {}}


def write_set(path: Path, perms: Sequence[Perm], provenance: dict | None = None) -> None:
    write_json(path, set_payload(perms, provenance))


def parse_set(obj: dict) -> tuple[list[Perm], dict]:
    if not isinstance(obj, dict) or "perms" not in obj:
        raise ValueError("set file needs a 'perms' list")
    perms = [Perm(tuple(row)) for row in obj["perms"]]
    n = obj.get("n")
    if perms and n is not None and any(p.n != n for p in perms):
        raise ValueError(f"perm sizes disagree with n={n}")
    return perms, obj.get("provenance", {})


def read_set(path: Path) -> tuple[list[Perm], dict]:
    return parse_set(json.loads(Path(path).read_text()))


def column_header(L: int, N: int) -> list[str]:
    return [f"l{ell + 1}_c{c}" for ell in range(L) for c in range(N)]


def write_codebook_csv(path: Path, columns: np.ndarray, N: int) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(column_header(columns.shape[1] // N, N))
    w.writerows(columns.tolist())
    write_text(path, buf.getvalue())


def read_codebook_csv(path: Path) -> tuple[np.ndarray, list[str]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError("empty codebook file")
    return np.array([[int(v) for v in r] for r in rows[1:]], dtype=np.int8), rows[0]


def write_codebook_bin(path: Path, columns: np.ndarray) -> None:
    """uint32 LE rows, uint32 LE cols, then row-major sign bits (1 for -1), little bit order."""
    rows, cols = columns.shape
    bits = np.packbits((columns < 0).reshape(-1), bitorder="little")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(struct.pack("<II", rows, cols) + bits.tobytes())


def read_codebook_bin(path: Path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise ValueError("truncated codebook header")
    rows, cols = struct.unpack("<II", data[:8])
    bits = np.unpackbits(np.frombuffer(data[8:], dtype=np.uint8), bitorder="little", count=rows * cols)
    if bits.size != rows * cols:
        raise ValueError("truncated codebook body")
    return (1 - 2 * bits.astype(np.int8)).reshape(rows, cols)


def read_codebook(path: Path) -> np.ndarray:
    path = Path(path)
    if path.suffix == ".bin":
        return read_codebook_bin(path)
    return read_codebook_csv(path)[0]


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
