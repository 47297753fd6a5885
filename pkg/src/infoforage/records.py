"""Flat-file persistence: manifests, measure records (JSONL) and figure data (CSV)."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Optional

from . import __version__
from .lexical import ALPHA_BOUNDS, ALPHA_TOL, Category, Profile

MANIFEST_HEADER = ("path", "year", "category", "profile", "source_id")
TOKENIZER_VERSION = "regex-lower-alnum-1"
MEASURE_NAMES = ("word_entropy_bits", "type_token_ratio", "zipf_exponent")


class ManifestError(ValueError):
    """The manifest is structurally invalid; nothing can be processed."""


class MixedConfigError(ValueError):
    """Records produced under different configurations were combined."""


@dataclass(frozen=True)
class ManifestRow:
    path: Path
    year: Optional[int]
    category: Category
    profile: Profile
    source_id: str


@dataclass(frozen=True)
class MeasureRecord:
    source_id: str
    year: Optional[int]
    category: str
    n_tokens: int
    word_entropy_bits: float
    type_token_ratio: float
    zipf_exponent: float
    zipf_loglik: float
    tool_version: str
    config_hash: str


def config_hash(params: dict) -> str:
    blob = json.dumps(params, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def measure_config(sample_size: int) -> dict:
    return {
        "sample_size": int(sample_size),
        "tokenizer": TOKENIZER_VERSION,
        "entropy_log_base": 2,
        "zipf_alpha_bounds": list(ALPHA_BOUNDS),
        "zipf_alpha_tol": ALPHA_TOL,
        "zipf_xmin": 1,
    }


def read_manifest(path) -> list[ManifestRow]:
    """Parse a manifest CSV; relative paths resolve against the manifest's directory."""
    path = Path(path)
    base = path.parent
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != MANIFEST_HEADER:
        raise ManifestError(f"manifest header must be exactly {','.join(MANIFEST_HEADER)}; got {header}")
    rows = []
    for lineno, raw in enumerate(reader, start=2):
        if not raw or all(not c.strip() for c in raw):
            continue
        if len(raw) != len(MANIFEST_HEADER):
            raise ManifestError(f"line {lineno}: expected {len(MANIFEST_HEADER)} fields, got {len(raw)}")
        p, year, cat, prof, sid = (c.strip() for c in raw)
        try:
            row = ManifestRow(
                path=(base / p) if not os.path.isabs(p) else Path(p),
                year=int(year) if year else None,
                category=Category.parse(cat),
                profile=Profile(prof),
                source_id=sid,
            )
        except ValueError as exc:
            raise ManifestError(f"line {lineno}: {exc}") from exc
        rows.append(row)
    return rows


def _json_float(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def record_to_json(rec: MeasureRecord) -> str:
    d = {k: _json_float(v) for k, v in asdict(rec).items()}
    return json.dumps(d, sort_keys=False, separators=(",", ":"))


def write_jsonl(records: Iterable[MeasureRecord], path) -> int:
    n = 0
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(record_to_json(rec) + "\n")
            n += 1
    return n


def read_jsonl(path) -> list[MeasureRecord]:
    names = [f.name for f in fields(MeasureRecord)]
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            d = json.loads(line)
            missing = [k for k in names if k not in d]
            if missing:
                raise ValueError(f"{path}:{lineno}: missing fields {missing}")
            out.append(MeasureRecord(**{k: d[k] for k in names}))
    return out


def single_config(records: Iterable[MeasureRecord]) -> str:
    hashes = sorted({r.config_hash for r in records})
    if len(hashes) > 1:
        raise MixedConfigError(f"records from different configurations cannot be mixed: {hashes}")
    if not hashes:
        raise ValueError("no measure records")
    return hashes[0]


def header_comment(**meta) -> str:
    meta = {"tool_version": __version__, **meta}
    return "# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n"


def write_csv(path, columns, rows, **meta) -> None:
    """CSV with a leading ``#`` comment line carrying provenance metadata."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header_comment(**meta))
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow(["" if v is None else _fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ""
    return v


def read_csv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def read_year_series(path) -> dict[int, float]:
    """Read a two-column ``year,value`` CSV into a dict."""
    rows = read_csv(path)
    if rows and not {"year", "value"} <= set(rows[0]):
        raise ValueError(f"{path}: expected columns year,value")
    out = {}
    for r in rows:
        out[int(r["year"])] = float(r["value"])
    return out
