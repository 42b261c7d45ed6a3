"""Readers and writers for the on-disk formats.

Edges are tab-separated `retweeted_id<TAB>retweeter_id<TAB>count` with an
optional count (default 1) and '#' comment lines. Followership is a CSV
with an `account_id` header column followed by media labels and 0/1 cells.
Tweets are JSON lines with `account`, `utc` (ISO UTC, Z suffix) and
`text`. Parse errors carry the file path and one-based line number.
"""

from __future__ import annotations

import csv
import json
from datetime import datetime
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .graph import EdgeRecord
from .pca import FollowershipMatrix, MediaScores
from .text import TweetRecord

UTC_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


def parse_edges(path: str | Path) -> list[EdgeRecord]:
    path = Path(path)
    records = []
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) not in (2, 3):
                raise InputError(f"expected 2 or 3 tab-separated fields, got {len(fields)}",
                                 path=path, line=lineno)
            target, source = fields[0], fields[1]
            if not target or not source:
                raise InputError("empty account id", path=path, line=lineno)
            count = 1
            if len(fields) == 3:
                try:
                    count = int(fields[2])
                except ValueError:
                    raise InputError(f"count {fields[2]!r} is not an integer",
                                     path=path, line=lineno) from None
            if count < 1:
                raise InputError(f"count must be >= 1, got {count}",
                                 path=path, line=lineno)
            records.append(EdgeRecord(target=target, source=source, count=count))
    return records


def parse_followership(path: str | Path) -> tuple[FollowershipMatrix, int]:
    """Read the followership CSV; returns the matrix and the number of
    all-zero rows that were dropped."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError("file is empty", path=path, line=1) from None
        if len(header) < 2 or header[0] != "account_id":
            raise InputError("header must be account_id followed by media labels",
                             path=path, line=1)
        media = tuple(header[1:])
        if len(set(media)) != len(media):
            raise InputError("duplicate media labels", path=path, line=1)
        accounts: list[str] = []
        seen: set[str] = set()
        rows: list[list[int]] = []
        dropped = 0
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(media) + 1:
                raise InputError(f"expected {len(media) + 1} fields, got {len(row)}",
                                 path=path, line=lineno)
            acct = row[0]
            if not acct:
                raise InputError("empty account id", path=path, line=lineno)
            if acct in seen:
                raise InputError(f"duplicate account id {acct!r}",
                                 path=path, line=lineno)
            seen.add(acct)
            cells = []
            for j, cell in enumerate(row[1:], start=1):
                if cell not in ("0", "1"):
                    raise InputError(f"column {j} must be 0 or 1, got {cell!r}",
                                     path=path, line=lineno)
                cells.append(int(cell))
            if not any(cells):
                dropped += 1
                continue
            accounts.append(acct)
            rows.append(cells)
    entries = (np.array(rows, dtype=np.uint8) if rows
               else np.zeros((0, len(media)), dtype=np.uint8))
    return FollowershipMatrix(accounts=tuple(accounts), media=media,
                              entries=entries), dropped


def parse_tweets(path: str | Path) -> list[TweetRecord]:
    path = Path(path)
    out = []
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"invalid JSON: {exc.msg}",
                                 path=path, line=lineno) from None
            if not isinstance(obj, dict):
                raise InputError("each line must be a JSON object",
                                 path=path, line=lineno)
            for field in ("account", "utc", "text"):
                if field not in obj:
                    raise InputError(f"missing field {field!r}",
                                     path=path, line=lineno)
            if not obj["account"]:
                raise InputError("empty account id", path=path, line=lineno)
            if not obj["text"]:
                raise InputError("empty tweet text", path=path, line=lineno)
            try:
                utc = datetime.strptime(obj["utc"], UTC_FORMAT)
            except (TypeError, ValueError):
                raise InputError(f"utc {obj['utc']!r} does not match {UTC_FORMAT}",
                                 path=path, line=lineno) from None
            out.append(TweetRecord(account=obj["account"], utc=utc,
                                   text=obj["text"]))
    return out


def parse_partition_csv(path: str | Path) -> dict[str, int]:
    """node_id,community CSV into a mapping (comment lines allowed)."""
    path = Path(path)
    out: dict[str, int] = {}
    with path.open(encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].startswith("#"):
                continue
            if row[0] == "node_id":
                continue
            if len(row) != 2:
                raise InputError("expected node_id,community", path=path, line=lineno)
            try:
                out[row[0]] = int(row[1])
            except ValueError:
                raise InputError(f"community {row[1]!r} is not an integer",
                                 path=path, line=lineno) from None
    return out


def parse_scores_csv(path: str | Path) -> MediaScores:
    """account_id,score,class CSV back into MediaScores."""
    path = Path(path)
    scores: dict[str, float] = {}
    classes: dict[str, str] = {}
    with path.open(encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].startswith("#"):
                continue
            if row[0] == "account_id":
                continue
            if len(row) != 3:
                raise InputError("expected account_id,score,class",
                                 path=path, line=lineno)
            try:
                scores[row[0]] = float(row[1])
            except ValueError:
                raise InputError(f"score {row[1]!r} is not a number",
                                 path=path, line=lineno) from None
            if row[2] not in ("left", "right", "unclassified"):
                raise InputError(f"unknown class {row[2]!r}", path=path, line=lineno)
            classes[row[0]] = row[2]
    return MediaScores(scores=scores, classes=classes)


# ---------------------------------------------------------------------------
# Writers. Every file begins with a '# key=value ...' provenance comment so
# any output names the seed and parameters that produced it.
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: str | Path, header: Sequence[str],
              rows: Iterable[Sequence], provenance: str) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {provenance}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_json(path: str | Path, payload: dict) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
