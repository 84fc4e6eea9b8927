"""Line-delimited JSON logs with fixed field order.

Records are emitted with insertion-ordered keys and default float repr, so
two runs with equal seeds produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator


def dumps_record(record: dict) -> str:
    return json.dumps(record, separators=(",", ":"))


def write_ndjson(path: str | Path, records: Iterable[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for rec in records:
            fh.write(dumps_record(rec))
            fh.write("\n")


def read_ndjson(path: str | Path) -> Iterator[dict]:
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)
