"""Deterministic CSV writing.

Every float goes out with 17 significant digits so that doubles round-trip
exactly, and files are written to a temporary sibling first and renamed into
place, so a reader never sees a half-written artifact.
"""

import csv
import io
import os
import tempfile
from collections.abc import Iterable, Sequence
from pathlib import Path


def format_value(value) -> str:
    """Render one CSV cell."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if value is None:
        return ""
    return str(value)


def write_csv_atomic(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence],
) -> Path:
    """Write ``rows`` under ``header`` to ``path`` via temp file + rename.

    Returns the final path.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])

    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(buffer.getvalue())
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return target
