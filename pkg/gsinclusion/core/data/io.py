"""
Pure functions for report input/output.

Certificates, condition tables and suite results all flatten into verdict
records; a report is a DataFrame of those records with a `source` column and
renders to certificate.csv plus a plain-text summary.txt. All cells are
strings, so loading and re-rendering a report reproduces it byte for byte.
"""

from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import pandas as pd

from gsinclusion.core.conjugate import ConjugateTable
from gsinclusion.core.data_structures import VerdictRecord
from gsinclusion.core.protocols import HasRecords

REPORT_COLUMNS = ("source", "check", "status", "witness", "counterexample", "horizon", "note")
STATUS_ORDER = ("witnessed", "falsified", "inconclusive", "passed", "failed", "included", "not_included")
CERTIFICATE_FILE = "certificate.csv"
SUMMARY_FILE = "summary.txt"


def records_frame(records: Iterable[VerdictRecord], source: str) -> pd.DataFrame:
    """One row per verdict record, tagged with its source."""
    rows = [{"source": source, **record} for record in records]
    return pd.DataFrame(rows, columns=list(REPORT_COLUMNS)).astype(str)


def report_frame(subject: HasRecords, source: str) -> pd.DataFrame:
    """Records of a certificate, verdict table or suite result."""
    if not isinstance(subject, HasRecords):
        raise TypeError(f"{type(subject).__name__} does not render into report rows")
    return records_frame(subject.to_records(), source)


def empty_report() -> pd.DataFrame:
    return pd.DataFrame(columns=list(REPORT_COLUMNS)).astype(str)


def combine_reports(frames: Sequence[pd.DataFrame]) -> pd.DataFrame:
    if not frames:
        return empty_report()
    return pd.concat(frames, ignore_index=True)[list(REPORT_COLUMNS)]


def load_report(path: Path) -> pd.DataFrame:
    """
    Load a certificate.csv, or the one inside a directory.

    Raises:
        FileNotFoundError: no report at the path
        ValueError: the columns are not the report columns
    """
    path = Path(path)
    if path.is_dir():
        path = path / CERTIFICATE_FILE
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    if tuple(frame.columns) != REPORT_COLUMNS:
        raise ValueError(f"{path} is not a report: columns {list(frame.columns)}, expected {list(REPORT_COLUMNS)}")
    return frame


def render_summary(frame: pd.DataFrame) -> str:
    """Human-readable summary: per source, the status counts, conclusions and failures."""
    lines = ["gsinclusion report", "=================="]
    if frame.empty:
        lines.append("no records")
        return "\n".join(lines) + "\n"
    sources = list(dict.fromkeys(frame["source"]))
    lines.append(f"{len(frame)} records from {len(sources)} source(s)")
    for source in sources:
        rows = frame[frame["source"] == source]
        lines.append("")
        lines.append(f"[{source}]")
        conclusions = rows[rows["check"].str.endswith("conclusion")]
        for _, row in conclusions.iterrows():
            lines.append(f"  {row['check']}: {row['status']}")
        counts = rows["status"].value_counts()
        ordered = [status for status in STATUS_ORDER if status in counts.index]
        ordered += sorted(status for status in counts.index if status not in STATUS_ORDER)
        lines.append("  " + ", ".join(f"{status}: {counts[status]}" for status in ordered))
        problems = rows[rows["status"].isin(["failed", "falsified"])]
        for _, row in problems.iterrows():
            note = f" ({row['note']})" if row["note"] else ""
            lines.append(f"  - {row['status']}: {row['check']}{note}")
    return "\n".join(lines) + "\n"


def write_report(frame: pd.DataFrame, out_dir: Path) -> Tuple[Path, Path]:
    """Write certificate.csv and summary.txt; returns both paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / CERTIFICATE_FILE
    summary_path = out_dir / SUMMARY_FILE
    frame[list(REPORT_COLUMNS)].to_csv(csv_path, index=False, lineterminator="\n")
    summary_path.write_text(render_summary(frame), encoding="utf-8")
    return csv_path, summary_path


def load_reports(paths: Sequence[Path]) -> pd.DataFrame:
    frames: List[pd.DataFrame] = [load_report(path) for path in paths]
    return combine_reports(frames)


def conjugate_frame(table: ConjugateTable) -> pd.DataFrame:
    """Covered entries of a conjugate table as columns y, phi_star."""
    return pd.DataFrame({"y": table.covered_y, "phi_star": table.covered_values})


def export_conjugate_table(table: ConjugateTable, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    conjugate_frame(table).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path


def load_conjugate_table(path: Path) -> pd.DataFrame:
    frame = pd.read_csv(path)
    if list(frame.columns) != ["y", "phi_star"]:
        raise ValueError(f"{path} is not a conjugate table: columns {list(frame.columns)}")
    return frame
