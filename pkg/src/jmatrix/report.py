"""Report emission: delimited scan tables (CSV/JSON) and rendered figures.

CSV is the primary format; every floating value is printed with 17
significant digits so files round-trip float64 exactly and reruns are
byte-identical. The optional figure rendering writes a PNG next to the
delimited output through the non-interactive matplotlib backend.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .scattering import PhaseRow, ScanTable

__all__ = [
    "scan_to_csv",
    "scan_to_json",
    "phase_to_csv",
    "phase_to_json",
    "render_scan_plot",
    "render_phase_plot",
    "write_text",
]

SCAN_COLUMNS = ("energy", "re_s", "im_s", "abs_one_minus_s", "tau", "delta", "mode")
PHASE_COLUMNS = ("energy", "tau_analytic", "tau_numeric", "defect")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _json_value(value):
    if value is None:
        return None
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def _scan_records(table: ScanTable) -> list[dict]:
    modes = ("full", "truncated") if table.mode == "both" else (table.mode,)
    records = []
    for point in table.points:
        for mode in modes:
            s = point.s_full if mode == "full" else point.s_truncated
            delta = point.delta if mode == "full" else point.delta_truncated
            records.append({
                "energy": point.energy,
                "re_s": s.real,
                "im_s": s.imag,
                "abs_one_minus_s": abs(1.0 - s) if s == s else math.nan,
                "tau": point.tau,
                "delta": delta,
                "mode": mode,
                "status": point.status,
            })
    return records


def _with_status(records: list[dict], columns: tuple) -> tuple:
    if any(r["status"] != "ok" for r in records):
        return columns + ("status",)
    return columns


def scan_to_csv(table: ScanTable) -> str:
    """Scan table as CSV text; a ``status`` column appears only when some
    row deviates from plain success."""
    records = _scan_records(table)
    columns = _with_status(records, SCAN_COLUMNS)
    lines = [",".join(columns)]
    for r in records:
        lines.append(",".join(_fmt(r[c]) for c in columns))
    return "\n".join(lines) + "\n"


def scan_to_json(table: ScanTable, config_echo: dict) -> str:
    """Scan table as JSON: per-column arrays plus the resolved config."""
    records = _scan_records(table)
    columns = _with_status(records, SCAN_COLUMNS)
    payload = {
        "config": config_echo,
        "columns": {c: [_json_value(r[c]) for r in records] for c in columns},
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _phase_records(rows) -> list[dict]:
    return [{
        "energy": row.energy,
        "tau_analytic": row.tau_analytic,
        "tau_numeric": row.tau_numeric,
        "defect": row.defect,
        "status": row.status,
    } for row in rows]


def phase_to_csv(rows: tuple[PhaseRow, ...]) -> str:
    """Phase table as CSV; the analytic column is empty for deformation
    kinds without a closed form."""
    records = _phase_records(rows)
    columns = _with_status(records, PHASE_COLUMNS)
    lines = [",".join(columns)]
    for r in records:
        lines.append(",".join(_fmt(r[c]) for c in columns))
    return "\n".join(lines) + "\n"


def phase_to_json(rows: tuple[PhaseRow, ...], config_echo: dict) -> str:
    records = _phase_records(rows)
    columns = _with_status(records, PHASE_COLUMNS)
    payload = {
        "config": config_echo,
        "columns": {c: [_json_value(r[c]) for r in records] for c in columns},
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_text(path: str, content: str):
    """Single atomic-enough write; parent directories are created."""
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(content)


def _pyplot():
    import matplotlib
    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt
    return plt


def render_scan_plot(table: ScanTable, path: str):
    """|1 - S| versus energy; solid for the full route, dashed truncated."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    modes = ("full", "truncated") if table.mode == "both" else (table.mode,)
    styles = {"full": "-", "truncated": "--"}
    for mode in modes:
        xs, ys = [], []
        for p in table.points:
            if p.failed:
                continue
            s = p.s_full if mode == "full" else p.s_truncated
            xs.append(p.energy)
            ys.append(abs(1.0 - s))
        ax.plot(xs, ys, styles[mode], color="k", label=mode)
    ax.set_xlabel("E (hartree)")
    ax.set_ylabel("|1 - S|")
    ax.set_xlim(table.grid.emin, table.grid.emax)
    ax.legend(frameon=False)
    ax.grid(alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_phase_plot(rows: tuple[PhaseRow, ...], path: str):
    """Transformation phase versus energy, numeric engine plus closed form."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    good = [r for r in rows if not r.failed]
    ax.plot([r.energy for r in good], [r.tau_numeric for r in good],
            "-", color="k", label="numeric")
    closed = [r for r in good if r.tau_analytic is not None]
    if closed:
        ax.plot([r.energy for r in closed], [r.tau_analytic for r in closed],
                "--", color="0.4", label="closed form")
    ax.set_xlabel("E (hartree)")
    ax.set_ylabel("tau (rad)")
    ax.legend(frameon=False)
    ax.grid(alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
