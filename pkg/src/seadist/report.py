"""Render eval/track reports (as loaded from their structured JSON form)."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Dict, Iterable, List, Optional, Tuple

from .errors import SeadistError

FORMATS = ("table", "csv", "structured")


def _finite_json(v):
    # JSON has no infinities; write them the way bin edges are written
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, dict):
        return {k: _finite_json(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_finite_json(x) for x in v]
    return v


def dumps_structured(report: Dict[str, Any]) -> str:
    return json.dumps(_finite_json(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


def loads_report(text: str) -> Dict[str, Any]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SeadistError(f"report is not valid JSON: {e.msg}") from None
    if not isinstance(data, dict) or data.get("kind") not in ("eval", "track"):
        raise SeadistError("not a seadist report (missing kind eval/track)")
    return data


def _sections(report: Dict[str, Any]) -> List[Tuple[str, Dict[str, Any]]]:
    if report["kind"] == "track":
        return [("raw", report["raw"]), ("smoothed", report["smoothed"])]
    return [(report.get("method", "eval"), report)]


def _fmt(v: Optional[float], spec: str = ".3f") -> str:
    if v is None:
        return "-"
    if isinstance(v, str):
        return v
    return format(v, spec)


def _pct(v: Optional[float]) -> str:
    return "-" if v is None else f"{100 * v:.1f}"


def _grid(header: List[str], rows: Iterable[List[str]]) -> str:
    rows = [header] + [list(r) for r in rows]
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = []
    for k, r in enumerate(rows):
        lines.append("  ".join(c.rjust(w) if i else c.ljust(w)
                               for i, (c, w) in enumerate(zip(r, widths))))
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _bin_label(b: Dict[str, Any]) -> str:
    hi = b["hi"]
    return f"{b['lo']:g}-{hi if hi == 'inf' else format(hi, 'g')}"


def render_table(report: Dict[str, Any]) -> str:
    out = []
    sections = _sections(report)
    first = sections[0][1]
    out.append(f"sequence: {first['sequence_id']}")
    cfg = first["config"]
    out.append(f"iou threshold: {cfg['iou_threshold']}  outliers: {cfg['outlier_definition']}")
    if report["kind"] == "track":
        t = report["tracker"]
        out.append("tracker: " + ", ".join(f"{k}={t[k]}" for k in sorted(t))
                   + f"  tracks={report['num_tracks']}")
    out.append("")

    out.append(_grid(
        ["method", "Pr", "Re", f"mAP@{cfg['iou_threshold']}", "mAP@.5:.95"],
        [[name, _fmt(s["precision"]), _fmt(s["recall"]), _fmt(s["map_at_iou"]),
          _fmt(s["map_50_95"])] for name, s in sections],
    ))
    out.append("")
    out.append(_grid(
        ["method", "E (m)", "MDE (m)", "Outl. (%)", "MAPE (%)", "pairs"],
        [[name, _fmt((s["distance"] or {}).get("weighted_error_m"), ".2f"),
          _fmt((s["distance"] or {}).get("mde_m"), ".2f"),
          _pct((s["distance"] or {}).get("outlier_rate")),
          _pct((s["distance"] or {}).get("mape")),
          str(s["counts"]["distance_pairs"])] for name, s in sections],
    ))
    for name, s in sections:
        out.append("")
        out.append(f"[{name}] weighted distance error by distance interval (m)")
        classes = sorted(s["binned_by_class"])
        bins = s["binned"]["bins"]
        rows = []
        for k, b in enumerate(bins):
            row = [_bin_label(b)]
            for c in classes:
                row.append(_fmt(s["binned_by_class"][c]["bins"][k]["weighted_error_m"], ".1f"))
            row.append(_fmt(b["weighted_error_m"], ".1f"))
            row.append(_fmt(b["mde_m"], ".1f"))
            row.append(str(b["count"]))
            rows.append(row)
        out.append(_grid(["dist"] + classes + ["all E", "all MDE", "n"], rows))
    return "\n".join(out) + "\n"


CSV_COLUMNS = ["method", "class", "lo", "hi", "count", "weighted_error_m",
               "mde_m", "outlier_rate", "mae_m", "mape"]


def render_csv(report: Dict[str, Any]) -> str:
    """Binned distance-error tables, one row per (method, class, bin)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for name, s in _sections(report):
        groups = [("all", s["binned"])] + sorted(s["binned_by_class"].items())
        for cls, binned in groups:
            for b in binned["bins"]:
                w.writerow([name, cls, b["lo"], b["hi"], b["count"]]
                           + ["" if b[k] is None else repr(b[k]) for k in CSV_COLUMNS[5:]])
    return buf.getvalue()


def render(report: Dict[str, Any], fmt: str) -> str:
    if fmt == "table":
        return render_table(report)
    if fmt == "csv":
        return render_csv(report)
    if fmt == "structured":
        return dumps_structured(report)
    raise SeadistError(f"unknown report format {fmt!r}; choose from {', '.join(FORMATS)}")
