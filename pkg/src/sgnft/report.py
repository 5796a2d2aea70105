"""Report assembly and JSON/CSV emission."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .core import classify_region


@dataclass
class Report:
    command: str
    config: dict
    samples: list = field(default_factory=list)
    residuals: dict = field(default_factory=dict)
    slopes: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    started: str = ""

    def add_sample(self, k, values: dict, region=None):
        k = complex(k)
        flat = {}
        for name, v in values.items():
            if v is None:
                continue
            if isinstance(v, (complex, np.complexfloating)):
                flat[f"{name}_re"] = float(v.real)
                flat[f"{name}_im"] = float(v.imag)
            else:
                flat[name] = float(v)
        self.samples.append({"k_re": k.real, "k_im": k.imag,
                             "region": region or classify_region(k), "values": flat})

    def to_dict(self, finished=None):
        return _clean({
            "meta": {
                "version": __version__,
                "command": self.command,
                "config_echo": self.config,
                "timestamps": {"started": self.started, "finished": finished or now()},
            },
            "samples": self.samples,
            "residuals": self.residuals,
            "slopes": self.slopes,
            "summary": self.summary,
        })


def now():
    return datetime.now(timezone.utc).isoformat()


def _clean(obj):
    """Replace non-finite floats by None and complex numbers by {re, im} pairs."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    try:
        x = float(obj)
    except (TypeError, ValueError):
        return str(obj)
    return x if math.isfinite(x) else None


def render_json(report: Report, finished=None) -> str:
    # repr-based float output is the shortest string that round-trips exactly (<= 17 digits)
    return json.dumps(report.to_dict(finished), indent=2, sort_keys=False) + "\n"


def render_csv(report: Report) -> str:
    """Sample table when samples exist, otherwise a name,value table of residuals and summary."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if report.samples:
        fields = []
        for s in report.samples:
            for name in s["values"]:
                if name not in fields:
                    fields.append(name)
        writer.writerow(["k_re", "k_im", "region"] + fields)
        for s in report.samples:
            row = [repr(float(s["k_re"])), repr(float(s["k_im"])), s["region"]]
            row += [repr(s["values"][f]) if f in s["values"] else "" for f in fields]
            writer.writerow(row)
    else:
        writer.writerow(["name", "value"])
        flat = dict(report.residuals)
        flat.update({f"slope:{n}": s.get("slope") for n, s in report.slopes.items()})
        flat.update(report.summary)
        for name, value in flat.items():
            if isinstance(value, (complex, np.complexfloating)):
                writer.writerow([f"{name}_re", _cell(value.real)])
                writer.writerow([f"{name}_im", _cell(value.imag)])
            else:
                writer.writerow([name, _cell(value)])
    return buf.getvalue()


def _cell(value):
    value = _clean(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value)
    return value


def emit_report(report: Report, fmt="json", path=None, finished=None):
    """Render and write the report; returns the text.  ``path=None`` returns without writing."""
    if fmt not in ("json", "csv"):
        raise ValueError(f"unknown report format {fmt!r}")
    text = render_json(report, finished) if fmt == "json" else render_csv(report)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
