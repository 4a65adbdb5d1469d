"""Geometry files, CSV formatting and atomic file output."""

import csv
import io
import json
import os
import tempfile

from .errors import GeometryError
from .geometry import validate_geometry

ANGLE_FMT = "%.10f"
LENGTH_FMT = "%.10f"
RESIDUAL_FMT = "%.3e"

CUSP_HEADER = ("alpha_deg", "theta1_deg", "L2", "L3", "res_f1", "res_e1", "res_sing", "dkp_multiplicity")
TRACE_HEADER = ("alpha_deg", "theta1_deg", "L2", "L3", "branch_id")


class InputError(ValueError):
    """Unreadable or malformed input file."""


def load_geometry(path):
    """Validated geometry from a JSON object with the six numeric fields."""
    try:
        with open(path, encoding="utf-8") as fh:
            # keep decimals exact: parse floats as strings
            data = json.load(fh, parse_float=str)
    except OSError as exc:
        raise InputError(f"cannot read geometry file {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"geometry file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"geometry file {path} must hold a JSON object")
    try:
        return validate_geometry(data)
    except GeometryError:
        raise
    except KeyError as exc:
        raise InputError(exc.args[0]) from exc
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad geometry value: {exc}") from exc


def fmt_angle(x):
    return ANGLE_FMT % float(x)


def fmt_length(x):
    return LENGTH_FMT % float(x)


def fmt_residual(x):
    return RESIDUAL_FMT % float(x)


def fmt_l1(x):
    return "%.6f" % float(x)


def cusp_row(c):
    return [
        fmt_angle(c.alpha_deg),
        fmt_angle(c.theta1_deg),
        fmt_length(c.l2),
        fmt_length(c.l3),
        fmt_residual(c.res_f1),
        fmt_residual(c.res_e1),
        fmt_residual(c.res_sing),
        str(c.dkp_multiplicity),
    ]


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cusps_csv(cusps):
    rows = sorted((cusp_row(c) for c in cusps), key=lambda r: float(r[1]))
    return csv_text(CUSP_HEADER, rows)


def trace_csv(rows):
    out = []
    for a, th, l2, l3, bid in rows:
        out.append([fmt_angle(a), fmt_angle(th), fmt_length(l2), fmt_length(l3), str(bid)])
    return csv_text(TRACE_HEADER, out)


def atomic_write(path, text):
    """Write ``text`` to a temporary file next to ``path`` and rename it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


__all__ = [
    "CUSP_HEADER",
    "InputError",
    "TRACE_HEADER",
    "atomic_write",
    "csv_text",
    "cusp_row",
    "cusps_csv",
    "fmt_angle",
    "fmt_l1",
    "fmt_length",
    "fmt_residual",
    "load_geometry",
    "trace_csv",
]
