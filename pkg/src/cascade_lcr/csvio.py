"""CSV emission: UTF-8, LF line endings, atomic temp-then-rename writes."""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile

import numpy as np

from .core import SecondOrderCurve

CURVE_HEADER = ("threshold_db", "threshold_lin", "lcr_normalized", "afd_normalized",
                "method", "lcr_se", "afd_se")


def fmt(v) -> str:
    if v is None:
        return ""
    v = float(v)
    if math.isnan(v):
        return "nan"
    return repr(v)


def curve_rows(curve: SecondOrderCurve, threshold_db, fm_ref: float):
    """Rows of normalised values: ``lcr / fm_ref`` and ``afd * fm_ref``."""
    lcr_se = curve.lcr_se if curve.lcr_se is not None else [None] * len(curve.lcr)
    afd_se = curve.afd_se if curve.afd_se is not None else [None] * len(curve.lcr)
    for db, y, lcr, afd, ls, as_ in zip(threshold_db, curve.threshold, curve.lcr, curve.afd,
                                        lcr_se, afd_se):
        yield (fmt(db), fmt(y), fmt(lcr / fm_ref), fmt(afd * fm_ref), curve.method,
               fmt(None if ls is None else ls / fm_ref), fmt(None if as_ is None else as_ * fm_ref))


def render(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_curve_csv(path) -> dict:
    """Columns of a curve CSV as arrays (``method`` stays a list of strings)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    out = {}
    for key in rows[0].keys() if rows else ():
        col = [r[key] for r in rows]
        if key == "method":
            out[key] = col
        else:
            out[key] = np.array([float(v) if v != "" else np.nan for v in col])
    return out
