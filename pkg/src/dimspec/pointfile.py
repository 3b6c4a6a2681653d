"""Plain-text point files.

Line 1: ``dimspec-pts v1 d=<d> delta=<delta> metric=<metric> label=<label>``,
then one point per line, coordinates separated by a space, 17 significant
digits so every double survives the round trip.
"""

import io

import numpy as np

from .geometry import METRICS, FiniteApprox

MAGIC = "dimspec-pts"
VERSION = "v1"


class PointFileError(ValueError):
    pass


def format_header(F):
    return f"{MAGIC} {VERSION} d={F.d} delta={F.resolution:.17g} metric={F.metric} label={F.label}"


def dumps(F):
    buf = io.StringIO()
    buf.write(format_header(F) + "\n")
    if len(F):
        np.savetxt(buf, F.points, fmt="%.17g", delimiter=" ")
    return buf.getvalue()


def write_points(F, path):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps(F))


def _parse_header(line):
    parts = line.rstrip("\n").split(" ", 5)
    if len(parts) < 6 or parts[0] != MAGIC:
        raise PointFileError("missing dimspec-pts header")
    if parts[1] != VERSION:
        raise PointFileError(f"unsupported version {parts[1]!r}")
    fields = {}
    for part in parts[2:]:
        key, sep, value = part.partition("=")
        if not sep:
            raise PointFileError(f"malformed header field {part!r}")
        fields[key] = value
    try:
        d = int(fields["d"])
        delta = float(fields["delta"])
        metric = fields["metric"]
        label = fields["label"]
    except (KeyError, ValueError) as exc:
        raise PointFileError(f"bad header: {exc}") from None
    if d not in (1, 2):
        raise PointFileError(f"unsupported dimension d={d}")
    if metric not in METRICS:
        raise PointFileError(f"unknown metric {metric!r}")
    return d, delta, metric, label


def loads(text):
    head, _, body = text.partition("\n")
    d, delta, metric, label = _parse_header(head)
    rows = [ln for ln in body.split("\n") if ln.strip()]
    if not rows:
        raise PointFileError("no points")
    tokens = [ln.split() for ln in rows]
    if any(len(t) != d for t in tokens):
        raise PointFileError(f"every point must have {d} coordinates")
    try:
        pts = np.array(tokens, dtype=np.float64)
    except ValueError as exc:
        raise PointFileError(f"bad coordinate: {exc}") from None
    if not np.isfinite(pts).all():
        raise PointFileError("non-finite coordinate")
    return FiniteApprox.from_points(pts, delta, metric, label)


def read_points(path):
    with open(path, encoding="ascii") as fh:
        return loads(fh.read())
