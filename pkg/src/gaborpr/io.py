"""File formats: signal JSON and measurement CSV."""

import csv
import json
from pathlib import Path

import numpy as np

from ._validation import check_signal
from .tfcore import MeasurementSet


def signal_to_dict(x):
    x = check_signal(x)
    return {"n": int(x.shape[0]), "re": [float(v) for v in x.real], "im": [float(v) for v in x.imag]}


def signal_from_dict(d):
    try:
        n, re, im = int(d["n"]), d["re"], d["im"]
    except KeyError as exc:
        raise ValueError(f"signal JSON is missing field {exc}") from None
    if len(re) != n or len(im) != n:
        raise ValueError(f"signal JSON declares n={n} but has {len(re)} real and {len(im)} imaginary parts")
    return check_signal(np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float), n)


def write_signal(path, x):
    Path(path).write_text(json.dumps(signal_to_dict(x)) + "\n")


def read_signal(path):
    return signal_from_dict(json.loads(Path(path).read_text()))


def write_measurements(path, meas):
    """One ``q,j,value`` row per mask entry; values are raw intensities."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["q", "j", "value"])
        for (q, j), v in zip(meas.indices, meas.values):
            writer.writerow([int(q), int(j), repr(float(v))])


def read_measurements(path, n):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["q", "j", "value"]:
            raise ValueError(f"{path}: expected header 'q,j,value', got {reader.fieldnames}")
        rows = [(int(r["q"]), int(r["j"]), float(r["value"])) for r in reader]
    if not rows:
        raise ValueError(f"{path}: no measurement rows")
    idx = np.array([(q, j) for q, j, _ in rows], dtype=np.int64)
    vals = np.array([v for _, _, v in rows])
    return MeasurementSet(n=n, indices=idx, values=vals)
