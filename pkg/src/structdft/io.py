"""
On-disk formats.

Signals are stored either as binary (little-endian uint64 length header
followed by interleaved float64 real/imaginary parts) or as CSV with one
``re,im`` pair per line.  Sparse spectra are JSON objects
``{"n": N, "coeffs": {"index": [re, im], ...}}``.
"""

import json
from pathlib import Path

import numpy as np

from .core import SupportSet
from .errors import InvalidInputError

_HEADER = np.dtype("<u8")
_BODY = np.dtype("<f8")


def write_signal(path, f):
    """Write a complex signal; the format follows the suffix (``.csv`` or binary)."""
    path = Path(path)
    f = np.asarray(f, dtype=complex).ravel()
    if path.suffix.lower() == ".csv":
        with path.open("w") as fh:
            for z in f:
                fh.write(f"{float(z.real)!r},{float(z.imag)!r}\n")
        return path
    inter = np.empty(2 * f.size, dtype=_BODY)
    inter[0::2] = f.real
    inter[1::2] = f.imag
    with path.open("wb") as fh:
        fh.write(np.array([f.size], dtype=_HEADER).tobytes())
        fh.write(inter.tobytes())
    return path


def read_signal(path):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        try:
            data = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
        except ValueError as exc:
            raise InvalidInputError(f"{path}: bad signal CSV ({exc})") from None
        if data.shape[1] != 2:
            raise InvalidInputError(f"{path}: expected two columns re,im")
        return data[:, 0] + 1j * data[:, 1]
    raw = path.read_bytes()
    if len(raw) < 8:
        raise InvalidInputError(f"{path}: truncated header")
    n = int(np.frombuffer(raw[:8], dtype=_HEADER)[0])
    body = np.frombuffer(raw[8:], dtype=_BODY)
    if body.size != 2 * n:
        raise InvalidInputError(f"{path}: header says {n} samples, body holds {body.size / 2}")
    return body[0::2] + 1j * body[1::2]


def spectrum_to_dict(coeffs, n):
    return {
        "n": int(n),
        "coeffs": {str(j): [float(complex(c).real), float(complex(c).imag)]
                   for j, c in sorted(coeffs.items())},
    }


def spectrum_from_dict(obj):
    try:
        n = int(obj["n"])
        coeffs = {int(j): complex(re, im) for j, (re, im) in obj["coeffs"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed spectrum object: {exc}") from None
    return coeffs, n


def write_spectrum(path, coeffs, n):
    path = Path(path)
    path.write_text(json.dumps(spectrum_to_dict(coeffs, n), indent=2))
    return path


def read_spectrum(path):
    return spectrum_from_dict(json.loads(Path(path).read_text()))


def matrix_to_json(a):
    """Complex matrix as nested lists of [re, im] pairs."""
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def parse_support(text, n):
    """
    Support from an inline comma list (``"0,1,6"``) or a JSON file holding
    a list of integers.
    """
    text = str(text).strip()
    path = Path(text)
    if text.endswith(".json") or (path.exists() and path.is_file()):
        try:
            values = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInputError(f"cannot read support file {text}: {exc}") from None
        if isinstance(values, dict):
            values = values.get("support", values.get("indices"))
        if not isinstance(values, list):
            raise InvalidInputError(f"{text}: expected a JSON list of integers")
    else:
        try:
            values = [int(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise InvalidInputError(f"support {text!r} is not a comma-separated list") from None
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        raise InvalidInputError("support entries must be integers")
    return SupportSet.from_iterable(values, n)
