"""Bit-exact 2-D array files and the line-delimited utterance manifest.

Array files use the plain ".npy" v1.0 container (magic ``\\x93NUMPY``,
little-endian float32/float64, C order, 2-D only) so that any LM-side
dumper can produce them and any numpy-speaking tool can read them back.
The writer is canonical: the same matrix always yields the same bytes.
"""

from __future__ import annotations

import ast
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"\x93NUMPY"
VERSION = (1, 0)
HEADER_ALIGN = 64

_SUPPORTED_DESCRS = {"<f4": np.float32, "<f8": np.float64}


class ArrayFormatError(ValueError):
    """Array file violates the container format.

    ``field`` names the offending header field ("magic", "version",
    "descr", "fortran_order", "shape").
    """

    def __init__(self, field_name: str, message: str):
        super().__init__(message)
        self.field = field_name


class BadMagicError(ArrayFormatError):
    def __init__(self, message):
        super().__init__("magic", message)


class UnsupportedVersionError(ArrayFormatError):
    def __init__(self, message):
        super().__init__("version", message)


class UnsupportedDTypeError(ArrayFormatError):
    def __init__(self, message):
        super().__init__("descr", message)


class FortranOrderError(ArrayFormatError):
    def __init__(self, message):
        super().__init__("fortran_order", message)


class BadShapeError(ArrayFormatError):
    def __init__(self, message):
        super().__init__("shape", message)


class ManifestError(ValueError):
    """Manifest file is malformed (bad line, duplicate id, ...)."""


def _check_matrix(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    if values.ndim != 2:
        raise BadShapeError(f"expected a 2-D matrix, got ndim={values.ndim}")
    if values.shape[0] < 1 or values.shape[1] < 1:
        raise BadShapeError(f"matrix must be at least 1x1, got shape {values.shape}")
    if not np.isfinite(values).all():
        raise ValueError("matrix contains non-finite values")
    return values


def _build_header(descr: str, shape: tuple[int, int]) -> bytes:
    # Keys in fixed order, padded with spaces so the whole preamble
    # (magic + version + length field + header) is 64-byte aligned.
    header = "{'descr': %s, 'fortran_order': False, 'shape': %s, }" % (
        repr(descr),
        repr(shape),
    )
    unpadded = len(MAGIC) + 2 + 2 + len(header) + 1
    pad = (-unpadded) % HEADER_ALIGN
    return (header + " " * pad + "\n").encode("ascii")


def write_array(values: np.ndarray, path, dtype: str = "<f4") -> None:
    """Write a 2-D matrix to ``path`` in the canonical array container.

    ``dtype`` selects the storage element type ('<f4' or '<f8'); values
    are cast on write. Two writes of the same matrix produce
    byte-identical files. Non-finite values are rejected before any
    bytes are written.
    """
    values = _check_matrix(values)
    if dtype not in _SUPPORTED_DESCRS:
        raise UnsupportedDTypeError(f"unsupported storage dtype {dtype!r}")
    elements = np.ascontiguousarray(values, dtype=np.dtype(dtype))
    header = _build_header(dtype, (values.shape[0], values.shape[1]))
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(bytes(VERSION))
        fh.write(struct.pack("<H", len(header)))
        fh.write(header)
        fh.write(elements.tobytes(order="C"))


def read_array(path) -> np.ndarray:
    """Read a 2-D matrix written by :func:`write_array` (or numpy).

    Returns the stored values at their stored precision, shape intact.
    Only little-endian float32/float64, C-order, 2-D arrays are
    accepted; anything else raises a format error naming the offending
    header field.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 10 or data[:6] != MAGIC:
        raise BadMagicError(f"{path}: not an array file (bad magic bytes)")
    version = (data[6], data[7])
    if version != VERSION:
        raise UnsupportedVersionError(
            f"{path}: unsupported format version {version[0]}.{version[1]}"
        )
    (header_len,) = struct.unpack("<H", data[8:10])
    header_end = 10 + header_len
    if len(data) < header_end:
        raise ArrayFormatError("header", f"{path}: truncated header")
    try:
        header_text = data[10:header_end].decode("ascii")
        header = ast.literal_eval(header_text.strip())
        if not isinstance(header, dict):
            raise ValueError
    except (ValueError, SyntaxError):
        raise ArrayFormatError("header", f"{path}: unparseable header dict")

    descr = header.get("descr")
    if descr not in _SUPPORTED_DESCRS:
        raise UnsupportedDTypeError(f"{path}: unsupported descr {descr!r}")
    if header.get("fortran_order") is not False:
        raise FortranOrderError(
            f"{path}: fortran_order={header.get('fortran_order')!r}, only C order is supported"
        )
    shape = header.get("shape")
    if (
        not isinstance(shape, tuple)
        or len(shape) != 2
        or not all(isinstance(n, int) and n >= 1 for n in shape)
    ):
        raise BadShapeError(f"{path}: shape {shape!r} is not a 2-D shape")

    dtype = np.dtype(descr)
    expected = shape[0] * shape[1] * dtype.itemsize
    payload = data[header_end:]
    if len(payload) != expected:
        raise BadShapeError(
            f"{path}: payload is {len(payload)} bytes, shape {shape} needs {expected}"
        )
    values = np.frombuffer(payload, dtype=dtype).reshape(shape)
    return values.copy()


# --- manifest -----------------------------------------------------------

# Known record fields, in serialization order.
_RECORD_FIELDS = (
    "utt_id",
    "transcript",
    "phonemes",
    "audio_path",
    "hs_text_path",
    "hs_phoneme_path",
    "hs_eis_e_path",
    "hs_eis_i_path",
    "hs_eis_s_path",
    "hs_eis_sentence_path",
    "emotion_annotated",
    "emotion_predicted",
)


@dataclass
class UtteranceRecord:
    """One utterance: transcript, audio, and dumped tensor locations.

    Unknown manifest fields survive round-trips verbatim in ``extra``.
    """

    utt_id: str
    transcript: str = ""
    phonemes: str | None = None
    audio_path: str | None = None
    hs_text_path: str | None = None
    hs_phoneme_path: str | None = None
    hs_eis_e_path: str | None = None
    hs_eis_i_path: str | None = None
    hs_eis_s_path: str | None = None
    hs_eis_sentence_path: str | None = None
    emotion_annotated: str | None = None
    emotion_predicted: str | None = None
    extra: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        obj = {"utt_id": self.utt_id, "transcript": self.transcript}
        for name in _RECORD_FIELDS[2:]:
            value = getattr(self, name)
            if value is not None:
                obj[name] = value
        obj.update(self.extra)
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "UtteranceRecord":
        utt_id = obj.get("utt_id")
        if not isinstance(utt_id, str) or not utt_id:
            raise ManifestError("record is missing a non-empty utt_id")
        known = {name: obj[name] for name in _RECORD_FIELDS if name in obj}
        extra = {k: v for k, v in obj.items() if k not in _RECORD_FIELDS}
        known.setdefault("transcript", "")
        return cls(extra=extra, **known)


def read_manifest(path) -> list[UtteranceRecord]:
    """Read a line-delimited manifest; one JSON object per line.

    Record order is preserved. Duplicate utt_ids and malformed lines
    are reported with their line number.
    """
    records = []
    seen = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{lineno}: malformed JSON line: {exc}")
            if not isinstance(obj, dict):
                raise ManifestError(f"{path}:{lineno}: line is not a JSON object")
            record = UtteranceRecord.from_json_obj(obj)
            if record.utt_id in seen:
                raise ManifestError(f"{path}:{lineno}: duplicate utt_id {record.utt_id!r}")
            seen.add(record.utt_id)
            records.append(record)
    return records


def write_manifest(records, path) -> None:
    """Write records as UTF-8 JSON lines, preserving order and extras."""
    seen = set()
    lines = []
    for record in records:
        if record.utt_id in seen:
            raise ManifestError(f"duplicate utt_id {record.utt_id!r}")
        seen.add(record.utt_id)
        lines.append(json.dumps(record.to_json_obj(), ensure_ascii=False))
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def validate_record_paths(record: UtteranceRecord, base_dir=None) -> list[str]:
    """Return human-readable problems for tensor/audio paths that do not resolve."""
    problems = []
    base = Path(base_dir) if base_dir is not None else Path(".")
    for name in _RECORD_FIELDS:
        if not name.endswith("_path"):
            continue
        value = getattr(record, name)
        if value is None:
            continue
        target = Path(value)
        if not target.is_absolute():
            target = base / target
        if not target.exists():
            problems.append(f"{name}: {value} does not exist")
            continue
        if name != "audio_path":
            try:
                read_array(target)
            except (ArrayFormatError, ValueError) as exc:
                problems.append(f"{name}: {value} is not a readable array ({exc})")
    return problems
