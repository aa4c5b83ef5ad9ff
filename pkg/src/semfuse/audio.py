"""Minimal RIFF/WAVE reader and writer.

Accepts mono 16-bit PCM and 32-bit IEEE float files; anything else
(stereo, other sample formats) is rejected with an explicit error
rather than silently downmixed.
"""

from __future__ import annotations

import struct

import numpy as np

FORMAT_PCM = 1
FORMAT_IEEE_FLOAT = 3


class WavFormatError(ValueError):
    """WAV file is malformed or uses an unsupported encoding."""


def read_wav(path) -> tuple[np.ndarray, int]:
    """Read a mono WAV file; returns (float64 samples in [-1, 1], sample rate)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    offset = 12
    while offset + 8 <= len(data):
        chunk_id = data[offset : offset + 4]
        (chunk_size,) = struct.unpack("<I", data[offset + 4 : offset + 8])
        body = data[offset + 8 : offset + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise WavFormatError(f"{path}: truncated fmt chunk")
            fmt = struct.unpack("<HHIIHH", body[:16])
        elif chunk_id == b"data":
            payload = body
        # chunks are word-aligned
        offset += 8 + chunk_size + (chunk_size % 2)

    if fmt is None or payload is None:
        raise WavFormatError(f"{path}: missing fmt or data chunk")
    audio_format, channels, sample_rate, _, _, bits = fmt
    if channels != 1:
        raise WavFormatError(
            f"{path}: {channels} channels; only mono input is supported"
        )
    if audio_format == FORMAT_PCM and bits == 16:
        samples = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    elif audio_format == FORMAT_IEEE_FLOAT and bits == 32:
        samples = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise WavFormatError(
            f"{path}: unsupported encoding (format={audio_format}, bits={bits}); "
            "expected 16-bit PCM or 32-bit float"
        )
    return samples, sample_rate


def write_wav(path, samples, sample_rate: int, float32: bool = False) -> None:
    """Write mono samples (floats in [-1, 1]) as 16-bit PCM or 32-bit float."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 1:
        raise ValueError("samples must be a 1-D mono stream")
    if not np.isfinite(samples).all():
        raise ValueError("samples contain non-finite values")

    if float32:
        payload = samples.astype("<f4").tobytes()
        audio_format, bits = FORMAT_IEEE_FLOAT, 32
    else:
        clipped = np.clip(samples, -1.0, 32767.0 / 32768.0)
        payload = (np.round(clipped * 32768.0).astype("<i2")).tobytes()
        audio_format, bits = FORMAT_PCM, 16

    block_align = bits // 8
    byte_rate = sample_rate * block_align
    fmt_chunk = struct.pack(
        "<HHIIHH", audio_format, 1, sample_rate, byte_rate, block_align, bits
    )
    with open(path, "wb") as fh:
        fh.write(b"RIFF")
        fh.write(struct.pack("<I", 4 + 8 + len(fmt_chunk) + 8 + len(payload)))
        fh.write(b"WAVE")
        fh.write(b"fmt ")
        fh.write(struct.pack("<I", len(fmt_chunk)))
        fh.write(fmt_chunk)
        fh.write(b"data")
        fh.write(struct.pack("<I", len(payload)))
        fh.write(payload)
        if len(payload) % 2:
            fh.write(b"\x00")
