"""File formats for waveforms and extracted keys.

Waveforms travel either as text csv (one amplitude per line, full float
precision) or as a binary container: the 8-byte magic ``SLKDWAV1``, a
little-endian u32 sample count, then that many little-endian f32 samples.
The binary form is compact but rounds to single precision; csv round-trips
float64 exactly.

Keys default to a binary container: the 8-byte magic ``SLKDKEY1`` followed
by a little-endian u32 bit count and four reserved zero bytes (a fixed
16-byte header), then the key bits packed most-significant-bit first.  A
hex text form is also accepted and produced on request; it carries no
explicit bit count, so it round-trips exactly only for keys whose bit count
is a multiple of eight (the default key length is).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core import BitKey, DataError, Waveform

__all__ = [
    "WAVE_MAGIC",
    "KEY_MAGIC",
    "read_waveform",
    "read_waveform_csv",
    "read_waveform_binary",
    "write_waveform_csv",
    "write_waveform_binary",
    "read_key",
    "write_key",
]

WAVE_MAGIC = b"SLKDWAV1"
KEY_MAGIC = b"SLKDKEY1"
_WAVE_HEADER = struct.Struct("<8sI")
_KEY_HEADER = struct.Struct("<8sI4x")


def write_waveform_csv(path, wave: Waveform) -> None:
    """Write one amplitude per line; round-trips float64 exactly."""
    path = Path(path)
    path.write_text("".join(repr(float(x)) + "\n" for x in wave.samples))


def read_waveform_csv(path, label: str = "") -> Waveform:
    path = Path(path)
    values = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        text = line.strip()
        if not text:
            continue
        try:
            values.append(float(text))
        except ValueError:
            raise DataError(f"{path}:{lineno}: not a number: {text!r}") from None
    if not values:
        raise DataError(f"{path}: no samples")
    return Waveform(np.asarray(values, dtype=np.float64), label=label or path.name)


def write_waveform_binary(path, wave: Waveform) -> None:
    """Write the ``SLKDWAV1`` container; samples round to float32."""
    path = Path(path)
    samples = np.asarray(wave.samples, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(_WAVE_HEADER.pack(WAVE_MAGIC, samples.size))
        fh.write(samples.tobytes())


def read_waveform_binary(path, label: str = "") -> Waveform:
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < _WAVE_HEADER.size:
        raise DataError(f"{path}: truncated header")
    magic, count = _WAVE_HEADER.unpack_from(blob)
    if magic != WAVE_MAGIC:
        raise DataError(f"{path}: bad magic {magic!r}, expected {WAVE_MAGIC!r}")
    body = blob[_WAVE_HEADER.size :]
    if len(body) != 4 * count:
        raise DataError(
            f"{path}: expected {4 * count} sample bytes, found {len(body)}"
        )
    samples = np.frombuffer(body, dtype="<f4").astype(np.float64)
    if samples.size == 0:
        raise DataError(f"{path}: no samples")
    return Waveform(samples, label=label or path.name)


def read_waveform(path, label: str = "") -> Waveform:
    """Read either waveform format, sniffing the binary magic."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(len(WAVE_MAGIC))
    if head == WAVE_MAGIC:
        return read_waveform_binary(path, label=label)
    return read_waveform_csv(path, label=label)


def write_key(path, key: BitKey, hex: bool = False) -> None:
    path = Path(path)
    if hex:
        path.write_text(key.to_hex() + "\n")
        return
    with open(path, "wb") as fh:
        fh.write(_KEY_HEADER.pack(KEY_MAGIC, len(key)))
        fh.write(key.to_bytes())


def read_key(path) -> BitKey:
    """Read a key file, accepting either the binary container or hex text."""
    path = Path(path)
    blob = path.read_bytes()
    if not blob.startswith(KEY_MAGIC):
        text = blob.decode("ascii", errors="replace").strip()
        try:
            packed = bytes.fromhex(text)
        except ValueError:
            raise DataError(f"{path}: neither a {KEY_MAGIC!r} container nor hex text") from None
        if not packed:
            raise DataError(f"{path}: empty key")
        return BitKey.from_bytes(packed, 8 * len(packed))
    if len(blob) < _KEY_HEADER.size:
        raise DataError(f"{path}: truncated header")
    magic, nbits = _KEY_HEADER.unpack_from(blob)
    body = blob[_KEY_HEADER.size :]
    expected = (nbits + 7) // 8
    if len(body) != expected:
        raise DataError(f"{path}: expected {expected} key bytes, found {len(body)}")
    return BitKey.from_bytes(body, nbits)
