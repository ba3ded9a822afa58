"""File formats: binary IQ streams, key files, and key=value configs.

IQ files are headerless little-endian float32, interleaved I,Q per
complex sample.  Key files hold either hex text (default) or raw bytes.
Config files are `key = value` lines with `#` comments; values stay
strings until an experiment schema coerces them.
"""

from pathlib import Path

import numpy as np

from .errors import IqFormatError, KeyFormatError
from .permcipher import SecretKey


def write_iq(path, samples: np.ndarray) -> None:
    samples = np.asarray(samples, dtype=np.complex128).reshape(-1)
    out = np.empty(2 * samples.size, dtype="<f4")
    out[0::2] = samples.real.astype(np.float32)
    out[1::2] = samples.imag.astype(np.float32)
    Path(path).write_bytes(out.tobytes())


def read_iq(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) % 8:
        raise IqFormatError(
            f"{path}: {len(raw)} bytes is not a whole number of float32 I,Q pairs"
        )
    flat = np.frombuffer(raw, dtype="<f4")
    return (flat[0::2] + 1j * flat[1::2]).astype(np.complex128)


def write_key_file(path, key: SecretKey, hex_text: bool = True) -> None:
    if hex_text:
        Path(path).write_text(key.hex() + "\n")
    else:
        Path(path).write_bytes(key.key_bytes)


def read_key_file(path) -> SecretKey:
    raw = Path(path).read_bytes()
    if not raw:
        raise KeyFormatError(f"{path}: empty key file")
    try:
        text = raw.decode("ascii").strip()
        if text and all(c in "0123456789abcdefABCDEF" for c in text):
            return SecretKey.from_hex(text)
    except UnicodeDecodeError:
        pass
    return SecretKey(raw)


def read_config(path) -> dict:
    """Parse `key = value` lines; keys are lowercased, values raw strings."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip().lower().replace("-", "_")] = value.strip()
    return out


def parse_float_list(text: str) -> tuple:
    return tuple(float(v) for v in text.replace(",", " ").split())


def parse_int_list(text: str) -> tuple:
    return tuple(int(v) for v in text.replace(",", " ").split())


def parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")
