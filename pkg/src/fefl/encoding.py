"""Fixed-point conversion between float model parameters and group exponents.

Floats are scaled by 10^precision and rounded half away from zero; negative
values map to order - |v| so that sums of encodings decode to signed sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import EncodingError


@dataclass(frozen=True)
class FixedPointCodec:
    """Decimal fixed-point codec into Z_order."""

    precision_digits: int
    order: int

    @property
    def scale(self) -> int:
        return 10 ** self.precision_digits


@dataclass(frozen=True)
class EncodedVector:
    coords: Tuple[int, ...]
    codec: FixedPointCodec

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return len(self.coords)


def _round_half_away(value: float, scale: int) -> int:
    scaled = abs(value) * scale
    magnitude = int(math.floor(scaled + 0.5))
    return -magnitude if value < 0 else magnitude


def encode_vector(codec: FixedPointCodec, reals: Sequence[float]) -> EncodedVector:
    """Encode floats as integers in [0, order).

    Magnitudes must satisfy |v| * scale < order / 2 so that signed sums stay
    recoverable via the centered lift.
    """
    scale = codec.scale
    half = codec.order // 2
    coords = []
    for v in reals:
        q = _round_half_away(float(v), scale)
        if abs(q) >= half:
            raise EncodingError(
                f"value {v!r} overflows fixed-point range at precision "
                f"{codec.precision_digits}")
        coords.append(q % codec.order)
    return EncodedVector(coords=tuple(coords), codec=codec)


def decode_average(sums: Sequence[int], responder_count: int,
                   codec: FixedPointCodec) -> np.ndarray:
    """Turn decrypted signed coordinate sums into the float average."""
    if responder_count < 1:
        raise ValueError("responder_count must be at least 1")
    divisor = float(responder_count * codec.scale)
    return np.asarray([int(s) / divisor for s in sums], dtype=np.float64)
