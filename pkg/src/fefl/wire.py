"""Length-prefixed big-endian byte encoding for key and ciphertext material.

Every big integer is written as a 4-byte big-endian length followed by the
magnitude bytes. Byte counts produced by these encoders are what the
simulator reports as transferred ciphertext volume.
"""

from __future__ import annotations

import struct


def put_uint(buf: bytearray, value: int, width: int = 4) -> None:
    buf += int(value).to_bytes(width, "big")


def put_bigint(buf: bytearray, value: int) -> None:
    value = int(value)
    if value < 0:
        raise ValueError("wire format carries non-negative integers only")
    raw = value.to_bytes((value.bit_length() + 7) // 8 or 1, "big")
    buf += len(raw).to_bytes(4, "big")
    buf += raw


def put_int64(buf: bytearray, value: int) -> None:
    buf += struct.pack(">q", value)


def put_double(buf: bytearray, value: float) -> None:
    buf += struct.pack(">d", value)


class Reader:
    """Sequential reader matching the ``put_*`` helpers."""

    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def _take(self, n: int) -> bytes:
        if self._pos + n > len(self._data):
            raise ValueError("truncated wire payload")
        out = self._data[self._pos:self._pos + n]
        self._pos += n
        return out

    def uint(self, width: int = 4) -> int:
        return int.from_bytes(self._take(width), "big")

    def bigint(self) -> int:
        length = self.uint(4)
        return int.from_bytes(self._take(length), "big")

    def int64(self) -> int:
        return struct.unpack(">q", self._take(8))[0]

    def double(self) -> float:
        return struct.unpack(">d", self._take(8))[0]

    def done(self) -> bool:
        return self._pos == len(self._data)
