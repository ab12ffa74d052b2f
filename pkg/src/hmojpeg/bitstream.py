"""Bit-level I/O for JPEG entropy-coded segments, with 0xFF byte stuffing."""

from __future__ import annotations

from .model import HmojpegError


class EntropyError(HmojpegError):
    """Corrupt entropy-coded data (bad stuffing or an impossible code)."""


class TruncatedError(HmojpegError):
    """The stream ended before the expected amount of data."""


class BitWriter:
    """MSB-first bit writer that stuffs a 0x00 after every 0xFF data byte."""

    def __init__(self):
        self.buf = bytearray()
        self._acc = 0
        self._nbits = 0
        self.data_bits = 0      # bits handed to write(), excluding stuffing/padding

    def write(self, value: int, nbits: int) -> None:
        if nbits == 0:
            return
        if value >> nbits:
            raise ValueError(f"value {value} does not fit in {nbits} bits")
        self.data_bits += nbits
        self._acc = (self._acc << nbits) | value
        self._nbits += nbits
        while self._nbits >= 8:
            self._nbits -= 8
            byte = (self._acc >> self._nbits) & 0xFF
            self.buf.append(byte)
            if byte == 0xFF:
                self.buf.append(0x00)
        self._acc &= (1 << self._nbits) - 1

    def flush(self) -> bytes:
        """Pad the final partial byte with 1-bits and return the segment."""
        if self._nbits:
            pad = 8 - self._nbits
            byte = ((self._acc << pad) | ((1 << pad) - 1)) & 0xFF
            self.buf.append(byte)
            if byte == 0xFF:
                self.buf.append(0x00)
            self._acc = 0
            self._nbits = 0
        return bytes(self.buf)


class BitReader:
    """Reads entropy-coded bits, removing stuffed zero bytes.

    Raises :class:`EntropyError` on a 0xFF byte followed by anything other
    than the stuffed 0x00 (a marker inside the scan means corrupt data for
    the subset this library emits) and :class:`TruncatedError` on running
    off the end.
    """

    def __init__(self, data: bytes, start: int = 0):
        self.data = data
        self.pos = start
        self._acc = 0
        self._nbits = 0

    def _fill(self) -> None:
        if self.pos >= len(self.data):
            raise TruncatedError("entropy-coded data ended early")
        byte = self.data[self.pos]
        self.pos += 1
        if byte == 0xFF:
            if self.pos >= len(self.data):
                raise TruncatedError("stream ends inside a stuffed byte")
            nxt = self.data[self.pos]
            if nxt != 0x00:
                raise EntropyError(
                    f"0xFF followed by 0x{nxt:02X} inside entropy data")
            self.pos += 1
        self._acc = (self._acc << 8) | byte
        self._nbits += 8

    def read_bit(self) -> int:
        if self._nbits == 0:
            self._fill()
        self._nbits -= 1
        return (self._acc >> self._nbits) & 1

    def read_bits(self, n: int) -> int:
        value = 0
        for _ in range(n):
            value = (value << 1) | self.read_bit()
        return value

    def byte_align_pos(self) -> int:
        """Offset of the next unread byte, discarding buffered partial bits."""
        self._acc = 0
        self._nbits = 0
        return self.pos
