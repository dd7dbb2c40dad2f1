"""Seedable randomness source.

Everything in the package that needs randomness (salts, chain starts,
synthetic corpora) draws from this generator so runs are reproducible
under a fixed seed.  The stream is our own SHA-1 in counter mode, which
keeps output identical across interpreter versions and backends.
Unseeded instances key themselves from the operating system's entropy.
"""

from __future__ import annotations

import os
import struct

from .backend import kernels
from .errors import ParameterError


class DeterministicRandom:
    def __init__(self, seed: int | bytes | None = None):
        if seed is None:
            key = os.urandom(20)
        elif isinstance(seed, bytes):
            key = seed
        elif isinstance(seed, int):
            if seed < 0:
                raise ParameterError("seed must be non-negative")
            key = seed.to_bytes(max(1, (seed.bit_length() + 7) // 8), "big")
        else:
            raise ParameterError(f"unsupported seed type: {type(seed).__name__}")
        self._key = key
        self._counter = 0
        self._buffer = b""

    def getbytes(self, n: int) -> bytes:
        if n < 0:
            raise ParameterError("byte count must be non-negative")
        while len(self._buffer) < n:
            block = kernels.sha1(self._key + struct.pack(">Q", self._counter))
            self._counter += 1
            self._buffer += block
        out, self._buffer = self._buffer[:n], self._buffer[n:]
        return out

    def u64(self) -> int:
        return struct.unpack(">Q", self.getbytes(8))[0]

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n), rejection-sampled to avoid modulo bias."""
        if n <= 0:
            raise ParameterError("randbelow needs a positive bound")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.u64()
            if u < limit:
                return u % n

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.u64() >> 11) / float(1 << 53)

    def spawn(self, label) -> "DeterministicRandom":
        """Independent child stream, stable for a given (seed, label)."""
        if isinstance(label, str):
            label = label.encode("utf-8")
        return DeterministicRandom(kernels.sha1(self._key + b"/" + label))
