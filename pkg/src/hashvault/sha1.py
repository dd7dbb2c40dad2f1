"""SHA-1, HMAC-SHA1, and PBKDF2-HMAC-SHA1.

The compression function lives in the kernel backends; this module owns
padding, the MAC construction, and the KDF, all of which are cheap
relative to the work they drive.
"""

from __future__ import annotations

import struct

from .backend import kernels
from .errors import ParameterError

DIGEST_SIZE = 20
BLOCK_SIZE = 64


def pad_message(data: bytes) -> list[bytes]:
    """FIPS 180-4 padding, returned as whole 64-byte blocks."""
    bitlen = len(data) * 8
    padded = data + b"\x80" + b"\x00" * ((55 - len(data)) % 64) + struct.pack(">Q", bitlen)
    return [padded[i:i + 64] for i in range(0, len(padded), 64)]


def sha1_digest(data: bytes) -> bytes:
    return kernels.sha1(data)


def sha1_hexdigest(data: bytes) -> str:
    return kernels.sha1(data).hex()


def hmac_sha1(key: bytes, message: bytes) -> bytes:
    if len(key) > BLOCK_SIZE:
        key = kernels.sha1(key)
    key = key.ljust(BLOCK_SIZE, b"\x00")
    inner = kernels.sha1(bytes(b ^ 0x36 for b in key) + message)
    return kernels.sha1(bytes(b ^ 0x5C for b in key) + inner)


def pbkdf2(password: bytes, salt: bytes, iterations: int, dk_len: int) -> bytes:
    if iterations < 1:
        raise ParameterError(f"iterations must be >= 1, got {iterations}")
    if dk_len < 1:
        raise ParameterError(f"dk_len must be >= 1, got {dk_len}")
    blocks = []
    n_blocks = -(-dk_len // DIGEST_SIZE)
    for i in range(1, n_blocks + 1):
        u = hmac_sha1(password, salt + struct.pack(">I", i))
        t = u
        for _ in range(iterations - 1):
            u = hmac_sha1(password, u)
            t = bytes(a ^ b for a, b in zip(t, u))
        blocks.append(t)
    return b"".join(blocks)[:dk_len]
