"""Pure-Python kernels.

This module is the fallback backend: it exposes exactly the same surface
as the compiled extension (hashvault._core) and must produce bit-identical
output.  It is the reference for what the hot loops compute; the extension
only makes them fast.
"""

from __future__ import annotations

import struct

from . import _pi_tables

NAME = "py"

_MASK32 = 0xFFFFFFFF


# ---------------------------------------------------------------------------
# SHA-1 (FIPS 180-4)

_H0 = (0x67452301, 0xEFCDAB89, 0x98BADCFE, 0x10325476, 0xC3D2E1F0)


def _rotl(x: int, n: int) -> int:
    return ((x << n) | (x >> (32 - n))) & _MASK32


def sha1_compress(state, block):
    """One 512-bit compression round; exposed so tests can tie it to padding."""
    w = list(struct.unpack(">16I", block))
    for i in range(16, 80):
        w.append(_rotl(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1))
    a, b, c, d, e = state
    for i in range(80):
        if i < 20:
            f, k = d ^ (b & (c ^ d)), 0x5A827999
        elif i < 40:
            f, k = b ^ c ^ d, 0x6ED9EBA1
        elif i < 60:
            f, k = (b & c) | (d & (b | c)), 0x8F1BBCDC
        else:
            f, k = b ^ c ^ d, 0xCA62C1D6
        a, b, c, d, e = (_rotl(a, 5) + f + e + k + w[i]) & _MASK32, a, _rotl(b, 30), c, d
    return (
        (state[0] + a) & _MASK32,
        (state[1] + b) & _MASK32,
        (state[2] + c) & _MASK32,
        (state[3] + d) & _MASK32,
        (state[4] + e) & _MASK32,
    )


def sha1(data: bytes) -> bytes:
    bitlen = len(data) * 8
    padded = data + b"\x80" + b"\x00" * ((55 - len(data)) % 64) + struct.pack(">Q", bitlen)
    state = _H0
    for i in range(0, len(padded), 64):
        state = sha1_compress(state, padded[i:i + 64])
    return struct.pack(">5I", *state)


# ---------------------------------------------------------------------------
# Rainbow chain kernels

def _reduce(digest: bytes, step: int, charset: bytes, plen: int, size: int) -> bytes:
    v = (int.from_bytes(digest[:8], "big") % size + step) % size
    radix = len(charset)
    out = bytearray(plen)
    for i in range(plen - 1, -1, -1):
        out[i] = charset[v % radix]
        v //= radix
    return bytes(out)


def _domain_size(charset: bytes, plen: int) -> int:
    return len(charset) ** plen


def chain_walk(salt: bytes, charset: bytes, plaintext: bytes, first_step: int, steps: int) -> bytes:
    """Apply (hash, reduce) `steps` times starting at column `first_step`."""
    size = _domain_size(charset, len(plaintext))
    p = plaintext
    for k in range(first_step, first_step + steps):
        p = _reduce(sha1(salt + p), k, charset, len(p), size)
    return p


def chain_ends(salt: bytes, charset: bytes, plen: int, starts: bytes, n: int) -> bytes:
    """Walk every chain in `starts` (concatenated plaintexts) n steps."""
    size = _domain_size(charset, plen)
    out = bytearray()
    for off in range(0, len(starts), plen):
        p = starts[off:off + plen]
        for k in range(n):
            p = _reduce(sha1(salt + p), k, charset, plen, size)
        out += p
    return bytes(out)


def suffix_endpoints(salt: bytes, charset: bytes, plen: int, digest: bytes, n: int) -> bytes:
    """For each column j, the endpoint reached assuming `digest` sits at column j.

    Returns n plaintexts concatenated, j ascending.
    """
    size = _domain_size(charset, plen)
    out = bytearray()
    for j in range(n):
        p = _reduce(digest, j, charset, plen, size)
        for k in range(j + 1, n):
            p = _reduce(sha1(salt + p), k, charset, plen, size)
        out += p
    return bytes(out)


# ---------------------------------------------------------------------------
# Blowfish / EksBlowfish

class BlowfishState:
    """P-array and S-boxes, mutable during key scheduling.

    expand_key_calls counts actual key-schedule executions so tests can
    assert the 1 + 2^(cost+1) law against what really ran.
    """

    __slots__ = ("p", "s", "expand_key_calls")

    def __init__(self):
        self.p = list(_pi_tables.P)
        self.s = [list(box) for box in _pi_tables.S]
        self.expand_key_calls = 0

    @property
    def p_array(self):
        return tuple(self.p)

    @property
    def s_boxes(self):
        return tuple(tuple(box) for box in self.s)


def blowfish_init_state() -> BlowfishState:
    return BlowfishState()


def _encrypt_words(st: BlowfishState, l: int, r: int):
    p = st.p
    s0, s1, s2, s3 = st.s
    for i in range(16):
        l ^= p[i]
        r ^= ((((s0[l >> 24] + s1[(l >> 16) & 0xFF]) & _MASK32)
               ^ s2[(l >> 8) & 0xFF]) + s3[l & 0xFF]) & _MASK32
        l, r = r, l
    l, r = r, l
    r ^= p[16]
    l ^= p[17]
    return l, r


def _decrypt_words(st: BlowfishState, l: int, r: int):
    p = st.p
    s0, s1, s2, s3 = st.s
    l ^= p[17]
    r ^= p[16]
    l, r = r, l
    for i in range(15, -1, -1):
        l, r = r, l
        r ^= ((((s0[l >> 24] + s1[(l >> 16) & 0xFF]) & _MASK32)
               ^ s2[(l >> 8) & 0xFF]) + s3[l & 0xFF]) & _MASK32
        l ^= p[i]
    return l, r


def blowfish_encrypt_block(st: BlowfishState, block: bytes) -> bytes:
    l, r = struct.unpack(">II", block)
    return struct.pack(">II", *_encrypt_words(st, l, r))


def blowfish_decrypt_block(st: BlowfishState, block: bytes) -> bytes:
    l, r = struct.unpack(">II", block)
    return struct.pack(">II", *_decrypt_words(st, l, r))


def _key_words(key: bytes, count: int):
    out = []
    j = 0
    klen = len(key)
    for _ in range(count):
        w = 0
        for _ in range(4):
            w = ((w << 8) | key[j % klen]) & _MASK32
            j += 1
        out.append(w)
    return out


def blowfish_expand_key(st: BlowfishState, salt: bytes | None, key: bytes) -> None:
    """One key-schedule pass; salt=None is the zero-salt variant."""
    st.expand_key_calls += 1
    kws = _key_words(key, 18)
    p = st.p
    for i in range(18):
        p[i] ^= kws[i]
    sws = (0, 0, 0, 0) if salt is None else struct.unpack(">4I", salt)
    l = r = 0
    j = 0
    for i in range(0, 18, 2):
        l ^= sws[j & 3]
        r ^= sws[(j + 1) & 3]
        j += 2
        l, r = _encrypt_words(st, l, r)
        p[i] = l
        p[i + 1] = r
    for box in st.s:
        for i in range(0, 256, 2):
            l ^= sws[j & 3]
            r ^= sws[(j + 1) & 3]
            j += 2
            l, r = _encrypt_words(st, l, r)
            box[i] = l
            box[i + 1] = r


def eksblowfish_setup(cost: int, salt: bytes, key: bytes) -> BlowfishState:
    st = BlowfishState()
    blowfish_expand_key(st, salt, key)
    for _ in range(1 << cost):
        blowfish_expand_key(st, None, key)
        blowfish_expand_key(st, None, salt)
    return st


_BCRYPT_MAGIC = b"OrpheanBeholderScryDoubt"


def bcrypt_core(cost: int, salt: bytes, key: bytes) -> bytes:
    """EksBlowfish schedule, then the 24-byte magic encrypted 64 times; 23 bytes out."""
    st = eksblowfish_setup(cost, salt, key)
    data = list(struct.unpack(">6I", _BCRYPT_MAGIC))
    for _ in range(64):
        for i in range(0, 6, 2):
            data[i], data[i + 1] = _encrypt_words(st, data[i], data[i + 1])
    return struct.pack(">6I", *data)[:23]


# ---------------------------------------------------------------------------
# Memory-hard mixing (the MF inside mfcrypt)

MF_LEN = 128


def block_mix(block: bytes) -> bytes:
    """Width-preserving mixer: hash both orderings of the 64-byte halves,
    then expand the 40-byte seed back to 128 bytes in counter mode."""
    left, right = block[:64], block[64:]
    seed = sha1(block) + sha1(right + left)
    out = bytearray()
    for i in range(7):
        out += sha1(seed + struct.pack(">I", i))
    return bytes(out[:MF_LEN])


def romix(block: bytes, n: int):
    """Sequential memory-hard mix.

    Phase 1 fills V[0..n-1] with the hash chain of `block`; phase 2 does n
    data-dependent lookups.  Returns (out, stores, phase2_calls, peak_stored).
    """
    v = []
    x = block
    for _ in range(n):
        v.append(x)
        x = block_mix(x)
    peak_stored = len(v)
    mask = n - 1
    for _ in range(n):
        j = int.from_bytes(x[120:128], "little") & mask
        x = block_mix(bytes(a ^ b for a, b in zip(x, v[j])))
    return x, n, n, peak_stored
