# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.

Same surface and bit-identical semantics as hashvault._pure; see that
module for the readable definitions.  Everything hot runs without the GIL
on C buffers.
"""

from libc.stdint cimport uint32_t, uint64_t
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memset

from . import _pi_tables

NAME = "c"

MF_LEN = 128


# ---------------------------------------------------------------------------
# SHA-1

cdef inline uint32_t _rotl(uint32_t x, int n) nogil:
    return (x << n) | (x >> (32 - n))


cdef inline uint32_t _load_be32(const unsigned char *p) nogil:
    return ((<uint32_t>p[0]) << 24) | ((<uint32_t>p[1]) << 16) | \
           ((<uint32_t>p[2]) << 8) | (<uint32_t>p[3])


cdef inline void _store_be32(unsigned char *p, uint32_t v) nogil:
    p[0] = <unsigned char>(v >> 24)
    p[1] = <unsigned char>(v >> 16)
    p[2] = <unsigned char>(v >> 8)
    p[3] = <unsigned char>v


cdef inline uint64_t _load_be64(const unsigned char *p) nogil:
    return ((<uint64_t>_load_be32(p)) << 32) | (<uint64_t>_load_be32(p + 4))


cdef inline uint64_t _load_le64(const unsigned char *p) nogil:
    cdef uint64_t v = 0
    cdef int i
    for i in range(7, -1, -1):
        v = (v << 8) | (<uint64_t>p[i])
    return v


cdef void _compress(uint32_t *st, const unsigned char *blk) nogil:
    cdef uint32_t w[80]
    cdef uint32_t a, b, c, d, e, tmp
    cdef int i
    for i in range(16):
        w[i] = _load_be32(blk + 4 * i)
    for i in range(16, 80):
        w[i] = _rotl(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1)
    a = st[0]; b = st[1]; c = st[2]; d = st[3]; e = st[4]
    # four phases unrolled so the round-constant branch stays out of the loop
    for i in range(20):
        tmp = _rotl(a, 5) + (d ^ (b & (c ^ d))) + e + 0x5A827999u + w[i]
        e = d; d = c; c = _rotl(b, 30); b = a; a = tmp
    for i in range(20, 40):
        tmp = _rotl(a, 5) + (b ^ c ^ d) + e + 0x6ED9EBA1u + w[i]
        e = d; d = c; c = _rotl(b, 30); b = a; a = tmp
    for i in range(40, 60):
        tmp = _rotl(a, 5) + ((b & c) | (d & (b | c))) + e + 0x8F1BBCDCu + w[i]
        e = d; d = c; c = _rotl(b, 30); b = a; a = tmp
    for i in range(60, 80):
        tmp = _rotl(a, 5) + (b ^ c ^ d) + e + 0xCA62C1D6u + w[i]
        e = d; d = c; c = _rotl(b, 30); b = a; a = tmp
    st[0] += a; st[1] += b; st[2] += c; st[3] += d; st[4] += e


cdef void _sha1_all(const unsigned char *data, size_t n, unsigned char *out) nogil:
    cdef uint32_t st[5]
    st[0] = 0x67452301u; st[1] = 0xEFCDAB89u; st[2] = 0x98BADCFEu
    st[3] = 0x10325476u; st[4] = 0xC3D2E1F0u
    cdef size_t off = 0
    while n - off >= 64:
        _compress(st, data + off)
        off += 64
    cdef unsigned char tail[128]
    cdef size_t tl = n - off
    memset(tail, 0, 128)
    if tl:
        memcpy(tail, data + off, tl)
    tail[tl] = 0x80
    cdef uint64_t bits = (<uint64_t>n) * 8
    cdef size_t end = 64 if tl <= 55 else 128
    _store_be32(tail + end - 8, <uint32_t>(bits >> 32))
    _store_be32(tail + end - 4, <uint32_t>bits)
    _compress(st, tail)
    if end == 128:
        _compress(st, tail + 64)
    cdef int i
    for i in range(5):
        _store_be32(out + 4 * i, st[i])


def sha1(data):
    cdef const unsigned char[::1] v = data
    cdef unsigned char out[20]
    cdef const unsigned char *p = NULL
    if v.shape[0]:
        p = &v[0]
    with nogil:
        _sha1_all(p, <size_t>v.shape[0], out)
    return bytes(out[:20])


def sha1_compress(state, block):
    """One 512-bit compression round; exposed so tests can tie it to padding."""
    cdef uint32_t st[5]
    cdef int i
    for i in range(5):
        st[i] = state[i]
    cdef const unsigned char[::1] b = block
    if b.shape[0] != 64:
        raise ValueError("block must be 64 bytes")
    _compress(st, &b[0])
    return (st[0], st[1], st[2], st[3], st[4])


# ---------------------------------------------------------------------------
# Rainbow chain kernels

DEF _MSG_MAX = 384


cdef inline void _reduce_c(const unsigned char *digest, uint64_t step,
                           const unsigned char *cs, int radix, int plen,
                           uint64_t size, unsigned char *out) nogil:
    cdef uint64_t v = (_load_be64(digest) % size + step) % size
    cdef int i
    for i in range(plen - 1, -1, -1):
        out[i] = cs[v % <uint64_t>radix]
        v //= <uint64_t>radix
    # v is exhausted: radix**plen == size


cdef uint64_t _checked_size(charset, int plen) except 0:
    size = len(charset) ** plen
    if not 1 <= size < (1 << 63):
        raise ValueError("domain size out of range")
    return <uint64_t>size


def chain_walk(salt, charset, plaintext, first_step, steps):
    """Apply (hash, reduce) `steps` times starting at column `first_step`."""
    cdef const unsigned char[::1] sv = salt
    cdef const unsigned char[::1] cv = charset
    cdef const unsigned char[::1] pv = plaintext
    cdef int plen = <int>pv.shape[0]
    cdef int slen = <int>sv.shape[0]
    if slen + plen > _MSG_MAX:
        raise ValueError("salt + plaintext too long for kernel buffer")
    cdef uint64_t size = _checked_size(charset, plen)
    cdef uint64_t k0 = first_step, nsteps = steps, k
    cdef unsigned char msg[_MSG_MAX]
    cdef unsigned char dg[20]
    if slen:
        memcpy(msg, &sv[0], slen)
    memcpy(msg + slen, &pv[0], plen)
    cdef const unsigned char *cs = &cv[0]
    cdef int radix = <int>cv.shape[0]
    with nogil:
        for k in range(k0, k0 + nsteps):
            _sha1_all(msg, slen + plen, dg)
            _reduce_c(dg, k, cs, radix, plen, size, msg + slen)
    return bytes(msg[slen:slen + plen])


def chain_ends(salt, charset, plen, starts, n):
    """Walk every chain in `starts` (concatenated plaintexts) n steps."""
    cdef const unsigned char[::1] sv = salt
    cdef const unsigned char[::1] cv = charset
    cdef const unsigned char[::1] stv = starts
    cdef int pl = plen
    cdef int slen = <int>sv.shape[0]
    if slen + pl > _MSG_MAX:
        raise ValueError("salt + plaintext too long for kernel buffer")
    if stv.shape[0] % pl:
        raise ValueError("starts length must be a multiple of plaintext_len")
    cdef uint64_t size = _checked_size(charset, pl)
    cdef uint64_t nsteps = n, k
    cdef Py_ssize_t count = stv.shape[0] // pl, ci
    out = bytearray(stv.shape[0])
    cdef unsigned char[::1] ov = out
    cdef unsigned char msg[_MSG_MAX]
    cdef unsigned char dg[20]
    if slen:
        memcpy(msg, &sv[0], slen)
    cdef const unsigned char *cs = &cv[0]
    cdef int radix = <int>cv.shape[0]
    with nogil:
        for ci in range(count):
            memcpy(msg + slen, &stv[0] + ci * pl, pl)
            for k in range(nsteps):
                _sha1_all(msg, slen + pl, dg)
                _reduce_c(dg, k, cs, radix, pl, size, msg + slen)
            memcpy(&ov[0] + ci * pl, msg + slen, pl)
    return bytes(out)


def suffix_endpoints(salt, charset, plen, digest, n):
    """For each column j, the endpoint reached assuming `digest` sits at column j.

    Returns n plaintexts concatenated, j ascending.
    """
    cdef const unsigned char[::1] sv = salt
    cdef const unsigned char[::1] cv = charset
    cdef const unsigned char[::1] dv = digest
    cdef int pl = plen
    cdef int slen = <int>sv.shape[0]
    if slen + pl > _MSG_MAX:
        raise ValueError("salt + plaintext too long for kernel buffer")
    if dv.shape[0] < 8:
        raise ValueError("digest must be at least 8 bytes")
    cdef uint64_t size = _checked_size(charset, pl)
    cdef uint64_t nsteps = n, j, k
    out = bytearray(n * pl)
    cdef unsigned char[::1] ov = out
    cdef unsigned char msg[_MSG_MAX]
    cdef unsigned char dg[20]
    if slen:
        memcpy(msg, &sv[0], slen)
    cdef const unsigned char *cs = &cv[0]
    cdef int radix = <int>cv.shape[0]
    with nogil:
        for j in range(nsteps):
            _reduce_c(&dv[0], j, cs, radix, pl, size, msg + slen)
            for k in range(j + 1, nsteps):
                _sha1_all(msg, slen + pl, dg)
                _reduce_c(dg, k, cs, radix, pl, size, msg + slen)
            memcpy(&ov[0] + j * pl, msg + slen, pl)
    return bytes(out)


# ---------------------------------------------------------------------------
# Blowfish / EksBlowfish

cdef uint32_t _INIT_P[18]
cdef uint32_t _INIT_S[1024]

def _load_tables():
    cdef int i, b
    for i in range(18):
        _INIT_P[i] = _pi_tables.P[i]
    for b in range(4):
        for i in range(256):
            _INIT_S[256 * b + i] = _pi_tables.S[b][i]

_load_tables()
del _load_tables


cdef inline void _bf_enc(const uint32_t *p, const uint32_t *s,
                         uint32_t *xl, uint32_t *xr) nogil:
    cdef uint32_t l = xl[0], r = xr[0], t
    cdef int i
    for i in range(16):
        l ^= p[i]
        r ^= ((s[l >> 24] + s[256 + ((l >> 16) & 0xFF)])
              ^ s[512 + ((l >> 8) & 0xFF)]) + s[768 + (l & 0xFF)]
        t = l; l = r; r = t
    t = l; l = r; r = t
    r ^= p[16]
    l ^= p[17]
    xl[0] = l
    xr[0] = r


cdef inline void _bf_dec(const uint32_t *p, const uint32_t *s,
                         uint32_t *xl, uint32_t *xr) nogil:
    cdef uint32_t l = xl[0], r = xr[0], t
    cdef int i
    l ^= p[17]
    r ^= p[16]
    t = l; l = r; r = t
    for i in range(15, -1, -1):
        t = l; l = r; r = t
        r ^= ((s[l >> 24] + s[256 + ((l >> 16) & 0xFF)])
              ^ s[512 + ((l >> 8) & 0xFF)]) + s[768 + (l & 0xFF)]
        l ^= p[i]
    xl[0] = l
    xr[0] = r


cdef void _bf_expand(uint32_t *p, uint32_t *s, const uint32_t *sws,
                     const unsigned char *key, size_t klen) nogil:
    cdef int i, k, sj
    cdef size_t j = 0
    cdef uint32_t w, l, r
    for i in range(18):
        w = 0
        for k in range(4):
            w = (w << 8) | key[j % klen]
            j += 1
        p[i] ^= w
    l = 0; r = 0
    sj = 0
    for i in range(0, 18, 2):
        l ^= sws[sj & 3]
        r ^= sws[(sj + 1) & 3]
        sj += 2
        _bf_enc(p, s, &l, &r)
        p[i] = l
        p[i + 1] = r
    for i in range(0, 1024, 2):
        l ^= sws[sj & 3]
        r ^= sws[(sj + 1) & 3]
        sj += 2
        _bf_enc(p, s, &l, &r)
        s[i] = l
        s[i + 1] = r


cdef class BlowfishState:
    """P-array and S-boxes, mutable during key scheduling.

    expand_key_calls counts actual key-schedule executions so tests can
    assert the 1 + 2^(cost+1) law against what really ran.
    """

    cdef uint32_t p[18]
    cdef uint32_t s[1024]
    cdef public unsigned long long expand_key_calls

    def __cinit__(self):
        memcpy(self.p, _INIT_P, sizeof(self.p))
        memcpy(self.s, _INIT_S, sizeof(self.s))
        self.expand_key_calls = 0

    @property
    def p_array(self):
        cdef int i
        return tuple(self.p[i] for i in range(18))

    @property
    def s_boxes(self):
        cdef int b, i
        return tuple(
            tuple(self.s[256 * b + i] for i in range(256)) for b in range(4)
        )


def blowfish_init_state():
    return BlowfishState()


def blowfish_expand_key(BlowfishState st, salt, key):
    """One key-schedule pass; salt=None is the zero-salt variant."""
    cdef uint32_t sws[4]
    cdef const unsigned char[::1] kv = key
    cdef const unsigned char[::1] sv2
    if kv.shape[0] < 1:
        raise ValueError("key must not be empty")
    if salt is None:
        sws[0] = sws[1] = sws[2] = sws[3] = 0
    else:
        sv2 = salt
        if sv2.shape[0] != 16:
            raise ValueError("salt must be 16 bytes")
        sws[0] = _load_be32(&sv2[0])
        sws[1] = _load_be32(&sv2[4])
        sws[2] = _load_be32(&sv2[8])
        sws[3] = _load_be32(&sv2[12])
    st.expand_key_calls += 1
    _bf_expand(st.p, st.s, sws, &kv[0], <size_t>kv.shape[0])


def blowfish_encrypt_block(BlowfishState st, block):
    cdef const unsigned char[::1] bv = block
    if bv.shape[0] != 8:
        raise ValueError("block must be 8 bytes")
    cdef uint32_t l = _load_be32(&bv[0]), r = _load_be32(&bv[4])
    _bf_enc(st.p, st.s, &l, &r)
    cdef unsigned char out[8]
    _store_be32(out, l)
    _store_be32(out + 4, r)
    return bytes(out[:8])


def blowfish_decrypt_block(BlowfishState st, block):
    cdef const unsigned char[::1] bv = block
    if bv.shape[0] != 8:
        raise ValueError("block must be 8 bytes")
    cdef uint32_t l = _load_be32(&bv[0]), r = _load_be32(&bv[4])
    _bf_dec(st.p, st.s, &l, &r)
    cdef unsigned char out[8]
    _store_be32(out, l)
    _store_be32(out + 4, r)
    return bytes(out[:8])


def eksblowfish_setup(cost, salt, key):
    cdef BlowfishState st = BlowfishState()
    cdef const unsigned char[::1] kv = key
    cdef const unsigned char[::1] sv = salt
    if kv.shape[0] < 1:
        raise ValueError("key must not be empty")
    if sv.shape[0] != 16:
        raise ValueError("salt must be 16 bytes")
    cdef uint32_t sws[4]
    cdef uint32_t zws[4]
    sws[0] = _load_be32(&sv[0])
    sws[1] = _load_be32(&sv[4])
    sws[2] = _load_be32(&sv[8])
    sws[3] = _load_be32(&sv[12])
    zws[0] = zws[1] = zws[2] = zws[3] = 0
    cdef const unsigned char *kp = &kv[0]
    cdef const unsigned char *sp = &sv[0]
    cdef size_t klen = <size_t>kv.shape[0]
    cdef uint64_t rounds = (<uint64_t>1) << <int>cost
    cdef uint64_t it
    with nogil:
        _bf_expand(st.p, st.s, sws, kp, klen)
        for it in range(rounds):
            _bf_expand(st.p, st.s, zws, kp, klen)
            _bf_expand(st.p, st.s, zws, sp, 16)
    st.expand_key_calls = 1 + 2 * rounds
    return st


def bcrypt_core(cost, salt, key):
    """EksBlowfish schedule, then the 24-byte magic encrypted 64 times; 23 bytes out."""
    cdef BlowfishState st = eksblowfish_setup(cost, salt, key)
    cdef uint32_t data[6]
    cdef unsigned char magic[24]
    memcpy(magic, b"OrpheanBeholderScryDoubt", 24)
    cdef int i, rep
    for i in range(6):
        data[i] = _load_be32(magic + 4 * i)
    with nogil:
        for rep in range(64):
            for i in range(0, 6, 2):
                _bf_enc(st.p, st.s, &data[i], &data[i + 1])
    cdef unsigned char out[24]
    for i in range(6):
        _store_be32(out + 4 * i, data[i])
    return bytes(out[:23])


# ---------------------------------------------------------------------------
# Memory-hard mixing (the MF inside mfcrypt)

cdef void _block_mix_c(const unsigned char *inp, unsigned char *out) nogil:
    cdef unsigned char seed[44]
    cdef unsigned char swapped[128]
    cdef unsigned char tmp[20]
    cdef int i
    _sha1_all(inp, 128, seed)
    memcpy(swapped, inp + 64, 64)
    memcpy(swapped + 64, inp, 64)
    _sha1_all(swapped, 128, seed + 20)
    for i in range(6):
        _store_be32(seed + 40, <uint32_t>i)
        _sha1_all(seed, 44, out + 20 * i)
    _store_be32(seed + 40, 6)
    _sha1_all(seed, 44, tmp)
    memcpy(out + 120, tmp, 8)


def block_mix(block):
    """Width-preserving mixer: hash both orderings of the 64-byte halves,
    then expand the 40-byte seed back to 128 bytes in counter mode."""
    cdef const unsigned char[::1] bv = block
    if bv.shape[0] != 128:
        raise ValueError("block must be 128 bytes")
    cdef unsigned char out[128]
    with nogil:
        _block_mix_c(&bv[0], out)
    return bytes(out[:128])


def romix(block, n):
    """Sequential memory-hard mix.

    Phase 1 fills V[0..n-1] with the hash chain of `block`; phase 2 does n
    data-dependent lookups.  Returns (out, stores, phase2_calls, peak_stored).
    """
    cdef const unsigned char[::1] bv = block
    if bv.shape[0] != 128:
        raise ValueError("block must be 128 bytes")
    cdef uint64_t nn = n
    if nn < 1 or (nn & (nn - 1)):
        raise ValueError("n must be a power of two")
    cdef unsigned char *v = <unsigned char *>malloc(nn * 128)
    if v == NULL:
        raise MemoryError("romix: cannot allocate V")
    cdef unsigned char x[128]
    cdef unsigned char t[128]
    cdef uint64_t i, j, mask
    cdef int k
    memcpy(x, &bv[0], 128)
    try:
        with nogil:
            for i in range(nn):
                memcpy(v + i * 128, x, 128)
                _block_mix_c(x, t)
                memcpy(x, t, 128)
            mask = nn - 1
            for i in range(nn):
                j = _load_le64(x + 120) & mask
                for k in range(128):
                    t[k] = x[k] ^ v[j * 128 + k]
                _block_mix_c(t, x)
    finally:
        free(v)
    return bytes(x[:128]), n, n, n
