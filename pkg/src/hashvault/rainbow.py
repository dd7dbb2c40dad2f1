"""Rainbow tables: hash/reduce chains, endpoint-only storage, lookup.

A chain is P_0 -> P_1 -> ... -> P_n where each step hashes salt || P_k and
reduces the digest back into the plaintext domain with a column-dependent
reduction.  Only (P_0, P_n) is stored.  Coverage is whatever plaintexts
appear in columns 0..n-1; the salt is baked into the table, which is the
whole reason per-user salts defeat precomputation.
"""

from __future__ import annotations

import struct
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .backend import kernels
from .errors import FormatError, ParameterError
from .rng import DeterministicRandom

_MAGIC = b"RBT1"
_VERSION = 1
_MAX_DOMAIN = 1 << 63  # the kernels do the modulo in a u64


class ReductionDomain:
    """Fixed-length plaintexts over an ordered charset, bijective with 0..size-1."""

    def __init__(self, charset: bytes, length: int):
        if not isinstance(charset, (bytes, bytearray)):
            raise ParameterError("charset must be bytes")
        charset = bytes(charset)
        if len(charset) < 1:
            raise ParameterError("charset must not be empty")
        if len(set(charset)) != len(charset):
            raise ParameterError("charset must not contain duplicate characters")
        if length < 1:
            raise ParameterError(f"plaintext length must be >= 1, got {length}")
        size = len(charset) ** length
        if size >= _MAX_DOMAIN:
            raise ParameterError("domain size must fit in a 64-bit counter")
        self.charset = charset
        self.length = length
        self.size = size

    def index_to_plaintext(self, index: int) -> bytes:
        if not 0 <= index < self.size:
            raise ParameterError(f"index {index} outside domain of size {self.size}")
        radix = len(self.charset)
        out = bytearray(self.length)
        for i in range(self.length - 1, -1, -1):
            out[i] = self.charset[index % radix]
            index //= radix
        return bytes(out)

    def plaintext_to_index(self, plaintext: bytes) -> int:
        if len(plaintext) != self.length:
            raise ParameterError("plaintext has the wrong length for this domain")
        pos = {c: i for i, c in enumerate(self.charset)}
        index = 0
        for c in plaintext:
            if c not in pos:
                raise ParameterError("plaintext contains characters outside the charset")
            index = index * len(self.charset) + pos[c]
        return index

    def __contains__(self, plaintext) -> bool:
        return (
            isinstance(plaintext, (bytes, bytearray))
            and len(plaintext) == self.length
            and all(c in self.charset for c in plaintext)
        )

    def iter_plaintexts(self):
        for i in range(self.size):
            yield self.index_to_plaintext(i)

    def __eq__(self, other):
        return (
            isinstance(other, ReductionDomain)
            and self.charset == other.charset
            and self.length == other.length
        )

    def __repr__(self):
        return f"ReductionDomain(charset={self.charset!r}, length={self.length})"


def reduce(digest: bytes, step_index: int, domain: ReductionDomain) -> bytes:
    """Map a digest into the domain; varies with the column index."""
    if len(digest) < 8:
        raise ParameterError("digest must be at least 8 bytes")
    if step_index < 0:
        raise ParameterError("step_index must be >= 0")
    v = (int.from_bytes(digest[:8], "big") % domain.size + step_index) % domain.size
    return domain.index_to_plaintext(v)


def walk_chain(domain: ReductionDomain, start: bytes, steps: int,
               salt: bytes = b"", first_step: int = 0) -> bytes:
    """Apply (hash then reduce) `steps` times; steps=0 returns start."""
    if start not in domain:
        raise ParameterError("start plaintext is outside the domain")
    if steps < 0:
        raise ParameterError("steps must be >= 0")
    if steps == 0:
        return bytes(start)
    return kernels.chain_walk(bytes(salt), domain.charset, bytes(start), first_step, steps)


@dataclass
class CrackResult:
    found: bool
    plaintext: bytes | None
    steps_examined: int
    false_alarms: int


@dataclass
class RainbowTable:
    domain: ReductionDomain
    chain_length: int
    salt: bytes
    records: list  # [(start, end)] sorted by (end, start)
    endpoint_index: dict = field(repr=False, default=None)

    def __post_init__(self):
        if self.endpoint_index is None:
            idx = {}
            for start, end in self.records:
                idx.setdefault(end, []).append(start)
            self.endpoint_index = idx
        # Column values regenerate from the chain start on every endpoint
        # hit; identical (start, column) pairs recur across lookups, so the
        # regenerated plaintext is memoized.  The table is immutable here.
        self._regen = {}

    @property
    def chain_count(self) -> int:
        return len(self.records)

    def lookup(self, digest: bytes) -> CrackResult:
        """Search for a preimage of `digest` among the chain columns.

        Candidate columns run last to first (cheapest suffix first).  An
        endpoint hit is only a candidate: we regenerate from the stored
        start and verify by hashing, counting misses as false alarms.
        """
        if len(digest) != 20:
            raise ParameterError("digest must be 20 bytes")
        n = self.chain_length
        if not self.records:
            return CrackResult(False, None, 0, 0)
        # All suffix endpoints come from one kernel pass; the scan below
        # still charges steps column by column so the counter tracks the
        # logical search, capped by lookup_work_bound().
        ends = kernels.suffix_endpoints(
            self.salt, self.domain.charset, self.domain.length, digest, n
        )
        plen = self.domain.length
        steps = 0
        false_alarms = 0
        for j in range(n - 1, -1, -1):
            steps += n - j
            endpoint = ends[j * plen:(j + 1) * plen]
            for start in self.endpoint_index.get(endpoint, ()):
                candidate = self._regen.get((start, j))
                if candidate is None:
                    candidate = walk_chain(self.domain, start, j, self.salt)
                    self._regen[start, j] = candidate
                if kernels.sha1(self.salt + candidate) == digest:
                    return CrackResult(True, candidate, steps, false_alarms)
                false_alarms += 1
        return CrackResult(False, None, steps, false_alarms)

    def covered_plaintexts(self) -> set:
        """Every plaintext sitting in a hashed column (0..n-1), by regeneration."""
        seen = set()
        cs, plen, size = self.domain.charset, self.domain.length, self.domain.size
        for start, _end in self.records:
            p = start
            for k in range(self.chain_length):
                seen.add(p)
                p = reduce(kernels.sha1(self.salt + p), k, self.domain)
        return seen

    def save(self, path) -> None:
        blob = _serialize(self)
        with open(path, "wb") as fh:
            fh.write(blob)

    def to_bytes(self) -> bytes:
        return _serialize(self)


def build_table(domain: ReductionDomain, chain_length: int, chain_count: int,
                seed, salt: bytes = b"", jobs: int = 1) -> RainbowTable:
    """Build chain_count chains of chain_length steps with seeded starts.

    Starts are the first chain_count distinct draws from the seeded stream,
    so a smaller table's starts are a prefix of a larger one's.  Worker
    count never changes the result: chains are independent and the record
    order is canonicalized by sorting.
    """
    if chain_length < 1:
        raise ParameterError(f"chain_length must be >= 1, got {chain_length}")
    if chain_count < 1:
        raise ParameterError(f"chain_count must be >= 1, got {chain_count}")
    if chain_count > domain.size:
        raise ParameterError(
            f"domain of size {domain.size} cannot supply {chain_count} distinct starts"
        )
    if jobs < 1:
        raise ParameterError(f"jobs must be >= 1, got {jobs}")
    rng = seed if isinstance(seed, DeterministicRandom) else DeterministicRandom(seed)
    starts = []
    seen = set()
    while len(starts) < chain_count:
        idx = rng.randbelow(domain.size)
        if idx not in seen:
            seen.add(idx)
            starts.append(domain.index_to_plaintext(idx))
    ends = _chain_ends_parallel(salt, domain, starts, chain_length, jobs)
    records = sorted(zip(starts, ends), key=lambda rec: (rec[1], rec[0]))
    return RainbowTable(domain, chain_length, bytes(salt), records)


def _chain_ends_parallel(salt, domain, starts, chain_length, jobs):
    blob = b"".join(starts)
    plen = domain.length
    if jobs == 1 or len(starts) < 2 * jobs:
        ends = kernels.chain_ends(bytes(salt), domain.charset, plen, blob, chain_length)
    else:
        per = -(-len(starts) // jobs)
        slices = [blob[i * plen:(i + per) * plen] for i in range(0, len(starts), per)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(
                lambda s: kernels.chain_ends(bytes(salt), domain.charset, plen, s, chain_length),
                slices,
            ))
        ends = b"".join(parts)
    return [ends[i * plen:(i + 1) * plen] for i in range(len(starts))]


def table_memory_cost(table: RainbowTable) -> int:
    """Bytes for the stored (start, end) pairs alone; the index is overhead."""
    return 2 * table.chain_count * table.domain.length


def index_overhead_bytes(table: RainbowTable) -> int:
    """Rough in-memory cost of the endpoint index, reported separately."""
    import sys
    total = sys.getsizeof(table.endpoint_index)
    for end, starts in table.endpoint_index.items():
        total += sys.getsizeof(end) + sys.getsizeof(starts)
        total += sum(sys.getsizeof(s) for s in starts)
    return total


def lookup_work_bound(table: RainbowTable) -> int:
    n = table.chain_length
    return n * (n + 1) // 2


def _serialize(table: RainbowTable) -> bytes:
    dom = table.domain
    head = bytearray()
    head += _MAGIC
    head += struct.pack("<H", _VERSION)
    head += struct.pack("<B", len(dom.charset)) + dom.charset
    head += struct.pack("<B", dom.length)
    head += struct.pack("<I", table.chain_length)
    head += struct.pack("<Q", table.chain_count)
    head += struct.pack("<B", len(table.salt)) + table.salt
    for start, end in table.records:
        head += start + end
    head += struct.pack("<I", zlib.crc32(bytes(head)))
    return bytes(head)


def load_table(path) -> RainbowTable:
    with open(path, "rb") as fh:
        blob = fh.read()
    return table_from_bytes(blob)


def table_from_bytes(blob: bytes) -> RainbowTable:
    if len(blob) < 4 or blob[:4] != _MAGIC:
        raise FormatError("not a rainbow table file (bad magic)")
    if len(blob) < 8:
        raise FormatError("truncated table file")
    body, crc_bytes = blob[:-4], blob[-4:]
    if struct.unpack("<I", crc_bytes)[0] != zlib.crc32(body):
        raise FormatError("table file checksum mismatch")
    off = 4
    (version,) = struct.unpack_from("<H", blob, off)
    off += 2
    if version != _VERSION:
        raise FormatError(f"unsupported table format version {version}")
    (cs_len,) = struct.unpack_from("<B", blob, off)
    off += 1
    charset = blob[off:off + cs_len]
    if len(charset) != cs_len:
        raise FormatError("truncated table file")
    off += cs_len
    (plen,) = struct.unpack_from("<B", blob, off)
    off += 1
    (chain_length,) = struct.unpack_from("<I", blob, off)
    off += 4
    (chain_count,) = struct.unpack_from("<Q", blob, off)
    off += 8
    (salt_len,) = struct.unpack_from("<B", blob, off)
    off += 1
    salt = blob[off:off + salt_len]
    if len(salt) != salt_len:
        raise FormatError("truncated table file")
    off += salt_len
    try:
        domain = ReductionDomain(charset, plen)
    except ParameterError as exc:
        raise FormatError(f"table file carries an invalid domain: {exc}") from exc
    if chain_length < 1:
        raise FormatError("table file carries chain_length 0")
    rec_bytes = 2 * plen * chain_count
    if len(blob) - 4 - off != rec_bytes:
        raise FormatError("record section length does not match chain_count")
    records = []
    prev_end = None
    for i in range(chain_count):
        start = blob[off:off + plen]
        end = blob[off + plen:off + 2 * plen]
        off += 2 * plen
        if start not in domain or end not in domain:
            raise FormatError("record plaintext outside the declared domain")
        if prev_end is not None and end < prev_end:
            raise FormatError("records are not sorted by endpoint")
        prev_end = end
        records.append((start, end))
    return RainbowTable(domain, chain_length, salt, records)
