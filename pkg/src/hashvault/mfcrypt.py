"""MFcrypt: PBKDF2 pre-hash, p memory-hard block mixes, PBKDF2 post-hash.

The memory-hard function is ROMix over a hash-based 128-octet block mixer,
not the Salsa20/8 core, so outputs are NOT interchangeable with published
scrypt vectors.  What carries over is the structure: memory grows with N,
p blocks mix independently, and both PBKDF2 calls run a single iteration.
"""

from __future__ import annotations

import hmac as _hmac
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .backend import kernels
from .errors import FormatError, MemoryBudgetError, ParameterError
from .sha1 import pbkdf2

MF_LEN = 128
MIN_N = 2
MAX_N = 1 << 24
DEFAULT_MEMORY_BUDGET = 1 << 30

_RECORD_RE = re.compile(r"^\$mfc\$N=(\d+),p=(\d+)\$([0-9a-f]+)\$([0-9a-f]+)$")


@dataclass(frozen=True)
class MfParams:
    n: int
    p: int
    dk_len: int
    mf_len: int = MF_LEN

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < MIN_N or self.n > MAX_N:
            raise ParameterError(f"N must be in [{MIN_N}, {MAX_N}], got {self.n}")
        if self.n & (self.n - 1):
            raise ParameterError(f"N must be a power of two, got {self.n}")
        if self.p < 1:
            raise ParameterError(f"p must be >= 1, got {self.p}")
        if self.dk_len < 1:
            raise ParameterError(f"dk_len must be >= 1, got {self.dk_len}")
        if self.mf_len != MF_LEN:
            raise ParameterError(f"mf_len is fixed at {MF_LEN}")

    @property
    def log_n(self) -> int:
        return self.n.bit_length() - 1


@dataclass
class RomixStats:
    stores: int
    phase2_calls: int
    peak_stored: int


def block_mix(block: bytes) -> bytes:
    """The H inside ROMix: width-preserving 128-octet mixer."""
    if len(block) != MF_LEN:
        raise ParameterError(f"block must be {MF_LEN} octets, got {len(block)}")
    return kernels.block_mix(bytes(block))


def romix(block: bytes, n: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> bytes:
    out, _ = romix_instrumented(block, n, memory_budget)
    return out


def romix_instrumented(block: bytes, n: int,
                       memory_budget: int = DEFAULT_MEMORY_BUDGET):
    """ROMix plus its instrumentation counters, as (block, RomixStats)."""
    if len(block) != MF_LEN:
        raise ParameterError(f"block must be {MF_LEN} octets, got {len(block)}")
    if not isinstance(n, int) or n < MIN_N or n > MAX_N or (n & (n - 1)):
        raise ParameterError(f"N must be a power of two in [{MIN_N}, {MAX_N}], got {n}")
    _check_budget(n, 1, memory_budget)
    out, stores, phase2, peak = kernels.romix(bytes(block), n)
    return out, RomixStats(stores, phase2, peak)


def _check_budget(n: int, workers: int, memory_budget: int) -> None:
    need = n * MF_LEN * workers
    if need > memory_budget:
        raise MemoryBudgetError(
            f"romix needs {need} bytes ({workers} x N={n} blocks of {MF_LEN}); "
            f"budget is {memory_budget}"
        )


def mfcrypt(password: bytes, salt: bytes, params: MfParams,
            memory_budget: int = DEFAULT_MEMORY_BUDGET, jobs: int = 1):
    """The four-line pipeline: PBKDF2 split, per-block ROMix, PBKDF2 join."""
    dk, _ = mfcrypt_instrumented(password, salt, params, memory_budget, jobs)
    return dk


def mfcrypt_instrumented(password: bytes, salt: bytes, params: MfParams,
                         memory_budget: int = DEFAULT_MEMORY_BUDGET, jobs: int = 1):
    if not isinstance(params, MfParams):
        raise ParameterError("params must be an MfParams")
    if jobs < 1:
        raise ParameterError(f"jobs must be >= 1, got {jobs}")
    workers = min(jobs, params.p)
    _check_budget(params.n, workers, memory_budget)
    blob = pbkdf2(bytes(password), bytes(salt), 1, params.p * params.mf_len)
    blocks = [blob[i * params.mf_len:(i + 1) * params.mf_len] for i in range(params.p)]
    if workers == 1:
        mixed = [kernels.romix(b, params.n) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            mixed = list(pool.map(lambda b: kernels.romix(b, params.n), blocks))
    stats = [RomixStats(s, c, pk) for _, s, c, pk in mixed]
    dk = pbkdf2(bytes(password), b"".join(m[0] for m in mixed), 1, params.dk_len)
    return dk, stats


@dataclass(frozen=True)
class MfRecord:
    log_n: int
    p: int
    salt: bytes
    dk: bytes

    def __post_init__(self):
        MfParams(1 << self.log_n, self.p, len(self.dk))
        if not self.salt:
            raise ParameterError("salt must not be empty")

    @property
    def params(self) -> MfParams:
        return MfParams(1 << self.log_n, self.p, len(self.dk))

    def to_string(self) -> str:
        return f"$mfc$N={self.log_n},p={self.p}${self.salt.hex()}${self.dk.hex()}"


def parse_record(text: str) -> MfRecord:
    m = _RECORD_RE.match(text)
    if not m:
        raise FormatError(f"malformed mfcrypt record: {text!r}")
    log_n, p = int(m.group(1)), int(m.group(2))
    salt_hex, dk_hex = m.group(3), m.group(4)
    if len(salt_hex) % 2 or len(dk_hex) % 2:
        raise FormatError("mfcrypt record hex fields must have even length")
    if log_n < 1 or (1 << log_n) > MAX_N:
        raise FormatError(f"mfcrypt record N=2^{log_n} out of range")
    try:
        return MfRecord(log_n, p, bytes.fromhex(salt_hex), bytes.fromhex(dk_hex))
    except ParameterError as exc:
        raise FormatError(f"mfcrypt record invalid: {exc}") from exc


def mfcrypt_hash(password: bytes, salt: bytes, params: MfParams,
                 memory_budget: int = DEFAULT_MEMORY_BUDGET) -> MfRecord:
    dk = mfcrypt(password, salt, params, memory_budget)
    return MfRecord(params.log_n, params.p, bytes(salt), dk)


def mfcrypt_verify(password: bytes, record: MfRecord,
                   memory_budget: int = DEFAULT_MEMORY_BUDGET) -> bool:
    if isinstance(record, str):
        record = parse_record(record)
    probe = mfcrypt(bytes(password), record.salt, record.params, memory_budget)
    return _hmac.compare_digest(probe, record.dk)
