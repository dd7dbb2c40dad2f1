"""Measurement harness: throughput benches, cost scaling, salt blowup,
duplicate analysis plumbing, and the end-to-end breach drill.

Timing numbers are machine-dependent; experiments assert orderings and
ratio brackets, never absolute rates.  Counters (chains built, hash ops,
ExpandKey calls) are exact and deterministic under fixed seeds.
"""

from __future__ import annotations

import math
import os
import statistics
import time
from dataclasses import dataclass, field

from . import bcrypt as _bcrypt
from . import mfcrypt as _mfcrypt
from . import rainbow as _rainbow
from .attacks import dictionary_attack
from .backend import available_backends, load_backend
from .corpus import generate_corpus, top_wordlist
from .errors import ParameterError
from .rng import DeterministicRandom
from .vault import Scheme, Vault, parse_dump

DEFAULT_BENCH_SECONDS = 1.0


def bench_seconds(default: float = DEFAULT_BENCH_SECONDS) -> float:
    """Per-run bench duration; HASHVAULT_BENCH_SECONDS overrides (CI knob)."""
    env = os.environ.get("HASHVAULT_BENCH_SECONDS")
    if not env:
        return default
    try:
        value = float(env)
    except ValueError:
        raise ParameterError(f"HASHVAULT_BENCH_SECONDS must be a number, got {env!r}")
    if value <= 0:
        raise ParameterError("HASHVAULT_BENCH_SECONDS must be positive")
    return value


@dataclass
class BenchResult:
    scheme: str
    params: str
    runs: list = field(default_factory=list)  # rates, hashes/second
    median_rate: float = 0.0

    def rows(self):
        yield "scheme", self.scheme, False
        yield "params", self.params, False
        yield "runs", len(self.runs), False
        yield "median_rate", f"{self.median_rate:.2f}", True
        for i, r in enumerate(self.runs):
            yield f"run{i}_rate", f"{r:.2f}", True


def _make_op(scheme_tag: str, params: dict):
    from .backend import kernels

    if scheme_tag == "sha1":
        counter = [0]

        def op():
            counter[0] += 1
            kernels.sha1(b"bench-%08d" % counter[0])
        return op, 512, ""
    if scheme_tag == "sha1-salted":
        salt = bytes(range(16))
        counter = [0]

        def op():
            counter[0] += 1
            kernels.sha1(salt + b"bench-%08d" % counter[0])
        return op, 512, ""
    if scheme_tag == "bcrypt":
        cost = params.get("cost", 10)
        _bcrypt.check_cost(cost)
        salt = bytes(range(16))

        def op():
            kernels.bcrypt_core(cost, salt, b"bench-password\x00")
        return op, 1, f"cost={cost}"
    if scheme_tag == "mfcrypt":
        mf = _mfcrypt.MfParams(
            params.get("n", 1 << params.get("log_n", 10)),
            params.get("p", 1),
            params.get("dk_len", 32),
        )

        def op():
            _mfcrypt.mfcrypt(b"bench-password", b"bench-salt", mf)
        return op, 1, f"N={mf.n},p={mf.p}"
    raise ParameterError(f"cannot bench scheme {scheme_tag!r}")


def _rate_once(op, batch: int, duration: float) -> float:
    done = 0
    start = time.perf_counter()
    while True:
        for _ in range(batch):
            op()
        done += batch
        elapsed = time.perf_counter() - start
        if elapsed >= duration:
            return done / elapsed


def throughput_bench(scheme_tag: str, params: dict | None = None,
                     duration: float | None = None, runs: int = 3) -> BenchResult:
    """Median ops/second over `runs` timed runs, after an untimed warm-up."""
    if duration is None:
        duration = bench_seconds()
    elif duration < 1.0:
        raise ParameterError("bench duration must be at least 1 second")
    if runs < 3:
        raise ParameterError(f"need at least 3 runs for a median, got {runs}")
    op, batch, params_str = _make_op(scheme_tag, params or {})
    _rate_once(op, batch, min(duration, 0.2))  # warm-up, excluded
    rates = [_rate_once(op, batch, duration) for _ in range(runs)]
    return BenchResult(scheme_tag, params_str, rates, statistics.median(rates))


@dataclass
class CostRow:
    cost: int
    median_s: float
    ratio: float | None  # vs previous cost; None on the first row

    def rows(self):
        yield "cost", self.cost, False
        yield "median_s", f"{self.median_s:.6f}", True
        yield "ratio", "" if self.ratio is None else f"{self.ratio:.3f}", True


def cost_scaling_experiment(costs, runs: int = 5) -> list[CostRow]:
    """Median bcrypt time per cost and the consecutive-cost ratio."""
    from .backend import kernels

    costs = list(costs)
    if not costs:
        raise ParameterError("cost range must not be empty")
    for c in costs:
        _bcrypt.check_cost(c)
    if runs < 1:
        raise ParameterError(f"runs must be >= 1, got {runs}")
    salt = bytes(range(16))
    key = b"scaling-probe\x00"
    rows = []
    prev = None
    for cost in costs:
        kernels.bcrypt_core(cost, salt, key)  # warm-up, excluded
        times = []
        for _ in range(runs):
            t0 = time.perf_counter()
            kernels.bcrypt_core(cost, salt, key)
            times.append(time.perf_counter() - t0)
        med = statistics.median(times)
        rows.append(CostRow(cost, med, None if prev is None else med / prev))
        prev = med
    return rows


@dataclass
class BlowupRow:
    bits: int
    salt_count: int
    total_chains: int
    factor: float

    def rows(self):
        yield "salt_bits", self.bits, False
        yield "salt_count", self.salt_count, False
        yield "total_chains", self.total_chains, False
        yield "factor", f"{self.factor:.3f}", False


def chains_to_coverage(domain: _rainbow.ReductionDomain, salt: bytes,
                       chain_length: int, target_coverage: float,
                       seed) -> int:
    """Minimal chain count reaching target coverage for this salt.

    Walks chains in the same seeded start order build_table uses, so the
    answer is exactly the m at which build_table's coverage first crosses
    the target.
    """
    from .backend import kernels

    if not 0 < target_coverage <= 1:
        raise ParameterError("target_coverage must be in (0, 1]")
    rng = seed if isinstance(seed, DeterministicRandom) else DeterministicRandom(seed)
    need = math.ceil(target_coverage * domain.size)
    covered: set[bytes] = set()
    seen_starts: set[int] = set()
    chains = 0
    while len(covered) < need:
        if len(seen_starts) >= domain.size:
            raise ParameterError(
                f"domain exhausted at coverage {len(covered) / domain.size:.3f} "
                f"before reaching {target_coverage}"
            )
        idx = rng.randbelow(domain.size)
        if idx in seen_starts:
            continue
        seen_starts.add(idx)
        chains += 1
        p = domain.index_to_plaintext(idx)
        for k in range(chain_length):
            covered.add(p)
            p = _rainbow.reduce(kernels.sha1(salt + p), k, domain)
    return chains


def salt_values(bits: int) -> list[bytes]:
    """ASCII bit-string salts: b=0 -> [''], b=2 -> ['00','01','10','11']."""
    if bits < 0:
        raise ParameterError(f"salt bits must be >= 0, got {bits}")
    if bits == 0:
        return [b""]
    return [format(i, f"0{bits}b").encode("ascii") for i in range(1 << bits)]


def salt_blowup_experiment(bits_list=(0, 1, 2, 4),
                           domain: _rainbow.ReductionDomain | None = None,
                           chain_length: int = 100,
                           target_coverage: float = 0.35,
                           seed: int = 0) -> list[BlowupRow]:
    """Chains needed to reach fixed coverage for every value of a b-bit salt,
    relative to the unsalted baseline."""
    bits_list = sorted(set(bits_list))
    if any(b > 4 for b in bits_list):
        raise ParameterError("salt spaces beyond 4 bits exceed the desk-scale budget")
    if domain is None:
        domain = _rainbow.ReductionDomain(b"0123456789", 4)
    master = DeterministicRandom(seed)
    baseline = sum(
        chains_to_coverage(domain, s, chain_length, target_coverage,
                           master.spawn(b"salt:" + s))
        for s in salt_values(0)
    )
    rows = []
    for bits in bits_list:
        total = baseline if bits == 0 else sum(
            chains_to_coverage(domain, s, chain_length, target_coverage,
                               master.spawn(b"salt:" + s))
            for s in salt_values(bits)
        )
        rows.append(BlowupRow(bits, len(salt_values(bits)), total, total / baseline))
    return rows


@dataclass
class DrillReport:
    users: int
    wordlist_size: int
    phase1_cracked: int
    phase1_wall: float
    phase2_cracked: int
    phase2_wall: float
    phase2_hash_ops: int
    migrate_wall: float
    cost: int

    @property
    def phase1_rate(self) -> float:
        return self.phase1_cracked / self.phase1_wall if self.phase1_wall > 0 else 0.0

    @property
    def phase2_rate(self) -> float:
        return self.phase2_cracked / self.phase2_wall if self.phase2_wall > 0 else 0.0

    @property
    def rate_drop(self) -> float:
        if self.phase2_rate == 0:
            return float("inf")
        return self.phase1_rate / self.phase2_rate

    def rows(self):
        yield "users", self.users, False
        yield "wordlist_size", self.wordlist_size, False
        yield "phase1_cracked", self.phase1_cracked, False
        yield "phase2_cracked", self.phase2_cracked, False
        yield "phase2_hash_ops", self.phase2_hash_ops, False
        yield "bcrypt_cost", self.cost, False
        yield "phase1_wall_s", f"{self.phase1_wall:.6f}", True
        yield "phase2_wall_s", f"{self.phase2_wall:.6f}", True
        yield "phase1_crack_rate", f"{self.phase1_rate:.1f}", True
        yield "phase2_crack_rate", f"{self.phase2_rate:.4f}", True
        yield "rate_drop", f"{self.rate_drop:.1f}", True
        yield "migrate_wall_s", f"{self.migrate_wall:.3f}", True


def breach_drill(n_users: int = 1000, wordlist_size: int = 25,
                 vocab_size: int = 200, cost: int = 10, seed: int = 0,
                 phase2_budget: float = 4.0) -> DrillReport:
    """Unsalted breach, dictionary attack, vault-wide bcrypt migration,
    second attack under a time budget.

    Migration covers every account, not just the uncracked ones: remediation
    re-hashes the whole store, and leaving cracked records unsalted would let
    the second attack re-crack them instantly, measuring wordlist coverage
    instead of the KDF cost the drill is about.
    """
    corpus = generate_corpus(n_users, vocab_size=vocab_size, seed=seed)
    passwords = dict(corpus.users)
    vault = Vault(default_scheme=Scheme("sha1"),
                  rng=DeterministicRandom(seed).spawn(b"drill-vault"),
                  clock=lambda: "2026-01-01T00:00:00Z")
    for username, password in corpus.users:
        vault.enroll(username, password)
    wordlist = top_wordlist(wordlist_size, vocab_size)

    records1 = parse_dump(vault.export_breach_dump())
    report1 = dictionary_attack(records1, wordlist)
    for username, plaintext in report1.cracked:
        assert vault.verify(username, plaintext)

    t0 = time.perf_counter()
    new_scheme = Scheme("bcrypt", {"cost": cost})
    for username, password in corpus.users:
        vault.migrate(username, password, new_scheme)
    migrate_wall = time.perf_counter() - t0

    records2 = parse_dump(vault.export_breach_dump())
    report2 = dictionary_attack(records2, wordlist, time_budget=phase2_budget)
    for username, plaintext in report2.cracked:
        assert passwords[username] == plaintext

    return DrillReport(
        users=n_users,
        wordlist_size=wordlist_size,
        phase1_cracked=len(report1.cracked),
        phase1_wall=report1.wall_time,
        phase2_cracked=len(report2.cracked),
        phase2_wall=report2.wall_time,
        phase2_hash_ops=report2.hash_ops,
        migrate_wall=migrate_wall,
        cost=cost,
    )


@dataclass
class KernelRow:
    kernel: str
    backend: str
    rate: float  # operations (or steps) per second

    def rows(self):
        yield "kernel", self.kernel, False
        yield "backend", self.backend, False
        yield "rate", f"{self.rate:.1f}", True


def backend_comparison(duration: float = 0.3, runs: int = 3) -> list[KernelRow]:
    """Same kernels, both backends, median rates; the compiled/pure gap."""
    rows = []
    salt16 = bytes(range(16))
    domain_cs = b"0123456789"
    for name in available_backends():
        k = load_backend(name)
        cases = {
            "sha1": (lambda: k.sha1(b"bench-message-01"), 512, 1),
            "chain_walk_steps": (
                lambda: k.chain_walk(b"ab", domain_cs, b"4821", 0, 2000), 1, 2000),
            "bcrypt_cost6": (lambda: k.bcrypt_core(6, salt16, b"bench\x00"), 1, 1),
            "romix_n1024": (lambda: k.romix(bytes(128), 1024), 1, 1),
        }
        for label, (op, batch, per_call) in cases.items():
            _rate_once(op, batch, 0.05)  # warm-up
            rates = [_rate_once(op, batch, duration) * per_call for _ in range(runs)]
            rows.append(KernelRow(label, name, statistics.median(rates)))
    return rows
