"""Attacks against breach dumps: dictionary search and rainbow lookup.

Work accounting is exact: one counter increment per KDF/digest evaluation,
so tests can assert the salted-vs-unsalted work ratio rather than trust
wall-clock noise.  Every reported crack is re-verified before it is added.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

from . import rainbow as _rainbow
from .backend import kernels
from .errors import ParameterError, SchemeMismatchError
from .vault import Scheme, compute_verifier, password_bytes

UNSALTED_TAGS = ("plain", "sha1")


@dataclass
class AttackReport:
    scheme: str
    candidates_tried: int = 0
    cracked: list = field(default_factory=list)  # [(username, plaintext)]
    wall_time: float = 0.0
    hash_rate: float = 0.0
    hash_ops: int = 0
    peak_memory_blocks: int = 0
    false_alarms: int = 0
    records_touched: int = 0
    budget_exhausted: bool = False

    def crack_rate(self) -> float:
        return len(self.cracked) / self.wall_time if self.wall_time > 0 else 0.0

    def rows(self):
        """Key=value pairs for the report stream; timing-derived ones flagged."""
        yield "scheme", self.scheme, False
        yield "records", self.records_touched, False
        yield "candidates_tried", self.candidates_tried, False
        yield "hash_ops", self.hash_ops, False
        yield "cracked", len(self.cracked), False
        yield "false_alarms", self.false_alarms, False
        yield "peak_memory_blocks", self.peak_memory_blocks, False
        yield "budget_exhausted", int(self.budget_exhausted), False
        yield "wall_time_s", f"{self.wall_time:.6f}", True
        yield "hash_rate", f"{self.hash_rate:.1f}", True


def _dump_scheme_label(records) -> str:
    tags = sorted({scheme.tag for _, scheme, _, _ in records})
    if not tags:
        return "empty"
    return tags[0] if len(tags) == 1 else "mixed(" + ",".join(tags) + ")"


def dictionary_attack(records, wordlist, time_budget: float | None = None) -> AttackReport:
    """Try every wordlist entry against every record.

    Unsalted records share one digest per candidate through an index;
    salted records pay per (record, candidate) pair.  A record stops
    consuming candidates once cracked.  time_budget (seconds) cuts the
    salted loops off mid-flight; partial results are still verified.
    """
    entries = wordlist.entries if hasattr(wordlist, "entries") else list(wordlist)
    if not entries:
        raise ParameterError("wordlist must not be empty")
    report = AttackReport(scheme=_dump_scheme_label(records))
    report.records_touched = len(records)
    start = time.perf_counter()
    deadline = start + time_budget if time_budget is not None else None

    def out_of_time():
        return deadline is not None and time.perf_counter() >= deadline

    unsalted = [r for r in records if r[1].tag in UNSALTED_TAGS]
    salted = [r for r in records if r[1].tag not in UNSALTED_TAGS]
    max_candidates = 0

    if unsalted:
        plain_index: dict = {}
        sha1_index: dict = {}
        for rec in unsalted:
            index = plain_index if rec[1].tag == "plain" else sha1_index
            index.setdefault(rec[3], []).append(rec)
        remaining = len(unsalted)
        consumed = 0
        for cand in entries:
            if remaining == 0 or out_of_time():
                report.budget_exhausted = remaining > 0 and out_of_time()
                break
            consumed += 1
            pw = password_bytes(cand)
            # plain stores the password itself; hashing only for sha1
            hits = list(plain_index.pop(pw, ()))
            if sha1_index:
                digest = kernels.sha1(pw)
                report.hash_ops += 1
                hits += sha1_index.pop(digest, ())
            for username, scheme, salt, verifier in hits:
                if compute_verifier(scheme, pw, salt) == verifier:
                    report.cracked.append((username, cand))
                    remaining -= 1
        max_candidates = max(max_candidates, consumed)

    for username, scheme, salt, verifier in salted:
        if out_of_time():
            report.budget_exhausted = True
            break
        if scheme.tag == "mfcrypt":
            n = 1 << scheme.param_dict["log_n"]
            report.peak_memory_blocks = max(report.peak_memory_blocks, n)
        consumed = 0
        for cand in entries:
            if out_of_time():
                report.budget_exhausted = True
                break
            consumed += 1
            probe = compute_verifier(scheme, password_bytes(cand), salt)
            report.hash_ops += 1
            if probe == verifier:
                report.cracked.append((username, cand))
                break
        max_candidates = max(max_candidates, consumed)

    report.candidates_tried = max_candidates
    report.wall_time = time.perf_counter() - start
    if report.wall_time > 0:
        report.hash_rate = report.hash_ops / report.wall_time
    return report


def rainbow_attack(records, table: _rainbow.RainbowTable) -> AttackReport:
    """Rainbow lookup per record; refuses dumps the table cannot target."""
    for username, scheme, salt, verifier in records:
        if scheme.tag == "sha1":
            if table.salt:
                raise SchemeMismatchError(
                    "table was built for a salted target but the dump is unsalted"
                )
        elif scheme.tag == "sha1-salted":
            if salt != table.salt:
                raise SchemeMismatchError(
                    f"record {username!r} salt does not match the table's salt"
                )
        else:
            raise SchemeMismatchError(
                f"rainbow attack needs sha1 digests, record {username!r} "
                f"is {scheme.tag}"
            )
    report = AttackReport(scheme=_dump_scheme_label(records))
    report.records_touched = len(records)
    start = time.perf_counter()
    for username, scheme, salt, verifier in records:
        result = table.lookup(verifier)
        report.candidates_tried += 1
        report.hash_ops += result.steps_examined
        report.false_alarms += result.false_alarms
        if result.found:
            plaintext = result.plaintext.decode("latin-1")
            if kernels.sha1(table.salt + result.plaintext) == verifier:
                report.cracked.append((username, plaintext))
    report.wall_time = time.perf_counter() - start
    if report.wall_time > 0:
        report.hash_rate = report.hash_ops / report.wall_time
    return report


def duplicate_analysis(records) -> Counter:
    """Verifier multiplicities; for unsalted dumps this is the password
    popularity histogram, which is exactly the leak."""
    return Counter(verifier for _, _, _, verifier in records)


def multiplicity_histogram(counts: Counter) -> dict:
    """How many verifiers occur k times, for each k."""
    hist: dict[int, int] = {}
    for mult in counts.values():
        hist[mult] = hist.get(mult, 0) + 1
    return dict(sorted(hist.items()))
