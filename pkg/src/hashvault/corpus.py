"""Synthetic password corpora with Zipf-distributed popularity.

Stands in for leaked corpora: a short head of genuinely common passwords
followed by synthetic filler, sampled so rank r carries weight 1/r^s.  The
generator is deterministic under its seed and doubles as the oracle for
popularity assertions in tests.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import accumulate

from .errors import ParameterError
from .rng import DeterministicRandom

# Head of the vocabulary, most popular first.  These mirror the perennial
# top entries of public breach tallies.
COMMON_PASSWORDS = (
    "123456", "password", "12345678", "qwerty", "abc123",
    "123456789", "111111", "1234567", "iloveyou", "adobe123",
    "123123", "admin", "1234567890", "letmein", "photoshop",
    "1234", "monkey", "shadow", "sunshine", "12345",
    "password1", "princess", "azerty", "trustno1", "000000",
)


def make_vocabulary(size: int) -> list[str]:
    """The `size` candidate passwords in popularity-rank order."""
    if size < 1:
        raise ParameterError(f"vocabulary size must be >= 1, got {size}")
    vocab = list(COMMON_PASSWORDS[:size])
    vocab.extend(f"pw{i:06d}" for i in range(size - len(vocab)))
    return vocab


@dataclass
class Wordlist:
    entries: list[str]
    source: str = "synthetic"

    def __post_init__(self):
        if not self.entries:
            raise ParameterError("wordlist must not be empty")

    @classmethod
    def from_file(cls, path) -> "Wordlist":
        with open(path, "r", encoding="utf-8") as fh:
            entries = [line.rstrip("\n") for line in fh if line.rstrip("\n")]
        return cls(entries, source=str(path))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.writelines(e + "\n" for e in self.entries)


def top_wordlist(k: int, vocab_size: int | None = None) -> Wordlist:
    """The k most popular vocabulary entries: the attacker's cheap dictionary."""
    vocab = make_vocabulary(vocab_size if vocab_size is not None else max(k, 1))
    if k < 1 or k > len(vocab):
        raise ParameterError(f"k must be in [1, {len(vocab)}], got {k}")
    return Wordlist(vocab[:k], source=f"top-{k} of zipf vocabulary")


@dataclass
class ZipfCorpus:
    users: list = field(default_factory=list)  # [(username, password)]
    vocab: list = field(default_factory=list)
    exponent: float = 1.0
    seed: int = 0

    def passwords(self) -> list[str]:
        return [pw for _, pw in self.users]

    def frequency(self) -> dict:
        freq: dict[str, int] = {}
        for _, pw in self.users:
            freq[pw] = freq.get(pw, 0) + 1
        return freq

    def top_password(self):
        freq = self.frequency()
        return max(freq.items(), key=lambda kv: (kv[1], -self.vocab.index(kv[0])))


def generate_corpus(n_users: int, vocab_size: int = 200, exponent: float = 1.0,
                    seed: int = 0) -> ZipfCorpus:
    if n_users < 1:
        raise ParameterError(f"n_users must be >= 1, got {n_users}")
    if exponent <= 0:
        raise ParameterError(f"exponent must be > 0, got {exponent}")
    vocab = make_vocabulary(vocab_size)
    weights = [1.0 / (rank + 1) ** exponent for rank in range(len(vocab))]
    cumulative = list(accumulate(weights))
    total = cumulative[-1]
    rng = DeterministicRandom(seed).spawn("zipf-corpus")
    users = []
    for i in range(n_users):
        pick = bisect_right(cumulative, rng.random() * total)
        users.append((f"user{i:05d}", vocab[min(pick, len(vocab) - 1)]))
    return ZipfCorpus(users=users, vocab=vocab, exponent=exponent, seed=seed)
