"""Blowfish, the EksBlowfish cost-parameterized schedule, and bcrypt hashing.

The schedule starts from pi-digit constants, folds in the salt once, then
runs 2^cost alternating key/salt passes with the salt zeroed.  The verifier
is the 24-octet magic plaintext encrypted 64 times, truncated to 23 octets.
Records use a project-local hex format, not the legacy base-64 wire form.
"""

from __future__ import annotations

import hmac as _hmac
import re
from dataclasses import dataclass

from .backend import kernels
from .errors import FormatError, ParameterError

MIN_COST = 4
MAX_COST = 31
SALT_SIZE = 16
VERIFIER_SIZE = 23
MAX_PASSWORD = 72

_RECORD_RE = re.compile(r"^\$2x\$(\d{2})\$([0-9a-f]{32})([0-9a-f]{46})$")


def check_cost(cost: int) -> int:
    if not isinstance(cost, int) or isinstance(cost, bool):
        raise ParameterError("cost must be an integer")
    if not MIN_COST <= cost <= MAX_COST:
        raise ParameterError(f"cost must be in [{MIN_COST}, {MAX_COST}], got {cost}")
    return cost


def _check_salt(salt: bytes) -> bytes:
    if len(salt) != SALT_SIZE:
        raise ParameterError(f"salt must be {SALT_SIZE} octets, got {len(salt)}")
    return bytes(salt)


def _check_key(key: bytes) -> bytes:
    if not 1 <= len(key) <= MAX_PASSWORD:
        raise ParameterError(f"key must be 1..{MAX_PASSWORD} octets, got {len(key)}")
    return bytes(key)


def init_state():
    """Fresh BlowfishState holding the pi-digit constants."""
    return kernels.blowfish_init_state()


def expand_key(state, salt: bytes | None, key: bytes):
    """One key-schedule pass; salt=None is the pseudocode's zero-salt variant."""
    if salt is not None:
        salt = _check_salt(salt)
    kernels.blowfish_expand_key(state, salt, _check_key(key))
    return state


def encrypt_block(state, block: bytes) -> bytes:
    return kernels.blowfish_encrypt_block(state, block)


def decrypt_block(state, block: bytes) -> bytes:
    return kernels.blowfish_decrypt_block(state, block)


def eksblowfish_setup(cost: int, salt: bytes, key: bytes):
    """InitState, one salted pass, then 2^cost key/salt passes."""
    check_cost(cost)
    return kernels.eksblowfish_setup(cost, _check_salt(salt), _check_key(key))


def expected_expand_key_calls(cost: int) -> int:
    return 1 + 2 ** (cost + 1)


@dataclass(frozen=True)
class BcryptRecord:
    cost: int
    salt: bytes
    verifier: bytes

    def __post_init__(self):
        check_cost(self.cost)
        if len(self.salt) != SALT_SIZE:
            raise ParameterError(f"salt must be {SALT_SIZE} octets")
        if len(self.verifier) != VERIFIER_SIZE:
            raise ParameterError(f"verifier must be {VERIFIER_SIZE} octets")

    def to_string(self) -> str:
        return f"$2x${self.cost:02d}${self.salt.hex()}{self.verifier.hex()}"


def parse_record(text: str) -> BcryptRecord:
    m = _RECORD_RE.match(text)
    if not m:
        raise FormatError(f"malformed bcrypt record: {text!r}")
    cost = int(m.group(1))
    if not MIN_COST <= cost <= MAX_COST:
        raise FormatError(f"bcrypt record cost {cost} out of range")
    return BcryptRecord(cost, bytes.fromhex(m.group(2)), bytes.fromhex(m.group(3)))


def bcrypt_hash(password: bytes, salt: bytes, cost: int) -> BcryptRecord:
    """Reference bcrypt procedure over EksBlowfish; password is NUL-terminated
    into the schedule, never truncated."""
    if not 1 <= len(password) <= MAX_PASSWORD:
        raise ParameterError(
            f"password must be 1..{MAX_PASSWORD} octets, got {len(password)}"
        )
    check_cost(cost)
    verifier = kernels.bcrypt_core(cost, _check_salt(salt), bytes(password) + b"\x00")
    return BcryptRecord(cost, bytes(salt), verifier)


def bcrypt_verify(password: bytes, record: BcryptRecord) -> bool:
    if isinstance(record, str):
        record = parse_record(record)
    if not 1 <= len(password) <= MAX_PASSWORD:
        return False
    probe = kernels.bcrypt_core(record.cost, record.salt, bytes(password) + b"\x00")
    return _hmac.compare_digest(probe, record.verifier)
