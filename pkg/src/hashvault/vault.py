"""Credential vault: pluggable hashing schemes, enrollment, migration, export.

Storage is line-oriented text.  Vault lines carry a creation timestamp;
breach-dump lines are the same minus the timestamp and, optionally, minus
real usernames.  The `plain` scheme exists as the insecure baseline and is
blocked from dumps unless explicitly allowed.
"""

from __future__ import annotations

import hmac as _hmac
import re
from dataclasses import dataclass
from datetime import datetime, timezone

from . import bcrypt as _bcrypt
from . import mfcrypt as _mfcrypt
from .backend import kernels
from .errors import (
    DuplicateUserError,
    FormatError,
    ParameterError,
    VerificationError,
)
from .rng import DeterministicRandom

SCHEME_TAGS = ("plain", "sha1", "sha1-salted", "bcrypt", "mfcrypt")
SALT_SIZE = 16

_VAULT_HEADER_RE = re.compile(r"^#hashvault v1 default=([a-z0-9-]+)$")
_DUMP_HEADER = "#hashvault-dump v1"
_BCRYPT_PARAMS_RE = re.compile(r"^cost=(\d{1,2})$")
_MFC_PARAMS_RE = re.compile(r"^N=(\d{1,2}),p=(\d+)$")
_HEX_RE = re.compile(r"^(?:[0-9a-f]{2})*$")

# Fixed salt fed to the dummy KDF that runs for unknown usernames, so the
# rejection path costs the same as a real mismatch.
_DUMMY_SALT = bytes(range(16))


@dataclass(frozen=True)
class Scheme:
    tag: str
    params: tuple = ()

    def __post_init__(self):
        if self.tag not in SCHEME_TAGS:
            raise ParameterError(f"unknown scheme tag {self.tag!r}")
        object.__setattr__(self, "params", tuple(sorted(dict(self.params).items())))
        p = self.param_dict
        if self.tag == "bcrypt":
            cost = p.pop("cost", 10)
            _bcrypt.check_cost(cost)
            object.__setattr__(self, "params", (("cost", cost),))
        elif self.tag == "mfcrypt":
            log_n = p.pop("log_n", 10)
            par = p.pop("p", 1)
            dk_len = p.pop("dk_len", 32)
            if not isinstance(log_n, int) or log_n < 1:
                raise ParameterError(f"log_n must be a positive integer, got {log_n}")
            _mfcrypt.MfParams(1 << log_n, par, dk_len)
            object.__setattr__(
                self, "params", (("dk_len", dk_len), ("log_n", log_n), ("p", par))
            )
        if p:
            raise ParameterError(f"scheme {self.tag} got unknown params {sorted(p)}")

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def params_string(self) -> str:
        p = self.param_dict
        if self.tag == "bcrypt":
            return f"cost={p['cost']:02d}"
        if self.tag == "mfcrypt":
            return f"N={p['log_n']},p={p['p']}"
        return ""

    def salted(self) -> bool:
        return self.tag in ("sha1-salted", "bcrypt", "mfcrypt")


def scheme_from_strings(tag: str, params_str: str) -> Scheme:
    """Inverse of params_string, for vault and dump lines."""
    if tag in ("plain", "sha1", "sha1-salted"):
        if params_str:
            raise FormatError(f"scheme {tag} takes no params, got {params_str!r}")
        return Scheme(tag)
    if tag == "bcrypt":
        m = _BCRYPT_PARAMS_RE.match(params_str)
        if not m:
            raise FormatError(f"bad bcrypt params {params_str!r}")
        try:
            return Scheme(tag, {"cost": int(m.group(1))})
        except ParameterError as exc:
            raise FormatError(str(exc)) from exc
    if tag == "mfcrypt":
        m = _MFC_PARAMS_RE.match(params_str)
        if not m:
            raise FormatError(f"bad mfcrypt params {params_str!r}")
        try:
            return Scheme(tag, {"log_n": int(m.group(1)), "p": int(m.group(2))})
        except ParameterError as exc:
            raise FormatError(str(exc)) from exc
    raise FormatError(f"unknown scheme tag {tag!r}")


def password_bytes(password) -> bytes:
    if isinstance(password, str):
        return password.encode("utf-8")
    if isinstance(password, (bytes, bytearray)):
        return bytes(password)
    raise ParameterError("password must be str or bytes")


def compute_verifier(scheme: Scheme, password, salt: bytes) -> bytes:
    """The scheme's KDF, shared by enroll, verify, and the attack harness."""
    pw = password_bytes(password)
    p = scheme.param_dict
    if scheme.tag == "plain":
        if salt:
            raise ParameterError("plain scheme takes no salt")
        return pw
    if scheme.tag == "sha1":
        if salt:
            raise ParameterError("sha1 scheme takes no salt")
        return kernels.sha1(pw)
    if scheme.tag == "sha1-salted":
        if len(salt) != SALT_SIZE:
            raise ParameterError(f"sha1-salted needs a {SALT_SIZE}-octet salt")
        return kernels.sha1(salt + pw)
    if scheme.tag == "bcrypt":
        return _bcrypt.bcrypt_hash(pw, salt, p["cost"]).verifier
    if scheme.tag == "mfcrypt":
        if not salt:
            raise ParameterError("mfcrypt needs a salt")
        return _mfcrypt.mfcrypt(
            pw, salt, _mfcrypt.MfParams(1 << p["log_n"], p["p"], p["dk_len"])
        )
    raise ParameterError(f"unknown scheme tag {scheme.tag!r}")


def expected_verifier_len(scheme: Scheme) -> int | None:
    if scheme.tag == "sha1" or scheme.tag == "sha1-salted":
        return 20
    if scheme.tag == "bcrypt":
        return _bcrypt.VERIFIER_SIZE
    if scheme.tag == "mfcrypt":
        return scheme.param_dict["dk_len"]
    return None  # plain: any non-empty length


@dataclass
class CredentialRecord:
    username: str
    scheme: Scheme
    salt: bytes
    verifier: bytes
    created_at: str

    def __post_init__(self):
        check_username(self.username)
        want = expected_verifier_len(self.scheme)
        if want is not None and len(self.verifier) != want:
            raise ParameterError(
                f"scheme {self.scheme.tag} verifier must be {want} octets, "
                f"got {len(self.verifier)}"
            )
        if self.scheme.salted():
            if self.scheme.tag == "sha1-salted" and len(self.salt) != SALT_SIZE:
                raise ParameterError("sha1-salted salt must be 16 octets")
            if not self.salt:
                raise ParameterError(f"scheme {self.scheme.tag} requires a salt")
        elif self.salt:
            raise ParameterError(f"scheme {self.scheme.tag} stores no salt")

    def body_string(self) -> str:
        return (
            f"{self.scheme.tag}${self.scheme.params_string()}"
            f"${self.salt.hex()}${self.verifier.hex()}"
        )

    def to_line(self) -> str:
        return f"{self.username}:{self.body_string()}:{self.created_at}"


def check_username(username: str) -> str:
    if not isinstance(username, str) or not username:
        raise ParameterError("username must be a non-empty string")
    if ":" in username or "\n" in username or "\r" in username:
        raise ParameterError("username must not contain ':' or line breaks")
    return username


def parse_record_body(body: str):
    """Split `scheme$params$salthex$verifierhex` into (Scheme, salt, verifier)."""
    parts = body.split("$")
    if len(parts) != 4:
        raise FormatError(f"record body needs 4 $-fields, got {len(parts)}")
    tag, params_str, salt_hex, verifier_hex = parts
    scheme = scheme_from_strings(tag, params_str)
    if not _HEX_RE.match(salt_hex) or not _HEX_RE.match(verifier_hex):
        raise FormatError("salt and verifier must be lowercase hex")
    salt, verifier = bytes.fromhex(salt_hex), bytes.fromhex(verifier_hex)
    if not verifier:
        raise FormatError("record verifier must not be empty")
    return scheme, salt, verifier


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


_CREATED_AT_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$")


class Vault:
    """Single-writer credential store; verify may run against a loaded snapshot."""

    def __init__(self, default_scheme: Scheme | None = None,
                 rng: DeterministicRandom | None = None, clock=None):
        self.default_scheme = default_scheme or Scheme("bcrypt")
        self.records: list[CredentialRecord] = []
        self._by_user: dict[str, CredentialRecord] = {}
        self.rng = rng if rng is not None else DeterministicRandom(None)
        self.clock = clock or _utc_now

    def __len__(self):
        return len(self.records)

    def get(self, username: str) -> CredentialRecord | None:
        return self._by_user.get(username)

    def _fresh_salt(self, scheme: Scheme) -> bytes:
        return self.rng.getbytes(SALT_SIZE) if scheme.salted() else b""

    def enroll(self, username: str, password, scheme: Scheme | None = None,
               now: str | None = None) -> CredentialRecord:
        check_username(username)
        if username in self._by_user:
            raise DuplicateUserError(f"username {username!r} already enrolled")
        pw = password_bytes(password)
        if not pw:
            raise ParameterError("password must not be empty")
        scheme = scheme or self.default_scheme
        salt = self._fresh_salt(scheme)
        verifier = compute_verifier(scheme, pw, salt)
        record = CredentialRecord(username, scheme, salt, verifier,
                                  now if now is not None else self.clock())
        self.records.append(record)
        self._by_user[username] = record
        return record

    def verify(self, username: str, password) -> bool:
        record = self._by_user.get(username)
        if record is None:
            # Unknown user: burn the default scheme's cost anyway so the
            # rejection does not reveal whether the username exists.
            probe = password_bytes(password) or b"\x00"
            dummy_salt = _DUMMY_SALT if self.default_scheme.salted() else b""
            _hmac.compare_digest(
                compute_verifier(self.default_scheme, probe, dummy_salt), b""
            )
            return False
        try:
            probe = compute_verifier(record.scheme, password, record.salt)
        except ParameterError:
            return False
        return _hmac.compare_digest(probe, record.verifier)

    def migrate(self, username: str, password, new_scheme: Scheme,
                now: str | None = None) -> CredentialRecord:
        if not self.verify(username, password):
            raise VerificationError(
                f"cannot migrate {username!r}: password verification failed"
            )
        old = self._by_user[username]
        salt = self._fresh_salt(new_scheme)
        verifier = compute_verifier(new_scheme, password, salt)
        record = CredentialRecord(username, new_scheme, salt, verifier,
                                  now if now is not None else self.clock())
        self.records[self.records.index(old)] = record
        self._by_user[username] = record
        return record

    # -- persistence --------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"#hashvault v1 default={self.default_scheme.tag}"]
        lines.extend(r.to_line() for r in self.records)
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text: str, rng=None, clock=None) -> "Vault":
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise FormatError("empty vault file")
        m = _VAULT_HEADER_RE.match(lines[0])
        if not m:
            raise FormatError(f"bad vault header: {lines[0]!r}")
        tag = m.group(1)
        if tag not in SCHEME_TAGS:
            raise FormatError(f"vault header names unknown scheme {tag!r}")
        vault = cls(default_scheme=Scheme(tag), rng=rng, clock=clock)
        for ln, line in enumerate(lines[1:], start=2):
            try:
                username, rest = line.split(":", 1)
                body, created_at = rest.split(":", 1)
            except ValueError:
                raise FormatError(f"line {ln}: not a vault record") from None
            if not _CREATED_AT_RE.match(created_at):
                raise FormatError(f"line {ln}: bad created_at {created_at!r}")
            try:
                scheme, salt, verifier = parse_record_body(body)
                record = CredentialRecord(username, scheme, salt, verifier, created_at)
            except (FormatError, ParameterError) as exc:
                raise FormatError(f"line {ln}: {exc}") from exc
            if record.username in vault._by_user:
                raise FormatError(f"line {ln}: duplicate username {record.username!r}")
            vault.records.append(record)
            vault._by_user[record.username] = record
        return vault

    @classmethod
    def load(cls, path, rng=None, clock=None) -> "Vault":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read(), rng=rng, clock=clock)

    # -- breach dump ---------------------------------------------------------

    def export_breach_dump(self, allow_plaintext: bool = False,
                           anonymize: bool = False) -> str:
        """What a server breach exposes: schemes, salts, verifiers, and no
        plaintext unless the caller insists on exporting `plain` records."""
        if not allow_plaintext:
            plain = [r.username for r in self.records if r.scheme.tag == "plain"]
            if plain:
                raise ParameterError(
                    f"refusing to export {len(plain)} plaintext record(s); "
                    "pass allow_plaintext to override"
                )
        lines = [_DUMP_HEADER]
        for i, r in enumerate(self.records):
            name = f"u{i:06d}" if anonymize else r.username
            lines.append(f"{name}:{r.body_string()}")
        return "\n".join(lines) + "\n"


def parse_dump(text: str):
    """Breach-dump lines as (username, Scheme, salt, verifier) tuples."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != _DUMP_HEADER:
        raise FormatError("bad breach-dump header")
    out = []
    seen = set()
    for ln, line in enumerate(lines[1:], start=2):
        try:
            username, body = line.split(":", 1)
        except ValueError:
            raise FormatError(f"line {ln}: not a dump record") from None
        try:
            scheme, salt, verifier = parse_record_body(body)
        except (FormatError, ParameterError) as exc:
            raise FormatError(f"line {ln}: {exc}") from exc
        if username in seen:
            raise FormatError(f"line {ln}: duplicate username {username!r}")
        seen.add(username)
        out.append((username, scheme, salt, verifier))
    return out
