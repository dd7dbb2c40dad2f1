"""Credential store: schemes, enroll/verify/migrate, files, breach dumps."""

import hashlib

import pytest

from hashvault import bcrypt as bc
from hashvault import mfcrypt as mfc
from hashvault.errors import (
    DuplicateUserError,
    FormatError,
    ParameterError,
    VerificationError,
)
from hashvault.rng import DeterministicRandom
from hashvault.vault import (
    SALT_SIZE,
    SCHEME_TAGS,
    CredentialRecord,
    Scheme,
    Vault,
    compute_verifier,
    parse_dump,
    parse_record_body,
    scheme_from_strings,
)

CLOCK = lambda: "2026-01-01T00:00:00Z"  # noqa: E731

CHEAP_BCRYPT = Scheme("bcrypt", {"cost": 4})
CHEAP_MFC = Scheme("mfcrypt", {"log_n": 2, "p": 1, "dk_len": 16})


def make_vault(scheme=None, seed=1):
    return Vault(default_scheme=scheme,
                 rng=DeterministicRandom(seed), clock=CLOCK)


# -- schemes ------------------------------------------------------------------

def test_scheme_tags():
    assert SCHEME_TAGS == ("plain", "sha1", "sha1-salted", "bcrypt", "mfcrypt")


def test_scheme_defaults():
    assert Scheme("bcrypt").param_dict == {"cost": 10}
    assert Scheme("mfcrypt").param_dict == {"dk_len": 32, "log_n": 10, "p": 1}
    assert Scheme("sha1").param_dict == {}


def test_scheme_params_strings():
    assert Scheme("bcrypt", {"cost": 6}).params_string() == "cost=06"
    assert Scheme("bcrypt", {"cost": 12}).params_string() == "cost=12"
    assert Scheme("mfcrypt", {"log_n": 4}).params_string() == "N=4,p=1"
    assert Scheme("sha1-salted").params_string() == ""


def test_scheme_validation():
    with pytest.raises(ParameterError):
        Scheme("md5")
    with pytest.raises(ParameterError):
        Scheme("sha1", {"cost": 4})
    with pytest.raises(ParameterError):
        Scheme("bcrypt", {"cost": 3})
    with pytest.raises(ParameterError):
        Scheme("bcrypt", {"cost": 4, "extra": 1})
    with pytest.raises(ParameterError):
        Scheme("mfcrypt", {"log_n": 0})


def test_scheme_from_strings_is_inverse():
    for scheme in (Scheme("plain"), Scheme("sha1"), Scheme("sha1-salted"),
                   Scheme("bcrypt", {"cost": 8}),
                   Scheme("mfcrypt", {"log_n": 4, "p": 2})):
        rebuilt = scheme_from_strings(scheme.tag, scheme.params_string())
        assert rebuilt.tag == scheme.tag
        assert rebuilt.param_dict.get("cost") == scheme.param_dict.get("cost")
        assert rebuilt.param_dict.get("log_n") == scheme.param_dict.get("log_n")


def test_scheme_from_strings_rejects_garbage():
    with pytest.raises(FormatError):
        scheme_from_strings("sha1", "cost=04")
    with pytest.raises(FormatError):
        scheme_from_strings("bcrypt", "cost=four")
    with pytest.raises(FormatError):
        scheme_from_strings("mfcrypt", "N=4")


def test_salted_flags():
    assert not Scheme("plain").salted()
    assert not Scheme("sha1").salted()
    assert Scheme("sha1-salted").salted()
    assert CHEAP_BCRYPT.salted()
    assert CHEAP_MFC.salted()


# -- verifier computation -----------------------------------------------------

def test_compute_verifier_plain_and_sha1():
    assert compute_verifier(Scheme("plain"), "secret", b"") == b"secret"
    assert (compute_verifier(Scheme("sha1"), "secret", b"")
            == hashlib.sha1(b"secret").digest())


def test_compute_verifier_salted_sha1_is_salt_first():
    salt = bytes(range(16))
    want = hashlib.sha1(salt + b"secret").digest()
    assert compute_verifier(Scheme("sha1-salted"), "secret", salt) == want


def test_compute_verifier_delegates_to_kdfs():
    salt = bytes(range(16))
    assert (compute_verifier(CHEAP_BCRYPT, b"pw", salt)
            == bc.bcrypt_hash(b"pw", salt, 4).verifier)
    assert (compute_verifier(CHEAP_MFC, b"pw", salt)
            == mfc.mfcrypt(b"pw", salt, mfc.MfParams(4, 1, 16)))


def test_compute_verifier_salt_rules():
    with pytest.raises(ParameterError):
        compute_verifier(Scheme("sha1"), "pw", b"salt")
    with pytest.raises(ParameterError):
        compute_verifier(Scheme("plain"), "pw", b"salt")
    with pytest.raises(ParameterError):
        compute_verifier(Scheme("sha1-salted"), "pw", b"short")


# -- enroll / verify / migrate -------------------------------------------------

def test_enroll_and_verify():
    vault = make_vault(Scheme("sha1-salted"))
    vault.enroll("alice", "correct horse")
    assert vault.verify("alice", "correct horse")
    assert not vault.verify("alice", "wrong horse")
    assert not vault.verify("bob", "correct horse")


def test_unknown_user_is_not_an_error():
    vault = make_vault(CHEAP_BCRYPT)
    assert vault.verify("ghost", "anything") is False


def test_enroll_rejects_duplicates():
    vault = make_vault(Scheme("sha1"))
    vault.enroll("alice", "pw")
    with pytest.raises(DuplicateUserError):
        vault.enroll("alice", "other")


def test_enroll_rejects_empty_password_and_bad_names():
    vault = make_vault(Scheme("sha1"))
    with pytest.raises(ParameterError):
        vault.enroll("alice", "")
    for bad in ("", "a:b", "a\nb", "a\rb"):
        with pytest.raises(ParameterError):
            vault.enroll(bad, "pw")


def test_salts_are_unique_per_record():
    vault = make_vault(Scheme("sha1-salted"))
    for i in range(50):
        vault.enroll(f"user{i}", "same password")
    salts = [r.salt for r in vault.records]
    assert len(set(salts)) == 50
    assert all(len(s) == SALT_SIZE for s in salts)


def test_salting_splits_equal_passwords():
    salted = make_vault(Scheme("sha1-salted"))
    salted.enroll("a", "pw123")
    salted.enroll("b", "pw123")
    assert salted.get("a").verifier != salted.get("b").verifier

    unsalted = make_vault(Scheme("sha1"))
    unsalted.enroll("a", "pw123")
    unsalted.enroll("b", "pw123")
    assert unsalted.get("a").verifier == unsalted.get("b").verifier


def test_verify_all_schemes():
    for scheme in (Scheme("plain"), Scheme("sha1"), Scheme("sha1-salted"),
                   CHEAP_BCRYPT, CHEAP_MFC):
        vault = make_vault(scheme)
        vault.enroll("u", "password-1")
        assert vault.verify("u", "password-1")
        assert not vault.verify("u", "password-2")


def test_verify_handles_oversized_bcrypt_probe():
    vault = make_vault(CHEAP_BCRYPT)
    vault.enroll("u", "pw")
    assert vault.verify("u", "x" * 100) is False  # too long for the KDF


def test_migrate_requires_the_password():
    vault = make_vault(Scheme("sha1"))
    vault.enroll("u", "pw")
    before = vault.get("u")
    with pytest.raises(VerificationError):
        vault.migrate("u", "wrong", CHEAP_BCRYPT)
    assert vault.get("u") is before  # untouched on failure


def test_migrate_replaces_in_place():
    vault = make_vault(Scheme("sha1"))
    for name in ("a", "b", "c"):
        vault.enroll(name, f"pw-{name}")
    vault.migrate("b", "pw-b", CHEAP_BCRYPT, now="2026-02-02T00:00:00Z")
    assert [r.username for r in vault.records] == ["a", "b", "c"]
    record = vault.get("b")
    assert record.scheme.tag == "bcrypt"
    assert record.created_at == "2026-02-02T00:00:00Z"
    assert vault.verify("b", "pw-b")
    assert not vault.verify("b", "pw-a")


def test_migration_chain_across_schemes():
    vault = make_vault(Scheme("plain"))
    vault.enroll("u", "pw")
    for scheme in (Scheme("sha1"), Scheme("sha1-salted"), CHEAP_MFC):
        vault.migrate("u", "pw", scheme)
        assert vault.verify("u", "pw")
        assert vault.get("u").scheme.tag == scheme.tag


# -- records and persistence ---------------------------------------------------

def test_record_line_shape():
    vault = make_vault(Scheme("sha1"))
    record = vault.enroll("alice", "pw")
    line = record.to_line()
    assert line == f"alice:sha1$$${record.verifier.hex()}:2026-01-01T00:00:00Z"


def test_record_validation():
    with pytest.raises(ParameterError):
        CredentialRecord("u", Scheme("sha1"), b"", b"short", CLOCK())
    with pytest.raises(ParameterError):
        CredentialRecord("u", Scheme("sha1"), b"salt" * 4, bytes(20), CLOCK())
    with pytest.raises(ParameterError):
        CredentialRecord("u", Scheme("sha1-salted"), b"", bytes(20), CLOCK())


def test_parse_record_body_round_trip():
    vault = make_vault(CHEAP_BCRYPT)
    record = vault.enroll("u", "pw")
    scheme, salt, verifier = parse_record_body(record.body_string())
    assert (scheme.tag, salt, verifier) == ("bcrypt", record.salt,
                                            record.verifier)


def test_parse_record_body_rejects_garbage():
    for bad in ("nope", "sha1$$abcd", "sha1$$ABCD$", "sha1$$$",
                "sha1$x$$aa", "md5$$$aa"):
        with pytest.raises((FormatError, ParameterError)):
            parse_record_body(bad)


def test_text_round_trip():
    vault = make_vault(Scheme("sha1-salted"))
    vault.enroll("alice", "pw1")
    vault.enroll("bob", "pw2", scheme=CHEAP_BCRYPT)
    text = vault.to_text()
    assert text.startswith("#hashvault v1 default=sha1-salted\n")
    loaded = Vault.from_text(text)
    assert loaded.to_text() == text
    assert loaded.verify("alice", "pw1")
    assert loaded.verify("bob", "pw2")
    assert not loaded.verify("alice", "pw2")


def test_save_and_load(tmp_path):
    vault = make_vault(Scheme("sha1"))
    vault.enroll("alice", "pw")
    path = tmp_path / "store.vault"
    vault.save(path)
    assert Vault.load(path).verify("alice", "pw")


def test_from_text_rejects_bad_input():
    good = make_vault(Scheme("sha1"))
    good.enroll("alice", "pw")
    body = good.to_text().splitlines()[1]
    cases = [
        "",
        "#wrong header\n",
        "#hashvault v2 default=sha1\n",
        "#hashvault v1 default=md5\n",
        f"#hashvault v1 default=sha1\n{body}\n{body}\n",       # duplicate
        "#hashvault v1 default=sha1\nnot a record\n",
        f"#hashvault v1 default=sha1\n{body.replace('2026', 'year')}\n",
    ]
    for text in cases:
        with pytest.raises(FormatError):
            Vault.from_text(text)


# -- breach dumps ---------------------------------------------------------------

def test_dump_shape_and_round_trip():
    vault = make_vault(Scheme("sha1-salted"))
    vault.enroll("alice", "pw1")
    vault.enroll("bob", "pw2")
    dump = vault.export_breach_dump()
    lines = dump.splitlines()
    assert lines[0] == "#hashvault-dump v1"
    assert all(line.count(":") == 1 for line in lines[1:])  # no timestamps
    records = parse_dump(dump)
    assert [u for u, _, _, _ in records] == ["alice", "bob"]
    for username, scheme, salt, verifier in records:
        stored = vault.get(username)
        assert (scheme.tag, salt, verifier) == (
            stored.scheme.tag, stored.salt, stored.verifier)


def test_dump_refuses_plaintext_by_default():
    vault = make_vault(Scheme("plain"))
    vault.enroll("alice", "pw")
    with pytest.raises(ParameterError):
        vault.export_breach_dump()
    dump = vault.export_breach_dump(allow_plaintext=True)
    assert "pw".encode().hex() in dump


def test_dump_anonymize():
    vault = make_vault(Scheme("sha1"))
    vault.enroll("alice", "pw1")
    vault.enroll("bob", "pw2")
    dump = vault.export_breach_dump(anonymize=True)
    names = [line.split(":")[0] for line in dump.splitlines()[1:]]
    assert names == ["u000000", "u000001"]


def test_parse_dump_rejects_bad_input():
    for text in ("", "#wrong\n", "#hashvault-dump v1\ngarbage\n",
                 "#hashvault-dump v1\na:sha1$$$aa11\na:sha1$$$aa11\n"):
        with pytest.raises(FormatError):
            parse_dump(text)


def test_seeded_vaults_reproduce_exactly():
    a = make_vault(Scheme("sha1-salted"), seed=77)
    b = make_vault(Scheme("sha1-salted"), seed=77)
    for v in (a, b):
        v.enroll("alice", "pw1")
        v.enroll("bob", "pw2")
    assert a.to_text() == b.to_text()
