"""End-to-end drives of the command line through cli.main(argv).

Exit-code contract: 0 success, 1 domain error, 2 usage error (argparse
raises SystemExit for those).  Wall-clock lines carry a ~ prefix so the
seeded-output tests filter them out before comparing.
"""

import functools

import pytest

from hashvault import bcrypt as hv_bcrypt
from hashvault import experiments
from hashvault import mfcrypt as hv_mfcrypt
from hashvault import rainbow
from hashvault.backend import kernels
from hashvault.cli import main
from hashvault.vault import Scheme, compute_verifier, parse_dump

GOLDEN_123456_SALT01 = "5a44cf4f2b0f2bfc7da6f386481f6afbc8aff73f"


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def stable_lines(out):
    # seeded runs are byte-identical only after dropping ~-prefixed lines
    return [ln for ln in out.splitlines() if not ln.startswith("~")]


# -- hash ---------------------------------------------------------------------

def test_hash_sha1_prints_salt_prefixed_digest(capsys):
    rc, out, _ = run(capsys, "hash", "--scheme", "sha1", "--salt", "3031", "123456")
    assert rc == 0
    assert out == GOLDEN_123456_SALT01 + "\n"


def test_hash_0x_argument_means_raw_bytes(capsys):
    rc_hex, out_hex, _ = run(capsys, "hash", "--scheme", "sha1", "0x313233343536")
    rc_txt, out_txt, _ = run(capsys, "hash", "--scheme", "sha1", "123456")
    assert rc_hex == rc_txt == 0
    assert out_hex == out_txt == kernels.sha1(b"123456").hex() + "\n"


def test_hash_bad_hex_after_0x_is_domain_error(capsys):
    rc, out, err = run(capsys, "hash", "--scheme", "sha1", "0xzz")
    assert rc == 1
    assert out == ""
    assert err.startswith("error:")


def test_hash_rejects_non_hex_salt(capsys):
    rc, _, err = run(capsys, "hash", "--scheme", "sha1", "--salt", "xyz", "pw")
    assert rc == 1
    assert "--salt" in err


def test_hash_sha1_salted_matches_library_verifier(capsys):
    salt = bytes(range(16))
    rc, out, _ = run(capsys, "hash", "--scheme", "sha1-salted",
                     "--salt", salt.hex(), "123456")
    assert rc == 0
    expected = compute_verifier(Scheme("sha1-salted"), b"123456", salt)
    assert out.strip() == expected.hex()


def test_hash_sha1_salted_enforces_salt_length(capsys):
    rc, _, err = run(capsys, "hash", "--scheme", "sha1-salted",
                     "--salt", "3031", "123456")
    assert rc == 1
    assert "16-octet" in err


def test_hash_bcrypt_emits_verifiable_record(capsys):
    salt_hex = "000102030405060708090a0b0c0d0e0f"
    rc, out, _ = run(capsys, "hash", "--scheme", "bcrypt", "--cost", "4",
                     "--salt", salt_hex, "hunter2")
    assert rc == 0
    assert out.startswith("$2x$04$" + salt_hex)
    record = hv_bcrypt.parse_record(out.strip())
    assert hv_bcrypt.bcrypt_verify(b"hunter2", record)
    assert not hv_bcrypt.bcrypt_verify(b"hunter3", record)


def test_hash_mfcrypt_emits_verifiable_record(capsys):
    rc, out, _ = run(capsys, "hash", "--scheme", "mfcrypt", "--log-n", "2",
                     "--p", "1", "--dk-len", "16", "--salt", "0102", "pw")
    assert rc == 0
    assert out.startswith("$mfc$N=2,p=1$0102$")
    record = hv_mfcrypt.parse_record(out.strip())
    assert hv_mfcrypt.mfcrypt_verify(b"pw", record)


# -- enroll / verify ----------------------------------------------------------

def test_enroll_then_verify_exit_codes(capsys, tmp_path):
    vault = str(tmp_path / "v.vault")
    rc, out, _ = run(capsys, "enroll", "--vault", vault,
                     "--default-scheme", "sha1-salted", "--seed", "1",
                     "alice", "correct horse")
    assert rc == 0
    assert out == "enrolled alice scheme=sha1-salted\n"

    rc, out, _ = run(capsys, "verify", "--vault", vault, "alice", "correct horse")
    assert (rc, out) == (0, "ok\n")
    rc, out, _ = run(capsys, "verify", "--vault", vault, "alice", "wrong horse")
    assert (rc, out) == (1, "fail\n")
    rc, out, _ = run(capsys, "verify", "--vault", vault, "nobody", "correct horse")
    assert (rc, out) == (1, "fail\n")


def test_enroll_duplicate_username_is_domain_error(capsys, tmp_path):
    vault = str(tmp_path / "v.vault")
    run(capsys, "enroll", "--vault", vault, "--default-scheme", "sha1",
        "--seed", "1", "alice", "pw1")
    rc, _, err = run(capsys, "enroll", "--vault", vault, "alice", "pw2")
    assert rc == 1
    assert "alice" in err


def test_enroll_records_explicit_scheme_and_timestamp(capsys, tmp_path):
    vault = tmp_path / "v.vault"
    rc, out, _ = run(capsys, "enroll", "--vault", str(vault),
                     "--scheme", "mfcrypt", "--log-n", "2", "--p", "1",
                     "--dk-len", "16", "--seed", "3",
                     "--now", "2026-01-01T00:00:00Z", "bob", "pw")
    assert rc == 0
    assert out == "enrolled bob scheme=mfcrypt\n"
    text = vault.read_text(encoding="utf-8")
    assert "bob" in text
    assert "2026-01-01T00:00:00Z" in text
    assert "mfcrypt$N=2,p=1$" in text


def test_enroll_seeded_vaults_are_byte_identical(capsys, tmp_path):
    paths = [tmp_path / "a.vault", tmp_path / "b.vault"]
    for p in paths:
        run(capsys, "enroll", "--vault", str(p), "--default-scheme", "sha1-salted",
            "--seed", "9", "--now", "2026-01-01T00:00:00Z", "alice", "pw")
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_verify_missing_vault_file_is_domain_error(capsys, tmp_path):
    rc, _, err = run(capsys, "verify", "--vault", str(tmp_path / "none.vault"),
                     "alice", "pw")
    assert rc == 1
    assert "not found" in err


# -- migrate ------------------------------------------------------------------

def test_migrate_rehashes_and_keeps_password_working(capsys, tmp_path):
    vault = str(tmp_path / "v.vault")
    run(capsys, "enroll", "--vault", vault, "--default-scheme", "sha1",
        "--seed", "2", "alice", "123456")
    rc, out, _ = run(capsys, "migrate", "--vault", vault, "--scheme", "sha1-salted",
                     "--seed", "2", "--now", "2026-02-02T00:00:00Z",
                     "alice", "123456")
    assert rc == 0
    assert out == "migrated alice scheme=sha1-salted\n"

    rc, out, _ = run(capsys, "verify", "--vault", vault, "alice", "123456")
    assert (rc, out) == (0, "ok\n")
    rc, out, _ = run(capsys, "dump", "--vault", vault)
    records = parse_dump(out)
    assert [r[1].tag for r in records] == ["sha1-salted"]


def test_migrate_wrong_password_leaves_vault_alone(capsys, tmp_path):
    vault = tmp_path / "v.vault"
    run(capsys, "enroll", "--vault", str(vault), "--default-scheme", "sha1",
        "--seed", "2", "alice", "123456")
    before = vault.read_bytes()
    rc, _, err = run(capsys, "migrate", "--vault", str(vault),
                     "--scheme", "sha1-salted", "--seed", "2", "alice", "wrong")
    assert rc == 1
    assert err.startswith("error:")
    assert vault.read_bytes() == before


# -- dump ---------------------------------------------------------------------

def test_dump_refuses_plaintext_without_flag(capsys, tmp_path):
    vault = str(tmp_path / "v.vault")
    run(capsys, "enroll", "--vault", vault, "--scheme", "plain", "--seed", "1",
        "alice", "secret-pw")
    rc, out, err = run(capsys, "dump", "--vault", vault)
    assert rc == 1
    assert "secret-pw" not in out
    assert err.startswith("error:")

    rc, out, _ = run(capsys, "dump", "--vault", vault, "--allow-plaintext")
    assert rc == 0
    assert "secret-pw".encode().hex() in out


def test_dump_anonymize_and_out_file(capsys, tmp_path):
    vault = str(tmp_path / "v.vault")
    run(capsys, "enroll", "--vault", vault, "--default-scheme", "sha1",
        "--seed", "1", "alice", "pw")
    out_path = tmp_path / "dump.txt"
    rc, out, _ = run(capsys, "dump", "--vault", vault, "--anonymize",
                     "--out", str(out_path))
    assert rc == 0
    assert out == f"wrote {out_path}\n"
    text = out_path.read_text(encoding="utf-8")
    assert "alice" not in text
    assert len(parse_dump(text)) == 1


# -- table-build / crack ------------------------------------------------------

@pytest.fixture
def digit_dump(capsys, tmp_path):
    # two users with length-3 digit passwords, unsalted sha1 vault
    vault = str(tmp_path / "v.vault")
    for user, pw in (("alice", "123"), ("bob", "777")):
        rc, _, _ = run(capsys, "enroll", "--vault", vault,
                       "--default-scheme", "sha1", "--seed", "4", user, pw)
        assert rc == 0
    dump_path = tmp_path / "dump.txt"
    rc, _, _ = run(capsys, "dump", "--vault", vault, "--out", str(dump_path))
    assert rc == 0
    return dump_path


def test_table_build_reports_sizes_and_saves(capsys, tmp_path, digit_dump):
    table_path = tmp_path / "digits.rbt"
    rc, out, _ = run(capsys, "table-build", "--charset", "0123456789",
                     "--length", "3", "--chain-length", "10", "--chains", "300",
                     "--seed", "7", "--out", str(table_path))
    assert rc == 0
    table = rainbow.load_table(str(table_path))
    lines = out.splitlines()
    assert f"chains={table.chain_count}" in lines
    assert "chain_length=10" in lines
    assert f"pair_bytes={rainbow.table_memory_cost(table)}" in lines
    assert f"file_bytes={table_path.stat().st_size}" in lines


def test_rainbow_crack_flow_cracks_covered_passwords(capsys, tmp_path, digit_dump):
    table_path = tmp_path / "digits.rbt"
    run(capsys, "table-build", "--charset", "0123456789", "--length", "3",
        "--chain-length", "10", "--chains", "300", "--seed", "7",
        "--out", str(table_path))
    table = rainbow.load_table(str(table_path))
    covered = table.covered_plaintexts()

    rc, out, _ = run(capsys, "crack", "--table", str(table_path),
                     "--dump", str(digit_dump))
    assert rc == 0
    cracks = {ln.split()[1]: ln.split()[2]
              for ln in out.splitlines() if ln.startswith("crack ")}
    expected = {user: pw for user, pw in (("alice", "123"), ("bob", "777"))
                if pw.encode() in covered}
    assert cracks == expected
    assert f"cracked={len(expected)}" in stable_lines(out)
    assert any(ln.startswith("~wall_time_s=") for ln in out.splitlines())


def test_dictionary_crack_flow_and_csv(capsys, tmp_path, digit_dump):
    wordlist = tmp_path / "wl.txt"
    wordlist.write_text("999\n123\n777\n", encoding="utf-8")
    csv_path = tmp_path / "report.csv"
    rc, out, _ = run(capsys, "crack", "--wordlist", str(wordlist),
                     "--dump", str(digit_dump), "--csv", str(csv_path))
    assert rc == 0
    assert "crack alice 123" in out.splitlines()
    assert "crack bob 777" in out.splitlines()
    assert "hash_ops=3" in stable_lines(out)

    header, row = csv_path.read_text(encoding="utf-8").strip().splitlines()
    assert header.split(",")[:4] == ["scheme", "records", "candidates_tried", "hash_ops"]
    assert row.split(",")[:4] == ["sha1", "2", "3", "3"]


def test_crack_needs_exactly_one_candidate_source(capsys, tmp_path, digit_dump):
    with pytest.raises(SystemExit) as exc_info:
        main(["crack", "--dump", str(digit_dump)])
    assert exc_info.value.code == 2
    with pytest.raises(SystemExit) as exc_info:
        main(["crack", "--table", "t.rbt", "--wordlist", "wl.txt",
              "--dump", str(digit_dump)])
    assert exc_info.value.code == 2


def test_crack_missing_dump_file_maps_to_exit_1(capsys, tmp_path):
    wordlist = tmp_path / "wl.txt"
    wordlist.write_text("pw\n", encoding="utf-8")
    rc, _, err = run(capsys, "crack", "--wordlist", str(wordlist),
                     "--dump", str(tmp_path / "missing.txt"))
    assert rc == 1
    assert err.startswith("error:")


# -- bench --------------------------------------------------------------------

def test_bench_requires_scheme_or_compare(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(["bench"])
    assert exc_info.value.code == 2


def test_bench_sha1_uses_env_duration(capsys, fast_bench):
    rc, out, _ = run(capsys, "bench", "--scheme", "sha1")
    assert rc == 0
    stable = stable_lines(out)
    assert "scheme=sha1" in stable
    assert "runs=3" in stable
    assert any(ln.startswith("~median_rate=") for ln in out.splitlines())


def test_bench_rejects_subsecond_explicit_duration(capsys):
    rc, _, err = run(capsys, "bench", "--scheme", "sha1", "--duration", "0.2")
    assert rc == 1
    assert "at least 1 second" in err


def test_bench_compare_backends_covers_both(capsys, monkeypatch):
    # same code path as --compare-backends, shrunk so the suite stays quick
    monkeypatch.setattr(
        experiments, "backend_comparison",
        functools.partial(experiments.backend_comparison, duration=0.02, runs=1))
    rc, out, _ = run(capsys, "bench", "--compare-backends")
    assert rc == 0
    lines = [ln for ln in out.splitlines() if "kernel=" in ln]
    assert len(lines) == 8
    for backend in ("py", "c"):
        assert sum(f"backend={backend}" in ln for ln in lines) == 4


# -- experiment ---------------------------------------------------------------

def test_experiment_duplicates_requires_dump(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(["experiment", "duplicates"])
    assert exc_info.value.code == 2


def test_experiment_duplicates_histogram_and_csv(capsys, tmp_path):
    vault = str(tmp_path / "v.vault")
    for user, pw in (("alice", "123456"), ("bob", "123456"), ("carol", "zzz")):
        run(capsys, "enroll", "--vault", vault, "--default-scheme", "sha1",
            "--seed", "1", user, pw)
    dump_path = tmp_path / "dump.txt"
    run(capsys, "dump", "--vault", vault, "--out", str(dump_path))

    csv_path = tmp_path / "dups.csv"
    rc, out, _ = run(capsys, "experiment", "duplicates", "--dump", str(dump_path),
                     "--top", "1", "--csv", str(csv_path))
    assert rc == 0
    lines = out.splitlines()
    assert "records=3" in lines
    assert "distinct_verifiers=2" in lines
    assert "multiplicity_2=1" in lines
    assert "multiplicity_1=1" in lines
    shared = kernels.sha1(b"123456").hex()
    assert f"top_verifier={shared} count=2" in lines

    rows = csv_path.read_text(encoding="utf-8").strip().splitlines()
    assert rows[0] == "verifier,multiplicity"
    assert rows[1] == f"{shared},2"
    assert len(rows) == 3


def test_experiment_cost_scaling_rows(capsys):
    rc, out, _ = run(capsys, "experiment", "cost-scaling",
                     "--cost-min", "4", "--cost-max", "5", "--runs", "1")
    assert rc == 0
    lines = out.splitlines()
    assert len(lines) == 2
    # median_s is wall clock, so every row is volatile
    assert lines[0].startswith("~cost=4 ")
    assert lines[1].startswith("~cost=5 ")
    assert "ratio=" in lines[1]


def test_experiment_salt_blowup_rows(capsys):
    rc, out, _ = run(capsys, "experiment", "salt-blowup", "--bits", "0,1",
                     "--chain-length", "40", "--target", "0.3", "--seed", "0")
    assert rc == 0
    lines = stable_lines(out)
    assert len(lines) == 2
    assert lines[0].startswith("salt_bits=0 salt_count=1 ")
    assert lines[1].startswith("salt_bits=1 salt_count=2 ")
    assert "factor=1.000" in lines[0]


def test_experiment_drill_smoke(capsys):
    rc, out, _ = run(capsys, "experiment", "drill", "--users", "30",
                     "--wordlist-size", "10", "--cost", "4",
                     "--budget", "0.3", "--seed", "0")
    assert rc == 0
    stable = stable_lines(out)
    assert "users=30" in stable
    assert "bcrypt_cost=4" in stable
    assert any(ln.startswith("phase1_cracked=") for ln in stable)
    assert any(ln.startswith("~rate_drop=") for ln in out.splitlines())


# -- misc ---------------------------------------------------------------------

def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(["--version"])
    assert exc_info.value.code == 0
    out = capsys.readouterr().out
    assert out.startswith("hashvault ")


def test_unknown_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(["frobnicate"])
    assert exc_info.value.code == 2
