"""hashvault command line: vault operations, table building, attacks, benches.

Exit codes: 0 success, 1 domain error (bad password, scheme mismatch,
malformed file), 2 usage error.  Data goes to stdout, diagnostics to
stderr.  Lines carrying wall-clock measurements are prefixed with `~` so
seeded runs stay byte-identical once those lines are filtered out.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

from . import __version__, attacks, bcrypt as _bcrypt, experiments, mfcrypt as _mfcrypt
from . import corpus as _corpus, rainbow as _rainbow
from .backend import BACKEND
from .errors import HashvaultError
from .rng import DeterministicRandom
from .vault import Scheme, Vault, compute_verifier, parse_dump


def _data_bytes(text: str) -> bytes:
    """CLI data argument: UTF-8 text, or raw bytes as 0x-prefixed hex."""
    if text.startswith("0x"):
        try:
            return bytes.fromhex(text[2:])
        except ValueError:
            raise HashvaultError(f"bad hex after 0x in {text!r}") from None
    return text.encode("utf-8")


def _salt_bytes(text: str | None) -> bytes:
    if text is None:
        return b""
    try:
        return bytes.fromhex(text)
    except ValueError:
        raise HashvaultError(f"--salt must be hex, got {text!r}") from None


def _scheme_from_args(args) -> Scheme:
    tag = args.scheme
    params = {}
    if tag == "bcrypt" and args.cost is not None:
        params["cost"] = args.cost
    if tag == "mfcrypt":
        if args.log_n is not None:
            params["log_n"] = args.log_n
        if args.p is not None:
            params["p"] = args.p
        if args.dk_len is not None:
            params["dk_len"] = args.dk_len
    return Scheme(tag, params)


def _rng_from_args(args) -> DeterministicRandom:
    return DeterministicRandom(args.seed if args.seed is not None else None)


def _load_or_new_vault(args, for_write: bool) -> Vault:
    rng = _rng_from_args(args)
    if os.path.exists(args.vault):
        vault = Vault.load(args.vault, rng=rng)
    elif for_write:
        default = Scheme(args.default_scheme) if getattr(args, "default_scheme", None) \
            else Scheme("bcrypt")
        vault = Vault(default_scheme=default, rng=rng)
    else:
        raise HashvaultError(f"vault file not found: {args.vault}")
    return vault


def _emit_fields(obj, csv_path=None):
    fields = list(obj.rows())
    for key, value, volatile in fields:
        line = f"{key}={value}"
        print(f"~{line}" if volatile else line)
    if csv_path:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([k for k, _, _ in fields])
            writer.writerow([v for _, v, _ in fields])


def _emit_rows(rows, csv_path=None):
    table = [list(r.rows()) for r in rows]
    for fields in table:
        volatile = any(vol for _, _, vol in fields)
        line = " ".join(f"{k}={v}" for k, v, _ in fields)
        print(f"~{line}" if volatile else line)
    if csv_path and table:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([k for k, _, _ in table[0]])
            for fields in table:
                writer.writerow([v for _, v, _ in fields])


# -- subcommands -------------------------------------------------------------

def cmd_hash(args) -> int:
    password = _data_bytes(args.password)
    salt = _salt_bytes(args.salt)
    tag = args.scheme
    if tag == "sha1":
        from .backend import kernels
        print(kernels.sha1(salt + password).hex())
        return 0
    if tag == "sha1-salted":
        print(compute_verifier(Scheme(tag), password, salt).hex())
        return 0
    if tag == "bcrypt":
        record = _bcrypt.bcrypt_hash(password, salt, args.cost if args.cost is not None else 10)
        print(record.to_string())
        return 0
    if tag == "mfcrypt":
        params = _mfcrypt.MfParams(
            1 << (args.log_n if args.log_n is not None else 10),
            args.p if args.p is not None else 1,
            args.dk_len if args.dk_len is not None else 32,
        )
        print(_mfcrypt.mfcrypt_hash(password, salt, params).to_string())
        return 0
    raise HashvaultError(f"cannot hash with scheme {tag!r}")


def cmd_enroll(args) -> int:
    vault = _load_or_new_vault(args, for_write=True)
    scheme = _scheme_from_args(args) if args.scheme else None
    record = vault.enroll(args.username, _data_bytes(args.password),
                          scheme, now=args.now)
    vault.save(args.vault)
    print(f"enrolled {record.username} scheme={record.scheme.tag}")
    return 0


def cmd_verify(args) -> int:
    vault = _load_or_new_vault(args, for_write=False)
    if vault.verify(args.username, _data_bytes(args.password)):
        print("ok")
        return 0
    print("fail")
    return 1


def cmd_migrate(args) -> int:
    vault = _load_or_new_vault(args, for_write=False)
    record = vault.migrate(args.username, _data_bytes(args.password),
                           _scheme_from_args(args), now=args.now)
    vault.save(args.vault)
    print(f"migrated {record.username} scheme={record.scheme.tag}")
    return 0


def cmd_dump(args) -> int:
    vault = _load_or_new_vault(args, for_write=False)
    text = vault.export_breach_dump(allow_plaintext=args.allow_plaintext,
                                    anonymize=args.anonymize)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_table_build(args) -> int:
    domain = _rainbow.ReductionDomain(args.charset.encode("utf-8"), args.length)
    table = _rainbow.build_table(domain, args.chain_length, args.chains,
                                 seed=args.seed, salt=_salt_bytes(args.salt),
                                 jobs=args.jobs)
    table.save(args.out)
    print(f"chains={table.chain_count}")
    print(f"chain_length={table.chain_length}")
    print(f"pair_bytes={_rainbow.table_memory_cost(table)}")
    print(f"file_bytes={len(table.to_bytes())}")
    return 0


def cmd_crack(args) -> int:
    with open(args.dump, "r", encoding="utf-8") as fh:
        records = parse_dump(fh.read())
    if args.table:
        table = _rainbow.load_table(args.table)
        report = attacks.rainbow_attack(records, table)
    else:
        wordlist = _corpus.Wordlist.from_file(args.wordlist)
        report = attacks.dictionary_attack(records, wordlist,
                                           time_budget=args.budget)
    for username, plaintext in report.cracked:
        print(f"crack {username} {plaintext}")
    _emit_fields(report, args.csv)
    return 0


def cmd_bench(args) -> int:
    if args.compare_backends:
        rows = experiments.backend_comparison()
        _emit_rows(rows, args.csv)
        return 0
    params = {}
    if args.cost is not None:
        params["cost"] = args.cost
    if args.log_n is not None:
        params["log_n"] = args.log_n
    if args.p is not None:
        params["p"] = args.p
    if args.dk_len is not None:
        params["dk_len"] = args.dk_len
    result = experiments.throughput_bench(args.scheme, params,
                                          duration=args.duration, runs=args.runs)
    _emit_fields(result, args.csv)
    return 0


def cmd_experiment(args) -> int:
    if args.kind == "cost-scaling":
        lo, hi = args.cost_min, args.cost_max
        rows = experiments.cost_scaling_experiment(range(lo, hi + 1), runs=args.runs)
        _emit_rows(rows, args.csv)
        return 0
    if args.kind == "salt-blowup":
        bits = [int(b) for b in args.bits.split(",")]
        rows = experiments.salt_blowup_experiment(
            bits, chain_length=args.chain_length,
            target_coverage=args.target, seed=args.seed or 0)
        _emit_rows(rows, args.csv)
        return 0
    if args.kind == "duplicates":
        with open(args.dump, "r", encoding="utf-8") as fh:
            records = parse_dump(fh.read())
        counts = attacks.duplicate_analysis(records)
        hist = attacks.multiplicity_histogram(counts)
        print(f"records={len(records)}")
        print(f"distinct_verifiers={len(counts)}")
        for mult, n in hist.items():
            print(f"multiplicity_{mult}={n}")
        for verifier, n in counts.most_common(args.top):
            print(f"top_verifier={verifier.hex()} count={n}")
        if args.csv:
            with open(args.csv, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["verifier", "multiplicity"])
                for verifier, n in counts.most_common():
                    writer.writerow([verifier.hex(), n])
        return 0
    if args.kind == "drill":
        report = experiments.breach_drill(
            n_users=args.users, wordlist_size=args.wordlist_size,
            cost=args.cost if args.cost is not None else 10,
            seed=args.seed or 0, phase2_budget=args.budget)
        _emit_fields(report, args.csv)
        return 0
    raise HashvaultError(f"unknown experiment {args.kind!r}")


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hashvault",
        description="Password-storage and password-cracking laboratory "
                    f"(kernel backend: {BACKEND})",
    )
    parser.add_argument("--version", action="version", version=f"hashvault {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scheme_params(p, with_scheme=True, scheme_required=False):
        if with_scheme:
            p.add_argument("--scheme", required=scheme_required,
                           choices=("plain", "sha1", "sha1-salted", "bcrypt", "mfcrypt"))
        p.add_argument("--cost", type=int, help="bcrypt cost exponent")
        p.add_argument("--log-n", dest="log_n", type=int, help="mfcrypt log2(N)")
        p.add_argument("--p", type=int, help="mfcrypt parallelism")
        p.add_argument("--dk-len", dest="dk_len", type=int, help="mfcrypt output octets")

    p = sub.add_parser("hash", help="hash one password, print digest or record")
    p.add_argument("--scheme", required=True,
                   choices=("sha1", "sha1-salted", "bcrypt", "mfcrypt"))
    p.add_argument("--salt", help="salt as hex")
    add_scheme_params(p, with_scheme=False)
    p.add_argument("password", help="UTF-8 text, or 0x-prefixed hex for raw bytes")
    p.set_defaults(func=cmd_hash)

    p = sub.add_parser("enroll", help="add a user to a vault file")
    p.add_argument("--vault", required=True)
    add_scheme_params(p)
    p.add_argument("--default-scheme", dest="default_scheme",
                   choices=("plain", "sha1", "sha1-salted", "bcrypt", "mfcrypt"),
                   help="default scheme when creating a new vault")
    p.add_argument("--seed", type=int, help="seed for salt generation")
    p.add_argument("--now", help="fixed created_at timestamp (ISO-8601 Z)")
    p.add_argument("username")
    p.add_argument("password")
    p.set_defaults(func=cmd_enroll)

    p = sub.add_parser("verify", help="check a password against a vault")
    p.add_argument("--vault", required=True)
    p.add_argument("--seed", type=int, help=argparse.SUPPRESS)
    p.add_argument("username")
    p.add_argument("password")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("migrate", help="re-enroll a user under a new scheme")
    p.add_argument("--vault", required=True)
    add_scheme_params(p, scheme_required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--now", help="fixed created_at timestamp (ISO-8601 Z)")
    p.add_argument("username")
    p.add_argument("password")
    p.set_defaults(func=cmd_migrate)

    p = sub.add_parser("dump", help="export the breach-visible form of a vault")
    p.add_argument("--vault", required=True)
    p.add_argument("--seed", type=int, help=argparse.SUPPRESS)
    p.add_argument("--out", help="write to file instead of stdout")
    p.add_argument("--allow-plaintext", action="store_true")
    p.add_argument("--anonymize", action="store_true")
    p.set_defaults(func=cmd_dump)

    p = sub.add_parser("table-build", help="build and save a rainbow table")
    p.add_argument("--charset", required=True, help="domain characters, e.g. 0123456789")
    p.add_argument("--length", type=int, required=True, help="plaintext length")
    p.add_argument("--chain-length", dest="chain_length", type=int, required=True)
    p.add_argument("--chains", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--salt", help="fixed salt as hex (one table per salt)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_table_build)

    p = sub.add_parser("crack", help="attack a breach dump")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--table", help="rainbow table file")
    group.add_argument("--wordlist", help="dictionary file, one candidate per line")
    p.add_argument("--dump", required=True)
    p.add_argument("--budget", type=float, help="dictionary time budget, seconds")
    p.add_argument("--csv", help="also write the report as CSV")
    p.set_defaults(func=cmd_crack)

    p = sub.add_parser("bench", help="throughput bench")
    p.add_argument("--scheme", choices=("sha1", "sha1-salted", "bcrypt", "mfcrypt"))
    add_scheme_params(p, with_scheme=False)
    p.add_argument("--duration", type=float, help="seconds per run (>= 1)")
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--compare-backends", action="store_true",
                   help="bench the compiled and pure kernels side by side")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("experiment", help="run a canned experiment")
    p.add_argument("kind", choices=("cost-scaling", "salt-blowup", "duplicates", "drill"))
    p.add_argument("--cost-min", dest="cost_min", type=int, default=8)
    p.add_argument("--cost-max", dest="cost_max", type=int, default=12)
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--bits", default="0,1,2,4")
    p.add_argument("--target", type=float, default=0.35)
    p.add_argument("--chain-length", dest="chain_length", type=int, default=100)
    p.add_argument("--dump", help="dump file for the duplicates experiment")
    p.add_argument("--top", type=int, default=5)
    p.add_argument("--users", type=int, default=1000)
    p.add_argument("--wordlist-size", dest="wordlist_size", type=int, default=25)
    p.add_argument("--cost", type=int)
    p.add_argument("--budget", type=float, default=4.0)
    p.add_argument("--seed", type=int)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bench" and not args.compare_backends and not args.scheme:
        parser.error("bench needs --scheme or --compare-backends")
    if args.command == "experiment" and args.kind == "duplicates" and not args.dump:
        parser.error("experiment duplicates needs --dump")
    try:
        return args.func(args)
    except HashvaultError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
