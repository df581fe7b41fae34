"""Batch command-line front end.

Three subcommands: `check` type-checks files, `norm` prints the normal form
of a term in a file's environment, `winding` computes the winding number of
a closed loop on the bundled circle. Diagnostics go to standard error in a
human-readable shape by default; `--diag-format=machine` emits one
tab-separated `CODE FILE LINE COL MESSAGE` line per diagnostic on standard
output instead.

Exit status: 0 on success, 1 when diagnostics were emitted, 2 on usage
errors (unreadable files included), 3 when the tool itself breaks.
"""
from __future__ import annotations

import argparse
import sys
import traceback
from enum import IntEnum
from pathlib import Path
from typing import Optional

from . import corpus as corpuslib
from .diagnostics import CheckError, Diagnostic
from .kernel import Context, Env, check, check_is_type, eval_term, infer, quote
from .loopcalc import recognize, winding
from .printer import print_term
from .resolver import resolve_term
from .surface import parse_term

LOOP_SPACE_SOURCE = "base = base in S1"


class ExitStatus(IntEnum):
    OK = 0
    DIAGNOSTICS = 1
    USAGE = 2
    INTERNAL = 3


def _emit(diag: Diagnostic, fmt: str) -> None:
    if fmt == "machine":
        sys.stdout.write(diag.machine() + "\n")
        sys.stdout.flush()
    else:
        sys.stderr.write(diag.human() + "\n")


def _read_sources(files: list[str]) -> tuple[dict[str, str], list[str]]:
    sources: dict[str, str] = {}
    order: list[str] = []
    for f in files:
        label = str(Path(f))
        if label not in sources:
            sources[label] = Path(f).read_text(encoding="utf-8")
            order.append(label)
    return sources, order


def _load_environment(path: Path, args) -> Env:
    """Environment for `norm` and `winding`: when the file belongs to a
    manifest-ordered corpus, check that corpus up to and including the file;
    otherwise check the prelude (unless suppressed) and then the file."""
    env = Env()
    manifest = (Path(args.manifest) if args.manifest
                else path.parent / corpuslib.MANIFEST_FILE)
    if manifest.is_file():
        files = corpuslib.manifest_files(corpuslib.read_manifest(manifest))
        if path.name in files:
            prefix = files[: files.index(path.name) + 1]
            root = manifest.parent
            sources = {f: (root / f).read_text(encoding="utf-8")
                       for f in prefix}
            corpuslib.check_sources(env, sources, prefix, jobs=args.jobs)
            return env
    if not args.no_prelude:
        corpuslib.load_prelude(env)
    corpuslib.check_file(env, path)
    return env


def cmd_check(args) -> int:
    try:
        sources, order = _read_sources(args.files)
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return ExitStatus.USAGE
    env = Env()
    try:
        brings_prelude = any(Path(f).name == corpuslib.PRELUDE_FILE
                             for f in order)
        if not args.no_prelude and not brings_prelude:
            corpuslib.load_prelude(env)
        report = corpuslib.check_sources(env, sources, order, jobs=args.jobs)
        if args.manifest:
            try:
                entries = corpuslib.read_manifest(args.manifest)
                sanctioned = corpuslib.read_sanctioned(
                    Path(args.manifest).parent / corpuslib.SANCTIONED_FILE)
            except OSError as exc:
                sys.stderr.write(f"error: {exc}\n")
                return ExitStatus.USAGE
            corpuslib.verify_manifest(env, entries, report,
                                      str(args.manifest))
            corpuslib.audit_dependencies(env, entries, sanctioned,
                                         str(args.manifest))
    except CheckError as err:
        _emit(err.diagnostic, args.diag_format)
        return ExitStatus.DIAGNOSTICS
    sys.stderr.write(f"ok: {len(report)} declarations in "
                     f"{len(order)} file(s)\n")
    return ExitStatus.OK


def _resolved_term(env: Env, source: str):
    return resolve_term(parse_term(source, "<term>"), env.lookup_info)


def cmd_norm(args) -> int:
    path = Path(args.file)
    try:
        env = _load_environment(path, args)
        term = _resolved_term(env, args.term)
        ctx = Context(env)
        ty_v, elaborated = infer(ctx, term)
        value = eval_term(env, elaborated, ())
        normal = quote(env, 0, value, ty_v)
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return ExitStatus.USAGE
    except CheckError as err:
        _emit(err.diagnostic, args.diag_format)
        return ExitStatus.DIAGNOSTICS
    print(print_term(normal))
    return ExitStatus.OK


def cmd_winding(args) -> int:
    path = Path(args.file)
    try:
        env = _load_environment(path, args)
        term = _resolved_term(env, args.term)
        ctx = Context(env)
        loop_space = _resolved_term(env, LOOP_SPACE_SOURCE)
        _, loop_space_el = check_is_type(ctx, loop_space)
        check(ctx, term, eval_term(env, loop_space_el, ()))
        word = recognize(term, env)
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return ExitStatus.USAGE
    except CheckError as err:
        _emit(err.diagnostic, args.diag_format)
        return ExitStatus.DIAGNOSTICS
    print(winding(word))
    return ExitStatus.OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hottcheck",
        description="Check proof files, normalize terms, and compute "
                    "winding numbers of circle loops.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--diag-format", choices=("human", "machine"),
                        default="human",
                        help="diagnostic format: human-readable on stderr "
                             "(default) or tab-separated records on stdout")
    common.add_argument("--no-prelude", action="store_true",
                        help="do not load the bundled prelude first")
    common.add_argument("--jobs", type=int, default=1, metavar="N",
                        help="check independent files in parallel")
    common.add_argument("--manifest", metavar="PATH", default=None,
                        help="manifest describing the corpus being checked")
    sub = parser.add_subparsers(dest="command", required=True)

    check_p = sub.add_parser("check", parents=[common],
                             help="type-check files in dependency order")
    check_p.add_argument("files", nargs="+", metavar="FILE")
    check_p.set_defaults(func=cmd_check)

    norm_p = sub.add_parser("norm", parents=[common],
                            help="print the normal form of a term")
    norm_p.add_argument("file", metavar="FILE")
    norm_p.add_argument("--term", required=True, metavar="TERM",
                        help="term source, evaluated in the file's scope")
    norm_p.set_defaults(func=cmd_norm)

    winding_p = sub.add_parser("winding", parents=[common],
                               help="winding number of a based circle loop")
    winding_p.add_argument("file", metavar="FILE")
    winding_p.add_argument("--term", required=True, metavar="TERM")
    winding_p.set_defaults(func=cmd_winding)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if code in (0, None):
            return int(ExitStatus.OK)
        return int(code) if isinstance(code, int) else int(ExitStatus.USAGE)
    try:
        return int(args.func(args))
    except CheckError as err:
        _emit(err.diagnostic, getattr(args, "diag_format", "human"))
        return ExitStatus.DIAGNOSTICS
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return ExitStatus.USAGE
    except Exception:
        traceback.print_exc()
        return ExitStatus.INTERNAL


if __name__ == "__main__":
    sys.exit(main())
