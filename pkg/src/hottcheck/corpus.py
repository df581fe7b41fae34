"""The bundled formalization corpus: loading, checking, and audits.

The package ships a library of `.hott` files together with a tab-separated
manifest that records, for every source-level declaration, the file it lives
in, its status (`proved`, `postulated`, or `definition`), and a short anchor
into the mathematical text it formalizes. This module loads those files in
order, checks them, and enforces the bookkeeping invariants:

  - manifest completeness: the manifest covers exactly the declarations that
    exist, each exactly once, with a non-empty anchor;
  - status fidelity: `postulated` rows are axioms, everything else has a body;
  - status honesty: the dependency cone of a `proved` declaration contains no
    axiom outside the checked-in sanctioned-postulates list (eliminator
    computation rules generated for path constructors are always sanctioned).

Files check in manifest order. With `jobs > 1`, files that do not reference
each other's names check concurrently, each against an immutable snapshot of
the environment; results merge back in manifest order, so the outcome is
identical to a sequential run.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from . import hit
from .diagnostics import CheckError, ErrorCode, SourceSpan, fail
from .kernel import Env, check_declaration
from .lexer import tokenize
from .resolver import resolve
from .surface import DAxiom, DDef, DHit, Module, parse_module

PRELUDE_FILE = "prelude.hott"
MANIFEST_FILE = "manifest.tsv"
SANCTIONED_FILE = "sanctioned-postulates.txt"
STATUSES = frozenset({"proved", "postulated", "definition"})


def data_root() -> Path:
    """Directory holding the installed corpus files."""
    return Path(str(resources.files(__package__) / "corpus"))


# ---------------------------------------------------------------------------
# manifest


@dataclass(frozen=True, slots=True)
class ManifestEntry:
    file: str
    name: str
    status: str
    source_ref: str
    line: int = 0


def read_manifest(path: Union[str, Path]) -> list[ManifestEntry]:
    """Parse `file <tab> name <tab> status <tab> anchor` lines. Blank lines
    and lines starting with '#' are skipped."""
    path = Path(path)
    entries = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        span = SourceSpan(str(path), lineno, 1, lineno, max(len(raw), 1))
        parts = raw.split("\t")
        if len(parts) != 4:
            fail(ErrorCode.PARSE,
                 f"manifest: expected 4 tab-separated fields, got {len(parts)}",
                 span)
        file, name, status, ref = (p.strip() for p in parts)
        if status not in STATUSES:
            fail(ErrorCode.PARSE,
                 f"manifest: unknown status '{status}' (expected one of "
                 f"{', '.join(sorted(STATUSES))})", span)
        if not file or not name or not ref:
            fail(ErrorCode.PARSE, "manifest: empty field", span)
        entries.append(ManifestEntry(file, name, status, ref, lineno))
    return entries


def manifest_files(entries: list[ManifestEntry]) -> list[str]:
    """Corpus files in order of first appearance."""
    seen: dict[str, None] = {}
    for e in entries:
        seen.setdefault(e.file, None)
    return list(seen)


def read_sanctioned(path: Union[str, Path]) -> frozenset[str]:
    names = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            names.append(line)
    return frozenset(names)


# ---------------------------------------------------------------------------
# checking


@dataclass(frozen=True, slots=True)
class DeclReport:
    file: str
    name: str
    kind: str  # "def" | "axiom" | "hit"
    ok: bool
    seconds: float


@dataclass(slots=True)
class CorpusRun:
    env: Env
    manifest: list[ManifestEntry]
    report: list[DeclReport]
    seconds: float


def _decl_kind(decl) -> str:
    if isinstance(decl, DHit):
        return "hit"
    if isinstance(decl, DAxiom):
        return "axiom"
    return "def"


def check_source(env: Env, source: str, filename: str) -> list[DeclReport]:
    """Check one file's worth of declarations into env. The report covers
    source-level declarations only, not the helpers a `hit` generates."""
    module = parse_module(source, filename)
    report = []
    for decl in module.decls:
        start = time.perf_counter()
        rdecl = resolve(Module((decl,)), env.lookup_info)[0]
        check_declaration(env, rdecl)
        report.append(DeclReport(filename, decl.name, _decl_kind(decl), True,
                                 time.perf_counter() - start))
    return report


def check_file(env: Env, path: Union[str, Path]) -> list[DeclReport]:
    path = Path(path)
    return check_source(env, path.read_text(encoding="utf-8"), str(path))


def load_prelude(env: Optional[Env] = None,
                 root: Optional[Path] = None) -> Env:
    """Check the bundled prelude into env (a fresh one if none is given)."""
    env = env if env is not None else Env()
    root = root if root is not None else data_root()
    check_file(env, root / PRELUDE_FILE)
    return env


def check_corpus(env: Optional[Env] = None, *,
                 root: Optional[Path] = None,
                 manifest_path: Optional[Path] = None,
                 jobs: int = 1,
                 audit: bool = True) -> CorpusRun:
    """Check every corpus file in manifest order and run the audits."""
    started = time.perf_counter()
    env = env if env is not None else Env()
    root = root if root is not None else data_root()
    manifest_path = manifest_path if manifest_path is not None \
        else root / MANIFEST_FILE
    entries = read_manifest(manifest_path)
    files = manifest_files(entries)
    sources = {f: (root / f).read_text(encoding="utf-8") for f in files}
    report = check_sources(env, sources, files, jobs=jobs)
    if audit:
        verify_manifest(env, entries, report, str(manifest_path))
        audit_dependencies(env, entries,
                           read_sanctioned(root / SANCTIONED_FILE),
                           str(manifest_path))
    return CorpusRun(env, entries, report, time.perf_counter() - started)


def check_sources(env: Env, sources: dict[str, str], order: list[str],
                  jobs: int = 1) -> list[DeclReport]:
    """Check the given files into env in dependency waves. Within a wave,
    jobs > 1 checks files in parallel off immutable snapshots; the report
    always comes back in the given file order."""
    if len(order) <= 1:
        return [r for f in order for r in check_source(env, sources[f], f)]
    deps = file_dependencies(sources, order)
    per_file: dict[str, list[DeclReport]] = {}
    done: set[str] = set()
    remaining = list(order)
    pool = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        while remaining:
            wave = [f for f in remaining if deps[f] <= done]
            if not wave:
                wave = [remaining[0]]  # cycle in the over-approximation
            if pool is None or len(wave) == 1:
                for f in wave:
                    per_file[f] = check_source(env, sources[f], f)
            else:
                snaps = {f: _snapshot(env) for f in wave}
                futures = {f: pool.submit(check_source, snaps[f], sources[f], f)
                           for f in wave}
                for f in wave:  # surface the first failure in file order
                    per_file[f] = futures[f].result()
                for f in wave:
                    _merge(env, snaps[f])
            done.update(wave)
            remaining = [f for f in remaining if f not in done]
    finally:
        if pool is not None:
            pool.shutdown(wait=True, cancel_futures=True)
    return [r for f in order for r in per_file[f]]


def file_dependencies(sources: dict[str, str],
                      order: list[str]) -> dict[str, set[str]]:
    """Over-approximate file dependencies: file B depends on file A when any
    identifier token of B is a name A declares (including the eliminator and
    computation-rule names a `hit` will generate)."""
    declared: dict[str, set[str]] = {}
    mentioned: dict[str, set[str]] = {}
    for f in order:
        declared[f] = set()
        mentioned[f] = {t.text for t in tokenize(sources[f], f)
                        if t.kind == "name"}
        for decl in parse_module(sources[f], f).decls:
            declared[f].add(decl.name)
            if isinstance(decl, DHit):
                declared[f].add(hit.eliminator_name(decl.name))
                # Path constructor rules are synthesized in terms of
                # transport and apd, an implicit dependency of the file.
                mentioned[f].update({hit.TRANSPORT_NAME, hit.APD_NAME})
                for ctor in decl.ctors:
                    declared[f].add(ctor.name)
                    if ctor.kind == "path":
                        declared[f].add(
                            f"{hit.eliminator_name(decl.name)}-{ctor.name}")
    deps: dict[str, set[str]] = {}
    for f in order:
        deps[f] = {g for g in order
                   if g != f and declared[g] & mentioned[f]}
    return deps


def _snapshot(env: Env) -> Env:
    clone = Env()
    clone.declarations = dict(env.declarations)
    clone.order = list(env.order)
    clone.hits = dict(env.hits)
    clone._ctor_hit = dict(env._ctor_hit)
    clone._elim_hit = dict(env._elim_hit)
    clone._instances = dict(env._instances)
    return clone


def _merge(env: Env, checked: Env) -> None:
    for name in checked.order:
        if name not in env.declarations:
            env.declarations[name] = checked.declarations[name]
            env.order.append(name)
    for table in ("hits", "_ctor_hit", "_elim_hit", "_instances"):
        mine, theirs = getattr(env, table), getattr(checked, table)
        for key, value in theirs.items():
            mine.setdefault(key, value)


# ---------------------------------------------------------------------------
# audits


def verify_manifest(env: Env, entries: list[ManifestEntry],
                    report: list[DeclReport], manifest_path: str) -> None:
    """Every checked declaration has exactly one manifest row in the right
    file, every row names a real declaration, and statuses match kinds."""
    rows: dict[str, ManifestEntry] = {}
    for e in entries:
        if e.name in rows:
            _manifest_fail(f"manifest: duplicate entry for '{e.name}'",
                           manifest_path, e.line)
        rows[e.name] = e
    checked = {r.name: r for r in report}
    for r in report:
        e = rows.get(r.name)
        if e is None:
            _manifest_fail(
                f"manifest: declaration '{r.name}' ({r.file}) has no entry",
                manifest_path, 0)
        if Path(e.file).name != Path(r.file).name:
            _manifest_fail(
                f"manifest: '{r.name}' is declared in {r.file}, "
                f"not {e.file}", manifest_path, e.line)
    for e in entries:
        r = checked.get(e.name)
        if r is None:
            _manifest_fail(
                f"manifest: entry '{e.name}' does not match any declaration",
                manifest_path, e.line)
        wanted_axiom = e.status == "postulated"
        if wanted_axiom != (r.kind == "axiom"):
            _manifest_fail(
                f"manifest: '{e.name}' has status {e.status} but is "
                f"{'an axiom' if r.kind == 'axiom' else 'not an axiom'}",
                manifest_path, e.line)


def audit_dependencies(env: Env, entries: list[ManifestEntry],
                       sanctioned: frozenset[str], manifest_path: str) -> None:
    """Every postulate must be in the sanctioned list, and no declaration
    marked proved may depend on an unsanctioned axiom. Computation rules
    generated for path constructors do not count: they are part of the
    eliminator, not assumptions."""
    cones: dict[str, set[str]] = {}
    for e in entries:
        if e.status == "postulated" and e.name not in sanctioned:
            _manifest_fail(
                f"audit: postulate '{e.name}' is not in the sanctioned "
                "list", manifest_path, e.line)
        if e.status != "proved":
            continue
        bad = sorted(n for n in dependency_cone(env, e.name, cones)
                     if _is_unsanctioned_axiom(env, n, sanctioned))
        if bad:
            _manifest_fail(
                f"audit: '{e.name}' is marked proved but depends on "
                f"unsanctioned axiom(s): {', '.join(bad)}",
                manifest_path, e.line)


def _is_unsanctioned_axiom(env: Env, name: str,
                           sanctioned: frozenset[str]) -> bool:
    decl = env.declarations.get(name)
    return (decl is not None and decl.kind == "axiom"
            and not decl.generated and name not in sanctioned)


def _manifest_fail(message: str, path: str, line: int) -> None:
    fail(ErrorCode.SCOPE, message,
         SourceSpan(path, max(line, 1), 1, max(line, 1), 1))


def dependency_cone(env: Env, name: str,
                    cache: Optional[dict[str, set[str]]] = None) -> set[str]:
    """All declarations reachable from `name` through checked types and
    bodies (implicit arguments included, since the elaborated terms are
    used)."""
    cache = cache if cache is not None else {}
    cone: set[str] = set()
    stack = [name]
    while stack:
        current = stack.pop()
        if current in cone:
            continue
        cone.add(current)
        hit_cached = cache.get(current)
        if hit_cached is not None:
            cone.update(hit_cached)
            continue
        stack.extend(direct_references(env, current) - cone)
    cache[name] = cone
    return cone


def direct_references(env: Env, name: str) -> set[str]:
    decl = env.declarations.get(name)
    if decl is None:
        return set()
    inst = env.instance(name, (0,) * len(decl.univars))
    refs: set[str] = set()
    for term in (inst.type_term, inst.body_term):
        if term is not None:
            refs.update(constant_names(term))
    refs.discard(name)
    return refs


def constant_names(term) -> set[str]:
    """Names of global declarations a term mentions."""
    from . import syntax as s
    names: set[str] = set()
    for sub in s.walk(term):
        if isinstance(sub, s.Const):
            names.add(sub.name)
        elif isinstance(sub, s.HitType):
            names.add(sub.hit)
        elif isinstance(sub, s.HitCtor):
            names.add(sub.ctor)
        elif isinstance(sub, s.HitElim):
            names.add(hit.eliminator_name(sub.hit))
    return names
