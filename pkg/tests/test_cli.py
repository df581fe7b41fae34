"""Command-line behaviour: exit codes, diagnostic routing, and the three
subcommands against the bundled corpus and the rejection fixtures."""
import shutil
from pathlib import Path

import pytest

from hottcheck.cli import ExitStatus
from hottcheck.corpus import MANIFEST_FILE, SANCTIONED_FILE, data_root

DATA = Path(__file__).parent / "data"
NEGATIVE = DATA / "negative"
CORPUS = data_root()


def corpus_files():
    return sorted(str(p) for p in CORPUS.glob("*.hott"))


def expected_code(path):
    first = path.read_text(encoding="utf-8").splitlines()[0]
    assert first.startswith("-- expect: "), path
    return first.removeprefix("-- expect: ").split()[0]


def split_machine_line(out):
    lines = out.splitlines()
    assert len(lines) == 1, out
    fields = lines[0].split("\t")
    assert len(fields) == 5, lines[0]
    int(fields[2]), int(fields[3])  # line and column are numbers
    return fields


# ---------------------------------------------------------------------------
# check


def test_check_corpus_succeeds(cli):
    code, out, err = cli("check", *corpus_files())
    assert code == ExitStatus.OK
    assert out == ""
    assert "ok: 140 declarations in 19 file(s)" in err


def test_check_corpus_with_manifest_and_jobs(cli):
    code, _, err = cli("check", *corpus_files(), "--jobs", "4",
                       "--manifest", str(CORPUS / MANIFEST_FILE))
    assert code == ExitStatus.OK
    assert "ok:" in err


def test_check_prelude_alone(cli):
    code, _, _ = cli("check", str(CORPUS / "prelude.hott"))
    assert code == ExitStatus.OK


def test_check_missing_file_is_a_usage_error(cli):
    code, out, err = cli("check", "missing.hott")
    assert code == ExitStatus.USAGE
    assert out == ""
    assert err.startswith("error:")


def test_human_diagnostics_go_to_stderr(cli):
    bad = NEGATIVE / "type-mismatch.hott"
    code, out, err = cli("check", str(bad))
    assert code == ExitStatus.DIAGNOSTICS
    assert out == ""
    assert "E-TYPE" in err and str(bad) in err


def test_machine_diagnostics_go_to_stdout(cli):
    bad = NEGATIVE / "type-mismatch.hott"
    code, out, err = cli("check", str(bad), "--diag-format", "machine")
    assert code == ExitStatus.DIAGNOSTICS
    assert err == ""
    fields = split_machine_line(out)
    assert fields[0] == "E-TYPE"
    assert fields[1] == str(bad)


@pytest.mark.parametrize("path", sorted(NEGATIVE.glob("*.hott")),
                         ids=lambda p: p.stem)
def test_rejection_fixtures_fail_with_the_expected_code(cli, path):
    if path.name == "loopform-funext.hott":
        pytest.skip("checks clean; rejected by `winding` instead")
    code, out, _ = cli("check", str(path), "--diag-format", "machine")
    assert code == ExitStatus.DIAGNOSTICS
    assert split_machine_line(out)[0] == expected_code(path)


def test_no_prelude_hides_prelude_names(cli, tmp_path):
    f = tmp_path / "uses-prelude.hott"
    f.write_text("def x : Nat := id [0] zero\n")
    code, _, _ = cli("check", str(f))
    assert code == ExitStatus.OK
    code, out, _ = cli("check", str(f), "--no-prelude",
                       "--diag-format", "machine")
    assert code == ExitStatus.DIAGNOSTICS
    assert split_machine_line(out)[0] == "E-SCOPE"


def test_manifest_flag_runs_the_audits(cli, tmp_path):
    doctored = (CORPUS / MANIFEST_FILE).read_text(encoding="utf-8").replace(
        "paths.hott\tconcat\tproved", "paths.hott\tconcat\tpostulated")
    (tmp_path / MANIFEST_FILE).write_text(doctored)
    shutil.copy(CORPUS / SANCTIONED_FILE, tmp_path / SANCTIONED_FILE)
    code, out, _ = cli("check", *corpus_files(), "--diag-format", "machine",
                       "--manifest", str(tmp_path / MANIFEST_FILE))
    assert code == ExitStatus.DIAGNOSTICS
    fields = split_machine_line(out)
    assert fields[0] == "E-SCOPE" and "'concat'" in fields[4]


# ---------------------------------------------------------------------------
# norm


def test_norm_computes_closed_naturals(cli):
    code, out, _ = cli("norm", str(DATA / "nat.hott"), "--term", "four")
    assert code == ExitStatus.OK
    assert out.strip() == "succ (succ (succ (succ zero)))"


def test_norm_reduces_concat_of_refls(cli):
    code, out, _ = cli("norm", str(CORPUS / "paths.hott"),
                       "--term", "concat-refl-refl")
    assert code == ExitStatus.OK
    assert out.strip() == "refl zero"


def test_norm_leaves_postulates_stuck(cli):
    # Transporting in the universal cover along the loop computes down to
    # the postulated computation rule for univalence and stops there.
    code, out, _ = cli("norm", str(CORPUS / "circle-code.hott"),
                       "--term", "encode-loop")
    assert code == ExitStatus.OK
    assert "ua" in out


def test_norm_unknown_name_is_a_diagnostic(cli):
    code, out, _ = cli("norm", str(DATA / "nat.hott"), "--term", "five",
                       "--diag-format", "machine")
    assert code == ExitStatus.DIAGNOSTICS
    fields = split_machine_line(out)
    assert fields[0] == "E-SCOPE" and fields[1] == "<term>"


# ---------------------------------------------------------------------------
# winding


@pytest.mark.parametrize("term,expected", [
    ("concat [0] loop (concat [0] loop (concat [0] loop "
     "(concat [0] loop loop)))", "5"),
    ("refl base", "0"),
    ("inv [0] loop", "-1"),
])
def test_winding_counts_loops(cli, term, expected):
    code, out, _ = cli("winding", str(CORPUS / "circle-code.hott"),
                       "--term", term)
    assert code == ExitStatus.OK
    assert out.strip() == expected


def test_winding_rejects_terms_outside_the_calculus(cli):
    code, out, _ = cli("winding", str(NEGATIVE / "loopform-funext.hott"),
                       "--term", "disguised", "--diag-format", "machine")
    assert code == ExitStatus.DIAGNOSTICS
    assert split_machine_line(out)[0] == "E-LOOPFORM"


def test_winding_rejects_terms_of_the_wrong_type(cli):
    code, out, _ = cli("winding", str(CORPUS / "circle-code.hott"),
                       "--term", "zero-int", "--diag-format", "machine")
    assert code == ExitStatus.DIAGNOSTICS
    assert split_machine_line(out)[0] == "E-TYPE"


# ---------------------------------------------------------------------------
# usage


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate", "x.hott"],
    ["norm", "x.hott"],  # missing --term
    ["check"],  # missing files
])
def test_bad_invocations_are_usage_errors(cli, argv):
    code, _, _ = cli(*argv)
    assert code == ExitStatus.USAGE
