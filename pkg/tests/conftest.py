"""Shared fixtures: the checked corpus (built once per session) and an
in-process command-line runner."""
import pytest

from hottcheck import corpus as corpuslib
from hottcheck.cli import main


@pytest.fixture(scope="session")
def corpus_run():
    """One full corpus check, audits included, shared by every test."""
    return corpuslib.check_corpus()


@pytest.fixture(scope="session")
def corpus_env(corpus_run):
    return corpus_run.env


@pytest.fixture
def cli(capsys):
    """Run the command line in-process: cli("check", f) -> (code, out, err)."""
    def run(*argv):
        code = main(list(argv))
        captured = capsys.readouterr()
        return code, captured.out, captured.err
    return run
