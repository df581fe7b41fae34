"""Diagnostics shared by every pipeline stage.

The error code set is closed: tools that consume machine-readable output can
switch on the code without worrying about new variants appearing silently.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class ErrorCode(Enum):
    PARSE = "E-PARSE"
    SCOPE = "E-SCOPE"
    TYPE = "E-TYPE"
    UNIV = "E-UNIV"
    HIT_SCHEMA = "E-HIT-SCHEMA"
    LOOPFORM = "E-LOOPFORM"

    def __str__(self) -> str:
        return self.value


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class SourceSpan:
    """Half-open source region; line and col are 1-based."""

    file: str
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


@dataclass(frozen=True, slots=True)
class Diagnostic:
    code: ErrorCode
    message: str
    span: Optional[SourceSpan] = None
    severity: Severity = Severity.ERROR
    related: tuple[tuple[SourceSpan, str], ...] = ()

    def with_default_span(self, span: SourceSpan) -> "Diagnostic":
        """Fill in the primary span if an inner stage could not provide one."""
        if self.span is not None:
            return self
        return Diagnostic(self.code, self.message, span, self.severity, self.related)

    def human(self) -> str:
        where = str(self.span) if self.span else "<unknown>"
        lines = [f"{where}: {self.severity}: {self.code}: {self.message}"]
        for span, note in self.related:
            lines.append(f"  {span}: note: {note}")
        return "\n".join(lines)

    def machine(self) -> str:
        """One tab-separated line: CODE FILE LINE COL MESSAGE."""
        if self.span is not None:
            file, line, col = self.span.file, self.span.line, self.span.col
        else:
            file, line, col = "<unknown>", 0, 0
        message = self.message.replace("\t", " ").replace("\n", " ")
        return f"{self.code}\t{file}\t{line}\t{col}\t{message}"


class CheckError(Exception):
    """Raised by any stage that fails with a diagnostic."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.human())
        self.diagnostic = diagnostic


def fail(code: ErrorCode, message: str, span: Optional[SourceSpan] = None,
         related: tuple[tuple[SourceSpan, str], ...] = ()) -> "NoReturn":  # noqa: F821
    raise CheckError(Diagnostic(code, message, span, Severity.ERROR, related))
