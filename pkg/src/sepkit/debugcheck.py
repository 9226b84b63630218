"""Opt-in structural assertion sweeps.

The separator algorithms maintain loop invariants that are cheap to state but
not free to re-derive, so the checks are gated behind a process-wide toggle
(CLI flag --debug-assert, or ``enable(True)`` in tests).  A failed check
raises InvariantViolation with a stable rule id.
"""

from __future__ import annotations

_ENABLED = False


class InvariantViolation(AssertionError):
    def __init__(self, rule: str, detail: str):
        self.rule = rule
        self.detail = detail
        super().__init__(f"[{rule}] {detail}")


def enable(on: bool = True) -> None:
    global _ENABLED
    _ENABLED = bool(on)


def enabled() -> bool:
    return _ENABLED


def check(rule: str, condition: bool, detail: str = "") -> None:
    """Raise InvariantViolation(rule) unless condition holds (no-op when disabled)."""
    if _ENABLED and not condition:
        raise InvariantViolation(rule, detail)
