"""Resource budgets and their environment overrides.

Budgets cap the total entry count of any dense matrix the package is asked
to materialize.  The environment variable ``PGPH_BUDGET`` overrides them:
either a single integer applied to both budgets, or a comma-separated list
of ``fp=N`` / ``int=N`` assignments.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from pgph.errors import BudgetExceededError, DataError

DEFAULT_FP_ENTRIES = 200_000_000
DEFAULT_INT_ENTRIES = 10_000_000
DEFAULT_ORDER_CAP = 512


@dataclass(frozen=True)
class Budgets:
    """Entry-count caps for prime-field and integer matrices."""

    fp_entries: int = DEFAULT_FP_ENTRIES
    int_entries: int = DEFAULT_INT_ENTRIES

    def check_fp(self, stage: str, entries: int) -> None:
        if entries > self.fp_entries:
            raise BudgetExceededError(stage, entries, self.fp_entries)

    def check_int(self, stage: str, entries: int) -> None:
        if entries > self.int_entries:
            raise BudgetExceededError(stage, entries, self.int_entries)


def default_budgets(env: str | None = None) -> Budgets:
    """Budgets after applying the PGPH_BUDGET override, if any."""
    raw = os.environ.get("PGPH_BUDGET") if env is None else env
    if not raw:
        return Budgets()
    fp, integral = DEFAULT_FP_ENTRIES, DEFAULT_INT_ENTRIES
    try:
        if "=" in raw:
            for part in raw.split(","):
                key, _, value = part.strip().partition("=")
                if key == "fp":
                    fp = int(value)
                elif key == "int":
                    integral = int(value)
                else:
                    raise ValueError(key)
        else:
            fp = integral = int(raw)
    except ValueError as exc:
        raise DataError(f"unparsable PGPH_BUDGET value: {raw!r}") from exc
    if fp <= 0 or integral <= 0:
        raise DataError(f"PGPH_BUDGET values must be positive: {raw!r}")
    return Budgets(fp_entries=fp, int_entries=integral)
