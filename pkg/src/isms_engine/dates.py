"""Calendar and timestamp helpers.

Timestamps are timezone-aware UTC; calendar dates are plain ISO dates. Month
arithmetic clamps to the last day of the target month, which is the rule
every deadline in the engine relies on.
"""

from __future__ import annotations

import calendar
from datetime import date, datetime, timezone

from .errors import ValidationError


def add_months(d: date, months: int) -> date:
    """Advance a date by calendar months, clamping to the target month's last day."""
    month_index = d.year * 12 + (d.month - 1) + months
    year, month = divmod(month_index, 12)
    month += 1
    day = min(d.day, calendar.monthrange(year, month)[1])
    return date(year, month, day)


def parse_date(value: str) -> date:
    try:
        return date.fromisoformat(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"invalid date: {value!r}") from exc


def format_date(d: date) -> str:
    return d.isoformat()


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO timestamp (or bare date) into an aware UTC datetime."""
    if not isinstance(value, str):
        raise ValidationError(f"invalid timestamp: {value!r}")
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ValidationError(f"invalid timestamp: {value!r}") from exc
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def now_utc() -> datetime:
    return datetime.now(timezone.utc)


def hours_between(start: datetime, end: datetime) -> float:
    return (end - start).total_seconds() / 3600.0
