"""Weekly batch training schedule: a small six-field cron evaluator.

Fields are ``second minute hour day-of-month month day-of-week`` with
``*``, lists, ranges, ``*/step``, and SUN..SAT / JAN..DEC names.
Day-of-week follows cron convention (0 = Sunday, 6 = Saturday). The
default batch schedule fires every Saturday at midnight; invoking the
CLI from an external cron works just as well.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timedelta

from bidimatch.errors import InvalidValue

logger = logging.getLogger(__name__)

WEEKLY_BATCH_CRON = "0 0 0 * * SAT"

_DOW_NAMES = {name: index for index, name in enumerate(["SUN", "MON", "TUE", "WED", "THU", "FRI", "SAT"])}
_MONTH_NAMES = {
    name: index + 1
    for index, name in enumerate(["JAN", "FEB", "MAR", "APR", "MAY", "JUN", "JUL", "AUG", "SEP", "OCT", "NOV", "DEC"])
}

_FIELD_RANGES = ((0, 59), (0, 59), (0, 23), (1, 31), (1, 12), (0, 6))


@dataclass(frozen=True)
class BatchSummary:
    contexts: int
    rank_calls: int
    rewards_sent: int


def _parse_value(text: str, names: dict[str, int]) -> int:
    upper = text.upper()
    if upper in names:
        return names[upper]
    try:
        return int(text)
    except ValueError as exc:
        raise InvalidValue("cron", f"bad field value {text!r}") from exc


def _parse_field(text: str, low: int, high: int, names: dict[str, int]) -> frozenset[int]:
    values: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        step = 1
        if "/" in part:
            part, step_text = part.split("/", 1)
            step = int(step_text)
        if part == "*":
            start, stop = low, high
        elif "-" in part:
            a, b = part.split("-", 1)
            start, stop = _parse_value(a, names), _parse_value(b, names)
        else:
            start = stop = _parse_value(part, names)
        if not (low <= start <= high and low <= stop <= high and start <= stop):
            raise InvalidValue("cron", f"field {text!r} outside [{low}, {high}]")
        values.update(range(start, stop + 1, step))
    return frozenset(values)


@dataclass(frozen=True)
class CronSchedule:
    seconds: frozenset[int]
    minutes: frozenset[int]
    hours: frozenset[int]
    days_of_month: frozenset[int]
    months: frozenset[int]
    days_of_week: frozenset[int]
    expression: str

    def matches(self, moment: datetime) -> bool:
        cron_dow = (moment.weekday() + 1) % 7  # Monday=0 -> cron Sunday=0
        return (
            moment.second in self.seconds
            and moment.minute in self.minutes
            and moment.hour in self.hours
            and moment.day in self.days_of_month
            and moment.month in self.months
            and cron_dow in self.days_of_week
        )

    def next_fire(self, after: datetime) -> datetime:
        """First matching moment strictly after ``after`` (within 400 days)."""
        candidate_day = after.date()
        times = sorted(
            (h, m, s) for h in self.hours for m in self.minutes for s in self.seconds
        )
        for day_offset in range(0, 400):
            day = candidate_day + timedelta(days=day_offset)
            cron_dow = (day.weekday() + 1) % 7
            if day.day not in self.days_of_month or day.month not in self.months or cron_dow not in self.days_of_week:
                continue
            for hour, minute, second in times:
                moment = datetime(day.year, day.month, day.day, hour, minute, second, tzinfo=after.tzinfo)
                if moment > after:
                    return moment
        raise InvalidValue("cron", f"{self.expression!r} never fires within 400 days")


def parse_cron(expression: str) -> CronSchedule:
    fields = expression.split()
    if len(fields) != 6:
        raise InvalidValue("cron", f"expected 6 fields, got {len(fields)} in {expression!r}")
    names: list[dict[str, int]] = [{}, {}, {}, {}, _MONTH_NAMES, _DOW_NAMES]
    parsed = [
        _parse_field(field_text, low, high, name_map)
        for field_text, (low, high), name_map in zip(fields, _FIELD_RANGES, names)
    ]
    return CronSchedule(*parsed, expression=expression)


class MaintenanceThread(threading.Thread):
    """Background upkeep for a running service.

    Every tick: expire reward windows, apply pending training per the
    update cadence, and fire batch training when the cron matches. Runs
    as a daemon so service shutdown does not block on it.
    """

    def __init__(self, service, *, batch_cron: str | None = WEEKLY_BATCH_CRON, tick_seconds: float = 1.0):
        super().__init__(name="bidimatch-maintenance", daemon=True)
        self._service = service
        self._schedule = parse_cron(batch_cron) if batch_cron else None
        self._tick = tick_seconds
        self._stop = threading.Event()
        self._last_train: dict = {}

    def stop(self) -> None:
        self._stop.set()

    def run(self) -> None:
        while not self._stop.wait(self._tick):
            now = time.time()
            try:
                self._service.maintenance(now)
            except Exception:
                logger.exception("maintenance pass failed")
            if self._schedule is not None and self._schedule.matches(datetime.now()):
                try:
                    self._service.run_weekly_batch()
                except Exception:
                    logger.exception("weekly batch training failed")
