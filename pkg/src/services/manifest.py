"""Run manifests and artifact output: stdout for reports, --out files with a sidecar manifest."""
import logging
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

from src.conf.config import settings
from src.schemas import RunManifest

logger = logging.getLogger(__name__)


@dataclass
class RunClock:
    command: str
    argv: list[str]
    group: str | None = None
    bounds: dict[str, int | str] = field(default_factory=dict)
    started_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))
    _start: float = field(default_factory=time.perf_counter, repr=False)

    def manifest(self) -> RunManifest:
        return RunManifest(command=self.command, argv=list(self.argv), group=self.group, bounds=dict(self.bounds),
                           tool_version=settings.tool_version, settings=settings.model_dump(),
                           started_at=self.started_at,
                           elapsed_seconds=round(time.perf_counter() - self._start, 3))


def manifest_path(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(out.name + '.manifest.json')


def write_artifact(lines: Iterable[str], out: str | None, clock: RunClock, stream=None) -> int:
    """
    Write newline-terminated lines to ``out`` (plus ``<out>.manifest.json``) or to
    stdout, in which case the manifest goes to stderr as one JSON line.
    """
    count = 0
    if out is None:
        stream = stream or sys.stdout
        for line in lines:
            stream.write(line + '\n')
            count += 1
        stream.flush()
        sys.stderr.write(clock.manifest().model_dump_json() + '\n')
        return count
    with open(out, 'w', encoding='utf-8', newline='\n') as handle:
        for line in lines:
            handle.write(line + '\n')
            count += 1
    manifest_path(out).write_text(clock.manifest().model_dump_json(indent=2) + '\n', encoding='utf-8')
    logger.info('wrote %d lines to %s', count, out)
    return count


def write_report(report, out: str | None, clock: RunClock, stream=None):
    """Embed the manifest into a pydantic report and emit it as indented JSON."""
    report.manifest = clock.manifest()
    text = report.model_dump_json(indent=2)
    if out is None:
        stream = stream or sys.stdout
        stream.write(text + '\n')
        stream.flush()
        return report
    Path(out).write_text(text + '\n', encoding='utf-8')
    logger.info('wrote report to %s', out)
    return report
