"""Directory of named JSON reports, one file per report."""

import logging
from pathlib import Path
from typing import List, Optional, Union

from gapkit.errors import ReportError
from gapkit.reports.emit import ReportEnvelope, emit_report, parse_report

logger = logging.getLogger(__name__)


class ReportStore:
    """Keeps reports under ``root/<name>.json``.

    Example:
        store = ReportStore("./reports")
        store.save("prop21", envelope)
        envelope = store.load("prop21")
    """

    def __init__(self, root: Union[str, Path] = "./reports"):
        self.root = Path(root)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ReportError(f"Cannot create report directory {self.root}: {e}") from e

    def path(self, name: str) -> Path:
        return self.root / f"{name}.json"

    def save(self, name: str, envelope: ReportEnvelope) -> Path:
        target = self.path(name)
        emit_report(envelope, target)
        return target

    def load(self, name: str) -> Optional[ReportEnvelope]:
        target = self.path(name)
        if not target.exists():
            return None
        try:
            return parse_report(target.read_text())
        except ReportError:
            logger.warning(f"Report file {target} is corrupted, ignoring it")
            return None

    def names(self) -> List[str]:
        return sorted(p.stem for p in self.root.glob("*.json"))
