"""
Logging setup and structured report log
Text log in <log_dir>/gricci.log, JSON lines in <log_dir>/reports.jsonl
"""

import json
import logging
import sys
from pathlib import Path
from typing import Iterable, Optional

from .settings import Settings

ROOT_LOGGER = 'gricci'

formatter = logging.Formatter(
    '%(asctime)s | %(levelname)s | %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)


def setup_logging(settings: Settings, verbose: bool = False, log_to_file: bool = True) -> logging.Logger:
    """
    Configure the gricci and core logger hierarchy

    Args:
        settings: runtime settings (log_dir, log_level)
        verbose: DEBUG output on stderr instead of WARNING
        log_to_file: attach the file handler under log_dir

    Returns:
        the root gricci logger
    """
    root = logging.getLogger(ROOT_LOGGER)
    core = logging.getLogger('core')
    level = getattr(logging, settings.log_level.upper(), logging.INFO)
    for lg in (root, core):
        lg.setLevel(logging.DEBUG if verbose else level)

    # Idempotent: handlers are attached once per process
    if getattr(root, '_gricci_configured', False):
        return root

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setLevel(logging.DEBUG if verbose else logging.WARNING)
    stream_handler.setFormatter(formatter)

    handlers = [stream_handler]
    if log_to_file:
        log_dir = Path(settings.log_dir)
        try:
            log_dir.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_dir / 'gricci.log')
            file_handler.setLevel(level)
            file_handler.setFormatter(formatter)
            handlers.append(file_handler)
        except OSError as e:
            root.warning(f"File logging disabled: {e}")

    for handler in handlers:
        root.addHandler(handler)
        core.addHandler(handler)
    root._gricci_configured = True
    return root


def append_report_lines(lines: Iterable[str], settings: Settings, path: Optional[Path] = None):
    """Append JSON report lines to the structured report log"""
    target = path or Path(settings.log_dir) / 'reports.jsonl'
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, 'a') as f:
            for line in lines:
                # Re-serialize to reject anything that is not a JSON object
                f.write(json.dumps(json.loads(line)) + '\n')
    except Exception as e:
        logging.getLogger(ROOT_LOGGER).error(f"Failed to write report log: {e}")
