"""
Session logging for Andermeans.
Human-readable output goes to stderr and, optionally, a line-buffered file;
stdout is reserved for reports. Solves running on harness worker threads
share one logger, so every write holds a lock.
"""
import sys
import threading
from datetime import datetime
from pathlib import Path
from typing import Optional, TextIO
from rich.console import Console
from rich.text import Text

_LEVEL_STYLES = {
    "[INFO] ": "cyan",
    "[WARNING] ": "yellow",
    "[ERROR] ": "red",
}


class _StatusLine:
    """One overwritable line at the bottom of the terminal."""

    def __init__(self):
        self._width = 0

    @property
    def active(self) -> bool:
        return self._width > 0

    def show(self, msg: str) -> None:
        rendered = msg.rstrip("\n")
        self._width = max(self._width, len(rendered))
        sys.stderr.write("\r" + rendered.ljust(self._width))
        sys.stderr.flush()

    def wipe(self) -> None:
        if not self.active:
            return
        sys.stderr.write("\r" + " " * self._width + "\r")
        sys.stderr.flush()
        self._width = 0


class AndermeansLogger:
    """Stderr + file logger with debug-only iteration traces"""

    def __init__(self, log_file: Optional[Path] = None, debug: bool = False, quiet: bool = False):
        self.log_file = log_file
        self.debug_mode = debug
        self.quiet = quiet
        self._console = Console(stderr=True)
        self._status = _StatusLine()
        self._lock = threading.Lock()
        self._file_handle: Optional[TextIO] = None
        self._start_time = datetime.now()

        if log_file:
            log_file.parent.mkdir(parents=True, exist_ok=True)
            self._file_handle = open(log_file, "w", buffering=1, encoding="utf-8")

        from andermeans.__version__ import __version__

        self._session_line(f"Started Andermeans {__version__}", self._start_time)

    def _session_line(self, what: str, when: datetime) -> None:
        if self._file_handle or not self.quiet:
            self.log(f"({when.strftime('%H:%M:%S')}  {what})")

    def _screen_text(self, output: str) -> Text:
        text = Text(output)
        for prefix, style in _LEVEL_STYLES.items():
            if output.startswith(prefix):
                text.stylize(style, 0, len(prefix) - 1)
                return text
        if "(rejected" in output:
            text.stylize("yellow")
        elif "[DEBUG] " in output:
            text.stylize("dim")
        return text

    def status(self, msg: str) -> None:
        """Replace the in-place status line (screen only)."""
        if self.quiet:
            return
        with self._lock:
            self._status.show(msg)

    def clear_status(self) -> None:
        with self._lock:
            self._status.wipe()

    def log(self, msg: str, prefix: str = ""):
        """Write one line to screen and file"""
        output = f"{prefix}{msg}"
        with self._lock:
            self._status.wipe()
            if not self.quiet or prefix == "[ERROR] ":
                self._console.print(self._screen_text(output))
            if self._file_handle:
                self._file_handle.write(output + "\n")

    def info(self, msg: str):
        self.log(msg, "[INFO] ")

    def warning(self, msg: str):
        self.log(msg, "[WARNING] ")

    def error(self, msg: str):
        self.log(msg, "[ERROR] ")

    def debug(self, msg: str):
        """Timestamped, debug mode only"""
        if self.debug_mode:
            self.log(msg, f"[{datetime.now().strftime('%H:%M:%S.%f')[:-3]}] [DEBUG] ")

    def iteration(self, solver: str, t: int, energy: float, m: int | None = None, accepted: bool = True):
        """Per-iteration trace line (debug mode only)"""
        if not self.debug_mode:
            return
        depth = "" if m is None else f" m={m}"
        verdict = "" if accepted else " (rejected, reverted to Lloyd iterate)"
        self.debug(f"{solver} iter {t:>5}: E={energy:.10g}{depth}{verdict}")

    def solve_finished(self, solver: str, accepted: int, total: int, mse: float, elapsed: float, converged: bool):
        state = "converged" if converged else "stopped at max iterations"
        self.info(f"{solver}: {state} after {accepted}/{total} iterations, mse={mse:.6g}, {elapsed:.3f}s")

    def close(self):
        """Write the session footer and release the file"""
        self.clear_status()
        if self._file_handle is None:
            return
        end_time = datetime.now()
        elapsed = (end_time - self._start_time).total_seconds()
        self._session_line(f"Ended session, elapsed {elapsed:.1f}s", end_time)
        with self._lock:
            self._file_handle.close()
            self._file_handle = None

    def __enter__(self):
        return self

    def __exit__(self, *args):
        self.close()


# Process-wide instance, installed by the CLI
_logger: Optional[AndermeansLogger] = None


def set_logger(logger: AndermeansLogger):
    global _logger
    _logger = logger


def get_logger() -> AndermeansLogger:
    """Installed logger, or a silent one for library use"""
    global _logger
    if _logger is None:
        _logger = AndermeansLogger(quiet=True)
    return _logger


def log(msg: str):
    get_logger().log(msg)


def info(msg: str):
    get_logger().info(msg)


def warning(msg: str):
    get_logger().warning(msg)


def error(msg: str):
    get_logger().error(msg)


def debug(msg: str):
    get_logger().debug(msg)
