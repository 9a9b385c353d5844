"""Exception types shared across the toolkit."""

from __future__ import annotations

from contextlib import contextmanager


class FormatError(ValueError):
    """An input file or value has an unsupported format or layout."""


class EstimationError(RuntimeError):
    """A robust-fitting or search operation found no acceptable solution."""


class RunnerError(RuntimeError):
    """An external or builtin benchmark runner failed to produce its output."""


class StageError(RuntimeError):
    """Failure inside a named stage of a multi-stage pipeline."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage


@contextmanager
def pipeline_stage(name: str):
    """Re-raise any failure inside the block as a StageError naming the stage."""
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc
