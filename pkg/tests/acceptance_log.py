"""Collects one PASS/FAIL line per acceptance criterion for the session summary."""

import time
from contextlib import contextmanager

RESULTS: dict[int, str] = {}


def _first_line(exc: BaseException) -> str:
    text = str(exc)
    return text.splitlines()[0] if text else type(exc).__name__


@contextmanager
def criterion(number: int, title: str, limit: float | None = None):
    """Time a criterion body and record its outcome.

    The criterion fails when the body raises or when it runs for ``limit``
    seconds or longer.  Failures are re-raised so pytest reports them too.
    """
    start = time.perf_counter()
    failure = None
    try:
        yield
    except BaseException as exc:
        failure = _first_line(exc)
        raise
    finally:
        elapsed = time.perf_counter() - start
        if failure is None and limit is not None and elapsed >= limit:
            failure = f"took {elapsed:.2f} s, limit {limit:g} s"
        budget = f" / limit {limit:g} s" if limit is not None else ""
        line = f"criterion {number:>2}: {title}  [{elapsed:.2f} s{budget}]"
        RESULTS[number] = f"PASS  {line}" if failure is None else f"FAIL  {line}  ({failure})"
    assert limit is None or elapsed < limit, f"criterion {number} took {elapsed:.2f} s (limit {limit} s)"
