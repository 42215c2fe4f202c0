import logging

import pytest

from TropIntersect.utils import (
    DEFAULT_VERIFY_LIMIT,
    THREADS_ENV,
    VERIFY_LIMIT_ENV,
    configure_logging,
    parallel_map,
    resolve_output_path,
    resolve_threads,
    verify_limit,
)


def test_threads_from_argument_and_environment(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert resolve_threads() == 1
    assert resolve_threads(4) == 4
    monkeypatch.setenv(THREADS_ENV, "3")
    assert resolve_threads() == 3
    with pytest.raises(ValueError):
        resolve_threads(0)


@pytest.mark.parametrize("raw", ["many", "0", "-2"])
def test_bad_environment_values(monkeypatch, raw):
    monkeypatch.setenv(THREADS_ENV, raw)
    with pytest.raises(ValueError, match=THREADS_ENV):
        resolve_threads()


def test_verify_limit(monkeypatch):
    monkeypatch.delenv(VERIFY_LIMIT_ENV, raising=False)
    assert verify_limit() == DEFAULT_VERIFY_LIMIT
    monkeypatch.setenv(VERIFY_LIMIT_ENV, "20")
    assert verify_limit() == 20


def test_parallel_map_keeps_order():
    items = list(range(20))
    assert parallel_map(lambda x: x * x, items, threads=4) == [x * x for x in items]
    assert parallel_map(lambda x: x, [], threads=4) == []


def test_resolve_output_path(tmp_path):
    assert resolve_output_path(None) is None
    path = resolve_output_path(str(tmp_path / "a" / "b.yaml"))
    assert path.parent.exists()


def test_log_records_carry_the_logger_name(monkeypatch):
    seen = {}
    monkeypatch.setattr(logging, "basicConfig", lambda **kwargs: seen.update(kwargs))
    configure_logging(verbose=True)
    assert seen["level"] == logging.DEBUG
    record = logging.LogRecord("TropIntersect.moduli", logging.INFO, __file__, 1, "ready", None, None)
    assert logging.Formatter(seen["format"]).format(record) == "INFO TropIntersect.moduli: ready"
