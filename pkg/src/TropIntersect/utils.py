from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Optional, TypeVar

from dotenv import find_dotenv, load_dotenv

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "TROPINTERSECT_THREADS"
VERIFY_LIMIT_ENV = "TROPINTERSECT_VERIFY_LIMIT"
DEFAULT_VERIFY_LIMIT = 12

_env_loaded = False


def configure_logging(verbose: bool = False) -> None:
    """Configure a simple console logger."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
    )


def load_env() -> None:
    global _env_loaded
    if _env_loaded:
        return
    load_dotenv(find_dotenv(filename=".env", usecwd=True), override=False)
    _env_loaded = True


def _int_from_env(name: str, default: int) -> int:
    load_env()
    raw = os.environ.get(name)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def resolve_threads(threads: Optional[int] = None) -> int:
    """Worker count: explicit value, else the env default, else 1."""
    if threads is not None:
        if threads < 1:
            raise ValueError("--threads must be positive")
        return threads
    return _int_from_env(THREADS_ENV, 1)


def verify_limit() -> int:
    return _int_from_env(VERIFY_LIMIT_ENV, DEFAULT_VERIFY_LIMIT)


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> list[R]:
    """Map ``func`` over ``items`` keeping input order."""
    work = list(items)
    workers = resolve_threads(threads)
    if workers <= 1 or len(work) < 2:
        return [func(item) for item in work]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, work))


def resolve_output_path(output: Optional[str]) -> Path | None:
    if not output:
        return None
    out_path = Path(output).expanduser()
    out_path.parent.mkdir(parents=True, exist_ok=True)
    return out_path
