# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

import os

from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

# Environment variables read by the engine
ENV_THREADS: str = "GMX_THREADS"
ENV_LOG_LEVEL: str = "GMX_LOG_LEVEL"
ENV_LOG_DIR: str = "GMX_LOG_DIR"

VALID_LOG_LEVELS: set[str] = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


class Settings(BaseModel):
    """Process-wide settings taken from the environment (and `.env`)."""

    threads: int = Field(default=0, ge=0, description="Worker cap, 0 = auto")
    log_level: str = "INFO"
    log_dir: Path | None = None

    @field_validator("log_level")
    def validate_log_level(cls, v):
        v = v.upper()
        if v not in VALID_LOG_LEVELS:
            raise ValueError(f"Invalid log level: {v}")
        return v


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    # a missing .env is fine, plain environment variables are enough
    load_dotenv()

    values: dict = {}
    if ENV_THREADS in os.environ:
        values["threads"] = os.environ[ENV_THREADS]
    if ENV_LOG_LEVEL in os.environ:
        values["log_level"] = os.environ[ENV_LOG_LEVEL]
    if os.environ.get(ENV_LOG_DIR):
        values["log_dir"] = os.environ[ENV_LOG_DIR]
    return Settings(**values)


def worker_count(requested: int | None = None) -> int:
    """Resolve the number of workers for fan-out sections.

    Args:
        requested: Explicit override; `None` falls back to `GMX_THREADS`.

    Returns:
        int: At least 1.
    """
    threads = get_settings().threads if requested is None else requested
    if threads <= 0:
        threads = os.cpu_count() or 1
    return max(1, threads)
