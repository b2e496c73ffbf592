# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

import logging
import os
import threading

import pytest

from pydantic import ValidationError

from guided_mixup.utils.clogger import create_logger
from guided_mixup.utils.config import ENV_LOG_LEVEL, ENV_THREADS, Settings, get_settings, worker_count
from guided_mixup.utils.workers import ordered_map


@pytest.fixture
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


class TestSettings:
    def test_defaults(self):
        settings = Settings()
        assert settings.threads == 0
        assert settings.log_level == "INFO"
        assert settings.log_dir is None

    def test_log_level_normalized(self):
        assert Settings(log_level="debug").log_level == "DEBUG"
        with pytest.raises(ValidationError):
            Settings(log_level="chatty")

    def test_negative_threads(self):
        with pytest.raises(ValidationError):
            Settings(threads=-1)

    def test_environment(self, monkeypatch, fresh_settings):
        monkeypatch.setenv(ENV_THREADS, "3")
        monkeypatch.setenv(ENV_LOG_LEVEL, "warning")
        settings = get_settings()
        assert settings.threads == 3
        assert settings.log_level == "WARNING"

    def test_worker_count(self, monkeypatch, fresh_settings):
        monkeypatch.setenv(ENV_THREADS, "2")
        assert worker_count() == 2
        assert worker_count(5) == 5
        assert worker_count(0) == max(1, os.cpu_count() or 1)


class TestOrderedMap:
    def test_order_kept(self):
        assert ordered_map(lambda v: v * v, range(20), workers=4) == [v * v for v in range(20)]

    def test_single_worker_inline(self):
        caller = threading.get_ident()
        threads = ordered_map(lambda _: threading.get_ident(), range(5), workers=1)
        assert set(threads) == {caller}

    def test_errors_propagate(self):
        def fail(v: int) -> int:
            if v == 3:
                raise ValueError("three")
            return v

        with pytest.raises(ValueError, match="three"):
            ordered_map(fail, range(6), workers=3)

    def test_empty(self):
        assert ordered_map(str, [], workers=4) == []


def test_logger_reused(tmp_path):
    first = create_logger("gmx_test_logger", "TEST", logging.DEBUG, tmp_path)
    second = create_logger("gmx_test_logger", "OTHER")
    assert first is second
    assert len(first.handlers) == 2
    first.info("hello")
    for handler in first.handlers:
        handler.flush()
    text = (tmp_path / "gmx_test_logger.log").read_text()
    assert "TEST" in text and "hello" in text


def test_logger_survives_invalid_settings(monkeypatch, fresh_settings):
    monkeypatch.setenv(ENV_LOG_LEVEL, "chatty")
    logger = create_logger("gmx_test_bad_env", "TEST")
    assert logger.level == logging.INFO
