"""
Runtime settings.

Defaults come from environment variables, the CLI overrides them per invocation.
Overrides are scoped with a context variable so concurrent queries keep their own caps.
"""

import contextlib
import contextvars
import dataclasses
import logging
import os

logger = logging.getLogger(__name__)


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}, using {default}")
        return default


@dataclasses.dataclass(frozen=True)
class Settings:
    max_generators: int = 20000
    max_subsets: int = 256
    seed: int = 42
    sample_count: int = 200
    log_level: str = 'WARNING'

    @classmethod
    def from_environment(cls):
        return cls(
            max_generators=_env_int('FARKAS_MAX_GENERATORS', cls.max_generators),
            max_subsets=_env_int('FARKAS_MAX_SUBSETS', cls.max_subsets),
            seed=_env_int('FARKAS_SEED', cls.seed),
            sample_count=_env_int('FARKAS_SAMPLE_COUNT', cls.sample_count),
            log_level=os.environ.get('FARKAS_LOG_LEVEL', cls.log_level).upper(),
        )


_active = contextvars.ContextVar('farkascert_settings', default=None)


def current():
    """Settings in effect for the calling context"""
    settings = _active.get()
    if settings is None:
        settings = Settings.from_environment()
        _active.set(settings)
    return settings


@contextlib.contextmanager
def override(**changes):
    """Temporarily replace some settings, e.g. ``with override(max_subsets=8): ...``"""
    changes = {k: v for k, v in changes.items() if v is not None}
    token = _active.set(dataclasses.replace(current(), **changes))
    try:
        yield _active.get()
    finally:
        _active.reset(token)
