import itertools

import pytest

from citelens.service import ReadingService


class TickingClock:
    """Deterministic wall clock: each call advances one second."""

    def __init__(self, start=1_700_000_000.0):
        self._counter = itertools.count()
        self._start = start

    def __call__(self) -> float:
        return self._start + next(self._counter)


@pytest.fixture
def clock():
    return TickingClock()


@pytest.fixture
def service(tmp_path, clock):
    return ReadingService(str(tmp_path / "data"), fsync=False, clock=clock)


@pytest.fixture
def service_factory(tmp_path, clock):
    counter = itertools.count()

    def make(subdir=None, **kwargs):
        name = subdir or f"data{next(counter)}"
        kwargs.setdefault("fsync", False)
        kwargs.setdefault("clock", clock)
        return ReadingService(str(tmp_path / name), **kwargs)

    return make
