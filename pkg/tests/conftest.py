"""
Shared fixtures. The core modules import each other flat, the way
run_qpk.py loads them, so core/ goes on sys.path.
"""

import os
import random
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(ROOT, "core"))

from posets import antichain, chain, finite_poset, omega_chain  # noqa: E402
from settings import reload_settings  # noqa: E402


@pytest.fixture
def chain3():
    return finite_poset("chain3", ["a", "b", "c"], [("b", "a"), ("c", "b")])


@pytest.fixture
def antichain2():
    return antichain(2)


@pytest.fixture
def omega():
    return omega_chain()


@pytest.fixture
def diamond():
    """bottom below left and right, both below top."""
    return finite_poset("diamond", ["top", "left", "right", "bottom"],
                        [("left", "top"), ("right", "top"), ("bottom", "left"), ("bottom", "right")])


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def isolated_settings(tmp_path, monkeypatch):
    """Settings with logs written under a temporary directory."""
    monkeypatch.setenv("QPK_LOG_DIR", str(tmp_path / "logs"))
    settings = reload_settings()
    yield settings
    monkeypatch.delenv("QPK_LOG_DIR", raising=False)
    reload_settings()


@pytest.fixture
def chain4():
    return chain(4)
