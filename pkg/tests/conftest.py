from __future__ import annotations

from pathlib import Path

import pytest

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"


@pytest.fixture
def program_src():
    def load(name: str) -> str:
        return (PROGRAMS / f"{name}.rtr").read_text(encoding="utf-8")
    return load
