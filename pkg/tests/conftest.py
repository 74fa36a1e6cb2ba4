from pathlib import Path

import pytest

from watpaths import parse_module

FIXTURES = Path(__file__).parent / "fixtures"

G1_WAT = (FIXTURES / "golden" / "g1.wat").read_text()
G2_WAT = (FIXTURES / "golden" / "g2.wat").read_text()


@pytest.fixture
def g1():
    return parse_module(G1_WAT, source_id="g1.wat")


@pytest.fixture
def g2():
    return parse_module(G2_WAT, source_id="g2.wat")


@pytest.fixture
def golden_dir():
    return FIXTURES / "golden"


@pytest.fixture
def extra_dir():
    return FIXTURES / "extra"


@pytest.fixture
def simd_dir():
    return FIXTURES / "simd"
