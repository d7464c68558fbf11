import numpy as np
import pytest

from viterbi_arq.convcode import CodeSpec, Trellis, build_trellis


@pytest.fixture(scope="session")
def code57() -> CodeSpec:
    return CodeSpec.from_octal("5,7")


@pytest.fixture(scope="session")
def trellis57(code57: CodeSpec) -> Trellis:
    return build_trellis(code57)


@pytest.fixture(scope="session")
def trellis577() -> Trellis:
    return build_trellis(CodeSpec.from_octal("5,7,7"))


@pytest.fixture(scope="session")
def trellis2335() -> Trellis:
    return build_trellis(CodeSpec.from_octal("23,35"))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)

