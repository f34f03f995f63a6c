import pytest

from rmtdensity.models.schemas import EnsembleKind, EnsembleSpec


def make_spec(kind: str, n: int, alpha: float = 0.0) -> EnsembleSpec:
    return EnsembleSpec(kind=EnsembleKind(kind), alpha=alpha, n=n)


@pytest.fixture
def gue10() -> EnsembleSpec:
    return make_spec("gue", 10)


@pytest.fixture
def lue10() -> EnsembleSpec:
    return make_spec("lue", 10, alpha=0.5)
