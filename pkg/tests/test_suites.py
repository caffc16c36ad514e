import numpy as np
import pytest

from fatdist.core import Tolerance
from fatdist.fat2 import holomorphic_tuple
from fatdist.suites import SUITES, run_suite


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes_and_is_deterministic(name):
    a = run_suite(name, 3, seed=11)
    b = run_suite(name, 3, seed=11)
    assert a.passed, str(a)
    assert a.to_dict() == b.to_dict()
    for s in a.info["stats"].values():
        assert s["min"] <= s["median"] <= s["max"]


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope", 1)


def test_file_context_tuple():
    rep = run_suite("deg2-identities", 4, ctx=holomorphic_tuple(2))
    assert rep.passed


def test_absurd_tolerance_fails():
    rep = run_suite("fat2-props", 3, tol=Tolerance(10.0))
    assert not rep.passed
    assert rep.failures[0].residual == np.inf
