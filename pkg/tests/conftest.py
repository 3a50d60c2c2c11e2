import pytest

from lie_prelim.expr import FunctionSignature, make_env
from lie_prelim.verify import builtin_class


@pytest.fixture(scope="session")
def gen_diff():
    return builtin_class("gen-diff")


@pytest.fixture(scope="session")
def heat():
    return builtin_class("heat")


@pytest.fixture(scope="session")
def linear_cls():
    return builtin_class("linear-evolution")


@pytest.fixture(scope="session")
def base_env(gen_diff):
    env = dict(gen_diff.env)
    for sig in (FunctionSignature("tau", ("t", "x", "u")),
                FunctionSignature("xi", ("t", "x", "u")),
                FunctionSignature("eta", ("t", "x", "u")),
                FunctionSignature("h", ("u",)),
                FunctionSignature("ftilde", ("w",)),
                FunctionSignature("gtilde", ("w",))):
        env[sig.name] = sig
    return env
