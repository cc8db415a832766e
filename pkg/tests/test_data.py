"""The shipped JSON data is exactly what the builders produce."""

from importlib import resources

import pytest

from clarify.envs import DOMAINS, ENVIRONMENTS
from clarify.schema import load_toolkit, serialize_toolkit
from clarify.simulator import dump_suite, load_suite
from clarify.suite import build_suite

DATA = resources.files("clarify").joinpath("data")


@pytest.mark.parametrize("domain", DOMAINS)
def test_shipped_toolkit_matches_env(domain):
    path = DATA.joinpath("toolkits", f"{domain}.json")
    assert path.read_text() == serialize_toolkit(ENVIRONMENTS[domain].toolkit())
    assert load_toolkit(path) == ENVIRONMENTS[domain].toolkit()


def test_shipped_suite_matches_builder():
    path = DATA.joinpath("scenarios", "suite.json")
    assert path.read_text() == dump_suite(build_suite())
    assert dump_suite(load_suite(path)) == dump_suite(build_suite())


def test_suite_checks_against_toolkits():
    for sc in build_suite():
        sc.check(ENVIRONMENTS[sc.domain].toolkit())
