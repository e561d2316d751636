import pytest

from crlab.torus_example import enable_compile_cache

enable_compile_cache()


def pytest_collection_modifyitems(config, items):
    if "long" in (config.getoption("-m") or ""):
        return
    skip = pytest.mark.skip(reason="long run; select with -m long")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)
