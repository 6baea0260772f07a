"""Session-wide fixtures: the big counting tables are built exactly once."""

import pytest

from treedag.exact_count import compacted_table, relaxed_table


@pytest.fixture(scope="session")
def relaxed_diagonal_1000():
    table = relaxed_table(1000, mode="rolling-row")
    return {n: table.value(n, n) for n in range(1, 1001)}


@pytest.fixture(scope="session")
def compacted_diagonal_1000():
    table = compacted_table(1000, mode="rolling-row")
    return {n: table.value(n, n) for n in range(1, 1001)}
