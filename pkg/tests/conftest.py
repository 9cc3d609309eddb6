import logging

import numpy as np
import pytest

from slpindex import grammar_io

ABAB = """SLP 4 3
0 -> 'a'
1 -> 'b'
2 -> 0 1
3 -> 2 2
"""


@pytest.fixture(autouse=True)
def _quiet_layer_warnings():
    # small texts routinely have X_k > N; the warning is expected there
    logging.disable(logging.WARNING)
    yield
    logging.disable(logging.NOTSET)


@pytest.fixture
def abab():
    return grammar_io.loads(ABAB)


def lcp_table(text) -> np.ndarray:
    """L[i, j] = longest common prefix of text[i:] and text[j:], by the diagonal recurrence."""
    codes = np.array([ord(c) for c in text] if isinstance(text, str) else list(text), dtype=np.int64)
    n = len(codes)
    L = np.zeros((n + 1, n + 1), dtype=np.int32)
    for i in range(n - 1, -1, -1):
        eq = codes[i] == codes
        L[i, :n] = np.where(eq, L[i + 1, 1:n + 1] + 1, 0)
    return L[:n, :n]


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
