import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ibex.nerfind import load_dictionary  # noqa: E402

GOLDEN_HTML = """<body>
 <h1>Samsung Galaxy S4</h1>
 <p>Id: <b>8806085725072
 <h1>Accessories
 <h2>Galaxy S4 Charging Cable</h2>
 4047443213525
</body>"""

GOLDEN_DUMP = """doc
  body
    h1*
      h1
        "Samsung Galaxy S4"
      p
        "Id:"
        b
          "8806085725072"
    h1*
      h1
        "Accessories"
      h2*
        h2
          "Galaxy S4 Charging Cable"
        "4047443213525\""""

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def names():
    return load_dictionary()


@pytest.fixture
def golden_html():
    return GOLDEN_HTML


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
