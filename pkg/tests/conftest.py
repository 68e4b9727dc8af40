import pytest

from tcfsim import SILICON, DesignParams, build_clamped_beam, build_frame_layout
from tcfsim.layout import resonator_beam


@pytest.fixture
def design():
    return DesignParams()


@pytest.fixture
def silicon():
    return SILICON


@pytest.fixture
def beam(design, silicon):
    return resonator_beam(design, silicon)


@pytest.fixture
def cc_model(beam):
    return build_clamped_beam(beam, 16)


@pytest.fixture
def frame(design, silicon):
    return build_frame_layout(design, silicon, 16)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)
