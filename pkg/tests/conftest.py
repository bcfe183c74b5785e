import sys

import numpy as np
import pytest

from grover_machine import machine, quantum


@pytest.fixture
def layout2():
    return quantum.RegisterLayout(2)


@pytest.fixture
def output_state(layout2):
    return quantum.apply_diffusion(quantum.apply_oracle(quantum.prepare_input(layout2)))


@pytest.fixture
def network():
    return machine.delta_network()


@pytest.fixture
def delta_machine(network):
    return machine.build_machine(network, 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
        terminalreporter.write_line(line)
