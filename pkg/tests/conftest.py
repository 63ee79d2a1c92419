import math

import numpy as np
import pytest

from choiext import linalg


@pytest.fixture(params=linalg.available_backends())
def backend(request):
    """Run a test once per available Jacobi kernel."""
    prev = linalg.BACKEND
    linalg.set_backend(request.param)
    yield request.param
    linalg.set_backend(prev)


def random_hermitian(rng, n, scale=1.0):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (m + m.conj().T) / 2


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, n, rank=None):
    g = rng.normal(size=(n, rank or n)) + 1j * rng.normal(size=(n, rank or n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_separable(rng, dA, dB, terms=4):
    p = rng.dirichlet(np.ones(terms))
    return sum(pi * np.kron(random_density(rng, dA), random_density(rng, dB)) for pi in p)


def random_ppt_state(rng, d=3):
    """Random PPT state: a separable state mixed with the TILES bound entangled state."""
    from choiext.upb import tiles, upb_complement_state

    w = rng.uniform()
    return w * upb_complement_state(tiles()).matrix + (1 - w) * random_separable(rng, d, d)


HALF_PI = math.pi / 2


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
