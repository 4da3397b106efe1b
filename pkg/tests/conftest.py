import numpy as np
import pytest

import annuflow as af


@pytest.fixture(scope="session")
def params135():
    return af.validate(1.0, 3.0, 5.0, 1.0)


@pytest.fixture(scope="session")
def muc135(params135):
    return af.mu_c_closed(params135)


@pytest.fixture(scope="session")
def grid64():
    return af.build_grid(1.0, 3.0, 64)


@pytest.fixture(scope="session")
def grid48():
    return af.build_grid(1.0, 3.0, 48)


@pytest.fixture(scope="session")
def grid32():
    return af.build_grid(1.0, 3.0, 32)


@pytest.fixture(scope="session")
def eig_099(params135, muc135, grid48):
    mu = 0.99 * muc135
    pr = af.validate(1.0, 3.0, 5.0, mu)
    return pr, mu, af.leading_eigenpair(pr, mu, grid48)


@pytest.fixture(scope="session")
def report_099(eig_099, grid48):
    pr, mu, eig = eig_099
    mc = af.solve_G11(pr, mu, eig, grid48)
    l = af.lyapunov_coeff(pr, mu, eig, mc, grid48)
    return af.classify_and_build(pr, mu, eig, l, mc)
