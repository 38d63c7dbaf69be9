# -*- coding: utf-8 -*-
import os
import tempfile
from shutil import rmtree

import pytest

from pystein import curie_weiss, monomer_dimer
from pystein.limit_law import LimitLaw


@pytest.fixture(
    params=[(1, 0.5), (1, 1.0), (2, 1 / 12), (3, 1.0)],
    ids=["normal", "gauss_a1", "quartic", "sextic"],
)
def law(request):
    k, a = request.param
    return LimitLaw(k, a)


@pytest.fixture
def normal():
    return LimitLaw(1, 0.5)


@pytest.fixture
def quartic():
    return LimitLaw(2, 1 / 12)


@pytest.fixture(params=[-5.0, -1.0, 0.0, 1.0, 5.0, 8.0], ids=lambda z: f"z={z:g}")
def threshold(request):
    return request.param


@pytest.fixture(params=[2, 3, 6, 9], ids=lambda n: f"n={n}")
def small_n(request):
    return request.param


@pytest.fixture(params=[100, 400, 1600], ids=lambda n: f"n={n}")
def large_n(request):
    return request.param


@pytest.fixture(scope="session")
def critical():
    return monomer_dimer.critical_constants()


@pytest.fixture
def cw_diag():
    return curie_weiss.pair_diagnostics(100)


@pytest.fixture
def output_dir():
    odir = tempfile.mkdtemp(prefix="pystein_")
    yield odir
    try:
        rmtree(odir)
    except OSError:
        pass


@pytest.fixture
def output_file(output_dir):
    return os.path.join(output_dir, "{step}.{format}")
