import pytest

from penaltydnnf import kernels

DEFAULT_SEED = 20011015


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=DEFAULT_SEED,
                     help="seed for the randomized suites")


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    before = kernels.backend()
    try:
        kernels.set_backend(request.param)
    except RuntimeError:
        pytest.skip("numba not installed")
    yield request.param
    kernels.set_backend(before)


# every circuit compiled anywhere in the run is checked for decomposability,
# and for smoothness when smoothing was requested
validity = {"checked": 0, "violations": []}


@pytest.fixture(autouse=True, scope="session")
def _check_every_compilation():
    from penaltydnnf import cli, compiler

    original = compiler.compile_clauses

    def checked(nvars, clauses, names=None, smooth=True, use_cache=True, stats=None):
        clauses = [tuple(cl) for cl in clauses]
        c = original(nvars, clauses, names, smooth, use_cache, stats)
        report = c.check()
        validity["checked"] += 1
        if not report.decomposable or (smooth and not report.smooth):
            validity["violations"].append((nvars, clauses, smooth))
        return c

    compiler.compile_clauses = checked
    cli.compile_clauses = checked
    yield validity
    compiler.compile_clauses = original
    cli.compile_clauses = original
    assert not validity["violations"], validity["violations"][:3]
