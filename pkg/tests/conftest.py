import pytest

from threeprimes import lp, primes


@pytest.fixture(scope="session")
def window_1m():
    return primes.sieve(10**6)


@pytest.fixture(scope="session")
def window_pipeline():
    # covers W*N + b for the n = 1e6 + 1 transference run (N <= 1.1 n / W)
    return primes.sieve(1_100_200)


@pytest.fixture(scope="session")
def lp_table():
    return lp.certify_table()
