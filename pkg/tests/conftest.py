import numpy as np
import pytest

from orlicz_radius.radius import Weight


def rand_matrix(rng, n, scale=1.0):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * m


def rand_hermitian(rng, n, scale=1.0):
    m = rand_matrix(rng, n, scale)
    return (m + m.conj().T) / 2


def rand_psd(rng, n, scale=1.0):
    g = rand_matrix(rng, n)
    m = g @ g.conj().T
    return scale * (m + m.conj().T) / 2


def rand_weight(rng, n, geq_one=False):
    m = rand_psd(rng, n)
    m = m + 1e-3 * np.linalg.norm(m, 2) * np.eye(n)
    if geq_one:
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < 1.0:
            m = m + (1.0 - lo) * np.eye(n)
    return Weight.from_matrix((m + m.conj().T) / 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
