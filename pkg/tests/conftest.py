import numpy as np
import pytest

from erasurelab.binmat import BinVector, DenseBinMatrix, SparseBinMatrix
from erasurelab.ldpc import LdpcCode, _generic_encoder_from_h


def code_from_rows(rowlists, punctured=frozenset()):
    """LdpcCode straight from explicit parity-check rows."""
    h = SparseBinMatrix.from_dense(DenseBinMatrix.from_rows(rowlists))
    encoder, k = _generic_encoder_from_h(h)
    return LdpcCode(h.cols, k, h, punctured=frozenset(punctured), encoder=encoder)


def random_vector(n, rng):
    return BinVector(n, int.from_bytes(rng.bytes((n + 7) // 8 or 1), "little") & ((1 << n) - 1))


@pytest.fixture
def hamming74():
    # columns of H are the binary expansions of 1..7
    rows = [[(c + 1) >> b & 1 for c in range(7)] for b in range(3)]
    return code_from_rows(rows)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
