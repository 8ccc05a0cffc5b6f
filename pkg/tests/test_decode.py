import numpy as np
import pytest

from conftest import code_from_rows, random_vector
from erasurelab.binmat import BinVector
from erasurelab.decode import (
    InconsistentInputError,
    ReceivedWord,
    back_substitute,
    hybrid_decode,
    is_stopping_set,
    ml_decode,
    oracle_decode,
    peel_decode,
    reduce_to_aprime,
    solve_pivots,
    split_by_erasure,
    triangularize,
)

SPC3 = [[1, 1, 1]]
CHAIN = [[1, 1, 0], [0, 1, 1]]
FOURCYCLE = [[1, 1], [1, 1]]
# stalls under peeling but has independent erased columns, so ML recovers
STALL_ML_OK = [[1, 1, 0], [0, 1, 1], [1, 0, 1], [1, 1, 1]]


def word(code, bits, erased):
    return ReceivedWord.from_full(BinVector.from_bits(bits), erased)


def test_split_no_erasures():
    code = code_from_rows(CHAIN)
    hk, syn = split_by_erasure(code, word(code, [1, 1, 0], []))
    assert hk.cols == 0
    assert syn.to_list() == [0, 1]


def test_split_zero_codeword_zero_syndrome():
    code = code_from_rows(CHAIN)
    _, syn = split_by_erasure(code, word(code, [0, 0, 0], [0, 2]))
    assert syn.weight() == 0


def test_split_spc():
    code = code_from_rows(SPC3)
    hk, syn = split_by_erasure(code, word(code, [1, 0, 0], [2]))
    assert hk.to_dense().to_lists() == [[1]]
    assert syn.to_list() == [1]


def test_peel_spc():
    code = code_from_rows(SPC3)
    res = peel_decode(code, word(code, [1, 0, 0], [2]))
    assert res.ok
    assert res.recovered.to_list() == [1, 0, 1]


def test_peel_chain():
    code = code_from_rows(CHAIN)
    # erasing the two endpoints leaves each check with one unknown
    res = peel_decode(code, word(code, [0, 0, 0], [0, 2]))
    assert res.ok
    assert res.recovered.to_list() == [0, 0, 0]
    # full erasure leaves no degree-1 check: the support is a stopping set
    res = peel_decode(code, word(code, [0, 0, 0], [0, 1, 2]))
    assert res.status == "it_stall"
    assert is_stopping_set(code, res.residual)


def test_peel_4cycle_stall():
    code = code_from_rows(FOURCYCLE)
    res = peel_decode(code, word(code, [0, 0], [0, 1]))
    assert res.status == "it_stall"
    assert set(res.residual) == {0, 1}
    assert is_stopping_set(code, res.residual)


def test_peel_inconsistent_input():
    # two checks force the erased bit to both 1 and 0: corrupted input
    code = code_from_rows([[1, 1], [1, 0]])
    with pytest.raises(InconsistentInputError):
        peel_decode(code, word(code, [0, 1], [0]))


def test_triangularize_lower_triangular_no_pivots():
    code = code_from_rows([[1, 0, 0], [1, 1, 0], [0, 1, 1]])
    hk, syn = split_by_erasure(code, word(code, [0, 0, 0], [0, 1, 2]))
    state = triangularize(hk, syn)
    assert state.pivots == []
    assert len(state.resolved) == 3


def test_triangularize_4cycle_one_pivot():
    code = code_from_rows(FOURCYCLE)
    hk, syn = split_by_erasure(code, word(code, [0, 0], [0, 1]))
    state = triangularize(hk, syn)
    assert len(state.pivots) == 1
    assert len(state.resolved) == 1


def test_reduce_4cycle():
    code = code_from_rows(FOURCYCLE)
    hk, syn = split_by_erasure(code, word(code, [0, 0], [0, 1]))
    state = triangularize(hk, syn)
    aprime, rhs = reduce_to_aprime(state)
    assert aprime.rows == 1 and aprime.cols == 1
    assert rhs.to_list() == [0]
    # the two columns are identical, so the surviving equation is degenerate
    assert aprime.to_lists() == [[0]]


def test_reduce_zero_pivots_empty_aprime():
    code = code_from_rows([[1, 0], [1, 1]])
    hk, syn = split_by_erasure(code, word(code, [0, 0], [0, 1]))
    state = triangularize(hk, syn)
    aprime, rhs = reduce_to_aprime(state)
    assert aprime.cols == 0
    assert len(rhs) == aprime.rows


def test_solve_pivots_trivial():
    from erasurelab.binmat import DenseBinMatrix

    values, r = solve_pivots(DenseBinMatrix.zeros(0, 0), BinVector(0))
    assert values is not None and len(values) == 0 and r == 0
    values, r = solve_pivots(DenseBinMatrix.from_rows([[1]]), BinVector(1))
    assert values.to_list() == [0] and r == 1


def test_back_substitute_stall_witness():
    code = code_from_rows(STALL_ML_OK)
    hk, syn = split_by_erasure(code, word(code, [0, 0, 0], [0, 1, 2]))
    state = triangularize(hk, syn)
    assert state.pivots  # peeling alone stalls here
    reduce_to_aprime(state)
    pivot_values, _ = solve_pivots(state.aprime, state.rhs_prime)
    assert pivot_values is not None
    values = back_substitute(state, pivot_values)
    assert set(values.values()) == {0}


def test_ml_hamming_independent_columns(hamming74):
    res = ml_decode(hamming74, word(hamming74, [0] * 7, [0, 1, 3]))
    assert res.ok
    assert res.recovered.weight() == 0


def test_ml_hamming_dependent_columns(hamming74):
    # columns at positions 0,1,2 are e1, e2, e1^e2
    res = ml_decode(hamming74, word(hamming74, [0] * 7, [0, 1, 2]))
    assert res.status == "rank_deficient"
    assert res.rank is not None and res.rank < 3


def test_ml_too_many_erasures(hamming74):
    res = ml_decode(hamming74, word(hamming74, [0] * 7, [0, 1, 2, 3]))
    assert res.status == "rank_deficient"


def test_hybrid_peelable_no_pivots():
    code = code_from_rows(SPC3)
    res = hybrid_decode(code, word(code, [1, 0, 0], [2]))
    assert res.ok
    assert res.stats.pivots == 0
    assert res.stats.peeled == 1


def test_hybrid_stall_then_ml():
    code = code_from_rows(STALL_ML_OK)
    res = hybrid_decode(code, word(code, [0, 0, 0], [0, 1, 2]))
    assert res.ok
    assert res.stats.pivots >= 1
    assert res.recovered.weight() == 0


def test_hybrid_4cycle_rank_deficient():
    code = code_from_rows(FOURCYCLE)
    res = hybrid_decode(code, word(code, [0, 0], [0, 1]))
    ml = ml_decode(code, word(code, [0, 0], [0, 1]))
    assert res.status == ml.status == "rank_deficient"


def test_oracle_matches_ml_small_random(rng):
    from erasurelab.ldpc import encode, sample_regular

    code = sample_regular(2, 4, 12, seed=5)
    for _ in range(300):
        u = random_vector(code.k, rng)
        cw = encode(code, u)
        nerase = int(rng.integers(0, 9))
        erased = rng.choice(12, size=nerase, replace=False).tolist()
        w = ReceivedWord.from_full(cw, erased)
        a, b = ml_decode(code, w), oracle_decode(code, w)
        assert a.status == b.status
        if a.ok:
            assert a.recovered == b.recovered == cw


def test_punctured_positions_always_erased():
    code = code_from_rows(CHAIN, punctured={0})
    res = ml_decode(code, ReceivedWord.from_full(BinVector(3), []))
    assert res.ok
    assert res.recovered.to_list() == [0, 0, 0]


def test_is_stopping_set():
    code = code_from_rows(FOURCYCLE)
    assert is_stopping_set(code, [0, 1])
    chain = code_from_rows(CHAIN)
    assert not is_stopping_set(chain, [0])
    assert is_stopping_set(chain, [])


def test_stats_system_shape():
    code = code_from_rows(STALL_ML_OK)
    res = ml_decode(code, word(code, [0, 0, 0], [0, 1, 2]))
    npiv = res.stats.pivots
    assert res.stats.ge_dim == npiv
    assert res.stats.system_shape == (4, 3)  # checks x erased positions


def test_erasure_of_nothing_is_identity(hamming74):
    rngl = np.random.default_rng(7)
    from erasurelab.ldpc import encode

    u = random_vector(4, rngl)
    cw = encode(hamming74, u)
    for fn in (peel_decode, ml_decode, hybrid_decode):
        res = fn(hamming74, ReceivedWord.from_full(cw, []))
        assert res.ok and res.recovered == cw
