"""BEC decoders: iterative peeling, structured-GE ML decoding with pivot
inactivation, the hybrid (peel-then-ML) decoder, and the dense-GE oracle.

The structured ML decoder triangularizes the erased-column submatrix by
diagonal extension, inactivating a pivot whenever extension stalls, then
rewrites every resolved unknown as an XOR of pivots (symbolic substitution
ledger) and runs dense GE only on the small residual pivot system.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .binmat import (
    BinVector,
    DenseBinMatrix,
    SparseBinMatrix,
    dense_gauss_solve,
)


class InconsistentInputError(ValueError):
    """The same unknown was forced to both 0 and 1: corrupted input, not an
    erasure-decoding case."""


class InternalConsistencyError(AssertionError):
    """Recovered word failed re-verification; decoder bug trap."""


@dataclass
class ReceivedWord:
    """Channel output: the known/erased split of a codeword."""

    n: int
    values: BinVector  # known symbols, in increasing position order
    erased: tuple  # ordered erased positions (includes punctured ones)

    def __post_init__(self):
        self.erased = tuple(sorted(set(self.erased)))
        if len(self.values) != self.n - len(self.erased):
            raise ValueError("values length must equal n - |erased|")

    @classmethod
    def from_full(cls, full: BinVector, erased) -> "ReceivedWord":
        erased = tuple(sorted(set(erased)))
        if full.bits == 0:
            return cls(full.n, BinVector(full.n - len(erased)), erased)
        eset = set(erased)
        bits = [full[i] for i in range(full.n) if i not in eset]
        return cls(full.n, BinVector.from_bits(bits), erased)

    def known_positions(self) -> list:
        eset = set(self.erased)
        return [i for i in range(self.n) if i not in eset]

    def known_array(self) -> list:
        """Length-n list with known values filled in and None at erasures."""
        out = [None] * self.n
        for val, pos in zip(self.values.to_list(), self.known_positions()):
            out[pos] = val
        return out


@dataclass
class DecodeStats:
    peeled: int = 0
    pivots: int = 0
    ge_dim: int = 0
    system_shape: tuple = ()


@dataclass
class DecodeResult:
    status: str  # 'success' | 'it_stall' | 'rank_deficient'
    recovered: BinVector = None
    residual: tuple = ()
    rank: int = None
    stats: DecodeStats = field(default_factory=DecodeStats)

    @property
    def ok(self) -> bool:
        return self.status == "success"


@dataclass
class TriangularizationState:
    """Permuted block decomposition of the erased-column system.

    ``resolved`` holds the diagonal-extension order; ``pivots`` the
    inactivated unknowns; ``anchor[u]`` the row consumed to resolve u.
    The substitution ledger (per-unknown pivot bitmask and constant bit)
    plus ``aprime``/``rhs_prime`` are filled by reduce_to_aprime.
    """

    matrix: SparseBinMatrix
    syndrome: BinVector
    resolved: list
    pivots: list
    anchor: dict
    remaining_rows: list
    expr_masks: list = None  # per unknown, XOR-set over pivots as a bitmask
    expr_consts: bytearray = None
    aprime: DenseBinMatrix = None
    rhs_prime: BinVector = None


def split_by_erasure(code, word: ReceivedWord):
    """Split H by the erasure pattern: columns of erased positions plus the
    syndrome contributed by the known symbols."""
    h = code.h
    if word.n != h.cols:
        raise ValueError(f"word length {word.n} != code length {h.cols}")
    ne = len(word.erased)
    pos = [-1] * word.n
    for i, c in enumerate(word.erased):
        pos[c] = i
    hk_rows = []
    col_adj = [[] for _ in range(ne)]
    syn_bits = 0
    if word.values.bits == 0:
        # all known symbols are zero: syndrome vanishes
        for r, cs in enumerate(h.row_adj):
            local = [pos[c] for c in cs if pos[c] >= 0]
            hk_rows.append(local)
            for li in local:
                col_adj[li].append(r)
    else:
        known = word.known_array()
        for r, cs in enumerate(h.row_adj):
            local = []
            par = 0
            for c in cs:
                li = pos[c]
                if li >= 0:
                    local.append(li)
                elif known[c]:
                    par ^= 1
            hk_rows.append(local)
            for li in local:
                col_adj[li].append(r)
            if par:
                syn_bits |= 1 << r
    hkbar = SparseBinMatrix._raw(h.rows, ne, hk_rows, col_adj)
    return hkbar, BinVector(h.rows, syn_bits)


def _peel_core(code, word: ReceivedWord):
    """Shared peeling loop. Returns (known, is_unknown, remaining, peeled)."""
    h = code.h
    is_unknown = bytearray(word.n)
    for c in word.erased:
        is_unknown[c] = 1
    known = [0] * word.n if word.values.bits == 0 else word.known_array()
    rowcnt = [0] * h.rows
    rowpar = [0] * h.rows
    for r, cs in enumerate(h.row_adj):
        par = 0
        cnt = 0
        for c in cs:
            if is_unknown[c]:
                cnt += 1
            elif known[c]:
                par ^= 1
        rowcnt[r] = cnt
        rowpar[r] = par

    queue = deque(r for r in range(h.rows) if rowcnt[r] == 1)
    peeled = 0
    remaining = len(word.erased)
    while queue:
        r = queue.popleft()
        if rowcnt[r] != 1:
            continue
        u = next(c for c in h.row_adj[r] if is_unknown[c])
        val = rowpar[r]
        known[u] = val
        is_unknown[u] = 0
        peeled += 1
        remaining -= 1
        for r2 in h.col_adj[u]:
            rowcnt[r2] -= 1
            if val:
                rowpar[r2] ^= 1
            if rowcnt[r2] == 1:
                queue.append(r2)

    for r in range(h.rows):
        if rowcnt[r] == 0 and rowpar[r]:
            raise InconsistentInputError(f"check row {r} violated by known symbols")
    return known, is_unknown, remaining, peeled


def peel_decode(code, word: ReceivedWord) -> DecodeResult:
    """Iteratively resolve erased positions appearing alone in some check."""
    word = _with_punctured(code, word)
    if not word.erased:
        return _finish(code, word, word.known_array(), DecodeStats())
    known, is_unknown, remaining, peeled = _peel_core(code, word)
    stats = DecodeStats(peeled=peeled)
    if remaining:
        residual = tuple(c for c in word.erased if is_unknown[c])
        return DecodeResult("it_stall", residual=residual, stats=stats)
    return _finish(code, word, known, stats)


def max_degree_pivot(unresolved, coldeg):
    """Default inactivation strategy: max residual degree, lowest index ties."""
    best = -1
    best_deg = -1
    for u in unresolved:
        d = coldeg[u]
        if d > best_deg or (d == best_deg and u < best):
            best = u
            best_deg = d
    return best


def triangularize(
    hkbar: SparseBinMatrix, syndrome: BinVector, pivot_strategy=max_degree_pivot
) -> TriangularizationState:
    """Greedy diagonal extension with pivot inactivation on stalls.

    Terminates with every unknown either resolved (lower-triangular part)
    or designated a pivot for the dense stage.
    """
    nrows, ncols = hkbar.rows, hkbar.cols
    UNRESOLVED, RESOLVED, PIVOT = 0, 1, 2
    status = bytearray(ncols)
    active = bytearray([1]) * nrows
    row_adj, col_adj = hkbar.row_adj, hkbar.col_adj
    # unresolved (non-pivot) unknowns per active row; active rows per column
    rowcnt = [len(cs) for cs in row_adj]
    coldeg = [len(rs) for rs in col_adj]
    unresolved = set(range(ncols))
    resolved = []
    pivots = []
    anchor = {}
    queue = deque(r for r in range(nrows) if rowcnt[r] == 1)

    def retire_unknown(u):
        # u leaves the unresolved pool; shrink row counters
        for r in col_adj[u]:
            if active[r]:
                rowcnt[r] -= 1
                if rowcnt[r] == 1:
                    queue.append(r)

    while unresolved:
        while queue:
            r = queue.popleft()
            if not active[r] or rowcnt[r] != 1:
                continue
            for c in row_adj[r]:
                if status[c] == UNRESOLVED:
                    u = c
                    break
            status[u] = RESOLVED
            unresolved.discard(u)
            anchor[u] = r
            resolved.append(u)
            active[r] = 0
            for c in row_adj[r]:
                coldeg[c] -= 1
            retire_unknown(u)
        if not unresolved:
            break
        u = pivot_strategy(unresolved, coldeg)
        status[u] = PIVOT
        unresolved.discard(u)
        pivots.append(u)
        retire_unknown(u)

    remaining = [r for r in range(nrows) if active[r]]
    return TriangularizationState(
        hkbar, syndrome, resolved, pivots, anchor, remaining
    )


def reduce_to_aprime(state: TriangularizationState):
    """Rewrite every resolved unknown as XOR of pivots plus a constant, then
    express the remaining check rows purely over pivots: A'·pivots = rhs'."""
    ncols = state.matrix.cols
    pid = [-1] * ncols
    for i, p in enumerate(state.pivots):
        pid[p] = i
    masks = [0] * ncols
    consts = bytearray(ncols)
    radj = state.matrix.row_adj
    syn_bits = state.syndrome.bits
    anchor = state.anchor
    for u in state.resolved:
        r = anchor[u]
        mask = 0
        const = (syn_bits >> r) & 1
        for c in radj[r]:
            if c == u:
                continue
            i = pid[c]
            if i >= 0:
                mask ^= 1 << i
            else:
                mask ^= masks[c]
                const ^= consts[c]
        masks[u] = mask
        consts[u] = const

    arows = []
    rhs_bits = 0
    for i, r in enumerate(state.remaining_rows):
        mask = 0
        const = (syn_bits >> r) & 1
        for c in radj[r]:
            j = pid[c]
            if j >= 0:
                mask ^= 1 << j
            else:
                mask ^= masks[c]
                const ^= consts[c]
        arows.append(mask)
        if const:
            rhs_bits |= 1 << i
    state.expr_masks = masks
    state.expr_consts = consts
    state.aprime = DenseBinMatrix(len(arows), len(state.pivots), arows)
    state.rhs_prime = BinVector(len(arows), rhs_bits)
    return state.aprime, state.rhs_prime


def solve_pivots(aprime: DenseBinMatrix, rhs_prime: BinVector):
    """Dense GE on the small pivot system; returns values or a deficiency."""
    out = dense_gauss_solve(aprime, rhs_prime)
    if not out.consistent:
        raise InconsistentInputError("pivot system inconsistent")
    if not out.unique:
        return None, out.rank
    return out.solution, out.rank


def back_substitute(state: TriangularizationState, pivot_values: BinVector) -> dict:
    """Assign all unknowns from the solved pivots via the substitution ledger."""
    values = {}
    pbits = pivot_values.bits
    for i, p in enumerate(state.pivots):
        values[p] = (pbits >> i) & 1
    masks, consts = state.expr_masks, state.expr_consts
    for u in state.resolved:
        values[u] = consts[u] ^ ((masks[u] & pbits).bit_count() & 1)
    return values


def ml_decode(code, word: ReceivedWord, pivot_strategy=max_degree_pivot) -> DecodeResult:
    """Structured-GE ML decoding; succeeds iff the erased columns of H are
    linearly independent, exactly matching oracle_decode."""
    word = _with_punctured(code, word)
    if not word.erased:
        return _finish(code, word, word.known_array(), DecodeStats())
    hkbar, syndrome = split_by_erasure(code, word)
    state = triangularize(hkbar, syndrome, pivot_strategy)
    reduce_to_aprime(state)
    pivot_values, ge_rank = solve_pivots(state.aprime, state.rhs_prime)
    stats = DecodeStats(
        peeled=len(state.resolved),
        pivots=len(state.pivots),
        ge_dim=len(state.pivots),
        system_shape=(hkbar.rows, hkbar.cols),
    )
    if pivot_values is None:
        return DecodeResult("rank_deficient", rank=ge_rank + len(state.resolved), stats=stats)
    local = back_substitute(state, pivot_values)
    known = word.known_array()
    for li, pos in enumerate(word.erased):
        known[pos] = local[li]
    return _finish(code, word, known, stats)


def hybrid_decode(code, word: ReceivedWord, pivot_strategy=max_degree_pivot) -> DecodeResult:
    """Peel first; on a stall, ML-decode the residual stopping set with the
    partially updated syndrome. Success set identical to ml_decode."""
    word = _with_punctured(code, word)
    first = peel_decode(code, word)
    if first.status != "it_stall":
        return first
    # peeled values become known symbols; ML runs on the residual stopping set
    peeled_word, peeled_count = _peel_values(code, word)
    res = ml_decode(code, peeled_word, pivot_strategy)
    res.stats.peeled += peeled_count
    return res


def oracle_decode(code, word: ReceivedWord) -> DecodeResult:
    """Brute-force dense GE over all erased columns; ground truth."""
    word = _with_punctured(code, word)
    if not word.erased:
        return _finish(code, word, word.known_array(), DecodeStats())
    hkbar, syndrome = split_by_erasure(code, word)
    out = dense_gauss_solve(hkbar.to_dense(), syndrome)
    stats = DecodeStats(ge_dim=len(word.erased), system_shape=(hkbar.rows, hkbar.cols))
    if not out.consistent:
        raise InconsistentInputError("erasure system inconsistent")
    if not out.unique:
        return DecodeResult("rank_deficient", rank=out.rank, stats=stats)
    known = word.known_array()
    for li, pos in enumerate(word.erased):
        known[pos] = out.solution[li]
    return _finish(code, word, known, stats)


def is_stopping_set(code, positions) -> bool:
    """Every check row touching the set touches it at least twice."""
    pset = set(positions)
    touched = {}
    for c in pset:
        for r in code.h.col_adj[c]:
            touched[r] = touched.get(r, 0) + 1
    return all(cnt >= 2 for cnt in touched.values())


def _with_punctured(code, word: ReceivedWord) -> ReceivedWord:
    punct = getattr(code, "punctured", frozenset())
    if not punct or set(punct) <= set(word.erased):
        return word
    merged = set(word.erased) | set(punct)
    known = word.known_array()
    bits = [known[i] for i in range(word.n) if i not in merged]
    return ReceivedWord(word.n, BinVector.from_bits(bits), tuple(sorted(merged)))


def _peel_values(code, word: ReceivedWord):
    """Run peeling and return a word where peeled positions became known."""
    known, is_unknown, _, peeled = _peel_core(code, word)
    residual = tuple(c for c in word.erased if is_unknown[c])
    bits = [known[i] for i in range(word.n) if not is_unknown[i]]
    return ReceivedWord(word.n, BinVector.from_bits(bits), residual), peeled


def _finish(code, word: ReceivedWord, known, stats: DecodeStats) -> DecodeResult:
    bits = 0
    for i, v in enumerate(known):
        if v:
            bits |= 1 << i
    recovered = BinVector(word.n, bits)
    # bug trap: any success must satisfy every parity check (trivial at zero)
    if bits:
        for r, cs in enumerate(code.h.row_adj):
            par = 0
            for c in cs:
                par ^= (bits >> c) & 1
            if par:
                raise InternalConsistencyError(f"check row {r} violated after decode")
    return DecodeResult("success", recovered=recovered, stats=stats)
