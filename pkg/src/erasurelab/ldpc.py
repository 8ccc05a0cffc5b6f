"""LDPC code constructions and encoders: regular ensemble sampling, GeIRA
repeat-accumulate codes, protograph lifting with puncturing, and
rate-compatible puncturing of parity bits."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .binmat import BinVector, DenseBinMatrix, SparseBinMatrix, dense_from_text, dense_to_text


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class GeiraSpec:
    k: int
    n: int
    taps: frozenset  # feedback polynomial exponents, e.g. {0,1,4,10,20}
    wc: int  # column weight of the information part
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "taps", frozenset(self.taps))
        m = self.n - self.k
        if 0 not in self.taps:
            raise ConstructionError("tap set must contain 0")
        if max(self.taps) >= m:
            raise ConstructionError(f"tap {max(self.taps)} exceeds n-k-1 = {m - 1}")
        if self.wc < 2:
            raise ConstructionError("column weight must be >= 2")


@dataclass(frozen=True)
class Protograph:
    base: tuple  # tuple of row tuples; entries are edge multiplicities
    punctured_cols: frozenset = frozenset()
    lift: int = 1

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(tuple(r) for r in self.base))
        object.__setattr__(self, "punctured_cols", frozenset(self.punctured_cols))
        if any(e < 0 for row in self.base for e in row):
            raise ConstructionError("base matrix entries must be >= 0")
        if self.n_transmitted_base <= 0 or not (0 <= self.design_rate < 1):
            raise ConstructionError("design rate must lie in [0,1)")

    @property
    def n_checks(self):
        return len(self.base)

    @property
    def n_vars(self):
        return len(self.base[0])

    @property
    def n_transmitted_base(self):
        return self.n_vars - len(self.punctured_cols)

    @property
    def design_rate(self):
        return (self.n_vars - self.n_checks) / self.n_transmitted_base


class _GeiraEncoder:
    """Forward substitution through the accumulator: O(n * taps)."""

    def __init__(self, hu_masks, taps, k, m):
        self.hu_masks = hu_masks  # per parity row, mask over the k info bits
        self.taps = sorted(taps)
        self.k = k
        self.m = m

    def encode(self, u: BinVector) -> BinVector:
        bits = u.bits
        out = bits
        parity = 0
        for r in range(self.m):
            p = (self.hu_masks[r] & bits).bit_count() & 1
            for t in self.taps:
                if t and r - t >= 0:
                    p ^= (parity >> (r - t)) & 1
            if p:
                parity |= 1 << r
        return BinVector(self.k + self.m, out | (parity << self.k))


class _GenericEncoder:
    """Solves H·c = 0 for the pivot positions given the info positions,
    using the reduced row echelon form of H computed at build time."""

    def __init__(self, n, info_positions, pivot_positions, pmap):
        self.n = n
        self.info_positions = info_positions
        self.pivot_positions = pivot_positions
        self.pmap = pmap  # per pivot, mask over info bits (in info order)

    def encode(self, u: BinVector) -> BinVector:
        bits = 0
        for i, pos in enumerate(self.info_positions):
            if u[i]:
                bits |= 1 << pos
        ub = u.bits
        for i, pos in enumerate(self.pivot_positions):
            if (self.pmap[i] & ub).bit_count() & 1:
                bits |= 1 << pos
        return BinVector(self.n, bits)


@dataclass
class LdpcCode:
    n: int
    k: int
    h: SparseBinMatrix
    punctured: frozenset = frozenset()
    encoder: object = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.punctured = frozenset(self.punctured)
        if self.h.cols != self.n:
            raise ConstructionError("H must have n columns")
        if any(not rs for rs in self.h.col_adj):
            raise ConstructionError("every column of H must be nonzero")
        if any(not (0 <= p < self.n) for p in self.punctured):
            raise ConstructionError("punctured positions out of range")

    @property
    def transmitted(self):
        return [i for i in range(self.n) if i not in self.punctured]

    @property
    def n_transmitted(self):
        return self.n - len(self.punctured)

    @property
    def rate(self):
        return self.k / self.n_transmitted


def _generic_encoder_from_h(h: SparseBinMatrix):
    """RREF of H; free columns become the information set."""
    dense = h.to_dense()
    words = list(dense.row_words)
    nr, nc = dense.rows, dense.cols
    prow = 0
    pivot_cols = []
    for col in range(nc):
        if prow == nr:
            break
        bit = 1 << col
        sel = -1
        for r in range(prow, nr):
            if words[r] & bit:
                sel = r
                break
        if sel < 0:
            continue
        words[prow], words[sel] = words[sel], words[prow]
        pw = words[prow]
        for r in range(nr):
            if r != prow and words[r] & bit:
                words[r] ^= pw
        pivot_cols.append(col)
        prow += 1
    pivot_set = set(pivot_cols)
    info = [c for c in range(nc) if c not in pivot_set]
    # x_pivot[i] = XOR over info bits present in RREF row i
    pmap = []
    for i in range(len(pivot_cols)):
        mask = 0
        w = words[i]
        for j, c in enumerate(info):
            if (w >> c) & 1:
                mask |= 1 << j
        pmap.append(mask)
    k = len(info)
    return _GenericEncoder(nc, info, pivot_cols, pmap), k


def encode(code: LdpcCode, u: BinVector) -> BinVector:
    if code.encoder is None:
        raise ConstructionError("code has no encoder")
    if len(u) != code.k:
        raise ValueError(f"message length {len(u)} != k = {code.k}")
    return code.encoder.encode(u)


def sample_regular(dv: int, dc: int, n: int, seed: int = 0) -> LdpcCode:
    """Configuration-model sample of the (dv, dc) regular ensemble with
    post-hoc edge swaps removing parallel edges (and short cycles at small n)."""
    if (n * dv) % dc:
        raise ConstructionError(f"n*dv = {n * dv} not divisible by dc = {dc}")
    m = n * dv // dc
    rng = np.random.default_rng(seed)
    ne = n * dv
    vn = np.repeat(np.arange(n), dv)
    for _ in range(50):
        cn = np.repeat(np.arange(m), dc)
        rng.shuffle(cn)
        edges = list(zip(vn.tolist(), cn.tolist()))
        if _remove_parallel_edges(edges, rng):
            break
    else:
        raise ConstructionError("could not remove parallel edges")
    if n <= 256:
        _reduce_4cycles(edges, rng, max_swaps=10 * ne)
    h = SparseBinMatrix.from_entries(m, n, [(c, v) for v, c in edges])
    encoder, k = _generic_encoder_from_h(h)
    return LdpcCode(n, k, h, encoder=encoder, meta={"dv": dv, "dc": dc, "seed": seed})


def _remove_parallel_edges(edges, rng, max_iters=200000) -> bool:
    from collections import Counter

    cnt = Counter(edges)
    pending = []
    seen = Counter()
    for i, e in enumerate(edges):
        seen[e] += 1
        if seen[e] > 1:
            pending.append(i)
    ne = len(edges)
    iters = 0
    while pending:
        iters += 1
        if iters > max_iters:
            return False
        i = pending[-1]
        e = edges[i]
        if cnt[e] == 1:
            pending.pop()
            continue
        j = int(rng.integers(ne))
        v, c = e
        v2, c2 = edges[j]
        if j == i or v == v2 or c == c2:
            continue
        ne1, ne2 = (v, c2), (v2, c)
        if cnt[ne1] or cnt[ne2]:
            continue
        cnt[e] -= 1
        cnt[edges[j]] -= 1
        cnt[ne1] += 1
        cnt[ne2] += 1
        edges[i] = ne1
        edges[j] = ne2
        pending.pop()
    return not any(v > 1 for v in cnt.values())


def _reduce_4cycles(edges, rng, max_swaps):
    """Bounded-effort pass breaking pairs of columns sharing two rows."""
    from collections import Counter

    n = max(v for v, _ in edges) + 1
    colmask = [0] * n
    for v, c in edges:
        colmask[v] |= 1 << c
    cnt = Counter(edges)
    swaps = 0
    for a in range(n):
        if swaps >= max_swaps:
            break
        for b in range(a + 1, n):
            inter = colmask[a] & colmask[b]
            if inter.bit_count() < 2 or swaps >= max_swaps:
                continue
            c = (inter & -inter).bit_length() - 1
            i = edges.index((b, c))
            for _ in range(20):
                j = int(rng.integers(len(edges)))
                v2, c2 = edges[j]
                if v2 in (a, b) or c2 == c:
                    continue
                ne1, ne2 = (b, c2), (v2, c)
                if cnt[ne1] or cnt[ne2]:
                    continue
                cnt[(b, c)] -= 1
                cnt[(v2, c2)] -= 1
                cnt[ne1] += 1
                cnt[ne2] += 1
                edges[i] = ne1
                edges[j] = ne2
                colmask[b] ^= (1 << c) | (1 << c2)
                colmask[v2] ^= (1 << c) | (1 << c2)
                swaps += 1
                break


def build_geira(spec: GeiraSpec) -> LdpcCode:
    """H = [H_u | H_p]: pseudo-random info part with balanced row weights and
    a banded accumulator defined by the feedback taps."""
    k, n, m = spec.k, spec.n, spec.n - spec.k
    rng = np.random.default_rng(spec.seed)
    load = np.zeros(m, dtype=int)
    hu_cols = []
    for _ in range(k):
        # least-loaded rows with seed-driven tie-breaking
        priority = load + rng.random(m)
        rows = np.argpartition(priority, spec.wc)[: spec.wc]
        hu_cols.append(sorted(int(r) for r in rows))
        load[rows] += 1
    entries = []
    for j, rows in enumerate(hu_cols):
        for r in rows:
            entries.append((r, j))
    taps = sorted(spec.taps)
    for r in range(m):
        for t in taps:
            if r - t >= 0:
                entries.append((r, k + r - t))
    h = SparseBinMatrix.from_entries(m, n, entries)
    hu_masks = [0] * m
    for r, j in entries:
        if j < k:
            hu_masks[r] |= 1 << j
    encoder = _GeiraEncoder(hu_masks, taps, k, m)
    return LdpcCode(n, k, h, encoder=encoder, meta={"geira": spec})


def lift_protograph(p: Protograph, seed: int = 0) -> LdpcCode:
    """Expand each base entry into that many distinct circulant permutation
    blocks; punctured base columns mark all lifted copies as punctured."""
    z = p.lift
    maxmult = max(e for row in p.base for e in row)
    if z < maxmult:
        raise ConstructionError(f"lift factor {z} < max multiplicity {maxmult}")
    rng = np.random.default_rng(seed)
    m, nv = p.n_checks, p.n_vars
    entries = []
    for i in range(m):
        for j in range(nv):
            mult = p.base[i][j]
            if not mult:
                continue
            shifts = rng.choice(z, size=mult, replace=False)
            for sh in shifts:
                for a in range(z):
                    entries.append((i * z + (a + int(sh)) % z, j * z + a))
    h = SparseBinMatrix.from_entries(m * z, nv * z, entries)
    punctured = frozenset(
        j * z + a for j in p.punctured_cols for a in range(z)
    )
    encoder, k = _generic_encoder_from_h(h)
    return LdpcCode(nv * z, k, h, punctured=punctured, encoder=encoder,
                    meta={"protograph": p, "seed": seed})


def puncture(code: LdpcCode, positions, allow_systematic: bool = False) -> LdpcCode:
    positions = set(positions)
    if not positions:
        return code
    if not allow_systematic:
        systematic = set(getattr(code.encoder, "info_positions", range(code.k)))
        clash = positions & systematic
        if clash:
            raise ConstructionError(f"puncturing systematic positions {sorted(clash)[:5]}")
    new_punct = code.punctured | positions
    if code.n - len(new_punct) < code.k:
        raise ConstructionError("puncturing below k transmitted positions")
    return LdpcCode(code.n, code.k, code.h, punctured=new_punct,
                    encoder=code.encoder, meta=dict(code.meta))


def _bit_reversal_order(m: int):
    nb = max(1, (m - 1).bit_length())
    order = sorted(range(1 << nb), key=lambda i: int(format(i, f"0{nb}b")[::-1], 2))
    return [i for i in order if i < m]


def rate_family(mother: LdpcCode, rates) -> list:
    """Nested rate-compatible family: transmitted count round(k/R); punctured
    parity positions drawn from a fixed bit-reversal spreading order."""
    systematic = set(getattr(mother.encoder, "info_positions", range(mother.k)))
    parity = [i for i in mother.transmitted if i not in systematic]
    order = [parity[i] for i in _bit_reversal_order(len(parity))]
    family = []
    for r in sorted(rates):
        target = int(mother.k / r + 0.5)
        drop = mother.n_transmitted - target
        if drop < 0:
            raise ConstructionError(f"rate {r} below the mother code rate")
        family.append(puncture(mother, order[:drop]) if drop else mother)
    return family


def code_to_text(code: LdpcCode) -> str:
    out = [f"ldpc {code.n} {code.k}"]
    if code.punctured:
        out.append("punctured: " + ",".join(str(i) for i in sorted(code.punctured)))
    out.append(dense_to_text(code.h.to_dense()))
    return "\n".join(out)


def save_code(code: LdpcCode, path) -> None:
    with open(path, "w") as f:
        f.write(code_to_text(code))


def load_code(path) -> LdpcCode:
    with open(path) as f:
        text = f.read()
    lines = text.splitlines()
    head = lines[0].split()
    if head[0] != "ldpc":
        raise ValueError("not an ldpc code file")
    n, k = int(head[1]), int(head[2])
    punctured = frozenset()
    body = 1
    if len(lines) > 1 and lines[1].startswith("punctured:"):
        punctured = frozenset(int(t) for t in lines[1].split(":", 1)[1].split(",") if t.strip())
        body = 2
    dense = dense_from_text("\n".join(lines[body:]))
    h = SparseBinMatrix.from_dense(dense)
    encoder, k_actual = _generic_encoder_from_h(h)
    if k_actual != k:
        k = k_actual
    return LdpcCode(n, k, h, punctured=punctured, encoder=encoder)
