"""Chain complexes and exact homology via integer Smith normal form.

Boundary matrices are kept sparse; elimination pivots on +-1 entries first
(standard for geometric complexes, keeps entries small) and falls back to
minimal-absolute-value pivoting with exact big integers, so no overflow is
possible.  Field coefficients (Q, F_p) use rank computations only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd
from typing import Union

from .complexes import ComplexError, FacePoset, SimplicialComplex, order_complex

Coefficients = Union[str, tuple]  # "Z", "Q", or ("F", p)


def parse_coefficients(spec) -> Coefficients:
    if isinstance(spec, tuple):
        kind, p = spec
        if kind != "F" or p < 2:
            raise ValueError(f"bad coefficient spec {spec!r}")
        return ("F", int(p))
    s = str(spec).lower()
    if s in ("z", "int", "integers"):
        return "Z"
    if s in ("q", "rational", "rationals"):
        return "Q"
    if s == "f2":
        return ("F", 2)
    if s.startswith("fp:"):
        return ("F", int(s[3:]))
    if s.startswith("f") and s[1:].isdigit():
        return ("F", int(s[1:]))
    raise ValueError(f"unknown coefficient field {spec!r}")


def coefficients_name(coeffs: Coefficients) -> str:
    return "Z" if coeffs == "Z" else ("Q" if coeffs == "Q" else f"F{coeffs[1]}")


# ---------------------------------------------------------------------------
# Boundary matrices
# ---------------------------------------------------------------------------


class SparseMatrix:
    """Integer sparse matrix as row -> {col: value} with a column mirror."""

    def __init__(self, nrows: int, ncols: int):
        self.nrows = nrows
        self.ncols = ncols
        self.rows: dict[int, dict[int, int]] = {}
        self.cols: dict[int, dict[int, int]] = {}

    def set(self, r: int, c: int, v: int):
        if v:
            self.rows.setdefault(r, {})[c] = v
            self.cols.setdefault(c, {})[r] = v
        else:
            self.unset(r, c)

    def unset(self, r: int, c: int):
        row = self.rows.get(r)
        if row and c in row:
            del row[c]
            if not row:
                del self.rows[r]
            col = self.cols[c]
            del col[r]
            if not col:
                del self.cols[c]

    def get(self, r: int, c: int) -> int:
        return self.rows.get(r, {}).get(c, 0)

    def add(self, r: int, c: int, v: int):
        self.set(r, c, self.get(r, c) + v)

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def copy(self) -> "SparseMatrix":
        out = SparseMatrix(self.nrows, self.ncols)
        for r, row in self.rows.items():
            for c, v in row.items():
                out.rows.setdefault(r, {})[c] = v
                out.cols.setdefault(c, {})[r] = v
        return out

    def to_dense(self) -> list:
        return [[self.get(r, c) for c in range(self.ncols)] for r in range(self.nrows)]


def boundary_matrices(
    K: SimplicialComplex, signed: bool = True, reduced: bool = False
) -> list[SparseMatrix]:
    """Boundary operators d_k: C_k -> C_{k-1} for k = 0..dim.

    Index 0 is the augmentation map (zero unless `reduced`).  Rows and columns
    index faces in sorted order per dimension.
    """
    d = K.dim
    mats = []
    prev = sorted(K.faces(0))
    aug = SparseMatrix(1 if reduced else 0, len(prev))
    if reduced:
        for c in range(len(prev)):
            aug.set(0, c, 1)
    mats.append(aug)
    for k in range(1, d + 1):
        cur = sorted(K.faces(k))
        index = {f: i for i, f in enumerate(prev)}
        m = SparseMatrix(len(prev), len(cur))
        for j, f in enumerate(cur):
            for i, sub in enumerate(itertools.combinations(f, k)):
                sign = (-1) ** (k - i) if signed else 1
                m.set(index[sub], j, sign)
        mats.append(m)
        prev = cur
    return mats


def poset_boundary_matrices_mod2(P: FacePoset) -> list[SparseMatrix]:
    d = P.dim
    by_dim = [sorted(P.cells_of_dim(k)) for k in range(d + 1)]
    mats = [SparseMatrix(0, len(by_dim[0]))]
    for k in range(1, d + 1):
        index = {c: i for i, c in enumerate(by_dim[k - 1])}
        m = SparseMatrix(len(by_dim[k - 1]), len(by_dim[k]))
        for j, c in enumerate(by_dim[k]):
            for b in P.boundary[c]:
                m.set(index[b], j, 1)
        mats.append(m)
    return mats


def chain_complex(
    host, coefficients: Coefficients = "Z", reduced: bool = False
) -> list[SparseMatrix]:
    """Boundary matrices of a complex, or of a poset over F_2.

    Posets carry no incidence signs, so signed coefficients on a bare poset
    are refused; subdivide first (order_complex) for integral homology.
    """
    coefficients = parse_coefficients(coefficients)
    if isinstance(host, SimplicialComplex):
        mats = boundary_matrices(host, signed=True, reduced=reduced)
    elif isinstance(host, FacePoset):
        if coefficients != ("F", 2):
            raise ComplexError(
                "signed coefficients on a bare poset are not defined; "
                "take the order complex (barycentric subdivision) first"
            )
        mats = poset_boundary_matrices_mod2(host)
    else:
        raise TypeError(f"unsupported chain complex host {type(host)!r}")
    _assert_dd_zero(mats, coefficients)
    return mats


def _assert_dd_zero(mats: list[SparseMatrix], coefficients: Coefficients):
    mod = coefficients[1] if isinstance(coefficients, tuple) else 0
    for k in range(1, len(mats)):
        low, high = mats[k - 1], mats[k]
        if low.nrows == 0:
            continue
        for c, col in high.cols.items():
            acc: dict[int, int] = {}
            for r, v in col.items():
                for rr, vv in low.cols.get(r, {}).items():
                    acc[rr] = acc.get(rr, 0) + v * vv
            for val in acc.values():
                if (val % mod if mod else val) != 0:
                    raise AssertionError("boundary of boundary does not vanish")


# ---------------------------------------------------------------------------
# Smith normal form and ranks
# ---------------------------------------------------------------------------


def smith_diagonal(m: SparseMatrix) -> list[int]:
    """Invariant factors of an integer matrix (positive, divisibility chain)."""
    m = m.copy()
    diag: list[int] = []
    while m.rows:
        pivot = _pick_pivot(m)
        if pivot is None:
            break
        r, c = _clear_pivot(m, *pivot)
        diag.append(abs(m.get(r, c)))
        m.unset(r, c)
    # enforce divisibility chain
    diag = [x for x in diag if x]
    changed = True
    while changed:
        changed = False
        for i in range(len(diag)):
            for j in range(i + 1, len(diag)):
                a, b = diag[i], diag[j]
                if b % a:
                    g = gcd(a, b)
                    diag[i], diag[j] = g, a * b // g
                    changed = True
    return sorted(diag)


def _pick_pivot(m: SparseMatrix):
    best = None
    best_key = None
    for r, row in m.rows.items():
        rl = len(row)
        for c, v in row.items():
            a = abs(v)
            key = (a != 1, a, (rl - 1) * (len(m.cols[c]) - 1))
            if best_key is None or key < best_key:
                best_key = key
                best = (r, c)
                if key[0] is False and key[2] == 0:
                    return best
    return best


def _clear_pivot(m: SparseMatrix, r: int, c: int) -> tuple[int, int]:
    """Reduce until (r, c) is the only entry in its row and column.

    The pivot may hop to a smaller remainder during Euclidean descent, so the
    final position is returned.  Clearing the row afterwards cannot refill the
    column: at that point column c holds only the pivot, so the column
    operations touch row r alone.
    """
    while True:
        v = m.get(r, c)
        for rr, vv in [(rr, vv) for rr, vv in m.cols[c].items() if rr != r]:
            q = vv // v
            if q:
                _row_axpy(m, rr, r, -q)
        rem = [(abs(vv), rr) for rr, vv in m.cols[c].items() if rr != r]
        if rem:
            r = min(rem)[1]
            continue
        v = m.get(r, c)
        for cc, vv in [(cc, vv) for cc, vv in m.rows[r].items() if cc != c]:
            q = vv // v
            if q:
                _col_axpy(m, cc, c, -q)
        rem = [(abs(vv), cc) for cc, vv in m.rows[r].items() if cc != c]
        if rem:
            c = min(rem)[1]
            continue
        return r, c


def _row_axpy(m: SparseMatrix, dst: int, src: int, factor: int):
    for c, v in list(m.rows.get(src, {}).items()):
        m.add(dst, c, factor * v)


def _col_axpy(m: SparseMatrix, dst: int, src: int, factor: int):
    for r, v in list(m.cols.get(src, {}).items()):
        m.add(r, dst, factor * v)


def rank_f2(m: SparseMatrix) -> int:
    """Gaussian elimination over F_2 with bitset columns."""
    cols = []
    for c, col in m.cols.items():
        word = 0
        for r, v in col.items():
            if v % 2:
                word |= 1 << r
        if word:
            cols.append(word)
    rank = 0
    basis: dict[int, int] = {}
    for word in cols:
        while word:
            top = word.bit_length() - 1
            if top in basis:
                word ^= basis[top]
            else:
                basis[top] = word
                rank += 1
                break
    return rank


def rank_mod_p(m: SparseMatrix, p: int) -> int:
    if p == 2:
        return rank_f2(m)
    rows = []
    for r, row in m.rows.items():
        rd = {c: v % p for c, v in row.items() if v % p}
        if rd:
            rows.append(rd)
    rank = 0
    pivots: list[tuple[int, dict]] = []
    for row in rows:
        for pc, prow in pivots:
            if pc in row:
                f = row[pc] * pow(prow[pc], p - 2, p) % p
                for c, v in prow.items():
                    nv = (row.get(c, 0) - f * v) % p
                    if nv:
                        row[c] = nv
                    elif c in row:
                        del row[c]
        if row:
            pc = min(row)
            pivots.append((pc, row))
            rank += 1
    return rank


def rank_z(m: SparseMatrix) -> int:
    """Exact rank over Z (equals rank over Q)."""
    return len(smith_diagonal(m))


def rank(m: SparseMatrix, coefficients: Coefficients) -> int:
    if coefficients in ("Z", "Q"):
        return rank_z(m)
    return rank_mod_p(m, coefficients[1])


# ---------------------------------------------------------------------------
# Homology profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomologyProfile:
    coefficients: Coefficients
    betti: tuple
    torsion: tuple  # per dimension, tuple of invariant factors > 1 (Z only)
    reduced: bool
    f_vector: tuple

    @property
    def dim(self) -> int:
        return len(self.betti) - 1

    def euler_characteristic(self) -> int:
        chi = sum((-1) ** k * b for k, b in enumerate(self.betti))
        return chi + (1 if self.reduced else 0)

    def min_generators(self, k: int) -> int:
        """Minimal generator count of H_k (rank plus torsion entries, Z only)."""
        if k < 0 or k > self.dim:
            return 0
        b = self.betti[k]
        t = len(self.torsion[k]) if self.coefficients == "Z" else 0
        return b + t

    def group_description(self, k: int) -> str:
        if k < 0 or k > self.dim:
            return "0"
        parts = []
        if self.betti[k]:
            parts.append("Z" if self.betti[k] == 1 else f"Z^{self.betti[k]}")
        if self.coefficients == "Z":
            parts.extend(f"Z/{t}" for t in self.torsion[k])
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {
            "coefficients": coefficients_name(self.coefficients),
            "betti": list(self.betti),
            "torsion": [list(t) for t in self.torsion],
            "reduced": self.reduced,
            "f_vector": list(self.f_vector),
        }


def homology(
    host, coefficients: Coefficients = "Z", reduced: bool = False
) -> HomologyProfile:
    """Exact homology of a complex (or of a poset over F_2)."""
    coefficients = parse_coefficients(coefficients)
    if isinstance(host, SimplicialComplex) and host.is_empty():
        return HomologyProfile(coefficients, (), (), reduced, ())
    mats = chain_complex(host, coefficients, reduced=reduced)
    sizes = [mats[k].ncols for k in range(len(mats))]
    d = len(sizes) - 1
    if coefficients == "Z":
        diags = [smith_diagonal(m) for m in mats]
        ranks = [len(dg) for dg in diags]
        betti = []
        torsion = []
        for k in range(d + 1):
            rk_out = ranks[k]
            rk_in = ranks[k + 1] if k < d else 0
            betti.append(sizes[k] - rk_out - rk_in)
            tors = tuple(x for x in (diags[k + 1] if k < d else [])) if k < d else ()
            torsion.append(tuple(x for x in tors if x > 1))
        return HomologyProfile("Z", tuple(betti), tuple(torsion), reduced, tuple(sizes))
    ranks = [rank(m, coefficients) for m in mats]
    betti = []
    for k in range(d + 1):
        rk_out = ranks[k]
        rk_in = ranks[k + 1] if k < d else 0
        betti.append(sizes[k] - rk_out - rk_in)
    return HomologyProfile(
        coefficients, tuple(betti), tuple(() for _ in range(d + 1)), reduced, tuple(sizes)
    )


def betti_numbers(host, coefficients: Coefficients = "Z", reduced: bool = False) -> tuple:
    return homology(host, coefficients, reduced).betti


def reduced_betti(K: SimplicialComplex, coefficients: Coefficients) -> list:
    """Reduced Betti numbers indexed from -1 (entry 0 is degree -1)."""
    if K.is_empty():
        return [1]  # the irrelevant complex has reduced homology in degree -1
    prof = homology(K, coefficients, reduced=True)
    return [0] + list(prof.betti)


# ---------------------------------------------------------------------------
# Algebraic depth via vanishing of reduced link homology
# ---------------------------------------------------------------------------


@dataclass
class DepthReport:
    dim: int
    adepth: dict  # field name -> value
    cohen_macaulay: dict  # field name -> bool
    cdepth: int | None = None
    cdepth_status: str | None = None
    hdepth: int | None = None
    hdepth_status: str | None = None

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "adepth": dict(self.adepth),
            "cohen_macaulay": dict(self.cohen_macaulay),
            "cdepth": self.cdepth,
            "cdepth_status": self.cdepth_status,
            "hdepth": self.hdepth,
            "hdepth_status": self.hdepth_status,
        }


def algebraic_depth(K: SimplicialComplex, fields=("Q", ("F", 2))) -> DepthReport:
    """Depth of the face ring minus one, computed from reduced link homology.

    The value is the largest m such that, for every face (including the empty
    one), the reduced homology of its link vanishes below m - dim(face) - 1.
    Cohen-Macaulay over a field means the depth equals the dimension.
    """
    adepth = {}
    cm = {}
    d = K.dim
    links = [(-1, K)]
    for f in K.all_faces():
        links.append((len(f) - 1, K.link(f)))
    for fld in fields:
        fld_c = parse_coefficients(fld)
        bound = d
        for fdim, L in links:
            rb = reduced_betti(L, fld_c)
            first = None
            for i, b in enumerate(rb):
                if b:
                    first = i - 1
                    break
            if first is None:
                continue
            bound = min(bound, first + fdim + 1)
        val = max(bound, 0)
        name = coefficients_name(fld_c)
        adepth[name] = val
        cm[name] = val == d
    return DepthReport(d, adepth, cm)
