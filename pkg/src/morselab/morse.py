"""Acyclic matchings, collapse search, and boundary-critical Morse constructions.

The collapse engine works on the face lattice of a complex, always removing
free pairs whose coface dimension is maximal among the cells still to be
removed; any collapse can be reordered this way, so restricting the search to
such sequences loses nothing and the emitted certificates automatically list
pairs by weakly decreasing coface dimension.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field

from .complexes import ComplexError, FacePoset, SimplicialComplex, face_poset
from .homology import HomologyProfile, homology


class MatchingError(ValueError):
    """A pair set fails to be an acyclic partial matching."""

    def __init__(self, message, witness_cycle=None):
        super().__init__(message)
        self.witness_cycle = witness_cycle


class BudgetExhausted(Exception):
    pass


class InternalInvariantError(RuntimeError):
    """A construction violated an identity its theorem guarantees."""


class Budget:
    """Search budget counted in node expansions, for reproducible runs."""

    def __init__(self, limit: int | None = None):
        self.limit = limit
        self.used = 0

    def spend(self, n: int = 1) -> None:
        self.used += n
        if self.limit is not None and self.used > self.limit:
            raise BudgetExhausted()

    @property
    def remaining(self) -> int | None:
        return None if self.limit is None else max(self.limit - self.used, 0)


def complex_hash(K: SimplicialComplex) -> str:
    data = json.dumps([list(map(repr, f)) for f in K.facet_label_lists()])
    return hashlib.sha256(data.encode()).hexdigest()


# ---------------------------------------------------------------------------
# Morse matchings
# ---------------------------------------------------------------------------


class MorseMatching:
    """A validated acyclic partial matching on a face poset."""

    def __init__(self, poset: FacePoset, pairs, _validated=False):
        self.poset = poset
        self.pairs = tuple(sorted(pairs))
        if not _validated:
            _check_matching(poset, self.pairs)
        matched = set()
        for lo, hi in self.pairs:
            matched.add(lo)
            matched.add(hi)
        self.critical = tuple(c for c in range(len(poset)) if c not in matched)
        d = poset.dim
        self.c = [0] * (d + 1)
        self.c_int = [0] * (d + 1)
        for c in self.critical:
            self.c[poset.dims[c]] += 1
            if c not in poset.boundary_cells:
                self.c_int[poset.dims[c]] += 1
        self.boundary_critical = not any(
            lo in poset.boundary_cells or hi in poset.boundary_cells
            for lo, hi in self.pairs
        )
        chi = sum((-1) ** k * n for k, n in enumerate(poset.cell_counts()))
        if sum((-1) ** k * ck for k, ck in enumerate(self.c)) != chi:
            raise InternalInvariantError("critical vector violates the Euler identity")

    # properties ------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.poset.dim

    def is_equatorial(self) -> bool:
        return (
            self.boundary_critical
            and bool(self.poset.boundary_cells)
            and self.c_int[0] == 0
            and self.c_int[self.dim] == 1
        )

    def is_polar(self) -> bool:
        return (
            not self.poset.boundary_cells
            and self.c[0] == 1
            and self.c[self.dim] == 1
        )

    def kind(self) -> str:
        if self.is_equatorial():
            return "equatorial"
        if self.is_polar():
            return "polar"
        if self.boundary_critical:
            return "boundary-critical"
        return "plain"

    def pair_tags(self) -> list:
        return [(self.poset.tags[lo], self.poset.tags[hi]) for lo, hi in self.pairs]

    def critical_tags(self) -> list:
        return [self.poset.tags[c] for c in self.critical]

    def critical_of_dim(self, k: int, interior_only=False) -> list:
        out = []
        for c in self.critical:
            if self.poset.dims[c] != k:
                continue
            if interior_only and c in self.poset.boundary_cells:
                continue
            out.append(self.poset.tags[c])
        return out

    def to_certificate(self) -> dict:
        from .complexes import _tag_json

        return {
            "kind": self.kind(),
            "poset_hash": self.poset.poset_hash(),
            "pairs": [[_tag_json(a), _tag_json(b)] for a, b in sorted(self.pair_tags())],
            "critical": [_tag_json(t) for t in sorted(self.critical_tags(), key=repr)],
        }

    def __repr__(self):
        return f"MorseMatching(kind={self.kind()}, c={tuple(self.c)}, c_int={tuple(self.c_int)})"


def validate_matching(poset: FacePoset, tag_pairs) -> MorseMatching:
    """Check a pair list (given by cell tags) and return the matching.

    Raises MatchingError on a repeated cell, a non-cover pair, or a directed
    cycle among V-paths; the cycle witness is attached to the error.
    """
    pairs = []
    for lo_tag, hi_tag in tag_pairs:
        lo = _resolve_tag(poset, lo_tag)
        hi = _resolve_tag(poset, hi_tag)
        pairs.append((lo, hi))
    return MorseMatching(poset, pairs)


def _resolve_tag(poset: FacePoset, tag):
    if isinstance(tag, list):
        from .complexes import _tag_from_json

        tag = _tag_from_json(tag)
    try:
        return poset.tag_index[tag]
    except (KeyError, TypeError):
        raise MatchingError(f"unknown cell {tag!r}")


def _check_matching(poset: FacePoset, pairs):
    seen = set()
    up = {}
    for lo, hi in pairs:
        if not poset.is_cover(lo, hi):
            raise MatchingError(
                f"pair ({poset.tags[lo]!r}, {poset.tags[hi]!r}) is not a cover relation"
            )
        for c in (lo, hi):
            if c in seen:
                raise MatchingError(f"cell {poset.tags[c]!r} matched twice")
            seen.add(c)
        up[lo] = hi
    # cycle search within each dimension layer
    for k in range(poset.dim + 1):
        layer = [lo for lo in up if poset.dims[lo] == k]
        adj = {}
        for lo in layer:
            hi = up[lo]
            adj[lo] = [b for b in poset.boundary[hi] if b != lo and b in up]
        color = {}
        for start in sorted(layer):
            if color.get(start):
                continue
            stack = [(start, iter(adj[start]))]
            color[start] = 1
            path = [start]
            while stack:
                node, it = stack[-1]
                advanced = False
                for nxt in it:
                    if color.get(nxt) == 1:
                        cyc = path[path.index(nxt):] + [nxt]
                        witness = []
                        for c in cyc:
                            witness.append(poset.tags[c])
                            witness.append(poset.tags[up[c]])
                        raise MatchingError(
                            "matching is not acyclic", witness_cycle=witness[:-1]
                        )
                    if nxt not in color:
                        color[nxt] = 1
                        path.append(nxt)
                        stack.append((nxt, iter(adj[nxt])))
                        advanced = True
                        break
                if not advanced:
                    color[node] = 2
                    path.pop()
                    stack.pop()


def matching_to_function(matching: MorseMatching) -> dict:
    """Integer discrete Morse function realising the matching.

    Built from a linear extension of the Hasse diagram with matched covers
    reversed; collapse pairs and critical cells of the emitted function are
    exactly those of the matching.
    """
    poset = matching.poset
    n = len(poset)
    up = {lo: hi for lo, hi in matching.pairs}
    down = {hi: lo for lo, hi in matching.pairs}
    succ = [[] for _ in range(n)]
    indeg = [0] * n
    for c in range(n):
        for b in poset.boundary[c]:
            if down.get(c) == b:
                succ[c].append(b)  # f decreases from the pair's top to its bottom
                indeg[b] += 1
            else:
                succ[b].append(c)
                indeg[c] += 1
    import heapq

    ready = [c for c in range(n) if indeg[c] == 0]
    heapq.heapify(ready)
    value = {}
    t = 0
    while ready:
        c = heapq.heappop(ready)
        value[poset.tags[c]] = t
        t += 1
        for nb in succ[c]:
            indeg[nb] -= 1
            if indeg[nb] == 0:
                heapq.heappush(ready, nb)
    if len(value) != n:
        raise InternalInvariantError("matching digraph has a cycle")
    return value


def pairs_from_function(poset: FacePoset, value: dict) -> list:
    """Collapse pairs of a discrete Morse function; checks the definition."""
    f = [value[poset.tags[c]] for c in range(len(poset))]
    pairs = []
    for c in range(len(poset)):
        low = [b for b in poset.boundary[c] if f[b] >= f[c]]
        high = [u for u in poset.cofaces[c] if f[u] <= f[c]]
        if len(low) > 1 or len(high) > 1:
            raise MatchingError(
                f"values do not form a discrete Morse function at {poset.tags[c]!r}"
            )
        for b in low:
            pairs.append((poset.tags[b], poset.tags[c]))
    return sorted(pairs)


# ---------------------------------------------------------------------------
# Collapse engine
# ---------------------------------------------------------------------------


def _zobrist(face) -> int:
    h = hashlib.blake2b(repr(face).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


class _Lattice:
    """Immutable face-lattice data shared by all searches on one complex."""

    def __init__(self, K: SimplicialComplex):
        self.K = K
        self.faces = K.all_faces()
        self.subfaces = {}
        for f in self.faces:
            subs = []
            for k in range(1, len(f)):
                subs.extend(itertools.combinations(f, k))
            self.subfaces[f] = subs
        self.zobrist = {f: _zobrist(f) for f in self.faces}


class _State:
    __slots__ = ("lat", "remaining", "up", "protected", "hash", "dim_hist")

    def __init__(self, lat: _Lattice, protected: frozenset, removed=()):
        self.lat = lat
        self.protected = protected
        self.remaining = set(lat.faces)
        self.up = {f: set() for f in lat.faces}
        for f in lat.faces:
            for g in lat.subfaces[f]:
                self.up[g].add(f)
        self.hash = 0
        top = max((len(f) for f in lat.faces), default=0)
        self.dim_hist = [0] * (top + 1)
        for f in lat.faces:
            self.hash ^= lat.zobrist[f]
            if f not in protected:
                self.dim_hist[len(f) - 1] += 1
        for f in removed:
            self.remove_cell(f)

    def remove_cell(self, f):
        self.remaining.discard(f)
        self.hash ^= self.lat.zobrist[f]
        if f not in self.protected:
            self.dim_hist[len(f) - 1] -= 1
        for g in self.lat.subfaces[f]:
            s = self.up.get(g)
            if s is not None:
                s.discard(f)

    def restore_cell(self, f):
        self.remaining.add(f)
        self.hash ^= self.lat.zobrist[f]
        if f not in self.protected:
            self.dim_hist[len(f) - 1] += 1
        for g in self.lat.subfaces[f]:
            if g in self.up:
                self.up[g].add(f)

    def max_unprotected_dim(self) -> int:
        for k in range(len(self.dim_hist) - 1, -1, -1):
            if self.dim_hist[k]:
                return k
        return -1

    def free_pairs_at(self, coface_dim: int) -> list:
        out = []
        for g in self.remaining:
            if len(g) != coface_dim or g in self.protected:
                continue
            s = self.up[g]
            if len(s) == 1:
                (t,) = s
                if t not in self.protected and len(t) - 1 == coface_dim:
                    out.append((g, t))
        return sorted(out)


def _sorted_label_faces(faces) -> tuple:
    return tuple(sorted(faces, key=repr))


@dataclass(frozen=True)
class CollapseSequence:
    """Replayable witness that a complex collapses onto a target subcomplex."""

    start_hash: str
    removed_first: tuple  # cells deleted before collapsing (facet removals)
    pairs: tuple          # ((free face, coface), ...) in execution order
    target: tuple         # faces of the final complex, repr-sorted

    def replay(self, K: SimplicialComplex) -> bool:
        """Re-execute every step on K, verifying freeness; True on exact match."""
        if complex_hash(K) != self.start_hash:
            raise ComplexError("certificate does not belong to this complex")
        lat = _Lattice(K)
        removed = [K.face_from_labels(f) for f in self.removed_first]
        state = _State(lat, frozenset(), removed=removed)
        prev_dim = None
        for lo_l, hi_l in self.pairs:
            lo = K.face_from_labels(lo_l)
            hi = K.face_from_labels(hi_l)
            if lo not in state.remaining or hi not in state.remaining:
                return False
            if state.up[lo] != {hi}:
                return False
            if prev_dim is not None and len(hi) - 1 > prev_dim:
                return False
            prev_dim = len(hi) - 1
            state.remove_cell(hi)
            state.remove_cell(lo)
        final = _sorted_label_faces(K.face_labels(f) for f in state.remaining)
        return final == self.target

    def to_json(self) -> dict:
        from .complexes import _tag_json

        return {
            "kind": "collapse",
            "start_hash": self.start_hash,
            "removed_first": [_tag_json(f) for f in self.removed_first],
            "pairs": [[_tag_json(a), _tag_json(b)] for a, b in self.pairs],
            "target": [_tag_json(f) for f in self.target],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CollapseSequence":
        from .complexes import _tag_from_json

        return cls(
            start_hash=data["start_hash"],
            removed_first=tuple(_tag_from_json(f) for f in data["removed_first"]),
            pairs=tuple((_tag_from_json(a), _tag_from_json(b)) for a, b in data["pairs"]),
            target=tuple(_tag_from_json(f) for f in data["target"]),
        )


@dataclass
class SearchResult:
    status: str  # "found" | "impossible" | "budget"
    sequence: CollapseSequence | None = None
    nodes: int = 0


def _run_collapse(
    K: SimplicialComplex,
    protected: frozenset,
    removed: tuple,
    *,
    mode: str,
    stop_dim: int = -1,
    strategy: str = "lex",
    budget: Budget | None = None,
    rng=None,
    audit_hashes: bool = False,
) -> SearchResult:
    """Shared collapse driver.

    mode "subcomplex": succeed when no unprotected cell remains above stop_dim
    (stop_dim -1 means none at all).  mode "point": succeed when exactly one
    cell, a vertex, remains.  Strategies: "lex" and "random" are greedy single
    passes; "exhaustive" backtracks over monotone sequences with visited-state
    hashing and can prove impossibility.
    """
    budget = budget or Budget()
    lat = _Lattice(K)
    for f in removed:
        if f in protected:
            raise ComplexError("cannot remove a protected cell")
    state = _State(lat, protected, removed=removed)
    trail: list = []

    def succeeded() -> bool:
        if mode == "point":
            return len(state.remaining) == 1
        return state.max_unprotected_dim() <= stop_dim

    def finish(status: str) -> SearchResult:
        seq = None
        if status == "found":
            seq = CollapseSequence(
                start_hash=complex_hash(K),
                removed_first=tuple(K.face_labels(f) for f in removed),
                pairs=tuple((K.face_labels(a), K.face_labels(b)) for a, b in trail),
                target=_sorted_label_faces(K.face_labels(f) for f in state.remaining),
            )
        return SearchResult(status, seq, budget.used)

    if strategy in ("lex", "random"):
        try:
            while not succeeded():
                m = state.max_unprotected_dim()
                if mode == "point" and m <= 0:
                    break
                cands = state.free_pairs_at(m)
                if not cands:
                    return finish("stuck")
                budget.spend()
                if strategy == "random":
                    lo, hi = cands[int(rng.integers(len(cands)))]
                else:
                    lo, hi = cands[0]
                state.remove_cell(hi)
                state.remove_cell(lo)
                trail.append((lo, hi))
        except BudgetExhausted:
            return finish("budget")
        return finish("found" if succeeded() else "stuck")

    if strategy != "exhaustive":
        raise ValueError(f"unknown strategy {strategy!r}")

    failed: set = set()
    audit: dict = {}

    def dfs() -> str:
        if succeeded():
            return "found"
        key = state.hash
        if key in failed:
            if audit_hashes:
                snap = frozenset(state.remaining)
                if audit.get(key, snap) != snap:
                    raise InternalInvariantError("zobrist hash collision detected")
            return "impossible"
        m = state.max_unprotected_dim()
        if mode == "point" and m <= 0:
            return "impossible"  # more than one cell left, nothing collapsible
        cands = state.free_pairs_at(m)
        if not cands:
            failed.add(key)
            return "impossible"
        for lo, hi in cands:
            budget.spend()
            state.remove_cell(hi)
            state.remove_cell(lo)
            trail.append((lo, hi))
            res = dfs()
            if res == "found":
                return "found"
            trail.pop()
            state.restore_cell(lo)
            state.restore_cell(hi)
        failed.add(key)
        if audit_hashes:
            audit[key] = frozenset(state.remaining)
        return "impossible"

    try:
        res = dfs()
    except BudgetExhausted:
        return finish("budget")
    return finish("found" if res == "found" else "impossible")


def collapse_search(
    K: SimplicialComplex,
    target: SimplicialComplex | str,
    strategy: str = "lex",
    budget: int | Budget | None = None,
    seed: int = 0,
    restarts: int = 32,
) -> SearchResult:
    """Search for a collapse of K onto a subcomplex (or onto "point").

    Returns status "found" with a replayable certificate, "impossible" only
    after a completed exhaustive search, or "budget"/"stuck" otherwise.
    """
    budget = budget if isinstance(budget, Budget) else Budget(budget)
    if isinstance(target, str):
        if target != "point":
            raise ComplexError(f"unknown target {target!r}")
        protected = frozenset()
        mode = "point"
    else:
        protected = _subcomplex_faces(K, target)
        mode = "subcomplex"
    if strategy == "random":
        from .rng import spawn_rngs

        for rng in spawn_rngs(seed, restarts):
            res = _run_collapse(
                K, protected, (), mode=mode, strategy="random", budget=budget, rng=rng
            )
            if res.status in ("found", "budget"):
                return res
        return SearchResult("stuck", None, budget.used)
    return _run_collapse(K, protected, (), mode=mode, strategy=strategy, budget=budget)


def _subcomplex_faces(K: SimplicialComplex, D: SimplicialComplex) -> frozenset:
    faces = set()
    for k in range(D.dim + 1):
        for f in D.faces(k):
            lf = D.face_labels(f)
            try:
                kf = K.face_from_labels(lf)
            except ComplexError:
                raise ComplexError(f"target face {lf!r} is not a face of the complex")
            if not K.has_face(kf):
                raise ComplexError(f"target face {lf!r} is not a face of the complex")
            faces.add(kf)
    return frozenset(faces)


# ---------------------------------------------------------------------------
# Collapsibility / endo-collapsibility / collapse depth
# ---------------------------------------------------------------------------


@dataclass
class CollapsibilityResult:
    status: str  # "yes" | "proved_not" | "indeterminate"
    sequence: CollapseSequence | None = None
    nodes: int = 0


def is_collapsible(
    K: SimplicialComplex, budget: int | Budget | None = None, seed: int = 0
) -> CollapsibilityResult:
    """Collapsibility onto a single vertex, greedy first then exhaustive."""
    budget = budget if isinstance(budget, Budget) else Budget(budget)
    try:
        res = _run_collapse(K, frozenset(), (), mode="point", strategy="lex", budget=budget)
        if res.status == "found":
            return CollapsibilityResult("yes", res.sequence, budget.used)
        from .rng import spawn_rngs

        for rng in spawn_rngs(seed, 16):
            res = _run_collapse(
                K, frozenset(), (), mode="point", strategy="random", budget=budget, rng=rng
            )
            if res.status == "found":
                return CollapsibilityResult("yes", res.sequence, budget.used)
        res = _run_collapse(K, frozenset(), (), mode="point", strategy="exhaustive", budget=budget)
    except BudgetExhausted:
        return CollapsibilityResult("indeterminate", None, budget.used)
    if res.status == "found":
        return CollapsibilityResult("yes", res.sequence, budget.used)
    if res.status == "impossible":
        return CollapsibilityResult("proved_not", None, budget.used)
    return CollapsibilityResult("indeterminate", None, budget.used)


@dataclass
class Obstruction:
    dim: int
    group: str
    bound: int
    message: str

    def to_json(self):
        return {"dim": self.dim, "group": self.group, "bound": self.bound,
                "message": self.message}


@dataclass
class EndoResult:
    status: str  # "yes" | "obstruction" | "proved_not" | "indeterminate"
    facet: tuple | None = None
    sequence: CollapseSequence | None = None
    matching: MorseMatching | None = None
    obstruction: Obstruction | None = None
    nodes: int = 0


def _endo_homology_obstruction(M, info, profile=None) -> Obstruction | None:
    """Fast refusal: relative Morse inequalities against the endo target vector."""
    prof = profile or homology(M, "Z")
    d = M.dim
    top = d - 1 if info.is_closed else d
    for i in range(1, top + 1):
        g = prof.min_generators(i)
        if g > 0:
            return Obstruction(
                dim=i,
                group=prof.group_description(i),
                bound=g,
                message=(
                    f"H_{i} = {prof.group_description(i)} forces at least {g} "
                    f"critical interior {d - i}-cells"
                ),
            )
    return None


def _endo_protected_target(M: SimplicialComplex, closed: bool):
    if closed:
        return frozenset(), "point"
    bd = frozenset(M.boundary_faces())
    return bd, "subcomplex"


def endo_search_for_facet(
    M: SimplicialComplex, delta, budget: Budget, seed: int = 0,
    restarts: int = 24, allow_exhaustive: bool = True,
) -> SearchResult:
    info = M.pseudomanifold_check()
    protected, mode = _endo_protected_target(M, info.is_closed)
    res = _run_collapse(M, protected, (delta,), mode=mode, strategy="lex", budget=budget)
    if res.status in ("found", "budget"):
        return res
    from .rng import spawn_rngs

    for rng in spawn_rngs(seed, restarts):
        res = _run_collapse(
            M, protected, (delta,), mode=mode, strategy="random", budget=budget, rng=rng
        )
        if res.status in ("found", "budget"):
            return res
    if allow_exhaustive:
        res = _run_collapse(
            M, protected, (delta,), mode=mode, strategy="exhaustive", budget=budget
        )
    return res


def matching_from_collapse(
    M: SimplicialComplex, seq: CollapseSequence, P: FacePoset | None = None
) -> MorseMatching:
    """The matching whose pairs are the collapse pairs; the rest is critical."""
    P = P or face_poset(M)
    return validate_matching(P, seq.pairs)


def is_endo_collapsible(
    M: SimplicialComplex,
    budget: int | Budget | None = None,
    seed: int = 0,
    skip_obstruction_check: bool = False,
) -> EndoResult:
    """Does some facet removal collapse M onto its boundary (closed: a point)?"""
    info = M.pseudomanifold_check()
    if not info.is_pseudo_manifold:
        raise ComplexError("endo-collapsibility is defined for pseudo-manifolds only")
    budget = budget if isinstance(budget, Budget) else Budget(budget)
    if M.dim == 0:
        raise ComplexError("dimension must be at least 1")
    if not skip_obstruction_check:
        obs = _endo_homology_obstruction(M, info)
        if obs is not None:
            return EndoResult("obstruction", obstruction=obs, nodes=budget.used)
    facets = sorted(M.facets)
    if len(facets) == 1:
        # single simplex: the removal leaves exactly the boundary, no moves needed
        delta = facets[0]
        rest = [f for f in M.all_faces() if f != delta]
        seq = CollapseSequence(
            start_hash=complex_hash(M),
            removed_first=(M.face_labels(delta),),
            pairs=(),
            target=_sorted_label_faces(M.face_labels(f) for f in rest),
        )
        matching = matching_from_collapse(M, seq)
        return EndoResult("yes", M.face_labels(delta), seq, matching, nodes=budget.used)
    all_impossible = True
    for delta in facets:
        try:
            res = endo_search_for_facet(M, delta, budget, seed=seed)
        except BudgetExhausted:
            return EndoResult("indeterminate", nodes=budget.used)
        if res.status == "found":
            matching = matching_from_collapse(M, res.sequence)
            if info.is_closed:
                if not matching.is_polar():
                    raise InternalInvariantError("closed endo witness is not polar")
            else:
                if not matching.is_equatorial():
                    raise InternalInvariantError("endo witness is not equatorial")
            return EndoResult(
                "yes", M.face_labels(delta), res.sequence, matching, nodes=budget.used
            )
        if res.status == "budget":
            return EndoResult("indeterminate", nodes=budget.used)
        if res.status != "impossible":
            all_impossible = False
    if all_impossible:
        return EndoResult("proved_not", nodes=budget.used)
    return EndoResult("indeterminate", nodes=budget.used)


@dataclass
class DepthCertificate:
    claimed: int
    facet: tuple | None
    matching: MorseMatching | None
    status: str  # lower_bound_proved | exact_proved_by_exhaustion |
    #              exact_proved_by_obstruction | indeterminate
    nodes: int
    obstruction: Obstruction | None = None
    sequence: CollapseSequence | None = None


def collapse_depth(
    M: SimplicialComplex,
    budget: int | Budget | None = None,
    seed: int = 0,
    facet_sample: int | None = None,
) -> DepthCertificate:
    """Largest k with a found witness; exact on obstruction or exhaustion.

    A depth-k witness collapses M minus a facet onto the boundary together
    with a complex of dimension d-k, i.e. clears all interior cells above
    dimension d-k.  Facets are tried in canonical order (optionally sampled).
    """
    info = M.pseudomanifold_check()
    if not info.is_pseudo_manifold:
        raise ComplexError("collapse depth is defined for pseudo-manifolds only")
    budget = budget if isinstance(budget, Budget) else Budget(budget)
    d = M.dim
    prof = homology(M, "Z")
    hom_cap = d
    obs = None
    for i in range(1, d):
        if prof.min_generators(i) > 0:
            hom_cap = i
            obs = Obstruction(
                dim=i,
                group=prof.group_description(i),
                bound=prof.min_generators(i),
                message=f"H_{i} nonzero forbids collapse depth above {i}",
            )
            break
    protected = frozenset(M.boundary_faces())
    facets = sorted(M.facets)
    if facet_sample is not None:
        facets = facets[:facet_sample]
    exhausted_at: dict[int, bool] = {}
    for k in range(hom_cap, 0, -1):
        stop_dim = d - k
        found = None
        all_impossible = True
        for delta in facets:
            try:
                res = _run_collapse(
                    M, protected, (delta,), mode="subcomplex", stop_dim=stop_dim,
                    strategy="lex", budget=budget,
                )
                if res.status != "found":
                    from .rng import spawn_rngs

                    for rng in spawn_rngs(seed, 16):
                        res = _run_collapse(
                            M, protected, (delta,), mode="subcomplex",
                            stop_dim=stop_dim, strategy="random", budget=budget, rng=rng,
                        )
                        if res.status == "found":
                            break
                if res.status != "found":
                    res = _run_collapse(
                        M, protected, (delta,), mode="subcomplex", stop_dim=stop_dim,
                        strategy="exhaustive", budget=budget,
                    )
            except BudgetExhausted:
                return DepthCertificate(
                    claimed=1, facet=None, matching=None,
                    status="indeterminate", nodes=budget.used, obstruction=obs,
                )
            if res.status == "found":
                found = (delta, res.sequence)
                break
            if res.status == "budget":
                return DepthCertificate(
                    claimed=1, facet=None, matching=None,
                    status="indeterminate", nodes=budget.used, obstruction=obs,
                )
            if res.status != "impossible":
                all_impossible = False
        if found is not None:
            delta, seq = found
            matching = matching_from_collapse(M, seq)
            if k == d or (k == hom_cap and obs is not None):
                status = "exact_proved_by_obstruction"
            elif exhausted_at.get(k + 1, False):
                status = "exact_proved_by_exhaustion"
            else:
                status = "lower_bound_proved"
            return DepthCertificate(
                claimed=k, facet=M.face_labels(delta), matching=matching,
                status=status, nodes=budget.used, obstruction=obs, sequence=seq,
            )
        exhausted_at[k] = all_impossible and facet_sample is None
    raise InternalInvariantError(
        "no depth-1 witness found; the dual spanning tree collapse must exist"
    )


# ---------------------------------------------------------------------------
# Boundary-critical construction
# ---------------------------------------------------------------------------


def dual_spanning_tree(M: SimplicialComplex, root) -> list:
    """BFS tree of the dual graph; returns (ridge, facet) pairs, root first."""
    adj = M.dual_graph()
    order = [root]
    seen = {root}
    pairs = []
    i = 0
    while i < len(order):
        cur = order[i]
        i += 1
        for nb in adj[cur]:
            if nb not in seen:
                seen.add(nb)
                order.append(nb)
                ridge = tuple(sorted(set(cur) & set(nb)))
                pairs.append((ridge, nb))
    if len(seen) != len(M.facets):
        raise ComplexError("dual graph is not connected")
    return pairs


def boundary_critical_morse(
    M: SimplicialComplex, delta=None, base_vertex=None,
) -> MorseMatching:
    """Equatorial matching with a prescribed unique critical facet.

    Construction: collapse M minus the facet along a dual spanning tree, keep
    collapsing greedily while protecting the boundary, then re-match the
    leftover graph's interior vertices to their parent edges in a spanning
    tree rooted at a boundary vertex.  Closed inputs get the polar variant
    with a chosen critical vertex instead of the boundary.
    """
    info = M.pseudomanifold_check()
    if not info.is_pseudo_manifold:
        raise ComplexError("input is not a pseudo-manifold")
    d = M.dim
    if d < 2:
        raise ComplexError("dimension must be at least 2")
    facets = sorted(M.facets)
    if delta is None:
        delta = facets[0]
    else:
        delta = tuple(sorted(delta))
        if delta not in M.facets:
            raise ComplexError("the prescribed critical cell must be a facet")
    closed = info.is_closed
    bd_faces = frozenset() if closed else frozenset(M.boundary_faces())

    tree_pairs = dual_spanning_tree(M, delta)

    # step 2: collapse the leftover codimension-1 complex, protecting the
    # boundary and never matching vertices (the graph pass handles those)
    vertices = set(M.faces(0))
    protected = frozenset(bd_faces | vertices)
    removed = [delta]
    for r, f in tree_pairs:
        removed.extend((f, r))
    lat = _Lattice(M)
    state = _State(lat, protected, removed=tuple(removed))
    greedy_pairs = []
    while True:
        m = state.max_unprotected_dim()
        if m <= 0:
            break
        cands = state.free_pairs_at(m)
        if not cands:
            break
        lo, hi = cands[0]
        state.remove_cell(hi)
        state.remove_cell(lo)
        greedy_pairs.append((lo, hi))

    # step 3: graph surgery on the remaining 1-complex
    edges = [f for f in state.remaining if len(f) == 2]
    adj: dict = {v: [] for v in vertices}
    for e in edges:
        a, b = (e[0],), (e[1],)
        adj[a].append((b, e))
        adj[b].append((a, e))
    if closed:
        root = (min(v[0] for v in vertices),) if base_vertex is None else tuple(base_vertex)
    else:
        bd_vertices = sorted(f for f in bd_faces if len(f) == 1)
        root = bd_vertices[0] if base_vertex is None else tuple(base_vertex)
    if root not in vertices:
        raise ComplexError("base vertex is not a vertex of the complex")
    parent_edge = {}
    seen = {root}
    queue = [root]
    qi = 0
    while qi < len(queue):
        v = queue[qi]
        qi += 1
        for w, e in sorted(adj[v]):
            if w not in seen:
                seen.add(w)
                parent_edge[w] = e
                queue.append(w)
    if len(seen) != len(vertices):
        raise InternalInvariantError("leftover graph is not connected")
    surgery_pairs = []
    for v in sorted(vertices):
        if v == root:
            continue
        if not closed and v in bd_faces:
            continue
        surgery_pairs.append((v, parent_edge[v]))

    P = face_poset(M)
    pairs = [(M.face_labels(a), M.face_labels(b)) for a, b in tree_pairs]
    pairs += [(M.face_labels(a), M.face_labels(b)) for a, b in greedy_pairs]
    pairs += [(M.face_labels(a), M.face_labels(b)) for a, b in surgery_pairs]
    matching = validate_matching(P, pairs)
    if closed:
        if not matching.is_polar():
            raise InternalInvariantError("polar construction failed")
    else:
        if not matching.is_equatorial():
            raise InternalInvariantError("equatorial construction failed")
    return matching


# ---------------------------------------------------------------------------
# Morse inequalities
# ---------------------------------------------------------------------------


@dataclass
class InequalityRow:
    k: int
    homology_dim: int
    lhs: int
    rhs: int
    group: str

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


@dataclass
class MorseInequalityReport:
    relative: list
    classical: list
    euler_ok: bool
    profile: HomologyProfile

    @property
    def all_hold(self) -> bool:
        return (
            self.euler_ok
            and all(r.holds for r in self.relative)
            and all(r.holds for r in self.classical)
        )

    def to_json(self) -> dict:
        def rows(rs):
            return [
                {"k": r.k, "homology_dim": r.homology_dim, "lhs": r.lhs,
                 "rhs": r.rhs, "group": r.group, "holds": r.holds}
                for r in rs
            ]

        return {
            "relative": rows(self.relative),
            "classical": rows(self.classical),
            "euler_ok": self.euler_ok,
            "all_hold": self.all_hold,
        }


def verify_morse_inequalities(
    M: SimplicialComplex, matching: MorseMatching, profile: HomologyProfile | None = None
) -> MorseInequalityReport:
    """Compare per-dimension homology generator counts with critical counts.

    The relative form bounds H_{d-k} by the interior critical k-count and
    requires a boundary-critical matching when the boundary is nonempty;
    closed inputs also get the classical form (H_k against all critical
    k-cells).
    """
    info = M.pseudomanifold_check()
    closed = info.boundary.is_empty()
    if not closed and not matching.boundary_critical:
        raise MatchingError(
            "relative Morse inequalities require a boundary-critical matching"
        )
    prof = profile or homology(M, "Z")
    d = M.dim
    relative = [
        InequalityRow(
            k=k,
            homology_dim=d - k,
            lhs=prof.min_generators(d - k),
            rhs=matching.c_int[k],
            group=prof.group_description(d - k),
        )
        for k in range(d + 1)
    ]
    classical = []
    if closed:
        classical = [
            InequalityRow(
                k=k, homology_dim=k, lhs=prof.min_generators(k),
                rhs=matching.c[k], group=prof.group_description(k),
            )
            for k in range(d + 1)
        ]
    chi = M.euler_characteristic()
    euler_ok = sum((-1) ** k * c for k, c in enumerate(matching.c)) == chi
    return MorseInequalityReport(relative, classical, euler_ok, prof)
