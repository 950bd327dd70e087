"""Simplicial complexes, face posets, and the basic combinatorial constructions.

Vertices carry arbitrary hashable labels and are interned to dense integer
ids.  Faces are sorted tuples of dense ids; the face lattice is materialised
per dimension on first use and cached.  All objects are immutable after
construction, so they are safe to share between concurrent searches.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Sequence


class ComplexError(ValueError):
    """An operation received input it cannot handle."""


Face = tuple  # sorted tuple of dense vertex ids


def _label_sort_key(label):
    return (type(label).__name__, repr(label))


class SimplicialComplex:
    """Finite abstract simplicial complex defined by its inclusion-maximal faces."""

    __slots__ = ("labels", "label_index", "facets", "_faces", "_pm_info", "_canonical")

    def __init__(self, labels: tuple, facets: frozenset):
        self.labels = labels
        self.label_index = {lab: i for i, lab in enumerate(labels)}
        self.facets = facets
        self._faces: dict[int, frozenset] = {}
        self._pm_info = None
        self._canonical = None

    # -- construction -------------------------------------------------------

    @classmethod
    def from_facets(cls, facet_lists: Iterable[Sequence[Hashable]]) -> "SimplicialComplex":
        """Build a complex from vertex-label lists, keeping only maximal ones."""
        raw = [tuple(f) for f in facet_lists]
        if not raw:
            raise ComplexError("no facets given")
        labels: list = []
        index: dict = {}
        id_facets = []
        for f in raw:
            if len(set(f)) != len(f):
                raise ComplexError(f"duplicate vertex within facet {f!r}")
            ids = []
            for lab in f:
                if lab not in index:
                    index[lab] = len(labels)
                    labels.append(lab)
                ids.append(index[lab])
            id_facets.append(tuple(sorted(ids)))
        # drop faces contained in another facet
        id_facets.sort(key=len, reverse=True)
        kept: list[Face] = []
        for f in id_facets:
            fs = set(f)
            if not any(fs.issubset(k) for k in kept):
                kept.append(f)
        return cls(tuple(labels), frozenset(kept))

    @classmethod
    def empty(cls) -> "SimplicialComplex":
        """The complex with no nonempty faces (used for links of facets)."""
        return cls((), frozenset())

    def _subcomplex(self, facets: Iterable[Face]) -> "SimplicialComplex":
        """New complex on the induced vertex set, preserving original labels."""
        facets = list(facets)
        if not facets:
            return SimplicialComplex.empty()
        return SimplicialComplex.from_facets(
            [tuple(self.labels[v] for v in f) for f in facets]
        )

    # -- basic queries -------------------------------------------------------

    @property
    def dim(self) -> int:
        return max((len(f) for f in self.facets), default=0) - 1

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    def is_empty(self) -> bool:
        return not self.facets

    def faces(self, k: int) -> frozenset:
        """All k-dimensional faces, as sorted id tuples."""
        if k < 0 or k > self.dim:
            return frozenset()
        if k not in self._faces:
            out = set()
            for f in self.facets:
                if len(f) - 1 >= k:
                    out.update(itertools.combinations(f, k + 1))
            self._faces[k] = frozenset(out)
        return self._faces[k]

    def all_faces(self) -> list:
        """All nonempty faces ordered by (dimension, tuple)."""
        out = []
        for k in range(self.dim + 1):
            out.extend(sorted(self.faces(k)))
        return out

    def f_vector(self) -> tuple:
        return tuple(len(self.faces(k)) for k in range(self.dim + 1))

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector()))

    def has_face(self, face: Face) -> bool:
        if not face:
            return True
        k = len(face) - 1
        return tuple(sorted(face)) in self.faces(k)

    def face_from_labels(self, labels: Sequence[Hashable]) -> Face:
        try:
            ids = tuple(sorted(self.label_index[l] for l in labels))
        except KeyError as exc:
            raise ComplexError(f"unknown vertex label {exc.args[0]!r}")
        return ids

    def face_labels(self, face: Face) -> tuple:
        """Labels of a face, in a canonical label order (not id order)."""
        return tuple(sorted((self.labels[v] for v in face), key=_label_sort_key))

    def facet_label_lists(self) -> list:
        """Facets as label tuples, deterministically ordered."""
        return sorted(
            (self.face_labels(f) for f in self.facets),
            key=lambda t: [_label_sort_key(x) for x in t],
        )

    def is_pure(self) -> bool:
        return len({len(f) for f in self.facets}) <= 1

    # -- subcomplex operations ----------------------------------------------

    def link(self, face: Face) -> "SimplicialComplex":
        """Faces disjoint from `face` that lie in a face containing it."""
        face = tuple(sorted(face))
        if not self.has_face(face):
            raise ComplexError(f"{self.face_labels_safe(face)} is not a face")
        fs = set(face)
        out = [tuple(v for v in f if v not in fs) for f in self.facets if fs.issubset(f)]
        out = [f for f in out if f]
        if not out:
            return SimplicialComplex.empty()
        return self._subcomplex(out)

    def face_labels_safe(self, face: Face):
        return tuple(self.labels[v] if 0 <= v < len(self.labels) else v for v in face)

    def star(self, face: Face) -> "SimplicialComplex":
        face = tuple(sorted(face))
        if not self.has_face(face):
            raise ComplexError(f"{self.face_labels_safe(face)} is not a face")
        fs = set(face)
        return self._subcomplex([f for f in self.facets if fs.issubset(f)])

    def deletion(self, vertices: Iterable) -> "SimplicialComplex":
        """Faces disjoint from the given vertex set (vertex ids)."""
        vs = set(vertices)
        out = [tuple(v for v in f if v not in vs) for f in self.facets]
        out = [f for f in out if f]
        if not out:
            return SimplicialComplex.empty()
        return self._subcomplex(out)

    def removal(self, face: Face) -> "SimplicialComplex":
        """Faces disjoint from the interior of `face` (the complex C - sigma)."""
        face = tuple(sorted(face))
        if not self.has_face(face):
            raise ComplexError(f"{self.face_labels_safe(face)} is not a face")
        fs = set(face)
        keep = []
        for k in range(self.dim + 1):
            for f in self.faces(k):
                if not fs.issubset(f):
                    keep.append(f)
        # also keep proper faces of `face`
        for j in range(len(face) - 1):
            keep.extend(itertools.combinations(face, j + 1))
        maximal = _maximal_faces(keep)
        return self._subcomplex(maximal)

    def skeleton(self, k: int) -> "SimplicialComplex":
        if k >= self.dim:
            return self
        faces = set()
        for f in self.facets:
            if len(f) - 1 <= k:
                faces.add(f)
            else:
                faces.update(itertools.combinations(f, k + 1))
        return self._subcomplex(faces)

    # -- pseudo-manifold structure --------------------------------------------

    def pseudomanifold_check(self) -> "PseudoManifoldInfo":
        if self._pm_info is None:
            self._pm_info = _pseudomanifold_check(self)
        return self._pm_info

    def boundary_complex(self) -> "SimplicialComplex":
        """Subcomplex generated by the ridges lying in exactly one facet."""
        if not self.is_pure():
            raise ComplexError("boundary complex requires a pure complex")
        info = self.pseudomanifold_check()
        return info.boundary

    def dual_graph(self) -> dict:
        """Adjacency map facet -> sorted list of facets sharing a ridge."""
        if not self.is_pure():
            raise ComplexError("dual graph requires a pure complex")
        ridge_map: dict[Face, list] = {}
        for f in sorted(self.facets):
            for r in itertools.combinations(f, len(f) - 1):
                ridge_map.setdefault(r, []).append(f)
        adj = {f: set() for f in self.facets}
        for fs in ridge_map.values():
            for a, b in itertools.combinations(fs, 2):
                adj[a].add(b)
                adj[b].add(a)
        return {f: sorted(adj[f]) for f in sorted(adj)}

    def boundary_faces(self) -> frozenset:
        """All faces of the boundary complex, as faces of this complex."""
        info = self.pseudomanifold_check()
        if info.boundary.is_empty():
            return frozenset()
        bd = info.boundary
        out = set()
        for k in range(bd.dim + 1):
            for f in bd.faces(k):
                out.add(self.face_from_labels(bd.face_labels(f)))
        return frozenset(out)

    # -- constructions ---------------------------------------------------------

    def cone(self, apex: Hashable) -> "SimplicialComplex":
        if apex in self.label_index:
            raise ComplexError(f"apex label {apex!r} already a vertex")
        return SimplicialComplex.from_facets(
            [(apex,) + self.face_labels(f) for f in self.facets]
        )

    def suspension(self, north: Hashable | None = None, south: Hashable | None = None) -> "SimplicialComplex":
        if north is None or south is None:
            north, south = _fresh_labels(self, 2)
        if north in self.label_index or south in self.label_index or north == south:
            raise ComplexError("suspension apexes must be fresh and distinct")
        fl = [self.face_labels(f) for f in self.facets]
        return SimplicialComplex.from_facets(
            [(north,) + f for f in fl] + [(south,) + f for f in fl]
        )

    def barycentric_subdivision(self) -> "SimplicialComplex":
        """Complex of all chains of faces; vertex labels are face-label tuples."""
        if self.is_empty():
            return SimplicialComplex.empty()
        chains = _maximal_chains(self)
        return SimplicialComplex.from_facets(
            [tuple(self.face_labels(f) for f in chain) for chain in chains]
        )

    def face_poset(self) -> "FacePoset":
        return face_poset(self)

    # -- canonical form ---------------------------------------------------------

    def canonical_form(self) -> bytes:
        if self._canonical is None:
            self._canonical = _canonical_form(self)
        return self._canonical

    def is_isomorphic(self, other: "SimplicialComplex") -> bool:
        return self.canonical_form() == other.canonical_form()

    def relabeled(self, mapping: dict) -> "SimplicialComplex":
        return SimplicialComplex.from_facets(
            [tuple(mapping[l] for l in self.face_labels(f)) for f in self.facets]
        )

    def __repr__(self):
        if self.is_empty():
            return "SimplicialComplex(empty)"
        return f"SimplicialComplex(dim={self.dim}, f={self.f_vector()})"

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.labels == other.labels and self.facets == other.facets

    def __hash__(self):
        return hash((self.labels, self.facets))


def _maximal_faces(faces: Iterable[Face]) -> list:
    faces = sorted(set(faces), key=len, reverse=True)
    kept: list[Face] = []
    for f in faces:
        fs = set(f)
        if not any(fs.issubset(k) for k in kept):
            kept.append(f)
    return kept


def _fresh_labels(K: SimplicialComplex, n: int) -> list:
    if all(isinstance(l, int) for l in K.labels):
        base = max(K.labels, default=-1) + 1
        return [base + i for i in range(n)]
    out = []
    i = 0
    while len(out) < n:
        cand = f"apex{i}"
        if cand not in K.label_index:
            out.append(cand)
        i += 1
    return out


def _maximal_chains(K: SimplicialComplex) -> list:
    """Saturated chains of nonempty faces from vertices up to facets."""
    chains = []
    seen = set()

    def extend(chain, top):
        if len(top) == 1:
            full = tuple(reversed(chain))
            if full not in seen:
                seen.add(full)
                chains.append(full)
            return
        for sub in itertools.combinations(top, len(top) - 1):
            extend(chain + [sub], sub)

    for fct in sorted(K.facets):
        extend([fct], fct)
    return chains


@dataclass(frozen=True)
class PseudoManifoldInfo:
    pure: bool
    strongly_connected: bool
    max_ridge_degree: int
    boundary: SimplicialComplex
    is_pseudo_manifold: bool
    is_closed: bool


def _pseudomanifold_check(K: SimplicialComplex) -> PseudoManifoldInfo:
    pure = K.is_pure()
    d = K.dim
    ridge_map: dict[Face, list] = {}
    if pure and d >= 1:
        for f in K.facets:
            for r in itertools.combinations(f, len(f) - 1):
                ridge_map.setdefault(r, []).append(f)
    max_deg = max((len(v) for v in ridge_map.values()), default=0)
    boundary_ridges = [r for r, fs in ridge_map.items() if len(fs) == 1]
    if pure and boundary_ridges:
        boundary = K._subcomplex(boundary_ridges)
    else:
        boundary = SimplicialComplex.empty()
    strongly = _strongly_connected(K) if pure else False
    is_pm = pure and strongly and max_deg <= 2
    if pure and d == 0:
        is_pm = len(K.facets) <= 2 and strongly
    closed = is_pm and not boundary_ridges
    return PseudoManifoldInfo(pure, strongly, max_deg, boundary, is_pm, closed)


def _strongly_connected(K: SimplicialComplex) -> bool:
    facets = sorted(K.facets)
    if len(facets) <= 1:
        return True
    ridge_map: dict[Face, list] = {}
    for f in facets:
        for r in itertools.combinations(f, len(f) - 1):
            ridge_map.setdefault(r, []).append(f)
    adj = {f: set() for f in facets}
    for fs in ridge_map.values():
        for a, b in itertools.combinations(fs, 2):
            adj[a].add(b)
            adj[b].add(a)
    seen = {facets[0]}
    stack = [facets[0]]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(facets)


# ---------------------------------------------------------------------------
# Face posets
# ---------------------------------------------------------------------------


class PosetError(ValueError):
    """Raised for malformed poset data."""


class FacePoset:
    """Graded poset of cells given by cover relations (cell -> codim-1 faces).

    Tags identify cells externally; for simplicial complexes the tag is the
    face as a tuple of vertex labels.  `boundary_cells` marks the cells of the
    host's boundary complex, which is what interior-critical counts refer to.
    """

    __slots__ = ("dims", "tags", "boundary", "cofaces", "boundary_cells",
                 "tag_index", "_diamond", "_hash")

    def __init__(self, dims, tags, boundary, boundary_cells=frozenset()):
        self.dims = list(dims)
        self.tags = list(tags)
        self.boundary = [tuple(b) for b in boundary]
        self.boundary_cells = frozenset(boundary_cells)
        n = len(self.dims)
        if not (len(self.tags) == len(self.boundary) == n):
            raise PosetError("inconsistent cell arrays")
        self.cofaces = [[] for _ in range(n)]
        for c, bd in enumerate(self.boundary):
            for b in bd:
                if self.dims[b] != self.dims[c] - 1:
                    raise PosetError(
                        f"cover relation {self.tags[c]!r} -> {self.tags[b]!r} "
                        f"does not drop dimension by one"
                    )
                self.cofaces[b].append(c)
        self.cofaces = [tuple(v) for v in self.cofaces]
        self.tag_index = {t: i for i, t in enumerate(self.tags)}
        if len(self.tag_index) != n:
            raise PosetError("duplicate cell tags")
        self._diamond = None
        self._hash = None

    def __len__(self):
        return len(self.dims)

    @property
    def dim(self) -> int:
        return max(self.dims, default=-1)

    def cells_of_dim(self, k: int) -> list:
        return [i for i, d in enumerate(self.dims) if d == k]

    def cell_counts(self) -> tuple:
        out = [0] * (self.dim + 1)
        for d in self.dims:
            out[d] += 1
        return tuple(out)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.cell_counts()))

    def diamond_property(self) -> bool:
        """Every length-2 interval has exactly two middle elements."""
        if self._diamond is None:
            ok = True
            for c in range(len(self.dims)):
                count: dict[int, int] = {}
                for m in self.boundary[c]:
                    for b in self.boundary[m]:
                        count[b] = count.get(b, 0) + 1
                if any(v != 2 for v in count.values()):
                    ok = False
                    break
            self._diamond = ok
        return self._diamond

    def boundary_of_boundary_vanishes_mod2(self) -> bool:
        for c in range(len(self.dims)):
            count: dict[int, int] = {}
            for m in self.boundary[c]:
                for b in self.boundary[m]:
                    count[b] = count.get(b, 0) + 1
            if any(v % 2 for v in count.values()):
                return False
        return True

    def is_cover(self, lo: int, hi: int) -> bool:
        return lo in self.boundary[hi]

    def poset_hash(self) -> str:
        if self._hash is None:
            enc = []
            for i in sorted(range(len(self.dims)), key=lambda i: _tag_key(self.tags[i])):
                enc.append(
                    (
                        _tag_json(self.tags[i]),
                        self.dims[i],
                        sorted(_tag_json(self.tags[b]) for b in self.boundary[i]),
                        i in self.boundary_cells,
                    )
                )
            data = json.dumps(enc, sort_keys=True).encode()
            self._hash = hashlib.sha256(data).hexdigest()
        return self._hash

    def to_json(self) -> list:
        """Poset file format: array of {id, dim, boundary:[ids]}."""
        return [
            {"id": _tag_json(self.tags[i]), "dim": self.dims[i],
             "boundary": [_tag_json(self.tags[b]) for b in sorted(self.boundary[i])]}
            for i in range(len(self.dims))
        ]

    @classmethod
    def from_json(cls, data: list) -> "FacePoset":
        tags = []
        dims = []
        index = {}
        for rec in data:
            t = _tag_from_json(rec["id"])
            if t in index:
                raise PosetError(f"duplicate cell id {rec['id']!r}")
            index[t] = len(tags)
            tags.append(t)
            dims.append(int(rec["dim"]))
        boundary = []
        for rec in data:
            bd = []
            for b in rec.get("boundary", []):
                bt = _tag_from_json(b)
                if bt not in index:
                    raise PosetError(f"unknown boundary cell {b!r}")
                bd.append(index[bt])
            boundary.append(tuple(bd))
        return cls(dims, tags, boundary)

    def __repr__(self):
        return f"FacePoset({len(self.dims)} cells, dim={self.dim})"


def _tag_key(tag):
    return json.dumps(_tag_json(tag), sort_keys=True)


def _tag_json(tag):
    if isinstance(tag, tuple):
        return [_tag_json(t) for t in tag]
    return tag


def _tag_from_json(obj):
    if isinstance(obj, list):
        return tuple(_tag_from_json(x) for x in obj)
    return obj


def face_poset(K: SimplicialComplex) -> FacePoset:
    """One cell per nonempty face; covers are codimension-1 containments."""
    faces = K.all_faces()
    index = {f: i for i, f in enumerate(faces)}
    dims = [len(f) - 1 for f in faces]
    tags = [K.face_labels(f) for f in faces]
    boundary = []
    for f in faces:
        if len(f) == 1:
            boundary.append(())
        else:
            boundary.append(tuple(index[s] for s in itertools.combinations(f, len(f) - 1)))
    bd_cells = frozenset()
    if K.is_pure():
        bd_cells = frozenset(index[f] for f in K.boundary_faces())
    return FacePoset(dims, tags, boundary, bd_cells)


def order_complex(P: FacePoset) -> SimplicialComplex:
    """Simplicial complex of all chains of the poset; isomorphic to sd of the host."""
    n = len(P)
    maximal = [c for c in range(n) if not P.cofaces[c]]
    chains: list[tuple] = []
    seen = set()

    def extend(chain, bottom):
        if not P.boundary[bottom]:
            full = tuple(reversed(chain))
            if full not in seen:
                seen.add(full)
                chains.append(full)
            return
        for b in P.boundary[bottom]:
            extend(chain + [b], b)

    for m in maximal:
        extend([m], m)
    return SimplicialComplex.from_facets(
        [tuple(P.tags[c] for c in chain) for chain in chains]
    )


# ---------------------------------------------------------------------------
# Canonical labeling: colour refinement on the vertex-facet incidence graph
# with orbit branching.  Exponential in the worst case, fine at census scale.
# ---------------------------------------------------------------------------


def _canonical_form(K: SimplicialComplex) -> bytes:
    if K.is_empty():
        return b"empty"
    facets = sorted(K.facets)
    n = K.n_vertices
    vert_facets = [[] for _ in range(n)]
    for fi, f in enumerate(facets):
        for v in f:
            vert_facets[v].append(fi)

    def renumber(keys):
        # invariant ids: classes sorted by their structural key
        ordered = sorted(set(keys))
        rank = {k: i for i, k in enumerate(ordered)}
        return [rank[k] for k in keys]

    def refine(vcol):
        fc = renumber([tuple(sorted(vcol[v] for v in f)) for f in facets])
        while True:
            nxt = renumber(
                [(vcol[v], tuple(sorted(fc[fi] for fi in vert_facets[v]))) for v in range(n)]
            )
            fnxt = renumber(
                [(fc[fi], tuple(sorted(nxt[v] for v in f))) for fi, f in enumerate(facets)]
            )
            if nxt == vcol and fnxt == fc:
                return vcol
            vcol, fc = nxt, fnxt

    def encode(vcol):
        order = sorted(range(n), key=lambda v: (vcol[v], 0))
        rank = {v: i for i, v in enumerate(order)}
        enc = sorted(tuple(sorted(rank[v] for v in f)) for f in facets)
        return repr(enc).encode()

    def search(vcol) -> bytes:
        vcol = refine(vcol)
        classes: dict[int, list] = {}
        for v in range(n):
            classes.setdefault(vcol[v], []).append(v)
        split = [c for c, vs in sorted(classes.items()) if len(vs) > 1]
        if not split:
            return encode(vcol)
        target = classes[split[0]]
        best = None
        fresh = max(vcol) + 1
        for v in target:
            child = list(vcol)
            child[v] = fresh
            cand = search(child)
            if best is None or cand < best:
                best = cand
        return best

    init = [0] * n
    return search(init)
