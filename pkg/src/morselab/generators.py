"""Instance generators: drilled cube piles, Furch balls, spheres, random complexes.

Cubes are triangulated by the ordered-path rule (six tetrahedra per cube, all
containing the main diagonal), which depends only on global coordinates, so
adjacent cubes induce the same triangulation on shared squares.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .complexes import ComplexError, FacePoset, SimplicialComplex

MOVES = {
    "+x": (1, 0, 0), "-x": (-1, 0, 0),
    "+y": (0, 1, 0), "-y": (0, -1, 0),
    "+z": (0, 0, 1), "-z": (0, 0, -1),
}


def simplex(d: int) -> SimplicialComplex:
    return SimplicialComplex.from_facets([list(range(1, d + 2))])


def boundary_sphere(d: int) -> SimplicialComplex:
    """Boundary of the (d+1)-simplex: the minimal d-sphere."""
    verts = list(range(1, d + 3))
    return SimplicialComplex.from_facets(
        [list(f) for f in itertools.combinations(verts, d + 1)]
    )


def cube_tetrahedra(corner):
    """Six tetrahedra of the unit cube at `corner`, as lattice-point tuples."""
    x, y, z = corner
    base = (x, y, z)
    out = []
    for perm in itertools.permutations(range(3)):
        pts = [base]
        cur = list(base)
        for axis in perm:
            cur[axis] += 1
            pts.append(tuple(cur))
        out.append(tuple(pts))
    return out


def triangulate_cubes(cubes) -> SimplicialComplex:
    facets = []
    for c in cubes:
        facets.extend(cube_tetrahedra(c))
    return SimplicialComplex.from_facets(facets)


# ---------------------------------------------------------------------------
# Piles of cubes
# ---------------------------------------------------------------------------


def _box_faces(corner):
    """All faces of the cubical cell at `corner`, as interval tuples."""
    x, y, z = corner
    axes = [(x, x + 1), (y, y + 1), (z, z + 1)]
    faces = []
    for choice in itertools.product(*[((lo, hi), (lo, lo), (hi, hi)) for lo, hi in axes]):
        faces.append(tuple(choice))
    return faces


def _box_dim(box):
    return sum(1 for lo, hi in box if hi > lo)


def _box_boundary(box):
    out = []
    for i, (lo, hi) in enumerate(box):
        if hi > lo:
            for v in (lo, hi):
                out.append(box[:i] + ((v, v),) + box[i + 1:])
    return out


def cubical_poset(cubes) -> FacePoset:
    """Face poset of a union of unit cubes, with its boundary cells marked."""
    cells = set()
    for c in cubes:
        cells.update(_box_faces(c))
    cells = sorted(cells, key=lambda b: (_box_dim(b), b))
    index = {b: i for i, b in enumerate(cells)}
    dims = [_box_dim(b) for b in cells]
    boundary = [tuple(index[s] for s in _box_boundary(b)) for b in cells]
    tags = [("box",) + b for b in cells]
    # boundary squares lie in exactly one cube
    square_count: dict = {}
    for c in cubes:
        for f in _box_faces(c):
            if _box_dim(f) == 2:
                square_count[f] = square_count.get(f, 0) + 1
    bd_cells = set()
    for sq, cnt in square_count.items():
        if cnt == 1:
            i = index[sq]
            stack = [i]
            while stack:
                cur = stack.pop()
                if cur in bd_cells:
                    continue
                bd_cells.add(cur)
                stack.extend(boundary[cur])
    return FacePoset(dims, tags, boundary, frozenset(bd_cells))


def pile_of_cubes(a: int, b: int, c: int, removed=()):
    """An a x b x c pile of unit cubes minus interior cells.

    Returns (cubical FacePoset, simplicial triangulation).  Removed cells must
    be strictly interior and must leave the dual graph connected.
    """
    if min(a, b, c) < 1:
        raise ComplexError("pile dimensions must be positive")
    removed = {tuple(r) for r in removed}
    for r in removed:
        x, y, z = r
        if not (0 < x < a - 1 and 0 < y < b - 1 and 0 < z < c - 1):
            raise ComplexError(f"removed cell {r} is not strictly interior")
    cubes = [
        (x, y, z)
        for x in range(a) for y in range(b) for z in range(c)
        if (x, y, z) not in removed
    ]
    if not cubes:
        raise ComplexError("all cubes removed")
    if not _cubes_connected(cubes):
        raise ComplexError("removal disconnects the dual graph")
    return cubical_poset(cubes), triangulate_cubes(cubes)


def _cubes_connected(cubes) -> bool:
    cubeset = set(cubes)
    seen = {cubes[0]}
    stack = [cubes[0]]
    while stack:
        x, y, z = stack.pop()
        for dx, dy, dz in MOVES.values():
            nb = (x + dx, y + dy, z + dz)
            if nb in cubeset and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(cubeset)


# ---------------------------------------------------------------------------
# Furch balls: drilled knotted tubes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KnotSpec:
    """A drilled tube, encoded as a unit-cube path through cube centers.

    The path starts in the top layer (so the tube is open to the outside),
    stays off the bottom layer, and terminates one layer above it; the
    spanning edge is the vertical lattice edge beneath the tube's end.
    """

    grid: tuple
    start: tuple  # (x, y) column of the first cube, in the top layer
    moves: tuple  # move names from MOVES

    def cubes(self) -> list:
        nx, ny, nz = self.grid
        x, y = self.start
        cur = (x, y, nz - 1)
        path = [cur]
        for m in self.moves:
            try:
                dx, dy, dz = MOVES[m]
            except KeyError:
                raise ComplexError(f"unknown move {m!r}")
            cur = (cur[0] + dx, cur[1] + dy, cur[2] + dz)
            path.append(cur)
        self._validate(path)
        return path

    def _validate(self, path):
        nx, ny, nz = self.grid
        for (x, y, z) in path:
            if not (0 <= x < nx and 0 <= y < ny and 0 <= z < nz):
                raise ComplexError(f"tube exits the grid at {(x, y, z)}")
            if z == 0:
                raise ComplexError("tube perforates the bottom layer")
        if len(set(path)) != len(path):
            raise ComplexError("tube path is not self-avoiding")
        if path[-1][2] != 1:
            raise ComplexError("tube must terminate one layer above the bottom")
        # embedded-tube condition: distant path cubes keep a one-cube gap;
        # cubes two apart may share the elbow edge of a turn, cubes three
        # apart the corner vertex of a double turn (the complement stays a
        # manifold in both local patterns)
        for i in range(len(path)):
            for j in range(i + 2, len(path)):
                d = tuple(sorted(abs(a - b) for a, b in zip(path[i], path[j])))
                if max(d) >= 2:
                    continue
                if j - i == 2 and d == (0, 1, 1):
                    continue
                if j - i == 3 and d == (1, 1, 1):
                    continue
                raise ComplexError(
                    f"tube touches itself between step {i} and step {j}"
                )

    def end_cube(self) -> tuple:
        return self.cubes()[-1]

    @classmethod
    def straight(cls, grid=(7, 7, 7), column=(3, 3)) -> "KnotSpec":
        nz = grid[2]
        return cls(grid=tuple(grid), start=tuple(column), moves=("-z",) * (nz - 2))

    @classmethod
    def trefoil(cls) -> "KnotSpec":
        """Tube tracing a three-crossing two-bridge plat (a trefoil arc)."""
        cells = _TREFOIL_CELLS
        moves = []
        for a, b in zip(cells, cells[1:]):
            delta = (b[0] - a[0], b[1] - a[1], b[2] - a[2])
            name = {v: k for k, v in MOVES.items()}[delta]
            moves.append(name)
        return cls(grid=(7, 9, 7), start=cells[0][:2], moves=tuple(moves))

    def to_json(self) -> dict:
        return {"grid": list(self.grid), "start": list(self.start),
                "moves": list(self.moves)}

    @classmethod
    def from_json(cls, data) -> "KnotSpec":
        return cls(tuple(data["grid"]), tuple(data["start"]), tuple(data["moves"]))


# Plat closure of a three half-twist two-strand braid, drilled as one arc:
# in at the top, down one strand, around the bottom turn, up the braid as the
# second strand, and out under the first strand's exit run, ending one layer
# above the floor.  Non-consecutive cubes keep a one-cube gap throughout.
_TREFOIL_CELLS = [
    (2, 8, 6), (2, 8, 5), (2, 8, 4),                        # entry
    (1, 8, 4), (0, 8, 4), (0, 8, 3), (0, 8, 2), (0, 7, 2),  # exit run, reversed
    (0, 6, 2), (1, 6, 2), (2, 6, 2), (3, 6, 2), (4, 6, 2),  # under pass, site 6
    (4, 5, 2), (4, 4, 2), (4, 4, 3), (4, 4, 4), (4, 3, 4),
    (4, 2, 4), (3, 2, 4), (2, 2, 4),                        # over pass, site 2
    (2, 1, 4), (2, 0, 4), (2, 0, 3), (2, 0, 2), (3, 0, 2), (4, 0, 2),  # bottom turn
    (4, 1, 2), (4, 2, 2), (3, 2, 2), (2, 2, 2), (1, 2, 2), (0, 2, 2),  # under, site 2
    (0, 3, 2), (0, 4, 2), (0, 4, 3), (0, 4, 4), (1, 4, 4), (2, 4, 4),
    (2, 5, 4), (2, 6, 4), (3, 6, 4), (4, 6, 4),             # over pass, site 6
    (4, 7, 4), (4, 8, 4), (4, 8, 3), (4, 8, 2), (3, 8, 2), (2, 8, 2),  # under the exit
    (2, 8, 1),                                              # stop above the floor
]


@dataclass(frozen=True)
class FurchBall:
    complex: SimplicialComplex
    spanning_edge: tuple  # pair of lattice-point labels
    spec: KnotSpec


def furch_ball(spec: KnotSpec) -> FurchBall:
    """Pile of cubes minus a drilled tube, stopped one layer above the floor.

    The result is a triangulated 3-ball whose distinguished spanning edge is
    the vertical edge beneath the tube's end: its endpoints lie on the
    boundary while the edge itself is interior.
    """
    nx, ny, nz = spec.grid
    tube = set(spec.cubes())
    cubes = [
        (x, y, z)
        for x in range(nx) for y in range(ny) for z in range(nz)
        if (x, y, z) not in tube
    ]
    K = triangulate_cubes(cubes)
    ex, ey, _ = spec.end_cube()
    corner = None
    for cx, cy in sorted(itertools.product((ex, ex + 1), (ey, ey + 1))):
        if 1 <= cx <= nx - 1 and 1 <= cy <= ny - 1:
            corner = (cx, cy)
            break
    if corner is None:
        raise ComplexError("tube end is too close to the grid wall for a spanning edge")
    edge = ((corner[0], corner[1], 1), (corner[0], corner[1], 0))
    for p in edge:
        if p not in K.label_index:
            raise ComplexError("spanning edge endpoints missing from the complex")
    return FurchBall(K, edge, spec)


# ---------------------------------------------------------------------------
# Random test complexes
# ---------------------------------------------------------------------------


def random_complex(rng, n_vertices=7, n_facets=6, max_card=4) -> SimplicialComplex:
    facets = []
    for _ in range(n_facets):
        k = int(rng.integers(1, max_card + 1))
        k = min(k, n_vertices)
        facets.append(sorted(rng.choice(n_vertices, size=k, replace=False).tolist()))
    return SimplicialComplex.from_facets(facets)
