"""Graph specifications, closed-form Laplacian spectra and exact spanning-tree counts.

Two graph families are supported:

* circulant graphs C_n^{Gamma}: vertices Z/nZ, vertex v adjacent to v +- g (mod n)
  for every generator g in Gamma = {1, g_1, ..., g_{d-1}};
* diagonal discrete tori Z^d / diag(l_1, ..., l_d) Z^d with the standard +-e_i
  generators.

Both are 2d-regular once edge multiplicities are counted: a generator g = n/2
(or a torus side l = 2) contributes a doubled edge, and a torus side l = 1
contributes a self loop that cancels out of the Laplacian.  The closed-form
eigenvalues fix this convention, and the integer Laplacian built here matches
it so that the matrix-tree count and the eigenvalue product agree.

Spanning-tree counts are exact arbitrary-precision integers obtained by
fraction-free (Bareiss) elimination of the reduced integer Laplacian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

DEFAULT_EIGENVALUE_CAP = 10**7
DEFAULT_DETERMINANT_CAP = 4096


class GraphSpecError(ValueError):
    """Invalid graph specification (bad generators, sides, or spectrum)."""


class EnumerationCapError(RuntimeError):
    """The requested computation would exceed the configured size cap."""


# ---------------------------------------------------------------------------
# Specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CirculantSpec:
    """Circulant graph C_n^{1, g_1, ..., g_{d-1}} on n vertices.

    Only first generator 1 is supported; other specs are rejected.  The
    derived constant c_gamma = 1 + sum g_i^2 is the O(1) correction constant
    of the circulant asymptotics.
    """

    n: int
    generators: tuple[int, ...]

    def __post_init__(self):
        gens = tuple(int(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "n", int(self.n))
        if self.n < 3:
            raise GraphSpecError(f"need n >= 3, got n={self.n}")
        if not gens:
            raise GraphSpecError("generator set is empty")
        if gens[0] != 1:
            raise GraphSpecError(f"first generator must be 1, got {gens[0]}")
        if list(gens) != sorted(gens):
            raise GraphSpecError(f"generators must be sorted: {gens}")
        if any(g < 1 for g in gens):
            raise GraphSpecError(f"generators must be positive: {gens}")
        # The canonical range is 1..floor(n/2); a generator g in (n/2, n) is
        # the mirror step n-g and is accepted so that small members of fixed
        # families (C_3^{1,2}, C_{beta n}^{1,n}, ...) stay well defined.
        if gens[-1] >= self.n:
            raise GraphSpecError(
                f"generator {gens[-1]} exceeds n-1 = {self.n - 1} "
                f"(canonical range is 1..floor(n/2))"
            )

    @property
    def d(self) -> int:
        return len(self.generators)

    @property
    def degree(self) -> int:
        return 2 * len(self.generators)

    @property
    def c_gamma(self) -> int:
        return 1 + sum(g * g for g in self.generators[1:])

    @property
    def vertex_count(self) -> int:
        return self.n


@dataclass(frozen=True)
class TorusSpec:
    """Diagonal discrete torus Z^d / diag(l_1, ..., l_d) Z^d.

    ``split`` optionally marks the first p sides as the A-block (the sides
    that stay constant or grow sublinearly in the degeneration experiments);
    it does not affect the spectrum or the tree count.
    """

    sides: tuple[int, ...]
    split: int | None = None

    def __post_init__(self):
        sides = tuple(int(s) for s in self.sides)
        object.__setattr__(self, "sides", sides)
        if not sides or any(s < 1 for s in sides):
            raise GraphSpecError(f"sides must be positive integers: {sides}")
        if self.split is not None and not 0 <= self.split <= len(sides):
            raise GraphSpecError(f"split {self.split} out of range 0..{len(sides)}")

    @property
    def d(self) -> int:
        return len(self.sides)

    @property
    def degree(self) -> int:
        return 2 * len(self.sides)

    @property
    def vertex_count(self) -> int:
        return math.prod(self.sides)


GraphSpec = Union[CirculantSpec, TorusSpec]


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Spectrum:
    """Full multiset of combinatorial-Laplacian eigenvalues.

    ``values`` keeps the natural enumeration order (character index j for a
    circulant, mixed-radix index for a torus); the zero mode sits at index 0
    and is exact.
    """

    values: np.ndarray
    zero_multiplicity: int

    @classmethod
    def from_values(cls, values: np.ndarray) -> "Spectrum":
        values = np.asarray(values, dtype=float)
        return cls(values=values, zero_multiplicity=int(np.count_nonzero(values == 0.0)))

    def __len__(self) -> int:
        return int(self.values.size)


def circulant_spectrum(spec: CirculantSpec) -> Spectrum:
    """Closed-form spectrum lambda_j = 2d - 2 sum_g cos(2 pi g j / n), j = 0..n-1.

    Evaluated in the equivalent form 4 sum_g sin^2(pi g j / n), which is exact
    at j = 0 and keeps full relative accuracy for the near-zero modes (the
    cosine form loses them to cancellation for large n).
    """
    n = spec.n
    j = np.arange(n, dtype=np.int64)
    lam = np.zeros(n)
    for g in spec.generators:
        a = (g * j) % n
        s = np.sin(np.pi * (a.astype(float) / n))
        lam += 4.0 * s * s
    return Spectrum.from_values(lam)


def torus_spectrum(spec: TorusSpec, cap: int = DEFAULT_EIGENVALUE_CAP) -> Spectrum:
    """Spectrum of the discrete torus, lambda_m = sum_i (2 - 2 cos(2 pi m_i / l_i)).

    Eigenvalues are enumerated in mixed-radix order over m in prod Z/l_i; the
    first index moves fastest along the last side.  Raises
    EnumerationCapError when det Lambda exceeds ``cap``.
    """
    total = spec.vertex_count
    if total > cap:
        raise EnumerationCapError(
            f"torus has {total} eigenvalues, exceeding the cap {cap}"
        )
    lam = np.zeros((1,))
    for l in spec.sides:
        m = np.arange(l, dtype=float)
        s = np.sin(np.pi * m / l)
        lam = (lam[:, None] + 4.0 * s * s).ravel()
    return Spectrum.from_values(lam)


def log_det_star(spectrum: Spectrum) -> float:
    """log of the product of the nonzero Laplacian eigenvalues.

    Requires a connected spectrum (exactly one zero eigenvalue); any further
    zero or negative value is an error.  Logs are accumulated with math.fsum
    in enumeration order, so the result is deterministic and independent of
    any caller-side parallelism.
    """
    vals = spectrum.values
    if spectrum.zero_multiplicity != 1:
        raise GraphSpecError(
            f"expected exactly one zero eigenvalue, got {spectrum.zero_multiplicity}"
        )
    nonzero = vals[vals != 0.0]
    if nonzero.size == 0:
        raise GraphSpecError("spectrum has no nonzero eigenvalues")
    if np.any(nonzero < 0.0):
        raise GraphSpecError("spectrum has a negative eigenvalue")
    return math.fsum(np.log(nonzero))


# ---------------------------------------------------------------------------
# Lattice form of a circulant
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeMatrix:
    """Integer lattice matrix whose quotient torus realizes a circulant graph."""

    entries: tuple[tuple[int, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def determinant(self) -> int:
        return _bareiss_determinant([list(row) for row in self.entries])


def circulant_to_lattice(spec: CirculantSpec) -> LatticeMatrix:
    """Matrix Lambda_Gamma with first row (n, -g_1, ..., -g_{d-1}) over an identity block.

    Z^d / Lambda_Gamma Z^d with nearest-neighbour edges is isomorphic to
    C_n^Gamma; |det| = n.
    """
    d = spec.d
    first = (spec.n,) + tuple(-g for g in spec.generators[1:])
    rows = [first]
    for i in range(1, d):
        rows.append(tuple(1 if k == i else 0 for k in range(d)))
    return LatticeMatrix(entries=tuple(rows))


# ---------------------------------------------------------------------------
# Integer Laplacians and exact tree counts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TreeCount:
    """Exact spanning-tree count."""

    value: int


def multigraph_edges(spec: GraphSpec) -> list[tuple[int, int]]:
    """Edge list (with multiplicity, no self loops) of the 2d-regular multigraph.

    Vertices are numbered 0..V-1 (torus vertices in the same mixed-radix
    order as torus_spectrum).  Doubled edges appear twice; a torus side of
    length 1 yields only self loops for that dimension, which are dropped.
    """
    edges: list[tuple[int, int]] = []
    if isinstance(spec, CirculantSpec):
        n = spec.n
        for v in range(n):
            for g in spec.generators:
                w = (v + g) % n
                if w != v:
                    edges.append((min(v, w), max(v, w)))
                # g == n/2 reaches the same vertex from both sides; the
                # single pass over +g already sees each doubled edge twice
                # (once from each endpoint), so nothing extra is needed.
        return edges
    sides = spec.sides
    strides = []
    acc = 1
    for l in reversed(sides):
        strides.append(acc)
        acc *= l
    strides.reverse()
    total = spec.vertex_count
    for v in range(total):
        coords = []
        rest = v
        for stride, l in zip(strides, sides):
            coords.append((rest // stride) % l)
        for i, l in enumerate(sides):
            if l == 1:
                continue  # self loop, drops out of the Laplacian
            w = v + ((coords[i] + 1) % l - coords[i]) * strides[i]
            if w != v:
                # l >= 3: each edge appears once (from its +e_i endpoint).
                # l == 2: +e_i and -e_i coincide, and the loop visits the same
                # unordered edge from both endpoints, which is the doubling.
                edges.append((min(v, w), max(v, w)))
    return edges


def laplacian_matrix(spec: GraphSpec, cap: int = DEFAULT_DETERMINANT_CAP) -> list[list[int]]:
    """Dense integer Laplacian L = D - A of the multigraph."""
    total = spec.vertex_count
    if total > cap:
        raise EnumerationCapError(
            f"{total} vertices exceed the dense-Laplacian cap {cap}"
        )
    L = [[0] * total for _ in range(total)]
    for u, v in multigraph_edges(spec):
        L[u][u] += 1
        L[v][v] += 1
        L[u][v] -= 1
        L[v][u] -= 1
    return L


def _bareiss_determinant(m: list[list[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination over Z."""
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            row_i = m[i]
            row_k = m[k]
            mik = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (pivot * row_i[j] - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def _reduced_laplacian_det(spec: GraphSpec, delete: int = 0,
                           cap: int = DEFAULT_DETERMINANT_CAP) -> int:
    L = laplacian_matrix(spec, cap=cap)
    reduced = [
        [L[i][j] for j in range(len(L)) if j != delete]
        for i in range(len(L))
        if i != delete
    ]
    return _bareiss_determinant(reduced)


def _is_connected(spec: GraphSpec) -> bool:
    if isinstance(spec, CirculantSpec):
        return math.gcd(spec.n, *spec.generators) == 1
    return True  # torus Cayley graphs on the standard generators are connected


def spanning_tree_count_exact(spec: GraphSpec,
                              cap: int = DEFAULT_DETERMINANT_CAP) -> TreeCount:
    """Matrix-tree count: determinant of the Laplacian with vertex 0 deleted.

    Exact over arbitrary-precision integers.  Vertex 0 is always the deleted
    one (the value is deletion-invariant; determinism is the point).
    """
    if not _is_connected(spec):
        raise GraphSpecError(f"graph {spec} is disconnected")
    det = _reduced_laplacian_det(spec, delete=0, cap=cap)
    if det <= 0:
        raise GraphSpecError(f"reduced Laplacian determinant {det} is not positive")
    return TreeCount(value=det)
