"""Graded vector spaces, graded maps, chain complexes, contractions.

The ground field is Q, scalars are fractions.Fraction.  Grading is
homological: differentials lower degree by one.  A vector is a plain dict
{basis_key: Fraction}; keys are hashable labels (strings for user-facing
models, tuples for tensor and word spaces).  A GradedMap keeps sparse
columns and knows its source, target and degree, so composition and
tensoring can apply the Koszul sign rule mechanically.

Sign conventions used throughout the package:

  (f (x) g)(x (x) y) = (-1)^{|g||x|} f(x) (x) g(y)

and more generally a tensor product of maps picks up
(-1)^{sum_{j<i} |f_i||x_j|}.  Composition of maps carries no sign.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from itertools import product
from typing import Callable, Hashable, Iterable, Sequence

from . import matrices
from .matrices import ONE, ZERO

Key = Hashable
Vec = dict  # dict[Key, Fraction]


# ---------------------------------------------------------------------------
# vectors

def vec(*pairs) -> Vec:
    return {k: Fraction(c) for k, c in pairs if c}


def basis_vec(key: Key) -> Vec:
    return {key: ONE}


def vec_add(*vs: Vec) -> Vec:
    out: Vec = {}
    for v in vs:
        for k, c in v.items():
            nc = out.get(k, ZERO) + c
            if nc:
                out[k] = nc
            else:
                out.pop(k, None)
    return out


def vec_sub(a: Vec, b: Vec) -> Vec:
    return vec_add(a, vec_scale(-ONE, b))


def vec_scale(c, v: Vec) -> Vec:
    c = Fraction(c)
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def vec_is_zero(v: Vec) -> bool:
    return all(c == 0 for c in v.values())


def vec_eq(a: Vec, b: Vec) -> bool:
    return vec_is_zero(vec_sub(a, b))


def vec_support(v: Vec) -> list:
    return [k for k, c in v.items() if c]


# ---------------------------------------------------------------------------
# spaces

class GradedSpace:
    """Finite graded vector space with an ordered, named basis per degree."""

    def __init__(self, basis_by_degree: dict[int, Sequence[Key]], name: str = ""):
        self.name = name
        self.by_degree: dict[int, tuple] = {}
        self.degree_of: dict[Key, int] = {}
        self._pos: dict[Key, int] = {}
        for n in sorted(basis_by_degree):
            keys = tuple(basis_by_degree[n])
            if not keys:
                continue
            self.by_degree[n] = keys
            for j, k in enumerate(keys):
                if k in self.degree_of:
                    raise ValueError(f"duplicate basis key {k!r}")
                self.degree_of[k] = n
                self._pos[k] = j

    # -- queries ---------------------------------------------------------

    def degrees(self) -> list[int]:
        return sorted(self.by_degree)

    @property
    def deg_min(self) -> int:
        return min(self.by_degree) if self.by_degree else 0

    @property
    def deg_max(self) -> int:
        return max(self.by_degree) if self.by_degree else 0

    def dim(self, n: int) -> int:
        return len(self.by_degree.get(n, ()))

    def total_dim(self) -> int:
        return len(self.degree_of)

    def basis(self, n: int) -> tuple:
        return self.by_degree.get(n, ())

    def all_keys(self) -> list:
        return [k for n in self.degrees() for k in self.by_degree[n]]

    def __contains__(self, key: Key) -> bool:
        return key in self.degree_of

    def sort_key(self, key: Key) -> tuple[int, int]:
        """Canonical total order on the basis: by degree, then position."""
        return (self.degree_of[key], self._pos[key])

    def check_vector(self, v: Vec, degree: int | None = None):
        for k in v:
            if k not in self.degree_of:
                raise ValueError(f"key {k!r} not in space {self.name!r}")
            if degree is not None and self.degree_of[k] != degree:
                raise ValueError(
                    f"key {k!r} has degree {self.degree_of[k]}, expected {degree}")

    def degree_of_vector(self, v: Vec) -> int | None:
        """Degree of a homogeneous vector, None for the zero vector."""
        degs = {self.degree_of[k] for k, c in v.items() if c}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"vector is not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    def to_list(self, v: Vec, n: int) -> list:
        return [v.get(k, ZERO) for k in self.basis(n)]

    def from_list(self, coeffs: Sequence, n: int) -> Vec:
        keys = self.basis(n)
        if len(coeffs) != len(keys):
            raise ValueError("coefficient count does not match basis")
        return {k: Fraction(c) for k, c in zip(keys, coeffs) if c}

    def __repr__(self):
        dims = ", ".join(f"{n}:{self.dim(n)}" for n in self.degrees())
        return f"GradedSpace({self.name or '?'}; {dims})"


def direct_sum_space(spaces: Sequence[GradedSpace], name: str = "") -> GradedSpace:
    by_deg: dict[int, list] = {}
    for idx, sp in enumerate(spaces):
        for n in sp.degrees():
            by_deg.setdefault(n, []).extend((idx, k) for k in sp.basis(n))
    return GradedSpace(by_deg, name=name)


def tensor_space(factors: Sequence[GradedSpace], name: str = "",
                 deg_min: int | None = None, deg_max: int | None = None) -> GradedSpace:
    """Tensor product with flat tuple keys, in lexicographic basis order.

    Optional degree window keeps truncated constructions finite.
    """
    by_deg: dict[int, list] = {}
    key_lists = [sp.all_keys() for sp in factors]
    for combo in product(*key_lists):
        d = sum(sp.degree_of[k] for sp, k in zip(factors, combo))
        if deg_min is not None and d < deg_min:
            continue
        if deg_max is not None and d > deg_max:
            continue
        by_deg.setdefault(d, []).append(tuple(combo))
    return GradedSpace(by_deg, name=name)


# ---------------------------------------------------------------------------
# maps

class GradedMap:
    """Linear map of graded spaces, homogeneous of a fixed degree."""

    def __init__(self, src: GradedSpace, dst: GradedSpace, degree: int,
                 entries: dict[Key, Vec] | None = None, name: str = ""):
        self.src = src
        self.dst = dst
        self.degree = degree
        self.name = name
        self.entries: dict[Key, Vec] = {}
        if entries:
            for k, v in entries.items():
                self.set_column(k, v)

    @classmethod
    def zero(cls, src: GradedSpace, dst: GradedSpace, degree: int = 0) -> "GradedMap":
        return cls(src, dst, degree)

    @classmethod
    def identity(cls, sp: GradedSpace) -> "GradedMap":
        return cls(sp, sp, 0, {k: basis_vec(k) for k in sp.all_keys()})

    @classmethod
    def from_function(cls, src: GradedSpace, dst: GradedSpace, degree: int,
                      fn: Callable[[Key], Vec], name: str = "") -> "GradedMap":
        return cls(src, dst, degree, {k: fn(k) for k in src.all_keys()}, name=name)

    def set_column(self, key: Key, value: Vec):
        if key not in self.src.degree_of:
            raise ValueError(f"source key {key!r} not in {self.src.name!r}")
        value = {k: Fraction(c) for k, c in value.items() if c}
        want = self.src.degree_of[key] + self.degree
        for k in value:
            if k not in self.dst.degree_of:
                raise ValueError(f"target key {k!r} not in {self.dst.name!r}")
            if self.dst.degree_of[k] != want:
                raise ValueError(
                    f"map {self.name or '?'}: image of {key!r} hits degree "
                    f"{self.dst.degree_of[k]}, expected {want}")
        if value:
            self.entries[key] = value
        else:
            self.entries.pop(key, None)

    def column(self, key: Key) -> Vec:
        return dict(self.entries.get(key, {}))

    def apply(self, v: Vec) -> Vec:
        out: Vec = {}
        for k, c in v.items():
            col = self.entries.get(k)
            if not col or not c:
                continue
            for kk, cc in col.items():
                nc = out.get(kk, ZERO) + c * cc
                if nc:
                    out[kk] = nc
                else:
                    out.pop(kk, None)
        return out

    __call__ = apply

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self o other (apply other first)."""
        if other.dst is not self.src and other.dst.degree_of.keys() != self.src.degree_of.keys():
            raise ValueError("composition mismatch")
        out = GradedMap(other.src, self.dst, self.degree + other.degree)
        for k, col in other.entries.items():
            img = self.apply(col)
            if img:
                out.entries[k] = img
        return out

    def __add__(self, other: "GradedMap") -> "GradedMap":
        self._check_parallel(other)
        out = GradedMap(self.src, self.dst, self.degree)
        for k in set(self.entries) | set(other.entries):
            col = vec_add(self.column(k), other.column(k))
            if col:
                out.entries[k] = col
        return out

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        return self + other.scale(-ONE)

    def scale(self, c) -> "GradedMap":
        c = Fraction(c)
        out = GradedMap(self.src, self.dst, self.degree)
        if c:
            for k, col in self.entries.items():
                out.entries[k] = vec_scale(c, col)
        return out

    def _check_parallel(self, other: "GradedMap"):
        if self.degree != other.degree:
            raise ValueError("maps are not parallel")
        for mine, theirs in ((self.src, other.src), (self.dst, other.dst)):
            if mine is not theirs and mine.degree_of != theirs.degree_of:
                raise ValueError("maps are not parallel")

    def is_zero(self) -> bool:
        return all(vec_is_zero(col) for col in self.entries.values())

    def equals(self, other: "GradedMap") -> bool:
        return (self - other).is_zero()

    def block(self, n: int) -> list:
        """Dense matrix of the degree-n block, rows indexed by the target
        basis in degree n + self.degree, columns by the source basis in
        degree n."""
        src_keys = self.src.basis(n)
        dst_keys = self.dst.basis(n + self.degree)
        mat = matrices.zeros(len(dst_keys), len(src_keys))
        for j, sk in enumerate(src_keys):
            col = self.entries.get(sk)
            if not col:
                continue
            for i, dk in enumerate(dst_keys):
                c = col.get(dk)
                if c:
                    mat[i][j] = c
        return mat

    def __repr__(self):
        return (f"GradedMap({self.name or '?'}: {self.src.name or '?'} -> "
                f"{self.dst.name or '?'}, degree {self.degree})")


def tensor_map(fs: Sequence[GradedMap], src: GradedSpace, dst: GradedSpace) -> GradedMap:
    """f_1 (x) ... (x) f_k as a map of flat tensor spaces, with Koszul signs.

    src and dst must be tensor spaces whose tuple keys match the factors;
    keys whose image leaves dst (a truncation window) raise.
    """
    k = len(fs)
    out = GradedMap(src, dst, sum(f.degree for f in fs))
    for key in src.all_keys():
        if len(key) != k:
            raise ValueError("tensor key arity mismatch")
        out.set_column(key, _apply_tensor(fs, key, dst))
    return out


def _apply_tensor(fs: Sequence[GradedMap], key: tuple, dst: GradedSpace) -> Vec:
    terms: list[tuple[tuple, Fraction]] = [((), ONE)]
    for i, f in enumerate(fs):
        sign_exp = sum(f.degree * fs[j].src.degree_of[key[j]] for j in range(i))
        img = f.entries.get(key[i], {})
        new_terms = []
        for prefix, coeff in terms:
            for kk, cc in img.items():
                s = -ONE if (sign_exp % 2) else ONE
                new_terms.append((prefix + (kk,), coeff * cc * s))
        terms = new_terms
        if not terms:
            break
    out: Vec = {}
    for tup, c in terms:
        if not c:
            continue
        if tup not in dst.degree_of:
            raise ValueError(f"tensor image key {tup!r} outside target window")
        out[tup] = out.get(tup, ZERO) + c
    return {k: c for k, c in out.items() if c}


def apply_at_slot(f: GradedMap, slot: int, v: Vec, slot_degree_of: Callable[[Key], int],
                  splice: bool = False) -> Vec:
    """Apply f to one slot of a vector with tuple keys, with the Koszul sign
    for moving f past the earlier slots.  With splice=True a tuple-valued
    image key is spliced into the word (used for coproduct iteration)."""
    out: Vec = {}
    for key, c in v.items():
        before = sum(slot_degree_of(k) for k in key[:slot])
        sign = -ONE if (f.degree * before) % 2 else ONE
        img = f.entries.get(key[slot], {})
        for kk, cc in img.items():
            if splice and isinstance(kk, tuple):
                nk = key[:slot] + kk + key[slot + 1:]
            else:
                nk = key[:slot] + (kk,) + key[slot + 1:]
            nc = out.get(nk, ZERO) + sign * c * cc
            if nc:
                out[nk] = nc
            else:
                out.pop(nk, None)
    return out


# ---------------------------------------------------------------------------
# chain complexes and homology

class ChainComplex:
    """A graded space with a square-zero degree -1 differential."""

    def __init__(self, space: GradedSpace, d: GradedMap, name: str = ""):
        if d.src is not space or d.dst is not space:
            raise ValueError("differential must be an endomap of the space")
        if d.degree != -1:
            raise ValueError("differential must have degree -1")
        self.space = space
        self.d = d
        self.name = name or space.name

    def validate(self):
        sq = self.d.compose(self.d)
        if not sq.is_zero():
            bad = sorted((k for k, col in sq.entries.items() if not vec_is_zero(col)),
                         key=self.space.sort_key)
            raise ValueError(f"d^2 != 0 on {self.name!r}, first at {bad[0]!r}")

    def betti(self) -> dict[int, int]:
        return {n: self.space.dim(n) - _rank_at(self, n) - _rank_at(self, n + 1)
                for n in self.space.degrees()}


def _rank_at(cx: ChainComplex, n: int) -> int:
    """Rank of d restricted to degree n."""
    if cx.space.dim(n) == 0 or cx.space.dim(n - 1) == 0:
        return 0
    return matrices.rank(cx.d.block(n))


class Contraction:
    """Deformation retraction data (i, p, h) between chain complexes.

    small --i--> big --p--> small, h: big -> big of degree +1, satisfying
    p i = id, id - i p = d h + h d, and the side conditions
    h h = 0, h i = 0, p h = 0.  i and p are chain maps.
    """

    def __init__(self, big: ChainComplex, small: ChainComplex,
                 i: GradedMap, p: GradedMap, h: GradedMap, fingerprint: str = ""):
        self.big = big
        self.small = small
        self.i = i
        self.p = p
        self.h = h
        self.fingerprint = fingerprint

    def validate(self):
        idS = GradedMap.identity(self.small.space)
        idB = GradedMap.identity(self.big.space)
        checks = {
            "p i = id": self.p.compose(self.i) - idS,
            "i chain map": self.i.compose(self.small.d) - self.big.d.compose(self.i),
            "p chain map": self.small.d.compose(self.p) - self.p.compose(self.big.d),
            "homotopy": (idB - self.i.compose(self.p)
                         - self.big.d.compose(self.h) - self.h.compose(self.big.d)),
            "h h = 0": self.h.compose(self.h),
            "h i = 0": self.h.compose(self.i),
            "p h = 0": self.p.compose(self.h),
        }
        bad = [name for name, m in checks.items() if not m.is_zero()]
        if bad:
            raise ValueError(f"contraction identities failed: {', '.join(bad)}")


def contraction_from_complex(cx: ChainComplex, h_name: str = "") -> Contraction:
    """Split a chain complex as boundaries + chosen cycles + a complement,
    with the canonical pivot choices, and package the result as a
    contraction onto homology (zero differential on the small side).

    The construction already satisfies the side conditions, so no
    post-processing of h is required; validate() is still the contract.
    """
    sp = cx.space
    degs = sp.degrees()
    rep_vecs: dict[int, list] = {}
    i_cols: dict[Key, Vec] = {}
    p_cols: dict[Key, Vec] = {}
    h_cols: dict[Key, Vec] = {}
    pivot_record = []

    for n in degs:
        keys = sp.basis(n)
        dim = len(keys)
        if dim == 0:
            continue
        dn = cx.d.block(n)                       # C_n -> C_{n-1}
        dn1 = cx.d.block(n + 1)                  # C_{n+1} -> C_n
        # cycles
        if sp.dim(n - 1) == 0:
            z_basis = [list(col) for col in matrices.identity(dim)]
        else:
            z_basis = matrices.nullspace(dn)
        # boundaries, with their chosen preimages (pivot columns of d_{n+1})
        b_basis: list = []
        preimages: list = []
        if sp.dim(n + 1) > 0:
            piv = matrices.column_space_pivots(dn1)
            pivot_record.append((n + 1, piv))
            up_keys = sp.basis(n + 1)
            for j in piv:
                b_basis.append([dn1[i][j] for i in range(dim)])
                preimages.append(up_keys[j])
        # extend boundary basis to the cycles, deterministically
        reps: list = []
        span = [list(v) for v in b_basis]
        r = matrices.rank(span) if span else 0
        for v in z_basis:
            cand = span + [list(v)]
            if matrices.rank(cand) > r:
                span = cand
                r += 1
                reps.append(v)
        rep_vecs[n] = reps
        # assemble the change of basis [B | reps | U] where U is the span of
        # the pivot standard vectors of d_n (the complement of the cycles)
        u_idx: list[int] = []
        if sp.dim(n - 1) > 0:
            u_idx = matrices.column_space_pivots(dn)
        cols = [list(v) for v in b_basis] + [list(v) for v in reps] + \
               [[ONE if t == j else ZERO for t in range(dim)] for j in u_idx]
        if len(cols) != dim:
            raise AssertionError("basis split has wrong size")
        P = [[cols[j][i] for j in range(len(cols))] for i in range(dim)]
        Pinv = matrices.solve_matrix(P, matrices.identity(dim))
        if Pinv is None:
            raise AssertionError("basis split is singular")
        nb = len(b_basis)
        nh = len(reps)
        hkeys = [f"H{n}_{j}" for j in range(nh)]
        for jj, key in enumerate(keys):
            coords = [Pinv[t][jj] for t in range(dim)]
            # p: the rep-block coordinates
            p_cols[key] = {hkeys[t]: coords[nb + t] for t in range(nh) if coords[nb + t]}
            # h: boundary-block coordinates go to the chosen preimages upstairs
            h_cols[key] = {}
            for t in range(nb):
                if coords[t]:
                    pk = preimages[t]
                    h_cols[key][pk] = h_cols[key].get(pk, ZERO) + coords[t]
            h_cols[key] = {k: c for k, c in h_cols[key].items() if c}

    h_space = GradedSpace(
        {n: [f"H{n}_{j}" for j in range(len(rep_vecs.get(n, [])))] for n in degs},
        name=f"H({sp.name})" if sp.name else "H")
    for n in degs:
        keys = sp.basis(n)
        for j, v in enumerate(rep_vecs.get(n, [])):
            i_cols[f"H{n}_{j}"] = {keys[t]: v[t] for t in range(len(keys)) if v[t]}

    small = ChainComplex(h_space, GradedMap.zero(h_space, h_space, -1), name=h_space.name)
    i = GradedMap(h_space, sp, 0, i_cols, name="rep")
    p = GradedMap(sp, h_space, 0, p_cols, name="proj")
    h = GradedMap(sp, sp, 1, h_cols, name=h_name or "htp")
    payload = {
        "space": {str(n): [str(k) for k in sp.basis(n)] for n in degs},
        "pivots": [[n, piv] for n, piv in pivot_record],
    }
    fp = hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]
    return Contraction(cx, small, i, p, h, fingerprint=fp)


def homology(cx: ChainComplex) -> tuple[GradedSpace, GradedMap, GradedMap]:
    """Homology with deterministic representing cycles.

    Returns (H, rep, proj) where rep: H -> C picks the canonical cycle
    representatives and proj: C -> H is the retraction with proj o rep = id
    and proj o d = 0.
    """
    con = contraction_from_complex(cx)
    return con.small.space, con.i, con.p
