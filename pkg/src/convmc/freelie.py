"""Free graded Lie algebras realized inside the tensor algebra.

Everything here uses classical homological conventions: the bracket has
degree 0, [u, v] = u(x)v - (-1)^{|u||v|} v(x)u on tensor words, and a
degree-r derivation satisfies d[u, v] = [du, v] + (-1)^{r|u|}[u, dv].
The shifted bookkeeping used by the rest of the package is a thin wrapper
applied where the Lie algebra is consumed, not here.

Bracket expressions are nested tuples ("br", left, right) over letter keys.
Left-normed expressions span the free Lie algebra, so bases are chosen by
expanding left-normed words in a fixed enumeration order and keeping the
ones that grow the rank (deterministic, so every run picks the same basis).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Sequence

from . import matrices
from .graded import GradedMap, GradedSpace, Key, Vec, vec_add, vec_scale
from .matrices import ONE, ZERO

BR = "br"


def is_bracket(e) -> bool:
    return isinstance(e, tuple) and len(e) == 3 and e[0] == BR


def br(a, b):
    return (BR, a, b)


def expr_degree(letters: GradedSpace, e) -> int:
    if is_bracket(e):
        return expr_degree(letters, e[1]) + expr_degree(letters, e[2])
    return letters.degree_of[e]


def expr_weight(e) -> int:
    if is_bracket(e):
        return expr_weight(e[1]) + expr_weight(e[2])
    return 1


def format_expr(e) -> str:
    if is_bracket(e):
        return f"[{format_expr(e[1])},{format_expr(e[2])}]"
    return str(e)


def expand(letters: GradedSpace, e) -> Vec:
    """Expansion in the tensor algebra; keys are flat letter tuples."""
    if not is_bracket(e):
        return {(e,): ONE}
    u = expand(letters, e[1])
    v = expand(letters, e[2])
    out: Vec = {}
    for tu, cu in u.items():
        du = sum(letters.degree_of[x] for x in tu)
        for tv, cv in v.items():
            dv = sum(letters.degree_of[x] for x in tv)
            c = cu * cv
            swap = c if (du * dv) % 2 else -c
            for key, cc in ((tu + tv, c), (tv + tu, swap)):
                nc = out.get(key, ZERO) + cc
                if nc:
                    out[key] = nc
                else:
                    out.pop(key, None)
    return out


def _tensor_words(letters: GradedSpace, deg_max: int) -> dict[int, list[tuple]]:
    keys = sorted(letters.all_keys(), key=letters.sort_key)
    min_deg = min((letters.degree_of[k] for k in keys), default=1)
    if min_deg < 1:
        raise ValueError("free Lie letters must sit in degrees >= 1")
    by_deg: dict[int, list[tuple]] = {}
    frontier: list[tuple[tuple, int]] = [((), 0)]
    while frontier:
        nxt = []
        for word, d in frontier:
            for k in keys:
                nd = d + letters.degree_of[k]
                if nd > deg_max:
                    continue
                w = word + (k,)
                by_deg.setdefault(nd, []).append(w)
                nxt.append((w, nd))
        frontier = nxt
    for d in by_deg:
        by_deg[d].sort(key=lambda w: (len(w), [letters.sort_key(x) for x in w]))
    return by_deg


class FreeLie:
    """Free graded Lie algebra on a letter space, truncated in degree."""

    def __init__(self, letters: GradedSpace, deg_max: int):
        for k in letters.all_keys():
            if isinstance(k, tuple) and len(k) == 3 and k[0] == BR:
                raise ValueError("letter key collides with bracket tag")
        self.letters = letters
        self.deg_max = deg_max
        self.tword = _tensor_words(letters, deg_max)
        self.tindex = {d: {w: i for i, w in enumerate(ws)}
                       for d, ws in self.tword.items()}

        keys_sorted = sorted(letters.all_keys(), key=letters.sort_key)
        min_deg = min((letters.degree_of[k] for k in keys_sorted), default=1)
        basis_by_deg: dict[int, list] = {}
        col_by_deg: dict[int, list[list]] = {}
        weight = 1
        while weight * min_deg <= deg_max:
            for seq in product(keys_sorted, repeat=weight):
                d = sum(letters.degree_of[k] for k in seq)
                if d > deg_max:
                    continue
                e = seq[0]
                for k in seq[1:]:
                    e = br(e, k)
                coords = self._coords(expand(letters, e), d)
                if all(c == 0 for c in coords):
                    continue
                cols = col_by_deg.setdefault(d, [])
                cand = cols + [coords]
                if matrices.rank([list(r) for r in zip(*cand)]) > len(cols):
                    cols.append(coords)
                    basis_by_deg.setdefault(d, []).append(e)
            weight += 1
        self.space = GradedSpace(basis_by_deg, name=f"L({letters.name})")
        self._cols = col_by_deg

    def dim(self, n: int) -> int:
        return self.space.dim(n)

    def _coords(self, tv: Vec, degree: int) -> list:
        idx = self.tindex.get(degree, {})
        out = [ZERO] * len(idx)
        for w, c in tv.items():
            if w not in idx:
                raise ValueError(f"tensor word {w!r} outside the truncation")
            out[idx[w]] = c
        return out

    def expand_vec(self, ev: Vec) -> Vec:
        out: Vec = {}
        for e, c in ev.items():
            for w, cc in expand(self.letters, e).items():
                nc = out.get(w, ZERO) + c * cc
                if nc:
                    out[w] = nc
                else:
                    out.pop(w, None)
        return out

    def express(self, tv: Vec) -> Vec:
        """Write a tensor vector in the chosen Lie basis; raises when the
        vector is not in the Lie span."""
        if not tv:
            return {}
        degs = {sum(self.letters.degree_of[x] for x in w) for w in tv}
        out: Vec = {}
        for d in sorted(degs):
            part = {w: c for w, c in tv.items()
                    if sum(self.letters.degree_of[x] for x in w) == d}
            target = self._coords(part, d)
            cols = self._cols.get(d, [])
            sol = matrices.in_span(cols, target)
            if sol is None:
                raise ValueError(f"vector is not in the Lie span in degree {d}")
            for e, c in zip(self.space.basis(d), sol):
                if c:
                    out[e] = c
        return out

    def bracket(self, u: Vec, v: Vec) -> Vec:
        """Classical bracket of two basis vectors, expressed in the basis."""
        ue = self.expand_vec(u)
        ve = self.expand_vec(v)
        out: Vec = {}
        for tu, cu in ue.items():
            du = sum(self.letters.degree_of[x] for x in tu)
            for tv, cv in ve.items():
                dv = sum(self.letters.degree_of[x] for x in tv)
                if du + dv > self.deg_max:
                    raise ValueError("bracket leaves the truncation window")
                c = cu * cv
                swap = c if (du * dv) % 2 else -c
                for key, cc in ((tu + tv, c), (tv + tu, swap)):
                    nc = out.get(key, ZERO) + cc
                    if nc:
                        out[key] = nc
                    else:
                        out.pop(key, None)
        return self.express(out)

    def derivation(self, letter_values: dict[Key, Vec], degree: int,
                   name: str = "") -> GradedMap:
        """Extend values on letters to a degree-r derivation of the free Lie
        algebra, as a map in the chosen basis."""

        memo: dict = {}

        def value(e) -> Vec:
            if e in memo:
                return memo[e]
            if not is_bracket(e):
                out = dict(letter_values.get(e, {}))
            else:
                a, b = e[1], e[2]
                da = expr_degree(self.letters, a)
                va = value(a)
                vb = value(b)
                ea = self.express(expand(self.letters, a))
                eb = self.express(expand(self.letters, b))
                out = self.bracket(va, eb) if va else {}
                if vb:
                    term = self.bracket(ea, vb)
                    sgn = -ONE if (degree * da) % 2 else ONE
                    out = vec_add(out, vec_scale(sgn, term))
            memo[e] = out
            return out

        cols = {e: value(e) for e in self.space.all_keys()}
        return GradedMap(self.space, self.space, degree, cols, name=name)
