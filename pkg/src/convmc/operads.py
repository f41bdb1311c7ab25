"""Arity-truncated operads and cooperads: the one-dimensional
cocommutative cooperad, the Lie operad on left-normed monomials, the
pre-Lie bracket of an operad, convolution operads, and the twisting
morphism check.

Permutations are tuples of images: sigma = (sigma(1), ..., sigma(n)),
1-based.  The right action relabels letter j to sigma(j), so acting by
sigma and then rho equals acting by their diagrammatic composite
("first sigma, then rho").

Carriers here live in degree 0; the degree -1 of generating operations
is carried as a formal degree on twisting morphisms.  The pre-Lie sum
runs over slots i and set partitions into blocks of sizes
(1, ..., 1, m, 1, ..., 1) whose minima increase left to right; in the
suspension convention (formally odd elements, as for the twisting
morphism kappa) each term picks up the partition permutation's sign
times (-1)^{(i-1)(m-1)} from the desuspension cooperad and a global
(-1)^{n-1} from evaluating the odd second factor.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations
from math import factorial

from . import matrices
from .freelie import br, expand, is_bracket
from .graded import GradedMap, GradedSpace, Key, Vec
from .matrices import ONE, ZERO

F = Fraction

Perm = tuple[int, ...]


def perm_identity(n: int) -> Perm:
    return tuple(range(1, n + 1))


def perm_compose(sigma: Perm, rho: Perm) -> Perm:
    """First sigma, then rho: j goes to rho(sigma(j))."""
    return tuple(rho[sigma[j] - 1] for j in range(len(sigma)))


def perm_inverse(sigma: Perm) -> Perm:
    out = [0] * len(sigma)
    for j, img in enumerate(sigma, start=1):
        out[img - 1] = j
    return tuple(out)


def perm_sign(sigma: Perm) -> int:
    sign = 1
    for a in range(len(sigma)):
        for b in range(a + 1, len(sigma)):
            if sigma[a] > sigma[b]:
                sign = -sign
    return sign


# ---------------------------------------------------------------------------
# generic containers

class TruncatedOperad:
    """Arity-indexed spaces with symmetric actions and partial compositions."""

    def __init__(self, spaces: dict[int, GradedSpace], act, compose,
                 name: str = "", differentials: dict[int, GradedMap] | None = None):
        self.spaces = spaces
        self._act = act
        self._compose = compose
        self.name = name
        self.differentials = differentials or {}

    @property
    def arity_max(self) -> int:
        return max(self.spaces)

    def space(self, n: int) -> GradedSpace:
        if n not in self.spaces:
            raise ValueError(f"arity {n} outside truncation of {self.name!r}")
        return self.spaces[n]

    def act(self, n: int, sigma: Perm, v: Vec) -> Vec:
        if len(sigma) != n:
            raise ValueError("permutation length mismatch")
        return self._act(n, sigma, v)

    def compose(self, n: int, m: int, i: int, u: Vec, v: Vec) -> Vec:
        if not 1 <= i <= n:
            raise ValueError(f"slot {i} out of range for arity {n}")
        if n + m - 1 not in self.spaces:
            raise ValueError("composite arity outside truncation")
        return self._compose(n, m, i, u, v)

    def differential(self, n: int) -> GradedMap | None:
        return self.differentials.get(n)


class TruncatedCooperad:
    """Arity-indexed spaces with symmetric actions and partial
    decompositions, stored as term lists per basis key."""

    def __init__(self, spaces: dict[int, GradedSpace], act, decompose,
                 name: str = "", differentials: dict[int, GradedMap] | None = None):
        self.spaces = spaces
        self._act = act
        self._decompose = decompose
        self.name = name
        self.differentials = differentials or {}

    @property
    def arity_max(self) -> int:
        return max(self.spaces)

    def space(self, n: int) -> GradedSpace:
        if n not in self.spaces:
            raise ValueError(f"arity {n} outside truncation of {self.name!r}")
        return self.spaces[n]

    def act(self, n: int, sigma: Perm, v: Vec) -> Vec:
        return self._act(n, sigma, v)

    def decompose(self, key: Key, n: int, i: int) -> list[tuple[Fraction, Key, Key]]:
        """Terms (coefficient, arity-n key, arity-m key) of the partial
        decomposition of a basis key of arity n+m-1 at slot i."""
        return self._decompose(key, n, i)

    def differential(self, n: int) -> GradedMap | None:
        return self.differentials.get(n)


# ---------------------------------------------------------------------------
# the cocommutative cooperad

def cocom(arity_max: int) -> TruncatedCooperad:
    """One-dimensional in each arity, trivial action; the decomposition of
    mu_N at slot i of an arity-n operation is mu_n tensor mu_m with
    coefficient one."""
    if arity_max < 1:
        raise ValueError("need arity_max >= 1")
    spaces = {n: GradedSpace({0: [("mu", n)]}, name=f"COCOM({n})")
              for n in range(1, arity_max + 1)}

    def act(n, sigma, v):
        return dict(v)

    def decompose(key, n, i):
        N = key[1]
        m = N - n + 1
        if m < 1 or not 1 <= i <= n:
            return []
        return [(ONE, ("mu", n), ("mu", m))]

    return TruncatedCooperad(spaces, act, decompose, name="COCOM")


def cocom_coproduct_terms(n: int) -> list[tuple[int, int]]:
    """The (p, i) index pairs of the full coproduct of mu_n: p runs over
    output arities, i over slots up to p."""
    return [(p, i) for p in range(1, n + 1) for i in range(1, p + 1)]


# ---------------------------------------------------------------------------
# the Lie operad

def _relabel_expr(e, f):
    if is_bracket(e):
        return br(_relabel_expr(e[1], f), _relabel_expr(e[2], f))
    return f(e)


def _substitute_expr(e, slot: int, sub):
    """Replace the letter `slot` by the expression sub (already relabeled)."""
    if is_bracket(e):
        return br(_substitute_expr(e[1], slot, sub),
                  _substitute_expr(e[2], slot, sub))
    return sub if e == slot else e


class LieOperad(TruncatedOperad):
    """LIE(n) on the left-normed basis [[...[x_1, x_t(2)]...], x_t(n)],
    t a permutation of {2..n}; dimension (n-1)!.

    Elements are vectors over the basis expressions.  Composition
    substitutes and rewrites into the basis; the action relabels letters.
    Internally the letters sit in even degree, so tensor-algebra signs
    are classical.
    """

    def __init__(self, arity_max: int):
        if arity_max < 2:
            raise ValueError("need arity_max >= 2")
        self._letters: dict[int, GradedSpace] = {}
        self._windex: dict[int, dict[tuple, int]] = {}
        self._basis: dict[int, list] = {}
        self._cols: dict[int, list[list]] = {}
        spaces: dict[int, GradedSpace] = {}
        for n in range(1, arity_max + 1):
            letters = GradedSpace({2: list(range(1, n + 1))}, name=f"x{n}")
            self._letters[n] = letters
            words = sorted(permutations(range(1, n + 1)))
            self._windex[n] = {w: r for r, w in enumerate(words)}
            basis = []
            cols = []
            for tau in permutations(range(2, n + 1)):
                e = 1
                for k in tau:
                    e = br(e, k)
                basis.append(e)
                cols.append(self._coords(n, expand(letters, e)))
            if n > 1:
                rk = matrices.rank([list(r) for r in zip(*cols)])
                if rk != factorial(n - 1):
                    raise AssertionError(
                        f"left-normed monomials span rank {rk} in arity {n}, "
                        f"expected {factorial(n - 1)}")
            self._basis[n] = basis
            self._cols[n] = cols
            spaces[n] = GradedSpace({0: basis}, name=f"LIE({n})")
        super().__init__(spaces, self._act_impl, self._compose_impl,
                         name="LIE")

    def _coords(self, n: int, tv: Vec) -> list:
        idx = self._windex[n]
        out = [ZERO] * len(idx)
        for w, c in tv.items():
            if w not in idx:
                raise ValueError(f"non-multilinear word {w!r} in arity {n}")
            out[idx[w]] = c
        return out

    def express(self, n: int, tv: Vec) -> Vec:
        """Rewrite a multilinear tensor vector in the left-normed basis."""
        if not tv:
            return {}
        sol = matrices.in_span(self._cols[n], self._coords(n, tv))
        if sol is None:
            raise ValueError(f"vector is not in the Lie span in arity {n}")
        return {e: c for e, c in zip(self._basis[n], sol) if c}

    def _expand_vec(self, n: int, v: Vec) -> Vec:
        out: Vec = {}
        letters = self._letters[n]
        for e, c in v.items():
            for w, cc in expand(letters, e).items():
                nc = out.get(w, ZERO) + c * cc
                if nc:
                    out[w] = nc
                else:
                    out.pop(w, None)
        return out

    def _act_impl(self, n: int, sigma: Perm, v: Vec) -> Vec:
        moved = {}
        for e, c in v.items():
            e2 = _relabel_expr(e, lambda j: sigma[j - 1])
            moved[e2] = moved.get(e2, ZERO) + c
        return self.express(n, self._expand_vec(n, moved))

    def _compose_impl(self, n: int, m: int, i: int, u: Vec, v: Vec) -> Vec:
        N = n + m - 1
        out: Vec = {}
        for eu, cu in u.items():
            for ev, cv in v.items():
                sub = _relabel_expr(ev, lambda j: j + i - 1)
                shifted = _relabel_expr(eu,
                                        lambda j: j + m - 1 if j > i else j)
                e = _substitute_expr(shifted, i, sub)
                out[e] = out.get(e, ZERO) + cu * cv
        return self.express(N, self._expand_vec(N, out))

    def bracket_generator(self) -> Vec:
        return {br(1, 2): ONE}


def lie(arity_max: int) -> LieOperad:
    return LieOperad(arity_max)


# ---------------------------------------------------------------------------
# pre-Lie bracket

def tree_terms(n: int, m: int):
    """Slots i and minima-increasing partitions of {1..n+m-1} into blocks
    of sizes (1,...,1,m,1,...,1) with the m-block at spot i.  Yields
    (i, sigma, parity): sigma assigns a letter to each slot of the
    composite (the m-block occupies slots i..i+m-1 in increasing order)."""
    N = n + m - 1
    for i in range(1, n + 1):
        for S in combinations(range(1, N + 1), m):
            rest = [x for x in range(1, N + 1) if x not in S]
            minima = []
            ri = 0
            ok = True
            for spot in range(1, n + 1):
                if spot == i:
                    minima.append(S[0])
                else:
                    minima.append(rest[ri])
                    ri += 1
            if any(a >= b for a, b in zip(minima, minima[1:])):
                ok = False
            if not ok:
                continue
            sigma = [0] * N
            ri = 0
            for spot in range(1, n + 1):
                if spot == i:
                    for k, letter in enumerate(S):
                        sigma[i - 1 + k] = letter
                else:
                    slot = spot if spot < i else spot + m - 1
                    sigma[slot - 1] = rest[ri]
                    ri += 1
            sigma = tuple(sigma)
            yield i, sigma, perm_sign(sigma)


def prelie_bracket(P: TruncatedOperad, n: int, u: Vec, m: int, v: Vec,
                   suspension: bool = False) -> Vec:
    """{u, v} for u of arity n and v of arity m.

    With suspension=False this is the plain sum of relabeled partial
    composites (the pre-Lie product for degree-0 elements).  With
    suspension=True the terms carry the signs of the shifted convention
    used for twisting morphisms: the partition permutation's sign and
    (-1)^{(i-1)(m-1)} from decomposing the shifted cooperad, and
    (-1)^{(n-1)(m-1)} from evaluating the second factor, whose arity-m
    component has honest map degree 1-m.  In that convention the
    arity-n part of an element is even or odd according to n-1, and the
    graded pre-Lie identity holds with those degrees."""
    out: Vec = {}
    for i, sigma, parity in tree_terms(n, m):
        term = P.act(n + m - 1, sigma, P.compose(n, m, i, u, v))
        s = ONE
        if suspension:
            sgn = parity
            if (i - 1) * (m - 1) % 2:
                sgn = -sgn
            if (n - 1) * (m - 1) % 2:
                sgn = -sgn
            s = F(sgn)
        for k, c in term.items():
            nc = out.get(k, ZERO) + s * c
            if nc:
                out[k] = nc
            else:
                out.pop(k, None)
    return out


# ---------------------------------------------------------------------------
# convolution operad

def hom_space(C: TruncatedCooperad, P: TruncatedOperad, n: int) -> GradedSpace:
    by_deg: dict[int, list] = {}
    cs = C.space(n)
    ps = P.space(n)
    for ck in cs.all_keys():
        for pk in ps.all_keys():
            d = ps.degree_of[pk] - cs.degree_of[ck]
            by_deg.setdefault(d, []).append((ck, pk))
    return GradedSpace(by_deg, name=f"Hom({C.name}({n}),{P.name}({n}))")


def convolution_operad(C: TruncatedCooperad, P: TruncatedOperad,
                       arity_max: int | None = None) -> TruncatedOperad:
    """Arity n part = all linear maps C(n) -> P(n); the action conjugates,
    f^sigma(x) = (f(x^{sigma^{-1}}))^sigma; compositions pair the partial
    decompositions of C with the partial compositions of P.

    C must be concentrated in degree 0 (true for COCOM), so no Koszul
    signs enter the composition here.
    """
    amax = arity_max or min(C.arity_max, P.arity_max)
    for n in range(1, amax + 1):
        if C.space(n).degrees() not in ([], [0]):
            raise ValueError("cooperad carrier must sit in degree 0")
    spaces = {n: hom_space(C, P, n) for n in range(1, amax + 1)}

    def col(fvec: Vec, ck: Key) -> Vec:
        return {pk: c for (ck2, pk), c in fvec.items() if ck2 == ck}

    def act(n, sigma, fvec):
        inv = perm_inverse(sigma)
        out: Vec = {}
        for ck in C.space(n).all_keys():
            moved = C.act(n, inv, {ck: ONE})
            val: Vec = {}
            for ck2, c in moved.items():
                for pk, cc in col(fvec, ck2).items():
                    val[pk] = val.get(pk, ZERO) + c * cc
            for pk, c in P.act(n, sigma, val).items():
                if c:
                    out[(ck, pk)] = c
        return out

    def compose(n, m, i, fvec, gvec):
        N = n + m - 1
        out: Vec = {}
        for ck in C.space(N).all_keys():
            for coeff, ck_n, ck_m in C.decompose(ck, n, i):
                val = P.compose(n, m, i, col(fvec, ck_n), col(gvec, ck_m))
                for pk, c in val.items():
                    key = (ck, pk)
                    nc = out.get(key, ZERO) + coeff * c
                    if nc:
                        out[key] = nc
                    else:
                        out.pop(key, None)
        return out

    return TruncatedOperad(spaces, act, compose,
                           name=f"Hom({C.name},{P.name})")


def phi_unit(f: GradedMap, n: int) -> Vec:
    """The arity-wise bijection Hom(COCOM, P)(n) -> P(n): evaluate at mu_n."""
    return f.column(("mu", n))


def phi_unit_inverse(C: TruncatedCooperad, P: TruncatedOperad, n: int,
                     v: Vec) -> GradedMap:
    return GradedMap(C.space(n), P.space(n),
                     P.space(n).degree_of_vector(v) or 0,
                     {("mu", n): dict(v)})


# ---------------------------------------------------------------------------
# twisting morphisms

class OperadMap:
    """Arity-wise map from a cooperad to an operad with a formal degree
    (the physical carriers sit in degree 0; the -1 of a twisting morphism
    is bookkeeping)."""

    def __init__(self, C: TruncatedCooperad, P: TruncatedOperad,
                 components: dict[int, GradedMap], formal_degree: int = -1,
                 name: str = ""):
        self.C = C
        self.P = P
        self.components = dict(components)
        self.formal_degree = formal_degree
        self.name = name

    def component(self, n: int) -> GradedMap:
        if n in self.components:
            return self.components[n]
        return GradedMap.zero(self.C.space(n), self.P.space(n))

    def value(self, n: int) -> Vec:
        """The image of mu_n (COCOM source)."""
        return self.component(n).column(("mu", n))

    def scale(self, c) -> "OperadMap":
        return OperadMap(self.C, self.P,
                         {n: f.scale(F(c)) for n, f in self.components.items()},
                         self.formal_degree, name=f"{c}*{self.name}")


def kappa(C: TruncatedCooperad, P: LieOperad) -> OperadMap:
    """The twisting morphism sending mu_2 to the Lie bracket generator and
    every other mu_n to zero."""
    comp = GradedMap(C.space(2), P.space(2), 0,
                     {("mu", 2): P.bracket_generator()})
    return OperadMap(C, P, {2: comp}, formal_degree=-1, name="kappa")


def operadic_mc_check(tau: OperadMap) -> tuple[bool, dict[int, Vec]]:
    """Evaluate the twisting-morphism equation d(tau) + {tau, tau} arity
    by arity; returns (all zero?, residuals by arity).

    The differential term uses the stored differentials of source and
    target (zero for the built-ins).  The pre-Lie square uses the
    suspension signs when tau is formally odd.
    """
    C, P = tau.C, tau.P
    amax = min(C.arity_max, P.arity_max)
    suspension = tau.formal_degree % 2 == 1
    residuals: dict[int, Vec] = {}
    for N in range(1, amax + 1):
        res: Vec = {}
        dP = P.differential(N)
        if dP is not None:
            for k, c in dP.apply(tau.value(N)).items():
                res[k] = res.get(k, ZERO) + c
        dC = C.differential(N)
        if dC is not None:
            sgn = -ONE if tau.formal_degree % 2 else ONE
            moved = dC.apply({("mu", N): ONE})
            for ck, c in moved.items():
                for pk, cc in tau.component(N).column(ck).items():
                    res[pk] = res.get(pk, ZERO) - sgn * c * cc
        for n in tau.components:
            m = N - n + 1
            if m < 1 or m not in tau.components:
                continue
            sq = prelie_bracket(P, n, tau.value(n), m, tau.value(m),
                                suspension=suspension)
            for k, c in sq.items():
                res[k] = res.get(k, ZERO) + c
        res = {k: c for k, c in res.items() if c}
        residuals[N] = res
    ok = all(not r for r in residuals.values())
    return ok, residuals
