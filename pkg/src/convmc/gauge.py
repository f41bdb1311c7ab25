"""Gauge paths between Maurer-Cartan elements, exact polynomial flows,
and a certified equivalence decision for convolution algebras.

A gauge path is a Maurer-Cartan element of the convolution algebra after
extending the target by polynomial forms on the interval: its value on a
source element is a polynomial family x(t) plus a dt part lambda(t) dt.
The extended Maurer-Cartan equation says simultaneously that every x(t)
is Maurer-Cartan and that dx/dt equals the gauge vector field

    dx/dt = l_1(lambda) + sum_{n>=1} 1/n! l_{n+1}(lambda, x, ..., x),

so flowing along a degree-1 direction and checking a claimed path are
both exact computations over Fraction scalars.  gauge_equivalent returns
a certificate in every case: Equal carries a chain of paths that can be
replayed through path_check, Distinct carries a reason that verify()
recomputes from scratch, and Unknown is an honest failure to decide.

The decision procedure is staged by source degree.  One-reduced sources
filter the convolution algebra by the degree of the source cell, and a
direction supported in source degrees {p-1, p} moves columns below p-1
not at all and column p linearly, which turns each stage into a linear
algebra problem over the rationals.  Three unreachability arguments are
implemented, all sound: a rigidity sweep (columns that no direction can
move at all are constant along every path, so a difference in the first
non-rigid column must lie in the span of the available move rates), the
abelian case (where reachability is exactly a coset of the image of the
differential, so the decision is complete and a failure yields a nonzero
homology class as witness), and a twisted Betti comparison (equivalent
elements have isomorphic twisted homology).
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial

from .convolution import ConvolutionAlgebra
from .graded import GradedMap, Vec
from .matrices import (ONE, ZERO, coset_reduce, in_span, nullspace,
                       vectors_equal)
from .models import extension_of_scalars

F = Fraction


def default_poly_bound(conv: ConvolutionAlgebra) -> int:
    """Polynomial degree bound that covers the flows of every nilpotency
    depth a source of this size can produce, with slack."""
    degrees = {conv.C.space.degree_of[k] for k in conv.C.space.all_keys()}
    return max(4, len(degrees) + 2)


def vector_field(conv: ConvolutionAlgebra, x: GradedMap,
                 lam: GradedMap) -> GradedMap:
    """Right-hand side of the gauge flow equation at the point x in the
    direction lam: l_1(lam) + sum 1/n! l_{n+1}(lam, x, ..., x)."""
    if lam.degree != 1:
        raise ValueError("gauge directions must have degree 1")
    out = conv.bracket(1, [lam])
    for n in range(1, conv.arity_window()):
        term = conv.bracket(n + 1, [lam] + [x] * n)
        out = out + term.scale(F(1, factorial(n)))
    return out


# -- paths ---------------------------------------------------------------

class GaugePath:
    """A polynomial family of elements of Hom(C, L) together with its dt
    part, bundled as a single map into L extended by interval forms.

    p_parts[k] is the coefficient of t^k (a degree-0 map), q_parts[k]
    the coefficient of t^k dt (a degree-1 map).  The family is a genuine
    gauge path exactly when path_check() vanishes; nothing is checked at
    construction time so that failing paths can be built and inspected.
    """

    def __init__(self, conv: ConvolutionAlgebra, poly_bound: int,
                 p_parts: dict[int, GradedMap],
                 q_parts: dict[int, GradedMap]):
        self.conv = conv
        self.poly_bound = poly_bound
        self.p_parts = {k: f for k, f in sorted(p_parts.items())
                        if not f.is_zero()}
        self.q_parts = {k: f for k, f in sorted(q_parts.items())
                        if not f.is_zero()}
        for k, f in self.p_parts.items():
            if f.degree != 0:
                raise ValueError("polynomial parts must have degree 0")
            if k > poly_bound:
                raise ValueError(
                    f"polynomial part t^{k} exceeds bound {poly_bound}")
        for k, f in self.q_parts.items():
            if f.degree != 1:
                raise ValueError("dt parts must have degree 1")
            if k > poly_bound:
                raise ValueError(
                    f"dt part t^{k} dt exceeds bound {poly_bound}")
        ext, _, _ = extension_of_scalars(conv.L, poly_bound)
        self.ext = ext
        self.ext_conv = ConvolutionAlgebra(conv.C, ext)
        cols: dict = {}
        for k, f in self.p_parts.items():
            for ck, col in f.entries.items():
                dst = cols.setdefault(ck, {})
                for lk, c in col.items():
                    dst[(("p", k), lk)] = dst.get((("p", k), lk), ZERO) + c
        for k, f in self.q_parts.items():
            for ck, col in f.entries.items():
                dst = cols.setdefault(ck, {})
                for lk, c in col.items():
                    dst[(("q", k), lk)] = dst.get((("q", k), lk), ZERO) + c
        self.z = GradedMap(conv.C.space, ext.space, 0, cols)

    def path_check(self) -> GradedMap:
        """Extended Maurer-Cartan residual of the family; the path is
        valid exactly when this is zero."""
        return self.ext_conv.mc_check(self.z)

    def endpoint(self, t) -> GradedMap:
        """The element x(t), by evaluating the polynomial parts."""
        t = F(t)
        out = self.conv.zero_map(0)
        for k, f in self.p_parts.items():
            out = out + f.scale(t ** k)
        return out

    def direction(self, t) -> GradedMap:
        """The gauge direction lambda(t) multiplying dt."""
        t = F(t)
        out = self.conv.zero_map(1)
        for k, f in self.q_parts.items():
            out = out + f.scale(t ** k)
        return out

    def reversed(self) -> "GaugePath":
        """The same path run backwards, by substituting 1 - t."""
        new_p: dict[int, GradedMap] = {}
        new_q: dict[int, GradedMap] = {}
        for k, f in self.p_parts.items():
            for j in range(k + 1):
                c = F(comb(k, j)) * (-1) ** j
                part = f.scale(c)
                new_p[j] = new_p[j] + part if j in new_p else part
        for k, f in self.q_parts.items():
            for j in range(k + 1):
                c = -F(comb(k, j)) * (-1) ** j
                part = f.scale(c)
                new_q[j] = new_q[j] + part if j in new_q else part
        return GaugePath(self.conv, self.poly_bound, new_p, new_q)


def constant_path(conv: ConvolutionAlgebra, x: GradedMap,
                  poly_bound: int = 1) -> GaugePath:
    return GaugePath(conv, poly_bound, {0: x}, {})


# -- flowing -------------------------------------------------------------

def _lift(conv: ConvolutionAlgebra, ext, f: GradedMap, form_key) -> GradedMap:
    """f tensor a basis interval form, as a map into the extension."""
    shift = 0 if form_key[0] == "p" else -1
    cols: dict = {}
    for ck, col in f.entries.items():
        cols[ck] = {(form_key, lk): c for lk, c in col.items()}
    return GradedMap(conv.C.space, ext.space, f.degree + shift, cols)


def _integrate(conv: ConvolutionAlgebra, ext, rate: GradedMap,
               poly_bound: int) -> GradedMap:
    """Indefinite integral from 0 of a purely polynomial family."""
    cols: dict = {}
    for ck, col in rate.entries.items():
        dst: Vec = {}
        for (fk, lk), c in col.items():
            kind, k = fk
            if kind != "p":
                raise AssertionError("flow rate picked up a dt component")
            if k + 1 > poly_bound:
                raise ValueError(
                    f"integration needs polynomial degree {k + 1}, "
                    f"bound is {poly_bound}")
            dst[(("p", k + 1), lk)] = c * F(1, k + 1)
        if dst:
            cols[ck] = dst
    return GradedMap(conv.C.space, ext.space, rate.degree, cols)


def _split_parts(conv: ConvolutionAlgebra,
                 zmap: GradedMap) -> dict[int, GradedMap]:
    """Decompose a map into the extension into its t^k coefficients."""
    parts: dict[int, dict] = {}
    for ck, col in zmap.entries.items():
        for (fk, lk), c in col.items():
            kind, k = fk
            if kind != "p":
                raise AssertionError("expected a polynomial-only family")
            parts.setdefault(k, {}).setdefault(ck, {})[lk] = c
    return {k: GradedMap(conv.C.space, conv.L.space, 0, cols)
            for k, cols in parts.items()}


def gauge_flow(conv: ConvolutionAlgebra, x: GradedMap, lam: GradedMap,
               poly_bound: int | None = None) -> GaugePath:
    """Integrate the gauge flow from x along the constant direction lam.

    The solution is found by exact Picard iteration in Hom(C, Omega (x) L):
    each pass substitutes the current polynomial family into the vector
    field and integrates, and nilpotence of the convolution algebra makes
    the iteration stabilize after finitely many passes.  Raises ValueError
    when the chosen polynomial bound is too small for the flow, naming
    the degree that was needed.
    """
    if lam.degree != 1:
        raise ValueError("gauge directions must have degree 1")
    res = conv.mc_check(x)
    if not res.is_zero():
        raise ValueError(
            f"cannot flow a non-MC element, residual {res.entries!r}")
    if poly_bound is None:
        poly_bound = default_poly_bound(conv)
    ext, _, _ = extension_of_scalars(conv.L, poly_bound)
    ext_conv = ConvolutionAlgebra(conv.C, ext)
    lam_p = _lift(conv, ext, lam, ("p", 0))
    base = _lift(conv, ext, x, ("p", 0))
    window = ext_conv.arity_window()
    current = base
    for _ in range(poly_bound + 2):
        try:
            rate = ext_conv.bracket(1, [lam_p])
            for n in range(1, window):
                term = ext_conv.bracket(n + 1, [lam_p] + [current] * n)
                rate = rate + term.scale(F(1, factorial(n)))
            nxt = base + _integrate(conv, ext, rate, poly_bound)
        except ValueError as err:
            raise ValueError(
                f"gauge flow needs a larger polynomial bound than "
                f"{poly_bound}: {err}") from err
        if nxt.equals(current):
            break
        current = nxt
    else:
        raise ValueError(
            f"gauge flow did not stabilize within polynomial bound "
            f"{poly_bound}")
    path = GaugePath(conv, poly_bound, _split_parts(conv, current),
                     {0: lam})
    if not path.path_check().is_zero():
        raise AssertionError(
            "integrated flow fails the extended Maurer-Cartan equation")
    return path


# -- certificates --------------------------------------------------------

class Equal:
    """Positive certificate: a chain of gauge paths from x to y."""

    outcome = "equal"

    def __init__(self, conv: ConvolutionAlgebra, x: GradedMap, y: GradedMap,
                 paths: tuple[GaugePath, ...]):
        self.conv = conv
        self.x = x
        self.y = y
        self.paths = tuple(paths)

    def verify(self) -> bool:
        if not self.conv.mc_check(self.x).is_zero():
            return False
        if not self.conv.mc_check(self.y).is_zero():
            return False
        at = self.x
        for path in self.paths:
            if not path.path_check().is_zero():
                return False
            if not path.endpoint(0).equals(at):
                return False
            at = path.endpoint(1)
        return at.equals(self.y)

    def __repr__(self):
        return f"Equal(paths={len(self.paths)})"


class Distinct:
    """Negative certificate; kind says which unreachability argument
    applies and verify() recomputes it from the stored data."""

    outcome = "distinct"

    def __init__(self, conv: ConvolutionAlgebra, x: GradedMap, y: GradedMap,
                 kind: str, witness: dict):
        self.conv = conv
        self.x = x
        self.y = y
        self.kind = kind
        self.witness = witness

    def verify(self) -> bool:
        conv, x, y = self.conv, self.x, self.y
        if not conv.mc_check(x).is_zero() or not conv.mc_check(y).is_zero():
            return False
        if self.kind == "rigid-stage":
            return _rigidity_sweep(conv, x, y) == self.witness["degree"]
        if self.kind == "homology-class":
            if conv.arity_window() > 1:
                return False
            diff = y - x
            if diff.is_zero():
                return False
            tw = conv.twist(x)
            dv = conv.to_vec(diff)
            if any(tw.d.apply(dv).values()):
                return False
            keys0 = _degree_keys(conv, 0)
            bnd = [_dense(keys0, tw.d.apply({k: ONE}))
                   for k in _degree_keys(conv, 1)]
            return in_span(bnd, _dense(keys0, dv)) is None
        if self.kind == "twisted-betti":
            bx = _nonzero_betti(conv.twisted_betti(x))
            by = _nonzero_betti(conv.twisted_betti(y))
            return (bx, by) == (self.witness["betti_x"],
                                self.witness["betti_y"]) and bx != by
        return False

    def __repr__(self):
        return f"Distinct(kind={self.kind!r})"


class Unknown:
    """Honest failure to decide either way."""

    outcome = "unknown"

    def __init__(self, reason: str):
        self.reason = reason

    def __repr__(self):
        return f"Unknown({self.reason!r})"


class ModuliClass:
    """A canonical representative together with the chain of gauge paths
    that carries the starting element onto it."""

    def __init__(self, conv: ConvolutionAlgebra, start: GradedMap,
                 representative: GradedMap, paths: tuple[GaugePath, ...]):
        self.conv = conv
        self.start = start
        self.representative = representative
        self.paths = tuple(paths)

    def verify(self) -> bool:
        if not self.conv.mc_check(self.representative).is_zero():
            return False
        at = self.start
        for path in self.paths:
            if not path.path_check().is_zero():
                return False
            if not path.endpoint(0).equals(at):
                return False
            at = path.endpoint(1)
        return at.equals(self.representative)

    def __repr__(self):
        return (f"ModuliClass(representative="
                f"{sorted(self.representative.entries)!r}, "
                f"paths={len(self.paths)})")


# -- dense linear algebra over carrier slices ----------------------------

def _degree_keys(conv: ConvolutionAlgebra, d: int) -> list:
    keys = [k for k in conv.carrier.all_keys()
            if conv.carrier.degree_of[k] == d]
    return sorted(keys, key=conv.carrier.sort_key)


def _dense(keys: list, v: Vec) -> list:
    return [v.get(k, ZERO) for k in keys]


def _nonzero_betti(b: dict[int, int]) -> dict[int, int]:
    return {k: v for k, v in sorted(b.items()) if v}


def _direction_maps(conv: ConvolutionAlgebra) -> list[tuple]:
    """The elementary degree-1 directions, paired with their carrier key."""
    return [(k, conv.elementary(*k)) for k in _degree_keys(conv, 1)]


def _combine(conv: ConvolutionAlgebra, dirs: list[tuple],
             coeffs: list) -> GradedMap:
    out = conv.zero_map(1)
    for (key, e), c in zip(dirs, coeffs):
        if c:
            out = out + e.scale(c)
    return out


# -- the rigidity sweep --------------------------------------------------

def _rigidity_sweep(conv: ConvolutionAlgebra, x: GradedMap,
                    y: GradedMap) -> int | None:
    """Source degree at which x and y are certifiably inequivalent, or
    None when the sweep is inconclusive.

    Walking source degrees from the bottom: while every direction has
    zero flow rate on all columns seen so far, those columns are constant
    along every gauge path out of x, so the rates computed at x stay
    exact one degree higher.  At the first degree where the difference is
    nonzero it must lie in the span of the rates there; if it does not,
    no path from x reaches y.
    """
    diff = conv.to_vec(y - x)
    dirs = _direction_maps(conv)
    rates = [conv.to_vec(vector_field(conv, x, e)) for _, e in dirs]
    cdeg = conv.C.space.degree_of
    keys0 = _degree_keys(conv, 0)
    for p in sorted({cdeg[k] for k in conv.C.space.all_keys()}):
        basis = [k for k in keys0 if cdeg[k[0]] == p]
        if not basis:
            continue
        dp = _dense(basis, diff)
        moves = [_dense(basis, r) for r in rates]
        if any(dp):
            if in_span(moves, dp) is None:
                return p
            return None
        if any(any(m) for m in moves):
            return None
    return None


# -- normal forms --------------------------------------------------------

def _abelian_normal_form(conv: ConvolutionAlgebra, x: GradedMap,
                         poly_bound: int) -> ModuliClass:
    dirs = _direction_maps(conv)
    keys0 = _degree_keys(conv, 0)
    effects = [_dense(keys0, conv.to_vec(conv.differential_of(e)))
               for _, e in dirs]
    xv = _dense(keys0, conv.to_vec(x))
    red = coset_reduce(xv, effects)
    if vectors_equal(red, xv):
        return ModuliClass(conv, x, x, ())
    coeffs = in_span(effects, [r - c for r, c in zip(red, xv)])
    lam = _combine(conv, dirs, coeffs)
    path = gauge_flow(conv, x, lam, poly_bound)
    rep = path.endpoint(1)
    if not vectors_equal(_dense(keys0, conv.to_vec(rep)), red):
        raise AssertionError("abelian flow missed its predicted endpoint")
    return ModuliClass(conv, x, rep, (path,))


def _staged_normal_form(conv: ConvolutionAlgebra, x: GradedMap,
                        poly_bound: int) -> ModuliClass:
    cdeg = conv.C.space.degree_of
    keys0 = _degree_keys(conv, 0)
    dirs = _direction_maps(conv)
    current = x
    chain: list[GaugePath] = []
    for p in sorted({cdeg[k] for k in conv.C.space.all_keys()}):
        cand = [(k, e) for k, e in dirs if cdeg[k[0]] in (p - 1, p)]
        basis_p = [k for k in keys0 if cdeg[k[0]] == p]
        if not cand or not basis_p:
            continue
        effects = [conv.to_vec(conv.differential_of(e)) for _, e in cand]
        basis_c = [k for k in keys0 if cdeg[k[0]] == p - 1]
        if basis_c:
            constraint = [[eff.get(bk, ZERO) for eff in effects]
                          for bk in basis_c]
            admissible = nullspace(constraint)
        else:
            admissible = [[ONE if i == j else ZERO
                           for j in range(len(cand))]
                          for i in range(len(cand))]
        moves = []
        for combo in admissible:
            acc: Vec = {}
            for c, eff in zip(combo, effects):
                if c:
                    for k, v in eff.items():
                        acc[k] = acc.get(k, ZERO) + c * v
            moves.append(_dense(basis_p, acc))
        cur_p = _dense(basis_p, conv.to_vec(current))
        red = coset_reduce(cur_p, moves)
        if vectors_equal(red, cur_p):
            continue
        sel = in_span(moves, [r - c for r, c in zip(red, cur_p)])
        coeffs = [sum((s * combo[j] for s, combo in zip(sel, admissible)),
                      ZERO) for j in range(len(cand))]
        lam = _combine(conv, cand, coeffs)
        path = gauge_flow(conv, current, lam, poly_bound)
        end = path.endpoint(1)
        delta = conv.to_vec(end - current)
        if any(c for k, c in delta.items() if cdeg[k[0]] < p):
            raise AssertionError("stage flow disturbed a finished column")
        if not vectors_equal(_dense(basis_p, conv.to_vec(end)), red):
            raise AssertionError("stage flow missed its predicted column")
        chain.append(path)
        current = end
    return ModuliClass(conv, x, current, tuple(chain))


def moduli_normal_form(conv: ConvolutionAlgebra, x: GradedMap,
                       poly_bound: int | None = None) -> ModuliClass:
    """Greedy staged reduction of a Maurer-Cartan element to a canonical
    coset representative, with the realizing gauge paths.

    In the abelian case (no brackets survive the arity window) the orbit
    of x is exactly x + im(d), one global coset reduction is complete,
    and distinct normal forms imply distinct classes.  Otherwise stages
    run over source degrees: each stage reduces its column by directions
    supported in the two adjacent source degrees, constrained to leave
    the finished columns alone; those moves act linearly on the stage
    column, so the reduction is exact, deterministic, and idempotent,
    but normal forms of equivalent elements are only guaranteed to agree
    when the moves available to general paths are stage-local too.
    """
    res = conv.mc_check(x)
    if not res.is_zero():
        raise ValueError(
            f"normal form of a non-MC element, residual {res.entries!r}")
    if poly_bound is None:
        poly_bound = default_poly_bound(conv)
    if conv.arity_window() <= 1:
        return _abelian_normal_form(conv, x, poly_bound)
    return _staged_normal_form(conv, x, poly_bound)


# -- the decision --------------------------------------------------------

def _abelian_decide(conv: ConvolutionAlgebra, x: GradedMap, y: GradedMap,
                    poly_bound: int):
    dirs = _direction_maps(conv)
    keys0 = _degree_keys(conv, 0)
    effects = [_dense(keys0, conv.to_vec(conv.differential_of(e)))
               for _, e in dirs]
    target = _dense(keys0, conv.to_vec(y - x))
    coeffs = in_span(effects, target)
    if coeffs is None:
        witness = {"class_degree": 0,
                   "cycle": sorted(conv.to_vec(y - x).items())}
        return Distinct(conv, x, y, "homology-class", witness)
    lam = _combine(conv, dirs, coeffs)
    path = gauge_flow(conv, x, lam, poly_bound)
    if not path.endpoint(1).equals(y):
        raise AssertionError("abelian flow missed its predicted endpoint")
    return Equal(conv, x, y, (path,))


def gauge_equivalent(conv: ConvolutionAlgebra, x: GradedMap, y: GradedMap,
                     poly_bound: int | None = None):
    """Decide gauge equivalence of two Maurer-Cartan elements.

    Returns Equal with a verifiable chain of paths, Distinct with a
    verifiable unreachability argument, or Unknown.  Unknown is reserved
    for the genuinely undecided case: normal forms differ but no sound
    separating invariant applies at this arity window.
    """
    rx = conv.mc_check(x)
    if not rx.is_zero():
        raise ValueError(
            f"first element is not Maurer-Cartan, residual {rx.entries!r}")
    ry = conv.mc_check(y)
    if not ry.is_zero():
        raise ValueError(
            f"second element is not Maurer-Cartan, residual {ry.entries!r}")
    if poly_bound is None:
        poly_bound = default_poly_bound(conv)
    if x.equals(y):
        return Equal(conv, x, y, (constant_path(conv, x, poly_bound),))
    if conv.arity_window() <= 1:
        return _abelian_decide(conv, x, y, poly_bound)
    stage = _rigidity_sweep(conv, x, y)
    if stage is not None:
        return Distinct(conv, x, y, "rigid-stage", {"degree": stage})
    nx = moduli_normal_form(conv, x, poly_bound)
    ny = moduli_normal_form(conv, y, poly_bound)
    if nx.representative.equals(ny.representative):
        back = tuple(p.reversed() for p in reversed(ny.paths))
        return Equal(conv, x, y, nx.paths + back)
    bx = _nonzero_betti(conv.twisted_betti(x))
    by = _nonzero_betti(conv.twisted_betti(y))
    if bx != by:
        return Distinct(conv, x, y, "twisted-betti",
                        {"betti_x": bx, "betti_y": by})
    return Unknown("normal forms differ but no separating invariant "
                   "applies at this arity window")
