"""Bar and cobar constructions, the Maurer-Cartan adjunction between
them, universal factorizations, and the counit comparison.

bar(L) is the cofree conilpotent cocommutative coalgebra on the carrier
of L: sorted symmetric words, coproduct summing over position splits, and
the coderivation differential that applies every l_n to every n-letter
position subset with unshuffle signs.  cobar(C) is the free Lie algebra
on the desuspended basis of C (classical degree drops by one), with the
derivation differential d(c^) = (d_C c)^ - 1/2 sum (-1)^{|c'|} [c'^, c''^]
over the stored coproduct terms of c.  The 1/2 is forced by the
adjunction: without it the chain condition for algebra maps out of
cobar(C) would disagree with the chain condition for coalgebra maps into
bar(L) by a factor of two in the quadratic term.

Both constructions truncate by degree and record the window in which
their homology is complete: a degree cap of degree_max leaves H_n exact
for n <= degree_max - 1, because only differentials entering from the
cut-off degree are missing.

The adjunction turns a degree-0 map tau in Hom(C, L) into a coalgebra
map C -> bar(L) (divided-power exponential of tau against the iterated
coproduct) and into an algebra map cobar(C) -> L (evaluate bracket
expressions with the shifted binary bracket); both are dg morphisms
exactly when the twisting residual of tau vanishes, see
twisting_residual below, and every conversion here re-checks the
defining identities rather than trusting the construction.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from . import matrices
from . import words as wd
from .convolution import (ConvolutionAlgebra, check_coalgebra_morphism,
                          check_strict_morphism)
from .freelie import FreeLie, expr_degree, is_bracket
from .graded import (GradedMap, GradedSpace, Key, Vec, homology, vec_add,
                     vec_is_zero, vec_scale)
from .matrices import ONE, ZERO
from .models import CdgCoalgebra, LInfinityAlgebra, QuillenModel

F = Fraction


def _entries_match(a: GradedMap, b: GradedMap) -> bool:
    """Column-wise equality that ignores whether the endpoint space
    objects are identical."""
    if a.degree != b.degree:
        return False
    for k in set(a.entries) | set(b.entries):
        ca, cb = a.column(k), b.column(k)
        if not vec_is_zero({x: ca.get(x, ZERO) - cb.get(x, ZERO)
                            for x in set(ca) | set(cb)}):
            return False
    return True


def twisting_residual(conv: ConvolutionAlgebra, tau: GradedMap) -> GradedMap:
    """Obstruction for tau to induce dg morphisms on both sides of the
    adjunction: the sum over n of 1/(n!)^2 l_n(tau, ..., tau).

    The extra 1/n! relative to mc_check undoes the n!-fold overcount that
    the symmetrized bracket produces on n copies of one even map, so this
    is exactly the letter part of the chain condition for the cofree lift
    of tau, with the weights of the divided-power exponential.  Whenever
    the obstruction lives in a single arity (every bundled pair: sources
    have zero differential, or targets are abelian) the two residuals
    vanish together; they differ on carriers that mix a nonzero
    differential with a nonzero coproduct, such as bar outputs.
    """
    if tau.degree != 0:
        raise ValueError("twisting-morphism candidates must have degree 0")
    res = conv.bracket(1, [tau])
    for n in range(2, conv.arity_window() + 1):
        term = conv.bracket(n, [tau] * n)
        res = res + term.scale(F(1, factorial(n) ** 2))
    return res


class BarCoalgebra(CdgCoalgebra):
    """Symmetric words on the carrier of L with the bar differential.

    exact_through marks the last degree where homology classes and
    relations are both inside the truncation.
    """

    def __init__(self, space: GradedSpace, d: GradedMap, delta: dict,
                 L: LInfinityAlgebra, degree_max: int, name: str = ""):
        super().__init__(space, d, delta, name=name or f"B({L.name})")
        self.L = L
        self.degree_max = degree_max
        self.exact_through = degree_max - 1

    def projection(self) -> GradedMap:
        """Corestriction to single letters, the universal twisting
        morphism out of the bar construction."""
        cols: dict[Key, Vec] = {}
        for w in self.space.all_keys():
            if len(w) == 1:
                cols[w] = {w[0]: ONE}
        return GradedMap(self.space, self.L.space, 0, cols, name="pi")


def bar(L: LInfinityAlgebra, degree_max: int) -> BarCoalgebra:
    letters = L.space
    if letters.total_dim() and min(letters.degrees()) < 1:
        raise ValueError(
            "bar needs carrier degrees >= 1, otherwise the truncated word "
            "basis is infinite")
    wsp = wd.word_space(letters, degree_max, name=f"B({L.name})")
    comps = {n: (lambda word, n=n: L.bracket(n, word)) for n in L.arities}
    d = wd.coderivation(comps, wsp, letters, -1, name="d_B")
    if not d.compose(d).is_zero():
        raise AssertionError("bar differential does not square to zero")
    delta: dict[Key, Vec] = {}
    for w in wsp.all_keys():
        col: Vec = {}
        for (pair, c) in wd.reduced_coproduct_terms(letters, w):
            nc = col.get(pair, ZERO) + c
            if nc:
                col[pair] = nc
            else:
                col.pop(pair, None)
        if col:
            delta[w] = col
    return BarCoalgebra(wsp, d, delta, L, degree_max)


class CobarAlgebra(QuillenModel):
    """Free Lie algebra on the desuspended basis of a coalgebra, with the
    cobar differential, in classical degrees.

    The letter keys are the coalgebra's own basis keys, one classical
    degree down.  shifted() is the degree +1 presentation used by every
    consumer that mixes cobar output with convolution carriers, and
    exact_through is the last shifted degree with complete homology.
    """

    def __init__(self, fl: FreeLie, delta: GradedMap, C: CdgCoalgebra,
                 degree_max: int, name: str = ""):
        super().__init__(fl, delta, name=name or f"Omega({C.name})")
        self.C = C
        self.degree_max = degree_max
        self.exact_through = degree_max - 1
        self._shifted: LInfinityAlgebra | None = None

    def shifted(self) -> LInfinityAlgebra:
        if self._shifted is None:
            self._shifted = self.as_linfty()
        return self._shifted

    def inclusion(self) -> GradedMap:
        """Generator inclusion C -> cobar(C) in the shifted presentation,
        degree 0; generators above the truncation are dropped."""
        sh = self.shifted().space
        cols = {c: {c: ONE} for c in self.C.space.all_keys() if c in sh}
        return GradedMap(self.C.space, sh, 0, cols, name="iota")

    def homology_betti(self) -> dict[int, int]:
        """Betti numbers of the shifted complex; trust them only up to
        exact_through."""
        return self.shifted().as_chain_complex().betti()


def cobar(C: CdgCoalgebra, degree_max: int) -> CobarAlgebra:
    if not C.is_one_reduced():
        raise ValueError("cobar needs a one-reduced coalgebra")
    letters = GradedSpace({n - 1: list(C.space.basis(n))
                           for n in C.space.degrees()},
                          name=f"gen({C.name})")
    fl = FreeLie(letters, deg_max=degree_max - 1)
    vals: dict[Key, Vec] = {}
    for c in C.space.all_keys():
        if C.space.degree_of[c] - 1 > fl.deg_max:
            continue
        col: Vec = dict(C.d.column(c))
        for (w1, w2), gamma in C.delta.get(c, {}).items():
            sgn = -gamma if C.space.degree_of[w1] % 2 == 0 else gamma
            term = fl.bracket({w1: ONE}, {w2: ONE})
            col = vec_add(col, vec_scale(sgn * F(1, 2), term))
        col = {k: v for k, v in col.items() if v}
        if col:
            vals[c] = col
    delta = fl.derivation(vals, -1, name="d_Omega")
    if not delta.compose(delta).is_zero():
        raise AssertionError("cobar differential does not square to zero")
    return CobarAlgebra(fl, delta, C, degree_max)


class Adjunction:
    """Three-way dictionary between coalgebra maps C -> bar(L), twisting
    morphisms in the convolution algebra Hom(C, L), and algebra maps
    cobar(C) -> L.

    Every direction validates its input and its output: a map with a
    nonzero twisting residual is rejected with that residual, a
    non-morphism with the identity it breaks.  The algebra-map leg needs
    a strict L (l_n = 0 for n >= 3); see cobar's docstring for why that
    covers everything bundled.
    """

    def __init__(self, C: CdgCoalgebra, L: LInfinityAlgebra,
                 degree_max: int | None = None):
        if degree_max is None:
            degree_max = max(C.space.deg_max, L.space.deg_max)
        self.C = C
        self.L = L
        self.degree_max = degree_max
        self.convolution = ConvolutionAlgebra(C, L)
        self._bar: BarCoalgebra | None = None
        self._cobar: CobarAlgebra | None = None

    def bar_side(self) -> BarCoalgebra:
        if self._bar is None:
            self._bar = bar(self.L, self.degree_max)
        return self._bar

    def cobar_side(self) -> CobarAlgebra:
        if self._cobar is None:
            self._cobar = cobar(self.C, self.degree_max)
        return self._cobar

    def _require_mc(self, tau: GradedMap):
        res = twisting_residual(self.convolution, tau)
        if not res.is_zero():
            raise ValueError(
                f"not a twisting morphism; residual {res.entries!r}")

    # -- bar side --------------------------------------------------------

    def mc_to_coalgebra_map(self, tau: GradedMap) -> GradedMap:
        """The unique dg coalgebra map C -> bar(L) whose letter part is
        tau: sum over n of 1/n! tau-tensor-powers of the iterated
        coproduct, collected into sorted words."""
        self._require_mc(tau)
        B = self.bar_side()
        depth = self.convolution.coproduct_window()
        cols: dict[Key, Vec] = {}
        for c in self.C.space.all_keys():
            acc: Vec = {}
            for n in range(1, depth + 1):
                gamma_n = F(1, factorial(n))
                for tup, gamma in self.C.iterated_coproduct(c, n).items():
                    terms: list[tuple[tuple, Fraction]] = [((), gamma)]
                    for ck in tup:
                        img = tau.apply({ck: ONE})
                        if not img:
                            terms = []
                            break
                        terms = [(pre + (lk,), cc * c2)
                                 for pre, cc in terms for lk, c2 in img.items()]
                    for tensor, cc in terms:
                        sw = wd.sort_letters(self.L.space, tensor)
                        if sw is None:
                            continue
                        word, sgn = sw
                        if word not in B.space.degree_of:
                            raise ValueError(
                                f"bar truncation {self.degree_max} too small "
                                f"to hold the image word {word!r}")
                        nc = acc.get(word, ZERO) + cc * sgn * gamma_n
                        if nc:
                            acc[word] = nc
                        else:
                            acc.pop(word, None)
            if acc:
                cols[c] = acc
        f = GradedMap(self.C.space, B.space, 0, cols, name="f_tau")
        check_coalgebra_morphism(self.C, B, f)
        return f

    def coalgebra_map_to_mc(self, f: GradedMap) -> GradedMap:
        check_coalgebra_morphism(self.C, self.bar_side(), f)
        tau = self.bar_side().projection().compose(f)
        self._require_mc(tau)
        return tau

    # -- cobar side ------------------------------------------------------

    def mc_to_algebra_map(self, tau: GradedMap) -> GradedMap:
        """The induced strict morphism cobar(C) -> L, evaluating each
        basis bracket expression with the shifted binary bracket."""
        if not self.L.is_strict():
            raise ValueError(
                "the algebra-map leg needs a strict target (no l_n, n >= 3)")
        self._require_mc(tau)
        M = self.cobar_side()
        letters = M.fl.letters
        memo: dict = {}

        def value(e) -> Vec:
            if e in memo:
                return memo[e]
            if not is_bracket(e):
                out = tau.apply({e: ONE})
            else:
                a, b = e[1], e[2]
                va, vb = value(a), value(b)
                out = self.L.bracket_multi(2, [va, vb]) if va and vb else {}
                if (expr_degree(letters, a) + 1) % 2:
                    out = vec_scale(-ONE, out)
            memo[e] = out
            return out

        cols = {e: v for e in M.shifted().space.all_keys()
                if (v := value(e))}
        g = GradedMap(M.shifted().space, self.L.space, 0, cols, name="g_tau")
        check_strict_morphism(M.shifted(), self.L, g)
        return g

    def algebra_map_to_mc(self, g: GradedMap) -> GradedMap:
        M = self.cobar_side()
        check_strict_morphism(M.shifted(), self.L, g)
        tau = g.compose(M.inclusion())
        self._require_mc(tau)
        return tau


def adjunction_mc(C: CdgCoalgebra, L: LInfinityAlgebra,
                  degree_max: int | None = None) -> Adjunction:
    return Adjunction(C, L, degree_max)


def universal_factorization(C: CdgCoalgebra, L: LInfinityAlgebra,
                            phi: GradedMap, degree_max: int | None = None
                            ) -> tuple[GradedMap, GradedMap]:
    """Factor an MC element phi through the two universal twisting
    morphisms: returns (f, g) with projection o f = phi on the bar side
    and g o inclusion = phi on the cobar side, both checked exactly."""
    adj = Adjunction(C, L, degree_max)
    f = adj.mc_to_coalgebra_map(phi)
    g = adj.mc_to_algebra_map(phi)
    through_bar = adj.bar_side().projection().compose(f)
    if not _entries_match(through_bar, phi):
        raise AssertionError("projection o f differs from phi")
    through_cobar = g.compose(adj.cobar_side().inclusion())
    if not _entries_match(through_cobar, phi):
        raise AssertionError("g o inclusion differs from phi")
    return f, g


def counit_quasi_iso_check(L: LInfinityAlgebra, degree_max: int) -> bool:
    """Build cobar(bar(L)) and test that the counit induces a homology
    isomorphism in degrees <= degree_max - 2; the top two degrees are
    truncation boundary and excluded."""
    if L.space.total_dim() == 0:
        return True
    B = bar(L, degree_max)
    adj = Adjunction(B, L, degree_max)
    counit = adj.mc_to_algebra_map(B.projection())
    M = adj.cobar_side()
    HM, repM, _ = homology(M.shifted().as_chain_complex())
    HL, _, projL = homology(L.as_chain_complex())
    induced = projL.compose(counit).compose(repM)
    seen = {n for n in HM.degrees() if HM.dim(n)}
    seen |= {n for n in HL.degrees() if HL.dim(n)}
    for n in sorted(seen):
        if n > degree_max - 2:
            continue
        if HM.dim(n) != HL.dim(n):
            return False
        block = induced.block(n)
        if HM.dim(n) and matrices.rank(block) != HM.dim(n):
            return False
    return True


def cobar_map(h: GradedMap, source: CobarAlgebra, target: CobarAlgebra
              ) -> GradedMap:
    """The algebra map cobar(C') -> cobar(C) induced by a coalgebra
    morphism h: C' -> C, in classical degrees; checked to be a chain
    map.  Composition of induced maps matches induction of composites
    as an exact matrix identity."""
    check_coalgebra_morphism(source.C, target.C, h)
    memo: dict = {}

    def value(e) -> Vec:
        if e in memo:
            return memo[e]
        if not is_bracket(e):
            out = h.apply({e: ONE})
        else:
            va, vb = value(e[1]), value(e[2])
            out = target.fl.bracket(va, vb) if va and vb else {}
        memo[e] = out
        return out

    cols = {e: v for e in source.fl.space.all_keys() if (v := value(e))}
    g = GradedMap(source.fl.space, target.fl.space, 0, cols,
                  name=f"Omega({h.name or 'h'})")
    if not _entries_match(g.compose(source.delta), target.delta.compose(g)):
        raise AssertionError("induced cobar map is not a chain map")
    return g
