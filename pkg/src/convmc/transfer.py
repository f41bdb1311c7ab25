"""Homotopy transfer along a chain contraction, and pushforward of
Maurer-Cartan elements along the resulting infinity-morphisms.

Everything here is one application of the perturbation lemma to symmetric
words.  Words on the big carrier form the coalgebra underlying the bar
construction; the brackets of arity >= 2 assemble into a coderivation
delta that strictly shortens words, so the perturbation series is a
finite sum.  A contraction (i, p, h) of the carrier lifts to words:
i and p act letter by letter, and the lifted homotopy symmetrizes

    h tensor (i p) tensor ... tensor (i p)

over all slot positions.  With the homotopy identity written as
id - i p = d h + h d (the convention of graded.Contraction), the series
has to be taken with alternating signs,

    A = delta - delta hhat delta + delta hhat delta hhat delta - ...

and the perturbed data read off from it give all three outputs at once:

    transferred bracket   l'_n = p . (letter part of A ihat)
    inclusion component   i'_n = -h . (letter part of A ihat)
    projection component  p'_n = p . (letter part of A (-hhat))

for n >= 2, while l'_1, i'_1, p'_1 are the small differential, i and p.
No word space is ever materialized; maps are evaluated lazily on the
words actually reached, so cost scales with the arity window rather than
with the size of a bar construction.

The sign of the series is forced by the coherence identity at arity 2:
the inclusion needs l_1(i'_2(x, y)) = -l_2(i x, i y) + i l'_2(x, y),
which is d h applied to l_2(i x, i y) read through the homotopy identity
with a minus sign on h.  InfinityMorphism.coherence_residual checks the
identity at every arity, so the convention is tested rather than trusted.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import factorial

from . import words as wd
from .barcobar import CobarAlgebra, twisting_residual
from .convolution import ConvolutionAlgebra
from .gauge import GaugePath
from .graded import (Contraction, GradedMap, GradedSpace, Key, Vec,
                     contraction_from_complex, vec_scale)
from .matrices import ONE, ZERO
from .models import CdgCoalgebra, IntervalForms, LInfinityAlgebra, Truncation

F = Fraction

WVec = dict


def _accum(letters: GradedSpace, acc: WVec, seq: tuple, coeff: Fraction) -> None:
    """Add coeff times the sorted word for seq into acc, with sort sign."""
    if not coeff:
        return
    sorted_word = wd.sort_letters(letters, tuple(seq))
    if sorted_word is None:
        return
    word, sign = sorted_word
    new = acc.get(word, ZERO) + sign * coeff
    if new:
        acc[word] = new
    else:
        acc.pop(word, None)


def _same_map(a: GradedMap, b: GradedMap) -> bool:
    keys = set(a.entries) | set(b.entries)
    for k in keys:
        va = a.entries.get(k, {})
        vb = b.entries.get(k, {})
        if {x: c for x, c in va.items() if c} != {x: c for x, c in vb.items() if c}:
            return False
    return True


class InfinityMorphism:
    """Morphism of shifted L-infinity algebras given by graded symmetric
    degree-0 components on source words, one per arity.

    Components are produced lazily by a compute hook and cached on sorted
    words.  Nothing is assumed about them: coherence_residual evaluates
    the morphism identity word by word, so broken candidates can be built
    and inspected, and the tests pin the identity down empirically.
    """

    def __init__(self, source: LInfinityAlgebra, target: LInfinityAlgebra,
                 arities, compute, name: str = ""):
        self.source = source
        self.target = target
        self.arities = sorted(set(arities))
        self.name = name
        self._compute = compute
        self._tables: dict[int, dict[tuple, Vec]] = {}

    @classmethod
    def from_tables(cls, source, target, tables, name: str = ""):
        fixed = {n: {w: {k: F(c) for k, c in v.items() if c}
                     for w, v in tbl.items()}
                 for n, tbl in tables.items()}

        def compute(n, word):
            return fixed.get(n, {}).get(word, {})

        return cls(source, target, sorted(fixed), compute, name=name)

    def max_arity(self) -> int:
        return max(self.arities, default=0)

    def is_strict(self) -> bool:
        return all(n <= 1 for n in self.arities)

    def component(self, n: int, args) -> Vec:
        """Value of the arity-n component on a tuple of source basis keys."""
        args = tuple(args)
        if len(args) != n:
            raise ValueError(f"component of arity {n} got {len(args)} letters")
        sorted_word = wd.sort_letters(self.source.space, args)
        if sorted_word is None:
            return {}
        word, sign = sorted_word
        table = self._tables.setdefault(n, {})
        if word not in table:
            if n in self.arities:
                val = {k: F(c) for k, c in self._compute(n, word).items() if c}
            else:
                val = {}
            want = sum(self.source.space.degree_of[k] for k in word)
            for k in val:
                if self.target.space.degree_of[k] != want:
                    raise ValueError(
                        f"component {n} on {word!r} is not degree 0")
            table[word] = val
        val = table[word]
        if not val:
            return {}
        if sign == 1:
            return dict(val)
        return vec_scale(F(sign), val)

    def component_multi(self, n: int, vecs) -> Vec:
        """Multilinear extension of the arity-n component to vectors."""
        vecs = list(vecs)
        if len(vecs) != n:
            raise ValueError(f"component of arity {n} got {len(vecs)} vectors")
        out: Vec = {}
        terms = [((), ONE)]
        for v in vecs:
            terms = [(keys + (k,), c * ck)
                     for keys, c in terms for k, ck in v.items() if ck]
            if not terms:
                return {}
        for keys, c in terms:
            for k, ck in self.component(n, keys).items():
                new = out.get(k, ZERO) + c * ck
                if new:
                    out[k] = new
                else:
                    out.pop(k, None)
        return out

    def coherence_residual(self, word) -> Vec:
        """Difference of the two sides of the morphism identity on a sorted
        source word; the components form a morphism on a window iff this
        vanishes for every word in it.

        One side sends the word through all unordered partitions into
        component blocks and applies a target bracket to the block values;
        the other distributes every source bracket over the word and feeds
        the contraction back through a single component.  At arity 1 this
        reduces to the chain-map condition.
        """
        word = tuple(word)
        n = len(word)
        degs = [self.source.space.degree_of[k] for k in word]
        out: Vec = {}
        for blocks in wd.set_partitions(n):
            sign = wd.blocks_sign(degs, blocks)
            vecs = []
            for block in blocks:
                v = self.component(len(block), tuple(word[i] for i in block))
                if not v:
                    vecs = None
                    break
                vecs.append(v)
            if vecs is None:
                continue
            for k, c in self.target.bracket_multi(len(blocks), vecs).items():
                new = out.get(k, ZERO) + sign * c
                if new:
                    out[k] = new
                else:
                    out.pop(k, None)
        for j in range(1, n + 1):
            for subset in combinations(range(n), j):
                block = tuple(word[i] for i in subset)
                chosen = set(subset)
                rest = tuple(word[i] for i in range(n) if i not in chosen)
                sign = wd.unshuffle_sign(degs, subset)
                inner = self.source.bracket(j, block)
                if not inner:
                    continue
                for let, c in inner.items():
                    for k, ck in self.component(n - j + 1, (let,) + rest).items():
                        new = out.get(k, ZERO) - sign * c * ck
                        if new:
                            out[k] = new
                        else:
                            out.pop(k, None)
        return out

    def coherent_on(self, words) -> bool:
        return all(not self.coherence_residual(w) for w in words)


class TransferredLInfinity:
    """Structure induced on the small side of a contraction, with the
    inclusion and projection infinity-morphisms that extend i and p.

    The ambient algebra's differential must agree with the contraction's
    big differential; the transferred arity-1 bracket is the small
    differential.  Brackets and morphism components are computed lazily
    through the word-level perturbation series and cached.
    """

    def __init__(self, ambient: LInfinityAlgebra, contraction: Contraction,
                 arity_max: int = 3):
        if arity_max < 1:
            raise ValueError("arity_max must be at least 1")
        if contraction.big.space.degree_of != ambient.space.degree_of:
            raise ValueError("contraction does not retract the ambient carrier")
        if not _same_map(contraction.big.d, ambient.l1()):
            raise ValueError("contraction differential differs from l_1")
        self.ambient = ambient
        self.contraction = contraction
        self.arity_max = arity_max
        self._ip = contraction.i.compose(contraction.p)
        self._delta_ops = {n: (lambda word, n=n: ambient.bracket(n, word))
                           for n in ambient.arities if n >= 2}
        self._tree: dict[tuple, Vec] = {}
        self._cotree: dict[tuple, Vec] = {}
        small = contraction.small
        self.algebra = LInfinityAlgebra(
            small.space, {},
            name=small.space.name or f"transfer({ambient.name})",
            arities=list(range(1, arity_max + 1)),
            compute=self._bracket)

    def _letterwise(self, m: GradedMap, wv: WVec) -> WVec:
        """Apply an even degree-0 map to every letter of every word."""
        out: WVec = {}
        for word, c in wv.items():
            terms = [((), c)]
            for let in word:
                img = m.entries.get(let)
                if not img:
                    terms = []
                    break
                terms = [(seq + (k,), cc * ck)
                         for seq, cc in terms for k, ck in img.items()]
            for seq, cc in terms:
                _accum(m.dst, out, seq, cc)
        return out

    def _apply_delta(self, wv: WVec) -> WVec:
        """Coderivation collecting the ambient brackets of arity >= 2."""
        letters = self.ambient.space
        out: WVec = {}
        for word, c in wv.items():
            n = len(word)
            if n < 2:
                continue
            degs = [letters.degree_of[k] for k in word]
            for arity, op in self._delta_ops.items():
                if arity > n:
                    continue
                for subset in combinations(range(n), arity):
                    chosen = set(subset)
                    block = tuple(word[i] for i in subset)
                    rest = tuple(word[i] for i in range(n) if i not in chosen)
                    sign = wd.unshuffle_sign(degs, subset)
                    for let, ck in op(block).items():
                        _accum(letters, out, (let,) + rest, sign * ck * c)
        return out

    def _apply_hhat(self, wv: WVec) -> WVec:
        """Symmetrized lift of the contraction homotopy to words."""
        h = self.contraction.h
        ip = self._ip
        letters = self.ambient.space
        out: WVec = {}
        for word, c in wv.items():
            n = len(word)
            for tup, c0 in wd.symmetrize(letters, word).items():
                degs = [letters.degree_of[k] for k in tup]
                prefix = 0
                for j in range(n):
                    sign = -ONE if prefix % 2 else ONE
                    prefix += degs[j]
                    himg = h.entries.get(tup[j])
                    if not himg:
                        continue
                    terms = [(tup[:j] + (k,), sign * c * c0 * ck)
                             for k, ck in himg.items()]
                    for t in range(j + 1, n):
                        img = ip.entries.get(tup[t])
                        if not img:
                            terms = []
                            break
                        terms = [(seq + (k,), cc * ck)
                                 for seq, cc in terms for k, ck in img.items()]
                    for seq, cc in terms:
                        _accum(letters, out, seq, cc)
        return out

    def _series_letter_part(self, wv: WVec) -> Vec:
        """Letter part of the alternating perturbation series applied to wv.

        Each pass applies the bracket coderivation, harvests one-letter
        words, and feeds the longer remainder back through the negated
        homotopy lift.  Words strictly shorten, so the loop terminates.
        """
        out: Vec = {}
        cur = self._apply_delta(wv)
        while cur:
            longer: WVec = {}
            for word, c in cur.items():
                if len(word) == 1:
                    new = out.get(word[0], ZERO) + c
                    if new:
                        out[word[0]] = new
                    else:
                        out.pop(word[0], None)
                else:
                    longer[word] = c
            if not longer:
                break
            lifted = self._apply_hhat(longer)
            cur = self._apply_delta({w: -c for w, c in lifted.items()})
        return out

    def _tree_letters(self, word: tuple) -> Vec:
        if word not in self._tree:
            start = self._letterwise(self.contraction.i, {word: ONE})
            self._tree[word] = self._series_letter_part(start)
        return self._tree[word]

    def _cotree_letters(self, word: tuple) -> Vec:
        if word not in self._cotree:
            lifted = self._apply_hhat({word: ONE})
            start = {w: -c for w, c in lifted.items()}
            self._cotree[word] = self._series_letter_part(start)
        return self._cotree[word]

    def _bracket(self, n: int, word: tuple) -> Vec:
        if n == 1:
            return self.contraction.small.d.entries.get(word[0], {})
        return self.contraction.p.apply(self._tree_letters(word))

    def inclusion_infinity(self) -> InfinityMorphism:
        """Infinity-morphism from the transferred algebra into the ambient
        one whose arity-1 component is the contraction's inclusion."""
        k = self.contraction

        def compute(n, word):
            if n == 1:
                return k.i.entries.get(word[0], {})
            val = k.h.apply(self._tree_letters(word))
            return {x: -c for x, c in val.items()}

        return InfinityMorphism(self.algebra, self.ambient,
                                list(range(1, self.arity_max + 1)),
                                compute, name="inclusion")

    def projection_infinity(self) -> InfinityMorphism:
        """Infinity-morphism from the ambient algebra onto the transferred
        one whose arity-1 component is the contraction's projection."""
        k = self.contraction

        def compute(n, word):
            if n == 1:
                return k.p.entries.get(word[0], {})
            return k.p.apply(self._cotree_letters(word))

        return InfinityMorphism(self.ambient, self.algebra,
                                list(range(1, self.arity_max + 1)),
                                compute, name="projection")

    def validate(self, truncation: Truncation | None = None) -> None:
        """Check the generalized Jacobi identities of the transferred
        brackets on all words up to the arity bound."""
        if truncation is None:
            degrees = list(self.algebra.space.degrees())
            top = max(degrees, default=1)
            truncation = Truncation(deg_min=1,
                                    deg_max=max(1, top) * self.arity_max,
                                    arity_max=self.arity_max)
        self.algebra.validate(truncation)


def _as_linfty(ambient) -> LInfinityAlgebra:
    if isinstance(ambient, CobarAlgebra):
        return ambient.shifted()
    return ambient


def homology_contraction(ambient) -> Contraction:
    """Deterministic contraction of an algebra's underlying complex onto
    its homology, ready to feed transfer_linfty."""
    alg = _as_linfty(ambient)
    return contraction_from_complex(alg.as_chain_complex())


def transfer_linfty(ambient, contraction: Contraction | None = None,
                    arity_max: int = 3) -> TransferredLInfinity:
    """Transferred structure of an algebra along a contraction.

    The ambient algebra may be given directly or as a cobar construction,
    in which case its shifted form is used; for a cobar input built with
    degree bound N the homology, hence the transferred structure, is only
    trustworthy through degree N - 1.  When no contraction is supplied the
    canonical one onto homology is built.  The contraction identities are
    verified before any transfer happens.
    """
    alg = _as_linfty(ambient)
    if contraction is None:
        contraction = homology_contraction(alg)
    contraction.validate()
    return TransferredLInfinity(alg, contraction, arity_max=arity_max)


def transfer_morphism(ambient, contraction: Contraction | None = None,
                      arity_max: int = 3) -> InfinityMorphism:
    """Inclusion-side infinity-morphism of the transferred structure."""
    return transfer_linfty(ambient, contraction,
                           arity_max=arity_max).inclusion_infinity()


def strict_infinity(source: LInfinityAlgebra, target: LInfinityAlgebra,
                    g: GradedMap, name: str = "") -> InfinityMorphism:
    """A plain map viewed as an infinity-morphism concentrated in arity 1.

    Nothing is checked here: the chain-map and bracket-compatibility
    conditions are exactly what coherence_residual evaluates, so strict
    candidates can be vetted the same way as transferred ones.
    """
    if g.degree != 0:
        raise ValueError("a strict morphism component must have degree 0")

    def compute(n, word):
        if n == 1:
            return g.entries.get(word[0], {})
        return {}

    return InfinityMorphism(source, target, [1], compute,
                            name=name or g.name or "strict")


def postcompose_strict(g: GradedMap, f: InfinityMorphism,
                       target: LInfinityAlgebra,
                       name: str = "") -> InfinityMorphism:
    """Compose a strict degree-0 algebra map after an infinity-morphism:
    the components are g applied to the components of f.  No coherence
    is assumed; when g is a strict morphism onto the given target the
    composite is again coherent, and the checker can confirm it."""
    if g.degree != 0:
        raise ValueError("can only postcompose by a degree-0 map")

    def compute(n, word):
        return g.apply(f.component(n, word))

    return InfinityMorphism(f.source, target, list(f.arities), compute,
                            name=name or f"{g.name or 'g'}.{f.name or 'f'}")


def push_mc(f: InfinityMorphism, coalgebra: CdgCoalgebra,
            tau: GradedMap, residual: str = "mc_check") -> GradedMap:
    """Pushforward of a Maurer-Cartan element of Hom(C, source) along an
    infinity-morphism, as a degree-0 map C -> target.

    The value on c sums, over n up to the coproduct depth, the arity-n
    component of f against the n-fold coproduct of c evaluated through
    tau, weighted by 1/n!.  These are the weights of the divided-power
    lift of tau to words, so the formula is the word-coalgebra composite
    read off in components.

    The input gate depends on which normalization the element lives in:
    residual="mc_check" (default) requires the literal Maurer-Cartan
    residual to vanish, residual="twisting" requires the divided-power
    one.  Elements produced by earlier pushforwards up an inclusion sit
    on the twisting side, so staged composites gate their middle legs
    with residual="twisting".
    """
    conv = ConvolutionAlgebra(coalgebra, f.source)
    if tau.degree != 0:
        raise ValueError("a Maurer-Cartan element must have degree 0")
    if residual == "mc_check":
        res = conv.mc_check(tau)
    elif residual == "twisting":
        res = twisting_residual(conv, tau)
    else:
        raise ValueError(f"unknown residual gate {residual!r}")
    if not res.is_zero():
        raise ValueError("cannot push a map that fails the Maurer-Cartan "
                         f"equation; residual on {sorted(res.entries)}")
    window = min(conv.coproduct_window(), f.max_arity())
    cols: dict[Key, Vec] = {}
    for ck in coalgebra.space.all_keys():
        acc: Vec = {}
        for n in range(1, window + 1):
            weight = F(1, factorial(n))
            for tup, gamma in coalgebra.iterated_coproduct(ck, n).items():
                vecs = []
                for c2 in tup:
                    v = tau.entries.get(c2)
                    if not v:
                        vecs = None
                        break
                    vecs.append(v)
                if vecs is None:
                    continue
                for k, c in f.component_multi(n, vecs).items():
                    new = acc.get(k, ZERO) + weight * gamma * c
                    if new:
                        acc[k] = new
                    else:
                        acc.pop(k, None)
        if acc:
            cols[ck] = acc
    return GradedMap(coalgebra.space, f.target.space, 0, cols,
                     name=f"push({tau.name})" if tau.name else "push")


def push_path(f: InfinityMorphism, path: GaugePath) -> GaugePath:
    """Transport of a gauge path along an infinity-morphism.

    The morphism is extended over polynomial interval forms by letting
    components act on the algebra factor, with a Koszul sign whenever an
    odd form moves past the letters in front of it, and the extended
    pushforward is applied to the bundled family.  Polynomial degrees in
    the parameter multiply by at most the coproduct depth, so the result
    lives at an enlarged polynomial bound.
    """
    conv = path.conv
    if conv.L.space.degree_of != f.source.space.degree_of:
        raise ValueError("path does not live in the morphism's source")
    coalgebra = conv.C
    window = min(conv.coproduct_window(), f.max_arity())
    bound = path.poly_bound * max(1, window)
    omega = IntervalForms(bound)
    deg_src = f.source.space.degree_of
    zmap = path.z
    p_cols: dict[int, dict[Key, Vec]] = {}
    q_cols: dict[int, dict[Key, Vec]] = {}
    for ck in coalgebra.space.all_keys():
        acc: dict = {}
        for n in range(1, window + 1):
            weight = F(1, factorial(n))
            for tup, gamma in coalgebra.iterated_coproduct(ck, n).items():
                terms = [((), (), ONE)]
                for c2 in tup:
                    col = zmap.entries.get(c2)
                    if not col:
                        terms = []
                        break
                    terms = [(forms + (fk,), lets + (lk,), cc * ck2)
                             for forms, lets, cc in terms
                             for (fk, lk), ck2 in col.items()]
                for forms, lets, cc in terms:
                    sign = ONE
                    before = 0
                    for idx in range(n):
                        if omega.degree(forms[idx]) % 2 and before % 2:
                            sign = -sign
                        before += deg_src[lets[idx]]
                    fk = forms[0]
                    fc = ONE
                    dead = False
                    for f2 in forms[1:]:
                        prod = omega.product(fk, f2)
                        if prod is None:
                            dead = True
                            break
                        fk, c3 = prod
                        fc = fc * c3
                    if dead:
                        continue
                    val = f.component(n, lets)
                    if not val:
                        continue
                    for vk, c4 in val.items():
                        key2 = (fk, vk)
                        new = acc.get(key2, ZERO) + weight * gamma * sign * cc * fc * c4
                        if new:
                            acc[key2] = new
                        else:
                            acc.pop(key2, None)
        for (fk, vk), c in acc.items():
            kind, kdeg = fk
            store = p_cols if kind == "p" else q_cols
            store.setdefault(kdeg, {}).setdefault(ck, {})[vk] = c
    target_conv = ConvolutionAlgebra(coalgebra, f.target)
    p_parts = {kd: GradedMap(coalgebra.space, f.target.space, 0, cols)
               for kd, cols in p_cols.items()}
    q_parts = {kd: GradedMap(coalgebra.space, f.target.space, 1, cols)
               for kd, cols in q_cols.items()}
    return GaugePath(target_conv, bound, p_parts, q_parts)
