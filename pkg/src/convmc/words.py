"""Symmetric word combinatorics for bar-side constructions.

A word over a graded letter space is a sorted tuple of basis letters; the
canonical order is the letter space's (degree, position) order.  A word with
a repeated odd letter is zero and never appears as a basis key.  Coproducts,
coderivations and coalgebra morphisms are all sums over position subsets or
partitions of the sorted word, with Koszul signs computed from the letter
degrees.

Conventions pinned here and relied on everywhere downstream:

  * reduced_coproduct_terms sums over proper nonempty position subsets, so
    a squared even letter x gives  x.x |-> 2 (x (x) x).
  * coderivation applies the arity-n component to the chosen front block,
    each unordered position subset counted once.
  * symmetrize is the averaged inclusion into tensors, (1/n!) sum of signed
    permutations, and wordify is its left inverse (sort with sign).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations
from typing import Callable, Iterator, Sequence

from .graded import GradedMap, GradedSpace, Key, Vec
from .matrices import ONE, ZERO


def sort_letters(letters: GradedSpace, seq: Sequence[Key]):
    """Sort a tuple of letters into canonical order with the Koszul sign.

    Returns (word, sign), or None when the word vanishes because of a
    repeated odd letter.
    """
    sign = 1
    out: list = []
    for let in seq:
        d = letters.degree_of[let]
        k = letters.sort_key(let)
        j = len(out)
        while j > 0 and letters.sort_key(out[j - 1]) > k:
            if (d * letters.degree_of[out[j - 1]]) % 2:
                sign = -sign
            j -= 1
        out.insert(j, let)
    for a, b in zip(out, out[1:]):
        if a == b and letters.degree_of[a] % 2:
            return None
    return tuple(out), sign


def word_degree(letters: GradedSpace, word: tuple) -> int:
    return sum(letters.degree_of[let] for let in word)


def word_space(letters: GradedSpace, deg_max: int, max_length: int | None = None,
               name: str = "") -> GradedSpace:
    """All nonzero words of length >= 1 and degree <= deg_max.

    Letters must sit in degrees >= 1 so that the degree cap keeps the word
    count finite; pass a truncated letter space otherwise.
    """
    keys = sorted(letters.all_keys(), key=letters.sort_key)
    if not keys:
        return GradedSpace({}, name=name)
    min_deg = min(letters.degree_of[k] for k in keys)
    if min_deg < 1:
        raise ValueError("word_space needs letters in degrees >= 1; truncate first")
    by_deg: dict[int, list] = {}
    n = 1
    while n * min_deg <= deg_max and (max_length is None or n <= max_length):
        for combo in combinations_with_replacement(keys, n):
            bad = any(a == b and letters.degree_of[a] % 2
                      for a, b in zip(combo, combo[1:]))
            if bad:
                continue
            d = word_degree(letters, combo)
            if d <= deg_max:
                by_deg.setdefault(d, []).append(combo)
        n += 1
    for d in by_deg:
        by_deg[d].sort(key=lambda w: (len(w), [letters.sort_key(x) for x in w]))
    return GradedSpace(by_deg, name=name or f"words({letters.name})")


def wordify(letters: GradedSpace, tensor_vec: Vec) -> Vec:
    """Collapse tensor tuples to sorted words (the map called rho in the
    transfer machinery).  Left inverse of symmetrize."""
    out: Vec = {}
    for tup, c in tensor_vec.items():
        sw = sort_letters(letters, tup)
        if sw is None:
            continue
        word, sign = sw
        nc = out.get(word, ZERO) + sign * c
        if nc:
            out[word] = nc
        else:
            out.pop(word, None)
    return out


def symmetrize(letters: GradedSpace, word: tuple) -> Vec:
    """Averaged inclusion of a word into the tensor power: (1/n!) times the
    signed sum over all position permutations."""
    n = len(word)
    degs = [letters.degree_of[let] for let in word]
    coeff = Fraction(1)
    for k in range(2, n + 1):
        coeff /= k
    out: Vec = {}
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j] and (degs[perm[i]] * degs[perm[j]]) % 2:
                    sign = -sign
        tup = tuple(word[p] for p in perm)
        nc = out.get(tup, ZERO) + sign * coeff
        if nc:
            out[tup] = nc
        else:
            out.pop(tup, None)
    return out


def symmetrize_vec(letters: GradedSpace, word_vec: Vec) -> Vec:
    out: Vec = {}
    for word, c in word_vec.items():
        for tup, cc in symmetrize(letters, word).items():
            nc = out.get(tup, ZERO) + c * cc
            if nc:
                out[tup] = nc
            else:
                out.pop(tup, None)
    return out


def unshuffle_sign(degs: Sequence[int], subset: Sequence[int]) -> int:
    """Koszul sign of moving the selected positions to the front, preserving
    the relative order on both sides."""
    chosen = set(subset)
    sign = 1
    for a in subset:
        for b in range(a):
            if b not in chosen and (degs[a] * degs[b]) % 2:
                sign = -sign
    return sign


def reduced_coproduct_terms(letters: GradedSpace, word: tuple):
    """[( (left_word, right_word), coeff )] over proper nonempty position
    subsets.  Both halves of a sorted word stay sorted, so no resorting is
    needed, only the unshuffle sign."""
    n = len(word)
    degs = [letters.degree_of[let] for let in word]
    terms = []
    for k in range(1, n):
        for subset in combinations(range(n), k):
            chosen = set(subset)
            left = tuple(word[i] for i in subset)
            right = tuple(word[i] for i in range(n) if i not in chosen)
            sign = unshuffle_sign(degs, subset)
            terms.append(((left, right), Fraction(sign)))
    return terms


def insert_letter(letters: GradedSpace, word: tuple, let: Key):
    """Sort one letter into an already sorted word.  Returns (word, sign) or
    None when the result has a repeated odd letter."""
    return sort_letters(letters, (let,) + word)


def coderivation(components: dict[int, Callable[[tuple], Vec]],
                 words: GradedSpace, letters: GradedSpace, degree: int,
                 name: str = "") -> GradedMap:
    """Coderivation of the cofree cocommutative coalgebra determined by its
    corestrictions.

    components[n] maps a sorted n-letter word to a letter vector, homogeneous
    of the given degree.  On a word w the coderivation is the sum over
    position subsets S of size n of

        sign(S) . (components[n](w_S) sorted into w without S),

    the sign being the Koszul unshuffle sign; the component acts on the front
    block so it crosses nothing.
    """
    out = GradedMap(words, words, degree, name=name)
    for word in words.all_keys():
        n = len(word)
        degs = [letters.degree_of[let] for let in word]
        col: Vec = {}
        for arity, comp in components.items():
            if arity > n:
                continue
            for subset in combinations(range(n), arity):
                chosen = set(subset)
                block = tuple(word[i] for i in subset)
                rest = tuple(word[i] for i in range(n) if i not in chosen)
                sign = unshuffle_sign(degs, subset)
                img = comp(block)
                for let, c in img.items():
                    ins = insert_letter(letters, rest, let)
                    if ins is None:
                        continue
                    new_word, s2 = ins
                    coeff = sign * s2 * c
                    nc = col.get(new_word, ZERO) + coeff
                    if nc:
                        col[new_word] = nc
                    else:
                        col.pop(new_word, None)
        if col:
            out.set_column(word, col)
    return out


def set_partitions(n: int) -> Iterator[list[tuple[int, ...]]]:
    """Unordered set partitions of range(n), blocks listed by least element,
    in a fixed deterministic order."""
    if n == 0:
        yield []
        return

    def rec(i: int, blocks: list[list[int]]):
        if i == n:
            yield [tuple(b) for b in blocks]
            return
        for b in blocks:
            b.append(i)
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        yield from rec(i + 1, blocks)
        blocks.pop()

    yield from rec(0, [])


def blocks_sign(degs: Sequence[int], blocks: Sequence[tuple[int, ...]]) -> int:
    """Koszul sign of rearranging the word into the concatenation of the
    blocks (each block keeps its internal order)."""
    order = [i for b in blocks for i in b]
    sign = 1
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if order[i] > order[j] and (degs[order[i]] * degs[order[j]]) % 2:
                sign = -sign
    return sign


def coalgebra_morphism(components: dict[int, Callable[[tuple], Vec]],
                       src_words: GradedSpace, src_letters: GradedSpace,
                       dst_words: GradedSpace, dst_letters: GradedSpace,
                       name: str = "") -> GradedMap:
    """Coalgebra morphism of cofree cocommutative coalgebras from its
    corestrictions (all of degree 0).

    components[n] maps a sorted n-letter source word to a target letter
    vector.  On a word the morphism sums over unordered set partitions of
    the positions, applies one component per block and multiplies the
    resulting letters into a target word.  A partition with a block size
    that has no component contributes nothing.
    """
    out = GradedMap(src_words, dst_words, 0, name=name)
    for word in src_words.all_keys():
        n = len(word)
        degs = [src_letters.degree_of[let] for let in word]
        col: Vec = {}
        for blocks in set_partitions(n):
            if any(len(b) not in components for b in blocks):
                continue
            sign = blocks_sign(degs, blocks)
            terms: list[tuple[tuple, Fraction]] = [((), Fraction(sign))]
            for b in blocks:
                sub = tuple(word[i] for i in b)
                img = components[len(b)](sub)
                if not img:
                    terms = []
                    break
                terms = [(pre + (let,), c * cc)
                         for pre, c in terms for let, cc in img.items()]
            for tup, c in terms:
                sw = sort_letters(dst_letters, tup)
                if sw is None:
                    continue
                word2, s2 = sw
                nc = col.get(word2, ZERO) + s2 * c
                if nc:
                    col[word2] = nc
                else:
                    col.pop(word2, None)
        if col:
            out.set_column(word, col)
    return out
