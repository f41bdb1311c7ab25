from __future__ import annotations

from fractions import Fraction

import pytest

from convmc.freelie import FreeLie, br, expand, expr_degree, format_expr
from convmc.graded import ChainComplex, GradedSpace, homology

F = Fraction


def test_expand_commutator_signs():
    L = GradedSpace({1: ["a"], 2: ["u"]}, name="V")
    # odd letter: [a, a] = 2 a(x)a
    assert expand(L, br("a", "a")) == {("a", "a"): F(2)}
    # even letter: [u, u] = 0
    assert expand(L, br("u", "u")) == {}
    # mixed: [a, u] = a(x)u - u(x)a
    assert expand(L, br("a", "u")) == {("a", "u"): F(1), ("u", "a"): F(-1)}


def test_dims_one_even_generator():
    L = GradedSpace({2: ["u"]}, name="V")
    fl = FreeLie(L, deg_max=6)
    assert [fl.dim(n) for n in range(1, 7)] == [0, 1, 0, 0, 0, 0]


def test_dims_one_odd_generator():
    L = GradedSpace({1: ["a"]}, name="V")
    fl = FreeLie(L, deg_max=4)
    # degree 2 holds [a,a]; the triple bracket vanishes over Q
    assert [fl.dim(n) for n in range(1, 5)] == [1, 1, 0, 0]


def test_dims_two_odd_generators():
    # Hilbert series: U(L) = T(V) forces dims 2, 3, 2, 3 in degrees 1..4
    L = GradedSpace({1: ["a", "b"]}, name="V")
    fl = FreeLie(L, deg_max=4)
    assert [fl.dim(n) for n in range(1, 5)] == [2, 3, 2, 3]


def test_dims_two_even_generators():
    # ungraded Witt numbers in even degrees: 2, 1, 2 for weights 1..3
    L = GradedSpace({2: ["u", "v"]}, name="V")
    fl = FreeLie(L, deg_max=6)
    assert [fl.dim(n) for n in (2, 4, 6)] == [2, 1, 2]


def projective_plane_letters():
    # desuspended cell letters of the complex projective plane
    return GradedSpace({1: ["a"], 3: ["b"]}, name="V")


def test_dims_projective_plane_letters():
    fl = FreeLie(projective_plane_letters(), deg_max=5)
    # degree 5 is one dimensional: [[a,a],b] = 2[a,[a,b]] by Jacobi
    assert [fl.dim(n) for n in range(1, 6)] == [1, 1, 1, 1, 1]


def test_express_and_bracket_consistency():
    L = GradedSpace({1: ["a", "b"]}, name="V")
    fl = FreeLie(L, deg_max=4)
    u = {"a": F(1)}
    v = {"b": F(1)}
    w = fl.bracket(u, v)
    # [a, b] must expand back to a(x)b + b(x)a (both odd)
    assert fl.expand_vec(w) == {("a", "b"): F(1), ("b", "a"): F(1)}
    # triple bracket identity [a,[a,a]] = 0
    aa = fl.bracket(u, u)
    assert fl.bracket(u, aa) == {}


def test_express_rejects_non_lie_vectors():
    L = GradedSpace({1: ["a", "b"]}, name="V")
    fl = FreeLie(L, deg_max=4)
    with pytest.raises(ValueError):
        fl.express({("a", "b"): F(1)})  # a(x)b alone is not a Lie element


def test_derivation_leibniz_and_square():
    # the quadratic cobar differential of the projective plane:
    # d(a) = 0, d(b) = -[a, a]
    fl = FreeLie(projective_plane_letters(), deg_max=5)
    aa = fl.bracket({"a": F(1)}, {"a": F(1)})
    d = fl.derivation({"b": {k: -c for k, c in aa.items()}}, degree=-1)
    assert d.compose(d).is_zero()
    # d[a,b] = -[a, d b] = [a, [a,a]] = 0
    assert d.column(br("a", "b")) == {}
    cx = ChainComplex(fl.space, d)
    cx.validate()
    H, rep, proj = homology(cx)
    # classes of the desuspended generator and the quintic bracket cycle
    assert [H.dim(n) for n in range(1, 6)] == [1, 0, 0, 1, 1]


def test_format_expr():
    assert format_expr(br(br("a", "a"), "b")) == "[[a,a],b]"
    assert expr_degree(projective_plane_letters(), br("a", "b")) == 4
