"""Model containers and the bundled example models.

Expected values fixed here by hand:
  * the projective-plane coproduct is a single symmetric pair,
  * the shifted bracket of a free Lie model is (-1)^{shifted degree of
    the first argument} times the classical bracket,
  * interval forms: d(t^k) = k t^{k-1} dt, integral of t^k dt is
    t^{k+1}/(k+1),
  * extension of scalars: l2(1(x)x, t(x)x) = t(x)l2(x, x).
"""

from fractions import Fraction

import pytest

from convmc import library as lib
from convmc.freelie import FreeLie, br
from convmc.graded import GradedMap, GradedSpace
from convmc.models import (CdgCoalgebra, IntervalForms, LInfinityAlgebra,
                           QuillenModel, Truncation, abelian_linfty,
                           extension_of_scalars)

F = Fraction


# ---------------------------------------------------------------------------
# coalgebras

def test_bundled_coalgebras_validate():
    for name in ("s2", "s3", "s4", "s2vs3", "cp2", "s2xs2"):
        lib.builtin_model(name).validate()


def test_cp2_coproduct_values():
    C = lib.cp2_coalgebra()
    assert C.delta["b"] == {("a", "a"): F(1)}
    assert C.iterated_coproduct("b", 2) == {("a", "a"): F(1)}
    assert C.iterated_coproduct("b", 3) == {}
    assert C.is_one_reduced()


def test_s2xs2_coproduct_symmetric():
    C = lib.s2xs2_coalgebra()
    assert C.delta["t"] == {("a", "b"): F(1), ("b", "a"): F(1)}
    C.validate()


def test_cocommutativity_failure_detected():
    sp = GradedSpace({2: ["a", "b"], 4: ["t"]})
    delta = {"t": {("a", "b"): F(1), ("b", "a"): F(-1)}}
    C = CdgCoalgebra(sp, GradedMap.zero(sp, sp, -1), delta)
    with pytest.raises(ValueError, match="cocommutative"):
        C.validate()


def test_coassociativity_failure_detected():
    sp = GradedSpace({2: ["a", "b"], 4: ["t"], 6: ["u"]})
    delta = {"t": {("a", "a"): F(1)},
             "u": {("b", "t"): F(1), ("t", "b"): F(1)}}
    C = CdgCoalgebra(sp, GradedMap.zero(sp, sp, -1), delta)
    with pytest.raises(ValueError, match="coassociative"):
        C.validate()


def test_coproduct_degree_failure_detected():
    sp = GradedSpace({2: ["a"], 4: ["b"]})
    C = CdgCoalgebra(sp, GradedMap.zero(sp, sp, -1),
                     {"b": {("a", "b"): F(1)}})
    with pytest.raises(ValueError, match="degree"):
        C.validate()


def test_coderivation_failure_detected():
    sp = GradedSpace({2: ["a"], 4: ["t"], 5: ["w"]})
    d = GradedMap(sp, sp, -1, {"w": {"t": F(1)}})
    C = CdgCoalgebra(sp, d, {"t": {("a", "a"): F(1)}})
    with pytest.raises(ValueError, match="coderivation"):
        C.validate()


# ---------------------------------------------------------------------------
# L-infinity algebras

def test_pi_s2_validates():
    L = lib.pi_s2()
    L.validate()
    assert L.bracket(2, ("x", "x")) == {"y": F(1)}
    assert L.bracket(2, ("x", "y")) == {}
    assert L.is_strict() and not L.is_abelian_beyond_l1()


def test_pi_s3_abelian():
    L = lib.pi_s3()
    L.validate()
    assert L.is_abelian_beyond_l1()
    assert L.bracket(1, ("z",)) == {}


def test_abelian_pair_differential():
    L = lib.abelian_pair_with_d()
    L.validate()
    assert L.bracket(1, ("v",)) == {"u": F(1)}
    assert all(b == 0 for b in L.as_chain_complex().betti().values())


def test_jacobi_failure_detected():
    sp = GradedSpace({2: ["x"], 3: ["y"], 4: ["z"]})
    L = LInfinityAlgebra(sp, {2: {("x", "x"): {"y": F(1)},
                                  ("x", "y"): {"z": F(1)}}})
    with pytest.raises(ValueError, match="Jacobi"):
        L.validate(Truncation(0, 12, 3))


def test_bracket_word_must_be_sorted():
    sp = GradedSpace({2: ["x"], 3: ["y"]})
    with pytest.raises(ValueError, match="sorted"):
        LInfinityAlgebra(sp, {2: {("y", "x"): {"x": F(1)}}})


def test_bracket_on_vanishing_word_rejected():
    sp = GradedSpace({3: ["y"], 5: ["w"]})
    with pytest.raises(ValueError, match="vanishing"):
        LInfinityAlgebra(sp, {2: {("y", "y"): {"w": F(1)}}})


def test_bracket_sort_sign():
    # two odd letters: evaluating in the swapped order flips the sign
    sp = GradedSpace({3: ["p", "q"], 5: ["r"]})
    L = LInfinityAlgebra(sp, {2: {("p", "q"): {"r": F(1)}}})
    assert L.bracket(2, ("q", "p")) == {"r": F(-1)}


# ---------------------------------------------------------------------------
# free Lie models and the shift dictionary

def _cp2_model(deg_max=4):
    letters = GradedSpace({1: ["a"], 3: ["b"]}, name="gen")
    fl = FreeLie(letters, deg_max=deg_max)
    delta = fl.derivation({"b": {br("a", "a"): F(-1)}}, -1)
    return QuillenModel(fl, delta, name="cobarCP2")


def test_quillen_model_validates():
    M = _cp2_model()
    M.validate()
    assert M.delta.column("b") == {br("a", "a"): F(-1)}
    assert M.delta.column(br("a", "b")) == {}


def test_as_linfty_shift_dictionary():
    M = _cp2_model()
    L = M.as_linfty()
    # shifted degrees are classical plus one
    assert L.space.degree_of["a"] == 2
    assert L.space.degree_of["b"] == 4
    assert L.space.degree_of[br("a", "a")] == 3
    # l1 is the untouched differential
    assert L.bracket(1, ("b",)) == {br("a", "a"): F(-1)}
    # first argument has even shifted degree: plus sign
    assert L.bracket(2, ("a", "a")) == {br("a", "a"): F(1)}
    L.validate(Truncation(0, 20, 3))


def test_as_linfty_odd_first_argument_sign():
    # classically even generators have odd shifted degree; their classical
    # self-bracket vanishes, so use two letters
    letters = GradedSpace({2: ["c", "e"]}, name="gen")
    fl = FreeLie(letters, deg_max=4)
    M = QuillenModel(fl, GradedMap.zero(fl.space, fl.space, -1))
    L = M.as_linfty()
    assert L.space.degree_of["c"] == 3
    assert fl.dim(4) == 1
    # shifted first argument degree 3 is odd: minus sign
    assert L.bracket(2, ("c", "e")) == {br("c", "e"): F(-1)}
    # swapped odd arguments flip the sign, matching classical antisymmetry
    assert L.bracket(2, ("e", "c")) == {br("c", "e"): F(1)}
    L.validate(Truncation(0, 12, 3))


def test_quillen_s2():
    M = lib.quillen_s2()
    M.validate()
    L = M.as_linfty()
    assert L.space.degree_of["a"] == 2
    assert L.bracket(2, ("a", "a")) == {br("a", "a"): F(1)}


# ---------------------------------------------------------------------------
# interval forms

def test_interval_forms_product_and_d():
    om = IntervalForms(4)
    assert om.product(("p", 1), ("q", 1)) == (("q", 2), F(1))
    assert om.product(("q", 0), ("q", 3)) is None
    assert om.d(("p", 3)) == {("q", 2): F(3)}
    assert om.d(("p", 0)) == {}
    assert om.d(("q", 2)) == {}
    with pytest.raises(ValueError, match="bound"):
        om.product(("p", 3), ("p", 2))


def test_interval_forms_evaluate_and_integrate():
    om = IntervalForms(4)
    assert om.evaluate(("p", 0), F(0)) == 1
    assert om.evaluate(("p", 2), F(0)) == 0
    assert om.evaluate(("p", 2), F(1)) == 1
    assert om.evaluate(("q", 1), F(1)) == 0
    assert om.integrate_to_t(("q", 2)) == {("p", 3): F(1, 3)}
    assert om.integrate_to_t(("p", 2)) == {}


# ---------------------------------------------------------------------------
# extension of scalars

def test_extension_bracket_values():
    ext, ev0, ev1 = extension_of_scalars(lib.pi_s2(), poly_bound=3)
    one_x = (("p", 0), "x")
    t_x = (("p", 1), "x")
    assert ext.bracket(2, (one_x, t_x)) == {(("p", 1), "y"): F(1)}
    # the odd operation l2 passes the odd form dt: minus sign
    dt_x = (("q", 0), "x")
    assert ext.bracket(2, (dt_x, t_x)) == {(("q", 1), "y"): F(-1)}
    # two one-form factors die
    assert ext.bracket(2, (dt_x, (("q", 1), "x"))) == {}


def test_extension_jacobi_within_polynomial_window():
    # products of three forms of polynomial degree <= 2 need bound 6
    from itertools import combinations_with_replacement
    ext, _, _ = extension_of_scalars(lib.pi_s2(), poly_bound=6)
    keys = [k for k in ext.space.all_keys() if k[0][1] <= 2]
    keys.sort(key=ext.space.sort_key)
    degf = ext.space.degree_of
    for m in (2, 3):
        for word in combinations_with_replacement(keys, m):
            if any(a == b and degf[a] % 2
                   for a, b in zip(word, word[1:])):
                continue
            assert ext.jacobiator(word) == {}, word


def test_extension_l1_square_zero():
    ext, _, _ = extension_of_scalars(lib.abelian_pair_with_d(), poly_bound=2)
    ext.as_chain_complex().validate()
    # d(t (x) v) = dt (x) v + t (x) u
    t_v = (("p", 1), "v")
    assert ext.bracket(1, (t_v,)) == {(("q", 0), "v"): F(1),
                                      (("p", 1), "u"): F(1)}
    # d(dt (x) v) = -dt (x) u
    assert ext.bracket(1, ((("q", 0), "v"),)) == {(("q", 0), "u"): F(-1)}


def test_evaluation_maps_are_strict_morphisms():
    for target in (lib.pi_s2(), lib.abelian_pair_with_d()):
        ext, ev0, ev1 = extension_of_scalars(target, poly_bound=4)
        l1_ext = ext.l1()
        l1 = target.l1()
        keys = [k for k in ext.space.all_keys() if k[0][1] <= 2]
        for ev, t in ((ev0, F(0)), (ev1, F(1))):
            assert ev.compose(l1_ext).equals(l1.compose(ev))
            for i, u in enumerate(keys):
                for v in keys[i:]:
                    lhs = ev.apply(ext.bracket(2, (u, v)))
                    rhs = target.bracket_multi(
                        2, [ev.apply({u: F(1)}), ev.apply({v: F(1)})])
                    assert lhs == rhs, (t, u, v)


def test_evaluation_endpoints():
    ext, ev0, ev1 = extension_of_scalars(lib.pi_s2(), poly_bound=2)
    assert ev0.apply({(("p", 0), "x"): F(1)}) == {"x": F(1)}
    assert ev0.apply({(("p", 1), "x"): F(1)}) == {}
    assert ev1.apply({(("p", 1), "x"): F(1)}) == {"x": F(1)}
    assert ev1.apply({(("q", 0), "x"): F(1)}) == {}


# ---------------------------------------------------------------------------
# fixtures and registry

def test_hopf_tau_fixture():
    tau = lib.hopf_tau(3)
    assert tau.degree == 0
    assert tau.column("a") == {"y": F(3)}


def test_builtin_registry():
    assert lib.builtin_model("pi_s2").name == "pi(S2)"
    with pytest.raises(KeyError, match="unknown builtin"):
        lib.builtin_model("nope")
