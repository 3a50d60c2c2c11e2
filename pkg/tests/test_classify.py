"""Adjoint actions, optimal-list normalization, appropriateness."""

import itertools
import random
from fractions import Fraction

import pytest

from lie_prelim.classify import (DegenerateSpanError, EquivAlgebraElement,
                                 FlowCatalogError, NotASubalgebraError,
                                 adjoint_closed, adjoint_series,
                                 appropriateness, bracket, canonical_1d,
                                 canonical_2d, element, element_pushforward,
                                 flow_expr, from_vector_field, in_span,
                                 is_closed, m_value, match_flow_family,
                                 normalize_1d, normalize_2d, numeric_flow,
                                 span_dimension, theorem5_subalgebra,
                                 wronskian, _combo)
from lie_prelim.expr import (Rat, Sym, add, diff, eval_numeric, exp, ln, mul,
                             power, substitute)
from lie_prelim.fields import (commutator, u_transformation, x_scaling,
                               x_translation)

U = Sym("u")
EPS = Sym("eps")


def elements_equal(a, b, ignore_kernel=True):
    pairs = [(a.a1, b.a1), (a.a2, b.a2), (a.a3, b.a3), (a.h, b.h)]
    if not ignore_kernel:
        pairs.append((a.a0, b.a0))
    return all(add(x, mul(Rat(-1), y)).is_zero for x, y in pairs)


class TestStructure:
    def test_nonzero_commutation_relations(self):
        assert elements_equal(bracket(element(a3=1), element(a1=1)), element(a3=1),
                              ignore_kernel=False)
        assert elements_equal(bracket(element(a0=1), element(a2=1)), element(a0=1),
                              ignore_kernel=False)
        got = bracket(element(h=1), element(h=U))
        assert elements_equal(got, element(h=1), ignore_kernel=False)

    def test_all_other_brackets_vanish(self):
        gens = {"dt": element(a0=1), "dx": element(a3=1), "Dt": element(a2=1),
                "Dx": element(a1=1)}
        nonzero = {("dx", "Dx"), ("Dx", "dx"), ("dt", "Dt"), ("Dt", "dt")}
        for (n1, v), (n2, w) in itertools.product(gens.items(), repeat=2):
            br = bracket(v, w)
            if (n1, n2) in nonzero:
                assert not br.is_zero
            else:
                assert br.is_zero
        # mixed G-brackets vanish against every scaling/translation
        for name, v in gens.items():
            assert bracket(v, element(h=power(U, Rat(2)))).is_zero

    def test_bracket_matches_generic_commutator(self):
        gens = [element(a0=1), element(a3=1), element(a2=1), element(a1=1),
                element(h=1), element(h=U), element(h=power(U, Rat(2)))]
        for v, w in itertools.product(gens, repeat=2):
            br = bracket(v, w).realize()
            generic = commutator(v.realize(), w.realize(),
                                 coords=("t", "x", "u", "f", "g"))
            for c in ("t", "x", "u", "f", "g"):
                assert add(br.get(c), mul(Rat(-1), generic.get(c))).is_zero

    def test_from_vector_field_validation(self):
        ok = element(a1=2, a2=Rat(1, 2), h=mul(Rat(3), U))
        assert elements_equal(from_vector_field(ok.realize()), ok,
                              ignore_kernel=False)
        from lie_prelim.classify import NotInAlgebraError
        from lie_prelim.fields import vector_field
        bad = vector_field(u=Sym("x"))
        with pytest.raises(NotInAlgebraError):
            from_vector_field(bad)


class TestAdjoint:
    def test_translation_series_terminates(self):
        got, terminated = adjoint_series(element(a3=1), element(a1=1), EPS, 5)
        assert terminated
        assert elements_equal(got, element(a1=1, a3=mul(Rat(-1), EPS)),
                              ignore_kernel=False)
        assert elements_equal(adjoint_closed(element(a3=1), element(a1=1), EPS), got,
                              ignore_kernel=False)

    def test_commuting_pair_constant_series(self):
        got, terminated = adjoint_series(element(a0=1), element(a3=1), EPS, 4)
        assert terminated and elements_equal(got, element(a3=1), ignore_kernel=False)

    def test_scaling_series_converges_numerically(self):
        import math
        got, terminated = adjoint_series(element(a1=1), element(a3=1), EPS, 12)
        assert not terminated
        closed = adjoint_closed(element(a1=1), element(a3=1), EPS)
        for e in (0.5, -0.5, 1.0, -1.0):
            series_val = eval_numeric(got.a3, {"eps": e})
            assert series_val == pytest.approx(math.exp(e), abs=1e-6)
            assert eval_numeric(closed.a3, {"eps": e}) == pytest.approx(math.exp(e))

    def test_dt_scaling_closed_form(self):
        got = adjoint_closed(element(a2=1), element(a0=1), EPS)
        assert elements_equal(got, element(a0=exp(EPS)), ignore_kernel=False)

    def test_g_flow_closed_form(self):
        # Ad(e^(eps G(1))) G(u) = G(u - eps)
        got = adjoint_closed(element(h=1), element(h=U), EPS)
        assert elements_equal(got, element(h=add(U, mul(Rat(-1), EPS))),
                              ignore_kernel=False)
        # the Lie series terminates at order 1 and agrees exactly
        series, terminated = adjoint_series(element(h=1), element(h=U), EPS, 3)
        assert terminated and elements_equal(series, got, ignore_kernel=False)

    def test_closed_requires_single_generator(self):
        from lie_prelim.classify import ClassifyError
        with pytest.raises(ClassifyError):
            adjoint_closed(element(a1=1, a3=1), element(a0=1), EPS)


class TestFlows:
    @pytest.mark.parametrize("h_text, kind", [
        ("0", "zero"), ("3", "const"), ("2*u + 1", "affine"),
        ("3*exp(2*u)", "exp"), ("-2*exp(-u)", "exp"),
        ("u^2", "power"), ("5*u^(1/2)", "power"), ("(u+2)^3", "power"),
    ])
    def test_family_matching(self, h_text, kind):
        from lie_prelim.parse import parse
        fam = match_flow_family(parse(h_text, {}))
        assert fam is not None and fam.kind == kind

    def test_unknown_family(self):
        assert match_flow_family(ln(U)) is None
        assert match_flow_family(mul(U, ln(U))) is None

    @pytest.mark.parametrize("h_text", ["3", "2*u + 1", "3*exp(2*u)", "u^2", "u^3"])
    def test_flow_satisfies_ode_symbolically(self, h_text):
        from lie_prelim.parse import parse
        h = parse(h_text, {})
        H = flow_expr(match_flow_family(h), EPS)
        lhs = diff(H, EPS)
        rhs = substitute(h, {U: H})
        assert add(lhs, mul(Rat(-1), rhs)).is_zero

    def test_flow_initial_condition(self):
        from lie_prelim.parse import parse
        for h_text in ["3", "2*u+1", "3*exp(2*u)", "u^2"]:
            H = flow_expr(match_flow_family(parse(h_text, {})), EPS)
            assert substitute(H, {EPS: Rat(0)}) == U

    def test_numeric_flow_matches_closed_form(self):
        from lie_prelim.parse import parse
        h = parse("u^2", {})
        H = flow_expr(match_flow_family(h), EPS)
        for u0, e in ((0.8, 0.3), (1.2, -0.4)):
            closed = eval_numeric(H, {"u": u0, "eps": e})
            rk4 = numeric_flow(h, u0, e)
            assert rk4 == pytest.approx(closed, abs=1e-6)


class TestNormalize1D:
    def test_spec_example_1d1(self):
        can, wit = normalize_1d(element(a1=1, a2=3, a3=5))
        assert can.list_id == "1D-1"
        assert can.param("a") == 3 and can.param("delta") == 0
        assert any("T^x" in s.note for s in wit.steps)

    def test_spec_example_1d4(self):
        can, wit = normalize_1d(element(h=mul(Rat(2), U)))
        assert can.list_id == "1D-4"
        assert any("ln" in s.note for s in wit.steps)

    def test_spec_example_1d3(self):
        can, _ = normalize_1d(element(a3=1, h=Rat(-3)))
        assert can.list_id == "1D-3" and can.param("delta") == 1

    def test_kernel_component_ignored(self):
        can, wit = normalize_1d(element(a0=7, a1=1))
        assert can.list_id == "1D-1" and can.param("delta") == 0

    def test_zero_element_rejected(self):
        with pytest.raises(DegenerateSpanError):
            normalize_1d(element(a0=3))

    def test_canonical_forms_are_fixed_points(self):
        cases = [canonical_1d("1D-1", a=Fraction(-7, 2), delta=1),
                 canonical_1d("1D-2", delta=1, delta_t=1),
                 canonical_1d("1D-2", delta=0, delta_t=0),
                 canonical_1d("1D-3", delta=1),
                 canonical_1d("1D-4")]
        for canon in cases:
            got, _ = normalize_1d(canon.basis[0])
            assert got.list_id == canon.list_id and got.params == canon.params

    def test_witness_replay_independent(self):
        v = element(a1=2, a2=-3, a3=Fraction(1, 2), h=mul(Rat(3), U))
        can, wit = normalize_1d(v)
        replayed = wit.replay([v])
        assert elements_equal(replayed[0], can.basis[0])


class TestNormalize2D:
    def test_scaling_pair(self):
        can, wit = normalize_2d(element(a1=1), element(a2=1))
        assert can.list_id == "2D-1"
        assert can.param("delta") == 0 and can.param("delta_hat") == 0

    def test_pure_g_pair(self):
        can, _ = normalize_2d(element(h=1), element(h=U))
        assert can.list_id == "2D-8"

    def test_spec_example_2d6(self):
        can, wit = normalize_2d(element(a2=1, h=U), element(h=1))
        assert can.list_id == "2D-6"
        assert can.param("delta") == 0 and can.param("b") == 1

    def test_case_trace_for_dx_Dx(self):
        can, wit = normalize_2d(element(a3=1), element(a1=1))
        assert can.list_id == "2D-3"
        assert any("subcase (b)" in t for t in wit.case_trace)

    def test_not_closed_rejected(self):
        with pytest.raises(NotASubalgebraError):
            normalize_2d(element(h=1), element(h=power(U, Rat(2))))

    def test_degenerate_span_rejected(self):
        with pytest.raises(DegenerateSpanError):
            normalize_2d(element(a1=1), element(a1=2))

    def test_canonical_fixed_points(self):
        cases = [
            canonical_2d("2D-1", delta=1, delta_hat=Fraction(5, 2)),
            canonical_2d("2D-1", delta=0, delta_hat=Fraction(1)),
            canonical_2d("2D-2", a=Fraction(3)),
            canonical_2d("2D-3", a=Fraction(-2), delta=1),
            canonical_2d("2D-4", delta=1, delta_t=1),
            canonical_2d("2D-5", a=Fraction(1, 2), b=Fraction(-3)),
            canonical_2d("2D-6", delta=1, b=Fraction(2)),
            canonical_2d("2D-7", delta=1),
            canonical_2d("2D-8"),
        ]
        for canon in cases:
            got, _ = normalize_2d(*canon.basis)
            assert got.list_id == canon.list_id and got.params == canon.params

    def test_exponential_pure_g_pair(self):
        can, _ = normalize_2d(element(h=1), element(h=exp(mul(Rat(2), U))))
        assert can.list_id == "2D-8"

    def test_power_pure_g_pair(self):
        can, _ = normalize_2d(element(h=U), element(h=power(U, Rat(2))))
        assert can.list_id == "2D-8"


class TestSpanTools:
    def test_m_values(self):
        assert m_value([element(h=1), element(h=U)]) == 2
        assert m_value([element(a3=1)]) == 0
        assert m_value([element(a1=1, a2=2), element(a3=1),
                        element(h=1), element(h=U)]) == 2

    def test_wronskian(self):
        w = wronskian([Rat(1), U, power(U, Rat(2))])
        assert w == Rat(2)
        assert wronskian([U, mul(Rat(2), U)]).is_zero

    def test_in_span(self):
        basis = [element(a1=1, a2=2), element(h=1)]
        assert in_span(element(a1=2, a2=4, h=3), basis) == [Fraction(2), Fraction(3)]
        assert in_span(element(a2=1), basis) is None


class TestAppropriateness:
    def test_dt_excluded(self):
        rep = appropriateness([element(a2=1)])
        assert rep.dt_in_span and not rep.passes

    def test_wronskian_obstruction(self):
        rep = appropriateness([element(h=1), element(h=U),
                               element(h=power(U, Rat(2)))])
        assert rep.m == 3 and not rep.passes

    def test_theorem5_subalgebras_pass(self, gen_diff):
        from lie_prelim.parse import parse
        from lie_prelim.verify import isc_check
        a, b = Sym("a"), Sym("b")
        cases = {
            "HD-1": (theorem5_subalgebra("HD-1"), "c1*exp(u)", "exp(u)", {}),
            "HD-2": ((element(a1=1, a2=2, h=mul(b, U)), element(a3=1), element(h=1)),
                     "0", "c2", {}),
            "HD-3": ((element(a1=1, a2=a), element(h=1), element(h=U)),
                     "0", "x^(2-a)", {"a": (Fraction(2),)}),
            "HD-4": (theorem5_subalgebra("HD-4", delta=1), "0", "exp(x)", {}),
            "HD-5": (theorem5_subalgebra("HD-5"), "0", "1", {}),
        }
        for name, (sub, f_s, g_s, excl) in cases.items():
            basis = sub.basis if hasattr(sub, "basis") else sub
            rep = appropriateness(list(basis))
            assert rep.closed, name
            assert rep.passes, (name, rep.notes)
            isc = isc_check(list(basis), parse(f_s, {}), parse(g_s, {}), gen_diff,
                            excluded=excl)
            assert isc.passed, (name, isc.residuals)

    def test_corollary5_pure_g_intersection(self):
        rep = appropriateness([element(a1=1, a2=2), element(a3=1),
                               element(h=1), element(h=U)])
        assert rep.m == 2 and rep.pure_g_intersection is True

    def test_dimension_bound(self):
        rep = appropriateness(theorem5_subalgebra("HD-5").basis)
        assert rep.dim == 4 and rep.dim <= 4


# ---------------------------------------------------------------------------
# Seeded fuzz campaigns (the acceptance suite re-runs these at full size)
# ---------------------------------------------------------------------------

def rand_fraction(rng, lo=-5, hi=5):
    return Fraction(rng.randint(lo * 2, hi * 2), rng.choice([1, 2]))


def rand_catalog_h(rng):
    kind = rng.choice(["zero", "const", "linear", "exp", "power"])
    if kind == "zero":
        return Rat(0)
    if kind == "const":
        c = rand_fraction(rng)
        return Rat(c if c != 0 else 1)
    if kind == "linear":
        b = rand_fraction(rng)
        b = b if b != 0 else Fraction(1)
        return add(mul(Rat(b), U), Rat(rand_fraction(rng)))
    if kind == "exp":
        c = rand_fraction(rng)
        c = c if c != 0 else Fraction(2)
        gam = rng.choice([Fraction(-2), Fraction(-1), Fraction(1), Fraction(2),
                          Fraction(1, 2)])
        return mul(Rat(c), exp(mul(Rat(gam), U)))
    c = rand_fraction(rng)
    c = c if c != 0 else Fraction(1)
    k = rng.choice([Fraction(2), Fraction(3), Fraction(-1), Fraction(1, 2),
                    Fraction(3, 2), Fraction(-2)])
    return mul(Rat(c), power(U, Rat(k)))


def random_element(rng):
    def comp():
        return Rat(0) if rng.random() < 0.4 else Rat(rand_fraction(rng))
    return element(a0=comp(), a1=comp(), a2=comp(), a3=comp(), h=rand_catalog_h(rng))


def run_1d_fuzz(seed, count):
    rng = random.Random(seed)
    hits = {}
    done = 0
    while done < count:
        v = random_element(rng)
        if v.is_zero_ess:
            continue
        can, wit = normalize_1d(v)      # witness replay asserted internally
        assert can.list_id in ("1D-1", "1D-2", "1D-3", "1D-4")
        replayed = wit.replay([v])      # independent replay
        assert elements_equal(replayed[0], can.basis[0])
        hits[can.list_id] = hits.get(can.list_id, 0) + 1
        done += 1
    return hits


def random_canonical_2d(rng):
    lid = rng.choice(["2D-1", "2D-2", "2D-3", "2D-4", "2D-5", "2D-6", "2D-7", "2D-8"])
    kw = {}
    if lid == "2D-1":
        kw = dict(delta=rng.choice([0, 1]))
        if kw["delta"] == 1 and rng.random() < 0.7:
            kw["delta_hat"] = rand_fraction(rng)
        else:
            kw["delta_hat"] = Fraction(rng.choice([0, 1]))
    elif lid == "2D-2":
        kw = dict(a=Fraction(rng.randint(-4, 4)))
    elif lid == "2D-3":
        kw = dict(a=Fraction(rng.randint(-4, 4)), delta=rng.choice([0, 1]))
    elif lid == "2D-4":
        kw = dict(delta=rng.choice([0, 1]), delta_t=rng.choice([0, 1]))
    elif lid == "2D-5":
        kw = dict(a=Fraction(rng.randint(-4, 4)), b=Fraction(rng.randint(-3, 3)))
    elif lid == "2D-6":
        kw = dict(delta=rng.choice([0, 1]), b=Fraction(rng.randint(-3, 3)))
    elif lid == "2D-7":
        kw = dict(delta=rng.choice([0, 1]))
    return canonical_2d(lid, **kw)


def random_gmap(rng):
    kind = rng.choice(["affine", "affine", "exp", "power", "log"])
    if kind == "affine":
        alpha = rand_fraction(rng)
        alpha = alpha if alpha != 0 else Fraction(1)
        beta = Fraction(rng.randint(-3, 3))
        fwd = add(mul(Rat(alpha), U), Rat(beta))
        inv = mul(power(Rat(alpha), Rat(-1)), add(U, Rat(-beta)))
        return u_transformation(fwd, inv)
    if kind == "exp":
        return u_transformation(exp(U), ln(U))
    if kind == "log":
        return u_transformation(ln(U), exp(U))
    k = rng.choice([Fraction(2), Fraction(3), Fraction(1, 2), Fraction(-1)])
    return u_transformation(power(U, Rat(k)), power(U, power(Rat(k), Rat(-1))))


def in_flow_family(el):
    return el.h.is_zero or match_flow_family(el.h) is not None


def random_2d_orbit_input(rng):
    """A closed 2D subalgebra obtained by pushing a canonical pair through
    random basis changes and the push-forwards admitted by the classification
    (x-translations, x-scalings and u-transformations from the catalog)."""
    canon = random_canonical_2d(rng)
    basis = list(canon.basis)
    for _ in range(rng.randint(1, 4)):
        move = rng.random()
        if move < 0.35:
            while True:
                m = [[Fraction(rng.randint(-3, 3)) for _ in range(2)] for _ in range(2)]
                if m[0][0] * m[1][1] - m[0][1] * m[1][0] != 0:
                    break
            basis = [_combo(m[i], basis) for i in range(2)]
        elif move < 0.6:
            p = x_translation(Rat(Fraction(rng.randint(-6, 6), rng.choice([1, 2]))))
            basis = [element_pushforward(p, v) for v in basis]
        elif move < 0.8:
            s = rand_fraction(rng)
            p = x_scaling(Rat(s if s != 0 else 1))
            basis = [element_pushforward(p, v) for v in basis]
        else:
            p = random_gmap(rng)
            try:
                cand = [element_pushforward(p, v) for v in basis]
            except Exception:
                continue
            if all(in_flow_family(v) for v in cand):
                basis = cand
    return canon, basis


def run_2d_fuzz(seed, count):
    rng = random.Random(seed)
    hits = {}
    for _ in range(count):
        canon, basis = random_2d_orbit_input(rng)
        assert is_closed(basis)
        got, wit = normalize_2d(basis[0], basis[1])
        assert got.list_id == canon.list_id
        replayed = wit.replay(basis)
        for r, w in zip(replayed, got.basis):
            assert elements_equal(r, w)
        hits[got.list_id] = hits.get(got.list_id, 0) + 1
    return hits


class TestFuzzSmoke:
    def test_1d_sample(self):
        hits = run_1d_fuzz(seed=101, count=120)
        assert sum(hits.values()) == 120
        assert len(hits) >= 3

    def test_2d_sample(self):
        hits = run_2d_fuzz(seed=202, count=60)
        assert sum(hits.values()) == 60
