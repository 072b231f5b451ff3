import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsstab import rng as R
from hsstab.errors import MixedContext, PatternViolation, WitnessNotFound
from hsstab.exact import ZpContext, ZpRational
from hsstab.groups import (
    GpElement,
    UTMatrix,
    alpha_pow,
    commutator,
    diag_power,
    elementary,
    gk_embed,
    gp,
    gp_identity,
    gp_inv,
    gp_mul,
    heis_embed,
    in_Hp,
    in_HK,
    kp_generators,
    kp_mul,
    kp_structure_checks,
    nilpotency_witness,
    pattern_join,
    qp_identity,
    qp_mul,
    qp_of,
    random_gp,
    random_matrix,
)

from oracles import frac_gp_mul, frac_identity, frac_matmul, frac_matrix, heis_matrix, triple

C2 = ZpContext(2)
C3 = ZpContext(3)


def E(i, j, x=1, pattern="Kp", ctx=C2):
    return elementary(ctx, i, j, x, pattern)


@st.composite
def gp_elems(draw, ctx=C2):
    n1, n2 = draw(st.integers(-2 ** 20, 2 ** 20)), draw(st.integers(-2 ** 20, 2 ** 20))
    e1, e2 = draw(st.integers(0, 8)), draw(st.integers(0, 8))
    return GpElement(ZpRational(ctx, n1, e1), ZpRational(ctx, n2, e2), draw(st.integers(-20, 20)))


# ---- G_p -----------------------------------------------------------------------

def test_gp_mul_examples():
    assert gp(C2, 1, 0, 0) * gp(C2, 0, 1, 0) == gp(C2, 1, 1, 0)
    assert gp(C2, 0, 0, 1) * gp(C2, 0, 1, 0) == gp(C2, 1, 1, 1)
    g = gp(C2, "3/8", -5, 4)
    assert gp_mul(g, gp_identity(C2)) == g


def test_gp_inv_examples():
    assert gp_inv(gp(C2, 1, 1, 1)) == gp(C2, 0, -1, -1)
    assert gp_inv(gp_identity(C2)).is_identity()


def test_alpha_pow_examples():
    one, zero = C2.one, C2.zero
    assert alpha_pow((zero, one), 1) == (one, one)
    x, y = C2.from_fraction(1, 2), C2.from_fraction(1, 4)
    assert alpha_pow((x, y), 0) == (x, y)
    assert alpha_pow((x, y), 3) == (C2.from_fraction(5, 4), y)


def test_conjugation_by_generator_realizes_alpha():
    a, b = C2.from_fraction(3, 8), C2.from_fraction(-5, 4)
    t = gp(C2, 0, 0, 1)
    assert t * GpElement(a, b, 0) * t.inv() == GpElement(a + b, b, 0)


@given(gp_elems(), gp_elems(), gp_elems())
def test_gp_law_matches_fraction_oracle(g, h, k):
    assert triple(g * h) == frac_gp_mul(triple(g), triple(h))
    assert (g * h) * k == g * (h * k)
    assert (g * g.inv()).is_identity() and (g.inv() * g).is_identity()
    assert g.inv().inv() == g


def test_gp_mixed_context():
    with pytest.raises(MixedContext):
        gp(C2, 1, 0, 0) * gp(C3, 1, 0, 0)


def test_in_hp_examples():
    assert in_Hp(gp(C2, 3, -2, 0))
    assert not in_Hp(gp(C2, "1/2", 0, 0))
    assert not in_Hp(gp(C2, 0, 0, 1))
    assert in_Hp(gp_identity(C2))


def test_gp_json_round_trip():
    g = gp(C3, "7/27", -4, -3)
    assert GpElement.from_json(C3, g.to_json()) == g


# ---- Heisenberg and G_K embeddings --------------------------------------------

def test_heis_embed_examples():
    m = heis_embed(gp(C2, 1, 1, 1))
    assert (m.entry(1, 2), m.entry(1, 3), m.entry(2, 3)) == (C2.one, C2.zero, -C2.one)
    assert heis_embed(gp_identity(C2)).is_identity()


@given(gp_elems(), gp_elems())
def test_heis_embed_against_fraction_matrices(g, h):
    lhs = frac_matrix(heis_embed(g * h))
    rhs = frac_matmul(heis_matrix(triple(g)), heis_matrix(triple(h)))
    assert lhs == rhs
    assert heis_embed(g) * heis_embed(h) == heis_embed(g * h)


def test_gk_embed_examples():
    m = gk_embed(gp(C2, 0, 0, 1))
    assert m.entries() == {(4, 5): ZpRational(C2, -1)}
    assert gk_embed(gp_identity(C2)).is_identity()
    assert gk_embed(gp(C2, 1, 0, 0)).fits("HK") and gk_embed(gp(C2, 0, 1, 0)).fits("HK")


@given(gp_elems(), gp_elems())
def test_gk_embed_is_homomorphism(g, h):
    assert gk_embed(g) * gk_embed(h) == gk_embed(g * h)
    assert frac_matrix(gk_embed(g * h)) == frac_matmul(frac_matrix(gk_embed(g)), frac_matrix(gk_embed(h)))
    assert in_HK(gk_embed(g)) == in_Hp(g)


def test_embeddings_injective_on_samples():
    rng = R.make_rng(11)
    xs = [random_gp(C2, rng) for _ in range(500)]
    assert len({heis_embed(x) for x in xs}) == len(set(xs))
    assert len({gk_embed(x) for x in xs}) == len(set(xs))


# ---- Q_p -----------------------------------------------------------------------

def test_qp_examples():
    assert qp_of(gp(C2, 0, 1, 0)).is_identity()
    h = qp_of(gp(C2, "1/2", 0, 0))
    assert qp_mul(h, h).is_identity()


@given(gp_elems(), gp_elems())
def test_quotient_map_is_homomorphism(g, h):
    assert qp_of(g) * qp_of(h) == qp_of(g * h)
    assert (qp_of(g) * qp_of(g).inv()).is_identity()
    assert qp_of(g) * qp_identity(C2) == qp_of(g)


# ---- matrices -----------------------------------------------------------------

def test_kp_mul_examples():
    prod = E(1, 2) * E(2, 4)
    assert prod.entries() == {(1, 2): C2.one, (1, 4): C2.one, (2, 4): C2.one}
    a = diag_power(C2, 2, 1)
    assert a * E(1, 2) * a.inv() == E(1, 2, "1/2")
    g = random_matrix(C2, R.make_rng(3), "Kp")
    assert (g * g.inv()).is_identity()


def test_pattern_validation():
    with pytest.raises(PatternViolation):
        UTMatrix.from_entries(C2, {(1, 3): 1}, "Kp")
    with pytest.raises(PatternViolation):
        UTMatrix.from_entries(C2, {(4, 5): "1/2"}, "Kp")
    with pytest.raises(PatternViolation):
        UTMatrix.from_entries(C2, {(1, 4): "1/2"}, "HK")
    with pytest.raises(PatternViolation):
        UTMatrix.from_entries(C2, {}, "Kp", diag=[1, 3, 1, 1, 1])
    assert pattern_join("N", "Gtilde") == "Gtilde"
    assert (E(1, 2) * E(1, 3, pattern="Gtilde")).pattern == "Gtilde"


def test_classify_chain():
    assert E(1, 4).classify() == "HK"
    assert E(4, 5).classify() == "GK"
    assert E(1, 2).classify() == "N"
    assert diag_power(C2, 2, 1).classify() == "Kp"
    assert diag_power(C2, 3, 1, "Gtilde").classify() == "Gtilde"


@pytest.mark.parametrize("pattern", ["HK", "GK", "N", "Kp", "Gtilde"])
def test_matrix_products_match_fraction_oracle(pattern):
    rng = R.make_rng(5)
    for _ in range(100):
        g, h = random_matrix(C2, rng, pattern), random_matrix(C2, rng, pattern)
        assert g.fits(pattern)
        assert frac_matrix(g * h) == frac_matmul(frac_matrix(g), frac_matrix(h))
        assert frac_matmul(frac_matrix(g), frac_matrix(g.inv())) == frac_identity(5)


def test_matrix_json_round_trip():
    g = random_matrix(C3, R.make_rng(9), "Gtilde")
    assert UTMatrix.from_json(C3, g.to_json()) == g


# ---- structure ----------------------------------------------------------------

def test_nilpotency_gp():
    rep = nilpotency_witness(C2, "Gp", 1000, 1)
    assert rep["passed"] and rep["expected_class"] == 2 and rep["witness"]


def test_nilpotency_n():
    rep = nilpotency_witness(C2, "N_of_Kp", 1000, 1)
    assert rep["passed"] and rep["expected_class"] == 3 and rep["witness"]


def test_abelian_subsample_commutes():
    rng = R.make_rng(2)
    xs = [gp(C2, random_gp(C2, rng).a, 0, 0) for _ in range(50)]
    assert all(commutator(x, y).is_identity() for x in xs for y in xs)


def test_witness_not_found_on_tiny_sample(monkeypatch):
    import hsstab.groups as G
    monkeypatch.setattr(G, "random_gp", lambda ctx, rng: gp(ctx, 1, 0, 0))
    with pytest.raises(WitnessNotFound):
        G.nilpotency_witness(C2, "Gp", 5, 0)


def test_hk_conjugation_example():
    lhs = E(4, 5) * E(1, 4, -1) * E(4, 5).inv()
    assert lhs == E(1, 4, -1) * E(1, 5)
    assert in_HK(lhs)


def test_central_element_commutes_with_generators():
    z = E(1, 5, "1/2")
    assert all(z * g == g * z for g in kp_generators(C2).values())
    ident = UTMatrix.identity(C2)
    assert all(ident * g == g * ident for g in kp_generators(C2).values())


def test_kp_structure_report():
    rep = kp_structure_checks(C3, 300, 4)
    assert rep["passed"] and rep["normality"]["passed"] and rep["center"]["passed"]


def test_kp_mul_mixed_sizes():
    with pytest.raises(PatternViolation):
        kp_mul(heis_embed(gp(C2, 1, 0, 0)), E(1, 2))
