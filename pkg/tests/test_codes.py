from fractions import Fraction

import pytest

from rankdec.codes import (
    DecodingParams,
    ball_codeword_count,
    code_from_text,
    code_rate,
    code_to_text,
    codewords,
    general_code,
    is_list_decodable_exact,
    linear_code,
    linear_code_from_subspace,
    list_decode,
    mat_from_vector,
    max_list_size_monte_carlo,
    min_rank_distance,
    normalized_min_distance,
)
from rankdec.counting import singleton_check
from rankdec.errors import GuardError
from rankdec.gf import build_field
from rankdec.matgf import MatrixF, enumerate_matrices, mat_rank
from rankdec.sampling import SeedSpec, sample_random_linear_code

F2 = build_field(2)

I2 = MatrixF.identity(F2, 2)
ONES = MatrixF.from_rows(F2, [[1, 1], [1, 1]])
# multiplication-by-x companion matrix of GF(4): span{I, MX} has all nonzero
# words invertible, so its minimum rank distance is 2 (Singleton-tight)
MX = MatrixF.from_rows(F2, [[0, 1], [1, 1]])
ZERO = MatrixF.zeros(F2, 2, 2)
SPAN_MRD = linear_code(F2, 2, 2, [I2, MX])


# ---------------------------------------------------------------
# construction
# ---------------------------------------------------------------


def test_linear_code_basics():
    assert SPAN_MRD.is_linear
    assert SPAN_MRD.dimension == 2
    assert SPAN_MRD.size == 4
    words = sorted(w.encode() for w in codewords(SPAN_MRD))
    assert len(words) == 4
    assert SPAN_MRD.contains(ZERO)
    assert SPAN_MRD.contains(I2 + MX)


def test_shape_constraint():
    with pytest.raises(ValueError):
        linear_code(F2, 2, 3, [MatrixF.zeros(F2, 2, 3)])  # m < n


def test_general_code_duplicates_rejected():
    with pytest.raises(ValueError):
        general_code(F2, 2, 2, [I2, I2])
    c = general_code(F2, 2, 2, [ZERO, I2])
    assert not c.is_linear
    assert c.size == 2


def test_dependent_generators_collapse():
    c = linear_code(F2, 2, 2, [I2, I2, MX])
    assert c.dimension == 2


# ---------------------------------------------------------------
# rate
# ---------------------------------------------------------------


def test_rate_linear():
    full = linear_code(F2, 2, 2, [mat_from_vector(F2, 2, 2, row) for row in
                                  ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))])
    assert code_rate(full).exact == 1
    trivial = linear_code(F2, 2, 2, [])
    assert code_rate(trivial).exact == 0
    assert code_rate(SPAN_MRD).exact == Fraction(1, 2)


def test_rate_general():
    r = code_rate(general_code(F2, 2, 2, [ZERO, I2]))
    assert r.exact == Fraction(1, 4)  # size 2 = q^1, mn = 4
    r3 = code_rate(general_code(F2, 2, 2, [ZERO, I2, ONES]))
    assert r3.exact is None
    assert abs(r3.approx - (1.5849625007211562 / 4)) < 1e-12
    assert r3.size == 3 and r3.mn == 4


# ---------------------------------------------------------------
# minimum distance
# ---------------------------------------------------------------


def test_min_rank_distance_examples():
    assert min_rank_distance(general_code(F2, 2, 2, [ZERO, I2])) == 2
    full = linear_code(F2, 2, 2, [mat_from_vector(F2, 2, 2, r) for r in
                                  ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))])
    assert min_rank_distance(full) == 1
    assert min_rank_distance(SPAN_MRD) == 2  # every nonzero word is invertible
    assert normalized_min_distance(SPAN_MRD) == 1
    # the all-ones 2x2 matrix itself has rank 1, so its span with I does not
    assert min_rank_distance(linear_code(F2, 2, 2, [I2, ONES])) == 1
    with pytest.raises(ValueError):
        min_rank_distance(linear_code(F2, 2, 2, []))


def test_singleton_consistency_on_random_codes():
    rng = SeedSpec(21).rng_for_trial(0)
    for _ in range(25):
        k = 1 + rng.randbelow(4)
        space = sample_random_linear_code(F2, 2, 2, k, rng)
        code = linear_code_from_subspace(F2, 2, 2, space)
        d = min_rank_distance(code)
        assert singleton_check(2, 2, 2, code.size, d)


# ---------------------------------------------------------------
# list decoding
# ---------------------------------------------------------------


def test_list_decode_contains_center_codeword():
    out = list_decode(SPAN_MRD, I2, Fraction(1, 4))
    assert I2 in out


def test_list_decode_trivial_empty():
    c = general_code(F2, 2, 2, [ZERO])
    assert list_decode(c, I2, Fraction(1, 2)) == []


def test_list_decode_around_zero():
    # no rank-1 words in span{I, ones}, so only 0 is within radius 1/2 of 0
    out = list_decode(SPAN_MRD, ZERO, Fraction(1, 2))
    assert out == [ZERO]


def test_list_decode_sides_agree():
    rng = SeedSpec(22).rng_for_trial(0)
    from rankdec.sampling import sample_uniform_matrix

    big = linear_code(F2, 2, 2, [mat_from_vector(F2, 2, 2, r) for r in
                                 ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0))])
    for _ in range(20):
        y = sample_uniform_matrix(F2, 2, 2, rng)
        for rho in (Fraction(1, 2), Fraction(1, 4)):
            hits = list_decode(big, y, rho)
            direct = [w for w in codewords(big) if mat_rank(w - y) <= (rho * 2).__floor__()]
            assert sorted(w.encode() for w in hits) == sorted(w.encode() for w in direct)
            assert ball_codeword_count(big, y, rho) == len(hits)


def test_list_decode_translation_covariance():
    # |list| equals the count from an independent direct loop at every center
    rng = SeedSpec(23).rng_for_trial(0)
    from rankdec.sampling import sample_uniform_matrix

    for _ in range(20):
        y = sample_uniform_matrix(F2, 2, 2, rng)
        n_direct = 0
        for w in codewords(SPAN_MRD):
            if mat_rank(w - y) <= 1:
                n_direct += 1
        assert len(list_decode(SPAN_MRD, y, Fraction(1, 2))) == n_direct


# ---------------------------------------------------------------
# exact list-decodability
# ---------------------------------------------------------------


def test_exact_checker_trivial_bounds():
    assert is_list_decodable_exact(SPAN_MRD, Fraction(1, 2), 4) == (True, None)
    full = linear_code(F2, 2, 2, [mat_from_vector(F2, 2, 2, r) for r in
                                  ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))])
    ok, witness = is_list_decodable_exact(full, Fraction(1, 2), 9)
    assert not ok and witness is not None


def test_exact_checker_span_example():
    # pigeonhole: 4 codewords x ball 10 > 16 centers, so no 2-dimensional
    # code here can be (1/2, 1)-list-decodable; the exact maximum is 3
    ok, witness = is_list_decodable_exact(SPAN_MRD, Fraction(1, 2), 1)
    assert not ok and witness is not None
    assert is_list_decodable_exact(SPAN_MRD, Fraction(1, 2), 3) == (True, None)


def test_exact_checker_witness_is_canonical():
    full = linear_code(F2, 2, 2, [mat_from_vector(F2, 2, 2, r) for r in
                                  ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))])
    _, witness = is_list_decodable_exact(full, Fraction(1, 2), 1)
    assert witness.encode() == 0  # first center in encoding order


def test_monte_carlo_max_list_size():
    rng = SeedSpec(24).rng_for_trial(0)
    assert max_list_size_monte_carlo(SPAN_MRD, Fraction(1, 2), 0, rng) == 0
    # exhaustive mode equals the exact maximum
    exact_max = 0
    for y in enumerate_matrices(F2, 2, 2):
        exact_max = max(exact_max, ball_codeword_count(SPAN_MRD, y, Fraction(1, 2)))
    assert max_list_size_monte_carlo(SPAN_MRD, Fraction(1, 2), 16, rng) == exact_max
    # sampled mode lower-bounds it and grows monotonically under one stream
    rng = SeedSpec(25).rng_for_trial(0)
    a = max_list_size_monte_carlo(SPAN_MRD, Fraction(1, 2), 3, rng)
    rng = SeedSpec(25).rng_for_trial(0)
    b = max_list_size_monte_carlo(SPAN_MRD, Fraction(1, 2), 10, rng)
    assert a <= b <= exact_max


# ---------------------------------------------------------------
# parameters
# ---------------------------------------------------------------


def test_decoding_params():
    p = DecodingParams(4, 4, Fraction(1, 4), Fraction(1, 8))
    assert p.b == 1
    assert p.capacity == Fraction(9, 16)
    assert p.rate == Fraction(7, 16)
    assert p.dimension() == 7
    with pytest.raises(ValueError):
        DecodingParams(4, 4, Fraction(1, 4), Fraction(0))
    with pytest.raises(ValueError):
        DecodingParams(4, 4, Fraction(5, 4), Fraction(1, 8))
    with pytest.raises(ValueError):
        DecodingParams(4, 4, Fraction(1, 4), Fraction(9, 16))  # rate 0


def test_decoding_params_rectangular():
    p = DecodingParams(6, 3, Fraction(1, 3), Fraction(1, 18))
    assert p.b == Fraction(1, 2)
    assert p.capacity == Fraction(2, 3) * Fraction(5, 6)
    assert p.dimension() == ((p.capacity - Fraction(1, 18)) * 18).__floor__()


# ---------------------------------------------------------------
# text format
# ---------------------------------------------------------------


def test_code_text_round_trip_linear():
    text = code_to_text(SPAN_MRD)
    back = code_from_text(text)
    assert back.is_linear and back.basis == SPAN_MRD.basis


def test_code_text_round_trip_general():
    c = general_code(F2, 2, 2, [ZERO, I2, ONES])
    back = code_from_text(code_to_text(c))
    assert not back.is_linear
    assert back.words == c.words


def test_code_text_errors():
    with pytest.raises(ValueError):
        code_from_text("")
    with pytest.raises(ValueError):
        code_from_text("2 2 2 1 banana\n2 2 2\n1 0\n0 1\n")
    with pytest.raises(ValueError):
        code_from_text("2 2 2 2 linear\n2 2 2\n1 0\n0 1\n")  # block count mismatch


# ---------------------------------------------------------------
# guards
# ---------------------------------------------------------------


def test_enumeration_guards():
    big = linear_code(F2, 2, 2, [mat_from_vector(F2, 2, 2, r) for r in
                                 ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))])
    with pytest.raises(GuardError):
        list(codewords(big, limit=3))
    with pytest.raises(GuardError):
        is_list_decodable_exact(big, Fraction(1, 2), 1, center_limit=4)
