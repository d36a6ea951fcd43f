"""Rank-metric list-decoding toolkit: exact finite-field combinatorics,
provably-uniform samplers, support-growth chain certificates, code checks,
and a reproducible Monte Carlo experiment harness."""

from .chains import (
    ChainCertificate,
    ChainSearchError,
    VectorQ,
    chain_guarantee,
    find_translate_chain,
    greedy_chain,
    is_c_increasing,
)
from .codes import (
    CodeRate,
    DecodingParams,
    RankCode,
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
from .counting import (
    BallSpec,
    ball_volume,
    ball_volume_bounds,
    gaussian_binomial,
    kq_bounds,
    rank_count,
    singleton_check,
)
from .errors import GuardError
from .experiments import (
    EXPERIMENT_IDS,
    ExperimentConfig,
    ExperimentResult,
    SummaryStats,
    TrialRecord,
    claim42_exact_tail,
    intervals_strictly_decreasing,
    lemma41_exact_probability,
    lemma43_exact_distribution,
    run_claim42,
    run_experiment,
    run_lemma41,
    run_lemma43,
    run_randcode,
    run_theorem31,
    wilson_interval,
    write_results,
)
from .gf import Field, FieldElement, build_field, fe_add, fe_inv, fe_mul, fe_sub, field_from_order
from .matgf import (
    MatrixF,
    Subspace,
    enumerate_low_rank,
    enumerate_matrices,
    enumerate_subspaces,
    mat_linear_combine,
    mat_mul,
    mat_rank,
    matrix_from_text,
    matrix_to_text,
    rank_distance,
    subspace_from_rows,
    subspace_intersect_dim,
    subspace_sum_dim,
)
from .sampling import (
    BernoulliQPower,
    SeedSpec,
    Xoshiro256StarStar,
    bernoulli_q_power,
    mix64,
    sample_ball_uniform,
    sample_d2_pair,
    sample_random_code,
    sample_random_linear_code,
    sample_uniform_matrix,
    sample_uniform_rank_matrix,
    sample_uniform_subspace,
)

__version__ = "0.1.0"
