import json
import math
from fractions import Fraction

import pytest

from rankdec.errors import GuardError
from rankdec.experiments import (
    CSV_HEADER,
    ExperimentConfig,
    claim42_exact_tail,
    fraction_le_scaled_power,
    intervals_strictly_decreasing,
    lemma41_exact_probability,
    lemma43_exact_distribution,
    results_csv_text,
    run_claim42,
    run_experiment,
    run_lemma41,
    run_lemma43,
    run_randcode,
    run_theorem31,
    summary_json_text,
    wilson_interval,
    write_results,
)


def _cfg(**kw):
    base = dict(q=2, m=2, n=2, trials=100, master_seed=0)
    base.update(kw)
    return ExperimentConfig(**base)


# ---------------------------------------------------------------
# configuration
# ---------------------------------------------------------------


def test_unknown_experiment_rejected():
    with pytest.raises(ValueError):
        _cfg(experiment="lemma99", rho=Fraction(1, 2))


def test_config_json_round_trip():
    cfg = _cfg(experiment="lemma41", rho=Fraction(1, 2), center="zero")
    back = ExperimentConfig.from_json_dict(json.loads(json.dumps(cfg.to_json_dict())))
    assert back == cfg
    with pytest.raises(ValueError):
        ExperimentConfig.from_json_dict({"experiment": "lemma41", "bogus": 1})


def test_parameter_applicability():
    with pytest.raises(ValueError):
        _cfg(experiment="lemma41")  # rho missing
    with pytest.raises(ValueError):
        _cfg(experiment="claim42", d1=1, d2=2, alpha=Fraction(1, 2))  # d1 < d2
    with pytest.raises(ValueError):
        _cfg(experiment="claim42", d1=2, d2=2)  # no alpha and no epsilon
    with pytest.raises(ValueError):
        _cfg(experiment="lemma43", rho=Fraction(1, 2), ell=2)  # span_factor missing
    with pytest.raises(ValueError):
        _cfg(experiment="theorem31", rho=Fraction(1, 4))  # epsilon or dim_k needed
    with pytest.raises(ValueError):
        _cfg(experiment="lemma41", rho=Fraction(1, 2), s1=1)  # s2 missing
    with pytest.raises(GuardError):
        _cfg(experiment="lemma43", q=2, m=21, n=21, rho=Fraction(1, 2), ell=21, span_factor=2)


def test_claim42_alpha_default_from_epsilon():
    # with delta defaulting to epsilon: alpha = eps^2/(2 eps - eps^2) = eps/(2 - eps)
    cfg = _cfg(experiment="claim42", m=4, d1=2, d2=2, epsilon=Fraction(1, 2))
    from rankdec.experiments import _claim42_alpha

    assert _claim42_alpha(cfg) == Fraction(1, 3)


def test_non_prime_power_q_rejected():
    with pytest.raises(ValueError):
        _cfg(experiment="lemma41", q=6, rho=Fraction(1, 2))


# ---------------------------------------------------------------
# statistics helpers
# ---------------------------------------------------------------


def test_wilson_interval_basics():
    lo, hi = wilson_interval(0, 0)
    assert (lo, hi) == (0.0, 1.0)
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    lo0, hi0 = wilson_interval(0, 1000)
    assert lo0 == 0.0 and 0 < hi0 < 0.02


def test_fraction_le_scaled_power():
    assert fraction_le_scaled_power(Fraction(1, 35), 64, 2, Fraction(-1))
    assert not fraction_le_scaled_power(Fraction(33), 64, 2, Fraction(-1))
    # boundary: 32 <= 64 * 2^-1 exactly
    assert fraction_le_scaled_power(Fraction(32), 64, 2, Fraction(-1))
    assert fraction_le_scaled_power(Fraction(1, 10), 64, 2, Fraction(-17, 2))
    assert not fraction_le_scaled_power(Fraction(1, 5), 64, 2, Fraction(-17, 2))


def test_intervals_strictly_decreasing():
    from rankdec.experiments import SummaryStats

    mk = lambda est, lo, hi: SummaryStats("x", 1, 1, est, lo, hi, None, "info")
    assert intervals_strictly_decreasing([mk(0.5, 0.4, 0.6), mk(0.2, 0.1, 0.3)])
    assert not intervals_strictly_decreasing([mk(0.5, 0.4, 0.6), mk(0.45, 0.35, 0.55)])


# ---------------------------------------------------------------
# exact oracles
# ---------------------------------------------------------------


def test_lemma41_exact_oracle_value():
    assert lemma41_exact_probability(2, 2, 2, Fraction(1, 2)) == Fraction(64, 100)


def test_claim42_exact_tail_value():
    assert claim42_exact_tail(2, 4, 2, 2, Fraction(1, 2)) == Fraction(1, 35)
    # d1 = m forces V inside U, so the tail at alpha < 1 is 1
    assert claim42_exact_tail(2, 3, 3, 2, Fraction(1, 2)) == 1


def test_lemma43_exact_distribution_value():
    dist = lemma43_exact_distribution(2, 2, 2, Fraction(1, 2), 2)
    assert dist == {3: Fraction(36, 100), 4: Fraction(64, 100)}
    with pytest.raises(GuardError):
        lemma43_exact_distribution(2, 4, 4, Fraction(1, 2), 4)


# ---------------------------------------------------------------
# runners against their oracles
# ---------------------------------------------------------------


def test_lemma41_matches_exact():
    cfg = _cfg(experiment="lemma41", trials=4000, master_seed=7, rho=Fraction(1, 2), center="zero")
    res = run_lemma41(cfg)
    s = res.summaries[0]
    assert s.extras["exact_probability"] == "16/25"
    p = 0.64
    sigma = math.sqrt(p * (1 - p) / cfg.trials)
    assert abs(s.estimate - p) <= 3 * sigma
    assert s.interval_low <= s.estimate <= s.interval_high
    assert len(res.records) == cfg.trials
    assert all(r.outcome in (0, 1) for r in res.records)


def test_lemma41_both_centers_and_log_extras():
    cfg = _cfg(experiment="lemma41", trials=500, master_seed=1, rho=Fraction(1, 2))
    res = run_lemma41(cfg)
    assert [s.extras["center"] for s in res.summaries] == ["zero", "random"]
    assert len(res.records) == 1000
    s = res.summaries[0]
    if s.estimate > 0:
        assert abs(s.extras["log_q_phat_over_nm"] - math.log2(s.estimate) / 4) < 1e-12


def test_lemma41_degenerate_ball_flagged():
    cfg = _cfg(experiment="lemma41", trials=50, master_seed=1, rho=Fraction(1), center="zero")
    res = run_lemma41(cfg)
    s = res.summaries[0]
    assert s.extras["degenerate_ball"]
    assert s.estimate == 1.0  # the ball is everything


def test_lemma41_conditioned_mode():
    cfg = _cfg(experiment="lemma41", trials=300, master_seed=2, rho=Fraction(1, 2),
               center="zero", s1=1, s2=1)
    res = run_lemma41(cfg)
    assert res.records[0].params["s1"] == 1
    assert 0 < res.summaries[0].estimate < 1


def test_claim42_matches_exact_and_bound():
    cfg = _cfg(experiment="claim42", m=4, trials=4000, master_seed=5, d1=2, d2=2, alpha=Fraction(1, 2))
    res = run_claim42(cfg)
    s = res.summaries[0]
    assert s.extras["exact_tail"] == "1/35"
    p = 1 / 35
    sigma = math.sqrt(p * (1 - p) / cfg.trials)
    assert abs(s.estimate - p) <= 3 * sigma
    assert s.verdict == "pass"
    assert s.bound == 32.0


def test_claim42_packed_path_matches_public_sampler():
    # the packed GF(2) subspace draw consumes the stream identically to
    # sample_uniform_subspace and spans the same subspace
    from rankdec.experiments import _subspace_rows_gf2
    from rankdec.gf import build_field
    from rankdec.matgf import Subspace
    from rankdec.sampling import SeedSpec, sample_uniform_subspace

    f2 = build_field(2)
    for seed in range(50):
        for m, s in ((4, 2), (8, 3), (5, 0)):
            r1 = SeedSpec(seed).rng_for_trial(0)
            r2 = SeedSpec(seed).rng_for_trial(0)
            rows = _subspace_rows_gf2(m, s, r1)
            sub = sample_uniform_subspace(f2, m, s, r2)
            vecs = [tuple((r >> i) & 1 for i in range(m)) for r in rows]
            assert Subspace.span(f2, m, vecs) == sub
            assert r1.randbits(8) == r2.randbits(8)


def test_claim42_generic_field_runs():
    cfg = _cfg(experiment="claim42", q=3, m=3, trials=150, master_seed=6, d1=2, d2=1,
               alpha=Fraction(1, 2))
    res = run_claim42(cfg)
    assert res.summaries[0].verdict == "pass"
    assert all(0 <= r.count <= 1 for r in res.records)


def test_claim42_intersection_dim_recorded():
    cfg = _cfg(experiment="claim42", m=4, trials=200, master_seed=5, d1=3, d2=2, alpha=Fraction(1, 2))
    res = run_claim42(cfg)
    for r in res.records:
        assert 1 <= r.count <= 2  # d1 + d2 - m <= dim <= d2
        assert r.outcome == (r.count > 1)


def test_lemma43_matches_exact_distribution():
    cfg = _cfg(experiment="lemma43", trials=4000, master_seed=8, rho=Fraction(1, 2),
               ell=2, span_factor=2)
    res = run_lemma43(cfg)
    s = res.summaries[0]
    assert s.extras["exact_distribution"] == {"3": "9/25", "4": "16/25"}
    hist = s.extras["histogram"]
    n = cfg.trials
    for count, p in ((3, 0.36), (4, 0.64)):
        sigma = math.sqrt(p * (1 - p) / n)
        assert abs(hist[str(count)] / n - p) <= 3 * sigma
    # threshold 4 = span_factor * ell, so the tail estimate equals P[count >= 4]
    assert s.estimate == hist["4"] / n


def test_lemma43_tail_decreases_along_size_ladder():
    # at threshold 4 = span_factor * ell the tail is the pair-sum ball
    # probability, exactly 16/25 at 2x2 and 184/625 at 3x3
    summaries = []
    for nm in (2, 3):
        cfg = _cfg(experiment="lemma43", m=nm, n=nm, trials=20000, master_seed=10,
                   rho=Fraction(1, 2), ell=2, span_factor=2)
        summaries.append(run_lemma43(cfg).summaries[0])
    assert intervals_strictly_decreasing(summaries)
    for s, exact in zip(summaries, (Fraction(16, 25), Fraction(184, 625))):
        sigma = math.sqrt(float(exact) * (1 - float(exact)) / 20000)
        assert abs(s.estimate - float(exact)) <= 3 * sigma


def test_lemma43_single_matrix_always_at_least_two():
    cfg = _cfg(experiment="lemma43", trials=300, master_seed=9, rho=Fraction(1, 2),
               ell=1, span_factor=2)
    res = run_lemma43(cfg)
    assert all(r.count >= 2 for r in res.records)  # 0 and the drawn matrix itself


def test_theorem31_zero_dimension():
    cfg = _cfg(experiment="theorem31", m=2, n=2, trials=30, master_seed=1,
               rho=Fraction(1, 4), dim_k=0, centers=20, center_mode="sampled")
    res = run_theorem31(cfg)
    assert all(r.outcome <= 1 for r in res.records)  # only the zero word


def test_theorem31_exhaustive_mean_is_exact_identity():
    # with exhaustive centers the per-trial mean count is |C| |B| / q^(mn)
    cfg = _cfg(experiment="theorem31", m=2, n=2, trials=10, master_seed=4,
               rho=Fraction(1, 2), dim_k=2, center_mode="exhaustive")
    res = run_theorem31(cfg)
    for r in res.records:
        assert r.count == 4 * 10  # sum over all 16 centers: |C|*|B| = 4*10
    s = res.summaries[0]
    assert s.verdict == "pass"
    assert s.bound == 4 * 10 / 16


def test_theorem31_generic_field_path():
    cfg = _cfg(experiment="theorem31", q=3, m=2, n=2, trials=8, master_seed=4,
               rho=Fraction(1, 2), dim_k=1, center_mode="exhaustive")
    res = run_theorem31(cfg)
    vol = 1 + 32  # rank counts over F_3 at r_max = 1
    for r in res.records:
        assert r.count == 3 * vol


def test_randcode_a1_mean():
    cfg = _cfg(experiment="randcode_a1", m=3, n=3, trials=300, master_seed=12,
               rho=Fraction(1, 3), epsilon=Fraction(1, 9), centers=32)
    res = run_randcode(cfg, "a1")
    s = res.summaries[0]
    assert s.verdict == "pass"
    assert abs(s.bound - 50 / 64) < 1e-12
    assert s.extras["inclusion_exponent"] == "6"


def test_randcode_a2_derived_parameters():
    cfg = _cfg(experiment="randcode_a2", m=3, n=3, trials=200, master_seed=13,
               epsilon=Fraction(1, 2), centers=32)
    res = run_randcode(cfg, "a2")
    s = res.summaries[0]
    assert s.extras["rho"] == "1/2"
    assert s.extras["rate"] == "1/8"
    assert res.summaries[1].extras["list_bound"] == 15
    assert s.verdict == "pass"


def test_randcode_a2_degenerate_epsilon_one():
    # epsilon 1 means radius 0: balls are singletons, list sizes stay <= 1
    cfg = _cfg(experiment="randcode_a2", m=2, n=2, trials=100, master_seed=14,
               epsilon=Fraction(1), centers=16)
    res = run_randcode(cfg)
    assert all(r.outcome <= 1 for r in res.records)


def test_run_wrapper_id_checks():
    cfg = _cfg(experiment="lemma41", rho=Fraction(1, 2))
    with pytest.raises(ValueError):
        run_claim42(cfg)
    with pytest.raises(ValueError):
        run_randcode(cfg)


# ---------------------------------------------------------------
# output files and determinism
# ---------------------------------------------------------------


def test_csv_schema_and_zero_trials(tmp_path):
    cfg = _cfg(experiment="lemma41", trials=0, master_seed=1, rho=Fraction(1, 2), center="zero")
    res = run_experiment(cfg)
    csv_path, json_path = write_results(res, tmp_path / "empty.csv")
    text = csv_path.read_text()
    assert text == ",".join(CSV_HEADER) + "\n"
    doc = json.loads(json_path.read_text())
    assert doc["config"]["experiment"] == "lemma41"
    assert doc["summaries"][0]["trials"] == 0


def test_results_byte_identical_across_reruns_and_threads(tmp_path):
    cfg = _cfg(experiment="claim42", m=4, trials=400, master_seed=5, d1=2, d2=2,
               alpha=Fraction(1, 2))
    blobs = []
    for threads in (1, 1, 2):
        res = run_experiment(cfg, threads=threads)
        blobs.append((results_csv_text(res), summary_json_text(res)))
    assert blobs[0] == blobs[1] == blobs[2]


def test_record_row_count_and_sidecar_path(tmp_path):
    cfg = _cfg(experiment="lemma43", trials=25, master_seed=8, rho=Fraction(1, 2),
               ell=2, span_factor=2)
    res = run_experiment(cfg)
    csv_path, json_path = write_results(res, tmp_path / "out.csv")
    assert json_path.name == "out.summary.json"
    lines = csv_path.read_text().splitlines()
    assert len(lines) == 1 + 25
    assert lines[0] == ",".join(CSV_HEADER)


def test_param_json_is_sorted_compact():
    cfg = _cfg(experiment="lemma43", trials=2, master_seed=8, rho=Fraction(1, 2),
               ell=2, span_factor=2)
    import csv as csv_mod
    import io

    text = results_csv_text(run_experiment(cfg))
    rows = list(csv_mod.reader(io.StringIO(text)))
    assert rows[1][5] == '{"ell":2,"rho":"1/2","span_factor":2}' 
