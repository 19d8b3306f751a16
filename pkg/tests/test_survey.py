import numpy as np
import pytest

from picard_cartier.cartier import validate_curve
from picard_cartier.errors import GenerationFailed, InvalidField, OracleBoundExceeded
from picard_cartier.survey import (
    SweepConfig,
    oracle_equivalence_run,
    random_squarefree_quartic,
    sweep,
    theorem_check,
    trial_rng,
)

S0 = 0xC0FFEE


def test_first_draw_is_pinned():
    f = random_squarefree_quartic(5, trial_rng(S0, 5, 0))
    assert f.residues == (4, 0, 2, 0, 1)


def test_draws_always_validate():
    rng = trial_rng(S0, 7, 0)
    for _ in range(300):
        f = random_squarefree_quartic(7, rng)
        validate_curve(7, f.residues)


def test_nonzero_constant_flag():
    rng = trial_rng(S0, 5, 1)
    for _ in range(1000):
        assert random_squarefree_quartic(5, rng, require_nonzero_constant=True).residues[0] != 0


def test_generation_failure_is_reported():
    class Stuck:
        # Always proposes x^4, which is never squarefree.
        def integers(self, low, high, size=None):
            return np.zeros(size, dtype=np.int64) if size else 1

    with pytest.raises(GenerationFailed):
        random_squarefree_quartic(5, Stuck())


@pytest.mark.parametrize(
    "p, predicted, actual, matches",
    [(5, 1, 1, True), (13, 0, 0, True), (7, 0, 2, False)],
)
def test_theorem_check_examples(p, predicted, actual, matches):
    rec = theorem_check(validate_curve(p, (1, 0, 0, 0, 1)))
    assert (rec.predicted_a, rec.a_number, rec.matches_theorem) == (predicted, actual, matches)
    assert rec.p_mod_3 == p % 3


def test_theorem_check_hypothesis_flag():
    curve = validate_curve(5, (0, 1, 0, 0, 1))
    assert not theorem_check(curve).nonzero_constant
    with pytest.raises(ValueError):
        theorem_check(curve, require_nonzero_constant=True)


def test_config_validation():
    with pytest.raises(InvalidField):
        SweepConfig(primes=(5, 9))
    with pytest.raises(ValueError):
        SweepConfig(primes=(5,), trials_per_prime=0)
    with pytest.raises(ValueError):
        SweepConfig(primes=(5,), seed=-1)
    assert SweepConfig.from_range(1, 50, residue=2).primes == (5, 11, 17, 23, 29, 41, 47)


def test_single_record_sweep():
    report = sweep(SweepConfig(primes=(5,), trials_per_prime=1, seed=S0))
    assert len(report.records) == 1
    assert report.tallies == {5: [0, 1, 0, 0]}
    assert report.records[0].coefficients == (4, 0, 2, 0, 1)


def test_p_2_mod_3_forces_positive_a_number():
    config = SweepConfig.from_range(5, 50, residue=2, trials_per_prime=100, seed=S0)
    report = sweep(config)
    assert report.records and all(r.a_number >= 1 for r in report.records)


def test_tallies_sum_to_trials():
    config = SweepConfig.from_range(5, 30, trials_per_prime=17, seed=3, inject=((7, (1, 0, 0, 0, 1)),))
    report = sweep(config)
    assert all(sum(c) == 17 for c in report.tallies.values())
    keys = [(r.p, r.trial) for r in report.records]
    assert keys == sorted(keys)


def test_sub_seed_independence():
    small = sweep(SweepConfig(primes=(7, 13), trials_per_prime=10, seed=9))
    big = sweep(SweepConfig(primes=(5, 7, 11, 13, 19), trials_per_prime=10, seed=9))
    kept = [r for r in big.records if r.p in (7, 13)]
    assert kept == list(small.records)


def test_counterexamples_are_reproducible():
    config = SweepConfig.from_range(5, 20, trials_per_prime=30, seed=S0)
    report = sweep(config)
    for rec in report.counterexamples:
        again = sweep(SweepConfig(primes=(rec.p,), trials_per_prime=rec.trial + 1, seed=S0))
        assert again.records[rec.trial] == rec
        assert not rec.matches_theorem


def test_determinism_and_worker_independence():
    config = SweepConfig.from_range(5, 20, trials_per_prime=8, seed=1, oracle_check=True)
    a = sweep(config)
    b = sweep(config, workers=2)
    assert a == b
    assert a.to_dict() == b.to_dict()


def test_oracle_equivalence_examples():
    inject = ((5, (1, 0, 0, 0, 1)), (13, (1, 0, 0, 0, 1)))
    config = SweepConfig(primes=(5, 7, 11, 13), trials_per_prime=10, seed=2, inject=inject)
    assert oracle_equivalence_run(config) == []


def test_oracle_run_respects_bound():
    with pytest.raises(OracleBoundExceeded):
        oracle_equivalence_run(SweepConfig(primes=(5, 103), trials_per_prime=1))
    with pytest.raises(OracleBoundExceeded):
        oracle_equivalence_run(SweepConfig(primes=(5,), trials_per_prime=1, oracle_bound=3))


def test_injected_records_do_not_touch_tallies():
    config = SweepConfig(primes=(7,), trials_per_prime=5, seed=0, inject=((7, (1, 0, 0, 0, 1)),))
    report = sweep(config)
    assert sum(report.tallies[7]) == 5
    assert report.injected[0].trial is None
    assert report.injected[0] in report.counterexamples
