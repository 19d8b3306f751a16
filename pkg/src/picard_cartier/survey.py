"""Random sweeps of Picard curves against the congruence dichotomy.

The dichotomy under test predicts a-number 0 when ``p = 1 mod 3`` and 1 when
``p = 2 mod 3``.  Disagreements are collected as data in the report; only a
disagreement between the independent matrix routes counts as a bug.

Randomness: each ``(seed, p, trial)`` triple seeds its own PCG64 generator
through ``numpy.random.SeedSequence([seed, p, trial])``, so a record is
reproducible in isolation and does not depend on which other primes are
swept or on how work is split across processes.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .cartier import (
    DEFAULT_ORACLE_BOUND,
    PicardCurve,
    a_number,
    cartier_matrix,
    hasse_witt_fast,
    hasse_witt_oracle,
    p_rank,
    rank_fp,
    validate_curve,
)
from .errors import GenerationFailed, OracleBoundExceeded
from .fieldpoly import DensePoly, PrimeField, is_prime, is_squarefree

SEED_MAX = 2**64 - 1


def trial_rng(seed: int, p: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, p, trial])))


def random_squarefree_quartic(
    p: int, rng: np.random.Generator, require_nonzero_constant: bool = False
) -> DensePoly:
    """Uniform quartic over F_p with nonzero leading coefficient, by rejection."""
    field = PrimeField(p)
    for _ in range(10 * p):
        low = [int(v) for v in rng.integers(0, p, size=4)]
        lead = int(rng.integers(1, p))
        if require_nonzero_constant and low[0] == 0:
            continue
        f = DensePoly(field, low + [lead])
        if is_squarefree(f):
            return f
    raise GenerationFailed(f"no admissible quartic over F_{p} after {10 * p} draws")


@dataclass(frozen=True)
class CurveRecord:
    p: int
    trial: int | None
    coefficients: tuple[int, ...]
    rank_H: int
    a_number: int
    p_rank: int

    @property
    def p_mod_3(self) -> int:
        return self.p % 3

    @property
    def predicted_a(self) -> int:
        return 0 if self.p % 3 == 1 else 1

    @property
    def matches_theorem(self) -> bool:
        return self.a_number == self.predicted_a

    @property
    def nonzero_constant(self) -> bool:
        return self.coefficients[0] != 0

    def to_dict(self) -> dict:
        f0, f1, f2, f3, f4 = self.coefficients
        return {
            "p": self.p,
            "trial": self.trial,
            "f0": f0,
            "f1": f1,
            "f2": f2,
            "f3": f3,
            "f4": f4,
            "p_mod_3": self.p_mod_3,
            "rank_H": self.rank_H,
            "a_number": self.a_number,
            "p_rank": self.p_rank,
            "predicted_a": self.predicted_a,
            "matches_theorem": self.matches_theorem,
            "nonzero_constant": self.nonzero_constant,
        }


def theorem_check(
    curve: PicardCurve, require_nonzero_constant: bool = False, trial: int | None = None
) -> CurveRecord:
    """Compute the invariants of ``curve`` and compare with the predicted a-number.

    With ``require_nonzero_constant`` set, curves outside the hypothesis
    ``f(0) != 0`` are rejected with ValueError instead of being classified.
    """
    if require_nonzero_constant and curve.coefficients[0] == 0:
        raise ValueError("curve has zero constant coefficient")
    return CurveRecord(
        p=curve.p,
        trial=trial,
        coefficients=tuple(curve.coefficients),
        rank_H=rank_fp(hasse_witt_fast(curve)),
        a_number=a_number(curve),
        p_rank=p_rank(curve),
    )


@dataclass(frozen=True)
class SweepConfig:
    primes: tuple[int, ...]
    trials_per_prime: int = 100
    seed: int = 0
    require_nonzero_constant: bool = False
    oracle_check: bool = False
    oracle_bound: int = DEFAULT_ORACLE_BOUND
    # Explicit (p, (c0..c4)) curves evaluated in addition to the random ones.
    inject: tuple[tuple[int, tuple[int, ...]], ...] = ()

    def __post_init__(self):
        primes = tuple(sorted(set(int(p) for p in self.primes)))
        for p in primes:
            PrimeField(p)
        if not primes:
            raise ValueError("no primes selected")
        if self.trials_per_prime < 1:
            raise ValueError("trials_per_prime must be at least 1")
        if not 0 <= self.seed <= SEED_MAX:
            raise ValueError("seed must fit in 64 unsigned bits")
        inject = tuple((int(p), tuple(int(c) for c in cs)) for p, cs in self.inject)
        object.__setattr__(self, "primes", primes)
        object.__setattr__(self, "inject", inject)

    @classmethod
    def from_range(cls, min_p: int, max_p: int, residue: int | None = None, **kwargs) -> "SweepConfig":
        """All primes in ``[max(min_p, 5), max_p]``, optionally with ``p % 3 == residue``."""
        primes = [
            p for p in range(max(min_p, 5), max_p + 1)
            if is_prime(p) and (residue is None or p % 3 == residue)
        ]
        return cls(primes=tuple(primes), **kwargs)

    def to_dict(self) -> dict:
        return {
            "primes": list(self.primes),
            "trials_per_prime": self.trials_per_prime,
            "seed": self.seed,
            "require_nonzero_constant": self.require_nonzero_constant,
            "oracle_check": self.oracle_check,
            "oracle_bound": self.oracle_bound,
            "inject": [{"p": p, "f": list(cs)} for p, cs in self.inject],
        }


@dataclass(frozen=True)
class SweepReport:
    config: SweepConfig
    records: tuple[CurveRecord, ...]
    injected: tuple[CurveRecord, ...]
    oracle_mismatches: tuple[dict, ...]
    runtime_seconds: float = field(default=0.0, compare=False)

    @property
    def tallies(self) -> dict[int, list[int]]:
        """Per-prime counts of a-number 0, 1, 2, 3 over the random records."""
        out = {p: [0, 0, 0, 0] for p in self.config.primes}
        for r in self.records:
            out[r.p][r.a_number] += 1
        return out

    @property
    def counterexamples(self) -> tuple[CurveRecord, ...]:
        return tuple(r for r in self.records + self.injected if not r.matches_theorem)

    def to_dict(self, include_runtime: bool = False) -> dict:
        doc = {
            "schema_version": "1",
            "config": self.config.to_dict(),
            "tallies": {
                str(p): {str(a): n for a, n in enumerate(counts)}
                for p, counts in self.tallies.items()
            },
            "records": [r.to_dict() for r in self.records],
            "injected": [r.to_dict() for r in self.injected],
            "counterexamples": [r.to_dict() for r in self.counterexamples],
            "oracle_mismatches": list(self.oracle_mismatches),
        }
        if include_runtime:
            doc["runtime_seconds"] = round(self.runtime_seconds, 3)
        return doc


def _mismatch(curve: PicardCurve, trial: int | None, bound: int) -> dict | None:
    fast = hasse_witt_fast(curve)
    oracle = hasse_witt_oracle(curve, bound=bound)
    cartier = cartier_matrix(curve)
    if fast.same_entries(oracle) and cartier.same_entries(fast.transpose()):
        return None
    return {
        "p": curve.p,
        "trial": trial,
        "f": list(curve.coefficients),
        "fast": fast.to_lists(),
        "oracle": oracle.to_lists(),
        "cartier": cartier.to_lists(),
    }


def sample_curve(config: SweepConfig, p: int, trial: int) -> PicardCurve:
    rng = trial_rng(config.seed, p, trial)
    try:
        f = random_squarefree_quartic(p, rng, config.require_nonzero_constant)
    except GenerationFailed as exc:
        raise GenerationFailed(f"seed={config.seed} p={p} trial={trial}: {exc}") from None
    return validate_curve(p, f.residues)


def _run_prime(config: SweepConfig, p: int) -> tuple[list[CurveRecord], list[dict]]:
    records, mismatches = [], []
    check = config.oracle_check and p <= config.oracle_bound
    for trial in range(config.trials_per_prime):
        curve = sample_curve(config, p, trial)
        records.append(theorem_check(curve, config.require_nonzero_constant, trial))
        if check:
            m = _mismatch(curve, trial, config.oracle_bound)
            if m is not None:
                mismatches.append(m)
    return records, mismatches


def _run_injected(config: SweepConfig) -> tuple[list[CurveRecord], list[dict]]:
    records, mismatches = [], []
    for p, coeffs in config.inject:
        curve = validate_curve(p, coeffs)
        records.append(theorem_check(curve))
        if config.oracle_check and p <= config.oracle_bound:
            m = _mismatch(curve, None, config.oracle_bound)
            if m is not None:
                mismatches.append(m)
    return records, mismatches


def sweep(config: SweepConfig, workers: int = 1) -> SweepReport:
    """Sample ``trials_per_prime`` curves per prime and classify each one.

    ``workers > 1`` spreads primes over a process pool; the report is
    identical either way.
    """
    start = time.perf_counter()
    if workers > 1 and len(config.primes) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_prime, [config] * len(config.primes), config.primes))
    else:
        results = [_run_prime(config, p) for p in config.primes]
    records = sorted((r for recs, _ in results for r in recs), key=lambda r: (r.p, r.trial))
    mismatches = [m for _, ms in results for m in ms]
    injected, inj_mismatches = _run_injected(config)
    mismatches.extend(inj_mismatches)
    mismatches.sort(key=lambda m: (m["p"], -1 if m["trial"] is None else m["trial"]))
    return SweepReport(
        config=config,
        records=tuple(records),
        injected=tuple(injected),
        oracle_mismatches=tuple(mismatches),
        runtime_seconds=time.perf_counter() - start,
    )


def oracle_equivalence_run(config: SweepConfig) -> list[dict]:
    """Cross-check all three matrix routes on every sampled and injected curve.

    Returns the list of mismatches; any entry is a bug.
    """
    too_big = [p for p in config.primes if p > config.oracle_bound]
    too_big += [p for p, _ in config.inject if p > config.oracle_bound]
    if too_big:
        raise OracleBoundExceeded(f"primes {sorted(set(too_big))} exceed the oracle bound {config.oracle_bound}")
    mismatches = []
    for _, trial, curve in curves_for(config):
        m = _mismatch(curve, trial, config.oracle_bound)
        if m is not None:
            mismatches.append(m)
    for p, coeffs in config.inject:
        m = _mismatch(validate_curve(p, coeffs), None, config.oracle_bound)
        if m is not None:
            mismatches.append(m)
    return mismatches


def curves_for(config: SweepConfig) -> Iterator[tuple[int, int, PicardCurve]]:
    """Yield ``(p, trial, curve)`` for every random curve the config selects."""
    for p in config.primes:
        for trial in range(config.trials_per_prime):
            yield p, trial, sample_curve(config, p, trial)

