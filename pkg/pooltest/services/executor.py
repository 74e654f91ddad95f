"""Procedural execution of the pooling schemes, exact enumeration and Monte Carlo estimation.

These are the oracles for the closed-form costs: nothing here uses the cost
formulas.

Monte Carlo streams: replications are grouped in blocks of SIMULATION_BLOCK.
Block b draws from Generator(PCG64(SeedSequence(seed, spawn_key=(b,)))) and
replication r is row r % SIMULATION_BLOCK of block r // SIMULATION_BLOCK.
The substream is per block, not per replication: the N statuses of replication
r are fixed by (seed, r) because rows are drawn in order, so a shorter run is
a prefix of a longer one. Blocks are concatenated in index order before
aggregation, so the estimate does not depend on the number of worker threads.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Sequence, Union

import numpy as np

from pooltest.errors import DomainError, ResourceLimitError
from pooltest.models import MAX_SEED, PrevalenceLike, SchemeId, SimulationEstimate, as_prevalence, as_scheme


logger = logging.getLogger(__name__)

MAX_ENUMERATION_SIZE = 24
ENUMERATION_CHUNK_BITS = 16
SIMULATION_BLOCK = 4096
LOG_SPACE_BELOW = 1e-4


def run_scheme(scheme: Union[str, SchemeId], statuses: Sequence[bool]) -> int:
    """Number of tests a scheme spends on one concrete status vector (True = defective)."""
    scheme = as_scheme(scheme)
    statuses = [bool(x) for x in statuses]
    n = len(statuses)
    if n == 0:
        raise DomainError("status vector must not be empty")
    if n == 1 or not any(statuses):
        return 1

    if scheme is SchemeId.D0:
        return 1 + n
    if scheme is SchemeId.D:
        if not any(statuses[:-1]):
            # last item inferred defective
            return n
        return n + 1
    return _run_sterrett(statuses)


def _run_sterrett(statuses: List[bool]) -> int:
    n = len(statuses)
    tests = 0
    start = 0
    while start < n:
        tail = statuses[start:]
        tests += 1
        if len(tail) == 1 or not any(tail):
            break
        for offset, status in enumerate(tail):
            if offset == len(tail) - 1:
                # every predecessor in this pool tested negative
                start = n
                break
            tests += 1
            if status:
                start += offset + 1
                break
    return tests


def count_tests(scheme: Union[str, SchemeId], statuses: np.ndarray) -> np.ndarray:
    """Vectorized run_scheme over the rows of a boolean matrix."""
    scheme = as_scheme(scheme)
    bits = np.asarray(statuses, dtype=bool)
    if bits.ndim != 2 or bits.shape[1] == 0:
        raise DomainError("statuses must be a non-empty rows x N matrix")
    rows, n = bits.shape
    if n == 1:
        return np.ones(rows, dtype=np.int64)

    any_bad = bits.any(axis=1)
    head = bits[:, :-1]
    if scheme is SchemeId.D0:
        return np.where(any_bad, n + 1, 1).astype(np.int64)
    if scheme is SchemeId.D:
        head_bad = head.any(axis=1)
        return np.where(any_bad, np.where(head_bad, n + 1, n), 1).astype(np.int64)

    # Sterrett: k' defectives among the first N-1 items, s one past the last of
    # them; the final pool costs 1 test plus N-1-s individual tests when the
    # last item is defective.
    head_count = head.sum(axis=1, dtype=np.int64)
    last_head = (n - 2) - np.argmax(head[:, ::-1], axis=1)
    s = np.where(head_count > 0, last_head + 1, 0)
    last = bits[:, -1].astype(np.int64)
    return head_count + s + 1 + last * (n - 1 - s)


def _pattern_weights(n: int, p: float) -> np.ndarray:
    """Probability of a pattern with k defectives, indexed by k."""
    k = np.arange(n + 1, dtype=float)
    if p < LOG_SPACE_BELOW:
        return np.exp(k * math.log(p) + (n - k) * math.log1p(-p))
    return p**k * (1.0 - p) ** (n - k)


def max_tests(scheme: Union[str, SchemeId], n: int) -> int:
    """Largest number of tests a group of n can need: 2n-1 for Sterrett, n+1 for the Dorfman schemes."""
    scheme = as_scheme(scheme)
    if n == 1:
        return 1
    return 2 * n - 1 if scheme is SchemeId.S else n + 1


def enumerate_tests_distribution(scheme: Union[str, SchemeId], n: int, p: PrevalenceLike) -> Dict[int, float]:
    """Exact law of T by enumerating all 2^n status vectors.

    Patterns are counted per (tests, defectives) pair in integers and each atom
    is a single fsum over defective counts.
    """
    scheme = as_scheme(scheme)
    prevalence = as_prevalence(p)
    if int(n) != n or n < 1:
        raise DomainError(f"group size must be an integer >= 1, got {n!r}")
    n = int(n)
    if n > MAX_ENUMERATION_SIZE:
        raise ResourceLimitError(f"enumeration is capped at n={MAX_ENUMERATION_SIZE}, got {n}")

    weights = _pattern_weights(n, prevalence.p)
    rows = max_tests(scheme, n) + 1
    counts = np.zeros(rows * (n + 1), dtype=np.int64)
    positions = np.arange(n, dtype=np.int64)
    chunk = 1 << min(n, ENUMERATION_CHUNK_BITS)
    for start in range(0, 1 << n, chunk):
        codes = np.arange(start, start + chunk, dtype=np.int64)
        bits = ((codes[:, None] >> positions) & 1).astype(bool)
        tests = count_tests(scheme, bits).astype(np.int64)
        defectives = bits.sum(axis=1, dtype=np.int64)
        counts += np.bincount(tests * (n + 1) + defectives, minlength=counts.size)
    logger.debug("enumerated %d patterns for scheme %s, n=%d", 1 << n, scheme.value, n)

    distribution: Dict[int, float] = {}
    for value, row in enumerate(counts.reshape(rows, n + 1)):
        prob = math.fsum(int(count) * float(weights[k]) for k, count in enumerate(row) if count)
        if prob > 0.0:
            distribution[value] = prob
    return distribution


def exact_expected_tests(scheme: Union[str, SchemeId], n: int, p: PrevalenceLike) -> float:
    distribution = enumerate_tests_distribution(scheme, n, p)
    return math.fsum(value * prob for value, prob in distribution.items())


def _block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _simulate_block(scheme: SchemeId, n: int, p: float, seed: int, block: int, rows: int) -> np.ndarray:
    rng = _block_generator(seed, block)
    statuses = rng.random((rows, n)) < p
    return count_tests(scheme, statuses) / n


def simulate_expected_tests(
    scheme: Union[str, SchemeId],
    n: int,
    p: PrevalenceLike,
    replications: int,
    seed: int,
    workers: int = 1,
) -> SimulationEstimate:
    scheme = as_scheme(scheme)
    prevalence = as_prevalence(p)
    if int(n) != n or n < 1:
        raise DomainError(f"group size must be an integer >= 1, got {n!r}")
    if int(replications) != replications or replications < 1:
        raise DomainError(f"replications must be >= 1, got {replications!r}")
    if int(seed) != seed or not 0 <= seed <= MAX_SEED:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers!r}")
    n, replications, seed = int(n), int(replications), int(seed)

    blocks = [
        (index, min(SIMULATION_BLOCK, replications - start))
        for index, start in enumerate(range(0, replications, SIMULATION_BLOCK))
    ]

    def run(block: tuple) -> np.ndarray:
        index, rows = block
        return _simulate_block(scheme, n, prevalence.p, seed, index, rows)

    if workers == 1:
        parts = [run(block) for block in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, blocks))
    per_item = np.concatenate(parts)
    logger.debug("simulated %d replications in %d blocks with %d workers", replications, len(blocks), workers)

    mean = float(np.mean(per_item))
    std_error = float(np.std(per_item, ddof=1) / math.sqrt(replications)) if replications > 1 else 0.0
    return SimulationEstimate(
        scheme=scheme,
        n=n,
        p=prevalence.p,
        mean=mean,
        std_error=std_error,
        replications=replications,
        seed=seed,
    )
