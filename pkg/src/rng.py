"""
Counter-based random streams.

Every stream is a Philox generator keyed by (master seed, stream id...), so a
batch draws the same numbers no matter which worker thread runs it.
"""

import numpy as np

# First component of the stream key for each estimator.
ESTIMATOR_STREAM_IDS = {
    'chi': 1,
    'X': 2,
    'chi_c': 3,
    'X_c': 4,
    'zeta': 5,
    'Z': 6,
}

PILOT_BATCH = 0


def stream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the stream (seed, key)"""
    if seed is None or int(seed) < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def batch_stream(seed: int, estimator: str, batch_index: int) -> np.random.Generator:
    """Stream of batch batch_index (0-based) of one estimator; the pilot uses its own slot"""
    return stream(seed, ESTIMATOR_STREAM_IDS[estimator], batch_index + 1)


def pilot_stream(seed: int, estimator: str) -> np.random.Generator:
    return stream(seed, ESTIMATOR_STREAM_IDS[estimator], PILOT_BATCH)
