"""Counter-based random streams.

Every random draw in the package comes from a Philox generator keyed by a
(domain, id, index) triple, so each field sample, each scale draw and each
exponential draw has its own reproducible stream.  Results are therefore
independent of worker count and chunk order: a sample's bits depend only on
the bank id and the sample's position.
"""

from __future__ import annotations

import numpy as np

# stream domains, packed into the high byte of the first key word
FIELD = 1  # the Gaussian field behind one chaos sample
SCALE = 2  # auxiliary Gaussian scale variables (one stream per call)
EXP = 3  # auxiliary exponential variables (one stream per sample)

_DOMAIN_SHIFT = 56
_ID_MASK = (1 << _DOMAIN_SHIFT) - 1


def _key(domain: int, stream_id: int, index: int) -> list[int]:
    if not 0 <= stream_id <= _ID_MASK:
        raise ValueError(f"stream id out of range: {stream_id}")
    if index < 0:
        raise ValueError(f"stream index must be nonnegative: {index}")
    return [(domain << _DOMAIN_SHIFT) | stream_id, index]


def generator(domain: int, stream_id: int, index: int = 0) -> np.random.Generator:
    """A fresh Generator for the given (domain, id, index) stream."""
    return np.random.Generator(np.random.Philox(key=_key(domain, stream_id, index)))


def field_normals(bank_id: int, sample_index: int, n: int) -> np.ndarray:
    """The n standard normals that drive one field sample of one bank."""
    return generator(FIELD, bank_id, sample_index).standard_normal(n)


def scale_normals(stream_id: int, n: int, index: int = 0) -> np.ndarray:
    """n standard normals from a SCALE stream (one stream per call site)."""
    return generator(SCALE, stream_id, index).standard_normal(n)


def exponentials(stream_id: int, n: int, index: int = 0) -> np.ndarray:
    """n unit exponentials from an EXP stream."""
    return generator(EXP, stream_id, index).standard_exponential(n)
