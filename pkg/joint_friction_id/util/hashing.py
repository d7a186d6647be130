import hashlib
import json

import numpy as np

HASH_LENGTH = 16


def config_hash(conf):
    """sha256 of the canonical JSON form, truncated to 16 hex digits."""
    canonical = json.dumps(conf, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:HASH_LENGTH]


def arrays_hash(*arrays):
    digest = hashlib.sha256()
    for arr in arrays:
        digest.update(np.ascontiguousarray(arr, dtype=np.float64).tobytes())
    return digest.hexdigest()[:HASH_LENGTH]
