"""CSV tables of float columns, 17 significant digits.

A file may start with a provenance comment ``# config_hash=<hex> seed=<n>``;
readers skip every ``#`` line.
"""
import logging
import os
import warnings
from dataclasses import dataclass
from typing import Dict
from typing import List
from typing import Optional

import numpy as np

FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True)
class Provenance:
    config_hash: str
    seed: int

    def to_comment(self):
        return "# config_hash={} seed={}".format(self.config_hash, self.seed)

    def to_dict(self):
        return {"config_hash": self.config_hash, "seed": int(self.seed)}

    @classmethod
    def from_comment(cls, line):
        fields = dict(
            item.split("=", 1) for item in line.lstrip("#").split() if "=" in item
        )
        if "config_hash" not in fields or "seed" not in fields:
            return None
        return cls(fields["config_hash"], int(fields["seed"]))

    @classmethod
    def from_dict(cls, d):
        if not d:
            return None
        return cls(str(d["config_hash"]), int(d["seed"]))


def write_table(
    path,
    header: List[str],
    columns,
    provenance: Optional[Provenance] = None,
):
    """Writes equal-length columns as CSV.

    Args:
        path: output file
        header: column names, in order
        columns: one 1-d sequence per header entry
        provenance: optional config hash and seed to embed
    """
    if len(header) != len(columns):
        raise ValueError(
            "header has {} names but {} columns were given".format(
                len(header),
                len(columns),
            ),
        )
    arrays = [np.asarray(col, dtype=np.float64).ravel() for col in columns]
    lengths = {len(a) for a in arrays}
    if len(lengths) > 1:
        raise ValueError("columns differ in length: {}".format(sorted(lengths)))

    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    data = (
        np.column_stack(arrays) if arrays and arrays[0].size else np.empty((0, len(header)))
    )
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        if provenance is not None:
            f.write(provenance.to_comment() + "\n")
        f.write(",".join(header) + "\n")
        if len(data):
            np.savetxt(f, data, fmt=FLOAT_FORMAT, delimiter=",")
    logging.debug("wrote table %s rows=%s", path, len(data))


def read_table(path):
    """Reads a table written by ``write_table``.

    Returns:
        (header, columns dict name -> np.ndarray, provenance or None)
    """
    provenance = None
    header = None
    skip = 0
    with open(path, encoding="utf-8") as f:
        for line in f:
            skip += 1
            line = line.strip()
            if line.startswith("#"):
                if provenance is None:
                    provenance = Provenance.from_comment(line)
                continue
            if line:
                header = line.split(",")
                break
    if header is None:
        raise ValueError("table {} has no header line".format(path))
    with warnings.catch_warnings():
        # 只有表头的空表
        warnings.simplefilter("ignore", UserWarning)
        data = np.loadtxt(
            path,
            dtype=np.float64,
            delimiter=",",
            comments="#",
            skiprows=skip,
            ndmin=2,
        )
    data = data.reshape(-1, len(header))
    columns: Dict[str, np.ndarray] = {
        name: data[:, i].copy() for i, name in enumerate(header)
    }
    return header, columns, provenance
