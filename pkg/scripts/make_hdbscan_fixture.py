#!/usr/bin/env python3
"""Generate and verify the committed two-blob clustering fixture.

Two unit-variance 25-point blobs with centers 20 apart in 2-D plus one far
outlier, from a fixed seed.  The reference labeling is verified two ways
before being written:

* structurally (blob membership is known by construction), and
* against scikit-learn's independent HDBSCAN implementation (partition
  equality up to cluster renumbering).

scikit-learn is only needed by this script, never by the test suite.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from textlens.cluster import density

OUT_PATH = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "hdbscan_two_blobs.json"

SEED = 42
MIN_CLUSTER_SIZE = 10


def main() -> None:
    rng = np.random.default_rng(SEED)
    blob_a = rng.normal((0.0, 0.0), 1.0, size=(25, 2))
    blob_b = rng.normal((20.0, 0.0), 1.0, size=(25, 2))
    outlier = np.array([[60.0, 60.0]])
    points = np.vstack([blob_a, blob_b, outlier])

    assignment = density.hdbscan(
        points, density.HdbscanConfig(min_cluster_size=MIN_CLUSTER_SIZE)
    )
    labels = assignment.labels.tolist()

    # Structural verification: each blob is one cluster, the outlier is noise.
    assert assignment.num_clusters == 2, assignment.num_clusters
    assert len(set(labels[:25])) == 1 and labels[0] >= 0
    assert len(set(labels[25:50])) == 1 and labels[25] >= 0
    assert labels[0] != labels[25]
    assert labels[50] == -1

    # Independent verification against scikit-learn's HDBSCAN.
    from sklearn.cluster import HDBSCAN as SkHDBSCAN

    sk_labels = SkHDBSCAN(
        min_cluster_size=MIN_CLUSTER_SIZE, min_samples=MIN_CLUSTER_SIZE
    ).fit(points).labels_

    def canonical(seq):
        mapping: dict[int, int] = {}
        out = []
        for value in seq:
            if value < 0:
                out.append(-1)
                continue
            mapping.setdefault(value, len(mapping))
            out.append(mapping[value])
        return out

    assert canonical(labels) == canonical(sk_labels.tolist()), "reference mismatch"

    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    OUT_PATH.write_text(
        json.dumps(
            {
                "seed": SEED,
                "min_cluster_size": MIN_CLUSTER_SIZE,
                "points": [[float(x), float(y)] for x, y in points],
                "expected_labels": labels,
                "expected_num_clusters": 2,
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    print(f"wrote verified fixture to {OUT_PATH}")


if __name__ == "__main__":
    main()
