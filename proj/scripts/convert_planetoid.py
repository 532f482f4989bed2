#!/usr/bin/env python3
"""Convert a Planetoid-format citation dataset into a bundle directory.

Input: the eight ind.<name>.{x,tx,allx,y,ty,ally,graph,test.index} files
from https://github.com/kimiyoung/planetoid (data/ folder).

Output bundle layout (consumed by the C++ tools):
    meta.txt        n=<nodes> d=<feature dim> classes=<label count>, one per line
    edges.tsv       one undirected edge "u<TAB>v" per line, 0-based, u != v,
                    each unordered pair exactly once
    features.bin    row-major float32, little-endian, n*d entries, no header
    labels.tsv      one integer label per line, n lines
    mask_train.tsv  sorted node ids, one per line
    mask_val.tsv    (optional split)
    mask_test.tsv

Node ordering follows the standard Planetoid assembly: rows of allx first,
then tx rows permuted into place via test.index. Train mask is the first
len(y) nodes, val the next 500, test the sorted test.index entries.

Usage: convert_planetoid.py <planetoid_data_dir> <dataset_name> <out_dir>
"""
import pickle
import sys
from pathlib import Path

import numpy as np
import scipy.sparse as sp


def load_pickle(path: Path):
    with open(path, "rb") as fh:
        return pickle.load(fh, encoding="latin1")


def main() -> int:
    if len(sys.argv) != 4:
        print(__doc__, file=sys.stderr)
        return 1
    src, name, out = Path(sys.argv[1]), sys.argv[2], Path(sys.argv[3])
    part = {k: load_pickle(src / f"ind.{name}.{k}")
            for k in ("x", "tx", "allx", "y", "ty", "ally", "graph")}
    test_idx = [int(line) for line in open(src / f"ind.{name}.test.index")]
    test_sorted = np.sort(test_idx)

    features = sp.vstack((part["allx"], part["tx"])).tolil()
    features[test_idx, :] = features[test_sorted, :]
    features = np.asarray(features.todense(), dtype=np.float32)

    onehot = np.vstack((part["ally"], part["ty"]))
    onehot[test_idx, :] = onehot[test_sorted, :]
    labels = onehot.argmax(axis=1)

    n, d = features.shape
    classes = int(onehot.shape[1])

    edges = set()
    self_loops = 0
    for u, nbrs in part["graph"].items():
        for v in nbrs:
            if u == v:
                self_loops += 1
                continue
            edges.add((min(u, v), max(u, v)))
    edges = sorted(edges)

    out.mkdir(parents=True, exist_ok=True)
    with open(out / "meta.txt", "w") as fh:
        fh.write(f"n={n}\nd={d}\nclasses={classes}\n")
    with open(out / "edges.tsv", "w") as fh:
        for u, v in edges:
            fh.write(f"{u}\t{v}\n")
    features.tofile(out / "features.bin")
    with open(out / "labels.tsv", "w") as fh:
        fh.writelines(f"{int(c)}\n" for c in labels)

    train = list(range(part["y"].shape[0]))
    val = list(range(part["y"].shape[0], part["y"].shape[0] + 500))
    for fname, ids in (("mask_train.tsv", train), ("mask_val.tsv", val),
                       ("mask_test.tsv", list(test_sorted))):
        with open(out / fname, "w") as fh:
            fh.writelines(f"{i}\n" for i in ids)

    print(f"{name}: n={n} d={d} classes={classes} edges={len(edges)} "
          f"(dropped {self_loops} self-loop entries) "
          f"train={len(train)} val={len(val)} test={len(test_sorted)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
