#!/usr/bin/env python3
"""Convert the raw Cora release into the edge/label files the CLI reads.

Input:  cora.content (paper_id <tab> 1433 features <tab> class_name)
        cora.cites   (cited_id <tab> citing_id)
Output: edges.txt  ("i j" per line, 0-based indices)
        labels.txt ("i label" per line, classes numbered alphabetically)

Node indices follow the order of appearance in cora.content; class names map
to integers in sorted order so the conversion is deterministic.
"""
import argparse
import sys
from pathlib import Path


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("content", type=Path, help="path to cora.content")
    ap.add_argument("cites", type=Path, help="path to cora.cites")
    ap.add_argument("--out-dir", type=Path, default=Path("data/cora"))
    args = ap.parse_args()

    index = {}
    classes = {}
    with args.content.open() as f:
        for line in f:
            fields = line.split()
            if not fields:
                continue
            paper, cls = fields[0], fields[-1]
            if paper in index:
                raise SystemExit(f"duplicate paper id {paper} in {args.content}")
            index[paper] = len(index)
            classes[paper] = cls

    class_ids = {name: i for i, name in enumerate(sorted(set(classes.values())))}

    edges = []
    skipped = 0
    with args.cites.open() as f:
        for line in f:
            fields = line.split()
            if not fields:
                continue
            a, b = fields[0], fields[1]
            if a not in index or b not in index:
                skipped += 1
                continue
            edges.append((index[a], index[b]))

    args.out_dir.mkdir(parents=True, exist_ok=True)
    with (args.out_dir / "edges.txt").open("w") as f:
        for i, j in edges:
            f.write(f"{i} {j}\n")
    with (args.out_dir / "labels.txt").open("w") as f:
        for paper, idx in index.items():
            f.write(f"{idx} {class_ids[classes[paper]]}\n")

    print(f"{len(index)} nodes, {len(edges)} citations, "
          f"{len(class_ids)} classes -> {args.out_dir}")
    if skipped:
        print(f"skipped {skipped} citations to papers without content rows",
              file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
