#!/usr/bin/env python3
"""Materialize MovieLens-100K as MovieLens-style CSVs.

The GroupLens archive is not always reachable, so the ratings are taken from
the copy bundled in the RecBole wheel (recbole/dataset_example/ml-100k),
fetched with `pip download`. Output:

    <out>/ratings.csv   userId,movieId,rating,timestamp
    <out>/movies.csv    movieId,title,genres
"""

import argparse
import csv
import glob
import os
import subprocess
import sys
import tempfile
import zipfile

MEMBER = "recbole/dataset_example/ml-100k/ml-100k"


def find_wheel(explicit):
    if explicit:
        return explicit
    tmp = tempfile.mkdtemp(prefix="hyrec-ml100k-")
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "recbole==1.2.1", "--no-deps", "-q", "-d", tmp],
        check=True,
    )
    wheels = glob.glob(os.path.join(tmp, "recbole-*.whl"))
    if not wheels:
        raise SystemExit("pip download produced no recbole wheel")
    return wheels[0]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", required=True)
    ap.add_argument("--wheel", help="use an already downloaded recbole wheel")
    args = ap.parse_args()

    ratings_path = os.path.join(args.out, "ratings.csv")
    movies_path = os.path.join(args.out, "movies.csv")
    if os.path.exists(ratings_path) and os.path.exists(movies_path):
        return 0

    wheel = zipfile.ZipFile(find_wheel(args.wheel))
    inter = wheel.read(MEMBER + ".inter").decode("utf-8").splitlines()
    items = wheel.read(MEMBER + ".item").decode("latin-1").splitlines()

    os.makedirs(args.out, exist_ok=True)
    with open(ratings_path + ".tmp", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["userId", "movieId", "rating", "timestamp"])
        for line in inter[1:]:
            user, item, rating, ts = line.split("\t")
            w.writerow([user, item, rating, int(float(ts))])
    with open(movies_path + ".tmp", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["movieId", "title", "genres"])
        for line in items[1:]:
            parts = line.split("\t")
            title = parts[1] + (" (%s)" % parts[2] if len(parts) > 2 and parts[2] else "")
            genres = "|".join(parts[3].split()) if len(parts) > 3 else ""
            w.writerow([parts[0], title, genres])
    os.replace(ratings_path + ".tmp", ratings_path)
    os.replace(movies_path + ".tmp", movies_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
