#!/usr/bin/env python3
"""Download the MIT-BIH Arrhythmia Database (48 records) from PhysioNet.

    python scripts/fetch_mitdb.py data/mitdb
    export MITDB_DIR=data/mitdb

Files already present are skipped, so the script can be re-run after an
interrupted download.
"""

import argparse
import sys
import urllib.request
from pathlib import Path

BASE_URL = "https://physionet.org/files/mitdb/1.0.0/"

RECORDS = (
    [str(r) for r in range(100, 110)]
    + [str(r) for r in range(111, 120)]
    + ["121", "122", "123", "124", "200", "201", "202", "203", "205"]
    + ["207", "208", "209", "210", "212", "213", "214", "215", "217"]
    + ["219", "220", "221", "222", "223", "228"]
    + [str(r) for r in range(230, 235)]
)


def fetch(url, dest):
    tmp = dest.with_suffix(dest.suffix + ".part")
    with urllib.request.urlopen(url, timeout=60) as resp, open(tmp, "wb") as fh:
        while chunk := resp.read(1 << 16):
            fh.write(chunk)
    tmp.replace(dest)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dest", type=Path)
    ap.add_argument("--base-url", default=BASE_URL)
    ap.add_argument("--records", nargs="*", default=RECORDS)
    args = ap.parse_args(argv)
    args.dest.mkdir(parents=True, exist_ok=True)
    for name in args.records:
        for ext in ("hea", "dat", "atr"):
            dest = args.dest / f"{name}.{ext}"
            if dest.exists():
                continue
            print(f"fetching {name}.{ext}", flush=True)
            try:
                fetch(f"{args.base_url}{name}.{ext}", dest)
            except OSError as exc:
                print(f"failed: {name}.{ext}: {exc}", file=sys.stderr)
                return 2
    print(f"{len(args.records)} records in {args.dest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
