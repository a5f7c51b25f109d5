"""Search for 3-way Latin triples the deterministic constructions miss and
store them in src/triplex/data/latin_witnesses.json.

Usage: python3 scripts/build_latin_library.py [max_n] [budget]
Entries are verified before they are written; reruns only fill gaps.
"""

import json
import sys
import time
from pathlib import Path

from triplex import latin, spectra

OUT = Path(__file__).resolve().parents[1] / "src" / "triplex" / "data" / "latin_witnesses.json"


def load():
    if OUT.exists():
        return json.loads(OUT.read_text())
    return {"note": "witnesses found by triplex.latin.search_triple", "triples": []}


def save(doc):
    doc["triples"].sort(key=lambda e: (e["n"], e["k"]))
    OUT.write_text(json.dumps(doc, separators=(",", ":")) + "\n")


def main():
    max_n = int(sys.argv[1]) if len(sys.argv) > 1 else 11
    budget = int(sys.argv[2]) if len(sys.argv) > 2 else 2_000_000
    doc = load()
    for n in range(5, max_n + 1):
        latin.library.cache_clear()
        latin.known_values.cache_clear()
        latin._quadrant_sums.cache_clear()
        missing = sorted(spectra.published_jprime3(n) - latin.known_values(n))
        print(f"n={n}: {len(missing)} missing {spectra.fmt_set(missing)}", flush=True)
        for k in missing:
            t0 = time.time()
            found = None
            for seed in range(3):
                found = latin.search_triple(n, k, budget, seed)
                if found is not None:
                    break
            dt = time.time() - t0
            if found is None:
                print(f"  k={k}: not found ({dt:.1f}s)", flush=True)
                continue
            assert len(latin.three_way_cells(*found.squares)) == k
            doc["triples"].append({"n": n, "k": k, "squares": [list(map(list, s.rows)) for s in found.squares]})
            save(doc)
            print(f"  k={k}: found ({dt:.1f}s)", flush=True)


if __name__ == "__main__":
    main()
