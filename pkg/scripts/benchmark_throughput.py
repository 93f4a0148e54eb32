"""Time the build pipeline on a synthetic corpus at several worker counts.

    python scripts/benchmark_throughput.py --docs 20000 --threads 1 2 4
"""

import argparse
import os
import tempfile
import time
from pathlib import Path

from citeworth import pipeline
from citeworth.ingest import write_jsonl
from citeworth.synthetic import SyntheticConfig, generate_corpus


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--docs", type=int, default=5000)
    ap.add_argument("--threads", type=int, nargs="+", default=[1])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workdir", help="keep corpus and outputs here instead of a temporary directory")
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        root = Path(args.workdir or tmp)
        root.mkdir(parents=True, exist_ok=True)
        corpus = root / "corpus.jsonl"
        t0 = time.perf_counter()
        write_jsonl((d.record() for d in generate_corpus(SyntheticConfig(n_docs=args.docs, seed=args.seed))), corpus)
        print(f"generated {args.docs} documents in {time.perf_counter() - t0:.1f} s ({os.cpu_count()} cores visible)")

        base = None
        for threads in args.threads:
            cfg = pipeline.PipelineConfig(input=str(corpus), out=str(root / f"out-{threads}"), threads=threads)
            t0 = time.perf_counter()
            result = pipeline.build(cfg, progress_every=0)
            elapsed = time.perf_counter() - t0
            base = base or elapsed
            c = result["counters"]
            print(
                f"threads={threads:<3d} {elapsed:8.2f} s  {c['documents'] / elapsed:8.1f} docs/s  "
                f"{c['records']} records  speedup {base / elapsed:.2f}x"
            )


if __name__ == "__main__":
    main()
