"""Write a synthetic case-law corpus in the default JSONL input schema.

    python scripts/make_synthetic_corpus.py --docs 100000 --out corpus.jsonl
"""

import argparse
import json
from dataclasses import asdict

from citeworth.ingest import write_jsonl
from citeworth.synthetic import SyntheticConfig, generate_corpus


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--docs", type=int, default=1000)
    ap.add_argument("--out", required=True)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--positive-rate", type=float, default=SyntheticConfig.positive_rate)
    ap.add_argument("--sentences-per-doc", type=int, default=SyntheticConfig.sentences_per_doc)
    ap.add_argument("--labels", help="also write the expected (sentence_number, label) pairs per document here")
    args = ap.parse_args()

    cfg = SyntheticConfig(
        n_docs=args.docs,
        seed=args.seed,
        positive_rate=args.positive_rate,
        sentences_per_doc=args.sentences_per_doc,
    )
    if args.labels:
        docs = list(generate_corpus(cfg))
        write_jsonl((d.record() for d in docs), args.out)
        with open(args.labels, "w", encoding="utf-8") as fh:
            for d in docs:
                fh.write(json.dumps({"file_name": d.file_name, "labels": d.expected_labels()}) + "\n")
    else:
        write_jsonl((d.record() for d in generate_corpus(cfg)), args.out)
    print(json.dumps(asdict(cfg)))


if __name__ == "__main__":
    main()
