"""Compare plain and PU-reweighted logistic regression when positives are hidden.

Two settings: Gaussian blobs, and TF-IDF features on a synthetic sentence
dataset built by the pipeline, where a fraction of the label-1 training
records is relabelled 0 before training.  Recall and F1 are measured on
clean test labels.

    python scripts/run_pu_experiment.py --seeds 5 --hidden 0.3
"""

import argparse
import random
import tempfile
from pathlib import Path

import numpy as np

from citeworth import pipeline
from citeworth.evaluation import evaluate
from citeworth.model import predict_labels, pu_fit, train_logistic, train_sentence_classifier
from citeworth.synthetic import SyntheticConfig, pu_blobs, write_corpus


def blobs(seed: int, hidden: float, C: float) -> tuple[float, float]:
    data = pu_blobs(hidden_frac=hidden, seed=seed)
    P, U = data.X_train[data.s_train == 1], data.X_train[data.s_train == 0]
    _, pu = pu_fit(P, U, C=C, seed=seed)
    plain = train_logistic(data.X_train, data.s_train, C=C)
    pos = data.y_test == 1
    return predict_labels(plain, data.X_test)[pos].mean(), predict_labels(pu, data.X_test)[pos].mean()


def sentences(seed: int, hidden: float, C: float, n_docs: int, workdir: Path):
    corpus = workdir / f"corpus-{seed}.jsonl"
    out = workdir / f"out-{seed}"
    write_corpus(SyntheticConfig(n_docs=n_docs, seed=seed), corpus)
    pipeline.build(pipeline.PipelineConfig(input=str(corpus), out=str(out), seed=seed, threads=1), progress_every=0)
    train = list(pipeline.load_records(out / "train.jsonl"))
    test = list(pipeline.load_records(out / "test.jsonl"))
    rng = random.Random(seed)
    observed = [0 if r.label == 1 and rng.random() < hidden else r.label for r in train]
    texts = [r.sentence for r in train]
    gold = [r.label for r in test]
    reports = []
    for use_pu in (False, True):
        model = train_sentence_classifier(texts, observed, C=C, use_pu=use_pu, seed=seed)
        reports.append(evaluate(list(model.predict([r.sentence for r in test])), gold))
    return reports


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--hidden", type=float, default=0.3)
    ap.add_argument("--C", type=float, default=1.0)
    ap.add_argument("--docs", type=int, default=1500, help="documents per synthetic sentence corpus")
    args = ap.parse_args()

    rec = np.array([blobs(s, args.hidden, args.C) for s in range(args.seeds)])
    print(f"blobs     recall plain {rec[:, 0].mean():.4f}  PU {rec[:, 1].mean():.4f}")

    with tempfile.TemporaryDirectory() as tmp:
        rows = [sentences(s, args.hidden, args.C, args.docs, Path(tmp)) for s in range(args.seeds)]
    for i, name in enumerate(("plain", "PU")):
        r1 = np.mean([r[i].per_class[1].recall for r in rows])
        f1 = np.mean([r[i].per_class[1].f1 for r in rows])
        macro = np.mean([r[i].macro_f1 for r in rows])
        print(f"sentences {name:<5s} recall {r1:.4f}  F1(cite) {f1:.4f}  macro F1 {macro:.4f}")


if __name__ == "__main__":
    main()
