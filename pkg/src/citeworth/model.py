"""TF-IDF features, weighted L2 logistic regression and the PU-learning wrapper."""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.optimize
import scipy.sparse as sp

DEFAULT_C = 0.1151395399
MODEL_FORMAT = "citeworth-model"
MODEL_VERSION = 1


class EmptyCorpus(ValueError):
    pass


class DegenerateLabels(ValueError):
    pass


class DegenerateEstimator(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# TF-IDF


@dataclass(frozen=True)
class TfIdfConfig:
    lowercase: bool = True
    token_pattern: str = r"[^\W_]{2,}"
    min_df: int = 1
    sublinear_tf: bool = True
    norm: str | None = "l2"


@dataclass
class TfIdfModel:
    vocabulary: dict[str, int]
    idf: np.ndarray
    config: TfIdfConfig = field(default_factory=TfIdfConfig)

    def __post_init__(self) -> None:
        self._token_re = re.compile(self.config.token_pattern)

    def tokens(self, text: str) -> list[str]:
        if self.config.lowercase:
            text = text.lower()
        return self._token_re.findall(text)

    def transform_many(self, texts: Iterable[str]) -> sp.csr_matrix:
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        vocab = self.vocabulary
        sublinear = self.config.sublinear_tf
        for text in texts:
            counts = Counter(t for t in self.tokens(text) if t in vocab)
            cols = sorted(vocab[t] for t in counts)
            inv = {vocab[t]: c for t, c in counts.items()}
            row = np.array(
                [(1.0 + math.log(inv[j]) if sublinear else float(inv[j])) * self.idf[j] for j in cols]
            )
            if self.config.norm == "l2" and row.size:
                norm = math.sqrt(float(row @ row))
                if norm > 0:
                    row = row / norm
            indices.extend(cols)
            data.extend(row.tolist())
            indptr.append(len(indices))
        return sp.csr_matrix(
            (np.asarray(data, dtype=float), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
            shape=(len(indptr) - 1, len(vocab)),
        )

    def to_json(self) -> dict:
        terms = sorted(self.vocabulary, key=self.vocabulary.__getitem__)
        return {"config": asdict(self.config), "terms": terms, "idf": self.idf.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "TfIdfModel":
        vocab = {t: i for i, t in enumerate(obj["terms"])}
        return cls(vocab, np.asarray(obj["idf"], dtype=float), TfIdfConfig(**obj["config"]))


def smooth_idf(n_docs: int, df: int) -> float:
    return math.log((1 + n_docs) / (1 + df)) + 1.0


def fit_tfidf(corpus: Sequence[str], config: TfIdfConfig | None = None) -> TfIdfModel:
    config = config or TfIdfConfig()
    if len(corpus) == 0:
        raise EmptyCorpus("cannot fit TF-IDF on an empty corpus")
    probe = TfIdfModel({}, np.zeros(0), config)
    df: Counter[str] = Counter()
    for text in corpus:
        df.update(set(probe.tokens(text)))
    terms = sorted(t for t, n in df.items() if n >= config.min_df)
    idf = np.array([smooth_idf(len(corpus), df[t]) for t in terms], dtype=float)
    return TfIdfModel({t: i for i, t in enumerate(terms)}, idf, config)


def transform(model: TfIdfModel, text: str) -> sp.csr_matrix:
    return model.transform_many([text])


# ---------------------------------------------------------------------------
# Logistic regression


@dataclass
class LinearClassifier:
    weights: np.ndarray
    bias: float
    C: float = DEFAULT_C
    penalty: str = "l2"
    iterations: int = 0
    final_loss: float = float("nan")

    def decision(self, X) -> np.ndarray:
        if X.shape[-1] != self.weights.shape[0]:
            raise DimensionMismatch(f"expected {self.weights.shape[0]} features, got {X.shape[-1]}")
        return np.asarray(X @ self.weights).ravel() + self.bias

    def to_json(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "regularization": {"kind": self.penalty, "C": self.C},
            "training": {"iterations": self.iterations, "final_loss": self.final_loss},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LinearClassifier":
        reg, tr = obj["regularization"], obj["training"]
        return cls(np.asarray(obj["weights"], dtype=float), float(obj["bias"]), reg["C"], reg["kind"], tr["iterations"], tr["final_loss"])


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss_grad(params: np.ndarray, X, y: np.ndarray, weights: np.ndarray, C: float) -> tuple[float, np.ndarray]:
    """Objective ``0.5 |w|^2 + C sum_i s_i logloss_i`` and its gradient; the bias is not penalised."""
    w, b = params[:-1], params[-1]
    z = np.asarray(X @ w).ravel() + b
    # log(1 + exp(-m)) with margin m = (2y - 1) z, computed stably.
    m = np.where(y == 1, z, -z)
    loss = 0.5 * float(w @ w) + C * float(weights @ np.logaddexp(0.0, -m))
    r = C * weights * (sigmoid(z) - y)
    grad = np.empty_like(params)
    grad[:-1] = w + np.asarray(X.T @ r).ravel()
    grad[-1] = r.sum()
    return loss, grad


def train_logistic(
    X,
    y: Sequence[int],
    sample_weights: Sequence[float] | None = None,
    C: float = DEFAULT_C,
    tol: float = 1e-6,
    max_iter: int = 1000,
) -> LinearClassifier:
    """Minimise the weighted L2-regularised logistic loss with L-BFGS."""
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if n != y.shape[0] or n < 2:
        raise ValueError("X and y must have the same length, at least 2")
    s = np.ones(n) if sample_weights is None else np.asarray(sample_weights, dtype=float)
    if np.any(s < 0):
        raise ValueError("sample weights must be non-negative")
    if not (np.any((y == 1) & (s > 0)) and np.any((y == 0) & (s > 0))):
        raise DegenerateLabels("both classes need positive total weight")
    if C <= 0:
        raise ValueError("C must be positive")
    x0 = np.zeros(X.shape[1] + 1)
    res = scipy.optimize.minimize(
        logistic_loss_grad,
        x0,
        args=(X, y, s, C),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": max_iter, "gtol": tol, "ftol": 0.0, "maxcor": 20},
    )
    return LinearClassifier(res.x[:-1].copy(), float(res.x[-1]), C, "l2", int(res.nit), float(res.fun))


def predict_proba(clf: LinearClassifier, X) -> np.ndarray:
    if sp.issparse(X) or getattr(X, "ndim", 1) == 2:
        return sigmoid(clf.decision(X))
    return sigmoid(clf.decision(np.asarray(X, dtype=float)[None, :]))


def predict_labels(clf: LinearClassifier, X, threshold: float = 0.5) -> np.ndarray:
    return (predict_proba(clf, X) >= threshold).astype(int)


# ---------------------------------------------------------------------------
# Positive-unlabeled learning


@dataclass
class PuEstimator:
    inner: LinearClassifier
    c_hat: float

    def __post_init__(self) -> None:
        if not 0 < self.c_hat <= 1:
            raise DegenerateEstimator(f"label frequency estimate {self.c_hat} outside (0, 1]")

    def unlabeled_weights(self, X) -> np.ndarray:
        """Probability that an unlabeled sample is positive, clamped to [0, 1]."""
        g = predict_proba(self.inner, X)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = (1.0 - self.c_hat) / self.c_hat * g / (1.0 - g)
        w = np.where(g >= 1.0, 1.0, w)
        return np.clip(w, 0.0, 1.0)


@dataclass
class PuTrainingSet:
    X: object
    y: np.ndarray
    weights: np.ndarray
    n_positive: int
    n_unlabeled: int


def build_pu_training_set(P, U, unlabeled_weights: np.ndarray) -> PuTrainingSet:
    """Positives at weight 1, then each unlabeled row twice: label 1 at w, label 0 at 1 - w."""
    w = np.asarray(unlabeled_weights, dtype=float)
    if w.shape[0] != U.shape[0] or np.any((w < 0) | (w > 1)):
        raise ValueError("need one weight in [0, 1] per unlabeled sample")
    n_p, n_u = P.shape[0], U.shape[0]
    stack = sp.vstack if sp.issparse(P) or sp.issparse(U) else np.vstack
    X = stack([P, U, U])
    if sp.issparse(X):
        X = X.tocsr()
    y = np.concatenate([np.ones(n_p), np.ones(n_u), np.zeros(n_u)])
    weights = np.concatenate([np.ones(n_p), w, 1.0 - w])
    return PuTrainingSet(X, y, weights, n_p, n_u)


def pu_fit(
    P,
    U,
    C: float = DEFAULT_C,
    hold_out: float = 0.2,
    seed: int = 0,
    tol: float = 1e-6,
    max_iter: int = 1000,
) -> tuple[PuEstimator, LinearClassifier]:
    """Train the labeled-vs-unlabeled estimator, reweight U, train the final classifier."""
    n_p, n_u = P.shape[0], U.shape[0]
    if n_p < 1 or n_u < 1:
        raise ValueError("need at least one positive and one unlabeled sample")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n_p)
    n_hold = max(1, int(round(hold_out * n_p))) if n_p > 1 else 0
    held, kept = perm[:n_hold], perm[n_hold:]
    if kept.size == 0:
        kept = held
    stack = sp.vstack if sp.issparse(P) else np.vstack
    X1 = stack([P[kept], U])
    y1 = np.concatenate([np.ones(kept.size), np.zeros(n_u)])
    g = train_logistic(X1, y1, C=C, tol=tol, max_iter=max_iter)
    c_hat = float(np.mean(predict_proba(g, P[held] if held.size else P)))
    if not c_hat > 0:
        raise DegenerateEstimator("estimator assigns zero probability to every held-out positive")
    estimator = PuEstimator(g, min(c_hat, 1.0))
    ts = build_pu_training_set(P, U, estimator.unlabeled_weights(U))
    final = train_logistic(ts.X, ts.y, ts.weights, C=C, tol=tol, max_iter=max_iter)
    return estimator, final


# ---------------------------------------------------------------------------
# Persistence


@dataclass
class SentenceClassifier:
    tfidf: TfIdfModel
    clf: LinearClassifier
    threshold: float = 0.5
    pu: PuEstimator | None = None

    def predict_proba(self, sentences: Sequence[str]) -> np.ndarray:
        return predict_proba(self.clf, self.tfidf.transform_many(sentences))

    def predict(self, sentences: Sequence[str]) -> np.ndarray:
        return (self.predict_proba(sentences) >= self.threshold).astype(int)

    def save(self, path: str | Path) -> None:
        doc = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "threshold": self.threshold,
            "tfidf": self.tfidf.to_json(),
            "classifier": self.clf.to_json(),
            "pu": None if self.pu is None else {"c_hat": self.pu.c_hat, "estimator": self.pu.inner.to_json()},
        }
        Path(path).write_text(json.dumps(doc), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SentenceClassifier":
        doc = json.loads(Path(path).read_text("utf-8"))
        if doc.get("format") != MODEL_FORMAT:
            raise ValueError(f"{path} is not a {MODEL_FORMAT} file")
        if doc.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {doc.get('version')}")
        pu = doc.get("pu")
        return cls(
            TfIdfModel.from_json(doc["tfidf"]),
            LinearClassifier.from_json(doc["classifier"]),
            float(doc["threshold"]),
            None if pu is None else PuEstimator(LinearClassifier.from_json(pu["estimator"]), pu["c_hat"]),
        )


def predict(clf: LinearClassifier, tfidf: TfIdfModel, sentence: str, threshold: float = 0.5) -> int:
    """Label 1 iff the probability is at least ``threshold``."""
    return int(predict_proba(clf, transform(tfidf, sentence))[0] >= threshold)


def train_sentence_classifier(
    sentences: Sequence[str],
    labels: Sequence[int],
    C: float = DEFAULT_C,
    use_pu: bool = False,
    tfidf_config: TfIdfConfig | None = None,
    threshold: float = 0.5,
    seed: int = 0,
) -> SentenceClassifier:
    tfidf = fit_tfidf(sentences, tfidf_config)
    X = tfidf.transform_many(sentences)
    y = np.asarray(labels, dtype=int)
    if not use_pu:
        return SentenceClassifier(tfidf, train_logistic(X, y, C=C), threshold)
    est, final = pu_fit(X[np.flatnonzero(y == 1)], X[np.flatnonzero(y == 0)], C=C, seed=seed)
    return SentenceClassifier(tfidf, final, threshold, est)
