"""Slip-state prediction: features, auto-labeling, datasets, classifiers.

A classifier maps tactile features at tick t to the contact class at
t + horizon ticks. Features are [x_t, x_t - x_{t-1}] where the per-tick
vector x collapses the 22-sample P_ac batch to (mean, peak-to-peak):
P_dc, P_ac-mean, P_ac-ptp, E[19], T_dc, T_ac -> 24 values per tick, 48 total.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .physics import ContactClass
from .sensor import N_ELECTRODES, SensorFrame

PER_TICK_DIM = 3 + N_ELECTRODES + 2   # 24
FEATURE_DIM = 2 * PER_TICK_DIM        # 48
DEFAULT_HORIZON = 10                  # ticks (100 ms at the 100 Hz control rate)

CLASS_ORDER = [ContactClass.SLIP, ContactClass.CONTACT, ContactClass.NO_CONTACT]
_CLASS_INDEX = {c: i for i, c in enumerate(CLASS_ORDER)}

MODEL_FORMAT_VERSION = 1


def collapse_frame(frame: SensorFrame) -> list[float]:
    """Per-tick 24-value summary of one grounded frame."""
    batch = frame.p_ac
    mean = sum(batch) / len(batch)
    ptp = max(batch) - min(batch)
    return [frame.p_dc, mean, ptp, *frame.electrodes, frame.t_dc, frame.t_ac]


def extract_features(prev: SensorFrame, cur: SensorFrame) -> list[float]:
    """[x_t, x_t - x_{t-1}] over consecutive grounded frames."""
    if cur.tick != prev.tick + 1:
        raise ValueError(f"frames not consecutive: {prev.tick} -> {cur.tick}")
    x_prev = collapse_frame(prev)
    x_cur = collapse_frame(cur)
    return x_cur + [a - b for a, b in zip(x_cur, x_prev)]


def auto_label(
    p_dc: list[float],
    positions: list[tuple[float, float]],
    dt: float,
    t_contact: float = 10.0,
    t_movement: float = 0.01,
) -> list[ContactClass]:
    """Threshold labeling from grounded pressure and fingertip positions.

    Velocity comes from consecutive position differences (one-sided at the
    first tick). slip iff P_dc > T_Contact and |v| > T_Movement; no-contact
    iff P_dc <= T_Contact; contact otherwise.
    """
    if len(p_dc) != len(positions):
        raise ValueError("pressure and position traces differ in length")
    n = len(p_dc)
    labels: list[ContactClass] = []
    for t in range(n):
        if t == 0:
            a, b = (positions[1], positions[0]) if n > 1 else (positions[0], positions[0])
        else:
            a, b = positions[t], positions[t - 1]
        speed = ((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2) ** 0.5 / dt
        if p_dc[t] <= t_contact:
            labels.append(ContactClass.NO_CONTACT)
        elif speed > t_movement:
            labels.append(ContactClass.SLIP)
        else:
            labels.append(ContactClass.CONTACT)
    return labels


@dataclass
class LabeledSample:
    features: list[float]
    label: ContactClass
    trial_id: str
    finger_id: int
    tick: int


@dataclass
class FingerRecord:
    """One finger's grounded stream and labels for one trial."""

    trial_id: str
    finger_id: int
    frames: list[SensorFrame]
    labels: list[ContactClass]


@dataclass
class SeriesRecord:
    """Collapsed per-tick feature series (24 values per tick) plus labels."""

    trial_id: str
    finger_id: int
    x: list[list[float]]
    labels: list[ContactClass]


def record_to_series(rec: "FingerRecord | SeriesRecord") -> SeriesRecord:
    if isinstance(rec, SeriesRecord):
        return rec
    return SeriesRecord(
        trial_id=rec.trial_id,
        finger_id=rec.finger_id,
        x=[collapse_frame(f) for f in rec.frames],
        labels=rec.labels,
    )


def series_features(x: list[list[float]], t: int) -> list[float]:
    """[x_t, x_t - x_{t-1}] from a collapsed series."""
    return x[t] + [a - b for a, b in zip(x[t], x[t - 1])]


def build_dataset(
    records: "list[FingerRecord | SeriesRecord]",
    horizon: int = DEFAULT_HORIZON,
    warnings: list[str] | None = None,
) -> list[LabeledSample]:
    """One sample per tick t (with t-1 and t+horizon in-trial), all fingers pooled."""
    samples: list[LabeledSample] = []
    for rec in records:
        series = record_to_series(rec)
        n = len(series.x)
        if n < horizon + 2:
            if warnings is not None:
                warnings.append(
                    f"trial {series.trial_id} finger {series.finger_id}: "
                    f"{n} ticks, needs {horizon + 2}; skipped"
                )
            continue
        for t in range(1, n - horizon):
            samples.append(
                LabeledSample(
                    features=series_features(series.x, t),
                    label=series.labels[t + horizon],
                    trial_id=series.trial_id,
                    finger_id=series.finger_id,
                    tick=t,
                )
            )
    return samples


@dataclass
class TrainConfig:
    kind: str = "multinomial-linear"   # or "k-nearest-neighbor"
    learning_rate: float = 1.0
    epochs: int = 800
    l2: float = 1e-5
    seed: int = 0
    k_neighbors: int = 5
    knn_max_exemplars: int = 8000


@dataclass
class Classifier:
    kind: str
    feat_mean: np.ndarray
    feat_std: np.ndarray
    weights: np.ndarray | None = None      # (3, FEATURE_DIM + 1), bias last
    exemplars: np.ndarray | None = None    # standardized, for k-NN
    exemplar_labels: np.ndarray | None = None
    k_neighbors: int = 5
    feat_lo: np.ndarray | None = None      # standardized clip range seen in training,
    feat_hi: np.ndarray | None = None      # so out-of-range inputs cannot extrapolate

    def _standardize(self, features: np.ndarray) -> np.ndarray:
        z = (features - self.feat_mean) / self.feat_std
        if self.feat_lo is not None:
            z = np.clip(z, self.feat_lo, self.feat_hi)
        return z

    def scores(self, features: list[float]) -> np.ndarray:
        x = np.asarray(features, dtype=float)
        if x.shape[0] != self.feat_mean.shape[0]:
            raise ValueError(
                f"feature dimension {x.shape[0]} != expected {self.feat_mean.shape[0]}"
            )
        z = self._standardize(x)
        if self.kind == "multinomial-linear":
            return self.weights[:, :-1] @ z + self.weights[:, -1]
        d2 = ((self.exemplars - z) ** 2).sum(axis=1)
        idx = np.argpartition(d2, min(self.k_neighbors, len(d2) - 1))[: self.k_neighbors]
        votes = np.zeros(len(CLASS_ORDER))
        for lbl in self.exemplar_labels[idx]:
            votes[int(lbl)] += 1.0
        return votes

    def predict(self, features: list[float]) -> ContactClass:
        s = self.scores(features)
        # Ties resolve to the earliest class in CLASS_ORDER, so slip wins.
        return CLASS_ORDER[int(np.argmax(s))]

    def to_json(self) -> dict:
        doc = {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": self.kind,
            "class_order": [c.value for c in CLASS_ORDER],
            "feat_mean": list(self.feat_mean),
            "feat_std": list(self.feat_std),
            "k_neighbors": self.k_neighbors,
        }
        if self.weights is not None:
            doc["weights"] = [list(row) for row in self.weights]
        if self.exemplars is not None:
            doc["exemplars"] = [list(row) for row in self.exemplars]
            doc["exemplar_labels"] = [int(v) for v in self.exemplar_labels]
        if self.feat_lo is not None:
            doc["feat_lo"] = list(self.feat_lo)
            doc["feat_hi"] = list(self.feat_hi)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "Classifier":
        if doc.get("format_version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format: {doc.get('format_version')}")
        if doc.get("class_order") != [c.value for c in CLASS_ORDER]:
            raise ValueError("model class order does not match this build")
        return cls(
            kind=doc["kind"],
            feat_mean=np.asarray(doc["feat_mean"], dtype=float),
            feat_std=np.asarray(doc["feat_std"], dtype=float),
            weights=np.asarray(doc["weights"], dtype=float) if "weights" in doc else None,
            exemplars=np.asarray(doc["exemplars"], dtype=float) if "exemplars" in doc else None,
            exemplar_labels=(
                np.asarray(doc["exemplar_labels"], dtype=int)
                if "exemplar_labels" in doc
                else None
            ),
            k_neighbors=doc.get("k_neighbors", 5),
            feat_lo=np.asarray(doc["feat_lo"], dtype=float) if "feat_lo" in doc else None,
            feat_hi=np.asarray(doc["feat_hi"], dtype=float) if "feat_hi" in doc else None,
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def load(cls, path) -> "Classifier":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _standardization(features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = features.mean(axis=0)
    std = features.std(axis=0)
    std[std == 0.0] = 1.0
    return mean, std


def _relevance_scale(z: np.ndarray, labels: np.ndarray, n_classes: int) -> np.ndarray:
    """Per-dimension Fisher-ratio weight: spread of the class means over the
    pooled within-class spread. Down-weights dimensions that carry no class
    signal (important for neighbor distances on noisy channels)."""
    mus = np.array([z[labels == k].mean(axis=0) for k in range(n_classes)])
    within = np.array([z[labels == k].var(axis=0) for k in range(n_classes)]).mean(axis=0)
    fisher = np.sqrt(mus.var(axis=0) / (within + 1e-9))
    top = fisher.max()
    if top <= 0.0:
        return np.ones_like(fisher)
    return np.maximum(fisher / top, 1e-3)


# Feature indices that carry the absolute contact-load level: P_dc and the
# 19 electrodes, in both the current-tick and difference halves.
_LEVEL_DIMS = np.array(
    [0, *range(3, 3 + N_ELECTRODES)]
    + [PER_TICK_DIM, *range(PER_TICK_DIM + 3, PER_TICK_DIM + 3 + N_ELECTRODES)]
)

# Deterministic level-scale augmentation: every sample is replicated at these
# gains on the level channels, so the trained models stay valid across grip
# forces far outside the collection pressure range (slip evidence must come
# from the scale-invariant vibration channels, while near-zero levels still
# read as no-contact at any scale).
LEVEL_AUG_SCALES = (1.0, 8.0)


def _augment_levels(features: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    copies = []
    for s in LEVEL_AUG_SCALES:
        scaled = features.copy()
        scaled[:, _LEVEL_DIMS] *= s
        copies.append(scaled)
    return np.vstack(copies), np.tile(labels, len(LEVEL_AUG_SCALES))


def train(dataset: list[LabeledSample], config: TrainConfig | None = None) -> Classifier:
    """Deterministic classifier training on a pooled dataset.

    The linear model is trained by full-batch gradient descent on weighted
    cross-entropy with inverse-frequency class weights, which keeps the
    learned weights exactly invariant to uniform sample duplication.
    """
    config = config or TrainConfig()
    if not dataset:
        raise ValueError("empty dataset")
    labels = np.array([_CLASS_INDEX[s.label] for s in dataset], dtype=int)
    present = set(labels.tolist())
    for cls_idx, cls in enumerate(CLASS_ORDER):
        if cls_idx not in present:
            raise ValueError(f"dataset is missing class '{cls.value}'")
    features = np.array([s.features for s in dataset], dtype=float)
    features, labels = _augment_levels(features, labels)
    mean, std = _standardization(features)
    z = (features - mean) / std

    if config.kind == "k-nearest-neighbor":
        # Fold relevance weighting into the stored scale so neighbor
        # distances favor class-informative dimensions; inference stays a
        # plain (x - mean) / std transform.
        relevance = _relevance_scale(z, labels, len(CLASS_ORDER))
        std = std / relevance
        z = z * relevance
        lo, hi = z.min(axis=0), z.max(axis=0)
        rng = np.random.default_rng(config.seed)
        if len(z) > config.knn_max_exemplars:
            idx = np.sort(rng.choice(len(z), config.knn_max_exemplars, replace=False))
            z, labels = z[idx], labels[idx]
        return Classifier(
            kind=config.kind,
            feat_mean=mean,
            feat_std=std,
            exemplars=z,
            exemplar_labels=labels,
            k_neighbors=config.k_neighbors,
            feat_lo=lo,
            feat_hi=hi,
        )
    if config.kind != "multinomial-linear":
        raise ValueError(f"unknown classifier kind '{config.kind}'")

    n, dim = z.shape
    n_classes = len(CLASS_ORDER)
    counts = np.bincount(labels, minlength=n_classes).astype(float)
    class_w = n / (n_classes * counts)
    sample_w = class_w[labels]
    sample_w = sample_w / sample_w.sum()

    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), labels] = 1.0
    x1 = np.hstack([z, np.ones((n, 1))])
    w = np.zeros((n_classes, dim + 1))
    lr = config.learning_rate
    for _ in range(config.epochs):
        logits = x1 @ w.T
        logits -= logits.max(axis=1, keepdims=True)
        p = np.exp(logits)
        p /= p.sum(axis=1, keepdims=True)
        grad = (sample_w[:, None] * (p - onehot)).T @ x1
        grad[:, :-1] += config.l2 * w[:, :-1]
        w -= lr * grad
    return Classifier(
        kind=config.kind,
        feat_mean=mean,
        feat_std=std,
        weights=w,
        feat_lo=z.min(axis=0),
        feat_hi=z.max(axis=0),
    )


@dataclass
class EvalReport:
    confusion: list[list[int]]         # rows: true class, cols: predicted
    precision: dict[str, float]
    recall: dict[str, float]
    balanced_accuracy: float
    onset_leads: list[int]             # ticks of warning per ground-truth slip onset

    def to_json(self) -> dict:
        return {
            "confusion": self.confusion,
            "class_order": [c.value for c in CLASS_ORDER],
            "precision": self.precision,
            "recall": self.recall,
            "balanced_accuracy": self.balanced_accuracy,
            "onset_leads": self.onset_leads,
        }


def _onset_leads(
    predictions: list[ContactClass], labels: list[ContactClass]
) -> list[int]:
    """Per slip onset: how many ticks earlier a sustained slip warning began.

    predictions[i] is the forecast made at the same tick as labels[i]; an
    onset is a non-slip -> slip transition in the labels. The lead is
    onset - u for the earliest u <= onset with slip predicted at every tick
    of [u, onset].
    """
    leads = []
    for t in range(1, len(labels)):
        if labels[t] is ContactClass.SLIP and labels[t - 1] is not ContactClass.SLIP:
            u = t
            while u - 1 >= 0 and predictions[u - 1] is ContactClass.SLIP:
                u -= 1
            leads.append(t - u)
    return leads


def evaluate(
    classifier: Classifier,
    records: "list[FingerRecord | SeriesRecord]",
    horizon: int = DEFAULT_HORIZON,
) -> EvalReport:
    """Confusion statistics plus slip-onset lead times over held-out records."""
    if not records:
        raise ValueError("no evaluation records")
    n_classes = len(CLASS_ORDER)
    confusion = np.zeros((n_classes, n_classes), dtype=int)
    leads: list[int] = []
    for rec in records:
        series = record_to_series(rec)
        n = len(series.x)
        if n < horizon + 2:
            continue
        # Prediction timeline indexed by the tick at which each forecast is
        # made (the forecast itself concerns tick t + horizon).
        preds: list[ContactClass] = [ContactClass.NO_CONTACT] * n
        for t in range(1, n):
            preds[t] = classifier.predict(series_features(series.x, t))
        for t in range(1, n - horizon):
            confusion[_CLASS_INDEX[series.labels[t + horizon]], _CLASS_INDEX[preds[t]]] += 1
        leads.extend(_onset_leads(preds, series.labels))

    precision = {}
    recall = {}
    recalls = []
    for i, cls in enumerate(CLASS_ORDER):
        col = confusion[:, i].sum()
        row = confusion[i, :].sum()
        precision[cls.value] = float(confusion[i, i] / col) if col else 0.0
        recall[cls.value] = float(confusion[i, i] / row) if row else 0.0
        if row:
            recalls.append(recall[cls.value])
    return EvalReport(
        confusion=confusion.tolist(),
        precision=precision,
        recall=recall,
        balanced_accuracy=float(np.mean(recalls)) if recalls else 0.0,
        onset_leads=leads,
    )


def save_records(records: "list[FingerRecord | SeriesRecord]", path) -> None:
    """Collapsed per-record series as line-delimited JSON."""
    from .logio import write_ndjson

    def rows():
        for rec in records:
            series = record_to_series(rec)
            yield {
                "trial_id": series.trial_id,
                "finger_id": series.finger_id,
                "x": series.x,
                "labels": [lbl.value for lbl in series.labels],
            }

    write_ndjson(path, rows())


def load_records(path) -> list[SeriesRecord]:
    from .logio import read_ndjson

    return [
        SeriesRecord(
            trial_id=doc["trial_id"],
            finger_id=doc["finger_id"],
            x=doc["x"],
            labels=[ContactClass(v) for v in doc["labels"]],
        )
        for doc in read_ndjson(path)
    ]


def save_dataset(samples: list[LabeledSample], path) -> None:
    from .logio import write_ndjson

    write_ndjson(
        path,
        (
            {
                "trial_id": s.trial_id,
                "finger_id": s.finger_id,
                "tick": s.tick,
                "features": s.features,
                "label": s.label.value,
            }
            for s in samples
        ),
    )


def load_dataset(path) -> list[LabeledSample]:
    from .logio import read_ndjson

    return [
        LabeledSample(
            features=doc["features"],
            label=ContactClass(doc["label"]),
            trial_id=doc["trial_id"],
            finger_id=doc["finger_id"],
            tick=doc["tick"],
        )
        for doc in read_ndjson(path)
    ]


def split_records(
    records: "list[FingerRecord | SeriesRecord]",
    holdout_fraction: float = 0.2,
    seed: int = 0,
) -> tuple[list[SeriesRecord], list[SeriesRecord]]:
    """Deterministic train/holdout split at whole-trial granularity."""
    series = [record_to_series(r) for r in records]
    trial_ids = sorted({s.trial_id for s in series})
    rng = np.random.default_rng(seed)
    held = set(
        rng.choice(
            trial_ids,
            size=max(1, int(round(holdout_fraction * len(trial_ids)))),
            replace=False,
        ).tolist()
    )
    train_recs = [s for s in series if s.trial_id not in held]
    hold_recs = [s for s in series if s.trial_id in held]
    return train_recs, hold_recs
