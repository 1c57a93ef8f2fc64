"""KNN shape classifier over convex-hull feature vectors.

Training standardizes every feature to zero mean and unit variance (computed
from the corpus only) so that large-magnitude components such as the hull
vertex count cannot dominate the Euclidean metric.  Prediction is a majority
vote among the k nearest exemplars with fully deterministic tie-breaking:
a vote tie falls to the single nearest neighbor's class, and a distance tie
falls to the exemplar with the lowest index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .errors import EmptyTestSet, MissingClass
from .geometry import FEATURE_COUNT, FeatureVector, extract_features, format_record, parse_record
from .shapes import SHAPE_CLASSES, ShapeClass, make_corpus
from .trajectory import Trajectory, normalize

MODEL_HEADER = "yolo-knn v1"

DEFAULT_TRAIN_SEED = 42
DEFAULT_EVAL_SEED_MOUSE = 1042
DEFAULT_EVAL_SEED_ROBOT = 2042


@dataclass(frozen=True)
class KnnConfig:
    """Neighbor count for classification; the metric is fixed (Euclidean on
    standardized features)."""

    k: int = 3

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class TrainedModel:
    """Immutable fitted classifier: exemplars plus standardization stats.

    ``exemplars`` keep their raw (unstandardized) feature values; the
    z-scored matrix is derived once on first use.
    """

    exemplars: tuple[tuple[FeatureVector, ShapeClass], ...]
    means: tuple[float, ...]
    stddevs: tuple[float, ...]
    k: int = 3

    @cached_property
    def _matrix(self) -> np.ndarray:
        raw = np.array([fv.as_tuple() for fv, _ in self.exemplars], dtype=float)
        return (raw - np.array(self.means)) / np.array(self.stddevs)

    @cached_property
    def _labels(self) -> tuple[ShapeClass, ...]:
        return tuple(label for _, label in self.exemplars)

    def standardize(self, fv: FeatureVector) -> np.ndarray:
        return (np.array(fv.as_tuple()) - np.array(self.means)) / np.array(self.stddevs)


def features_of(traj: Trajectory) -> FeatureVector:
    """Normalize a raw segment and extract its shape features."""
    return extract_features(normalize(traj))


def fit(
    corpus: Sequence[tuple[Trajectory, ShapeClass]],
    cfg: KnnConfig = KnnConfig(),
) -> TrainedModel:
    """Fit a model from labeled trajectories.

    Raises MissingClass unless every shape class has at least one example;
    zero-variance features get a stddev of 1 so standardization never
    divides by zero.
    """
    present = {label for _, label in corpus}
    missing = [s for s in SHAPE_CLASSES if s not in present]
    if missing:
        names = ", ".join(s.label for s in missing)
        raise MissingClass(f"corpus has no examples of: {names}")
    if cfg.k > len(corpus):
        raise ValueError(f"k={cfg.k} exceeds corpus size {len(corpus)}")

    pairs = [(features_of(traj), label) for traj, label in corpus]
    raw = np.array([fv.as_tuple() for fv, _ in pairs], dtype=float)
    means = raw.mean(axis=0)
    stddevs = raw.std(axis=0)
    # Constant features: float error can leave a ~1e-16 residue instead of
    # an exact zero, which would blow up the standardized values.
    stddevs[stddevs <= 1e-12 * np.maximum(1.0, np.abs(means))] = 1.0
    return TrainedModel(
        exemplars=tuple(pairs),
        means=tuple(float(m) for m in means),
        stddevs=tuple(float(s) for s in stddevs),
        k=cfg.k,
    )


def classify_features(model: TrainedModel, fv: FeatureVector) -> tuple[ShapeClass, float]:
    """Predict from an already-extracted feature vector."""
    q = model.standardize(fv)
    d2 = np.sum((model._matrix - q) ** 2, axis=1)
    # Stable sort keeps insertion order among equal distances, which is the
    # documented distance tie-break.
    order = np.argsort(d2, kind="stable")[: model.k]
    votes: dict[ShapeClass, int] = {}
    for idx in order:
        label = model._labels[idx]
        votes[label] = votes.get(label, 0) + 1
    best = max(votes.values())
    winners = [label for label, n in votes.items() if n == best]
    if len(winners) == 1:
        winner = winners[0]
    else:
        winner = model._labels[order[0]]
    return winner, votes[winner] / model.k


def classify(model: TrainedModel, seg: Trajectory) -> tuple[ShapeClass, float]:
    """Classify a raw trajectory segment; returns (class, vote fraction)."""
    return classify_features(model, features_of(seg))


@dataclass(frozen=True)
class EvalReport:
    """Accuracy plus a per-class confusion matrix (rows: true class,
    columns: predicted class, ordered by ShapeClass ordinal)."""

    accuracy: float
    confusion: tuple[tuple[int, ...], ...]

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.confusion)

    def format(self) -> str:
        labels = [s.label for s in SHAPE_CLASSES]
        width = max(len(x) for x in labels) + 1
        lines = ["true\\pred".ljust(width) + "".join(x.rjust(width) for x in labels)]
        for s, row in zip(SHAPE_CLASSES, self.confusion):
            lines.append(
                s.label.ljust(width) + "".join(str(n).rjust(width) for n in row)
            )
        lines.append(f"accuracy {self.accuracy:.4f} ({self.total} samples)")
        return "\n".join(lines)


def evaluate(
    model: TrainedModel, test: Sequence[tuple[Trajectory, ShapeClass]]
) -> EvalReport:
    """Classify a labeled test set and tabulate the confusion matrix."""
    if not test:
        raise EmptyTestSet("test set is empty")
    counts = [[0] * len(SHAPE_CLASSES) for _ in SHAPE_CLASSES]
    hits = 0
    for traj, truth in test:
        pred, _ = classify(model, traj)
        counts[truth.value][pred.value] += 1
        hits += int(pred is truth)
    confusion = tuple(tuple(row) for row in counts)
    return EvalReport(accuracy=hits / len(test), confusion=confusion)


def default_corpus(
    n_per_class: int = 50,
    jitter_sigma: float = 0.02,
    drop_rate: float = 0.0,
    base_seed: int = DEFAULT_TRAIN_SEED,
) -> list[tuple[Trajectory, ShapeClass]]:
    """The reproducible training corpus: generated, never a shipped blob."""
    return make_corpus(n_per_class, jitter_sigma, drop_rate, base_seed)


@lru_cache(maxsize=4)
def default_model(cfg: KnnConfig = KnnConfig()) -> TrainedModel:
    """Model fitted on the default generated corpus (cached: the corpus is
    deterministic, so every call returns the same model)."""
    return fit(default_corpus(), cfg)


def dump_model(model: TrainedModel) -> str:
    """Serialize to the model file format: a header line, one line of
    feature means, one of stddevs, then one exemplar per line."""
    lines = [f"{MODEL_HEADER} k={model.k}"]
    lines.append(" ".join(f"{m:.17g}" for m in model.means))
    lines.append(" ".join(f"{s:.17g}" for s in model.stddevs))
    for fv, label in model.exemplars:
        lines.append(format_record(label.label, fv, precision=17))
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> TrainedModel:
    """Inverse of dump_model; exact float round-trip."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith(MODEL_HEADER):
        raise ValueError(f"not a model file (expected {MODEL_HEADER!r} header)")
    header = lines[0].split()
    k = int(header[-1].split("=", 1)[1])
    means = tuple(float(x) for x in lines[1].split(" "))
    stddevs = tuple(float(x) for x in lines[2].split(" "))
    if len(means) != FEATURE_COUNT or len(stddevs) != FEATURE_COUNT:
        raise ValueError("model stats have the wrong arity")
    exemplars = []
    for line in lines[3:]:
        label, fv = parse_record(line)
        exemplars.append((fv, ShapeClass.from_label(label)))
    return TrainedModel(tuple(exemplars), means, stddevs, k)


def save_model(model: TrainedModel, path: str) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dump_model(model))


def load_model(path: str) -> TrainedModel:
    with open(path, "r", encoding="ascii") as fh:
        return parse_model(fh.read())
