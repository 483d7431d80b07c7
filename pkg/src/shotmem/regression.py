"""Bayesian ridge regression fitted by evidence maximization.

The model is linear with a bias term: a zero-mean isotropic Gaussian
prior with precision ``alpha`` on the weights, Gaussian observation
noise with precision ``beta``. Fitting alternates the posterior solve

    S = (alpha I + beta X^T X)^-1,   w = beta S X^T y

with the classical hyperparameter updates

    gamma = sum_i beta l_i / (alpha + beta l_i)     (l_i: eigenvalues of X^T X)
    alpha = gamma / ||w||^2
    beta  = (N - gamma) / ||y - X w||^2

until the relative change of (alpha, beta) drops below ``tol``. The
eigendecomposition of X^T X is computed once; every iteration is then
O(D^2). Features are standardized internally (the parameters are stored
on the model), since the hyperparameter updates are scale sensitive.

Training rows are frame features paired with their source video's
memorability score, Memento10k style: a ``video_id\\tscore`` table plus
one MEMFEAT file per video.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, ParseError, SchemaError, ValidationError
from .features import read_feature_table

DEFAULT_MAX_ITER = 300
DEFAULT_TOL = 1e-4

MODEL_MAGIC = "BRRMODEL"

_EPS = np.finfo(np.float64).eps
_TINY = np.finfo(np.float64).tiny


@dataclass(frozen=True)
class TrainingSet:
    """Feature rows with memorability targets in [0, 1]."""

    X: np.ndarray  # (N, D) float32
    y: np.ndarray  # (N,) float64
    source_ids: tuple[str, ...]

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float32)
        y = np.asarray(self.y, dtype=np.float64)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if X.ndim != 2:
            raise ValidationError(f"X must be 2-D, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise ValidationError(f"y shape {y.shape} does not match X rows {X.shape[0]}")
        if len(self.source_ids) != X.shape[0]:
            raise ValidationError(
                f"{len(self.source_ids)} source ids for {X.shape[0]} rows"
            )
        if X.shape[0] == 0:
            raise ValidationError("empty training set")
        if not np.all(np.isfinite(X)):
            raise ValidationError("non-finite value in training features")
        if not np.all(np.isfinite(y)):
            raise ValidationError("non-finite value in training targets")
        if y.min() < 0.0 or y.max() > 1.0:
            raise ValidationError(
                f"targets outside [0, 1]: min {y.min()!r}, max {y.max()!r}"
            )

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class BRRModel:
    weights: np.ndarray  # (D+1,), bias last
    alpha: float
    beta: float
    covariance: np.ndarray  # (D+1, D+1) posterior covariance, SPD
    feature_mean: np.ndarray  # (D,) standardization offset
    feature_scale: np.ndarray  # (D,) standardization divisor
    iterations: int
    converged: bool

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValidationError(f"alpha and beta must be > 0 (got {self.alpha}, {self.beta})")
        S = np.asarray(self.covariance, dtype=np.float64)
        if not np.allclose(S, S.T, rtol=0, atol=1e-10 * max(1.0, float(np.abs(S).max()))):
            raise ValidationError("posterior covariance is not symmetric")

    @property
    def dim(self) -> int:
        return self.weights.shape[0] - 1


@dataclass(frozen=True)
class ShotScore:
    shot_index: int
    score: float
    variance: float
    n_frames: int


def fit(
    train: TrainingSet,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> BRRModel:
    """Fit by evidence maximization; see the module docstring for the updates."""
    X = train.X.astype(np.float64)
    y = train.y
    n, d = X.shape

    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    phi = np.hstack([(X - mean) / scale, np.ones((n, 1))])

    gram = phi.T @ phi
    evals, evecs = np.linalg.eigh(gram)
    evals = np.clip(evals, 0.0, None)
    pty = phi.T @ y

    def posterior_mean(alpha: float, beta: float) -> np.ndarray:
        denom = alpha + beta * evals
        return beta * (evecs @ ((evecs.T @ pty) / denom))

    alpha = 1.0
    beta = 1.0 / max(float(y.var()), _EPS)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        w = posterior_mean(alpha, beta)
        gamma = float(np.sum(beta * evals / (alpha + beta * evals)))
        rss = float(np.sum((y - phi @ w) ** 2))
        wsq = float(w @ w)
        alpha_new = gamma / max(wsq, _TINY)
        beta_new = max(n - gamma, _EPS) / max(rss, _TINY)
        change = max(
            abs(alpha_new - alpha) / alpha,
            abs(beta_new - beta) / beta,
        )
        alpha, beta = alpha_new, beta_new
        if change < tol:
            converged = True
            break

    w = posterior_mean(alpha, beta)
    denom = alpha + beta * evals
    covariance = (evecs / denom) @ evecs.T
    covariance = (covariance + covariance.T) / 2.0
    return BRRModel(
        weights=w,
        alpha=alpha,
        beta=beta,
        covariance=covariance,
        feature_mean=mean,
        feature_scale=scale,
        iterations=iterations,
        converged=converged,
    )


def _design_vector(model: BRRModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != model.dim:
        raise DimensionMismatchError(model.dim, x.shape[0], context="predict")
    z = (x - model.feature_mean) / model.feature_scale
    return np.append(z, 1.0)


def predict(model: BRRModel, x: np.ndarray) -> tuple[float, float]:
    """Predictive mean and variance at a single feature vector."""
    z = _design_vector(model, x)
    mean = float(z @ model.weights)
    variance = 1.0 / model.beta + float(z @ model.covariance @ z)
    return mean, variance


def score_shot(model: BRRModel, frame_vectors: Sequence[np.ndarray], shot_index: int = 0) -> ShotScore:
    """Reduce per-frame predictions to one shot score.

    Score is the mean of the frame predictive means; variance is the
    mean of the frame variances divided by the frame count.
    """
    if len(frame_vectors) == 0:
        raise ValidationError(f"shot {shot_index}: no frame vectors to score")
    means = []
    variances = []
    for x in frame_vectors:
        m, v = predict(model, x)
        means.append(m)
        variances.append(v)
    n = len(frame_vectors)
    return ShotScore(
        shot_index=shot_index,
        score=float(np.mean(means)),
        variance=float(np.mean(variances)) / n,
        n_frames=n,
    )


def _format_vector(v: np.ndarray) -> str:
    return ",".join(repr(float(x)) for x in v)


def _parse_vector(text: str, path, line_no: int) -> np.ndarray:
    try:
        return np.array([float(p) for p in text.split(",")], dtype=np.float64)
    except ValueError:
        raise ParseError("bad float in model payload", path=path, line=line_no) from None


def write_model(model: BRRModel, path: Path) -> None:
    lines = [f"{MODEL_MAGIC}\tv1\tdim={model.dim}"]
    lines.append(f"alpha\t{model.alpha!r}")
    lines.append(f"beta\t{model.beta!r}")
    lines.append(f"iterations\t{model.iterations}")
    lines.append(f"converged\t{int(model.converged)}")
    lines.append(f"feature_mean\t{_format_vector(model.feature_mean)}")
    lines.append(f"feature_scale\t{_format_vector(model.feature_scale)}")
    lines.append(f"weights\t{_format_vector(model.weights)}")
    for row in model.covariance:
        lines.append(f"cov\t{_format_vector(row)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_model(path: Path) -> BRRModel:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty model file")
    parts = lines[0].split("\t")
    if len(parts) != 3 or parts[0] != MODEL_MAGIC or parts[1] != "v1":
        raise SchemaError(f"{path}: bad header {lines[0]!r}")
    try:
        dim = int(parts[2].removeprefix("dim="))
    except ValueError:
        raise SchemaError(f"{path}: bad dim field {parts[2]!r}") from None
    scalars: dict[str, str] = {}
    vectors: dict[str, np.ndarray] = {}
    cov_rows: list[np.ndarray] = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        key, sep, value = line.partition("\t")
        if not sep:
            raise ParseError(f"bad model line {line!r}", path=path, line=line_no)
        if key == "cov":
            cov_rows.append(_parse_vector(value, path, line_no))
        elif key in ("feature_mean", "feature_scale", "weights"):
            vectors[key] = _parse_vector(value, path, line_no)
        else:
            scalars[key] = value
    try:
        required = ("alpha", "beta", "iterations", "converged")
        alpha, beta = float(scalars["alpha"]), float(scalars["beta"])
        iterations, converged = int(scalars["iterations"]), bool(int(scalars["converged"]))
        mean, scale, weights = (
            vectors["feature_mean"],
            vectors["feature_scale"],
            vectors["weights"],
        )
    except KeyError as exc:
        raise SchemaError(f"{path}: missing model field {exc}") from None
    if weights.shape[0] != dim + 1 or mean.shape[0] != dim or scale.shape[0] != dim:
        raise SchemaError(f"{path}: payload sizes inconsistent with dim={dim}")
    if len(cov_rows) != dim + 1 or any(r.shape[0] != dim + 1 for r in cov_rows):
        raise SchemaError(f"{path}: covariance payload is not ({dim + 1})x({dim + 1})")
    return BRRModel(
        weights=weights,
        alpha=alpha,
        beta=beta,
        covariance=np.vstack(cov_rows),
        feature_mean=mean,
        feature_scale=scale,
        iterations=iterations,
        converged=converged,
    )


TRAINING_SCORES_COLUMNS = ("video_id", "score")


def read_training_scores(path: Path) -> list[tuple[str, float]]:
    """Read the ``video_id\\tscore`` table pairing videos with targets."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split("\t") != list(TRAINING_SCORES_COLUMNS):
        raise SchemaError(f"{path}: expected header 'video_id\\tscore'")
    out: list[tuple[str, float]] = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, got {len(fields)}", path=path, line=line_no)
        try:
            out.append((fields[0], float(fields[1])))
        except ValueError:
            raise ParseError(f"bad score {fields[1]!r}", path=path, line=line_no) from None
    return out


def write_training_scores(rows: Iterable[tuple[str, float]], path: Path) -> None:
    lines = ["\t".join(TRAINING_SCORES_COLUMNS)]
    lines.extend(f"{vid}\t{score!r}" for vid, score in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_training_set(scores_path: Path, features_dir: Path) -> TrainingSet:
    """Assemble per-frame training rows from a score table and MEMFEAT files.

    Every frame of ``<features_dir>/<video_id>.memfeat`` becomes one row
    carrying that video's score.
    """
    features_dir = Path(features_dir)
    rows: list[np.ndarray] = []
    targets: list[float] = []
    ids: list[str] = []
    dim: int | None = None
    for video_id, score in read_training_scores(scores_path):
        table = read_feature_table(features_dir / f"{video_id}.memfeat", episode_id=video_id)
        if dim is None:
            dim = table.dim
        elif table.dim != dim:
            raise DimensionMismatchError(dim, table.dim, context=f"training video {video_id}")
        for frame in table.frames:
            rows.append(frame.vector)
            targets.append(score)
            ids.append(video_id)
    if not rows:
        raise ValidationError(f"{scores_path}: no training rows found")
    return TrainingSet(X=np.vstack(rows), y=np.array(targets), source_ids=tuple(ids))
