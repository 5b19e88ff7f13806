"""Derivative-free search over the ten alignment parameters.

Triplet accuracy is piecewise constant in the parameters, so the search is
a coordinate pattern search with shrinking steps; when the step collapses it
restarts from a random point (or a perturbation of the best point).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .alignment import AlignmentParams
from .evaluation import Scorer, Triplet, eval_triplets
from .scoring import SimDocConfig

# per level: match_gain, gap_insert, gap_delete, gap_substitute, discount
PARAM_NAMES = tuple(f"{level}.{name}" for level in ("sentence", "document") for name in (
    "match_gain", "gap_insert", "gap_delete", "gap_substitute", "discount"))
LOWER = np.array([0.0, -3.0, -3.0, -3.0, 0.0] * 2)
UPPER = np.array([3.0, 0.0, 0.0, 0.0, 1.0] * 2)
METHODS = ("coordinate", "random-restart", "perturbation")
PARAMS_FORMAT = "simdoc-params"


def initial_params() -> np.ndarray:
    """Untuned starting point: f=1, M=1, G_ins=-0.5, G_del=-0.5, G_sub=-1 at both levels."""
    return np.array([1.0, -0.5, -0.5, -1.0, 1.0] * 2)


def clip_params(vector) -> np.ndarray:
    return np.clip(np.asarray(vector, dtype=np.float64), LOWER, UPPER)


def to_config(vector, base: SimDocConfig | None = None) -> SimDocConfig:
    base = base or SimDocConfig()
    v = clip_params(vector)
    return base.with_params(AlignmentParams.from_sequence(v[:5]),
                            AlignmentParams.from_sequence(v[5:]))


def from_config(config: SimDocConfig) -> np.ndarray:
    return np.array(config.sentence_params.as_tuple() + config.document_params.as_tuple())


@dataclass(frozen=True)
class TuneConfig:
    method: str = "random-restart"
    max_evaluations: int = 500
    initial_step: float = 0.25   # fraction of each parameter's range
    shrink: float = 0.5
    min_step: float = 0.02
    rng_seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.max_evaluations < 1:
            raise ValueError("max_evaluations must be >= 1")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")


@dataclass
class TuneResult:
    params: np.ndarray
    accuracy: float
    initial_accuracy: float
    history: list[float] = field(default_factory=list)       # best-so-far per evaluation
    trajectory: list[tuple] = field(default_factory=list)    # every evaluated point

    @property
    def evaluations(self) -> int:
        return len(self.history)

    def config(self, base: SimDocConfig | None = None) -> SimDocConfig:
        return to_config(self.params, base)


def tune(init, train: Sequence[Triplet], scorer_factory: Callable[[SimDocConfig], Scorer],
         config: TuneConfig | None = None, base: SimDocConfig | None = None) -> TuneResult:
    """Maximize triplet accuracy on ``train`` starting from ``init``.

    ``scorer_factory`` turns a SimDocConfig into a pairwise scorer. The
    returned parameters are the best seen, so the result is never worse than
    ``init``. A scorer failure aborts with a TripletError naming the triplet.
    """
    config = config or TuneConfig()
    if not train:
        raise ValueError("training split is empty")
    rng = np.random.default_rng(config.rng_seed)
    width = UPPER - LOWER
    history: list[float] = []
    trajectory: list[tuple] = []

    def evaluate(x: np.ndarray) -> float:
        scorer = scorer_factory(to_config(x, base))
        acc = eval_triplets(train, scorer).accuracy
        trajectory.append(tuple(float(v) for v in x))
        best_so_far = max(history[-1], acc) if history else acc
        history.append(best_so_far)
        return acc

    x = clip_params(init)
    acc_x = evaluate(x)
    init_acc = acc_x
    best, best_acc = x.copy(), acc_x
    steps = config.initial_step * width

    def budget_left():
        return len(history) < config.max_evaluations and best_acc < 1.0

    while budget_left():
        improved = False
        for i in rng.permutation(len(x)):
            for sign in (1.0, -1.0):
                if not budget_left():
                    break
                cand = clip_params(x + sign * steps[i] * np.eye(len(x))[i])
                if np.array_equal(cand, x):
                    continue
                acc = evaluate(cand)
                if acc > acc_x:
                    x, acc_x, improved = cand, acc, True
                    if acc > best_acc:
                        best, best_acc = cand.copy(), acc
                    break
        if improved:
            continue
        steps = steps * config.shrink
        if np.all(steps < config.min_step * width) and budget_left():
            if config.method == "coordinate":
                break
            if config.method == "random-restart":
                x = LOWER + rng.random(len(x)) * width
            else:
                x = clip_params(best + rng.normal(scale=0.15, size=len(x)) * width)
            acc_x = evaluate(x)
            if acc_x > best_acc:
                best, best_acc = x.copy(), acc_x
            steps = config.initial_step * width

    return TuneResult(best, best_acc, init_acc, history, trajectory)


def params_to_dict(vector, accuracy: float | None = None) -> dict:
    v = clip_params(vector)
    cfg = to_config(v)
    out = {"format": PARAMS_FORMAT, "sentence": cfg.sentence_params.to_dict(),
           "document": cfg.document_params.to_dict()}
    if accuracy is not None:
        out["train_accuracy"] = accuracy
    return out


def save_params(vector, path: str | Path, accuracy: float | None = None) -> None:
    Path(path).write_text(json.dumps(params_to_dict(vector, accuracy), indent=2, sort_keys=True)
                          + "\n", encoding="utf-8")


def load_params(path: str | Path) -> dict:
    """Read a tuned parameter block; returns the dict accepted by SimDocConfig.from_dict."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return {k: data[k] for k in ("sentence", "document", "top_k", "alignment_mode") if k in data}
