"""Batch training of QAOA protocols with Adam and approximation-ratio evaluation."""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ParseError, ValidationError
from .graphs import Graph
from .qaoa import Protocol, batch_gradient, expected_cuts

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    steps_P: int = 1
    init_mean: float = 0.5
    init_std: float = 0.01
    step_size: float = 0.01
    minibatch: int = 1
    epochs: int = 50
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    # early stopping: stop once the epoch objective has failed to beat its
    # best by min_delta for `patience` consecutive epochs; patience 0 disables
    patience: int = 5
    min_delta: float = 1e-4

    def __post_init__(self):
        if self.step_size <= 0:
            raise ValidationError(f"step_size must be positive, got {self.step_size}")
        if not (0 <= self.adam_beta1 < 1 and 0 <= self.adam_beta2 < 1):
            raise ValidationError("Adam decay rates must lie in [0, 1)")
        if self.minibatch < 1:
            raise ValidationError(f"minibatch must be >= 1, got {self.minibatch}")
        if self.init_std < 0:
            raise ValidationError(f"init_std must be >= 0, got {self.init_std}")
        if self.epochs < 0:
            raise ValidationError(f"epochs must be >= 0, got {self.epochs}")


@dataclass
class TrainRecord:
    protocol: Protocol
    first_moment: np.ndarray
    second_moment: np.ndarray
    step_count: int = 0
    # rows of (epoch, train_objective, test_ratio); epoch 0 is the initial protocol
    history: list[tuple[int, float, float]] = field(default_factory=list)

    @classmethod
    def fresh(cls, protocol: Protocol) -> "TrainRecord":
        n = 2 * protocol.steps
        return cls(protocol, np.zeros(n), np.zeros(n))


@dataclass
class EvalMetrics:
    ratios: np.ndarray
    mean_ratio: float


def init_protocol(P: int, config: TrainConfig) -> Protocol:
    """Draw all ``2P`` angles i.i.d. from ``Normal(init_mean, init_std**2)``."""
    if P < 1:
        raise ValidationError(f"P must be >= 1, got {P}")
    rng = np.random.default_rng(config.seed)
    params = rng.normal(config.init_mean, config.init_std, size=2 * P)
    return Protocol.from_flat(params)


def adam_step(record: TrainRecord, grad: np.ndarray, config: TrainConfig) -> TrainRecord:
    """One bias-corrected Adam update in the ascent direction."""
    grad = np.asarray(grad, dtype=np.float64)
    params = record.protocol.flatten()
    if grad.shape != params.shape:
        raise ValidationError(f"gradient length {grad.size} != parameter count {params.size}")
    b1, b2 = config.adam_beta1, config.adam_beta2
    t = record.step_count + 1
    m = b1 * record.first_moment + (1 - b1) * grad
    v = b2 * record.second_moment + (1 - b2) * grad**2
    m_hat = m / (1 - b1**t)
    v_hat = v / (1 - b2**t)
    params = params + config.step_size * m_hat / (np.sqrt(v_hat) + config.adam_eps)
    return TrainRecord(Protocol.from_flat(params), m, v, t, list(record.history))


def approximation_ratios(values: Sequence[float], optima: Sequence[float]) -> np.ndarray:
    """``value / optimum`` per graph, with 0/0 taken as 1."""
    values = np.asarray(values, dtype=np.float64)
    optima = np.asarray(optima, dtype=np.float64)
    if values.shape != optima.shape:
        raise ValidationError(f"{values.size} values but {optima.size} optima")
    ratios = np.ones_like(values)
    nz = optima != 0
    ratios[nz] = values[nz] / optima[nz]
    return ratios


def evaluate(test_set: Sequence[Graph], protocol: Protocol, optima: Sequence[float]) -> EvalMetrics:
    if len(test_set) != len(optima):
        raise ValidationError(f"{len(test_set)} graphs but {len(optima)} optima")
    ratios = approximation_ratios(expected_cuts(test_set, protocol), optima)
    return EvalMetrics(ratios, float(np.mean(ratios)))


def _objective(graphs: Sequence[Graph], protocol: Protocol) -> float:
    return float(np.mean(expected_cuts(graphs, protocol)))


class NumericalError(RuntimeError):
    """Training produced a non-finite objective or gradient."""


def train(
    train_set: Sequence[Graph],
    config: TrainConfig,
    test_set: Sequence[Graph] | None = None,
    test_optima: Sequence[float] | None = None,
    record: TrainRecord | None = None,
) -> TrainRecord:
    """Stochastic gradient ascent on the mean expected cut of ``train_set``.

    Each epoch shuffles the training set, walks it in minibatches and applies
    one Adam step per minibatch. When ``test_set`` and ``test_optima`` are
    given, each history row also carries the mean test approximation ratio
    (NaN otherwise). Angles are never wrapped or clipped.
    """
    if not train_set:
        raise ValidationError("train_set is empty")
    if record is None:
        record = TrainRecord.fresh(init_protocol(config.steps_P, config))
    rng = np.random.default_rng([config.seed, 1])

    def test_ratio(protocol):
        if test_set is None or test_optima is None:
            return math.nan
        return evaluate(test_set, protocol, test_optima).mean_ratio

    objective = _objective(train_set, record.protocol)
    if not record.history:
        record.history.append((0, objective, test_ratio(record.protocol)))
    best, stale = objective, 0
    start = record.history[-1][0]
    for epoch in range(start + 1, start + config.epochs + 1):
        order = rng.permutation(len(train_set))
        for lo in range(0, len(order), config.minibatch):
            batch = [train_set[k] for k in order[lo : lo + config.minibatch]]
            _, grad = batch_gradient(batch, record.protocol)
            if not np.all(np.isfinite(grad)):
                raise NumericalError(f"non-finite gradient in epoch {epoch}")
            record = adam_step(record, grad, config)
        objective = _objective(train_set, record.protocol)
        if not math.isfinite(objective):
            raise NumericalError(f"non-finite objective after epoch {epoch}")
        record.history.append((epoch, objective, test_ratio(record.protocol)))
        log.debug("epoch %d objective %.6f", epoch, objective)
        if objective > best + config.min_delta:
            best, stale = objective, 0
        else:
            stale += 1
            if config.patience and stale >= config.patience:
                log.info("early stop after epoch %d", epoch)
                break
    return record


def save_checkpoint(path, record: TrainRecord, config: TrainConfig, extra: dict | None = None) -> None:
    """Write a JSON checkpoint; floats are stored with round-trip precision."""
    payload = {
        "format": "qaoa-maxcut-checkpoint/1",
        "config": asdict(config),
        "betas": record.protocol.betas.tolist(),
        "gammas": record.protocol.gammas.tolist(),
        "first_moment": record.first_moment.tolist(),
        "second_moment": record.second_moment.tolist(),
        "step_count": record.step_count,
        "history": [[int(e), float(o), float(r)] for e, o, r in record.history],
    }
    if extra:
        payload["meta"] = extra
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def load_checkpoint(path) -> tuple[TrainRecord, TrainConfig]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        config = TrainConfig(**payload["config"])
        record = TrainRecord(
            protocol=Protocol(payload["betas"], payload["gammas"]),
            first_moment=np.array(payload["first_moment"], dtype=np.float64),
            second_moment=np.array(payload["second_moment"], dtype=np.float64),
            step_count=int(payload["step_count"]),
            history=[(int(e), float(o), float(r)) for e, o, r in payload["history"]],
        )
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid checkpoint JSON: {exc.msg}", exc.lineno) from None
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"invalid checkpoint {path}: {exc}") from None
    n = 2 * record.protocol.steps
    if record.first_moment.shape != (n,) or record.second_moment.shape != (n,):
        raise ParseError(f"moment arrays in {path} do not match {n} parameters")
    return record, config
