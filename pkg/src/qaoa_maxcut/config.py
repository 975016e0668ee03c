"""Experiment configuration read from an INI-style file.

Example::

    [experiment]
    node_sizes = 6, 8, 10, 12
    qaoa_steps = 1, 2, 3, 4, 5, 6, 7, 8
    edge_prob = 0.5
    train_size = 100
    test_size = 100
    gw_rounds = 1000
    seed = 0
    output_dir = runs/default

    [trainer]
    epochs = 50
    step_size = 0.01

Every ``[trainer]`` key is a :class:`~qaoa_maxcut.trainer.TrainConfig` field;
``steps_P`` and ``seed`` are filled in per experiment cell. Relative
``output_dir`` values resolve against the config file's directory.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ParseError, ValidationError
from .trainer import TrainConfig

DEFAULT_NODE_SIZES = (6, 8, 10, 12)
DEFAULT_STEPS = tuple(range(1, 9))


@dataclass
class ExperimentConfig:
    node_sizes: list[int] = field(default_factory=lambda: list(DEFAULT_NODE_SIZES))
    qaoa_steps: list[int] = field(default_factory=lambda: list(DEFAULT_STEPS))
    edge_prob: float = 0.5
    train_size: int = 100
    test_size: int = 100
    trainer: TrainConfig = field(default_factory=TrainConfig)
    gw_rounds: int = 1000
    output_dir: Path = Path("runs/default")
    seed: int = 0

    def __post_init__(self):
        self.output_dir = Path(self.output_dir)
        if any(n < 1 for n in self.node_sizes):
            raise ValidationError(f"node sizes must be >= 1, got {self.node_sizes}")
        if any(p < 1 for p in self.qaoa_steps):
            raise ValidationError(f"QAOA steps must be >= 1, got {self.qaoa_steps}")
        if not 0.0 <= self.edge_prob <= 1.0:
            raise ValidationError(f"edge_prob must be in [0, 1], got {self.edge_prob}")
        if self.train_size < 1 or self.test_size < 1:
            raise ValidationError("train_size and test_size must be >= 1")
        if self.gw_rounds < 1:
            raise ValidationError(f"gw_rounds must be >= 1, got {self.gw_rounds}")


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ParseError(f"{path}: {exc}") from None

    kwargs = {}
    try:
        if parser.has_section("experiment"):
            sec = parser["experiment"]
            for key in sec:
                if key in ("node_sizes", "qaoa_steps"):
                    kwargs[key] = _int_list(sec[key])
                elif key in ("train_size", "test_size", "gw_rounds", "seed"):
                    kwargs[key] = sec.getint(key)
                elif key == "edge_prob":
                    kwargs[key] = sec.getfloat(key)
                elif key == "output_dir":
                    out = Path(sec[key])
                    kwargs[key] = out if out.is_absolute() else path.parent / out
                else:
                    raise ParseError(f"{path}: unknown [experiment] key {key!r}")
        trainer_kwargs = {}
        if parser.has_section("trainer"):
            types = {f.name: f.type for f in fields(TrainConfig)}
            sec = parser["trainer"]
            for key in sec:
                if key not in types:
                    raise ParseError(f"{path}: unknown [trainer] key {key!r}")
                trainer_kwargs[key] = sec.getint(key) if types[key] in (int, "int") else sec.getfloat(key)
        kwargs["trainer"] = TrainConfig(**trainer_kwargs)
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{path}: {exc}") from None


def dump_config(config: ExperimentConfig) -> str:
    lines = [
        "[experiment]",
        "node_sizes = " + ", ".join(map(str, config.node_sizes)),
        "qaoa_steps = " + ", ".join(map(str, config.qaoa_steps)),
        f"edge_prob = {config.edge_prob!r}",
        f"train_size = {config.train_size}",
        f"test_size = {config.test_size}",
        f"gw_rounds = {config.gw_rounds}",
        f"seed = {config.seed}",
        f"output_dir = {config.output_dir}",
        "",
        "[trainer]",
    ]
    for f in fields(TrainConfig):
        if f.name not in ("steps_P", "seed"):
            lines.append(f"{f.name} = {getattr(config.trainer, f.name)!r}")
    return "\n".join(lines) + "\n"
