"""Experiment configuration: JSON parsing, validation and serialization."""

import json
from dataclasses import dataclass, field

from .colors import color_from_json, color_to_json
from .errors import ConfigError
from .kernels import (
    InitialConfig,
    StableWalk,
    has_finite_support,
    kernel_from_json,
    kernel_to_json,
    validate_kernel,
)

METHODS = ("direct", "branching", "marginal", "exact")


@dataclass
class ExperimentConfig:
    kernel: object
    init: InitialConfig
    n: int
    replications: int = 1
    seed: int = 0
    method: str = "direct"
    suite: str = None
    output_dir: str = "."
    threads: int = 1

    def validate(self):
        try:
            validate_kernel(self.kernel)
        except Exception as exc:
            raise ConfigError("kernel", str(exc)) from exc
        if self.method not in METHODS:
            raise ConfigError("method", f"must be one of {METHODS}, got {self.method!r}")
        if self.n < 0:
            raise ConfigError("n", "must be non-negative")
        if self.replications < 1:
            raise ConfigError("replications", "must be at least 1")
        if self.threads < 1:
            raise ConfigError("threads", "must be at least 1")
        if self.method == "exact" and self.n > 6:
            raise ConfigError("n", "method=exact requires n <= 6")
        if self.method == "direct" and not has_finite_support(self.kernel):
            raise ConfigError(
                "method",
                "method=direct requires finite-support rows (InfiniteSupport); "
                "use branching or marginal",
            )


def init_to_json(init: InitialConfig):
    return {"atoms": [{"color": color_to_json(c), "weight": w} for c, w in init.atoms]}


def init_from_json(obj) -> InitialConfig:
    try:
        return InitialConfig(
            [(color_from_json(a["color"]), float(a["weight"])) for a in obj["atoms"]]
        )
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError("init", str(exc)) from exc


def config_to_json(cfg: ExperimentConfig) -> dict:
    return {
        "kernel": kernel_to_json(cfg.kernel),
        "init": init_to_json(cfg.init),
        "n": cfg.n,
        "replications": cfg.replications,
        "seed": cfg.seed,
        "method": cfg.method,
        "suite": cfg.suite,
        "output_dir": cfg.output_dir,
        "threads": cfg.threads,
    }


def config_from_json(obj: dict) -> ExperimentConfig:
    for key in ("kernel", "init", "n"):
        if key not in obj:
            raise ConfigError(key, "missing required field")
    try:
        kernel = kernel_from_json(obj["kernel"])
    except Exception as exc:
        raise ConfigError("kernel", str(exc)) from exc
    cfg = ExperimentConfig(
        kernel=kernel,
        init=init_from_json(obj["init"]),
        n=int(obj["n"]),
        replications=int(obj.get("replications", 1)),
        seed=int(obj.get("seed", 0)),
        method=str(obj.get("method", "direct")),
        suite=obj.get("suite"),
        output_dir=str(obj.get("output_dir", ".")),
        threads=int(obj.get("threads", 1)),
    )
    cfg.validate()
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path) as f:
        return config_from_json(json.load(f))
