"""Experiment specifications and their TOML serialization."""

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from ..surrogate import SurrogateKind

GREEDY_METHODS = ("voronoi", "pam")
COMPOSED_SUFFIX = "+voronoi"


class ConfigError(ValueError):
    """Invalid experiment specification."""


@dataclass
class ExperimentSpec:
    """A full sweep: the cartesian product of inputs, methods, update rules,
    kappa values (clique only), and seed indices.

    Clique budgets are ``budget_multiplier * |V|``; k-medoids sampler runs
    use the fixed ``budget`` cap and, when ``convergence`` is on, stop early
    once two moving averages of the objective meet (``convergence_b = 0``
    means the ``max(m*k, 1000)`` sizing rule).
    """

    problem: str
    inputs: list = field(default_factory=list)
    samplers: list = field(default_factory=list)
    rules: list = field(default_factory=lambda: ["adagrad"])
    kappas: list = field(default_factory=lambda: [0.0])
    seeds: list = field(default_factory=lambda: [0])
    out: str = "results.jsonl"
    master_seed: int = 0
    window: int = 100
    lr: float = 0.01
    exp3_gamma: float = 0.1
    exp3_lr: float = 1.0
    budget_multiplier: int = 100
    budget: int = 20000
    k: int = 10
    input_kind: str = "points"
    convergence: bool = True
    convergence_b: int = 0

    def __post_init__(self):
        if self.problem not in ("clique", "kmedoids"):
            raise ConfigError(f"unknown problem {self.problem!r}")
        if not self.inputs:
            raise ConfigError("no inputs given")
        if not self.samplers:
            raise ConfigError("no samplers/methods given")
        if isinstance(self.seeds, int):
            self.seeds = list(range(self.seeds))
        if not self.seeds:
            raise ConfigError("no seeds given")
        if self.problem == "clique":
            if not self.kappas:
                raise ConfigError("clique sweeps need at least one kappa")
            for kappa in self.kappas:
                if not 0.0 <= kappa <= 1.0:
                    raise ConfigError(f"kappa {kappa} outside [0, 1]")
            if self.budget_multiplier < 1:
                raise ConfigError("budget_multiplier must be >= 1")
        else:
            if self.k < 1:
                raise ConfigError("k must be >= 1")
            if self.budget < 1:
                raise ConfigError("budget must be >= 1")
            if self.input_kind not in ("points", "distances"):
                raise ConfigError(f"unknown input_kind {self.input_kind!r}")
        if not self.rules:
            raise ConfigError("no update rules given")
        for rule in self.rules:
            if rule not in ("sga", "adagrad", "adam"):
                raise ConfigError(f"unknown update rule {rule!r}")
        for sampler in self.samplers:
            self._check_method(sampler)
        if self.window < 1:
            raise ConfigError("window must be >= 1")
        if self.lr <= 0:
            raise ConfigError("lr must be positive")

    def _check_method(self, name):
        if self.problem == "clique":
            if name == "exp3":
                return
            try:
                SurrogateKind.from_string(name)
            except ValueError as exc:
                raise ConfigError(f"bad sampler {name!r}: {exc}") from None
        else:
            if name in GREEDY_METHODS:
                return
            base = name[: -len(COMPOSED_SUFFIX)] if name.endswith(COMPOSED_SUFFIX) else name
            try:
                SurrogateKind.from_string(base)
            except ValueError as exc:
                raise ConfigError(f"bad method {name!r}: {exc}") from None

    @classmethod
    def from_toml(cls, path):
        try:
            with open(path, "rb") as handle:
                data = tomllib.load(handle)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"bad TOML in {path}: {exc}") from None
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "problem" not in data:
            raise ConfigError("config must set 'problem'")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def resolve_inputs(self):
        """Expand directories into sorted input files (clq or csv)."""
        suffix = ".clq" if self.problem == "clique" else ".csv"
        files = []
        for entry in self.inputs:
            path = Path(entry)
            if path.is_dir():
                found = sorted(path.glob(f"*{suffix}"))
                if not found:
                    raise ConfigError(f"no {suffix} files under {path}")
                files.extend(found)
            elif path.exists():
                files.append(path)
            else:
                raise ConfigError(f"input {path} does not exist")
        return files

    def config_hash(self):
        payload = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(payload.encode()).hexdigest()[:12]

    def cells(self):
        """Enumerate sweep cells in canonical order.

        Greedy k-medoids methods carry no update rule and appear once per
        (input, seed); sampler methods cross with the rule list.
        """
        cells = []
        for path in self.resolve_inputs():
            input_id = Path(path).stem
            for sampler in self.samplers:
                greedy = self.problem == "kmedoids" and sampler in GREEDY_METHODS
                rule_choices = [None] if greedy else self.rules
                kappa_choices = self.kappas if self.problem == "clique" else [None]
                for rule in rule_choices:
                    for kappa in kappa_choices:
                        for seed in self.seeds:
                            cells.append(
                                Cell(
                                    problem=self.problem,
                                    input_path=str(path),
                                    input_id=input_id,
                                    sampler=sampler,
                                    rule=rule,
                                    kappa=kappa,
                                    seed=seed,
                                )
                            )
        return cells


@dataclass(frozen=True)
class Cell:
    problem: str
    input_path: str
    input_id: str
    sampler: str
    rule: str | None
    kappa: float | None
    seed: int

    @property
    def cell_id(self):
        kappa = "-" if self.kappa is None else f"{self.kappa:g}"
        rule = self.rule or "-"
        return f"{self.problem}|{self.input_id}|{self.sampler}|{rule}|{kappa}|{self.seed}"
