"""Resolved configuration of one command-line run."""
from __future__ import annotations
from settings import *
from errors import ConfigError
from model_space import ModelPair, DataSummary
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import List, Optional


def read_data_file(path) -> List[float]:
    """One real per line; blank lines and everything after '#' are ignored."""
    path = Path(path)
    try:
        lines = path.read_text(encoding='utf-8').splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read data file {str(path)!r}: {exc.strerror or exc}") from exc
    values = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split('#', 1)[0].strip()
        if not text:
            continue
        try:
            values.append(float(text))
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: expected one number per line, got {text!r}") from None
    if not values:
        raise ConfigError(f"data file {str(path)!r} contains no observations")
    return values


@dataclass
class RunConfig:
    point_null: bool = False
    g0: Optional[float] = None
    theta0: float = DEFAULT_THETA0
    g1: float = DEFAULT_G1
    prior_prob_m0: float = DEFAULT_PRIOR_PROB_M0
    n: Optional[float] = None
    z: Optional[float] = None
    ybar: Optional[float] = None
    data_file: Optional[str] = None
    alpha: float = DEFAULT_ALPHA
    two_sided: bool = False
    seed: int = DEFAULT_SEED
    reps: int = DEFAULT_REPS
    format: str = 'csv'
    out: Optional[str] = None

    def validate(self, require_data: bool = True) -> 'RunConfig':
        if self.point_null and self.g0 is not None:
            raise ConfigError("--g0 and --point-null are mutually exclusive")
        if not self.point_null and self.g0 is None:
            self.g0 = DEFAULT_G0
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"--alpha must lie in (0, 1), got {self.alpha!r}")
        if self.format not in ('csv', 'json'):
            raise ConfigError(f"--format must be csv or json, got {self.format!r}")
        forms = [name for name, value in (('--z', self.z), ('--ybar', self.ybar), ('--data', self.data_file))
                 if value is not None]
        if len(forms) > 1:
            raise ConfigError(f"give exactly one of --z, --ybar, --data (got {', '.join(forms)})")
        if require_data:
            if not forms:
                raise ConfigError("no data given: use --n with --z or --ybar, or --data FILE")
            if self.data_file is None and self.n is None:
                raise ConfigError(f"{forms[0]} needs --n")
        # builds the model once so bad variances or prior probabilities fail here
        self.model_pair()
        if require_data:
            self.data_summary()
        return self

    def model_pair(self) -> ModelPair:
        if self.point_null:
            return ModelPair.point_null(self.theta0, self.g1, self.prior_prob_m0)
        return ModelPair.mixture(self.g0 if self.g0 is not None else DEFAULT_G0, self.g1, self.prior_prob_m0)

    def data_summary(self) -> DataSummary:
        if self.data_file is not None:
            summary = DataSummary.from_observations(read_data_file(self.data_file))
            if self.n is not None and self.n != summary.n:
                raise ConfigError(f"--n {self.n:g} disagrees with the {summary.n:g} values in {self.data_file}")
            return summary
        if self.n is None:
            raise ConfigError("no sample size given (--n)")
        if self.ybar is not None:
            return DataSummary.from_ybar(self.n, self.ybar)
        if self.z is None:
            raise ConfigError("no data given: use --z, --ybar or --data")
        return DataSummary(self.n, self.z)

    def to_dict(self) -> dict:
        return asdict(self)
