"""JSON configuration shared by the command line tools.

The file path comes from the caller or from the ENERGYFWD_CONFIG
environment variable; every field has a default.
"""

import json
import os
from dataclasses import asdict, dataclass, field, fields

from .covariance import BlockCov, CovOp, SigmaSpec
from .errors import ConfigurationError, SchemaError

ENV_VAR = "ENERGYFWD_CONFIG"


@dataclass
class Config:
    alpha_tilde: float = 1.0
    rank: int = 16
    tol_h: float = 1e-8
    time_nodes: int = 32
    hermite_nodes: int = 64
    seed: int = 0
    n_paths: int = 100_000
    n_steps: int = 20
    chunk_size: int = 8192
    workers: int = 1
    r: float = 0.0
    smoothness: float = 0.0
    fill: int = 4
    damping: float = None
    n_fft: int = 4096
    ig_delta: float = None
    ig_gamma: float = None
    sigma: dict = None
    sigma2: dict = None
    cov: object = None
    block: object = None
    base_dir: str = field(default=".", repr=False)

    def _load(self, value, what):
        if value is None:
            return None
        if isinstance(value, str):
            path = value if os.path.isabs(value) else os.path.join(self.base_dir, value)
            try:
                with open(path) as fh:
                    return json.load(fh)
            except OSError as exc:
                raise ConfigurationError(f"cannot read {what} file {path}: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{what} file {path} is not valid JSON: {exc}") from exc
        return value

    def covariance(self):
        """CovOp truncated to ``rank``, or None."""
        d = self._load(self.cov, "covariance")
        if d is None:
            return None
        try:
            return CovOp.from_dict(d).truncate(self.rank)
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"covariance JSON lacks field {exc}") from exc

    def block_cov(self):
        d = self._load(self.block, "block")
        if d is None:
            return None
        try:
            return BlockCov.from_dict(d)
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"block JSON lacks field {exc}") from exc

    def sigma_spec(self, second=False):
        d = self.sigma2 if second else self.sigma
        return SigmaSpec.identity() if d is None else SigmaSpec.from_dict(self._load(d, "sigma"))

    def to_dict(self):
        d = asdict(self)
        d.pop("base_dir")
        return d


def load_config(path=None, overrides=None):
    """Read a config file (argument, then ENERGYFWD_CONFIG, then defaults).

    Raises
    ------
    ConfigurationError
        For unknown keys or an unreadable file.
    """
    path = path or os.environ.get(ENV_VAR)
    data = {}
    base = "."
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise SchemaError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise SchemaError("config must be a JSON object")
        base = os.path.dirname(os.path.abspath(path))
    known = {f.name for f in fields(Config)} - {"base_dir"}
    unknown = set(data) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys {sorted(unknown)}")
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return Config(**data, base_dir=base)
