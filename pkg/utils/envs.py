import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Optional

REPO_ROOT = Path(__file__).resolve().parents[1]

FFTLIBS = ("scipy", "numpy", "naive")

# env name -> Envs field, value type, default
_ENV_SPECS: Dict[str, Dict[str, Any]] = {
    "DEALIAS_TUNE_CACHE": {"field": "tune_cache", "type": "path", "default": REPO_ROOT / "out" / "tune_cache.csv"},
    "DEALIAS_FORCE_RETUNE": {"field": "force_retune", "type": "bool", "default": False},
    "DEALIAS_TUNE_BUDGET": {"field": "tune_budget", "type": "float", "default": 2.0},
    "DEALIAS_FFTLIB": {"field": "fftlib", "type": "str", "default": "scipy"},
    "DEALIAS_LOG_DIR": {"field": "log_dir", "type": "path", "default": REPO_ROOT / "out"},
    "RUN_ID": {"field": "run_id", "type": "str", "default": None},
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}

def _parse_bool(raw: str) -> bool:
    word = raw.strip().lower()
    if word not in _TRUE | _FALSE:
        raise ValueError(f"Invalid boolean value: {raw}")
    return word in _TRUE

_PARSERS: Dict[str, Callable[[str], Any]] = {
    "bool": _parse_bool,
    "float": lambda raw: float(raw.strip()),
    "path": lambda raw: Path(raw.strip()).expanduser(),
    "str": lambda raw: raw.strip(),
}

@dataclass(frozen=True)
class Envs:
    tune_cache: Path
    force_retune: bool
    tune_budget: float
    fftlib: str
    log_dir: Path
    run_id: Optional[str]

    def check(self) -> "Envs":
        if self.tune_budget <= 0:
            raise ValueError(f"DEALIAS_TUNE_BUDGET must be positive, got {self.tune_budget}")
        if self.fftlib not in FFTLIBS:
            raise ValueError(f"DEALIAS_FFTLIB must be one of {FFTLIBS}, got '{self.fftlib}'")
        return self

def _read(env_name: str, spec: Dict[str, Any], required: bool) -> Any:
    raw = os.getenv(env_name)
    if raw is None or not raw.strip():
        if required:
            raise ValueError(f"Missing required environment variable: {env_name}")
        return spec["default"]
    try:
        return _PARSERS[spec["type"]](raw)
    except (KeyError, ValueError) as e:
        raise ValueError(f"Invalid value for {env_name}: {raw} (expected {spec['type']})") from e

def get_envs(*, required_envs: Iterable[str] = (), log_envs: bool = False) -> Envs:
    required_set = set(required_envs)
    values = {spec["field"]: _read(name, spec, name in required_set) for name, spec in _ENV_SPECS.items()}
    envs = Envs(**values).check()
    if log_envs:
        print(" ".join(f"{name}={values[spec['field']]}" for name, spec in _ENV_SPECS.items()))
    return envs
