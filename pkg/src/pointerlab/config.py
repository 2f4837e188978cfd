"""Lab-wide constants (flat key = value file) and seed derivation."""
from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass, fields

from .classical import DEFAULT_ALPHA

# worst-case mean subtree size over quarter-size marked sets, divided by
# log2 m, maximised over m = 2..4096 (see grid.fit_c0)
DEFAULT_C0 = 3.598


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class LabConfig:
    alpha_sample: float = DEFAULT_ALPHA
    c_grover: float = 1.0
    c_exact: float = 1.0
    c_count: float = 1.0
    c_amplify: float = 1.0
    eps: float = 0.05
    C0: float = DEFAULT_C0
    inject_errors: bool = False
    max_reps: int = 1

    def __post_init__(self):
        if self.alpha_sample <= 0:
            raise ConfigError("alpha_sample must be positive")
        for name in ("c_grover", "c_exact", "c_count", "c_amplify", "C0"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if not 0 < self.eps < 1:
            raise ConfigError("eps must lie in (0, 1)")
        if self.max_reps < 1:
            raise ConfigError("max_reps must be >= 1")

    def replace(self, **kw) -> "LabConfig":
        return LabConfig(**{**asdict(self), **kw})


def _parse_value(kind, raw: str):
    if kind is bool or kind == "bool":
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"not a boolean: {raw!r}")
    if kind is int or kind == "int":
        return int(raw)
    return float(raw)


def loads_config(text: str) -> LabConfig:
    kinds = {f.name: f.type for f in fields(LabConfig)}
    vals = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in kinds:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            vals[key] = _parse_value(kinds[key], raw)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {raw!r}") from exc
    return LabConfig(**vals)


def dumps_config(cfg: LabConfig) -> str:
    out = []
    for k, v in asdict(cfg).items():
        out.append(f"{k} = {str(v).lower() if isinstance(v, bool) else repr(v)}")
    return "\n".join(out) + "\n"


def load_config(path) -> LabConfig:
    with open(path) as fh:
        return loads_config(fh.read())


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from any mix of ints and strings."""
    h = hashlib.blake2b("\x1f".join(map(str, parts)).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big") >> 1
