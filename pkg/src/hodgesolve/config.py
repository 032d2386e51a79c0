"""Run configuration. Keys are addressed as dotted paths, e.g. ``solver.max_iters``."""
import copy
import json

DEFAULTS = {
    "solver": {
        "max_iters": 5000,        # cap on PCG iterations and Chebyshev degree
        "tol_map": 1.0,           # extra tightening factor on every mapped tolerance
        "deterministic": True,
        "interval": "auto",       # certified | estimated | auto
        "kappa_safety": 2.0,
        "beta0_fast_path": False,
    },
    "harmonic": {
        "eps_prime": None,        # practical mode; None picks it a posteriori
        "fallback_to_practical": True,
    },
    "boundary": {
        "delta": None,            # practical mode; None derives it from norm bounds
        "c": 16.0,
    },
    "bases": {
        "alpha": 1.0,
    },
    "oracle": {
        "dense_cap": 2000,
    },
}


class Config:
    def __init__(self, overrides=None):
        self.data = copy.deepcopy(DEFAULTS)
        for k, v in (overrides or {}).items():
            if isinstance(v, dict):
                for kk, vv in v.items():
                    self.set(f"{k}.{kk}", vv)
            else:
                self.set(k, v)

    def get(self, key, default=None):
        sec, _, name = key.partition(".")
        return self.data.get(sec, {}).get(name, default)

    def set(self, key, value):
        sec, _, name = key.partition(".")
        if sec not in self.data or name not in self.data[sec]:
            raise KeyError(f"unknown config key {key!r}")
        self.data[sec][name] = value

    def __getitem__(self, key):
        return self.get(key)

    def to_dict(self):
        return copy.deepcopy(self.data)

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls(json.load(f))


def as_config(cfg):
    if cfg is None:
        return Config()
    if isinstance(cfg, Config):
        return cfg
    return Config(cfg)
