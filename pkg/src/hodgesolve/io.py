"""Reading and writing ``.scx`` complexes and JSON chain files."""
import json

import numpy as np

from .complex import Chain, build_complex, to_raw
from .errors import IOFailure, ScopeMismatch


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IOFailure(f"cannot read {path}: {exc}") from None


def _dump(obj, path):
    try:
        with open(path, "w") as fh:
            json.dump(obj, fh, indent=1, default=_default)
            fh.write("\n")
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}") from None


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"{type(o).__name__} is not JSON serializable")


def dumps(obj):
    return json.dumps(obj, indent=1, default=_default)


def read_complex(path):
    return build_complex(_load(path))


def write_complex(cx, path):
    _dump(to_raw(cx), path)


def read_chain(path, cx=None):
    raw = _load(path)
    try:
        ch = Chain(int(raw["dim"]), np.asarray(raw["values"], dtype=float), raw.get("scope", "K"))
    except (KeyError, TypeError, ValueError) as exc:
        raise IOFailure(f"malformed chain file {path}: {exc}") from None
    if cx is not None and len(ch.values) != cx.count(ch.dim, ch.scope):
        raise ScopeMismatch(f"chain has {len(ch.values)} values but scope {ch.scope} has "
                            f"{cx.count(ch.dim, ch.scope)} {ch.dim}-simplices")
    return ch


def write_chain(chain, path):
    _dump({"dim": chain.dim, "scope": chain.scope, "values": np.asarray(chain.values).tolist()}, path)


def write_json(obj, path):
    _dump(obj, path)
