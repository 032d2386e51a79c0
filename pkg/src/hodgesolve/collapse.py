"""Collapsing sequences: validation, normalization and a greedy collapser."""
from dataclasses import dataclass

import numpy as np

from .errors import CannotReorder, ValidationError

TAGS = {3: "tet-tri", 2: "tri-edge", 1: "edge-vertex"}


class CollapsingSequence:
    """Ordered collapse pairs (sigma, tau) with dim(tau) = dim(sigma) - 1.

    Stored as an (m, 3) int array of rows ``(dim_sigma, sigma, tau)``.
    """

    def __init__(self, pairs):
        a = np.asarray(pairs, dtype=np.int64).reshape(-1, 3) if len(pairs) else np.zeros((0, 3), np.int64)
        self.pairs = a

    @classmethod
    def from_refs(cls, refs):
        """From the file form ``[[[d, i], [d-1, j]], ...]``."""
        rows = []
        for k, pr in enumerate(refs or []):
            try:
                (ds, i), (dt, j) = pr
            except (TypeError, ValueError):
                raise ValidationError(f"collapse pair {k} is malformed") from None
            if dt != ds - 1:
                raise ValidationError(f"collapse pair {k} does not drop dimension by one")
            rows.append((ds, i, j))
        return cls(rows)

    def to_refs(self):
        return [[[int(d), int(i)], [int(d) - 1, int(j)]] for d, i, j in self.pairs]

    def __len__(self):
        return len(self.pairs)

    def __eq__(self, other):
        return isinstance(other, CollapsingSequence) and np.array_equal(self.pairs, other.pairs)

    @property
    def tags(self):
        return [TAGS.get(int(d), "?") for d in self.pairs[:, 0]]

    def of_dim(self, d):
        p = self.pairs[self.pairs[:, 0] == d]
        return p[:, 1], p[:, 2]

    def is_normalized(self):
        return bool(np.all(np.diff(-self.pairs[:, 0]) >= 0))


@dataclass
class ValidationReport:
    ok: bool
    index: int = -1
    reason: str = ""

    def __bool__(self):
        return self.ok


def _coface_counts(cx, present):
    cnt = []
    for d in range(3):
        f = cx.faces[d + 1][present[d + 1]]
        cnt.append(np.bincount(f.ravel(), minlength=cx.count(d)).tolist())
    cnt.append([0] * cx.count(3))
    return cnt


def validate(cx, seq):
    """Simulate the removals; report the first pair that is not a free-face collapse."""
    present = [np.ones(cx.count(d), bool) for d in range(4)]
    cnt = _coface_counts(cx, present)
    pres = [p.tolist() for p in present]
    faces = [None] + [cx.faces[d].tolist() for d in (1, 2, 3)]
    for k, (d, s, t) in enumerate(seq.pairs.tolist()):
        if d not in (1, 2, 3) or not (0 <= s < cx.count(d)) or not (0 <= t < cx.count(d - 1)):
            return ValidationReport(False, k, "reference out of range")
        if not pres[d][s] or not pres[d - 1][t]:
            return ValidationReport(False, k, "simplex already removed")
        if t not in faces[d][s]:
            return ValidationReport(False, k, "tau is not a face of sigma")
        if cnt[d][s] != 0:
            return ValidationReport(False, k, "sigma is not maximal")
        if cnt[d - 1][t] != 1:
            return ValidationReport(False, k, "tau is not a free face")
        pres[d][s] = False
        pres[d - 1][t] = False
        for f in faces[d][s]:
            cnt[d - 1][f] -= 1
        if d >= 2:
            for g in faces[d - 1][t]:
                cnt[d - 2][g] -= 1
    left = [sum(p) for p in pres]
    if left[0] != 1 or any(left[1:]):
        return ValidationReport(False, len(seq), f"sequence leaves {left} simplices, not a single vertex")
    return ValidationReport(True)


def normalize(cx, seq, check=True):
    """Stable partition tet-tri, tri-edge, edge-vertex; always valid for a valid input."""
    if seq.is_normalized():
        return seq
    order = np.argsort(-seq.pairs[:, 0], kind="stable")
    out = CollapsingSequence(seq.pairs[order])
    if check and not validate(cx, out):
        out = _repair(cx, seq)
    return out


def _repair(cx, seq):
    # greedy re-simulation: at every step take the earliest pending pair of the
    # highest dimension that is currently a valid collapse
    pending = [tuple(r) for r in seq.pairs.tolist()]
    present = [np.ones(cx.count(d), bool) for d in range(4)]
    cnt = _coface_counts(cx, present)
    faces = [None] + [cx.faces[d].tolist() for d in (1, 2, 3)]
    out = []
    while pending:
        pending.sort(key=lambda r: -r[0])
        for k, (d, s, t) in enumerate(pending):
            if present[d][s] and present[d - 1][t] and cnt[d][s] == 0 and cnt[d - 1][t] == 1:
                break
        else:
            raise CannotReorder("no valid pair available during reordering")
        pending.pop(k)
        out.append((d, s, t))
        present[d][s] = present[d - 1][t] = False
        for f in faces[d][s]:
            cnt[d - 1][f] -= 1
        if d >= 2:
            for g in faces[d - 1][t]:
                cnt[d - 2][g] -= 1
    res = CollapsingSequence(out)
    if not res.is_normalized() or not validate(cx, res):
        raise CannotReorder("reordered sequence is not a valid normalized collapse")
    return res


def _cofaces(cx, d, present):
    """CSR-style coface lists of the (d-1)-simplices among present d-simplices."""
    n = cx.count(d - 1)
    idx = np.flatnonzero(present[d])
    f = cx.faces[d][idx]
    rows = f.ravel()
    cols = np.repeat(idx, d + 1)
    order = np.argsort(rows, kind="stable")
    ptr = np.zeros(n + 1, np.int64)
    np.add.at(ptr, rows + 1, 1)
    return np.cumsum(ptr).tolist(), cols[order].tolist()


class _Pool:
    """Adapter so ``step`` can append (d, t) entries to a shared pool."""

    def __init__(self, pool, d):
        self.pool, self.d = pool, d

    def append(self, t):
        self.pool.append((self.d, t))


def greedy_collapse(cx, present=None, dims=(3, 2, 1), rng=None, interleave=False):
    """Collapse greedily as far as possible.

    ``present`` is a list of boolean masks (defaults to all of X). By default one
    dimension is processed at a time, highest first; lower dimensional removals
    never free a higher dimensional pair, so this reaches a maximal collapse.
    With ``interleave`` a uniformly random free pair of any dimension is taken
    at every step, which gets stuck far less often on irregular balls. Returns the pairs and
    the masks of the remaining core.
    """
    if present is None:
        present = [np.ones(cx.count(d), bool) for d in range(4)]
    present = [np.asarray(p, bool) for p in present]
    pres = [p.tolist() for p in present]
    cnt = []
    for d in range(3):
        f = cx.faces[d + 1][present[d + 1]]
        cnt.append(np.bincount(f.ravel(), minlength=cx.count(d)).tolist())
    faces = [None] + [cx.faces[d].tolist() for d in (1, 2, 3)]
    cof = {d: _cofaces(cx, d, present) for d in dims}
    out = []

    def seed(d):
        st = [t for t in range(cx.count(d - 1)) if pres[d - 1][t] and cnt[d - 1][t] == 1]
        if rng is not None:
            rng.shuffle(st)
        return st

    def step(d, t, stacks):
        if not pres[d - 1][t] or cnt[d - 1][t] != 1:
            return False
        ptr, lst = cof[d]
        s = next(c for c in lst[ptr[t]:ptr[t + 1]] if pres[d][c])
        if d < 3 and cnt[d][s] != 0:
            return False
        pres[d][s] = pres[d - 1][t] = False
        for f in faces[d][s]:
            cnt[d - 1][f] -= 1
            if pres[d - 1][f] and cnt[d - 1][f] == 1:
                stacks[d].append(f)
        if d >= 2:
            for g in faces[d - 1][t]:
                cnt[d - 2][g] -= 1
                if (d - 1) in stacks and pres[d - 2][g] and cnt[d - 2][g] == 1:
                    stacks[d - 1].append(g)
        out.append((d, s, t))
        return True

    if interleave:
        # uniform random choice among all currently free pairs (lazy pool)
        import random
        pick = random.Random(int(rng.integers(2 ** 31)) if rng is not None else 0)
        pool = []
        stacks = {d: _Pool(pool, d) for d in dims}
        for d in dims:
            for t in seed(d):
                pool.append((d, t))
        while pool:
            i = pick.randrange(len(pool))
            pool[i], pool[-1] = pool[-1], pool[i]
            d, t = pool.pop()
            step(d, t, stacks)
    else:
        for d in dims:
            stacks = {d: seed(d)}
            while stacks[d]:
                step(d, stacks[d].pop(), stacks)
    return CollapsingSequence(out), [np.array(p, bool) for p in pres]
