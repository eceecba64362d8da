"""Sparse exact linear algebra over Q(zeta8).

Vectors are dicts ``key -> Cyc``; keys are any sortable hashables (column
labels).  Elimination is plain Gauss-Jordan with a deterministic pivot
order, so echelon bases are reproducible.
"""

from __future__ import annotations

from typing import Hashable, Iterable

from .exactfield import ONE, Cyc

Vector = dict


def _axpy(target: dict, k: Cyc, src: dict) -> None:
    """target += k * src (in place, dropping zeros)."""
    for key, v in src.items():
        t = target.get(key)
        if t is None:
            target[key] = k * v
        else:
            t = t + k * v
            if t:
                target[key] = t
            else:
                del target[key]


class Echelon:
    """Incrementally built reduced echelon form of a set of vectors.

    ``rows[p]`` has coefficient 1 at its pivot ``p`` and 0 at every other
    pivot.  ``order`` decides which key becomes the pivot of a new row (the
    smallest under ``key``), so results do not depend on dict ordering.
    """

    def __init__(self, sort_key=None):
        self.rows: dict[Hashable, dict] = {}
        self.sort_key = sort_key

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: dict) -> dict:
        """Residue of v modulo the span (a fresh dict)."""
        w = dict(v)
        for p in [p for p in w if p in self.rows]:
            c = w.get(p)
            if c:
                _axpy(w, -c, self.rows[p])
        return w

    def add(self, v: dict) -> bool:
        """Insert v; returns True if it enlarged the span."""
        w = self.reduce(v)
        if not w:
            return False
        p = min(w, key=self.sort_key) if self.sort_key else min(w)
        inv = ONE / w[p]
        if inv != 1:
            w = {k: x * inv for k, x in w.items()}
        for q, row in self.rows.items():
            c = row.get(p)
            if c:
                _axpy(row, -c, w)
        self.rows[p] = w
        return True

    def contains(self, v: dict) -> bool:
        return not self.reduce(v)

    def coordinates(self, v: dict) -> dict | None:
        """Coefficients of v on the echelon rows (keyed by pivot) or None."""
        if self.reduce(v):
            return None
        return {p: v[p] for p in self.rows if v.get(p)}

    def basis(self) -> list[dict]:
        key = self.sort_key
        return [self.rows[p] for p in sorted(self.rows, key=key)]


def rank(vectors: Iterable[dict]) -> int:
    e = Echelon()
    for v in vectors:
        e.add(v)
    return e.rank


def nullspace(columns: list[dict]) -> list[dict]:
    """Basis of {x : sum_j x_j columns[j] = 0}, as dicts j -> Cyc.

    Tracks the combinations while eliminating; the basis is in echelon
    form with respect to the column index (each vector has a 1 at a
    distinct largest index).
    """
    rows: dict = {}       # pivot -> (vector, combination)
    out = []
    for j, col in enumerate(columns):
        w = dict(col)
        comb = {j: ONE}
        changed = True
        while changed:
            changed = False
            for p in [p for p in w if p in rows]:
                c = w.get(p)
                if c:
                    vec, cmb = rows[p]
                    _axpy(w, -c, vec)
                    _axpy(comb, -c, cmb)
                    changed = True
        if not w:
            out.append(comb)
            continue
        p = min(w)
        inv = ONE / w[p]
        rows[p] = ({k: x * inv for k, x in w.items()}, {k: x * inv for k, x in comb.items()})
    # tidy to echelon form in the column index (largest index pivot)
    e = Echelon(sort_key=lambda k: -k)
    for v in out:
        e.add(v)
    return e.basis()


def is_zero_product(a_rows: list[dict], b_rows: list[dict]) -> bool:
    """For maps given as lists of image vectors: does B after A vanish?

    ``a_rows[i]`` is the image of basis vector i of the source expressed in
    the middle basis (keys are middle indices); ``b_rows[k]`` the image of
    middle basis vector k.
    """
    for img in a_rows:
        acc: dict = {}
        for k, c in img.items():
            _axpy(acc, c, b_rows[k])
        if acc:
            return False
    return True


# ----------------------------------------------------------------------
# small dense matrices (lists of lists of Cyc)

def zeros(r: int, c: int) -> list:
    from .exactfield import ZERO
    return [[ZERO] * c for _ in range(r)]


def identity(n: int) -> list:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = ONE
    return m


def mat_mul(a: list, b: list) -> list:
    out = zeros(len(a), len(b[0]))
    for i, row in enumerate(a):
        for k, x in enumerate(row):
            if not x:
                continue
            bk = b[k]
            o = out[i]
            for j, y in enumerate(bk):
                if y:
                    o[j] = o[j] + x * y
    return out


def mat_add(a: list, b: list, k=1) -> list:
    return [[x + y * k for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: list, k) -> list:
    return [[x * k for x in r] for r in a]


def transpose(a: list) -> list:
    return [list(r) for r in zip(*a)]


def mat_inverse(a: list) -> list:
    n = len(a)
    rows = [{**{j: x for j, x in enumerate(r) if x}, n + i: ONE} for i, r in enumerate(a)]
    e = Echelon()
    for r in rows:
        e.add(r)
    if any(p >= n for p in e.rows) or e.rank < n:
        raise ZeroDivisionError("matrix is singular")
    out = zeros(n, n)
    for p, r in e.rows.items():
        for k, x in r.items():
            if k >= n:
                out[p][k - n] = x
    return out


def mat_rank(a: list) -> int:
    return rank({j: x for j, x in enumerate(r) if x} for r in a)
