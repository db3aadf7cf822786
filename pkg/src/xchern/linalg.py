"""Sparse exact linear algebra over the Scalar field.

Vectors are dicts mapping hashable basis labels to nonzero Scalars.  Labels
may be arbitrary nested tuples of ints and strings; a deterministic total
order on labels keeps echelon forms and quotient bases reproducible across
runs.
"""

from .scalars import ONE


def label_key(label):
    """Total order on heterogeneous labels (None, ints, strings, tuples)."""
    if label is None:
        return (-1,)
    if isinstance(label, tuple):
        return (2, tuple(label_key(x) for x in label))
    if isinstance(label, str):
        return (1, label)
    return (0, label)


def vec_add(u, v):
    out = dict(u)
    for k, c in v.items():
        s = out.get(k)
        s = c if s is None else s + c
        if s:
            out[k] = s
        elif k in out:
            del out[k]
    return out


def vec_sub(u, v):
    out = dict(u)
    for k, c in v.items():
        s = out.get(k)
        s = -c if s is None else s - c
        if s:
            out[k] = s
        elif k in out:
            del out[k]
    return out


def vec_scale(u, c):
    if not c:
        return {}
    return {k: v * c for k, v in u.items()}


def vec_axpy(out, coeff, v):
    """In place: out += coeff * v."""
    if not coeff:
        return out
    for k, c in v.items():
        s = out.get(k)
        s = coeff * c if s is None else s + coeff * c
        if s:
            out[k] = s
        elif k in out:
            del out[k]
    return out


def vec_neg(u):
    return {k: -c for k, c in u.items()}


def vec_eq(u, v):
    return vec_sub(u, v) == {}


class Span:
    """Row space in reduced echelon form over arbitrary labels.

    Rows are normalized so the pivot coefficient is one; insertion order is
    irrelevant to the resulting space, and the pivot choice (smallest label)
    makes the representation canonical.
    """

    def __init__(self, vectors=()):
        self.rows = {}  # pivot label -> row vector
        for v in vectors:
            self.add(v)

    @property
    def dim(self):
        return len(self.rows)

    def reduce(self, vec):
        """Residual of vec modulo the span."""
        v = dict(vec)
        # iterate over pivots present in v until none remain
        while True:
            hit = None
            for k in v:
                if k in self.rows:
                    hit = k
                    break
            if hit is None:
                return v
            vec_axpy(v, -v[hit], self.rows[hit])

    def contains(self, vec):
        return not self.reduce(vec)

    def add(self, vec):
        """Insert a vector; returns True if the span grew."""
        r = self.reduce(vec)
        if not r:
            return False
        piv = min(r, key=label_key)
        inv = r[piv].inverse()
        r = {k: c * inv for k, c in r.items()}
        # back-substitute into existing rows to keep the form reduced
        for p, row in self.rows.items():
            if piv in row:
                vec_axpy(row, -row[piv], r)
        self.rows[piv] = r
        return True

    def basis(self):
        return [self.rows[p] for p in sorted(self.rows, key=label_key)]

    def coordinates(self, vec):
        """Coefficients of vec on the echelon rows, or None if outside."""
        v = dict(vec)
        coeffs = {}
        while True:
            hit = None
            for k in v:
                if k in self.rows:
                    hit = k
                    break
            if hit is None:
                break
            coeffs[hit] = v[hit]
            vec_axpy(v, -v[hit], self.rows[hit])
        if v:
            return None
        return coeffs


def quotient_basis(all_labels, subspace):
    """Lexicographically earliest completion of a subspace to the full space.

    Returns the labels whose unit vectors complete `subspace` (a Span) to the
    span of all unit vectors on all_labels.
    """
    out = []
    probe = Span()
    for row in subspace.rows.values():
        probe.add(row)
    for label in sorted(all_labels, key=label_key):
        if probe.add({label: ONE}):
            out.append(label)
    return out


class FastSpan:
    """Append-only echelon span; rows keep their pivot minimal, reductions
    always eliminate the smallest pivot present, which guarantees
    termination without the cost of keeping rows fully reduced."""

    def __init__(self, vectors=()):
        self.rows = {}
        for v in vectors:
            self.add(v)

    @property
    def dim(self):
        return len(self.rows)

    def reduce(self, vec):
        v = dict(vec)
        while True:
            hit = None
            hk = None
            for k in v:
                if k in self.rows:
                    kk = label_key(k)
                    if hit is None or kk < hk:
                        hit, hk = k, kk
            if hit is None:
                return v
            vec_axpy(v, -v[hit], self.rows[hit])

    def contains(self, vec):
        return not self.reduce(vec)

    def add(self, vec):
        r = self.reduce(vec)
        if not r:
            return False
        piv = min(r, key=label_key)
        inv = r[piv].inverse()
        self.rows[piv] = {k: c * inv for k, c in r.items()}
        return True

    def basis(self):
        return [self.rows[p] for p in sorted(self.rows, key=label_key)]


class ProvSpan:
    """Echelon span that remembers how each row combines the inserted
    vectors, so arbitrary vectors can be rewritten in the original family."""

    def __init__(self):
        self.rows = {}   # pivot -> (row, provenance over insertion indices)
        self.count = 0

    def add(self, vec):
        idx = self.count
        self.count += 1
        v = dict(vec)
        prov = {idx: ONE}
        while True:
            hit = None
            for k in v:
                if k in self.rows:
                    hit = k
                    break
            if hit is None:
                break
            row, rprov = self.rows[hit]
            c = v[hit]
            vec_axpy(v, -c, row)
            vec_axpy(prov, -c, rprov)
        if not v:
            return False
        piv = min(v, key=label_key)
        inv = v[piv].inverse()
        v = {k: c * inv for k, c in v.items()}
        prov = {k: c * inv for k, c in prov.items()}
        for p, (row, rprov) in self.rows.items():
            c = row.get(piv)
            if c:
                vec_axpy(row, -c, v)
                vec_axpy(rprov, -c, prov)
        self.rows[piv] = (v, prov)
        return True

    def coordinates(self, vec):
        """Coefficients over the inserted vectors, or None if outside."""
        v = dict(vec)
        out = {}
        while True:
            hit = None
            for k in v:
                if k in self.rows:
                    hit = k
                    break
            if hit is None:
                break
            row, rprov = self.rows[hit]
            c = v[hit]
            vec_axpy(v, -c, row)
            vec_axpy(out, c, rprov)
        if v:
            return None
        return out


def solve(equations, rhs, track_witness=False):
    """Solve a sparse linear system over Scalars.

    equations: list of dicts over unknown labels; rhs: list of Scalars.
    Returns (solution dict, None) with unassigned unknowns implicitly zero,
    or (None, witness) when inconsistent.  The witness is a dict over
    equation indices whose combination yields 0 = nonzero when
    track_witness is set, else the index of one offending reduced equation.
    """
    rows = {}      # pivot unknown -> (eq vector, rhs, provenance)
    for idx, (eq, b) in enumerate(zip(equations, rhs)):
        v = dict(eq)
        prov = {idx: ONE} if track_witness else None
        while True:
            hit = None
            for k in v:
                if k in rows:
                    hit = k
                    break
            if hit is None:
                break
            row, rb, rprov = rows[hit]
            c = v[hit]
            vec_axpy(v, -c, row)
            b = b - c * rb
            if track_witness:
                prov = vec_axpy(dict(prov), -c, rprov)
        if not v:
            if b:
                return None, (prov if track_witness else idx)
            continue
        piv = min(v, key=label_key)
        inv = v[piv].inverse()
        v = {k: c * inv for k, c in v.items()}
        b = b * inv
        if track_witness:
            prov = {k: c * inv for k, c in prov.items()}
        rows[piv] = (v, b, prov)
    # back substitution: process pivots from largest to smallest
    solution = {}
    for piv in sorted(rows, key=label_key, reverse=True):
        v, b, _ = rows[piv]
        acc = b
        for k, c in v.items():
            if k == piv:
                continue
            s = solution.get(k)
            if s is not None:
                acc = acc - c * s
        if acc:
            solution[piv] = acc
    return solution, None
