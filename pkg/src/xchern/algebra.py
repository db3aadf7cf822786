"""Finite-dimensional associative algebras given by structure constants.

The structure table is sparse: mul[(i, j)] is a dict {k: coefficient} with
e_i * e_j = sum_k c * e_k.  Algebras are not assumed unital; a unit, when
present, is stored as a coefficient vector and checked.  An optional grading
assigns parity 0/1 to each basis element (used by super X-complexes).
"""

from .scalars import ONE
from .linalg import vec_axpy


class Algebra:
    def __init__(self, basis_names, mul, unit=None, grading=None, check=True,
                 name=None):
        self.dim = len(basis_names)
        self.basis_names = list(basis_names)
        self.mul = {}
        for (i, j), vec in mul.items():
            v = {k: c for k, c in vec.items() if c}
            if v:
                self.mul[(i, j)] = v
        self.unit = dict(unit) if unit else None
        self.grading = list(grading) if grading is not None else None
        self.name = name or "algebra"
        if check:
            self.check_associative()
            if self.unit is not None:
                self.check_unit()

    def product_basis(self, i, j):
        return self.mul.get((i, j), {})

    def parity(self, i):
        return self.grading[i] if self.grading is not None else 0

    def product(self, u, v):
        """Product of two coefficient dicts."""
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                tab = self.mul.get((i, j))
                if tab:
                    vec_axpy(out, a * b, tab)
        return out

    def check_associative(self):
        for i in range(self.dim):
            for j in range(self.dim):
                ij = self.mul.get((i, j), {})
                for k in range(self.dim):
                    left = {}
                    for l, c in ij.items():
                        vec_axpy(left, c, self.mul.get((l, k), {}))
                    right = {}
                    for l, c in self.mul.get((j, k), {}).items():
                        vec_axpy(right, c, self.mul.get((i, l), {}))
                    if left != right:
                        raise ValueError(
                            "non-associative structure constants at basis "
                            "triple (%d, %d, %d)" % (i, j, k))

    def check_unit(self):
        for i in range(self.dim):
            e = {i: ONE}
            if self.product(self.unit, e) != e or self.product(e, self.unit) != e:
                raise ValueError("declared unit is not a two-sided unit")

    def element(self, coeffs):
        return Element(self, dict(coeffs))

    def basis_element(self, i):
        return Element(self, {i: ONE})

    def zero(self):
        return Element(self, {})

    def unit_element(self):
        if self.unit is None:
            raise ValueError("algebra %s has no unit" % self.name)
        return Element(self, dict(self.unit))

    def __repr__(self):
        return "Algebra(%s, dim=%d)" % (self.name, self.dim)


class Element:
    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra, coeffs):
        self.algebra = algebra
        self.coeffs = {i: c for i, c in coeffs.items() if c}

    def __add__(self, other):
        assert self.algebra is other.algebra
        out = dict(self.coeffs)
        vec_axpy(out, ONE, other.coeffs)
        return Element(self.algebra, out)

    def __sub__(self, other):
        assert self.algebra is other.algebra
        return self + (-other)

    def __neg__(self):
        return Element(self.algebra, {i: -c for i, c in self.coeffs.items()})

    def scale(self, c):
        return Element(self.algebra, {i: c * v for i, v in self.coeffs.items()})

    def __eq__(self, other):
        return self.algebra is other.algebra and self.coeffs == other.coeffs

    def is_zero(self):
        return not self.coeffs

    def __repr__(self):
        if not self.coeffs:
            return "0"
        names = self.algebra.basis_names
        return " + ".join("(%s)*%s" % (c, names[i])
                          for i, c in sorted(self.coeffs.items()))


def multiply(x, y):
    """Bilinear product via the structure constants."""
    if x.algebra is not y.algebra:
        raise ValueError("elements live in different algebras")
    return Element(x.algebra, x.algebra.product(x.coeffs, y.coeffs))


class UnitalElement:
    """Element of the unitalization: a scalar part plus a body in the algebra."""

    __slots__ = ("scalar_part", "body")

    def __init__(self, scalar_part, body):
        self.scalar_part = scalar_part
        self.body = body

    def __add__(self, other):
        return UnitalElement(self.scalar_part + other.scalar_part,
                             self.body + other.body)

    def __mul__(self, other):
        cross = other.body.scale(self.scalar_part) + self.body.scale(other.scalar_part)
        return UnitalElement(self.scalar_part * other.scalar_part,
                             cross + multiply(self.body, other.body))

    def __eq__(self, other):
        return self.scalar_part == other.scalar_part and self.body == other.body

    def __repr__(self):
        return "(%s) + %r" % (self.scalar_part, self.body)


class Homomorphism:
    """Linear map stored column-wise with a verified multiplicativity flag."""

    def __init__(self, source, target, columns, check=True):
        self.source = source
        self.target = target
        # columns[i] = image of source basis i, as a coefficient dict
        self.columns = [dict(col) for col in columns]
        if len(self.columns) != source.dim:
            raise ValueError("homomorphism needs one column per source basis")
        self.multiplicative_certificate = False
        if check:
            if not check_hom(self):
                raise ValueError("map is not multiplicative on basis pairs")
            self.multiplicative_certificate = True

    def apply(self, x):
        out = {}
        for i, c in x.coeffs.items():
            vec_axpy(out, c, self.columns[i])
        return Element(self.target, out)

    def apply_coeffs(self, coeffs):
        out = {}
        for i, c in coeffs.items():
            vec_axpy(out, c, self.columns[i])
        return out

    @staticmethod
    def identity(algebra):
        return Homomorphism(algebra, algebra,
                            [{i: ONE} for i in range(algebra.dim)], check=False)


def check_hom(f):
    """True iff f(e_i e_j) = f(e_i) f(e_j) on all basis pairs, and f maps
    the declared unit to the declared unit when both algebras carry one."""
    src, tgt = f.source, f.target
    for i in range(src.dim):
        for j in range(src.dim):
            img = {}
            for k, c in src.product_basis(i, j).items():
                vec_axpy(img, c, f.columns[k])
            if img != tgt.product(f.columns[i], f.columns[j]):
                return False
    if src.unit is not None and tgt.unit is not None:
        fu = {}
        for i, c in src.unit.items():
            vec_axpy(fu, c, f.columns[i])
        if fu and fu != tgt.unit:
            return False
    return True


def matrix_algebra(base, n, graded=False):
    """M_n(base); basis labels are (row, col, base label).

    With graded=True the checkerboard grading is installed: an entry is even
    when (row + col + parity of its base element) is even.
    """
    if n < 1:
        raise ValueError("matrix size must be positive")
    names = []
    index = {}
    for r in range(n):
        for c in range(n):
            for b in range(base.dim):
                index[(r, c, b)] = len(names)
                names.append((r, c, base.basis_names[b]))
    mul = {}
    for r in range(n):
        for c in range(n):
            for b1 in range(base.dim):
                i = index[(r, c, b1)]
                for c2 in range(n):
                    for b2 in range(base.dim):
                        j = index[(c, c2, b2)]
                        tab = base.product_basis(b1, b2)
                        if tab:
                            mul[(i, j)] = {index[(r, c2, k)]: v
                                           for k, v in tab.items()}
    unit = None
    if base.unit is not None:
        unit = {}
        for r in range(n):
            for b, c in base.unit.items():
                unit[index[(r, r, b)]] = c
    grading = None
    if graded:
        grading = [((r + c + base.parity(b)) % 2)
                   for r in range(n) for c in range(n) for b in range(base.dim)]
    alg = Algebra(names, mul, unit=unit, grading=grading, check=False,
                  name="M%d(%s)" % (n, base.name))
    alg.matrix_info = (base, n, index)
    return alg


def unitalize(base):
    """Adjoin a unit; basis 0 is the new unit, basis i+1 is base basis i."""
    names = ["1~"] + list(base.basis_names)
    mul = {}
    for i in range(base.dim + 1):
        mul[(0, i)] = {i: ONE}
        mul[(i, 0)] = {i: ONE}
    for (i, j), tab in base.mul.items():
        mul[(i + 1, j + 1)] = {k + 1: c for k, c in tab.items()}
    grading = None
    if base.grading is not None:
        grading = [0] + list(base.grading)
    alg = Algebra(names, mul, unit={0: ONE}, grading=grading, check=False,
                  name="unital(%s)" % base.name)
    alg.unitalized_from = base
    return alg


# ---------------------------------------------------------------------------
# corpus constructors
# ---------------------------------------------------------------------------


def dual_numbers():
    """Q[eps]/(eps^2), basis (1, eps)."""
    mul = {(0, 0): {0: ONE}, (0, 1): {1: ONE}, (1, 0): {1: ONE}}
    return Algebra(["1", "eps"], mul, unit={0: ONE}, name="dual")


def matrix_units(n):
    """M_n(Q) on matrix-unit basis."""
    scalars = Algebra(["1"], {(0, 0): {0: ONE}}, unit={0: ONE}, name="Q",
                      check=False)
    return matrix_algebra(scalars, n)


def group_algebra_z2():
    """Q[Z/2], basis (1, g) with g^2 = 1."""
    mul = {(0, 0): {0: ONE}, (0, 1): {1: ONE}, (1, 0): {1: ONE},
           (1, 1): {0: ONE}}
    return Algebra(["1", "g"], mul, unit={0: ONE}, name="QZ2")


def split_pair():
    """Q + Q, two orthogonal idempotents."""
    mul = {(0, 0): {0: ONE}, (1, 1): {1: ONE}}
    return Algebra(["e1", "e2"], mul, unit={0: ONE, 1: ONE}, name="QQ")


def rationals():
    return Algebra(["1"], {(0, 0): {0: ONE}}, unit={0: ONE}, name="Q")


def corpus():
    return [dual_numbers(), matrix_units(2), group_algebra_z2(), split_pair()]
