"""Exact-arithmetic register groups and the embeddings between them.

Every element is an immutable value with structural equality: free-group
words are kept reduced, rationals normalized, matrices are tuples of
Fractions, Heisenberg elements live in their (x, y, z) normal form.
Registers are compared bit-exactly, so nothing here may ever touch floats.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

from .errors import (
    DeterminantConstraint,
    ElementGroupMismatch,
    GramataError,
    NotPositive,
    SingularMatrix,
    ZeroDenominator,
)

Rational = Fraction


def rat_normalize(num, den):
    """Exact rational num/den in lowest terms with a positive denominator."""
    if den == 0:
        raise ZeroDenominator("zero denominator")
    return Fraction(num, den)


def format_rational(q):
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text):
    text = text.strip()
    m = re.fullmatch(r"(-?\d+)(?:/(-?\d+))?", text)
    if not m:
        raise GramataError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    return rat_normalize(num, den)


class Matrix:
    """Immutable square matrix over the rationals."""

    __slots__ = ("rows", "_hash")

    def __init__(self, rows):
        rows = tuple(tuple(Fraction(x) for x in row) for row in rows)
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise GramataError("matrix must be square and non-empty")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_hash", hash(rows))

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    def __reduce__(self):
        return (Matrix, (self.rows,))

    @classmethod
    def _from_rows(cls, rows):
        # internal: rows are already tuples of Fractions
        m = object.__new__(cls)
        object.__setattr__(m, "rows", rows)
        object.__setattr__(m, "_hash", hash(rows))
        return m

    @property
    def dim(self):
        return len(self.rows)

    @classmethod
    def identity(cls, dim):
        return cls(tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)))

    def __mul__(self, other):
        if not isinstance(other, Matrix) or other.dim != self.dim:
            return NotImplemented
        if self.dim == 2:
            (a, b), (c, d) = self.rows
            (e, f), (g, h) = other.rows
            return Matrix._from_rows(((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h)))
        a, b = self.rows, other.rows
        n = self.dim
        cols = tuple(zip(*b))
        return Matrix._from_rows(
            tuple(tuple(sum(a[i][k] * cols[j][k] for k in range(n)) for j in range(n)) for i in range(n))
        )

    def __pow__(self, exp):
        if exp < 0:
            return self.inverse() ** (-exp)
        result = Matrix.identity(self.dim)
        base = self
        while exp:
            if exp & 1:
                result = result * base
            base = base * base
            exp >>= 1
        return result

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self):
        return self._hash

    def is_identity(self):
        return all(self.rows[i][j] == (1 if i == j else 0) for i in range(self.dim) for j in range(self.dim))

    def det(self):
        """Exact determinant via rational Gaussian elimination."""
        n = self.dim
        rows = [list(row) for row in self.rows]
        det = Fraction(1)
        for col in range(n):
            pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
            if pivot is None:
                return Fraction(0)
            if pivot != col:
                rows[col], rows[pivot] = rows[pivot], rows[col]
                det = -det
            det *= rows[col][col]
            inv = 1 / rows[col][col]
            for r in range(col + 1, n):
                factor = rows[r][col] * inv
                if factor:
                    for c in range(col, n):
                        rows[r][c] -= factor * rows[col][c]
        return det

    def inverse(self):
        """Exact inverse by Gauss-Jordan elimination."""
        n = self.dim
        aug = [list(self.rows[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
            if pivot is None:
                raise SingularMatrix("matrix is not invertible")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            inv = 1 / aug[col][col]
            aug[col] = [x * inv for x in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    factor = aug[r][col]
                    aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
        return Matrix(tuple(tuple(row[n:]) for row in aug))

    def __repr__(self):
        return f"Matrix({format_matrix(self)})"


def determinant(m):
    return m.det()


def format_matrix(m):
    return "[" + ",".join("[" + ",".join(format_rational(x) for x in row) + "]" for row in m.rows) + "]"


class Word:
    """Reduced word in a free group: letters are (generator index, sign)."""

    __slots__ = ("letters", "_hash")

    def __init__(self, letters=()):
        letters = _reduce_letters(letters)
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "_hash", hash(letters))

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    def __reduce__(self):
        return (Word, (self.letters,))

    @classmethod
    def generator(cls, index, sign=1):
        return cls(((index, sign),))

    def __mul__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return Word(self.letters + other.letters)

    def inverse(self):
        return Word(tuple((g, -s) for g, s in reversed(self.letters)))

    def is_identity(self):
        return not self.letters

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Word({format_word(self)!r})"


def _reduce_letters(letters):
    out = []
    for g, s in letters:
        if s not in (1, -1):
            raise GramataError(f"letter sign must be +-1, got {s}")
        if out and out[-1][0] == g and out[-1][1] == -s:
            out.pop()
        else:
            out.append((g, s))
    return tuple(out)


def format_word(w):
    if not w.letters:
        return "e"
    return " ".join(f"g{g}" if s == 1 else f"g{g}^-1" for g, s in w.letters)


def parse_word(text, rank):
    text = text.strip()
    if text == "e":
        return Word()
    letters = []
    for token in text.split():
        m = re.fullmatch(r"g(\d+)(\^-1)?", token)
        if not m:
            raise GramataError(f"bad free-word token: {token!r}")
        g = int(m.group(1))
        if g >= rank:
            raise ElementGroupMismatch(f"generator g{g} outside rank {rank}")
        letters.append((g, -1 if m.group(2) else 1))
    return Word(letters)


class Heis(NamedTuple):
    """Heisenberg normal form b^x a^y c^z."""

    x: int
    y: int
    z: int


HEIS_IDENTITY = Heis(0, 0, 0)
# generators in normal-form coordinates
HEIS_A = Heis(0, 1, 0)
HEIS_B = Heis(1, 0, 0)
HEIS_C = Heis(0, 0, 1)


def heis_mul(g, h):
    # closed-form law: (b^x a^y c^z)(b^x' a^y' c^z') = b^(x+x') a^(y+y') c^(z+z'+y*x')
    return Heis(g.x + h.x, g.y + h.y, g.z + h.z + g.y * h.x)


def heis_inverse(g):
    # solve g * inv = identity in the closed form
    return Heis(-g.x, -g.y, -g.z + g.x * g.y)


def heis_to_matrix(t):
    """Upper unitriangular 3x3 view: a-exponent above the diagonal left,
    b-exponent right, c-exponent in the corner."""
    return Matrix(((1, t.y, t.z), (0, 1, t.x), (0, 0, 1)))


def format_heis(t):
    return f"H({t.x},{t.y},{t.z})"


def parse_heis(text):
    m = re.fullmatch(r"H\((-?\d+),(-?\d+),(-?\d+)\)", text.strip().replace(" ", ""))
    if not m:
        raise GramataError(f"bad Heisenberg literal: {text!r}")
    return Heis(int(m.group(1)), int(m.group(2)), int(m.group(3)))


# --- groups -----------------------------------------------------------------

DET_ANY = "any"
DET_PM1 = "pm1"
DET_ONE = "one"
_DET_TOKENS = {DET_ANY: "det=any", DET_PM1: "det=+-1", DET_ONE: "det=1"}
_DET_FROM_TOKEN = {v: k for k, v in _DET_TOKENS.items()}


class Group:
    """Common interface of all register groups. Instances are immutable and
    hashable; elements are plain values owned by the group."""

    def identity(self):
        raise NotImplementedError

    def mul(self, g, h):
        raise NotImplementedError

    def inverse(self, g):
        raise NotImplementedError

    def is_identity(self, g):
        raise NotImplementedError

    def check(self, g):
        """Raise ElementGroupMismatch / DeterminantConstraint unless g is a
        valid element of this group."""
        raise NotImplementedError

    def format_element(self, g):
        raise NotImplementedError

    def parse_element(self, text):
        raise NotImplementedError

    def spec_text(self):
        """The group's declaration in the machine file format."""
        raise NotImplementedError

    def __repr__(self):
        return f"<group {self.spec_text()}>"


@dataclass(frozen=True, repr=False)
class FreeGroup(Group):
    rank: int

    def identity(self):
        return Word()

    def mul(self, g, h):
        self._typecheck(g)
        self._typecheck(h)
        return g * h

    def inverse(self, g):
        self._typecheck(g)
        return g.inverse()

    def is_identity(self, g):
        return not g.letters

    def _typecheck(self, g):
        if not isinstance(g, Word):
            raise ElementGroupMismatch(f"expected a free-group word, got {g!r}")

    def check(self, g):
        self._typecheck(g)
        if any(i >= self.rank or i < 0 for i, _ in g.letters):
            raise ElementGroupMismatch(f"generator index outside rank {self.rank}")

    def format_element(self, g):
        return format_word(g)

    def parse_element(self, text):
        return parse_word(text, self.rank)

    def spec_text(self):
        return f"free {self.rank}"


@dataclass(frozen=True, repr=False)
class FreeAbelian(Group):
    k: int

    def identity(self):
        return (0,) * self.k

    def mul(self, g, h):
        self.check(g)
        self.check(h)
        return tuple(a + b for a, b in zip(g, h))

    def inverse(self, g):
        self.check(g)
        return tuple(-a for a in g)

    def is_identity(self, g):
        return all(a == 0 for a in g)

    def check(self, g):
        if not (isinstance(g, tuple) and len(g) == self.k and all(isinstance(a, int) for a in g)):
            raise ElementGroupMismatch(f"expected an integer {self.k}-vector, got {g!r}")

    def format_element(self, g):
        return "[" + ",".join(str(a) for a in g) + "]"

    def parse_element(self, text):
        text = text.strip().replace(" ", "")
        if not (text.startswith("[") and text.endswith("]")):
            raise GramataError(f"bad vector literal: {text!r}")
        body = text[1:-1]
        coords = tuple(int(tok) for tok in body.split(",")) if body else ()
        if len(coords) != self.k:
            raise ElementGroupMismatch(f"vector length {len(coords)} != {self.k}")
        return coords

    def spec_text(self):
        return f"free-abelian {self.k}"


@dataclass(frozen=True, repr=False)
class PositiveRationals(Group):
    def identity(self):
        return Fraction(1)

    def mul(self, g, h):
        self.check(g)
        self.check(h)
        return g * h

    def inverse(self, g):
        self.check(g)
        return 1 / g

    def is_identity(self, g):
        return g == 1

    def check(self, g):
        if not isinstance(g, Fraction):
            raise ElementGroupMismatch(f"expected a Fraction, got {g!r}")
        if g <= 0:
            raise NotPositive(f"positive rational required, got {g}")

    def format_element(self, g):
        return format_rational(g)

    def parse_element(self, text):
        q = parse_rational(text)
        self.check(q)
        return q

    def spec_text(self):
        return "positive-rationals"


@dataclass(frozen=True, repr=False)
class MatrixGroup(Group):
    dim: int
    field: str  # "Z" or "Q"
    det: str = DET_ANY

    def identity(self):
        return Matrix.identity(self.dim)

    def mul(self, g, h):
        self._typecheck(g)
        self._typecheck(h)
        return g * h

    def inverse(self, g):
        self._typecheck(g)
        return g.inverse()

    def is_identity(self, g):
        return g.is_identity()

    def _typecheck(self, g):
        if not isinstance(g, Matrix) or g.dim != self.dim:
            raise ElementGroupMismatch(f"expected a {self.dim}x{self.dim} matrix, got {g!r}")

    def check(self, g):
        self._typecheck(g)
        if self.field == "Z" and any(x.denominator != 1 for row in g.rows for x in row):
            raise ElementGroupMismatch("integer matrix required")
        d = g.det()
        if self.det == DET_ONE:
            if d != 1:
                raise DeterminantConstraint(f"determinant must be 1, got {format_rational(d)}")
        elif self.det == DET_PM1 or self.field == "Z":
            # invertible over Z forces det = +-1 even under det=any
            if d != 1 and d != -1:
                raise DeterminantConstraint(f"determinant must be +-1, got {format_rational(d)}")
        elif d == 0:
            raise DeterminantConstraint("matrix must be invertible")

    def format_element(self, g):
        return format_matrix(g)

    def parse_element(self, text):
        text = text.strip().replace(" ", "")
        rows = _parse_matrix_rows(text)
        m = Matrix(rows)
        self.check(m)
        return m

    def spec_text(self):
        return f"matrix-{self.field} {self.dim} {_DET_TOKENS[self.det]}"


def _parse_matrix_rows(text):
    if not (text.startswith("[[") and text.endswith("]]")):
        raise GramataError(f"bad matrix literal: {text!r}")
    rows = []
    for part in text[2:-2].split("],["):
        rows.append(tuple(parse_rational(tok) for tok in part.split(",")))
    return tuple(rows)


@dataclass(frozen=True, repr=False)
class HeisenbergGroup(Group):
    def identity(self):
        return HEIS_IDENTITY

    def mul(self, g, h):
        self._typecheck(g)
        self._typecheck(h)
        return heis_mul(g, h)

    def inverse(self, g):
        self._typecheck(g)
        return heis_inverse(g)

    def is_identity(self, g):
        return g.x == 0 and g.y == 0 and g.z == 0

    def _typecheck(self, g):
        if not isinstance(g, Heis):
            raise ElementGroupMismatch(f"expected a Heisenberg triple, got {g!r}")

    def check(self, g):
        self._typecheck(g)

    def format_element(self, g):
        return format_heis(g)

    def parse_element(self, text):
        return parse_heis(text)

    def spec_text(self):
        return "heisenberg"


@dataclass(frozen=True, repr=False)
class DirectProduct(Group):
    left: Group
    right: Group

    def identity(self):
        return (self.left.identity(), self.right.identity())

    def mul(self, g, h):
        self._typecheck(g)
        self._typecheck(h)
        return (self.left.mul(g[0], h[0]), self.right.mul(g[1], h[1]))

    def inverse(self, g):
        self._typecheck(g)
        return (self.left.inverse(g[0]), self.right.inverse(g[1]))

    def is_identity(self, g):
        return self.left.is_identity(g[0]) and self.right.is_identity(g[1])

    def _typecheck(self, g):
        if not (isinstance(g, tuple) and len(g) == 2):
            raise ElementGroupMismatch(f"expected a pair, got {g!r}")

    def check(self, g):
        self._typecheck(g)
        self.left.check(g[0])
        self.right.check(g[1])

    def format_element(self, g):
        return f"({self.left.format_element(g[0])}|{self.right.format_element(g[1])})"

    def parse_element(self, text):
        text = text.strip()
        if not (text.startswith("(") and text.endswith(")")):
            raise GramataError(f"bad pair literal: {text!r}")
        body = text[1:-1]
        depth = 0
        for i, ch in enumerate(body):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "|" and depth == 0:
                return (self.left.parse_element(body[:i]), self.right.parse_element(body[i + 1 :]))
        raise GramataError(f"bad pair literal: {text!r}")

    def spec_text(self):
        return f"direct-product ({self.left.spec_text()}) ({self.right.spec_text()})"


# --- group spec grammars ----------------------------------------------------


def parse_group_spec(text):
    """Parse the file-format group declaration, e.g. 'matrix-Q 2 det=1'."""
    spec, rest = _parse_group_spec_prefix(text.strip())
    if rest:
        raise GramataError(f"trailing characters in group spec: {rest!r}")
    return spec


def _parse_group_spec_prefix(text):
    text = text.lstrip()
    if text.startswith("direct-product"):
        rest = text[len("direct-product") :].lstrip()
        left, rest = _parse_paren_spec(rest)
        right, rest = _parse_paren_spec(rest.lstrip())
        return DirectProduct(left, right), rest
    tokens = text.split()
    if not tokens:
        raise GramataError("empty group spec")
    kind = tokens[0]
    if kind == "free":
        return FreeGroup(_positive_int(tokens, 1)), " ".join(tokens[2:])
    if kind == "free-abelian":
        return FreeAbelian(_positive_int(tokens, 1)), " ".join(tokens[2:])
    if kind == "positive-rationals":
        return PositiveRationals(), " ".join(tokens[1:])
    if kind == "heisenberg":
        return HeisenbergGroup(), " ".join(tokens[1:])
    if kind in ("matrix-Z", "matrix-Q"):
        dim = _positive_int(tokens, 1)
        det = DET_ANY
        rest = tokens[2:]
        if rest and rest[0].startswith("det="):
            if rest[0] not in _DET_FROM_TOKEN:
                raise GramataError(f"bad determinant constraint {rest[0]!r}")
            det = _DET_FROM_TOKEN[rest[0]]
            rest = rest[1:]
        return MatrixGroup(dim, kind[-1], det), " ".join(rest)
    raise GramataError(f"unknown group kind {kind!r}")


def _parse_paren_spec(text):
    if not text.startswith("("):
        raise GramataError(f"expected '(' in group spec near {text!r}")
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                inner, rest = _parse_group_spec_prefix(text[1:i])
                if rest:
                    raise GramataError(f"trailing characters in group spec: {rest!r}")
                return inner, text[i + 1 :]
    raise GramataError("unbalanced parentheses in group spec")


def _positive_int(tokens, i):
    if len(tokens) <= i or not tokens[i].isdigit() or int(tokens[i]) < 1:
        raise GramataError(f"expected positive integer in group spec: {' '.join(tokens)!r}")
    return int(tokens[i])


_COMPACT_DET = {"det1": DET_ONE, "detpm1": DET_PM1, "detany": DET_ANY}


def parse_group_compact(text):
    """Parse the command-line group grammar: free:2, zk:3, qplus,
    matq:2:det1, matz:2:detpm1, heis, prod(a,b)."""
    text = text.strip()
    if text.startswith("prod(") and text.endswith(")"):
        body = text[5:-1]
        depth = 0
        for i, ch in enumerate(body):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                return DirectProduct(parse_group_compact(body[:i]), parse_group_compact(body[i + 1 :]))
        raise GramataError(f"bad product spec {text!r}")
    parts = text.split(":")
    kind = parts[0]
    if kind == "free" and len(parts) == 2:
        return FreeGroup(int(parts[1]))
    if kind == "zk" and len(parts) == 2:
        return FreeAbelian(int(parts[1]))
    if kind == "qplus" and len(parts) == 1:
        return PositiveRationals()
    if kind == "heis" and len(parts) == 1:
        return HeisenbergGroup()
    if kind in ("matq", "matz") and len(parts) in (2, 3):
        det = DET_ANY
        if len(parts) == 3:
            if parts[2] not in _COMPACT_DET:
                raise GramataError(f"bad determinant constraint {parts[2]!r}")
            det = _COMPACT_DET[parts[2]]
        return MatrixGroup(int(parts[1]), "Q" if kind == "matq" else "Z", det)
    raise GramataError(f"bad group spec {text!r}")


def compact_group_text(group):
    if isinstance(group, FreeGroup):
        return f"free:{group.rank}"
    if isinstance(group, FreeAbelian):
        return f"zk:{group.k}"
    if isinstance(group, PositiveRationals):
        return "qplus"
    if isinstance(group, HeisenbergGroup):
        return "heis"
    if isinstance(group, MatrixGroup):
        det = {DET_ONE: "det1", DET_PM1: "detpm1", DET_ANY: "detany"}[group.det]
        return f"mat{group.field.lower()}:{group.dim}:{det}"
    if isinstance(group, DirectProduct):
        return f"prod({compact_group_text(group.left)},{compact_group_text(group.right)})"
    raise GramataError(f"unknown group {group!r}")


# --- the paper's matrices and embeddings ------------------------------------

SANOV_A = Matrix(((1, 2), (0, 1)))
SANOV_B = Matrix(((1, 0), (2, 1)))

BS_A = Matrix(((1, 0), (-1, 1)))
BS_B = Matrix(((Fraction(1, 2), 0), (0, 1)))


def sanov_embed(w):
    """Image of a rank-2 free word under g0 -> [[1,2],[0,1]], g1 -> [[1,0],[2,1]]."""
    gens = {
        (0, 1): SANOV_A,
        (0, -1): SANOV_A.inverse(),
        (1, 1): SANOV_B,
        (1, -1): SANOV_B.inverse(),
    }
    out = Matrix.identity(2)
    for letter in w.letters:
        if letter[0] not in (0, 1):
            raise ElementGroupMismatch("sanov embedding is defined on rank-2 words")
        out = out * gens[letter]
    return out


def qplus_embed(s):
    """Positive rational s as the determinant-1 diagonal matrix diag(s, 1/s)."""
    s = Fraction(s)
    if s <= 0:
        raise NotPositive(f"positive rational required, got {s}")
    return Matrix(((s, 0), (0, 1 / s)))


def pair_embed(m1, m2):
    """Two 2x2 matrices as one block-diagonal 4x4 matrix."""
    if m1.dim != 2 or m2.dim != 2:
        raise ElementGroupMismatch("pair embedding takes 2x2 matrices")
    a, b = m1.rows, m2.rows
    return Matrix(
        (
            (a[0][0], a[0][1], 0, 0),
            (a[1][0], a[1][1], 0, 0),
            (0, 0, b[0][0], b[0][1]),
            (0, 0, b[1][0], b[1][1]),
        )
    )


_BS_TOKENS = {"a": BS_A, "b": BS_B}


def bs_word_to_matrix(tokens: Iterable[str]):
    """Product of the BS(1,2) generator matrices named by tokens
    ('a', 'a^-1', 'b', 'b^-1'), in order."""
    out = Matrix.identity(2)
    for token in tokens:
        name, _, inv = token.partition("^")
        if name not in _BS_TOKENS or inv not in ("", "-1"):
            raise GramataError(f"bad BS(1,2) token {token!r}")
        m = _BS_TOKENS[name]
        out = out * (m.inverse() if inv else m)
    return out


def z2_to_heisenberg(v):
    """Z^2 vector (m, n) as B^m C^n inside the Heisenberg group."""
    m, n = v
    return Heis(m, 0, n)
