"""Plane Cremona maps through their degree dynamics.

A birational self-map of the projective plane is a coprime triple of
homogeneous polynomials of one degree.  The group acts by isometries on an
infinite-dimensional hyperboloid in which the displacement of the basepoint
(the class of a line) is ``arccosh(degree)``; everything this library needs
from that action reduces to exact degree bookkeeping:

* composition is coordinate substitution followed by cancelling the common
  factor, computed over one or more prime fields in lockstep;
* the dynamical degree is the limit of ``deg(f^n)^(1/n)``, approached from
  above along the submultiplicative degree sequence;
* monomial maps (the loxodromics that fail weak proper discontinuity) are
  handled purely through their 2x2 exponent matrices, which stay exact at
  powers far beyond any polynomial budget.

Elements remember the generator word that built them, stored freely reduced
(a map composed with its inverse generator cancels symbolically before any
polynomial work happens; the resulting map is identical, since the
normalized coprime triple of a map is unique).  An unlucky coefficient prime
announces itself either as a composed triple collapsing to zero or as a
degree disagreement between the tracked primes; both raise
:class:`~hypwalk.errors.BadPrimeSignal` so that trial runners can retry at
fresh primes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BadPrimeSignal, InputError, ResourceError
from .geometry import ActionOracle, IsometryClass, LOXODROMIC_THRESHOLD
from .polynomials import (
    DEFAULT_PRIME,
    SECOND_PRIME,
    HomPoly3,
    normalize_triple,
    substitute,
)

DEFAULT_DEGREE_CAP = 512

Triple = tuple[HomPoly3, HomPoly3, HomPoly3]


# ---------------------------------------------------------------------------
# Generator coordinate triples.


def sigma_triple(p: int) -> Triple:
    """The standard quadratic involution [x:y:z] -> [yz:xz:xy]."""
    X, Y, Z = (HomPoly3.variable(k, p) for k in range(3))
    return (Y.mul(Z), X.mul(Z), X.mul(Y))


def henon_triple(n: int, p: int) -> Triple:
    """(x, y) -> (y, y^n - x) homogenized: [Y Z^(n-1) : Y^n - X Z^(n-1) : Z^n]."""
    if n < 2:
        raise InputError("henon exponent must be >= 2")
    return (
        HomPoly3(n, {(0, 1, n - 1): 1}, p),
        HomPoly3(n, {(0, n, 0): 1, (1, 0, n - 1): p - 1}, p),
        HomPoly3(n, {(0, 0, n): 1}, p),
    )


def henon_inverse_triple(n: int, p: int) -> Triple:
    """(u, v) -> (u^n - v, u): the inverse of the henon generator."""
    return (
        HomPoly3(n, {(n, 0, 0): 1, (0, 1, n - 1): p - 1}, p),
        HomPoly3(n, {(1, 0, n - 1): 1}, p),
        HomPoly3(n, {(0, 0, n): 1}, p),
    )


def linear_triple(entries, p: int) -> Triple:
    """A projective linear map from nine matrix entries (row major)."""
    m = [[entries[3 * r + c] % p for c in range(3)] for r in range(3)]
    if _det3(m, p) == 0:
        raise InputError("linear generator matrix is singular mod p")
    out = []
    for r in range(3):
        coeffs = {}
        for c, exps in enumerate(((1, 0, 0), (0, 1, 0), (0, 0, 1))):
            if m[r][c]:
                coeffs[exps] = m[r][c]
        out.append(HomPoly3(1, coeffs, p))
    return tuple(out)


def linear_inverse_entries(entries, p: int) -> list[int]:
    m = [[entries[3 * r + c] % p for c in range(3)] for r in range(3)]
    det = _det3(m, p)
    det_inv = pow(det, p - 2, p)
    cof = [
        [
            (m[(r + 1) % 3][(c + 1) % 3] * m[(r + 2) % 3][(c + 2) % 3]
             - m[(r + 1) % 3][(c + 2) % 3] * m[(r + 2) % 3][(c + 1) % 3]) % p
            for r in range(3)
        ]
        for c in range(3)
    ]
    return [(cof[r][c] * det_inv) % p for r in range(3) for c in range(3)]


def _det3(m, p: int) -> int:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    ) % p


# ---------------------------------------------------------------------------
# Monomial maps as exponent matrices.


@dataclass(frozen=True)
class MonomialMap:
    """(x, y) -> (x^a y^b, x^c y^d) for an integer matrix of determinant +-1."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if abs(self.det()) != 1:
            raise InputError("monomial matrix must have determinant +-1")

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def matmul(self, other: "MonomialMap") -> "MonomialMap":
        return MonomialMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MonomialMap":
        det = self.det()
        return MonomialMap(self.d * det, -self.b * det, -self.c * det, self.a * det)

    def degree(self) -> int:
        """Degree of the induced plane map, from homogenizing the exponents."""
        a, b, c, d = self.a, self.b, self.c, self.d
        return -min(a, c, 0) - min(b, d, 0) + max(a + b, c + d, 0)

    def spectral_radius(self) -> float:
        tr = self.a + self.d
        det = self.det()
        disc = tr * tr - 4 * det
        if disc < 0:
            return 1.0  # complex eigenvalues of modulus sqrt(det) = 1
        return (abs(tr) + math.sqrt(disc)) / 2.0

    def is_identity(self) -> bool:
        return (self.a, self.b, self.c, self.d) == (1, 0, 0, 1)


def monomial_triple(mono: MonomialMap, p: int) -> Triple:
    """The coordinate triple of the plane map induced by a monomial map."""
    a, b, c, d = mono.a, mono.b, mono.c, mono.d
    sx = -min(a, c, 0)
    sy = -min(b, d, 0)
    sz = max(a + b, c + d, 0)
    exps = [
        (a + sx, b + sy, sz - a - b),
        (c + sx, d + sy, sz - c - d),
        (sx, sy, sz),
    ]
    return tuple(HomPoly3(sx + sy + sz, {e: 1}, p) for e in exps)


def monomial_dynamical_degree(mono: MonomialMap) -> float:
    """The dynamical degree of a monomial map is the spectral radius of its
    exponent matrix (no polynomial iteration required)."""
    return mono.spectral_radius()


# ---------------------------------------------------------------------------
# Generator atoms and elements.


@dataclass(frozen=True)
class GeneratorAtom:
    tag: str
    spec: tuple
    triples: tuple[tuple[int, Triple], ...]          # per prime
    inverse_triples: tuple[tuple[int, Triple], ...]  # per prime
    self_inverse: bool
    degree: int
    monomial: "MonomialMap | None" = None


@dataclass(frozen=True, eq=False)
class CremonaElement:
    """A plane Cremona map tracked over each configured prime.

    ``word`` records the freely reduced generator word that built the map
    (positive letter = atom, negative = its inverse), enough to rebuild the
    inverse map in closed form.  Equality compares the maps themselves (the
    normalized coordinate triples), not the words that built them.
    """

    word: tuple[int, ...]
    degree: int
    tracks: tuple[tuple[int, Triple], ...]

    def triple(self, prime: int) -> Triple:
        for p, t in self.tracks:
            if p == prime:
                return t
        raise InputError(f"no track for prime {prime}")

    def __eq__(self, other):
        return (
            isinstance(other, CremonaElement)
            and self.degree == other.degree
            and self.tracks == other.tracks
        )

    def __hash__(self):
        return hash((self.degree, self.tracks))

    def __repr__(self):
        return f"CremonaElement(degree={self.degree}, word_length={len(self.word)})"


class CremonaModel(ActionOracle):
    """Bir(P^2) acting on the hyperboloid: d(x, f.x) = arccosh(deg f)."""

    def __init__(
        self,
        primes: tuple[int, ...] = (DEFAULT_PRIME, SECOND_PRIME),
        degree_cap: int = DEFAULT_DEGREE_CAP,
    ):
        if not primes:
            raise InputError("need at least one coefficient prime")
        self.primes = tuple(primes)
        self.degree_cap = degree_cap
        self._atoms: list[GeneratorAtom] = []
        self._atom_index: dict[str, int] = {}

    # -- generator construction ---------------------------------------------

    def _intern(
        self, tag, spec, builder, inverse_builder, self_inverse, monomial=None
    ) -> CremonaElement:
        if tag not in self._atom_index:
            triples = tuple((p, builder(p)) for p in self.primes)
            inverses = tuple((p, inverse_builder(p)) for p in self.primes)
            degrees = {t[0].degree for _, t in triples}
            if len(degrees) != 1:
                raise AssertionError("generator degree differs across primes")
            atom = GeneratorAtom(
                tag, spec, triples, inverses, self_inverse, degrees.pop(), monomial
            )
            self._atoms.append(atom)
            self._atom_index[tag] = len(self._atoms) - 1
        index = self._atom_index[tag] + 1
        atom = self._atoms[index - 1]
        return CremonaElement((index,), atom.degree, atom.triples)

    def sigma(self) -> CremonaElement:
        return self._intern("sigma", ("sigma",), sigma_triple, sigma_triple, True)

    def henon(self, n: int) -> CremonaElement:
        return self._intern(
            f"henon{n}",
            ("henon", n),
            lambda p: henon_triple(n, p),
            lambda p: henon_inverse_triple(n, p),
            False,
        )

    def linear(self, entries) -> CremonaElement:
        entries = tuple(int(e) for e in entries)
        if len(entries) != 9:
            raise InputError("linear generator needs nine matrix entries")
        tag = "linear" + ",".join(str(e) for e in entries)
        return self._intern(
            tag,
            ("linear", entries),
            lambda p: linear_triple(entries, p),
            lambda p: linear_triple(linear_inverse_entries(entries, p), p),
            False,
        )

    def monomial(self, matrix) -> CremonaElement:
        mono = MonomialMap(*(int(v) for v in matrix))
        tag = f"monomial{mono.a},{mono.b},{mono.c},{mono.d}"
        return self._intern(
            tag,
            ("monomial", (mono.a, mono.b, mono.c, mono.d)),
            lambda p: monomial_triple(mono, p),
            lambda p: monomial_triple(mono.inverse(), p),
            False,
            monomial=mono,
        )

    def from_spec(self, spec: tuple) -> CremonaElement:
        kind = spec[0]
        if kind == "sigma":
            return self.sigma()
        if kind == "henon":
            return self.henon(spec[1])
        if kind == "linear":
            return self.linear(spec[1])
        if kind == "monomial":
            return self.monomial(spec[1])
        raise InputError(f"unknown generator spec {spec!r}")

    def respawn(self, primes: tuple[int, ...]) -> "CremonaModel":
        """A fresh model over new primes with the same generator registry.

        Atom indices are preserved, so element words carry over verbatim;
        used by the bad-prime retry policy.
        """
        clone = CremonaModel(primes, self.degree_cap)
        for atom in self._atoms:
            clone.from_spec(atom.spec)
        return clone

    def rebuild(self, element: CremonaElement) -> CremonaElement:
        """Recompute an element of a sibling model over this model's primes."""
        return self._compose_word(element.word)

    def _as_monomial(self, g: CremonaElement) -> "MonomialMap | None":
        """Exponent matrix of g when every letter of its word is monomial."""
        product = MonomialMap(1, 0, 0, 1)
        for letter in g.word:
            atom = self._atoms[abs(letter) - 1]
            if atom.monomial is None:
                return None
            step = atom.monomial if letter > 0 else atom.monomial.inverse()
            product = product.matmul(step)
        return product

    # -- the group operation --------------------------------------------------

    def identity(self) -> CremonaElement:
        tracks = tuple(
            (p, tuple(HomPoly3.variable(k, p) for k in range(3)))
            for p in self.primes
        )
        return CremonaElement((), 1, tracks)

    def _cancels(self, x: int, y: int) -> bool:
        if abs(x) != abs(y):
            return False
        atom = self._atoms[abs(x) - 1]
        return x == -y or atom.self_inverse

    def _reduce_word(self, letters) -> tuple[int, ...]:
        out: list[int] = []
        for letter in letters:
            if out and self._cancels(out[-1], letter):
                out.pop()
            else:
                out.append(letter)
        return tuple(out)

    def _atom_triple(self, letter: int, prime_slot: int) -> Triple:
        atom = self._atoms[abs(letter) - 1]
        source = atom.triples if letter > 0 else atom.inverse_triples
        return source[prime_slot][1]

    def _compose_tracks(self, outer_word, outer_tracks, inner_tracks, raw_degree):
        """Substitute the inner map into the outer one, prime by prime."""
        if raw_degree > self.degree_cap:
            raise ResourceError(
                f"composition degree {raw_degree} above cap {self.degree_cap}",
                payload={"raw_degree": raw_degree},
            )
        new_tracks = []
        degrees = set()
        for slot, (prime, outer) in enumerate(outer_tracks):
            inner = inner_tracks[slot][1]
            composed = tuple(substitute(q, inner) for q in outer)
            normalized, _dropped = normalize_triple(*composed)
            new_tracks.append((prime, normalized))
            degrees.add(normalized[0].degree)
        if len(degrees) != 1:
            raise BadPrimeSignal(
                f"degree disagreement across primes: {sorted(degrees)}"
            )
        return tuple(new_tracks), degrees.pop()

    def multiply(self, g: CremonaElement, h: CremonaElement) -> CremonaElement:
        """g o h (apply h first).  Substitutes h's coordinates into g's
        polynomials, so the cost scales with the size of the *left* factor;
        walk accumulators exploit this by keeping the big factor on the right.
        Cancellation in the generator word is simplified symbolically before
        any polynomial work."""
        word = self._reduce_word(g.word + h.word)
        if word == g.word + h.word:
            tracks, degree = self._compose_tracks(
                g.word, g.tracks, h.tracks, g.degree * h.degree
            )
            return CremonaElement(word, degree, tracks)
        return self._compose_word(word)

    def _compose_word(self, word: tuple[int, ...]) -> CremonaElement:
        result = self.identity()
        for letter in reversed(word):
            atom = self._atoms[abs(letter) - 1]
            outer_tracks = tuple(
                (p, self._atom_triple(letter, slot))
                for slot, p in enumerate(self.primes)
            )
            tracks, degree = self._compose_tracks(
                (letter,), outer_tracks, result.tracks, atom.degree * result.degree
            )
            result = CremonaElement((letter,) + result.word, degree, tracks)
        return result

    def inverse(self, g: CremonaElement) -> CremonaElement:
        word = tuple(-letter for letter in reversed(g.word))
        return self._compose_word(self._reduce_word(word))

    # -- the isometric action --------------------------------------------------

    def displacement(self, g: CremonaElement) -> float:
        return math.acosh(g.degree)

    def orbit_distance(self, g: CremonaElement) -> float:
        return math.acosh(g.degree)

    def power(self, g: CremonaElement, m: int) -> CremonaElement:
        """g^m, composed letter by letter along the reduced power word.

        Composing through the word keeps every substitution in the cheap
        direction (the big running map slots into a small generator), which
        beats repeated ``multiply(g, power)`` once g itself is large.
        """
        if m < 0:
            return self.power(self.inverse(g), -m)
        return self._compose_word(self._reduce_word(g.word * m))

    def degree_sequence(self, g: CremonaElement, budget: int) -> list[int]:
        """[deg g, deg g^2, ..., deg g^budget]; ResourceError carries the
        partial sequence when the cap interrupts the iteration."""
        if budget < 1:
            raise InputError("budget must be >= 1")
        seq = [g.degree]
        for m in range(2, budget + 1):
            try:
                power = self.power(g, m)
            except ResourceError as err:
                raise ResourceError(str(err), payload={"degree_sequence": seq}) from None
            seq.append(power.degree)
        return seq

    def translation_length_estimate(self, g: CremonaElement, budget: int) -> float:
        """min over 1 <= m <= budget of log(deg g^m)/m.

        ``log deg`` is subadditive along powers and converges to
        ``log(dynamical degree)``, which equals the translation length on the
        hyperboloid; the running minimum keeps the estimate one-sided."""
        if budget < 1:
            raise InputError("budget must be >= 1")
        try:
            seq = self.degree_sequence(g, budget)
        except ResourceError as err:
            seq = err.payload["degree_sequence"]
            partial = min(math.log(d) / (m + 1) for m, d in enumerate(seq))
            raise ResourceError(
                f"degree cap while estimating translation length of {g!r}",
                payload={"partial_estimate": partial, "degree_sequence": seq},
            ) from None
        return min(math.log(d) / (m + 1) for m, d in enumerate(seq))

    def classify(self, g: CremonaElement, budget: int) -> IsometryClass:
        if budget < 4:
            raise InputError("classification budget must be >= 4")
        mono = self._as_monomial(g)
        if mono is not None:
            # exact route: spectral radius of the exponent matrix decides
            return MonomialModel().classify(mono, budget)
        try:
            seq = self.degree_sequence(g, budget)
        except ResourceError:
            # the degree blew past the cap: certainly unbounded, and the
            # partial estimate cannot certify loxodromic growth
            return IsometryClass.UNDETERMINED
        if any(d == 1 for d in seq):
            # some power is linear: the basepoint orbit is finite, hence bounded
            return IsometryClass.ELLIPTIC
        estimate = min(math.log(d) / (m + 1) for m, d in enumerate(seq))
        if estimate >= LOXODROMIC_THRESHOLD:
            return IsometryClass.LOXODROMIC
        half = len(seq) // 2
        if max(seq[half:]) <= max(seq[:half]):
            return IsometryClass.ELLIPTIC
        if estimate < LOXODROMIC_THRESHOLD / 2:
            return IsometryClass.PARABOLIC
        return IsometryClass.UNDETERMINED


@dataclass(frozen=True)
class DynamicalDegreeEstimate:
    value: float
    degree_sequence: tuple[int, ...]


def dynamical_degree_estimate(
    model: CremonaModel, f: CremonaElement, budget: int
) -> DynamicalDegreeEstimate:
    """min over 1 <= m <= budget of (deg f^m)^(1/m).

    Submultiplicativity makes every term an upper bound for the dynamical
    degree and the running minimum non-increasing in the budget.  The full
    degree sequence rides along for convergence inspection.
    """
    if budget < 2:
        raise InputError("dynamical degree budget must be >= 2")
    seq = model.degree_sequence(f, budget)  # ResourceError carries partials
    value = min(d ** (1.0 / (m + 1)) for m, d in enumerate(seq))
    return DynamicalDegreeEstimate(value, tuple(seq))


# ---------------------------------------------------------------------------
# A pure matrix oracle for measures supported on monomial maps.


class MonomialModel(ActionOracle):
    """Monomial maps acting through their exponent matrices only.

    Matrix powers stay exact far beyond any polynomial degree cap, which is
    the point: these are the loxodromic maps excluded from weak proper
    discontinuity, kept around as a contrasting model.
    """

    def identity(self) -> MonomialMap:
        return MonomialMap(1, 0, 0, 1)

    def multiply(self, g: MonomialMap, h: MonomialMap) -> MonomialMap:
        # exponent vectors transform linearly, so (g o h) has matrix M_g M_h
        return g.matmul(h)

    def inverse(self, g: MonomialMap) -> MonomialMap:
        return g.inverse()

    def displacement(self, g: MonomialMap) -> float:
        return math.acosh(g.degree())

    def translation_length_estimate(self, g: MonomialMap, budget: int) -> float:
        if budget < 1:
            raise InputError("budget must be >= 1")
        return math.log(g.spectral_radius())

    def classify(self, g: MonomialMap, budget: int) -> IsometryClass:
        radius = g.spectral_radius()
        if radius > 1.0 + 1e-12:
            return IsometryClass.LOXODROMIC
        power = g
        for _ in range(6):  # torsion orders in GL2(Z) divide 6 or equal 4
            if power.is_identity():
                return IsometryClass.ELLIPTIC
            power = power.matmul(g)
        return IsometryClass.PARABOLIC
