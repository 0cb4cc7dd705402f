"""
Walk-Count Moment Core

Exact limiting spectral moments of sparse random-graph adjacency matrices.

W_u(v) counts the even ordered walks of 2u steps that return to the root
v times. The limiting moment m_k is the row sum of W_k. Every tree edge a
walk creates carries one factor of the edge intensity p, so the same
recurrence yields m_k(p) for any fixed p >= 0.
"""

import math
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

logger = logging.getLogger(__name__)

# Largest order the table builder accepts
MAX_ORDER_CEILING = 64

# Starting constants for the bound checks
DEFAULT_C1 = 2
DEFAULT_C2 = 2

# Largest integer constant tried by the constant search
CONSTANT_SEARCH_LIMIT = 8

Exact = Union[int, Fraction]


class InvalidIntensityError(ValueError):
    """Raised for negative or non-rational edge intensities."""


def as_intensity(value) -> Fraction:
    """
    Convert a user-supplied intensity to an exact nonnegative rational.

    Accepts ints, Fractions, Decimals and strings such as "1/2" or "0.25".
    Floats are read through their shortest decimal repr, so 0.1 becomes 1/10.
    """
    if isinstance(value, bool):
        raise InvalidIntensityError(f"Intensity must be a number, got {value!r}")
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidIntensityError(f"Intensity must be finite, got {value!r}")
        value = repr(value)
    try:
        intensity = Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise InvalidIntensityError(f"Intensity must be an exact rational, got {value!r}") from e
    if intensity < 0:
        raise InvalidIntensityError(f"Intensity must be nonnegative, got {intensity}")
    return intensity


def _normalize(value: Fraction) -> Exact:
    """Collapse integral Fractions to int."""
    if value.denominator == 1:
        return value.numerator
    return value


@dataclass(frozen=True)
class WalkCountTable:
    """
    Triangular table of W_u(v) for 0 <= v <= u <= max_order.

    Rows are stored as integers scaled by b^u, where b is the denominator
    of the intensity; a walk of 2u steps creates at most u edges, so every
    entry is an integer multiple of b^-u.
    """
    max_order: int
    intensity: Fraction
    scaled_rows: Tuple[Tuple[int, ...], ...] = field(repr=False)

    @property
    def is_integral(self) -> bool:
        """True when every entry is an integer."""
        return all(
            x % self._denominator(u) == 0
            for u, row in enumerate(self.scaled_rows)
            for x in row
        )

    def _denominator(self, u: int) -> int:
        return self.intensity.denominator ** u

    def entry(self, u: int, v: int) -> Exact:
        """W_u(v); zero for v > u."""
        if not 0 <= u <= self.max_order:
            raise IndexError(f"Order {u} outside table range 0..{self.max_order}")
        if v < 0:
            raise IndexError(f"Return count must be nonnegative, got {v}")
        if v > u:
            return 0
        scaled = self.scaled_rows[u][v]
        if self.intensity.denominator == 1:
            return scaled
        return _normalize(Fraction(scaled, self._denominator(u)))

    def column(self, u: int) -> Dict[int, Exact]:
        """All W_u(v) for v = 0..u."""
        return {v: self.entry(u, v) for v in range(u + 1)}

    def row_sum(self, u: int) -> Exact:
        if not 0 <= u <= self.max_order:
            raise IndexError(f"Order {u} outside table range 0..{self.max_order}")
        total = sum(self.scaled_rows[u])
        if self.intensity.denominator == 1:
            return total
        return _normalize(Fraction(total, self._denominator(u)))

    def rows(self) -> List[Dict]:
        """Long-format records (u, v, value)."""
        return [
            {'u': u, 'v': v, 'value': self.entry(u, v)}
            for u in range(self.max_order + 1)
            for v in range(u + 1)
        ]


def build_walk_table(max_order: int, intensity=1) -> WalkCountTable:
    """
    Build W_u(v) bottom-up from the first-edge recurrence.

    The walk is split at its first edge (rho, alpha), passed 2i times: the
    part hanging below alpha is a walk of 2(u-i-j) steps with l returns to
    alpha, the rest is a walk of 2j steps with v-i returns to rho. The
    interleavings are counted by C(l+i-1, i-1) and C(v-1, i-1). The sum
    over l depends only on (i, u-i-j), so it is accumulated once per row.

    Args:
        max_order: Largest u to compute (0..MAX_ORDER_CEILING)
        intensity: Edge intensity p, an exact nonnegative rational

    Returns:
        WalkCountTable with exact entries
    """
    if max_order < 0:
        raise ValueError(f"max_order must be nonnegative, got {max_order}")
    if max_order > MAX_ORDER_CEILING:
        raise ValueError(
            f"max_order {max_order} exceeds the ceiling {MAX_ORDER_CEILING}"
        )
    p = as_intensity(intensity)
    a, b = p.numerator, p.denominator
    b_powers = [b ** i for i in range(max_order + 1)]

    rows: List[List[int]] = [[1]]
    # weighted[n][i] = sum_l S_n(l) * C(l+i-1, i-1), for 1 <= i <= max_order - n
    weighted: List[List[int]] = [[0] + [1] * max_order]

    for u in range(1, max_order + 1):
        row = [0] * (u + 1)
        for v in range(1, u + 1):
            total = 0
            for i in range(1, v + 1):
                partial = 0
                for j in range(v - i, u - i + 1):
                    second = rows[j][v - i]
                    if second:
                        partial += second * weighted[u - i - j][i]
                if partial:
                    total += b_powers[i - 1] * math.comb(v - 1, i - 1) * partial
            row[v] = a * total
        rows.append(row)
        weighted.append([0] + [
            sum(x * math.comb(l + i - 1, i - 1) for l, x in enumerate(row))
            for i in range(1, max_order - u + 1)
        ])

    logger.debug(f"Built walk table up to order {max_order} at intensity {p}")
    return WalkCountTable(
        max_order=max_order,
        intensity=p,
        scaled_rows=tuple(tuple(row) for row in rows),
    )


def direct_entry(table: WalkCountTable, u: int, v: int) -> Exact:
    """
    Evaluate W_u(v) by the plain triple sum over the stored lower orders.

    Independent of the factored evaluation in build_walk_table.
    """
    if not 0 <= u <= table.max_order:
        raise IndexError(f"Order {u} outside table range 0..{table.max_order}")
    if v > u:
        return 0
    if v == 0:
        return 1 if u == 0 else 0
    total = 0
    for i in range(1, v + 1):
        for j in range(v - i, u - i + 1):
            for l in range(0, u - i - j + 1):
                total += (
                    table.entry(u - i - j, l)
                    * math.comb(l + i - 1, i - 1)
                    * math.comb(v - 1, i - 1)
                    * table.entry(j, v - i)
                )
    return _normalize(Fraction(table.intensity) * total)


def moment_limit(k: int, table: WalkCountTable) -> Exact:
    """m_k = sum_r W_k(r); m_0 = 1."""
    if not 0 <= k <= table.max_order:
        raise ValueError(f"k={k} outside table range 0..{table.max_order}")
    return table.row_sum(k)


@dataclass(frozen=True)
class MomentSequence:
    """Limiting moments m_1..m_K for one intensity; odd limits vanish."""
    intensity: Fraction
    even_moments: Tuple[Exact, ...]
    odd_moments_zero: bool = True

    @property
    def max_k(self) -> int:
        return len(self.even_moments)

    def moment(self, k: int) -> Exact:
        """m_k, with m_0 = 1."""
        if k == 0:
            return 1
        if not 1 <= k <= self.max_k:
            raise ValueError(f"k={k} outside computed range 0..{self.max_k}")
        return self.even_moments[k - 1]

    def limit(self, s: int) -> Exact:
        """Limit of E N^-1 Tr A^s."""
        if s % 2 == 1:
            return 0
        return self.moment(s // 2)


def moment_sequence(max_k: int, intensity=1,
                    table: Optional[WalkCountTable] = None) -> MomentSequence:
    """
    Limiting moments m_1..m_{max_k}.

    Args:
        max_k: Number of even moments
        intensity: Edge intensity p
        table: Optional prebuilt table with matching intensity

    Returns:
        MomentSequence
    """
    if max_k < 0:
        raise ValueError(f"max_k must be nonnegative, got {max_k}")
    p = as_intensity(intensity)
    if table is None:
        table = build_walk_table(max_k, p)
    elif table.intensity != p or table.max_order < max_k:
        raise ValueError("Table does not match the requested intensity/order")
    return MomentSequence(
        intensity=p,
        even_moments=tuple(moment_limit(k, table) for k in range(1, max_k + 1)),
    )


def moment_polynomial(k: int) -> List[int]:
    """
    Integer coefficients c_0..c_k of m_k(p) = sum_e c_e p^e.

    c_e counts the walk classes of 2k steps on trees with e edges. The
    coefficients are recovered from the tables at p = 0..k by forward
    differences, so c_k is the Catalan number and c_1 = 1 for k >= 1.
    """
    if not 0 <= k <= MAX_ORDER_CEILING:
        raise ValueError(f"k={k} outside 0..{MAX_ORDER_CEILING}")
    values = [Fraction(moment_limit(k, build_walk_table(k, x))) for x in range(k + 1)]

    differences = []
    current = values
    for _ in range(k + 1):
        differences.append(current[0])
        current = [current[t + 1] - current[t] for t in range(len(current) - 1)]

    coeffs = [Fraction(0)] * (k + 1)
    falling = [Fraction(1)]  # x(x-1)...(x-r+1), low degree first
    for r in range(k + 1):
        weight = differences[r] / math.factorial(r)
        for e, c in enumerate(falling):
            coeffs[e] += weight * c
        falling = [
            (falling[e - 1] if e >= 1 else 0) - r * (falling[e] if e < len(falling) else 0)
            for e in range(len(falling) + 1)
        ]

    if any(c.denominator != 1 for c in coeffs):
        raise ArithmeticError(f"Non-integral coefficient in m_{k}(p): {coeffs}")
    return [int(c) for c in coeffs]


# =============================================================================
# BOUNDS
# =============================================================================

class BoundFamily(Enum):
    """The bound families checked against the p = 1 table."""
    WALK_UPPER = 'walk_upper'        # W_k(r) <= (c1 k)^(2r)
    STAR_LOWER = 'star_lower'        # W_k(k) >= (k/2)!, k even
    MOMENT_UPPER = 'moment_upper'    # m_2k <= (c2 k)^(2k)
    MOMENT_LOWER = 'moment_lower'    # m_2k >= (k/2)^(k/2), k even


@dataclass(frozen=True)
class BoundRecord:
    """One bound instance with the two compared values."""
    family: BoundFamily
    k: int
    r: Optional[int]
    value: Exact
    bound: Exact
    holds: bool

    def to_dict(self) -> Dict:
        return {
            'family': self.family.value,
            'k': self.k,
            'r': self.r,
            'value': self.value,
            'bound': self.bound,
            'holds': self.holds,
        }


@dataclass
class BoundReport:
    """Pass/fail records for every bound instance on the checked range."""
    max_order: int
    c1: Fraction
    c2: Fraction
    records: List[BoundRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(record.holds for record in self.records)

    def failures(self) -> List[BoundRecord]:
        return [record for record in self.records if not record.holds]

    def by_family(self, family: BoundFamily) -> List[BoundRecord]:
        return [record for record in self.records if record.family == family]

    def family_passed(self, family: BoundFamily) -> bool:
        return all(record.holds for record in self.by_family(family))


def _unit_table(max_order: int, table: Optional[WalkCountTable]) -> WalkCountTable:
    if table is None:
        return build_walk_table(max_order, 1)
    if table.intensity != 1:
        raise ValueError(f"Bounds are stated for intensity 1, table has {table.intensity}")
    if table.max_order < max_order:
        raise ValueError(f"Table order {table.max_order} below requested {max_order}")
    return table


def _walk_upper_records(table: WalkCountTable, max_order: int, c1: Fraction) -> List[BoundRecord]:
    records = []
    for k in range(max_order + 1):
        for r in range(k + 1):
            value = table.entry(k, r)
            bound = _normalize((c1 * k) ** (2 * r))
            records.append(BoundRecord(BoundFamily.WALK_UPPER, k, r, value, bound, value <= bound))
    return records


def _moment_upper_records(table: WalkCountTable, max_order: int, c2: Fraction) -> List[BoundRecord]:
    records = []
    for k in range(1, max_order // 2 + 1):
        value = table.row_sum(2 * k)
        bound = _normalize((c2 * k) ** (2 * k))
        records.append(BoundRecord(BoundFamily.MOMENT_UPPER, k, None, value, bound, value <= bound))
    return records


def check_bounds(max_order: int, c1=DEFAULT_C1, c2=DEFAULT_C2,
                 table: Optional[WalkCountTable] = None) -> BoundReport:
    """
    Check the growth bounds of the p = 1 table on orders up to max_order.

    Args:
        max_order: Largest order checked (>= 2)
        c1: Constant in W_k(r) <= (c1 k)^(2r)
        c2: Constant in m_2k <= (c2 k)^(2k)
        table: Optional prebuilt intensity-1 table

    Returns:
        BoundReport with one record per bound instance
    """
    if max_order < 2:
        raise ValueError(f"max_order must be at least 2, got {max_order}")
    c1, c2 = Fraction(c1), Fraction(c2)
    if c1 <= 0 or c2 <= 0:
        raise ValueError(f"Bound constants must be positive, got c1={c1}, c2={c2}")
    table = _unit_table(max_order, table)

    report = BoundReport(max_order=max_order, c1=c1, c2=c2)
    report.records.extend(_walk_upper_records(table, max_order, c1))

    for k in range(2, max_order + 1, 2):
        value = table.entry(k, k)
        bound = math.factorial(k // 2)
        report.records.append(BoundRecord(BoundFamily.STAR_LOWER, k, k, value, bound, value >= bound))

    report.records.extend(_moment_upper_records(table, max_order, c2))

    for k in range(2, max_order // 2 + 1, 2):
        value = table.row_sum(2 * k)
        bound = (k // 2) ** (k // 2)
        report.records.append(BoundRecord(BoundFamily.MOMENT_LOWER, k, None, value, bound, value >= bound))

    logger.info(
        f"Checked {len(report.records)} bound instances up to order {max_order}: "
        f"{len(report.failures())} failing"
    )
    return report


def smallest_sufficient_constants(max_order: int, limit: int = CONSTANT_SEARCH_LIMIT,
                                  table: Optional[WalkCountTable] = None
                                  ) -> Tuple[Optional[int], Optional[int]]:
    """
    Smallest integer c1, c2 <= limit for which each upper-bound family holds.

    W_k(1) = m_{k-1}, so the walk bound at r = 1 eventually fails for any
    fixed c1; None is returned for a family no constant <= limit satisfies.
    """
    if max_order < 2:
        raise ValueError(f"max_order must be at least 2, got {max_order}")
    table = _unit_table(max_order, table)

    c1 = next(
        (c for c in range(1, limit + 1)
         if all(rec.holds for rec in _walk_upper_records(table, max_order, Fraction(c)))),
        None,
    )
    c2 = next(
        (c for c in range(1, limit + 1)
         if all(rec.holds for rec in _moment_upper_records(table, max_order, Fraction(c)))),
        None,
    )
    return c1, c2


# =============================================================================
# GROWTH
# =============================================================================

@dataclass(frozen=True)
class GrowthPoint:
    k: int
    root: float                 # m_k^(1/k)
    increases: Optional[bool]   # m_{k+1}^(1/(k+1)) > m_k^(1/k); None at the end


def _log_exact(x: Exact) -> float:
    x = Fraction(x)
    return math.log(x.numerator) - math.log(x.denominator)


def growth_profile(sequence: MomentSequence) -> List[GrowthPoint]:
    """
    m_k^(1/k) along the sequence, with exact strict-increase flags.

    The flag compares m_{k+1}^k against m_k^(k+1) in exact arithmetic.
    """
    points = []
    for k in range(1, sequence.max_k + 1):
        m_k = Fraction(sequence.moment(k))
        root = math.exp(_log_exact(m_k) / k) if m_k > 0 else 0.0
        increases = None
        if k < sequence.max_k:
            m_next = Fraction(sequence.moment(k + 1))
            increases = m_next ** k > m_k ** (k + 1)
        points.append(GrowthPoint(k=k, root=root, increases=increases))
    return points
