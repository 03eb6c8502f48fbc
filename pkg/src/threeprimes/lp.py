"""Exact-rational linear programming for the support-size optimization.

Covers the admissible size-triple set M (|M| = 34), the LP family over
variables y_{ij} with the 3/2 sum constraints, a two-phase tableau simplex
with Bland's rule over Fractions, and exact optimality certificates
(primal + dual + strong duality + complementary slackness, all verified
before a certificate is returned).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError
from .kernels import size_qualifies

LE = "<="
GE = ">="

THREE_HALVES = Fraction(3, 2)
MAX_SUPPORT = 8


def t_value(x, y, z) -> Fraction:
    """T(x,y,z) = xy + yz + zx - 5(x+y+z), exact."""
    x, y, z = Fraction(x), Fraction(y), Fraction(z)
    return x * y + y * z + z * x - 5 * (x + y + z)


# spot values displayed in the contradiction chain; all must be negative
SPOT_VALUES = (
    ((2, 7, 7), t_value(2, 7, 7)),
    ((3, Fraction(25, 4), Fraction(25, 4)), t_value(3, Fraction(25, 4), Fraction(25, 4))),
    ((4, 4, Fraction(15, 2)), t_value(4, 4, Fraction(15, 2))),
)


@dataclass(frozen=True)
class SizeTriple:
    n1: int
    n2: int
    n3: int

    def __post_init__(self):
        if not (0 <= self.n1 <= self.n2 <= self.n3 <= MAX_SUPPORT):
            raise DomainError(f"sizes must satisfy 0 <= n1 <= n2 <= n3 <= 8, got {self}")

    def qualifies(self) -> bool:
        return size_qualifies(self.n1, self.n2, self.n3)

    def astuple(self) -> tuple[int, int, int]:
        return (self.n1, self.n2, self.n3)


def admissible_triples() -> list[SizeTriple]:
    """All ordered size triples satisfying the quadratic inequality."""
    out = []
    for a in range(MAX_SUPPORT + 1):
        for b in range(a, MAX_SUPPORT + 1):
            for c in range(b, MAX_SUPPORT + 1):
                t = SizeTriple(a, b, c)
                if t.qualifies():
                    out.append(t)
    return out


@dataclass(frozen=True)
class LinearConstraint:
    coeffs: tuple[Fraction, ...]
    relation: str
    rhs: Fraction

    def __post_init__(self):
        if self.relation not in (LE, GE):
            raise DomainError(f"relation must be <= or >=, got {self.relation!r}")
        object.__setattr__(self, "coeffs", tuple(Fraction(v) for v in self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))


@dataclass
class RationalLp:
    """maximize objective . y subject to the constraint rows and the box
    0 <= y_j <= upper_bounds[j], all data exact rationals."""

    n_vars: int
    objective: tuple[Fraction, ...]
    constraints: list[LinearConstraint]
    upper_bounds: tuple[Fraction, ...]
    var_names: tuple[str, ...] = ()

    def __post_init__(self):
        self.objective = tuple(Fraction(v) for v in self.objective)
        self.upper_bounds = tuple(Fraction(v) for v in self.upper_bounds)
        if len(self.objective) != self.n_vars or len(self.upper_bounds) != self.n_vars:
            raise DomainError("objective/bounds length mismatch")
        for row in self.constraints:
            if len(row.coeffs) != self.n_vars:
                raise DomainError("constraint width mismatch")
        if not self.var_names:
            self.var_names = tuple(f"y{j}" for j in range(self.n_vars))

    def standard_form(self):
        """(A, b, c): maximize c.x s.t. Ax <= b, x >= 0. Constraint rows
        first (>= rows negated), then the upper-bound rows in variable
        order. Deterministic, so certificates can be revalidated."""
        a_rows: list[tuple[Fraction, ...]] = []
        b_vec: list[Fraction] = []
        for row in self.constraints:
            if row.relation == LE:
                a_rows.append(row.coeffs)
                b_vec.append(row.rhs)
            else:
                a_rows.append(tuple(-v for v in row.coeffs))
                b_vec.append(-row.rhs)
        for j in range(self.n_vars):
            unit = tuple(
                Fraction(1) if i == j else Fraction(0) for i in range(self.n_vars)
            )
            a_rows.append(unit)
            b_vec.append(self.upper_bounds[j])
        return a_rows, b_vec, self.objective


@dataclass
class LpCertificate:
    """Exact optimum with a dual certificate for the standard form of the
    originating LP. Validated at construction."""

    optimal_value: Fraction
    primal: tuple[Fraction, ...]
    dual: tuple[Fraction, ...]
    pivots: int

    def validate(self, lp: RationalLp) -> None:
        a_rows, b_vec, c = lp.standard_form()
        x, y = self.primal, self.dual
        assert len(x) == len(c) and len(y) == len(a_rows)
        assert all(v >= 0 for v in x), "primal negativity"
        slacks = []
        for row, rhs in zip(a_rows, b_vec):
            s = rhs - sum(a * v for a, v in zip(row, x))
            assert s >= 0, "primal infeasible"
            slacks.append(s)
        assert all(v >= 0 for v in y), "dual negativity"
        reduced = []
        for j in range(len(c)):
            r = sum(a_rows[i][j] * y[i] for i in range(len(y))) - c[j]
            assert r >= 0, "dual infeasible"
            reduced.append(r)
        primal_obj = sum(cv * xv for cv, xv in zip(c, x))
        dual_obj = sum(bv * yv for bv, yv in zip(b_vec, y))
        assert primal_obj == dual_obj == self.optimal_value, "duality gap"
        for yi, si in zip(y, slacks):
            assert yi * si == 0, "complementary slackness (rows)"
        for xj, rj in zip(x, reduced):
            assert xj * rj == 0, "complementary slackness (columns)"


class InfeasibleError(DomainError):
    """The constraint system admits no feasible point."""


class UnboundedError(DomainError):
    """The objective is unbounded above (impossible for boxed problems)."""


_ZERO = Fraction(0)
_ONE = Fraction(1)


class _Tableau:
    """Dense Fraction tableau; Bland's rule everywhere (lowest eligible
    index), so pivoting is deterministic and never cycles."""

    def __init__(self, a_rows, b_vec, c):
        self.m = len(a_rows)
        self.n = len(c)
        self.c = list(c)
        width = self.n + self.m + 1  # structural + slacks + rhs
        self.rows = []
        for i, (row, rhs) in enumerate(zip(a_rows, b_vec)):
            r = list(row) + [_ZERO] * self.m + [rhs]
            r[self.n + i] = _ONE
            self.rows.append(r)
        self.basis = [self.n + i for i in range(self.m)]
        self.z = [_ZERO] * width
        self.pivots = 0

    def _pivot(self, pr: int, pc: int):
        rows = self.rows
        prow = rows[pr]
        piv = prow[pc]
        inv = 1 / piv
        rows[pr] = prow = [v * inv for v in prow]
        for i in range(self.m):
            if i == pr:
                continue
            f = rows[i][pc]
            if f:
                row = rows[i]
                rows[i] = [a - f * p for a, p in zip(row, prow)]
        f = self.z[pc]
        if f:
            self.z = [a - f * p for a, p in zip(self.z, prow)]
        self.basis[pr] = pc
        self.pivots += 1

    def _bland_iterate(self, cols):
        while True:
            enter = -1
            for j in cols:
                if self.z[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return
            leave = -1
            best = None
            for i in range(self.m):
                a = self.rows[i][enter]
                if a > 0:
                    ratio = self.rows[i][-1] / a
                    if best is None or ratio < best or (
                        ratio == best and self.basis[i] < self.basis[leave]
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                raise UnboundedError("objective unbounded above")
            self._pivot(leave, enter)

    def set_objective(self, c):
        width = self.n + self.m + 1
        z = [_ZERO] * width
        for j, cj in enumerate(c):
            z[j] = -cj
        for i, bi in enumerate(self.basis):
            f = z[bi]
            if f:
                row = self.rows[i]
                z = [a - f * p for a, p in zip(z, row)]
        self.z = z

    def solve(self):
        struct_cols = list(range(self.n + self.m))
        if any(r[-1] < 0 for r in self.rows):
            self._phase1()
        self.set_objective(self.c)
        self._bland_iterate(struct_cols)
        x = [_ZERO] * self.n
        for i, bi in enumerate(self.basis):
            if bi < self.n:
                x[bi] = self.rows[i][-1]
        y = [self.z[self.n + i] for i in range(self.m)]
        value = sum(cj * xj for cj, xj in zip(self.c, x))
        return tuple(x), tuple(y), value

    def _phase1(self):
        # auxiliary variable with coefficient -1 in every row; one forced
        # pivot at the most negative rhs makes the tableau feasible
        aux = self.n + self.m
        for r in self.rows:
            r.insert(aux, -_ONE)
        self.z = [_ZERO] * (self.n + self.m + 2)
        self.z[aux] = _ONE  # maximize -x0
        worst = min(range(self.m), key=lambda i: (self.rows[i][-1], i))
        self._pivot(worst, aux)
        self._bland_iterate(list(range(self.n + self.m + 1)))
        if self.z[-1] != 0:  # optimum of -x0 is negative
            raise InfeasibleError("constraint system infeasible")
        if aux in self.basis:
            i = self.basis.index(aux)
            enter = next(
                (j for j in range(self.n + self.m) if self.rows[i][j] != 0), None
            )
            if enter is None:
                del self.rows[i]
                del self.basis[i]
                self.m -= 1
            else:
                self._pivot(i, enter)
        for r in self.rows:
            del r[aux]


def solve_exact(lp: RationalLp) -> LpCertificate:
    """Exact optimum of a RationalLp with a validated dual certificate.
    Deterministic (Bland's rule); raises InfeasibleError for empty systems."""
    a_rows, b_vec, c = lp.standard_form()
    tab = _Tableau(a_rows, b_vec, c)
    x, y, value = tab.solve()
    cert = LpCertificate(optimal_value=value, primal=x, dual=y, pivots=tab.pivots)
    cert.validate(lp)
    return cert


# --------------------------------------------------------------------------
# the support-size LP family
# --------------------------------------------------------------------------

def constraint_index_set(t: SizeTriple) -> list[tuple[int, int, int]]:
    """J: triples (j1, j2, j3), 1 <= j_i <= n_i, satisfying the quadratic
    inequality; lexicographic order."""
    out = []
    for j1 in range(1, t.n1 + 1):
        for j2 in range(1, t.n2 + 1):
            for j3 in range(1, t.n3 + 1):
                if size_qualifies(j1, j2, j3):
                    out.append((j1, j2, j3))
    return out


def var_layout(t: SizeTriple) -> tuple[tuple[str, ...], tuple[int, int, int]]:
    """Flattened (i, j) -> offset layout with readable names."""
    names = []
    sizes = t.astuple()
    for i, ni in enumerate(sizes, start=1):
        for j in range(1, ni + 1):
            names.append(f"y{i}{j}")
    offsets = (0, sizes[0], sizes[0] + sizes[1])
    return tuple(names), offsets


def block_sum_constraint(
    t: SizeTriple, blocks: tuple[int, ...], relation: str, rhs
) -> LinearConstraint:
    """Constraint on F_{i} sums, e.g. F1 + F2 >= 8 or F1 >= 3."""
    _, offsets = var_layout(t)
    sizes = t.astuple()
    n = sum(sizes)
    coeffs = [Fraction(0)] * n
    for i in blocks:
        for j in range(sizes[i - 1]):
            coeffs[offsets[i - 1] + j] = Fraction(1)
    return LinearConstraint(tuple(coeffs), relation, Fraction(rhs))


def build_prop15_lp(
    t: SizeTriple,
    extra: tuple[LinearConstraint, ...] = (),
    monotone: bool = True,
) -> RationalLp:
    """The LP for one admissible size triple: variables y_{ij} in [0, 1],
    rows y_{1j1} + y_{2j2} + y_{3j3} <= 3/2 for every (j1,j2,j3) in J,
    monotonicity rows y_{i,j} >= y_{i,j+1} (mirroring the sorted-values
    normalization), extra rows verbatim; objective = sum of all variables."""
    if not t.qualifies():
        raise DomainError(f"{t} is not admissible")
    names, offsets = var_layout(t)
    sizes = t.astuple()
    n = sum(sizes)
    rows: list[LinearConstraint] = []
    for (j1, j2, j3) in constraint_index_set(t):
        coeffs = [Fraction(0)] * n
        coeffs[offsets[0] + j1 - 1] += 1
        coeffs[offsets[1] + j2 - 1] += 1
        coeffs[offsets[2] + j3 - 1] += 1
        rows.append(LinearConstraint(tuple(coeffs), LE, THREE_HALVES))
    if monotone:
        for i, ni in enumerate(sizes):
            for j in range(ni - 1):
                coeffs = [Fraction(0)] * n
                coeffs[offsets[i] + j] = -1
                coeffs[offsets[i] + j + 1] = 1
                rows.append(LinearConstraint(tuple(coeffs), LE, Fraction(0)))
    rows.extend(extra)
    return RationalLp(
        n_vars=n,
        objective=tuple(Fraction(1) for _ in range(n)),
        constraints=rows,
        upper_bounds=tuple(Fraction(1) for _ in range(n)),
        var_names=names,
    )


# --------------------------------------------------------------------------
# the certified value table
# --------------------------------------------------------------------------

PEAK_TRIPLE = (2, 8, 8)
M1_TRIPLES = ((2, 7, 8), (3, 6, 8), (3, 8, 8), (4, 5, 8), (4, 8, 8))


@dataclass
class TableRow:
    triple: tuple[int, int, int]
    value: Fraction
    expected: str
    ok: bool
    relaxed_value: Fraction
    certificate: LpCertificate
    extra: str = ""

    def value_str(self) -> str:
        return f"{self.value.numerator}/{self.value.denominator}"


@dataclass
class TableReport:
    rows: list[TableRow] = field(default_factory=list)
    constrained_rows: list[TableRow] = field(default_factory=list)
    mismatches: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def certify_table() -> TableReport:
    """Solve the LP for all 34 admissible triples and the two constrained
    variants; certify the value table: 16 at (2,8,8), 31/2 on M1, <= 15
    elsewhere, <= 15 for both constrained runs. The relaxed optimum (no
    monotonicity rows) is solved alongside and must never be smaller."""
    report = TableReport()
    triples = admissible_triples()
    if len(triples) != 34:
        report.mismatches.append(f"|M| = {len(triples)}, expected 34")
    for t in triples:
        cert = solve_exact(build_prop15_lp(t))
        relaxed = solve_exact(build_prop15_lp(t, monotone=False))
        key = t.astuple()
        if key == PEAK_TRIPLE:
            expected = "= 16"
            ok = cert.optimal_value == 16
        elif key in M1_TRIPLES:
            expected = "= 31/2"
            ok = cert.optimal_value == Fraction(31, 2)
        else:
            expected = "<= 15"
            ok = cert.optimal_value <= 15
        if relaxed.optimal_value < cert.optimal_value:
            report.mismatches.append(f"{key}: relaxed optimum below monotone optimum")
        if not ok:
            report.mismatches.append(
                f"{key}: optimum {cert.optimal_value} violates {expected}"
            )
        report.rows.append(
            TableRow(key, cert.optimal_value, expected, ok, relaxed.optimal_value, cert)
        )
    for key, blocks, rhs, label in (
        ((4, 5, 8), (1, 2), 8, "F1+F2 >= 8"),
        ((4, 8, 8), (1,), 3, "F1 >= 3"),
    ):
        t = SizeTriple(*key)
        extra = (block_sum_constraint(t, blocks, GE, rhs),)
        cert = solve_exact(build_prop15_lp(t, extra=extra))
        relaxed = solve_exact(build_prop15_lp(t, extra=extra, monotone=False))
        ok = cert.optimal_value <= 15
        if not ok:
            report.mismatches.append(
                f"{key} with {label}: optimum {cert.optimal_value} exceeds 15"
            )
        report.constrained_rows.append(
            TableRow(key, cert.optimal_value, "<= 15", ok, relaxed.optimal_value, cert, label)
        )
    return report
