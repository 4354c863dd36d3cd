"""Exact simplex solver for small rational linear programs.

A textbook two-phase tableau simplex, specialised for the desk-scale
problems this package generates (a handful of variables, at most a few
hundred constraints).  Free variables are split into differences of
nonnegative ones, every pivot uses Bland's smallest-index rule so the
method terminates without any anti-degeneracy perturbation, and because
arithmetic is exact the Optimal/Infeasible/Unbounded trichotomy is decided
exactly rather than up to a tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .exactla import Mat, ONE, Vec, ZERO, dot, matvec, shape


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpResult:
    status: LpStatus
    optimum: Fraction | None
    witness: Vec | None


class _Tableau:
    """Dense simplex tableau; rows carry the rhs in the last column."""

    def __init__(self, rows: list[list[Fraction]], basis: list[int]) -> None:
        self.rows = rows
        self.basis = basis

    def pivot(self, row: int, col: int) -> None:
        piv = self.rows[row][col]
        inv = 1 / piv
        self.rows[row] = [v * inv for v in self.rows[row]]
        for r in range(len(self.rows)):
            if r != row and self.rows[r][col] != 0:
                factor = self.rows[r][col]
                pivot_row = self.rows[row]
                self.rows[r] = [v - factor * p for v, p in zip(self.rows[r], pivot_row)]
        self.basis[row] = col

    def minimize(self, cost: list[Fraction], allowed: set[int]) -> tuple[str, list[Fraction]]:
        """Run Bland-rule simplex on the given cost vector.

        ``cost`` has one entry per column plus the objective constant in the
        last slot; ``allowed`` restricts the columns eligible to enter the
        basis.  Returns the final status and the reduced cost row.
        """
        z = list(cost)
        for r, basic in enumerate(self.basis):
            if z[basic] != 0:
                factor = z[basic]
                z = [v - factor * p for v, p in zip(z, self.rows[r])]
        ncols = len(z) - 1
        while True:
            entering = next(
                (j for j in range(ncols) if j in allowed and z[j] < 0), None
            )
            if entering is None:
                return "optimal", z
            leaving = None
            best_ratio: Fraction | None = None
            for r, row in enumerate(self.rows):
                coeff = row[entering]
                if coeff > 0:
                    ratio = row[-1] / coeff
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and self.basis[r] < self.basis[leaving])
                    ):
                        best_ratio = ratio
                        leaving = r
            if leaving is None:
                return "unbounded", z
            self.pivot(leaving, entering)
            for r, basic in enumerate(self.basis):
                if z[basic] != 0:
                    factor = z[basic]
                    z = [v - factor * p for v, p in zip(z, self.rows[r])]


def _check_system(label: str, system: tuple[Mat, Vec] | None, nvars: int) -> tuple[Mat, Vec]:
    if system is None:
        return (), ()
    a, b = system
    rows, cols = shape(a)
    if rows != len(b):
        raise ValueError(f"{label} matrix has {rows} rows but rhs has {len(b)}")
    if rows and cols != nvars:
        raise ValueError(f"{label} matrix has {cols} columns for {nvars} variables")
    return a, b


def lp_optimize(
    objective: Vec,
    eq: tuple[Mat, Vec] | None = None,
    ineq: tuple[Mat, Vec] | None = None,
    sense: str = "max",
) -> LpResult:
    """Optimise ``objective . x`` subject to ``A_eq x = b_eq`` and ``A_in x <= b_in``.

    Variables are free (unbounded in sign); add rows to ``ineq`` to bound
    them.  ``sense`` is ``"max"`` or ``"min"``.  The result is exact: when
    Optimal, the witness satisfies every constraint exactly and attains the
    optimum exactly.
    """
    if sense not in ("max", "min"):
        raise ValueError(f"sense must be 'max' or 'min', got {sense!r}")
    nvars = len(objective)
    a_eq, b_eq = _check_system("equality", eq, nvars)
    a_in, b_in = _check_system("inequality", ineq, nvars)

    # Columns: x = u - w with u, w >= 0, then one slack per inequality row.
    nslack = len(a_in)
    base_cols = 2 * nvars + nslack
    raw_rows: list[tuple[list[Fraction], Fraction, int | None]] = []
    for row, rhs in zip(a_eq, b_eq):
        coeffs = [*row] + [-v for v in row] + [ZERO] * nslack
        raw_rows.append((coeffs, rhs, None))
    for idx, (row, rhs) in enumerate(zip(a_in, b_in)):
        coeffs = [*row] + [-v for v in row] + [ZERO] * nslack
        coeffs[2 * nvars + idx] = ONE
        raw_rows.append((coeffs, rhs, 2 * nvars + idx))

    # Normalise to nonnegative rhs; a flipped row loses its natural slack basis.
    rows: list[list[Fraction]] = []
    basis: list[int] = []
    artificial_cols: list[int] = []
    ncols = base_cols
    pending: list[tuple[list[Fraction], Fraction, int | None]] = []
    for coeffs, rhs, slack in raw_rows:
        if rhs < 0:
            coeffs = [-v for v in coeffs]
            rhs = -rhs
            slack = None
        pending.append((coeffs, rhs, slack))
        if slack is None:
            ncols += 1
    col = base_cols
    for coeffs, rhs, slack in pending:
        full = coeffs + [ZERO] * (ncols - base_cols) + [rhs]
        if slack is not None:
            basis.append(slack)
        else:
            full[col] = ONE
            basis.append(col)
            artificial_cols.append(col)
            col += 1
        rows.append(full)

    tableau = _Tableau(rows, basis)
    all_cols = set(range(ncols))

    if artificial_cols:
        phase1 = [ZERO] * (ncols + 1)
        for c in artificial_cols:
            phase1[c] = ONE
        status, z = tableau.minimize(phase1, all_cols)
        if status != "optimal":  # pragma: no cover - phase 1 is always bounded
            raise AssertionError("phase-1 objective cannot be unbounded")
        if -z[-1] != 0:
            return LpResult(LpStatus.INFEASIBLE, None, None)
        # Drive any artificial still in the basis out, or drop its row.
        structural = set(range(base_cols))
        artificial = set(artificial_cols)
        r = 0
        while r < len(tableau.rows):
            if tableau.basis[r] in artificial:
                col = next(
                    (c for c in sorted(structural) if tableau.rows[r][c] != 0), None
                )
                if col is None:
                    del tableau.rows[r]
                    del tableau.basis[r]
                    continue
                tableau.pivot(r, col)
            r += 1
        allowed = structural
    else:
        allowed = set(range(base_cols))

    phase2 = [ZERO] * (ncols + 1)
    sign = -1 if sense == "max" else 1
    for j in range(nvars):
        phase2[j] = sign * objective[j]
        phase2[nvars + j] = -sign * objective[j]
    status, _ = tableau.minimize(phase2, allowed)
    if status == "unbounded":
        return LpResult(LpStatus.UNBOUNDED, None, None)

    levels = [ZERO] * ncols
    for r, basic in enumerate(tableau.basis):
        levels[basic] = tableau.rows[r][-1]
    witness = tuple(levels[j] - levels[nvars + j] for j in range(nvars))
    return LpResult(LpStatus.OPTIMAL, dot(objective, witness), witness)


def stochastic_fixed_point(s: Mat) -> Vec:
    """Probability vector fixed by a column-stochastic matrix.

    Solves ``(S - I) v = 0`` with ``v >= 0`` and ``sum(v) = 1`` exactly,
    delegating the elimination to the simplex kernel as a feasibility
    program.  Such a vector always exists for column-stochastic ``S``; when
    the fixed set is larger than a point, any exact member is returned.
    """
    size, cols = shape(s)
    if size != cols:
        raise ValueError(f"stochastic matrix must be square, got {size}x{cols}")
    for j in range(size):
        column = [s[i][j] for i in range(size)]
        if any(v < 0 for v in column):
            raise ValueError(f"column {j} has a negative entry")
        if sum(column, ZERO) != 1:
            raise ValueError(f"column {j} does not sum to 1")

    eq_rows = [
        tuple(s[i][j] - (ONE if i == j else ZERO) for j in range(size))
        for i in range(size)
    ]
    eq_rows.append((ONE,) * size)
    eq_rhs = (ZERO,) * size + (ONE,)
    nonneg = tuple(
        tuple(-ONE if j == i else ZERO for j in range(size)) for i in range(size)
    )
    result = lp_optimize(
        objective=(ZERO,) * size,
        eq=(tuple(eq_rows), eq_rhs),
        ineq=(nonneg, (ZERO,) * size),
        sense="min",
    )
    if result.status is not LpStatus.OPTIMAL:  # pragma: no cover - always feasible
        raise AssertionError("a column-stochastic matrix always has a fixed point")
    v = result.witness
    assert v is not None
    if matvec(s, v) != v:  # pragma: no cover - guards the solver itself
        raise AssertionError("fixed-point residual is nonzero")
    return v
