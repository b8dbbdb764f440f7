"""Bounded-variable simplex in exact and floating-point arithmetic.

Both engines work on the same standard form:

    min c.x   s.t.   A x + s = b,   l <= x <= u,   slack bounds by relation

with one logical (slack) column per row, so the starting basis is an
identity.  Rows whose starting slack would violate its bounds get an
artificial column instead, removed by a phase-1 pass and then fixed to 0.

EXACT keeps every row of the tableau as a list of Python integers over a
positive per-row denominator (fraction-free, gcd-normalised) and uses
Bland's rule, so it terminates and its answers are exact.  FLOAT uses a
dense numpy tableau, Dantzig pricing, a Harris ratio test, a small bound
perturbation against stalling and periodic reinversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from ..errors import NumericalStall
from ..polytope import Relation
from ..ratlinalg import to_rational
from .model import INF, LpSolution, MipModel, Mode, Sense, Status

PIVOT_TOL = 1e-7
FEAS_TOL = 1e-9
DUAL_TOL = 1e-9
REINVERT_EVERY = 100
STALL_AFTER = 30  # degenerate dual pivots before ties are broken at random


def _is_inf(v) -> bool:
    return isinstance(v, float) and math.isinf(v)


@dataclass
class _StdForm:
    """Rows of the model after scaling, before logical columns are added."""

    n: int
    m: int
    rows: list  # list of {col: coeff}
    b: list
    slack_lo: list
    slack_hi: list
    lo: list
    hi: list
    cost: list  # minimisation costs of the structural columns
    scale: list  # scaled row = scale * original row
    flip: int  # +1 for MIN, -1 for MAX


def _standard_form(model: MipModel, exact: bool) -> _StdForm:
    flip = 1 if model.sense is Sense.MIN else -1
    rows, b, slo, shi, scale = [], [], [], [], []
    for c in model.constraints:
        coeffs = {k: v for k, v in enumerate(c.coeffs) if v != 0}
        if exact:
            den = reduce(math.lcm, (v.denominator for v in coeffs.values()), c.rhs.denominator)
            k = Fraction(den)
            rows.append({j: int(v * den) for j, v in coeffs.items()})
            b.append(c.rhs * den)
        else:
            mx = max((abs(float(v)) for v in coeffs.values()), default=1.0) or 1.0
            k = 1.0 / mx
            rows.append({j: float(v) * k for j, v in coeffs.items()})
            b.append(float(c.rhs) * k)
        scale.append(k)
        zero = Fraction(0) if exact else 0.0
        if c.relation is Relation.LE:
            slo.append(zero), shi.append(INF)
        elif c.relation is Relation.GE:
            slo.append(-INF), shi.append(zero)
        else:
            slo.append(zero), shi.append(zero)
    conv = (lambda v: v) if exact else (lambda v: float(v))
    lo = [v.lower if _is_inf(v.lower) else conv(v.lower) for v in model.variables]
    hi = [v.upper if _is_inf(v.upper) else conv(v.upper) for v in model.variables]
    cost = [conv(flip * c) for c in model.objective]
    return _StdForm(model.n, len(rows), rows, b, slo, shi, lo, hi, cost, scale, flip)


def _initial_value(lo, hi, zero):
    if not _is_inf(lo):
        return lo
    if not _is_inf(hi):
        return hi
    return zero


class _EngineBase:
    """Shared bookkeeping: bounds, values, basis and the phase driver."""

    exact: bool

    def _setup(self, sf: _StdForm):
        zero = Fraction(0) if self.exact else 0.0
        self.zero = zero
        n, m = sf.n, sf.m
        self.n, self.m = n, m
        self.sf = sf
        lo = list(sf.lo) + list(sf.slack_lo)
        hi = list(sf.hi) + list(sf.slack_hi)
        x = [_initial_value(lo[j], hi[j], zero) for j in range(n)]
        sign = []
        art_rows = []
        slack_vals = []
        for i in range(m):
            r = sf.b[i] - sum((v * x[j] for j, v in sf.rows[i].items()), zero)
            if (_is_inf(lo[n + i]) or r >= lo[n + i]) and (_is_inf(hi[n + i]) or r <= hi[n + i]):
                sign.append(1)
                slack_vals.append(r)
            else:
                sb = lo[n + i] if not _is_inf(lo[n + i]) and r < lo[n + i] else hi[n + i]
                slack_vals.append(sb)
                s = 1 if r - sb > 0 else -1
                sign.append(s)
                art_rows.append((i, s * (r - sb)))
        self.sign = sign
        self.nart = len(art_rows)
        self.ncols = n + m + self.nart
        x.extend(slack_vals)
        for _, v in art_rows:
            lo.append(zero)
            hi.append(INF)
            x.append(v)
        self.lo, self.hi, self.x = lo, hi, x
        self.basis = []
        art_of_row = {i: n + m + k for k, (i, _) in enumerate(art_rows)}
        self.initial_col = []
        for i in range(m):
            col = art_of_row.get(i, n + i)
            self.basis.append(col)
            self.initial_col.append(col)
        self.where = [-1] * self.ncols
        for i, c in enumerate(self.basis):
            self.where[c] = i
        self.iterations = 0
        self._build_tableau(art_of_row)

    # -- helpers ---------------------------------------------------------

    def _is_fixed(self, j) -> bool:
        return self.lo[j] == self.hi[j]

    def _can_increase(self, j) -> bool:
        return _is_inf(self.hi[j]) or self.x[j] < self.hi[j]

    def _can_decrease(self, j) -> bool:
        return _is_inf(self.lo[j]) or self.x[j] > self.lo[j]

    def phase_costs(self, phase: int):
        zero, one = self.zero, (Fraction(1) if self.exact else 1.0)
        if phase == 1:
            return [zero] * (self.n + self.m) + [one] * self.nart
        return list(self.sf.cost) + [zero] * (self.m + self.nart)

    def objective_value(self):
        return sum((c * v for c, v in zip(self.cost, self.x) if c), self.zero)

    def run(self, max_iter=None) -> Status:
        """Two-phase primal simplex from the starting basis."""
        if self.nart:
            self.set_cost(self.phase_costs(1))
            st = self.primal(max_iter)
            if st is not Status.OPTIMAL:
                raise NumericalStall("phase 1 reported an unbounded ray")
            infeas = self.objective_value()
            if infeas > (0 if self.exact else FEAS_TOL * max(1, self.m)):
                return Status.INFEASIBLE
            for j in range(self.n + self.m, self.ncols):
                self.hi[j] = self.zero
                if self.where[j] < 0:
                    self.x[j] = self.zero
        self.set_cost(self.phase_costs(2))
        return self.primal(max_iter)

    def structural_x(self):
        return self.x[: self.n]

    def duals(self):
        """Row duals of the (min-form) original constraints."""
        y = []
        for i in range(self.m):
            col = self.initial_col[i]
            yi = self.cost[col] - self.reduced_cost(col)
            y.append(yi * self.sign[i] * self.sf.scale[i])
        return y

    def set_bound(self, j, lo, hi):
        """Change the bounds of structural column ``j`` keeping the basis."""
        self.lo[j], self.hi[j] = lo, hi
        if self.where[j] >= 0:
            return
        old = self.x[j]
        if old == lo or old == hi:
            return
        if not _is_inf(lo) and (old < lo or _is_inf(hi) or abs(old - lo) <= abs(old - hi)):
            new = lo
        elif not _is_inf(hi):
            new = hi
        else:
            new = self.zero
        self.shift_nonbasic(j, new - old)


class _ExactEngine(_EngineBase):
    exact = True

    def __init__(self, sf: _StdForm):
        self._setup(sf)

    def _build_tableau(self, art_of_row):
        n, m = self.n, self.m
        rows, den = [], []
        for i in range(m):
            s = self.sign[i]
            r = [0] * self.ncols
            for j, v in self.sf.rows[i].items():
                r[j] = s * v
            r[n + i] = s
            if i in art_of_row:
                r[art_of_row[i]] = 1
            rows.append(r)
            den.append(1)
        self.rows, self.den = rows, den

    @staticmethod
    def _normalise(vals, d):
        if d < 0:
            vals = [-v for v in vals]
            d = -d
        g = math.gcd(d, *vals)
        if g > 1:
            vals = [v // g for v in vals]
            d //= g
        return vals, d

    def set_cost(self, cost):
        self.cost = [to_rational(c) for c in cost]
        # d = c - sum_i c_Bi * row_i
        acc = list(self.cost)
        for i, col in enumerate(self.basis):
            cb = self.cost[col]
            if cb:
                f = cb / self.den[i]
                for j, v in enumerate(self.rows[i]):
                    if v:
                        acc[j] -= f * v
        d = reduce(math.lcm, (q.denominator for q in acc), 1)
        self.obj, self.oden = self._normalise([int(q * d) for q in acc], d)

    def reduced_cost(self, j):
        return Fraction(self.obj[j], self.oden)

    def alpha(self, i, c):
        v = self.rows[i][c]
        return Fraction(v, self.den[i]) if v else Fraction(0)

    def shift_nonbasic(self, j, delta):
        if not delta:
            return
        self.x[j] += delta
        for i in range(self.m):
            v = self.rows[i][j]
            if v:
                self.x[self.basis[i]] -= delta * Fraction(v, self.den[i])

    def pivot(self, r, c):
        Rr, p = self.rows[r], self.rows[r][c]
        new_r, new_d = self._normalise(list(Rr), p)
        for i in range(self.m):
            if i == r:
                continue
            Ri = self.rows[i]
            f = Ri[c]
            if f:
                vals = [p * a - f * b for a, b in zip(Ri, Rr)]
                self.rows[i], self.den[i] = self._normalise(vals, self.den[i] * p)
        f = self.obj[c]
        if f:
            vals = [p * a - f * b for a, b in zip(self.obj, Rr)]
            self.obj, self.oden = self._normalise(vals, self.oden * p)
        self.rows[r], self.den[r] = new_r, new_d
        old = self.basis[r]
        self.where[old] = -1
        self.basis[r] = c
        self.where[c] = r
        self.iterations += 1

    def _step(self, c, direction, r, t, leave_at):
        """Move entering column ``c`` by ``direction * t`` and pivot on row r."""
        if t:
            delta = direction * t
            self.x[c] += delta
            for i in range(self.m):
                v = self.rows[i][c]
                if v:
                    self.x[self.basis[i]] -= delta * Fraction(v, self.den[i])
        if r is not None:
            leaving = self.basis[r]
            self.pivot(r, c)
            self.x[leaving] = leave_at

    def primal(self, max_iter=None) -> Status:
        while True:
            if max_iter is not None and self.iterations >= max_iter:
                raise NumericalStall("iteration limit reached")
            c = direction = None
            # Bland: lowest-index improving column
            for j in range(self.ncols):
                if self.where[j] >= 0 or self._is_fixed(j):
                    continue
                d = self.obj[j]
                if d < 0 and self._can_increase(j):
                    c, direction = j, 1
                    break
                if d > 0 and self._can_decrease(j):
                    c, direction = j, -1
                    break
            if c is None:
                return Status.OPTIMAL
            best_t, best_r, best_var, leave_at = None, None, None, None
            if not _is_inf(self.lo[c]) and not _is_inf(self.hi[c]):
                best_t = self.hi[c] - self.lo[c]
            for i in range(self.m):
                v = self.rows[i][c]
                if not v:
                    continue
                a = Fraction(v, self.den[i])
                rate = -direction * a
                bv = self.basis[i]
                if rate < 0:
                    if _is_inf(self.lo[bv]):
                        continue
                    t, bound = (self.x[bv] - self.lo[bv]) / -rate, self.lo[bv]
                else:
                    if _is_inf(self.hi[bv]):
                        continue
                    t, bound = (self.hi[bv] - self.x[bv]) / rate, self.hi[bv]
                if t < 0:
                    t = Fraction(0)
                if best_t is None or t < best_t or (t == best_t and best_r is not None and bv < best_var):
                    best_t, best_r, best_var, leave_at = t, i, bv, bound
            if best_t is None:
                return Status.UNBOUNDED
            self._step(c, direction, best_r, best_t, leave_at)
            if best_r is None:
                self.iterations += 1

    def dual(self, max_iter=None) -> Status:
        """Bounded dual simplex; requires a dual feasible basis."""
        while True:
            if max_iter is not None and self.iterations >= max_iter:
                raise NumericalStall("iteration limit reached")
            r = None
            best_var = None
            for i, bv in enumerate(self.basis):
                xv = self.x[bv]
                if (not _is_inf(self.lo[bv]) and xv < self.lo[bv]) or (not _is_inf(self.hi[bv]) and xv > self.hi[bv]):
                    if best_var is None or bv < best_var:
                        r, best_var = i, bv
            if r is None:
                return Status.OPTIMAL
            bv = self.basis[r]
            below = not _is_inf(self.lo[bv]) and self.x[bv] < self.lo[bv]
            target = self.lo[bv] if below else self.hi[bv]
            Rr, dr = self.rows[r], self.den[r]
            c, best = None, None
            for j in range(self.ncols):
                v = Rr[j]
                if not v or self.where[j] >= 0 or self._is_fixed(j):
                    continue
                # x_B = beta - alpha x_j: to raise x_B move x_j against sign(alpha)
                want_up = (v < 0) if below else (v > 0)
                ok = self._can_increase(j) if want_up else self._can_decrease(j)
                if not ok:
                    continue
                ratio = abs(Fraction(self.obj[j], self.oden)) / abs(Fraction(v, dr))
                if best is None or ratio < best:
                    c, best = j, ratio
            if c is None:
                return Status.INFEASIBLE
            a = Fraction(Rr[c], dr)
            delta = (self.x[bv] - target) / a
            self.x[c] += delta
            for i in range(self.m):
                v = self.rows[i][c]
                if v:
                    self.x[self.basis[i]] -= delta * Fraction(v, self.den[i])
            self.pivot(r, c)
            self.x[bv] = target

    def snapshot(self):
        return (list(self.rows), list(self.den), list(self.obj), self.oden, list(self.basis),
                list(self.where), list(self.x), list(self.lo), list(self.hi), list(self.cost))

    def restore(self, snap):
        (rows, den, obj, oden, basis, where, x, lo, hi, cost) = snap
        self.rows, self.den, self.obj, self.oden = list(rows), list(den), list(obj), oden
        self.basis, self.where, self.x = list(basis), list(where), list(x)
        self.lo, self.hi, self.cost = list(lo), list(hi), list(cost)


class _FloatEngine(_EngineBase):
    exact = False

    def __init__(self, sf: _StdForm, perturb: bool = True, seed: int = 0):
        self.orig_lo = list(sf.lo) + list(sf.slack_lo)
        self.orig_hi = list(sf.hi) + list(sf.slack_hi)
        self.perturbed = False
        self.rng = np.random.default_rng(seed + 1)
        if perturb:
            rng = np.random.default_rng(seed)
            lo = list(sf.lo) + list(sf.slack_lo)
            hi = list(sf.hi) + list(sf.slack_hi)
            for j in range(len(lo)):
                if lo[j] == hi[j]:
                    continue
                if not _is_inf(lo[j]):
                    lo[j] = lo[j] - (1e-7 + 1e-7 * rng.random()) * (1 + abs(lo[j]))
                if not _is_inf(hi[j]):
                    hi[j] = hi[j] + (1e-7 + 1e-7 * rng.random()) * (1 + abs(hi[j]))
            sf = _StdForm(sf.n, sf.m, sf.rows, sf.b, lo[sf.n:], hi[sf.n:], lo[: sf.n], hi[: sf.n],
                          sf.cost, sf.scale, sf.flip)
            self.perturbed = True
        self._setup(sf)
        self.x = np.array(self.x, dtype=float)
        self.lo = np.array([float(v) for v in self.lo])
        self.hi = np.array([float(v) for v in self.hi])
        self.orig_lo = np.array([float(v) for v in self.orig_lo] + [0.0] * self.nart)
        self.orig_hi = np.array([float(v) for v in self.orig_hi] + [INF] * self.nart)

    def _build_tableau(self, art_of_row):
        n, m = self.n, self.m
        A = np.zeros((m, self.ncols))
        for i in range(m):
            s = self.sign[i]
            for j, v in self.sf.rows[i].items():
                A[i, j] = s * v
            A[i, n + i] = s
            if i in art_of_row:
                A[i, art_of_row[i]] = 1.0
        self.A = A
        self.bvec = np.array([self.sign[i] * self.sf.b[i] for i in range(m)], dtype=float)
        self.T = A.copy()

    def _is_fixed(self, j):
        return self.lo[j] == self.hi[j]

    def set_cost(self, cost):
        self.cost = np.array([float(c) for c in cost])
        cb = self.cost[self.basis]
        self.obj = self.cost - cb @ self.T

    def reduced_cost(self, j):
        return self.obj[j]

    def objective_value(self):
        return float(self.cost @ self.x)

    def shift_nonbasic(self, j, delta):
        if not delta:
            return
        self.x[j] += delta
        self.x[self.basis] -= delta * self.T[:, j]

    def reinvert(self):
        B = self.A[:, self.basis]
        try:
            self.T = np.linalg.solve(B, self.A)
        except np.linalg.LinAlgError as exc:
            raise NumericalStall("basis became singular") from exc
        nb = np.ones(self.ncols, bool)
        nb[self.basis] = False
        rhs = self.bvec - self.A[:, nb] @ self.x[nb]
        self.x[self.basis] = np.linalg.solve(B, rhs)
        self.T[np.abs(self.T) < 1e-13] = 0.0
        self.obj = self.cost - self.cost[self.basis] @ self.T

    def pivot(self, r, c):
        col = self.T[:, c].copy()
        p = col[r]
        prow = self.T[r] / p
        # the tableau stays sparse on these models: touch only the
        # rows/columns the rank-1 update can change
        rows = np.flatnonzero(col)
        cols = np.flatnonzero(prow)
        if len(rows) * len(cols) < 0.3 * self.T.size:
            self.T[np.ix_(rows, cols)] -= np.outer(col[rows], prow[cols])
        else:
            self.T -= np.outer(col, prow)
        self.T[r] = prow
        self.obj -= self.obj[c] * prow
        old = self.basis[r]
        self.where[old] = -1
        self.basis[r] = c
        self.where[c] = r
        self.iterations += 1
        if self.iterations % REINVERT_EVERY == 0:
            self.reinvert()

    def _nonbasic_mask(self):
        mask = np.array(self.where) < 0
        mask &= self.lo != self.hi
        return mask

    def primal(self, max_iter=None) -> Status:
        limit = self.iterations + (max_iter or 50 * (self.m + self.ncols) + 1000)
        # Devex reference weights approximate steepest-edge pricing
        weights = np.ones(self.ncols)
        while True:
            if self.iterations >= limit:
                raise NumericalStall("float simplex hit its iteration limit")
            nb = self._nonbasic_mask()
            can_up = nb & (self.x < self.hi - FEAS_TOL)
            can_dn = nb & (self.x > self.lo + FEAS_TOL)
            free = nb & np.isinf(self.lo) & np.isinf(self.hi)
            can_up |= free
            can_dn |= free
            score = np.where(can_up & (self.obj < -DUAL_TOL), -self.obj, 0.0)
            score = np.maximum(score, np.where(can_dn & (self.obj > DUAL_TOL), self.obj, 0.0))
            if not score.any():
                return Status.OPTIMAL
            c = int(np.argmax(np.where(score > 0, score * score / weights, -1.0)))
            direction = 1.0 if self.obj[c] < 0 else -1.0
            alpha = self.T[:, c]
            basis_arr = np.asarray(self.basis)
            rate = -direction * alpha
            xb = self.x[basis_arr]
            lob = self.lo[basis_arr]
            hib = self.hi[basis_arr]
            ptol = PIVOT_TOL * max(1.0, float(np.abs(alpha).max(initial=0.0)))
            with np.errstate(divide="ignore", invalid="ignore"):
                dec = rate < -ptol
                inc = rate > ptol
                relax = np.where(dec, (xb - lob + FEAS_TOL) / -rate, np.where(inc, (hib - xb + FEAS_TOL) / rate, np.inf))
            relax[np.isnan(relax)] = np.inf
            own = self.hi[c] - self.lo[c]
            tmax = relax.min() if relax.size else np.inf
            if not np.isfinite(tmax) and not np.isfinite(own):
                return Status.UNBOUNDED
            if np.isfinite(own) and own <= tmax:
                t = own
                self.x[c] += direction * t
                self.x[basis_arr] -= direction * t * alpha
                # snap to the opposite bound
                self.x[c] = self.hi[c] if direction > 0 else self.lo[c]
                self.iterations += 1
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                exact_t = np.where(dec, (xb - lob) / -rate, np.where(inc, (hib - xb) / rate, np.inf))
            cand = np.nonzero(exact_t <= tmax)[0]
            r = int(cand[np.argmax(np.abs(alpha[cand]))])
            t = max(exact_t[r], 0.0)
            leave_at = self.lo[self.basis[r]] if dec[r] else self.hi[self.basis[r]]
            leaving = self.basis[r]
            self.x[c] += direction * t
            self.x[basis_arr] -= direction * t * alpha
            self.x[leaving] = leave_at
            ratio = self.T[r] / alpha[r]
            wc = weights[c]
            weights = np.maximum(weights, ratio * ratio * wc)
            weights[leaving] = max(wc / (alpha[r] * alpha[r]), 1.0)
            self.pivot(r, c)

    def dual(self, max_iter=None) -> Status:
        """Dual simplex on slightly perturbed costs, then primal clean-up.

        Zero-cost columns make the dual highly degenerate (the mining MIP
        has dozens); shifting each nonbasic reduced cost away from zero in
        its feasible direction breaks the ties.
        """
        saved = self.cost.copy()
        nb = self._nonbasic_mask()
        free = np.isinf(self.lo) & np.isinf(self.hi)
        at_hi = np.isfinite(self.hi) & (self.x >= self.hi)
        shift = (1e-7 + 1e-7 * self.rng.random(self.ncols)) * (1.0 + np.abs(self.cost))
        shift = np.where(nb & ~free, np.where(at_hi, -shift, shift), 0.0)
        self.cost = self.cost + shift
        self.obj = self.obj + shift
        try:
            st = self._dual_loop(max_iter)
        finally:
            self.cost = saved
            self.obj = self.cost - self.cost[np.asarray(self.basis)] @ self.T
        if st is not Status.OPTIMAL:
            return st
        return self.primal(max_iter)

    def _dual_loop(self, max_iter=None) -> Status:
        limit = self.iterations + (max_iter or 50 * (self.m + self.ncols) + 1000)
        best, stall = self.objective_value(), 0
        while True:
            if self.iterations >= limit:
                raise NumericalStall("float dual simplex hit its iteration limit")
            basis_arr = np.asarray(self.basis)
            xb = self.x[basis_arr]
            lob = self.lo[basis_arr]
            hib = self.hi[basis_arr]
            viol = np.maximum(lob - xb, xb - hib)
            r = int(np.argmax(viol))
            if viol[r] <= FEAS_TOL:
                return Status.OPTIMAL
            # degenerate pivots can cycle; once progress stops, randomise
            # the choice of leaving row and entering column
            obj = self.objective_value()
            if obj > best + DUAL_TOL * max(1.0, abs(best)):
                best, stall = obj, 0
            else:
                stall += 1
            shuffle = stall > STALL_AFTER
            if shuffle:
                rows = np.flatnonzero(viol > FEAS_TOL)
                r = int(self.rng.choice(rows))
            bv = self.basis[r]
            below = xb[r] < lob[r]
            target = lob[r] if below else hib[r]
            row = self.T[r]
            nb = self._nonbasic_mask()
            free = np.isinf(self.lo) & np.isinf(self.hi)
            up_ok = (self.x < self.hi - FEAS_TOL) | free
            dn_ok = (self.x > self.lo + FEAS_TOL) | free
            if below:
                elig = nb & (((row < -PIVOT_TOL) & up_ok) | ((row > PIVOT_TOL) & dn_ok))
            else:
                elig = nb & (((row > PIVOT_TOL) & up_ok) | ((row < -PIVOT_TOL) & dn_ok))
            idx = np.nonzero(elig)[0]
            if idx.size == 0:
                return Status.INFEASIBLE
            ratios = np.abs(self.obj[idx]) / np.abs(row[idx])
            # Harris-style: among near-minimal ratios take the largest pivot
            rmin = ratios.min()
            near = idx[ratios <= rmin + DUAL_TOL]
            if shuffle:
                mag = np.abs(row[near])
                c = int(self.rng.choice(near[mag >= 0.1 * mag.max()]))
            else:
                c = int(near[np.argmax(np.abs(row[near]))])
            delta = (self.x[bv] - target) / row[c]
            self.x[c] += delta
            self.x[basis_arr] -= delta * self.T[:, c]
            self.x[bv] = target
            self.pivot(r, c)

    def remove_perturbation(self) -> Status:
        """Restore the true bounds and repair feasibility with the dual simplex."""
        if not self.perturbed:
            return Status.OPTIMAL
        self.perturbed = False
        art_fixed = np.arange(self.ncols) >= self.n + self.m
        self.lo = self.orig_lo.copy()
        self.hi = np.where(art_fixed, 0.0, self.orig_hi)
        for j in range(self.ncols):
            if self.where[j] >= 0:
                continue
            v = self.x[j]
            lo, hi = self.lo[j], self.hi[j]
            if np.isfinite(lo) and (v <= lo or not np.isfinite(hi) or abs(v - lo) <= abs(v - hi)):
                self.x[j] = lo
            elif np.isfinite(hi):
                self.x[j] = hi
            else:
                self.x[j] = 0.0
        self.reinvert()
        # primal repair keeps dual feasibility only if reduced costs agree with statuses
        self._fix_dual_signs()
        st = self.dual()
        if st is not Status.OPTIMAL:
            return st
        return self.primal()

    def _fix_dual_signs(self):
        nb = self._nonbasic_mask()
        for j in np.nonzero(nb)[0]:
            d = self.obj[j]
            at_lo = np.isfinite(self.lo[j]) and self.x[j] == self.lo[j]
            at_hi = np.isfinite(self.hi[j]) and self.x[j] == self.hi[j]
            if at_lo and d < -DUAL_TOL and np.isfinite(self.hi[j]):
                self.shift_nonbasic(j, self.hi[j] - self.x[j])
            elif at_hi and d > DUAL_TOL and np.isfinite(self.lo[j]):
                self.shift_nonbasic(j, self.lo[j] - self.x[j])

    def snapshot(self):
        return (self.T.copy(), self.obj.copy(), list(self.basis), list(self.where), self.x.copy(),
                self.lo.copy(), self.hi.copy(), self.cost.copy(), self.iterations)

    def restore(self, snap):
        T, obj, basis, where, x, lo, hi, cost, _ = snap
        self.T, self.obj = T.copy(), obj.copy()
        self.basis, self.where, self.x = list(basis), list(where), x.copy()
        self.lo, self.hi, self.cost = lo.copy(), hi.copy(), cost.copy()


def make_engine(model: MipModel, mode: Mode, perturb: bool = True):
    sf = _standard_form(model, mode is Mode.EXACT)
    if mode is Mode.EXACT:
        return _ExactEngine(sf)
    return _FloatEngine(sf, perturb=perturb)


def _solution_from_engine(eng, model: MipModel, mode: Mode, status: Status) -> LpSolution:
    if status is not Status.OPTIMAL:
        return LpSolution(status, mode=mode, iterations=eng.iterations)
    flip = eng.sf.flip
    if mode is Mode.EXACT:
        x = tuple(eng.structural_x())
        obj = model.objective_value(x)
        y = tuple(flip * v for v in eng.duals())
    else:
        x = tuple(float(v) for v in eng.structural_x())
        obj = float(sum(float(c) * v for c, v in zip(model.objective, x)))
        y = tuple(float(flip * v) for v in eng.duals())
    return LpSolution(Status.OPTIMAL, x, obj, mode, dual=y, iterations=eng.iterations)


def solve_lp(model: MipModel, mode: Mode = Mode.EXACT) -> LpSolution:
    """Solve the linear program ``model``.

    BINARY variables must be relaxed by the caller (``model.relaxed()``).
    """
    if model.binaries:
        raise ValueError("solve_lp got BINARY variables; relax the model first")
    eng = make_engine(model, mode)
    status = eng.run()
    if mode is Mode.FLOAT and status is Status.OPTIMAL:
        status = eng.remove_perturbation()
    return _solution_from_engine(eng, model, mode, status)


def dual_bound(model: MipModel, y: Sequence) -> object:
    """Lagrangian bound of ``model`` at row multipliers ``y``.

    For MIN this is ``y.b + sum_j min_{l_j<=x_j<=u_j} (c_j - y.A_j) x_j``, a
    lower bound on the LP optimum whenever the multipliers have the right
    signs (>= 0 on GE rows, <= 0 on LE rows); MAX is symmetric.  Returns
    -inf/+inf when the multipliers certify nothing.
    """
    exact = all(isinstance(v, Fraction) for v in y)
    conv = (lambda v: v) if exact else float
    sgn = 1 if model.sense is Sense.MIN else -1
    worst = -INF if sgn == 1 else INF
    total = conv(Fraction(0))
    red = [conv(c) for c in model.objective]
    for yi, c in zip(y, model.constraints):
        s = sgn * yi
        if (c.relation is Relation.LE and s > 0) or (c.relation is Relation.GE and s < 0):
            if exact or abs(s) > 1e-9:
                return worst
        total += yi * conv(c.rhs)
        for j, a in enumerate(c.coeffs):
            if a:
                red[j] -= yi * conv(a)
    for v, r in zip(model.variables, red):
        if r == 0 or (not exact and abs(r) < 1e-12):
            continue
        pick = v.lower if sgn * r > 0 else v.upper
        if _is_inf(pick):
            return worst
        total += r * conv(pick)
    return total
