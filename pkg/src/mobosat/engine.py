"""Enumeration drivers: single-pass MCS enumeration and the two
re-approximation loops (coefficient rounding and interval thinning).

The single-pass enumerator pulls one MCS at a time, records the witness
and its image under the original objectives, adds the representative point
to the lower-bound set and blocks the region it weakly dominates.  The
drivers wrap it:

* the coefficient driver rebuilds a fresh solver each iteration (clause
  addition is monotone, so retracting an iteration's state means starting
  over), re-rounds the objectives, blocks regions around known solutions
  under the new rounding, and tightens the ratio;
* the interval driver encodes the original objectives once, thins the
  threshold domains per iteration, and keeps one growing solver.  Its
  per-iteration region blocks from the enumerator are guarded by a
  selector that is retired when the iteration ends; only the blocks at
  images of found solutions stay permanently.

Iteration-scoped state never outlives its iteration; a wall-clock budget is
honored between solver calls (and interrupts long calls), returning partial
results flagged as truncated with the ratio warranted by the last completed
iteration.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .approx import Ratio, approx_coefficients, as_ratio, compute_domain
from .encode import Encoder, encode_instance_constraints, encode_objective
from .mcs import McsInvariantError, SoftSet, check_witness_bounds, extract_mcs
from .model import (
    Instance,
    LinearExpr,
    Point,
    SolutionRecord,
    evaluate,
    nondominated_filter,
    weakly_dominates,
)
from .sat import SatSolver, SolveBudgetExceeded

log = logging.getLogger("mobosat.engine")


@dataclass(frozen=True)
class RatioSchedule:
    """How the approximation ratio evolves across iterations.

    ``start`` and ``target`` are ratios (1 + epsilon); epsilon is divided by
    ``divisor`` after each iteration and snaps to 0 once below ``floor``.
    """

    start: Fraction
    divisor: Fraction = Fraction(10)
    floor: Fraction = Fraction(1, 10000)
    target: Fraction = Fraction(1)
    budget_s: Optional[float] = None
    memory_cap_mb: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", as_ratio(self.start))
        object.__setattr__(self, "divisor", Fraction(self.divisor))
        object.__setattr__(self, "floor", Fraction(self.floor))
        object.__setattr__(self, "target", as_ratio(self.target))
        if self.divisor <= 1:
            raise ValueError(f"divisor must be > 1, got {self.divisor}")
        if not self.start >= self.target >= 1:
            raise ValueError("need start ratio >= target ratio >= 1")
        if self.budget_s is not None and self.budget_s <= 0:
            raise ValueError("time budget must be positive")
        if self.memory_cap_mb is not None and self.memory_cap_mb <= 0:
            raise ValueError("memory cap must be positive")


def update_ratio(schedule: RatioSchedule, ratio: Fraction) -> Fraction:
    """Next ratio: epsilon / divisor, snapped to 0 below the floor, never below target."""
    eps = Fraction(ratio) - 1
    eps = eps / schedule.divisor
    if eps < schedule.floor:
        eps = Fraction(0)
    eps = max(eps, schedule.target - 1)
    return 1 + eps


class Budget:
    """Cooperative wall-clock budget plus an advisory encoder memory cap."""

    def __init__(self, seconds: Optional[float] = None,
                 memory_cap_mb: Optional[float] = None):
        self.deadline = None if seconds is None else time.monotonic() + seconds
        self.memory_cap_bytes = None if memory_cap_mb is None else memory_cap_mb * 2**20

    def exceeded(self, encoder: Optional[Encoder] = None) -> bool:
        if self.deadline is not None and time.monotonic() > self.deadline:
            return True
        return (self.memory_cap_bytes is not None and encoder is not None
                and encoder.approx_bytes > self.memory_cap_bytes)

    @classmethod
    def of(cls, schedule: "RatioSchedule") -> "Budget":
        return cls(schedule.budget_s, schedule.memory_cap_mb)


@dataclass(frozen=True)
class IterationTrace:
    seq: int
    ratio: Fraction
    new_images: Tuple[Point, ...]
    new_lower_bounds: Tuple[Point, ...]
    mcs_count: int
    objective_clauses: int
    completed: bool
    wall_s: float


@dataclass(frozen=True)
class ApproxResult:
    records: Tuple[SolutionRecord, ...]
    lower_bounds: Tuple[Point, ...]
    warranted_ratio: Optional[Fraction]
    truncated: bool
    infeasible: bool
    trace: Tuple[IterationTrace, ...]

    @property
    def images(self) -> Tuple[Point, ...]:
        return tuple(rec.image for rec in self.records)


@dataclass
class PreparedObjective:
    """One objective wired into a solver: expression, thresholds, literal lookup."""

    expr: LinearExpr
    domain: Tuple[int, ...]
    encode_lt: Callable[[int], int]
    clause_count: Callable[[], int]


@dataclass
class McsApproxOutcome:
    records: List[SolutionRecord]
    lower_bounds: List[Point]
    completed: bool
    mcs_count: int


def _assignment_from_model(model: Sequence[int], num_vars: int) -> Tuple[int, ...]:
    return tuple(1 if model[v] == 1 else 0 for v in range(1, num_vars + 1))


def _build_softs(prepared: Sequence[PreparedObjective]) -> SoftSet:
    per_objective = []
    for prep in prepared:
        per_objective.append(tuple((d, prep.encode_lt(d)) for d in prep.domain))
    return SoftSet(tuple(per_objective))


def mcs_approx(
    solver: SatSolver,
    prepared: Sequence[PreparedObjective],
    instance: Instance,
    budget: Budget,
    guard: Optional[int] = None,
    complete: bool = False,
) -> McsApproxOutcome:
    """Enumerate MCSs until exhaustion or budget, blocking each one.

    Records carry the witness assignment and its image under the *original*
    objectives; lower bounds are the representative points.  Region blocks
    are guarded by ``guard`` when given (so the caller can retire them).
    """
    softs = _build_softs(prepared)
    records: List[SolutionRecord] = []
    reps: List[Point] = []
    assumptions = [guard] if guard is not None else []
    while True:
        if budget.exceeded():
            return McsApproxOutcome(records, reps, False, len(reps))
        try:
            mcs = extract_mcs(solver, softs, assumptions, deadline=budget.deadline)
        except SolveBudgetExceeded:
            return McsApproxOutcome(records, reps, False, len(reps))
        if mcs is None:
            return McsApproxOutcome(records, reps, True, len(reps))
        assignment = _assignment_from_model(mcs.model, instance.num_vars)
        approx_values = tuple(evaluate(prep.expr, assignment) for prep in prepared)
        check_witness_bounds(mcs, approx_values, complete=complete)
        rep = mcs.representative
        if any(weakly_dominates(prev, rep) for prev in reps):
            raise McsInvariantError(
                f"representative {rep} weakly dominated by an already blocked point"
            )
        image = tuple(evaluate(f, assignment) for f in instance.objectives)
        records.append(SolutionRecord(assignment, image))
        reps.append(rep)
        block = [prep.encode_lt(rep[k]) for k, prep in enumerate(prepared)]
        if guard is not None:
            block = [-guard] + block
        solver.add_clause(block)
        log.debug("mcs %d: rep=%s image=%s", len(reps), rep, image)


@dataclass
class _LadderTemplate:
    """Recorded CNF of one rounded objective, replayable into a fresh solver.

    Variables at or below ``base_end`` (decision vars, constraint
    auxiliaries, the constant-true var) are identical across iterations and
    map unchanged; the window (v0, v0+aux_count] shifts to wherever the
    replaying solver currently is.
    """

    base_end: int
    v0: int
    aux_count: int
    clauses: List[Tuple[int, ...]]
    thresholds: Dict[int, int]
    reachable: List[int]


class _ReplayedLadder:
    def __init__(self, template: _LadderTemplate, solver: SatSolver, encoder: Encoder):
        offset = solver.num_vars - template.v0
        for _ in range(template.aux_count):
            solver.new_var()

        def remap(lit: int) -> int:
            var = abs(lit)
            if var > template.base_end:
                var += offset
            return var if lit > 0 else -var

        for clause in template.clauses:
            solver.add_clause([remap(l) for l in clause])
        encoder.objective_clauses += len(template.clauses)
        self._emitted = len(template.clauses)
        self.thresholds = {d: remap(lit) for d, lit in template.thresholds.items()}
        self.reachable = template.reachable

    def encode_lt(self, d: int) -> int:
        return self.thresholds[d]

    @property
    def clauses_emitted(self) -> int:
        return self._emitted


class _BaseBuilder:
    """Builds the constraint CNF shared by every iteration."""

    def __init__(self, instance: Instance, seed: int):
        self.instance = instance
        self.seed = seed

    def build(self) -> Tuple[SatSolver, Encoder, bool]:
        solver = SatSolver(self.seed)
        encoder = Encoder(solver)
        encode_instance_constraints(encoder, self.instance)
        encoder.true_lit()  # pin the constant-true var at a fixed index
        ok = solver.propagate_root()
        return solver, encoder, ok


def _complete_domain(ladder) -> Tuple[int, ...]:
    reachable = ladder.reachable_values()
    return tuple(reachable) + (reachable[-1] + 1,)


def core_solve(instance: Instance, schedule: RatioSchedule, seed: int = 0) -> ApproxResult:
    """Coefficient-based re-approximation driver.

    Each iteration rounds every objective onto the current ratio grid,
    encodes the rounded objectives with complete threshold domains into a
    fresh solver (unchanged objectives replay their recorded CNF), blocks
    the regions weakly dominated by the rounded images of known solutions,
    and runs the MCS enumerator.  Stops when the rounding is exact, the
    target ratio is warranted, or the budget runs out.
    """
    budget = Budget.of(schedule)
    base = _BaseBuilder(instance, seed)
    cache: Dict[tuple, _LadderTemplate] = {}
    records: List[SolutionRecord] = []
    lower_committed: List[Point] = []
    warranted: Optional[Fraction] = None
    trace: List[IterationTrace] = []
    truncated = False
    infeasible = False
    ratio = schedule.start
    seq = 0
    while True:
        seq += 1
        t0 = time.monotonic()
        solver, encoder, ok = base.build()
        if not ok:
            infeasible = True
            break
        fixed = tuple(sorted(solver.fixed_literals()))
        base_end = solver.num_vars
        prepared: List[PreparedObjective] = []
        exact = True
        aborted_build = False
        for k, f in enumerate(instance.objectives):
            if budget.exceeded(encoder):
                aborted_build = True
                break
            fprime = approx_coefficients(f, ratio).approx
            exact = exact and fprime == f
            key = (k, tuple((c, l.to_signed()) for c, l in fprime.terms), fprime.constant, fixed)
            template = cache.get(key)
            if template is not None and template.base_end == base_end:
                ladder = _ReplayedLadder(template, solver, encoder)
                domain = tuple(ladder.reachable) + (ladder.reachable[-1] + 1,)
            else:
                v0 = solver.num_vars
                emitted: List[Tuple[int, ...]] = []
                built = encode_objective(encoder, k, fprime, fixed, eager=True, record=emitted)
                domain = _complete_domain(built)
                for d in domain:
                    built.encode_lt(d)
                built.stop_recording()
                cache[key] = _LadderTemplate(
                    base_end=base_end,
                    v0=v0,
                    aux_count=solver.num_vars - v0,
                    clauses=emitted,
                    thresholds=built.thresholds,
                    reachable=built.reachable_values(),
                )
                ladder = built
            prepared.append(
                PreparedObjective(fprime, domain, ladder.encode_lt,
                                  lambda lad=ladder: lad.clauses_emitted)
            )
        if aborted_build:
            truncated = True
            break
        seeds: List[Point] = []
        for rec in records:
            z = tuple(evaluate(prep.expr, rec.assignment) for prep in prepared)
            solver.add_clause([prep.encode_lt(z[k]) for k, prep in enumerate(prepared)])
            seeds.append(z)
        outcome = mcs_approx(solver, prepared, instance, budget, complete=True)
        records = nondominated_filter(records + outcome.records, key=lambda r: r.image)
        lower_iter = nondominated_filter(seeds + outcome.lower_bounds)
        trace.append(IterationTrace(
            seq=seq,
            ratio=ratio,
            new_images=tuple(rec.image for rec in outcome.records),
            new_lower_bounds=tuple(outcome.lower_bounds),
            mcs_count=outcome.mcs_count,
            objective_clauses=encoder.objective_clauses,
            completed=outcome.completed,
            wall_s=time.monotonic() - t0,
        ))
        log.info("coeff iteration %d at ratio %s: %d new records, completed=%s",
                 seq, ratio, len(outcome.records), outcome.completed)
        if not outcome.completed:
            truncated = True
            break
        lower_committed = lower_iter
        warranted = ratio
        if exact:
            warranted = Fraction(1)  # identity rounding: the front is complete
            break
        if ratio <= schedule.target:
            break
        if budget.exceeded(encoder):
            truncated = True
            break
        ratio = update_ratio(schedule, ratio)
    return ApproxResult(
        records=tuple(records),
        lower_bounds=tuple(lower_committed),
        warranted_ratio=warranted,
        truncated=truncated,
        infeasible=infeasible,
        trace=tuple(trace),
    )


def intre_solve(instance: Instance, schedule: RatioSchedule, seed: int = 0) -> ApproxResult:
    """Interval-based re-approximation driver.

    The original objectives are encoded once; each iteration computes the
    threshold grid for the current ratio, lazily encodes new thresholds,
    permanently blocks the regions weakly dominated by the images of the
    previous iteration's finds, and enumerates with iteration-scoped region
    blocks.  Stops when an iteration finds nothing new (the record set then
    is the exact Pareto front), the target is warranted, or the budget ends.
    """
    budget = Budget.of(schedule)
    solver, encoder, ok = _BaseBuilder(instance, seed).build()
    if not ok:
        return ApproxResult((), (), None, False, True, ())
    fixed = tuple(sorted(solver.fixed_literals()))
    ladders = [encode_objective(encoder, k, f, fixed) for k, f in enumerate(instance.objectives)]
    records: List[SolutionRecord] = []
    previous_new: List[SolutionRecord] = []
    lower_committed: List[Point] = []
    warranted: Optional[Fraction] = None
    trace: List[IterationTrace] = []
    truncated = False
    ratio = schedule.start
    seq = 0
    while True:
        seq += 1
        t0 = time.monotonic()
        prepared: List[PreparedObjective] = []
        aborted_build = False
        for k, ladder in enumerate(ladders):
            if budget.exceeded(encoder):
                aborted_build = True
                break
            domain = compute_domain(instance.lower_bounds[k], instance.upper_bounds[k], ratio)
            for d in domain:
                ladder.encode_lt(d)
            prepared.append(
                PreparedObjective(instance.objectives[k], domain, ladder.encode_lt,
                                  lambda lad=ladder: lad.clauses_emitted)
            )
        if aborted_build:
            truncated = True
            break
        for rec in previous_new:
            solver.add_clause([ladders[k].encode_lt(rec.image[k])
                               for k in range(instance.num_objectives)])
        lower_base: List[Point] = [rec.image for rec in records]
        guard = solver.new_var()
        outcome = mcs_approx(solver, prepared, instance, budget,
                             guard=guard, complete=(ratio == 1))
        solver.add_clause([-guard])
        records = nondominated_filter(records + outcome.records, key=lambda r: r.image)
        lower_iter = nondominated_filter(lower_base + outcome.lower_bounds)
        trace.append(IterationTrace(
            seq=seq,
            ratio=ratio,
            new_images=tuple(rec.image for rec in outcome.records),
            new_lower_bounds=tuple(outcome.lower_bounds),
            mcs_count=outcome.mcs_count,
            objective_clauses=encoder.objective_clauses,
            completed=outcome.completed,
            wall_s=time.monotonic() - t0,
        ))
        log.info("interval iteration %d at ratio %s: %d new records, completed=%s",
                 seq, ratio, len(outcome.records), outcome.completed)
        if not outcome.completed:
            truncated = True
            break
        lower_committed = lower_iter
        warranted = ratio
        if not outcome.records:
            # nothing outside the blocked region: records are the Pareto front
            warranted = Fraction(1)
            break
        if ratio <= schedule.target:
            break
        if budget.exceeded(encoder):
            truncated = True
            break
        previous_new = outcome.records
        ratio = update_ratio(schedule, ratio)
    return ApproxResult(
        records=tuple(records),
        lower_bounds=tuple(lower_committed),
        warranted_ratio=warranted,
        truncated=truncated,
        infeasible=False,
        trace=tuple(trace),
    )


def solve_exact(instance: Instance, budget_s: Optional[float] = None,
                seed: int = 0) -> ApproxResult:
    """Enumerate the exact Pareto front (single pass with complete domains)."""
    schedule = RatioSchedule(start=Fraction(1), budget_s=budget_s)
    return core_solve(instance, schedule, seed=seed)


def enumerate_efficient_set(
    instance: Instance, budget_s: Optional[float] = None, seed: int = 0
) -> Tuple[Tuple[SolutionRecord, ...], bool]:
    """All efficient solutions (exact mode), repeats of an image included.

    Replaces the single region block with p clauses that forbid points
    dominated by the representative while allowing the representative
    itself, plus one clause forbidding the witness assignment.  Returns the
    records and whether enumeration ran to exhaustion.
    """
    budget = Budget(budget_s)
    solver, encoder, ok = _BaseBuilder(instance, seed).build()
    if not ok:
        return (), True
    fixed = tuple(sorted(solver.fixed_literals()))
    ladders = [encode_objective(encoder, k, f, fixed, eager=True)
               for k, f in enumerate(instance.objectives)]
    prepared = []
    for k, ladder in enumerate(ladders):
        domain = _complete_domain(ladder)
        for d in domain:
            ladder.encode_lt(d)
        prepared.append(PreparedObjective(instance.objectives[k], domain, ladder.encode_lt,
                                          lambda lad=ladder: lad.clauses_emitted))
    softs = _build_softs(prepared)
    records: List[SolutionRecord] = []
    while True:
        if budget.exceeded():
            return tuple(records), False
        try:
            mcs = extract_mcs(solver, softs, deadline=budget.deadline)
        except SolveBudgetExceeded:
            return tuple(records), False
        if mcs is None:
            return tuple(records), True
        assignment = _assignment_from_model(mcs.model, instance.num_vars)
        image = tuple(evaluate(f, assignment) for f in instance.objectives)
        records.append(SolutionRecord(assignment, image))
        rep = mcs.representative
        dominated_lits = [prep.encode_lt(rep[k]) for k, prep in enumerate(prepared)]
        for q, prep in enumerate(prepared):
            succ = prep.domain[prep.domain.index(rep[q]) + 1]
            solver.add_clause(dominated_lits + [prep.encode_lt(succ)])
        solver.add_clause([
            -(v + 1) if assignment[v] else (v + 1) for v in range(instance.num_vars)
        ])
