"""Balanced academic curriculum with a chi-square load-distribution constraint."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .. import constraints
from ..bincounts import post_bin_counts
from ..flow import BinSpec
from ..kernel import Solver
from ..stats import chi2_inverse_cdf
from .errors import InstanceError

DEFAULT_TARGETS = (1, 2, 4, 2, 1)
DEFAULT_ALPHA = 0.99


@dataclass
class BacpInstance:
    credits: list[int]
    prerequisites: list[tuple[int, int]]
    semesters: int
    min_courses: int
    max_courses: int
    min_load: int
    max_load: int
    course_ids: list[str] = field(default_factory=list)
    name: str = "bacp"

    def __post_init__(self):
        if not self.course_ids:
            self.course_ids = [str(i) for i in range(len(self.credits))]

    @property
    def n(self) -> int:
        return len(self.credits)

    def validate(self) -> None:
        if any(w <= 0 for w in self.credits):
            bad = next(i for i, w in enumerate(self.credits) if w <= 0)
            raise InstanceError(f"course {self.course_ids[bad]}: credits must be positive")
        if self.semesters < 1:
            raise InstanceError("need at least one semester")
        if not 0 <= self.min_courses <= self.max_courses:
            raise InstanceError("min/max courses per semester out of order")
        if not 0 <= self.min_load <= self.max_load:
            raise InstanceError("min/max load per semester out of order")
        for a, b in self.prerequisites:
            if not (0 <= a < self.n and 0 <= b < self.n) or a == b:
                raise InstanceError(f"prerequisite ({a}, {b}) references unknown courses")
        # acyclicity via Kahn
        indeg = [0] * self.n
        succ: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.prerequisites:
            succ[a].append(b)
            indeg[b] += 1
        stack = [i for i in range(self.n) if indeg[i] == 0]
        seen = 0
        while stack:
            i = stack.pop()
            seen += 1
            for j in succ[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    stack.append(j)
        if seen != self.n:
            raise InstanceError("prerequisite graph has a cycle")

    def default_bins(self) -> BinSpec:
        return BinSpec((0, 15, 20, 30, 35, self.max_load + 1))


def parse_bacp(text: str, name: str = "bacp") -> BacpInstance:
    """Parse the line format::

        courses S minC maxC minL maxL
        <course_id> <credits>        (one per course)
        prereq <a> <b>               (a strictly before b)

    ``#`` starts a comment.
    """
    header = None
    ids: list[str] = []
    credits: list[int] = []
    prereq_ids: list[tuple[str, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if header is None:
                if len(parts) != 6:
                    raise InstanceError(f"line {lineno}: header needs 6 integers")
                header = [int(p) for p in parts]
            elif parts[0] == "prereq":
                if len(parts) != 3:
                    raise InstanceError(f"line {lineno}: expected 'prereq a b'")
                prereq_ids.append((parts[1], parts[2], lineno))
            else:
                if len(parts) != 2:
                    raise InstanceError(f"line {lineno}: expected 'course_id credits'")
                if parts[0] in ids:
                    raise InstanceError(f"line {lineno}: duplicate course {parts[0]}")
                ids.append(parts[0])
                credits.append(int(parts[1]))
        except ValueError as exc:
            if isinstance(exc, InstanceError):
                raise
            raise InstanceError(f"line {lineno}: {exc}") from None
    if header is None:
        raise InstanceError("empty instance")
    n, S, minc, maxc, minl, maxl = header
    if len(ids) != n:
        raise InstanceError(f"header announces {n} courses, found {len(ids)}")
    pos = {c: i for i, c in enumerate(ids)}
    prereqs = []
    for a, b, lineno in prereq_ids:
        if a not in pos or b not in pos:
            raise InstanceError(f"line {lineno}: unknown course in prerequisite")
        prereqs.append((pos[a], pos[b]))
    inst = BacpInstance(credits, prereqs, S, minc, maxc, minl, maxl, ids, name)
    inst.validate()
    return inst


def load_bacp(path: str | Path) -> BacpInstance:
    path = Path(path)
    return parse_bacp(path.read_text(), path.stem)


def format_bacp(inst: BacpInstance) -> str:
    lines = [f"{inst.n} {inst.semesters} {inst.min_courses} {inst.max_courses} "
             f"{inst.min_load} {inst.max_load}"]
    lines += [f"{cid} {w}" for cid, w in zip(inst.course_ids, inst.credits)]
    lines += [f"prereq {inst.course_ids[a]} {inst.course_ids[b]}" for a, b in inst.prerequisites]
    return "\n".join(lines) + "\n"


def interchangeable_pairs(inst: BacpInstance) -> list[tuple[int, int]]:
    """Consecutive courses with equal credits and identical prerequisite neighbourhoods."""
    pred: list[set[int]] = [set() for _ in range(inst.n)]
    succ: list[set[int]] = [set() for _ in range(inst.n)]
    for a, b in inst.prerequisites:
        pred[b].add(a)
        succ[a].add(b)
    classes: dict[tuple, list[int]] = {}
    for i in range(inst.n):
        key = (inst.credits[i], frozenset(pred[i]), frozenset(succ[i]))
        classes.setdefault(key, []).append(i)
    pairs = []
    for members in classes.values():
        pairs += list(zip(members, members[1:]))
    return pairs


@dataclass
class BacpModel:
    solver: Solver
    instance: BacpInstance
    semester: list[int]
    load: list[int]
    courses: list[int]
    occurrences: list[int]
    bins: BinSpec
    targets: tuple[int, ...]
    threshold: float

    def solve(self, strategy: str = "mindom", time_limit: float | None = None):
        return self.solver.solve(self.semester, strategy, time_limit)

    def decode(self, solution: Sequence[int]) -> dict:
        return {
            "semester": [solution[v] for v in self.semester],
            "load": [solution[v] for v in self.load],
            "courses": [solution[v] for v in self.courses],
            "occurrences": [solution[v] for v in self.occurrences],
        }


def build_bacp(inst: BacpInstance, bins: BinSpec | Sequence[int] | None = None,
               targets: Sequence[int] = DEFAULT_TARGETS, alpha: float = DEFAULT_ALPHA,
               propagation: str = "gac", symmetry: bool = True) -> BacpModel:
    inst.validate()
    bins = inst.default_bins() if bins is None else (bins if isinstance(bins, BinSpec) else BinSpec(tuple(bins)))
    targets = tuple(int(t) for t in targets)
    if len(targets) != bins.m:
        raise InstanceError(f"{len(targets)} targets for {bins.m} bins")
    if sum(targets) != inst.semesters:
        raise InstanceError(f"targets sum to {sum(targets)}, expected {inst.semesters} semesters")
    if bins.lo > inst.min_load or bins.hi <= inst.max_load:
        raise InstanceError(f"bins {bins.boundaries} do not cover loads "
                            f"[{inst.min_load}, {inst.max_load}]")
    threshold = chi2_inverse_cdf(bins.m - 1, 1.0 - alpha)
    S = inst.semesters
    s = Solver()
    sem = [s.int_var(1, S, f"s[{cid}]") for cid in inst.course_ids]
    load = [s.int_var(inst.min_load, inst.max_load, f"l[{j + 1}]") for j in range(S)]
    courses = [s.int_var(inst.min_courses, inst.max_courses, f"c[{j + 1}]") for j in range(S)]
    occ = [s.int_var(0, S, f"o[{k + 1}]") for k in range(bins.m)]
    constraints.post_gcc(s, sem, list(range(1, S + 1)), courses)
    constraints.post_linear(s, [(1, c) for c in courses], "=", inst.n)
    constraints.post_bin_packing(s, sem, inst.credits, load)
    for a, b in inst.prerequisites:
        constraints.post_linear(s, [(1, sem[a]), (-1, sem[b])], "<", 0)
    post_bin_counts(s, load, occ, bins, propagation=propagation)
    constraints.post_chi2_threshold(s, occ, targets, threshold)
    if symmetry:
        for a, b in interchangeable_pairs(inst):
            constraints.post_linear(s, [(1, sem[a]), (-1, sem[b])], "<=", 0)
    return BacpModel(s, inst, sem, load, courses, occ, bins, targets, threshold)


def check_loads(loads: Sequence[int], bins: BinSpec, targets: Sequence[int], threshold: float,
                min_load: int | None = None, max_load: int | None = None) -> list[str]:
    """Independent check of a load vector; returns the list of violations."""
    problems = []
    b = bins.boundaries
    occ = [0] * (len(b) - 1)
    for j, l in enumerate(loads):
        if min_load is not None and l < min_load or max_load is not None and l > max_load:
            problems.append(f"semester {j + 1}: load {l} outside [{min_load}, {max_load}]")
        k = next((k for k in range(len(b) - 1) if b[k] <= l < b[k + 1]), None)
        if k is None:
            problems.append(f"semester {j + 1}: load {l} in no bin")
        else:
            occ[k] += 1
    num = sum((o - t) ** 2 * _prod_except(targets, k) for k, (o, t) in enumerate(zip(occ, targets)))
    den = _prod_except(targets, -1)
    if num > (threshold + 1e-12) * den:
        problems.append(f"chi-square {num / den:.4f} exceeds {threshold:.4f}")
    return problems


def _prod_except(values: Sequence[int], skip: int) -> int:
    out = 1
    for k, v in enumerate(values):
        if k != skip:
            out *= v
    return out


def check_schedule(inst: BacpInstance, semester: Sequence[int], bins: BinSpec,
                   targets: Sequence[int], threshold: float) -> list[str]:
    """Re-check every model constraint group on a schedule (1-based semesters)."""
    S = inst.semesters
    problems = []
    if len(semester) != inst.n:
        return [f"expected {inst.n} semesters, got {len(semester)}"]
    counts = [0] * S
    loads = [0] * S
    for i, p in enumerate(semester):
        if not 1 <= p <= S:
            problems.append(f"course {inst.course_ids[i]}: semester {p} out of range")
            continue
        counts[p - 1] += 1
        loads[p - 1] += inst.credits[i]
    for j, c in enumerate(counts):
        if not inst.min_courses <= c <= inst.max_courses:
            problems.append(f"semester {j + 1}: {c} courses")
    for a, b in inst.prerequisites:
        if not semester[a] < semester[b]:
            problems.append(f"prerequisite {inst.course_ids[a]} -> {inst.course_ids[b]} violated")
    problems += check_loads(loads, bins, targets, threshold, inst.min_load, inst.max_load)
    return problems
