"""Size-change matrices: extraction, empirical audit, clamped closure, verdicts.

Orientation used throughout: entry ``(i, j)`` of the matrix of a case is
the least ``L`` such that ``f_j(post) <= f_i(pre) + L`` on every guarded
pre-state, or INF if no such bound exists.  With this orientation the
min-plus product ``M_1 @ M_2`` describes running the case of ``M_1`` and
then the case of ``M_2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .interp import Box, DEFAULT_INPUT_CAP, admissible_inputs
from .program import (
    Affine,
    DivByConst,
    InputAny,
    InputAtLeast,
    Program,
    guard_holds,
    guard_lower_bounds,
    parse_affine,
    successors,
)
from .report import Verdict
from .tropical import (
    DEFAULT_CLAMP,
    INF,
    TropicalMatrix,
    clamp,
    column_condition,
    format_matrix,
    mul,
    negative_diagonal_index,
    power_diag_negative,
)

__all__ = [
    "BasisError",
    "MeasureBasis",
    "AuditResult",
    "SctCertificate",
    "SctResult",
    "post_upper_bound",
    "supremum",
    "extract_matrix",
    "extract_generators",
    "audit_matrix",
    "closure",
    "decide",
    "word_product",
]


class BasisError(ValueError):
    pass


@dataclass(frozen=True)
class MeasureBasis:
    """Measures ``f_1 .. f_m`` indexing matrix rows and columns."""

    functions: tuple[Affine, ...]

    @classmethod
    def parse(cls, text: str) -> "MeasureBasis":
        parts = [t for t in (s.strip() for s in text.split(",")) if t]
        if not parts:
            raise BasisError("empty measure basis")
        return cls(tuple(parse_affine(t) for t in parts))

    @classmethod
    def variables(cls, p: Program) -> "MeasureBasis":
        return cls(tuple(Affine.var(v) for v in p.vars))

    def __iter__(self):
        return iter(self.functions)

    def __len__(self) -> int:
        return len(self.functions)

    def __getitem__(self, i: int) -> Affine:
        return self.functions[i]

    @property
    def labels(self) -> list[str]:
        return [str(f) for f in self.functions]

    def validate(self, p: Program) -> None:
        """Each measure must be a nonnegative combination of guard-positive variables.

        This makes every measure at least 1 wherever the guard holds, so a
        measure that keeps strictly decreasing must eventually stop the loop.
        """
        if not self.functions:
            raise BasisError("empty measure basis")
        lbs = guard_lower_bounds(p)
        for f in self.functions:
            if not f.coeffs:
                raise BasisError(f"measure {f} has no variables")
            if f.const != 0:
                raise BasisError(f"measure {f} must have zero constant term")
            for v, c in f.coeffs:
                if v not in p.vars:
                    raise BasisError(f"measure {f} uses undeclared variable {v!r}")
                if c < 0:
                    raise BasisError(f"measure {f} has a negative coefficient on {v!r}")
                if lbs.get(v, 0) < 1:
                    raise BasisError(
                        f"measure {f}: the guard does not force {v!r} to be positive"
                    )


# -- extraction -------------------------------------------------------------------


def post_upper_bound(p: Program, case_id: int, f: Affine) -> Affine | None:
    """An affine upper bound, over pre-state variables, of ``f`` after one step.

    Returns None when ``f(post)`` is unbounded above on guarded states
    (for instance when ``f`` weights a variable the user inputs).
    """
    upd = p.case(case_id).update_map
    lbs = guard_lower_bounds(p)
    out = Affine.constant(f.const)
    for v, c in f.coeffs:
        rhs = upd.get(v, Affine.var(v))
        if isinstance(rhs, Affine):
            out = out + rhs.scale(c)
        elif isinstance(rhs, InputAtLeast):
            if c > 0:
                return None
            out = out + rhs.lower.scale(c)
        elif isinstance(rhs, InputAny):
            return None
        elif isinstance(rhs, DivByConst):
            # u >= 1 implies u div d <= u - 1 for d >= 2
            if c > 0 and lbs.get(rhs.var, 0) >= 1:
                out = out + (Affine.var(rhs.var) - Affine.constant(1)).scale(c)
            else:
                return None
        else:  # pragma: no cover
            raise TypeError(rhs)
    return out


def supremum(p: Program, expr: Affine):
    """Supremum of ``expr`` over states satisfying the guard (INF if unbounded).

    The guard constrains each variable only from below, so the supremum is
    reached by putting every negatively weighted variable at its lower
    bound; any positive weight, or negative weight on an unguarded
    variable, makes it unbounded.
    """
    lbs = guard_lower_bounds(p)
    total = expr.const
    for v, c in expr.coeffs:
        if c > 0 or v not in lbs:
            return INF
        total += c * lbs[v]
    return total


def extract_matrix(p: Program, case_id: int, basis: MeasureBasis) -> TropicalMatrix:
    """Tightest sound size-change matrix of one case for ``basis``."""
    basis.validate(p)
    m = len(basis)
    rows = [[INF] * m for _ in range(m)]
    for j, fj in enumerate(basis):
        bound = post_upper_bound(p, case_id, fj)
        if bound is None:
            continue
        for i, fi in enumerate(basis):
            rows[i][j] = supremum(p, bound - fi)
    return TropicalMatrix.of(rows)


def extract_generators(p: Program, basis: MeasureBasis) -> list[TropicalMatrix]:
    return [extract_matrix(p, c, basis) for c in p.case_ids]


# -- audit --------------------------------------------------------------------------


@dataclass
class AuditResult:
    passed: bool
    state: tuple[int, ...] | None = None
    post: tuple[int, ...] | None = None
    entry: tuple[int, int] | None = None  # 1-based (row, column)
    lhs: int | None = None  # f_j(post)
    rhs: int | None = None  # f_i(pre) + M[i, j]
    transitions: int = 0

    def describe(self, basis: MeasureBasis | None = None) -> str:
        if self.passed:
            return f"audit passed ({self.transitions} transitions checked)"
        i, j = self.entry
        names = ""
        if basis is not None:
            names = f" [{basis.labels[j - 1]}(post) <= {basis.labels[i - 1]}(pre) + L]"
        return (
            f"audit failed at state {self.state} -> {self.post}, entry ({i},{j}){names}: "
            f"{self.lhs} > {self.rhs}"
        )


def audit_matrix(
    p: Program,
    case_id: int,
    basis: MeasureBasis,
    matrix: TropicalMatrix,
    box: Box,
    input_cap: int = DEFAULT_INPUT_CAP,
) -> AuditResult:
    """Check every finite entry of ``matrix`` against concrete one-step transitions.

    States are visited in lexicographic order; the first violated entry
    (in row-major order) is reported.
    """
    m = len(basis)
    if matrix.dim != m:
        raise ValueError(f"matrix is {matrix.dim}x{matrix.dim}, basis has {m} measures")
    if box.dim != p.nvars:
        raise ValueError(f"box has dimension {box.dim}, program has {p.nvars} variables")
    finite = [(i, j, matrix[i, j]) for i in range(m) for j in range(m) if matrix[i, j] != INF]
    count = 0
    for s in box.states():
        if not guard_holds(p, s):
            continue
        env = p.env(s)
        pre = [f.evaluate(env) for f in basis]
        for inputs in admissible_inputs(p, s, case_id, input_cap):
            t = successors(p, s, case_id, inputs)
            count += 1
            post_env = p.env(t)
            post = [f.evaluate(post_env) for f in basis]
            for i, j, bound in finite:
                if post[j] > pre[i] + bound:
                    return AuditResult(
                        False, tuple(s), t, (i + 1, j + 1), post[j], pre[i] + bound, count
                    )
    return AuditResult(True, transitions=count)


# -- closure and criteria --------------------------------------------------------------


def closure(generators: Iterable[TropicalMatrix], k: int = DEFAULT_CLAMP) -> list[TropicalMatrix]:
    """Least set containing the clamped generators and closed under clamped product.

    Returned in discovery order, which is deterministic for a given
    generator order.
    """
    gens = [clamp(g, k) for g in generators]
    if not gens:
        return []
    n = gens[0].dim
    if any(g.dim != n for g in gens):
        raise ValueError("generators have different dimensions")
    elements: list[TropicalMatrix] = []
    seen: set[TropicalMatrix] = set()
    work: list[TropicalMatrix] = []

    def add(mat):
        if mat not in seen:
            seen.add(mat)
            elements.append(mat)
            work.append(mat)

    for g in gens:
        add(g)
    while work:
        x = work.pop(0)
        for y in list(elements):
            add(clamp(mul(x, y), k))
            add(clamp(mul(y, x), k))
    return elements


def word_product(generators: Sequence[TropicalMatrix], word: Sequence[int]) -> TropicalMatrix:
    """Exact product of the generators along a case word (1-based case ids)."""
    if not word:
        raise ValueError("empty word")
    out = generators[word[0] - 1]
    for c in word[1:]:
        out = mul(out, generators[c - 1])
    return out


@dataclass
class SctCertificate:
    basis: MeasureBasis
    generators: list[TropicalMatrix]
    clamp: int
    closure: list[TropicalMatrix]
    criterion: str
    witnesses: list  # per element: diagonal index (A) or exponent (B); None if none
    column_condition: list[bool] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "basis": self.basis.labels,
            "clamp": self.clamp,
            "criterion": self.criterion,
            "generators": [m.to_lists() for m in self.generators],
            "closure_size": len(self.closure),
            "closure": [m.to_lists() for m in self.closure],
            "witnesses": [self._witness_dict(w) for w in self.witnesses],
            "column_condition": self.column_condition,
        }

    def _witness_dict(self, w):
        if w is None:
            return None
        if self.criterion == "A":
            return {"diagonal": w + 1, "measure": self.basis.labels[w]}
        return {"power": w}

    def dump(self) -> str:
        """Closure elements in matrix text format, each preceded by a comment."""
        out = []
        for idx, (m, w) in enumerate(zip(self.closure, self.witnesses), start=1):
            out.append(f"# element {idx}: {self._describe(w)}")
            out.append(format_matrix(m))
        return "\n".join(out)

    def _describe(self, w) -> str:
        if w is None:
            return "no witness"
        if self.criterion == "A":
            return f"negative diagonal at {w + 1} ({self.basis.labels[w]})"
        return f"power {w} has a negative diagonal"


@dataclass
class SctResult:
    verdict: Verdict
    certificate: SctCertificate
    failing: TropicalMatrix | None = None
    notes: list[str] = field(default_factory=list)


def decide(
    p: Program,
    basis: MeasureBasis | None = None,
    k: int = DEFAULT_CLAMP,
    criterion: str = "A",
) -> SctResult:
    """Size-change termination verdict for ``p``.

    Criterion ``A``: every closure element has a negative diagonal entry.
    Criterion ``B``: every closure element has a clamped power with a
    negative diagonal entry.  Either way ``TERMINATES`` is sound, since
    clamping only weakens bounds; otherwise the verdict is ``UNKNOWN``
    and the first failing element is returned.
    """
    if criterion not in ("A", "B"):
        raise ValueError(f"criterion must be 'A' or 'B', got {criterion!r}")
    basis = basis or MeasureBasis.variables(p)
    basis.validate(p)
    gens = extract_generators(p, basis)
    notes = []
    for c, g in zip(p.case_ids, gens):
        if clamp(g, k) != g:
            notes.append(f"generator of case {c} clamped at ingestion (K={k})")
    elements = closure(gens, k)
    if criterion == "A":
        witnesses = [negative_diagonal_index(m) for m in elements]
    else:
        witnesses = [power_diag_negative(m, k) for m in elements]
    cert = SctCertificate(
        basis, gens, k, elements, criterion, witnesses, [column_condition(g) for g in gens]
    )
    failing = next((m for m, w in zip(elements, witnesses) if w is None), None)
    verdict = Verdict.TERMINATES if failing is None else Verdict.UNKNOWN
    if failing is not None:
        notes.append(f"closure element without witness (K={k}); a larger clamp may help")
    return SctResult(verdict, cert, failing, notes)
