"""Run the selected analyses on a diagram and assemble a serializable report."""

from __future__ import annotations

import dataclasses
import json
import types
import typing
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import cw_oracle, homology
from .diagram import DeformationDiagram, validate
from .errors import DataMissingError
from .zlattice import AbelianGroup

MODES = ("bounds", "exact", "oracle", "all")
CHECKS = (
    "euler",
    "vertical_bound",
    "special_bound",
    "concentration",
    "bouquet",
    "nonsplitting",
    "cross_validate",
)
BOUND_CHECKS = CHECKS[:-1]

# word-sized primes only
MAX_PRIME = 2**63


@dataclass(frozen=True)
class AnalysisConfig:
    mode: str = "bounds"
    prime: int | None = None
    output_format: str = "text"
    checks: tuple[str, ...] | None = None
    signs: Sequence[int] | Mapping[str, int] | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if self.output_format not in ("text", "structured"):
            raise ValueError(f"format must be text or structured, got {self.output_format!r}")
        if self.checks is not None:
            bad = [c for c in self.checks if c not in CHECKS]
            if bad:
                raise ValueError(f"unknown check(s) {', '.join(bad)}; choose from {', '.join(CHECKS)}")
        if self.prime is not None and self.prime >= MAX_PRIME:
            raise ValueError(f"modulus {self.prime} exceeds the machine-word limit 2^63")

    @property
    def exact(self) -> bool:
        return self.mode in ("exact", "all")

    def selected(self) -> tuple[str, ...]:
        if self.checks is not None:
            return tuple(c for c in CHECKS if c in self.checks)
        if self.mode in ("oracle", "all"):
            return CHECKS
        return BOUND_CHECKS


# -- report records ---------------------------------------------------------


@dataclass(frozen=True)
class EulerEntry:
    value: int
    source: str
    computed: int | None
    override: int | None
    missing_local_data: tuple[str, ...] = ()


@dataclass(frozen=True)
class BranchEntry:
    id: str
    transversal_milnor_number: int
    genus: int
    tau: int
    gamma: int
    loop_count: int
    group: AbelianGroup
    group_source: str
    euler: int
    euler_source: str


@dataclass(frozen=True)
class LoopEntry:
    id: str
    kind: str
    branch: str
    special_point: str | None
    monodromy: tuple[tuple[int, ...], ...]
    h_upper: AbelianGroup
    h_lower: AbelianGroup
    det_a_minus_i: int
    source: str


@dataclass(frozen=True)
class BoundEntry:
    method: str
    value: int
    witness: tuple[str, ...]
    source: str
    optimal: bool
    minimal: bool


@dataclass(frozen=True)
class IntervalEntry:
    lower: int
    upper: int
    lower_source: str
    upper_source: str


@dataclass(frozen=True)
class ExactEntry:
    ring: str
    group: AbelianGroup
    dimension: int | None
    source_rank: int
    target_rank: int
    image_rank: int
    loop_order: tuple[str, ...]
    signs: tuple[int, ...]
    source: str


@dataclass(frozen=True)
class VerdictEntry:
    check: str
    status: str
    source: str
    detail: str


@dataclass(frozen=True)
class OracleFailure:
    object_id: str
    check: str
    expected: str
    observed: str


@dataclass(frozen=True)
class OracleEntry:
    passed: bool
    checked: int
    failures: tuple[OracleFailure, ...]


@dataclass(frozen=True)
class Report:
    n: int
    mode: str
    chi_f: EulerEntry | None
    per_branch: tuple[BranchEntry, ...]
    per_loop: tuple[LoopEntry, ...]
    bounds: tuple[BoundEntry, ...]
    betti_n_minus_1: IntervalEntry | None
    betti_n: IntervalEntry | None
    exact: ExactEntry | None
    verdicts: tuple[VerdictEntry, ...]
    oracle: OracleEntry | None
    skipped: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()
    annotations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        """False when a diagnostic signals contradictory data or an oracle mismatch."""
        if self.oracle is not None and not self.oracle.passed:
            return False
        return not any(v.status == "contradiction" for v in self.verdicts)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping) -> "Report":
        return _build(cls, data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


def _build(tp, value):
    """Rebuild a (nested) dataclass value from its ``asdict`` form."""
    origin = typing.get_origin(tp)
    if origin in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        return None if value is None else _build(args[0], value)
    if origin is tuple:
        args = typing.get_args(tp)
        inner = args[0]
        return tuple(_build(inner, v) for v in value)
    if dataclasses.is_dataclass(tp):
        hints = typing.get_type_hints(tp)
        kwargs = {f.name: _build(hints[f.name], value[f.name]) for f in dataclasses.fields(tp) if f.name in value}
        return tp(**kwargs)
    return value


# -- analysis ---------------------------------------------------------------


def _euler_entry(d) -> EulerEntry:
    e = homology.euler_summary(d)
    return EulerEntry(e.value, e.source, e.computed, e.override, e.missing)


def analyze(d: DeformationDiagram, config: AnalysisConfig | None = None, annotations: Sequence[str] = ()) -> Report:
    """Validate ``d`` and run the analyses requested by ``config``.

    Checks selected by default are skipped (and listed in ``skipped``)
    when their optional input fields are absent; explicitly requested
    checks raise :class:`DataMissingError` instead.
    """
    config = config or AnalysisConfig()
    d = validate(d)
    selected = config.selected()
    explicit = config.checks is not None
    if config.exact:
        homology.require_exact_data(d)

    skipped, notes = [], []

    per_loop = []
    for b in sorted(d.branches, key=lambda b: b.id):
        for w in homology.branch_loops(d, b):
            wg = homology.wang_groups(w.monodromy)
            per_loop.append(
                LoopEntry(
                    id=w.label,
                    kind=w.kind,
                    branch=b.id,
                    special_point=w.special_point,
                    monodromy=tuple(tuple(r) for r in w.monodromy.to_rows()),
                    h_upper=wg.h_upper,
                    h_lower=wg.h_lower,
                    det_a_minus_i=w.monodromy.minus_identity().det(),
                    source=homology.SRC_WANG,
                )
            )
    per_branch = []
    for b in d.branches:
        c = d.counts(b.id)
        per_branch.append(
            BranchEntry(
                id=b.id,
                transversal_milnor_number=b.mu,
                genus=b.genus,
                tau=c.tau,
                gamma=c.gamma,
                loop_count=c.loop_count,
                group=homology.branch_group(b, d.loops_on(b.id)),
                group_source=homology.SRC_BRANCH,
                euler=homology.branch_euler(b, d.n, c.gamma),
                euler_source=homology.SRC_BRANCH_EULER,
            )
        )

    chi_entry = None
    if "euler" in selected:
        try:
            chi_entry = _euler_entry(d)
        except DataMissingError as exc:
            if explicit:
                raise
            skipped.append(f"euler: {exc}")
        if chi_entry is not None and chi_entry.override is not None:
            if chi_entry.computed is not None and chi_entry.computed != chi_entry.override:
                notes.append(
                    f"Euler characteristic override {chi_entry.override} differs from the value "
                    f"{chi_entry.computed} computed from local data"
                )
            elif chi_entry.missing_local_data:
                notes.append(
                    "Euler characteristic taken from override; local data missing on "
                    + ", ".join(chi_entry.missing_local_data)
                )

    bounds: list[homology.BettiBound] = []
    verdicts: list[VerdictEntry] = []
    if "vertical_bound" in selected:
        vb = homology.betti_bound_vertical(d)
        bounds.append(vb.bound)
        verdicts.append(VerdictEntry(**dataclasses.asdict(homology.vertical_verdict(vb))))
    if "special_bound" in selected:
        try:
            bounds.append(homology.betti_bound_special(d))
        except DataMissingError as exc:
            if explicit:
                raise
            skipped.append(f"special_bound: {exc}")
    bounds.append(homology.trivial_bound(d))

    exact_entry = None
    exact_result = None
    if config.exact:
        jm = homology.assemble_j(d, config.signs)
        group = homology.cokernel_over(jm.presentation(), config.prime)
        exact_result = homology.ExactResult(group, config.prime)
        exact_entry = ExactEntry(
            ring="Z" if config.prime is None else f"Z/{config.prime}",
            group=group,
            dimension=None if config.prime is None else len(group.torsion),
            source_rank=jm.source_rank,
            target_rank=jm.target_rank,
            image_rank=homology.image_rank(jm),
            loop_order=jm.loop_order,
            signs=jm.signs,
            source=homology.SRC_MV,
        )

    chi = chi_entry.value if chi_entry is not None else None
    iv = homology.betti_intervals(d, bounds=bounds, chi=chi, exact=exact_result, use_chi=False)
    notes.extend(iv.notes)
    b_lo = IntervalEntry(iv.lower, iv.upper, iv.lower_source, iv.upper_source)
    b_n = None
    if iv.n_lower is not None:
        b_n = IntervalEntry(iv.n_lower, iv.n_upper, f"{b_lo.lower_source} via chi", f"{b_lo.upper_source} via chi")

    minimum = min(b.value for b in bounds)
    bound_entries = tuple(
        BoundEntry(b.method, b.value, b.witness, b.source, b.optimal, b.value == minimum) for b in bounds
    )

    if "concentration" in selected:
        verdicts.append(VerdictEntry(**dataclasses.asdict(homology.concentration_check(d))))
    if "bouquet" in selected:
        count = (b_n.lower, b_n.upper) if b_n is not None else None
        verdicts.append(VerdictEntry(**dataclasses.asdict(homology.bouquet_check(d, count))))
    if "nonsplitting" in selected:
        verdicts.append(VerdictEntry(**dataclasses.asdict(homology.nonsplitting_check(d))))

    oracle = None
    if "cross_validate" in selected:
        rep = cw_oracle.cross_validate(d)
        oracle = OracleEntry(
            passed=rep.passed,
            checked=len(rep.checks),
            failures=tuple(OracleFailure(f.object_id, f.check, f.expected, f.observed) for f in rep.failures),
        )

    return Report(
        n=d.n,
        mode=config.mode,
        chi_f=chi_entry,
        per_branch=tuple(per_branch),
        per_loop=tuple(per_loop),
        bounds=bound_entries,
        betti_n_minus_1=b_lo,
        betti_n=b_n,
        exact=exact_entry,
        verdicts=tuple(verdicts),
        oracle=oracle,
        skipped=tuple(skipped),
        notes=tuple(notes),
        annotations=tuple(annotations),
    )


# -- text rendering ---------------------------------------------------------


def _interval(name: str, iv: IntervalEntry) -> str:
    if iv.lower == iv.upper:
        return f"{name} = {iv.lower}  [{iv.upper_source}]"
    return f"{name} in [{iv.lower}, {iv.upper}]  [lower: {iv.lower_source}; upper: {iv.upper_source}]"


def render_text(r: Report) -> str:
    n = r.n
    out = [f"Milnor fibre homology (n = {n}, mode = {r.mode})"]
    if r.chi_f is not None:
        line = f"chi(F) = {r.chi_f.value}  [{r.chi_f.source}]"
        if r.chi_f.override is not None and r.chi_f.computed is not None:
            line += f" (local data give {r.chi_f.computed})"
        out.append(line)
    out.append("branches:")
    for b in r.per_branch:
        out.append(
            f"  {b.id}: mu = {b.transversal_milnor_number}, g = {b.genus}, tau = {b.tau}, gamma = {b.gamma}, "
            f"#W = {b.loop_count}; H_n(Y,B) = {b.group}, chi(Y,B) = {b.euler}"
        )
    out.append("loops:")
    for w in r.per_loop:
        where = f", point {w.special_point}" if w.special_point else ""
        out.append(
            f"  {w.id} ({w.kind}, branch {w.branch}{where}): ker(A-I) = {w.h_upper}, coker(A-I) = {w.h_lower}, "
            f"det(A-I) = {w.det_a_minus_i}, A = {[list(row) for row in w.monodromy]}"
        )
    out.append(f"upper bounds for b_{n - 1}(F):")
    for b in r.bounds:
        flags = []
        if b.minimal:
            flags.append("minimum")
        if not b.optimal:
            flags.append("non-optimal search")
        tail = f"  <{', '.join(flags)}>" if flags else ""
        out.append(f"  {b.value}  {b.source} ({b.method}); witness {', '.join(b.witness) or '-'}{tail}")
    if r.exact is not None:
        e = r.exact
        if e.dimension is None:
            out.append(f"H_{n - 1}(F) = {e.group}  [{e.source}]")
        else:
            out.append(f"H_{n - 1}(F; {e.ring}) = ({e.ring})^{e.dimension}  [{e.source}]")
        out.append(f"  j: Z^{e.source_rank} -> Z^{e.target_rank}, rank of image over Q = {e.image_rank}")
    if r.betti_n_minus_1 is not None:
        out.append(_interval(f"b_{n - 1}(F)", r.betti_n_minus_1))
    if r.betti_n is not None:
        out.append(_interval(f"b_{n}(F)", r.betti_n))
    if r.verdicts:
        out.append("verdicts:")
        for v in r.verdicts:
            out.append(f"  {v.check}: {v.status}  [{v.source}] {v.detail}")
    if r.oracle is not None:
        status = "all agree" if r.oracle.passed else f"{len(r.oracle.failures)} DISAGREEMENT(S)"
        out.append(f"cell-complex oracle: {r.oracle.checked} checks, {status}")
        for f in r.oracle.failures:
            out.append(f"  {f.object_id} {f.check}: closed form {f.expected}, cell complex {f.observed}")
    for label, items in (("skipped", r.skipped), ("notes", r.notes), ("annotations", r.annotations)):
        if items:
            out.append(f"{label}:")
            out.extend(f"  - {x}" for x in items)
    return "\n".join(out) + "\n"
