"""Completions, supported objects, and the lattice of thick subcategories.

For the derived category of a Dynkin quiver the completion of a metric
{B_n} is the right perpendicular of the shift closure of B = ∩ B_n. For a
good metric B is already shift-closed and the shift closure can be dropped;
both branches are computed and must agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .dercat import DerIndec, HomTable
from .functor import FunctorSpec, certify_fully_faithful, preimage_metric, serre_conjugate
from .metric import Metric, forbidden_limit, intersection_ball, make_constant_metric, validate
from .subcat import Subcategory, is_thick, left_perp, right_perp, thick_closure


@dataclass(frozen=True)
class CompletionReport:
    metric: Metric
    intersection: Subcategory
    shift_closure: Subcategory
    completion: Subcategory
    good_branch_used: bool
    generators: tuple[tuple[int, ...], ...]
    cross_checks: tuple[tuple[str, bool], ...]

    @property
    def label(self) -> str:
        return thick_label(self.completion, self.generators)

    def to_json(self) -> dict:
        from .metric import metric_to_json
        return {"metric": metric_to_json(self.metric), "intersection": self.intersection.to_json(),
                "shift_closure": self.shift_closure.to_json(), "completion": self.completion.to_json(),
                "good_branch_used": self.good_branch_used,
                "generators": [[self.completion.table.name(r) for r in g] for g in self.generators],
                "label": self.label,
                "cross_checks": [{"name": n, "pass": ok} for n, ok in self.cross_checks]}


def thick_label(s: Subcategory, generators=None) -> str:
    if s.is_zero():
        return "0"
    if s.is_everything():
        return "D^b"
    gens = generators if generators is not None else minimal_generators(s)
    if len(gens) == 1:
        return "<" + ", ".join(s.table.name(r) for r in gens[0]) + ">"
    return "<" + ", ".join(s.table.name(r) for r in s.modules) + ">"


def minimal_generators(s: Subcategory, max_size: int = 2) -> tuple[tuple[int, ...], ...]:
    """First generating set of size 1, then 2, in module order; else all modules."""
    if s.is_zero():
        return ((),)
    t = s.table
    for size in range(1, max_size + 1):
        for combo in itertools.combinations(s.modules, size):
            if thick_closure(Subcategory.of_modules(t, combo)) == s:
                return (combo,)
    return (tuple(s.modules),)


def supports(m: Metric) -> tuple[Subcategory, Subcategory]:
    """(compact, weak) supported objects inside the bounded derived category.

    weak is the union over n of the right perpendiculars of the balls: the
    complement of the limit of the forbidden sets. compact is the
    intersection of all shifts of weak, which keeps a module exactly when
    weak holds it at every shift.
    """
    weak = forbidden_limit(m).complement()
    t = m.table
    compact = Subcategory.of_modules(t, [r for r, s in weak.items() if s.is_all()])
    return compact, weak


def completion(m: Metric) -> CompletionReport:
    b = intersection_ball(m)
    bs = b.shift_closure()
    general = right_perp(bs)
    good = validate(m).is_good
    checks = []
    if good:
        branch = right_perp(b)
        if branch != general:
            raise RuntimeError("good metric with disagreeing completion branches")
        checks.append(("good branch agrees", True))
        checks.append(("intersection ball is shift-closed", b.is_shift_closed()))
    checks.append(("thick closure fixpoint", thick_closure(general) == general))
    compact, weak = supports(m)
    checks.append(("compact support equals completion", compact == general))
    checks.append(("compact support inside weak support", compact.subset(weak)))
    return CompletionReport(m, b, bs, general, good, minimal_generators(general), tuple(checks))


# thick subcategories

def _masks(t: HomTable) -> list[int]:
    """For each module M, the modules N with Hom(M, N) or Ext(M, N) nonzero."""
    out = []
    for m in t.modules:
        mask = 0
        for n in t.modules:
            if t.hom[m][n] or t.ext[m][n]:
                mask |= 1 << n
        out.append(mask)
    return out


def _thick_mask(s: int, nz: list[int], full: int) -> int:
    # both perps of a shift-closed set are shift-closed, so bitmasks suffice
    forb = 0
    for m in range(len(nz)):
        if s >> m & 1:
            forb |= nz[m]
    rp = full & ~forb
    return sum(1 << m for m in range(len(nz)) if not nz[m] & rp)


def _mask_subcat(t: HomTable, mask: int) -> Subcategory:
    return Subcategory.of_modules(t, [r for r in t.modules if mask >> r & 1])


def _sort_key(s: Subcategory):
    return (len(s.modules), tuple(s.modules))


def enumerate_thick(t: HomTable, cap: int = 100000) -> list[Subcategory]:
    """All thick subcategories, by fixpoint closure under joins with one module."""
    n = len(t)
    full = (1 << n) - 1
    nz = _masks(t)
    found = {0, full}
    for r in range(n):
        found.add(_thick_mask(1 << r, nz, full))
    frontier = set(found)
    while frontier:
        new = set()
        for s in frontier:
            for r in range(n):
                if not s >> r & 1:
                    j = _thick_mask(s | 1 << r, nz, full)
                    if j not in found:
                        new.add(j)
        found |= new
        if len(found) > cap:
            raise RuntimeError(f"thick subcategory enumeration exceeded the cap of {cap}")
        frontier = new
    return sorted((_mask_subcat(t, s) for s in found), key=_sort_key)


def enumerate_thick_bruteforce(t: HomTable) -> list[Subcategory]:
    """Thick closure of every subset of modules, deduplicated."""
    if len(t) > 16:
        raise ValueError("brute force over subsets is limited to 16 modules")
    out = set()
    for size in range(len(t) + 1):
        for combo in itertools.combinations(t.modules, size):
            out.add(thick_closure(Subcategory.of_modules(t, combo)))
    return sorted(out, key=_sort_key)


def thick_hasse_dot(t: HomTable, subcats: list[Subcategory]) -> str:
    labels = [thick_label(s) for s in subcats]
    lines = ["digraph thick {", "  rankdir=BT;"]
    for i, lab in enumerate(labels):
        lines.append(f'  n{i} [label="{lab}"];')
    for i, a in enumerate(subcats):
        for j, b in enumerate(subcats):
            if i != j and a.subset(b) and not any(
                    k not in (i, j) and a.subset(c) and c.subset(b) and c != a and c != b
                    for k, c in enumerate(subcats)):
                lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def realize_as_completion(t: HomTable, s: Subcategory) -> Metric:
    """A constant metric whose completion is the thick subcategory s."""
    if s.table.key != t.key:
        raise ValueError("subcategory over a different table")
    if not is_thick(s):
        raise ValueError("subcategory is not thick")
    m = make_constant_metric(left_perp(s))
    if completion(m).completion != s:
        raise RuntimeError("constant metric does not realize the subcategory")
    return m


def transport_check(g: FunctorSpec, m_tgt: Metric) -> dict:
    """Compare the completion of m_tgt with that of its preimage under g.

    g goes from the category S to T and needs a declared left adjoint F;
    its right adjoint J is taken as declared or built by Serre conjugation.
    Both adjoints must pass the fully faithful certificate.
    """
    f = g.left_adjoint
    if f is None:
        raise ValueError("transport_check needs a declared left adjoint")
    j = g.right_adjoint if g.right_adjoint is not None else serre_conjugate(g)
    for name, h in (("left adjoint", f), ("right adjoint", j)):
        if "unknown" in (h.flags["full"], h.flags["faithful"]) and not certify_fully_faithful(h):
            raise ValueError(f"{name} is not fully faithful")
    src, tgt = g.source, g.target
    comp_t = completion(m_tgt)
    comp_s = completion(preimage_metric(g, m_tgt))
    pairs = []
    images = []
    ok = True
    for r in comp_s.completion.modules:
        img = g.apply(DerIndec(r, 0))
        if len(img) != 1 or img.summands[0] not in comp_t.completion:
            ok = False
            pairs.append([src.label(DerIndec(r, 0)), [tgt.label(y) for y in img]])
            continue
        y = img.summands[0]
        images.append(y.module)
        pairs.append([f"{src.name(r)}@t", f"{tgt.name(y.module)}@t{y.shift:+d}" if y.shift else
                      f"{tgt.name(y.module)}@t"])
    if len(set(images)) != len(images) or set(images) != set(comp_t.completion.modules):
        ok = False
    if not comp_s.completion.is_shift_closed() or not comp_t.completion.is_shift_closed():
        ok = False
    return {"bijection": ok, "pairs": pairs,
            "source_completion": comp_s.label, "target_completion": comp_t.label,
            "right_adjoint": j.name}
