"""Quadratic blow-ups, Seidenberg reduction and divisor bookkeeping.

Blow-up centers must be exact Gaussian-rational points: the proper-transform
division is an exact operation and floating centers would poison every
multiplicity downstream.  Numeric singularities are reported, never blown up.

Divisor components are tracked combinatorially: a fresh exceptional curve
starts at self-intersection -1 and each parent component through a later
center is decremented.  That is all the intersection theory the divisor
graph and the Dulac chains need.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import (
    ONE,
    X,
    Y,
    BivariatePolynomial,
    GaussianRational,
    RationalFunction,
    extract_factor,
    poly_divide_exact,
)
from .forms import FormValidationError
from .forms import MeromorphicOneForm, component_order, curve_invariant
from .singularities import (
    ChartRegion,
    NumericControls,
    SingularityError,
    SingularityRecord,
    TaxonomyTag,
    classify,
    find_singularities,
    resonant_split,
)


class BlowupError(RuntimeError):
    pass


@dataclass
class BlowupChart:
    chart_id: str
    transform: str  # "y=t*x" or "x=s*y"
    pulled_form: MeromorphicOneForm  # raw pull-back, divisor orders intact
    proper_form: MeromorphicOneForm  # exceptional factor fully extracted
    exceptional_poly: BivariatePolynomial
    exceptional_order: int
    dicritical_flag: bool


def blowup_at(w: MeromorphicOneForm, center: Tuple[GaussianRational, GaussianRational]):
    """Blow up w at an exact point; returns the two standard charts.

    The center is translated to the origin first.  In each chart the
    exceptional factor is extracted maximally from the pulled-back form; the
    dicritical flag records whether the exceptional divisor fails to be
    invariant for the proper transform.
    """
    cx, cy = center
    if not isinstance(cx, GaussianRational) or not isinstance(cy, GaussianRational):
        raise BlowupError(
            "blow-up centers must be exact Gaussian-rational points; polish the "
            "singularity to exact coordinates first or decline"
        )
    w0 = w.shift(cx, cy)

    # chart T: x = x, y = t*x   (coordinates (x, t))
    pulled_t = w0.pullback(X, Y * X, ONE, BivariatePolynomial.zero(), Y, X)
    chart_t = _finish_chart(pulled_t, X, "y=t*x", "t")

    # chart S: x = s*y, y = y   (coordinates (s, y))
    pulled_s = w0.pullback(X * Y, Y, Y, X, BivariatePolynomial.zero(), ONE)
    chart_s = _finish_chart(pulled_s, Y, "x=s*y", "s")
    return chart_t, chart_s


def _finish_chart(pulled: MeromorphicOneForm, exc: BivariatePolynomial, transform: str, chart_id: str) -> BlowupChart:
    order = component_order(pulled, exc)
    if order > 0:
        scale = RationalFunction(ONE, exc**order)
    elif order < 0:
        scale = RationalFunction(exc ** (-order))
    else:
        scale = RationalFunction(ONE)
    proper = MeromorphicOneForm(pulled.coeff_dx * scale, pulled.coeff_dy * scale)
    return BlowupChart(
        chart_id=chart_id,
        transform=transform,
        pulled_form=pulled,
        proper_form=proper,
        exceptional_poly=exc,
        exceptional_order=order,
        dicritical_flag=not curve_invariant(proper, exc),
    )


class SinkSourceSign(enum.Enum):
    SINK_ON_V_AXIS = "sink_on_v0_axis"
    SOURCE_ON_V_AXIS = "source_on_v0_axis"
    HOLOMORPHIC = "holomorphic_case"


def sink_source_sign(
    lambda1: float, lambda2: float, a: int, b: int, kind: str = "siegel"
) -> SinkSourceSign:
    """Orientation of the real trajectory foliation on the separatrices.

    For a Siegel corner written as u^a v^b [l1 u(1+...) dv + l2 v(1+...) du]
    the sign of l1(1+a) - l2(1+b) decides: positive means {v=0} is a sink
    (and {u=0} a source), zero means the foliated form is holomorphic on both
    axes.  For an irrational focus the combination is l1(a+1) + l2(b+1) and
    both separatrices share the verdict.
    """
    if kind == "siegel":
        s = lambda1 * (1 + a) - lambda2 * (1 + b)
    elif kind == "focus":
        s = lambda1 * (1 + a) + lambda2 * (1 + b)
    else:
        raise ValueError("kind must be 'siegel' or 'focus'")
    if s > 0:
        return SinkSourceSign.SINK_ON_V_AXIS
    if s < 0:
        return SinkSourceSign.SOURCE_ON_V_AXIS
    return SinkSourceSign.HOLOMORPHIC


@dataclass
class DivisorNode:
    index: int
    self_intersection: int
    order: int  # order in the total transform of w (sign: zeros +, poles -)
    dicritical: bool
    invariant: bool
    created_at_depth: int
    declared: bool = False


@dataclass
class LeafSingularity:
    chart_id: str
    record: SingularityRecord
    final_tag: TaxonomyTag
    on_components: List[int]
    reduced: bool


@dataclass
class BlowupEvent:
    event_id: str
    parent_chart: str
    center: Tuple[str, str]  # exact center, stringified
    new_component: int
    charts: Tuple[BlowupChart, BlowupChart]


@dataclass
class ReductionTree:
    events: List[BlowupEvent] = field(default_factory=list)
    components: List[DivisorNode] = field(default_factory=list)
    adjacency: List[Tuple[int, int]] = field(default_factory=list)
    leaves: List[LeafSingularity] = field(default_factory=list)
    unreduced: List[LeafSingularity] = field(default_factory=list)
    depth_reached: int = 0
    complete: bool = True

    @property
    def depth(self) -> int:
        return self.depth_reached

    def dicritical_components(self) -> List[DivisorNode]:
        return [c for c in self.components if c.dicritical]

    def to_dot(self) -> str:
        lines = ["graph divisors {"]
        for c in self.components:
            tag = "dicritical" if c.dicritical else ("invariant" if c.invariant else "transverse")
            label = f"D{c.index}\\norder={c.order} self={c.self_intersection}\\n{tag}"
            lines.append(f'  D{c.index} [label="{label}"];')
        for i, j in sorted(set(self.adjacency)):
            corner = next(
                (
                    leaf
                    for leaf in self.leaves
                    if i in leaf.on_components and j in leaf.on_components
                ),
                None,
            )
            if corner is not None:
                e1, e2 = corner.record.eigenvalues
                lines.append(
                    f'  D{i} -- D{j} [label="{e1.real:.6g}{e1.imag:+.6g}i / '
                    f'{e2.real:.6g}{e2.imag:+.6g}i"];'
                )
            else:
                lines.append(f"  D{i} -- D{j};")
        lines.append("}")
        return "\n".join(lines)

    def to_json_dict(self) -> dict:
        return {
            "events": [
                {
                    "event_id": e.event_id,
                    "parent_chart": e.parent_chart,
                    "center": list(e.center),
                    "new_component": e.new_component,
                    "exceptional_order": e.charts[0].exceptional_order,
                    "dicritical": e.charts[0].dicritical_flag,
                }
                for e in self.events
            ],
            "components": [
                {
                    "index": c.index,
                    "self_intersection": c.self_intersection,
                    "order": c.order,
                    "dicritical": c.dicritical,
                    "invariant": c.invariant,
                    "declared": c.declared,
                }
                for c in self.components
            ],
            "adjacency": sorted(set(self.adjacency)),
            "leaves": [
                {
                    "chart": l.chart_id,
                    "location": [repr(l.record.location[0]), repr(l.record.location[1])],
                    "tag": l.final_tag.value,
                    "reduced": l.reduced,
                    "on_components": l.on_components,
                }
                for l in self.leaves + self.unreduced
            ],
            "depth": self.depth_reached,
            "complete": self.complete,
        }


@dataclass
class _Visible:
    """A divisor component as seen in the current chart."""

    index: int
    poly: BivariatePolynomial

    def invariant(self, tree: "ReductionTree") -> bool:
        return tree.components[self.index].invariant

    def order(self, tree: "ReductionTree") -> int:
        return tree.components[self.index].order


def _final_tag(
    w: MeromorphicOneForm, rec: SingularityRecord, hints=()
) -> TaxonomyTag:
    if rec.quotient_class is TaxonomyTag.RESONANT:
        if rec.exact_location is None:
            return TaxonomyTag.RESONANT
        return resonant_split(w, rec, hints)
    return rec.quotient_class


def seidenberg_reduce(
    w: MeromorphicOneForm,
    region: ChartRegion = ChartRegion(),
    max_depth: int = 12,
    controls: NumericControls = NumericControls(),
    declared: Sequence[BivariatePolynomial] = (),
) -> ReductionTree:
    """Blow up every non-reduced singularity until all are reduced.

    Returns the event tree with the divisor graph populated.  Hitting the
    depth limit flags the offending singularities as unreduced instead of
    looping; non-exact centers raise.
    """
    tree = ReductionTree()
    visible = []
    for k, poly in enumerate(declared):
        node = DivisorNode(
            index=len(tree.components),
            self_intersection=0,
            order=component_order(w, poly),
            dicritical=False,
            invariant=curve_invariant(w, poly),
            created_at_depth=0,
            declared=True,
        )
        tree.components.append(node)
        visible.append(_Visible(node.index, poly))
    _process_chart(
        w, "root", region, None, 0, max_depth, visible, tree, controls, False
    )
    return tree


def _on_components(visible: List[_Visible], rec: SingularityRecord) -> List[int]:
    out = []
    for v in visible:
        if rec.exact_location is not None:
            hit = not v.poly.eval_exact(*rec.exact_location)
        else:
            hit = abs(v.poly.eval_complex(*rec.location)) < 1e-8
        if hit:
            out.append(v.index)
    return out


def _filter_to_locus(sings, locus):
    if locus is None:
        return sings
    if locus == "origin":
        return [
            s
            for s in sings
            if (
                s.exact_location == (GaussianRational(), GaussianRational())
                if s.exact_location is not None
                else max(abs(s.location[0]), abs(s.location[1])) < 1e-10
            )
        ]
    return [
        s
        for s in sings
        if (
            not locus.eval_exact(*s.exact_location)
            if s.exact_location is not None
            else abs(locus.eval_complex(*s.location)) < 1e-8
        )
    ]


def _process_chart(
    w: MeromorphicOneForm,
    chart_id: str,
    region: ChartRegion,
    exceptional_filter,
    depth: int,
    max_depth: int,
    visible: List[_Visible],
    tree: ReductionTree,
    controls: NumericControls,
    do_normalize: bool,
) -> None:
    tree.depth_reached = max(tree.depth_reached, depth)
    try:
        sings = find_singularities(
            w, region, controls, hints=tuple(v.poly for v in visible)
        )
    except SingularityError as exc:
        raise BlowupError(f"chart {chart_id}: {exc}") from exc
    sings = _filter_to_locus(sings, exceptional_filter)
    norm_centers = (
        _normalization_centers(w, visible, tree, controls) if do_normalize else []
    )

    blown: List[Tuple[GaussianRational, GaussianRational]] = []
    for rec in sings:
        on_comp = _on_components(visible, rec)
        for pair_a in on_comp:
            for pair_b in on_comp:
                if pair_a < pair_b:
                    tree.adjacency.append((pair_a, pair_b))
        tag = _final_tag(w, rec, tuple(v.poly for v in visible))
        on_perp = any(not tree.components[i].invariant for i in on_comp)
        is_norm_center = rec.exact_location is not None and any(
            rec.exact_location == c for c in norm_centers
        )
        needs_blowup = not tag.reduced or (do_normalize and (on_perp or is_norm_center))
        leaf = LeafSingularity(chart_id, rec, tag, on_comp, tag.reduced)
        if not needs_blowup:
            tree.leaves.append(leaf)
            continue
        if depth >= max_depth:
            (tree.leaves if tag.reduced else tree.unreduced).append(leaf)
            tree.complete = False
            continue
        if rec.exact_location is None:
            raise BlowupError(
                f"chart {chart_id}: singularity at {rec.location} must be blown "
                "up but has no exact coordinates"
            )
        blown.append(rec.exact_location)
        _blow_and_descend(
            w, chart_id, rec.exact_location, depth, max_depth, visible, tree,
            controls, do_normalize,
        )

    for center in norm_centers:
        if any(center == b for b in blown):
            continue
        if depth >= max_depth:
            tree.complete = False
            continue
        blown.append(center)
        _blow_and_descend(
            w, chart_id, center, depth, max_depth, visible, tree, controls, True
        )


def _strict_transform(poly, x_sub, y_sub, exc):
    pulled = poly.substitute(x_sub, y_sub)
    _, strict = extract_factor(pulled, exc)
    return strict


def _blow_and_descend(
    w, chart_id, center, depth, max_depth, visible, tree, controls, do_normalize
):
    cx, cy = center
    chart_t, chart_s = blowup_at(w, (cx, cy))
    new_index = len(tree.components)
    node = DivisorNode(
        index=new_index,
        self_intersection=-1,
        order=chart_t.exceptional_order,
        dicritical=chart_t.dicritical_flag,
        invariant=not chart_t.dicritical_flag,
        created_at_depth=depth + 1,
    )
    tree.components.append(node)
    event = BlowupEvent(
        event_id=f"e{len(tree.events)}",
        parent_chart=chart_id,
        center=(str(cx), str(cy)),
        new_component=new_index,
        charts=(chart_t, chart_s),
    )
    tree.events.append(event)

    # parent components through the center lose one self-intersection and
    # become adjacent to the fresh exceptional curve
    for v in visible:
        if not v.poly.eval_exact(cx, cy):
            tree.components[v.index].self_intersection -= 1
            tree.adjacency.append((min(v.index, new_index), max(v.index, new_index)))

    def child_visible(x_sub, y_sub, exc):
        out = []
        for v in visible:
            strict = _strict_transform(v.poly.shift(cx, cy), x_sub, y_sub, exc)
            if not strict.is_constant():
                out.append(_Visible(v.index, strict))
        out.append(_Visible(new_index, exc))
        return out

    big = ChartRegion(1e6, 1e6)
    _process_chart(
        chart_t.pulled_form,
        f"{chart_id}/{event.event_id}t",
        big,
        X,
        depth + 1,
        max_depth,
        child_visible(X, Y * X, X),
        tree,
        controls,
        do_normalize,
    )
    _process_chart(
        chart_s.pulled_form,
        f"{chart_id}/{event.event_id}s",
        big,
        "origin",
        depth + 1,
        max_depth,
        child_visible(X * Y, Y, Y),
        tree,
        controls,
        do_normalize,
    )


# -- normalization ----------------------------------------------------------


def normalize(
    w: MeromorphicOneForm,
    components: Sequence[BivariatePolynomial],
    max_depth: int = 12,
    region: ChartRegion = ChartRegion(),
    controls: NumericControls = NumericControls(),
) -> ReductionTree:
    """Seidenberg reduction plus the standard normalization blow-ups.

    Beyond reducedness, blow-ups continue until, within the declared and
    exceptional components: singular points avoid every non-invariant
    component, components are smooth, zero and pole components are separated
    at regular points, distinct non-invariant components are disjoint, and
    the foliation is transverse to every non-invariant component.  Centers
    whose coordinates cannot be verified exactly stop the pass with
    complete=False instead of guessing.
    """
    tree = ReductionTree()
    visible = []
    for poly in components:
        node = DivisorNode(
            index=len(tree.components),
            self_intersection=0,
            order=component_order(w, poly),
            dicritical=False,
            invariant=curve_invariant(w, poly),
            created_at_depth=0,
            declared=True,
        )
        tree.components.append(node)
        visible.append(_Visible(node.index, poly))
    _process_chart(
        w, "root", region, None, 0, max_depth, visible, tree, controls, True
    )
    return tree


def _normalization_centers(
    w: MeromorphicOneForm,
    visible: List[_Visible],
    tree: ReductionTree,
    controls: NumericControls,
) -> List[Tuple[GaussianRational, GaussianRational]]:
    """Exact points that still violate one of the normalization conditions.

    Covers, for the components visible in this chart: singular points of a
    component (smoothness), regular intersections of zero with pole
    components, intersections of two non-invariant components, and tangency
    points of the foliation with a non-invariant component.
    """

    def exact_common_zeros(a: BivariatePolynomial, b: BivariatePolynomial):
        if a.is_constant() or b.is_constant():
            return []
        try:
            probe = MeromorphicOneForm(RationalFunction.of(-b), RationalFunction.of(a))
            recs = find_singularities(probe, ChartRegion(1e6, 1e6), controls)
        except (SingularityError, FormValidationError):
            return []
        return [r.exact_location for r in recs if r.exact_location is not None]

    qr, pr = w.reduced_tangent_field([v.poly for v in visible])

    def regular(z) -> bool:
        return bool(qr.eval_exact(*z)) or bool(pr.eval_exact(*z))

    centers = []
    for v in visible:
        dxp, dyp = v.poly.derivative("x"), v.poly.derivative("y")
        centers += [
            z for z in exact_common_zeros(dxp, dyp) if not v.poly.eval_exact(*z)
        ]
        if not v.invariant(tree):
            tangency = qr * v.poly.derivative("x") - pr * v.poly.derivative("y")
            if not tangency.is_zero() and poly_divide_exact(tangency, v.poly) is None:
                centers += [
                    z for z in exact_common_zeros(v.poly, tangency) if regular(z)
                ]
    for i, vi in enumerate(visible):
        for vj in visible[i + 1 :]:
            oi, oj = vi.order(tree), vj.order(tree)
            need_split = (oi * oj < 0) or (
                not vi.invariant(tree) and not vj.invariant(tree)
            )
            if need_split:
                centers += [
                    z for z in exact_common_zeros(vi.poly, vj.poly) if regular(z)
                ]
    uniq = []
    seen = set()
    for c in centers:
        key = (str(c[0]), str(c[1]))
        if key not in seen:
            seen.add(key)
            uniq.append(c)
    return uniq
