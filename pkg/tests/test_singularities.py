import random

import numpy as np
import pytest

from foliation_lab.algebra import ONE, X, Y, ZERO, RationalFunction
from foliation_lab.forms import MeromorphicOneForm
from foliation_lab.singularities import (
    ChartRegion,
    NumericControls,
    SingularityError,
    TaxonomyTag,
    classify,
    find_singularities,
    resonant_split,
)

RF = RationalFunction


def form(p, q):
    return MeromorphicOneForm(RF.of(p), RF.of(q))


def test_radial_single_exact_singularity():
    recs = find_singularities(form(-Y, X))
    assert len(recs) == 1
    r = recs[0]
    assert r.is_exact
    assert r.location == (0, 0)
    assert r.order == 1


def test_trivial_form_no_singularities():
    assert find_singularities(form(ZERO, ONE)) == []


def test_two_singularities_with_residuals():
    recs = find_singularities(form(-Y, X * X - 1), ChartRegion(2, 2))
    assert len(recs) == 2
    locs = sorted(r.location[0].real for r in recs)
    assert locs == pytest.approx([-1.0, 1.0])
    for r in recs:
        qr, pr = form(-Y, X * X - 1).reduced_tangent_field()
        assert abs(qr.eval_complex(*r.location)) < 1e-10
        assert abs(pr.eval_complex(*r.location)) < 1e-10


def test_region_filtering():
    recs = find_singularities(form(-Y, X * X - 4), ChartRegion(1.0, 1.0))
    assert recs == []


def test_common_factor_rejected():
    w = MeromorphicOneForm(RF.of(-Y * X), RF.of(X * X))
    # reduced field strips the common x, so this one is actually fine
    recs = find_singularities(w)
    assert len(recs) == 1
    # a genuinely non-isolated singular set must raise
    w2 = form(X + Y, (X + Y) * Y)
    with pytest.raises(SingularityError):
        find_singularities(w2)


def test_classify_table():
    assert classify((1, 2j)) is TaxonomyTag.HYPERBOLIC
    assert classify((1, -2)) is TaxonomyTag.SIEGEL
    assert classify((np.sqrt(2), 1)) is TaxonomyTag.IRRATIONAL_FOCUS
    assert classify((1, 0)) is TaxonomyTag.SADDLE_NODE
    assert classify((0, 0)) is TaxonomyTag.DEGENERATE
    assert classify((2, 1)) is TaxonomyTag.RESONANT
    assert classify((3, 2)) is TaxonomyTag.DICRITICAL_LINEAR


def test_classify_scale_invariant():
    rng = random.Random(13)
    pairs = [(1, 2j), (1, -2), (np.sqrt(2), 1), (2, 1), (3, 2), (1, 0)]
    for l1, l2 in pairs:
        base = classify((l1, l2))
        for _ in range(10):
            c = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            if abs(c) < 1e-3:
                continue
            assert classify((c * l1, c * l2)) is base


def test_classify_order_symmetric():
    assert classify((1, -2)) is classify((-2, 1))
    assert classify((1, 2j)) is classify((2j, 1))
    assert classify((0, 1)) is TaxonomyTag.SADDLE_NODE


def test_classify_rational_bound_controls_detection():
    # 311/99 is rational but beyond a small denominator bound
    val = 311 / 99
    assert classify((val, 1), rational_bound=64) is TaxonomyTag.IRRATIONAL_FOCUS
    assert classify((val, 1), rational_bound=128) in (
        TaxonomyTag.DICRITICAL_LINEAR,
        TaxonomyTag.RESONANT,
    )


def test_resonant_split_radial_dicritical():
    w = form(-Y, X)
    rec = find_singularities(w)[0]
    assert resonant_split(w, rec) is TaxonomyTag.DICRITICAL_LINEAR


def test_resonant_split_poincare_dulac_n1():
    w = form(-Y, X + Y)
    rec = find_singularities(w)[0]
    assert rec.quotient_class is TaxonomyTag.RESONANT
    assert resonant_split(w, rec) is TaxonomyTag.POINCARE_DULAC


def test_resonant_split_n2_cases():
    w = form(-Y, X.scale(2))
    rec = find_singularities(w)[0]
    assert resonant_split(w, rec) is TaxonomyTag.DICRITICAL_LINEAR
    w2 = form(-Y, X.scale(2) + Y * Y)
    rec2 = find_singularities(w2)[0]
    assert resonant_split(w2, rec2) is TaxonomyTag.POINCARE_DULAC


def test_resonant_split_obstruction_needs_normalization():
    # an x*y term must not fool the obstruction test at order 2
    w = form(-Y, X.scale(2) + X * Y)
    rec = find_singularities(w)[0]
    assert resonant_split(w, rec) is TaxonomyTag.DICRITICAL_LINEAR


def test_resonant_split_n3():
    w = form(-Y, X.scale(3) + Y**3)
    rec = find_singularities(w)[0]
    assert resonant_split(w, rec) is TaxonomyTag.POINCARE_DULAC
    w2 = form(-Y, X.scale(3) + X * Y * Y)
    rec2 = find_singularities(w2)[0]
    assert resonant_split(w2, rec2) is TaxonomyTag.DICRITICAL_LINEAR


def test_off_origin_singularity_exactness():
    w = form(-Y, X * X - 1)
    recs = find_singularities(w)
    assert all(r.is_exact for r in recs)
    plus = [r for r in recs if r.location[0].real > 0][0]
    assert resonant_split(w, plus) is TaxonomyTag.DICRITICAL_LINEAR
