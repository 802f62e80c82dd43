import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsmetric.classifier import (
    CHUNK,
    DistanceSpec,
    InvalidSpec,
    classify,
    evaluate,
    fit,
    learning_curve,
    nearest_neighbors,
    predict,
)
from tsmetric.core import DimensionMismatch, LabeledDataset
from tsmetric.dtw import DtwConfig, dtw_distance
from tsmetric.metric import EllipsoidMetric, distance
from tsmetric.synth import GeneratorSpec, UnknownGenerator, generate


def two_class(rng, m=12, n=16):
    X = np.vstack([rng.standard_normal((m, n)), rng.standard_normal((m, n)) + 1.5])
    return LabeledDataset.from_arrays(X, np.repeat([1, 2], m))


# spec parsing

@pytest.mark.parametrize(
    "text,canon",
    [
        ("euclidean", "euclidean"),
        ("dtw", "dtw"),
        ("dtw:band=10", "dtw:band=10"),
        ("mahalanobis:shrinkage:class", "mahalanobis:shrinkage:class:unit"),
        ("mahalanobis:diagonal:global:raw", "mahalanobis:diagonal:global:raw"),
        ("maha:pinv:class_based:unit", "mahalanobis:pseudoinverse:class:unit"),
    ],
)
def test_spec_round_trip(text, canon):
    s = DistanceSpec.parse(text)
    assert str(s) == canon
    assert DistanceSpec.parse(str(s)) == s


@pytest.mark.parametrize(
    "text",
    ["", "cosine", "euclidean:band=3", "dtw:band=-1", "dtw:band=x", "mahalanobis:shrinkage",
     "mahalanobis:ledoit:class", "mahalanobis:diagonal:local", "mahalanobis:diagonal:class:frob"],
)
def test_spec_invalid(text):
    with pytest.raises(InvalidSpec):
        DistanceSpec.parse(text)


def test_band_on_non_dtw_rejected():
    with pytest.raises(InvalidSpec):
        DistanceSpec("euclidean", band=3)


# fitting

def test_fit_non_mahalanobis_has_no_state(rng):
    d = two_class(rng)
    for s in ("euclidean", "dtw"):
        m = fit(s, d)
        assert m.metric is None and m.class_metrics is None and m.fallback_log == ()


def test_fit_class_based_structure(rng):
    d = two_class(rng)
    m = fit("mahalanobis:diagonal:class", d)
    assert sorted(m.class_metrics) == [1, 2]
    assert all(v.form == "diagonal" for v in m.class_metrics.values())
    g = fit("mahalanobis:shrinkage:global", d)
    assert g.metric.form == "full" and g.class_metrics is None


def test_single_instance_class_falls_back(rng):
    X = np.vstack([rng.standard_normal((6, 10)), rng.standard_normal((1, 10)) + 3])
    d = LabeledDataset.from_arrays(X, np.array([1] * 6 + [2]))
    for est in ("shrinkage", "diagonal", "pseudoinverse"):
        m = fit(f"mahalanobis:{est}:class", d)
        assert m.class_metrics[2].form == "identity"
        assert [(e.label, e.reason) for e in m.fallback_log] == [(2, "InsufficientSamples")]
        assert m.class_metrics[1].form != "identity"
        assert classify(m, d, X[-1]) == 2


def test_degenerate_target_falls_back():
    # a constant attribute makes the shrinkage target singular
    X = np.array([[1.0, 0.0], [2.0, 0.0], [4.0, 0.0], [0.0, 1.0], [0.0, 3.0]])
    d = LabeledDataset.from_arrays(X, np.array([1, 1, 1, 2, 2]))
    m = fit("mahalanobis:shrinkage:class", d)
    assert [e.reason for e in m.fallback_log] == ["DegenerateTarget", "DegenerateTarget"]


def test_zero_variance_diagonal_does_not_fall_back():
    X = np.array([[1.0, 5.0], [2.0, 5.0], [4.0, 5.0]])
    m = fit("mahalanobis:diagonal:global", LabeledDataset.from_arrays(X, np.array([1, 1, 2])))
    assert m.fallback_log == ()
    assert m.metric.weights[1] == 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["shrinkage", "diagonal", "pseudoinverse"]),
       st.sampled_from(["global", "class"]))
def test_fit_never_aborts(seed, est, loc):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 8), rng.integers(1, 6)
    X = rng.integers(-2, 3, size=(m, n)).astype(float)  # lots of ties and constant columns
    d = LabeledDataset.from_arrays(X, rng.integers(1, 4, size=m))
    model = fit(f"mahalanobis:{est}:{loc}", d)
    if loc == "class":
        assert sorted(model.class_metrics) == d.labels
    predict(model, d, X)


# classification

def test_single_training_instance():
    d = LabeledDataset.from_arrays(np.array([[1.0, 2.0]]), np.array([7]))
    assert classify(fit("euclidean", d), d, [100.0, -3.0]) == 7


def test_self_is_nearest(rng):
    d = two_class(rng)
    for s in ("euclidean", "dtw", "mahalanobis:shrinkage:class", "mahalanobis:diagonal:global"):
        rep = evaluate(s, d, d)
        assert rep.error_rate == 0.0


def test_ties_go_to_lowest_index():
    X = np.array([[1.0, 1.0], [0.0, 0.0], [0.0, 0.0], [5.0, 5.0]])
    d = LabeledDataset.from_arrays(X, np.array([1, 2, 3, 2]))
    for s in ("euclidean", "dtw", "mahalanobis:diagonal:global"):
        assert nearest_neighbors(fit(s, d), d, [[0.0, 0.0]])[0] == 1
    # equidistant from two rows
    assert nearest_neighbors(fit("euclidean", d), d, [[0.5, 0.5]])[0] == 0


def test_matches_brute_force(rng):
    train = two_class(rng, m=8, n=10)
    Q = rng.standard_normal((15, 10)) + 0.7
    for s in ("euclidean", "mahalanobis:shrinkage:global", "mahalanobis:diagonal:class",
              "mahalanobis:pseudoinverse:class"):
        model = fit(s, train)
        got = nearest_neighbors(model, train, Q)
        for a, q in enumerate(Q):
            ident = EllipsoidMetric.identity(10)
            d = [distance(ident if s == "euclidean" else model.metric_for(label), q, t) for t, label in train]
            assert got[a] == int(np.argmin(d)), s
    model = fit("dtw:band=2", train)
    got = nearest_neighbors(model, train, Q)
    for a, q in enumerate(Q):
        assert got[a] == int(np.argmin([dtw_distance(q, t, DtwConfig(2)) for t in train.X]))


def test_identity_metric_equals_euclidean(rng):
    train = two_class(rng)
    Q = rng.standard_normal((80, 16))
    # a model whose every fit falls back to identity
    ident = fit("mahalanobis:diagonal:class", train)
    object.__setattr__(ident, "class_metrics", {k: EllipsoidMetric.identity(16) for k in ident.class_metrics})
    assert np.array_equal(predict(ident, train, Q), predict(fit("euclidean", train), train, Q))


def test_raw_inverse_global_scale_invariance(rng):
    train = two_class(rng, m=20, n=8)
    test = two_class(rng, m=20, n=8)
    for est in ("shrinkage", "diagonal"):
        spec = f"mahalanobis:{est}:global:raw"
        base = evaluate(spec, train, test).predictions
        for s in (1e-3, 3.0, 1e3):
            scaled = evaluate(
                spec,
                LabeledDataset.from_arrays(train.X * s, train.y),
                LabeledDataset.from_arrays(test.X * s, test.y),
            ).predictions
            assert np.array_equal(scaled, base)


def test_dimension_mismatch(rng):
    d = two_class(rng)
    with pytest.raises(DimensionMismatch):
        classify(fit("euclidean", d), d, np.zeros(5))
    short = LabeledDataset.from_arrays(np.zeros((2, 5)), np.array([1, 2]))
    with pytest.raises(DimensionMismatch):
        evaluate("euclidean", d, short)


# evaluation

def test_report_fields(rng):
    train, test = two_class(rng), two_class(rng)
    rep = evaluate("euclidean", train, test)
    assert rep.error_rate == rep.n_errors / rep.n_test
    assert sum(rep.per_class_errors.values()) == rep.n_errors
    assert rep.n_test == len(test) and rep.wall_time >= 0
    assert rep.spec == "euclidean"


@pytest.mark.parametrize("spec", ["euclidean", "dtw", "mahalanobis:shrinkage:class", "mahalanobis:diagonal:global"])
def test_deterministic_across_workers(spec):
    train = generate(GeneratorSpec("cc", 8, seed=1))
    test = generate(GeneratorSpec("cc", 40, seed=2))  # 240 queries: several chunks
    assert len(test) > 3 * CHUNK
    ref = evaluate(spec, train, test, workers=1)
    for w in (2, 3, 8):
        rep = evaluate(spec, train, test, workers=w)
        assert np.array_equal(rep.predictions, ref.predictions)
        assert rep.error_rate == ref.error_rate and rep.per_class_errors == ref.per_class_errors


# learning curve

def test_learning_curve_structure():
    rows = learning_curve("cbf", [10], n_test_per_class=20, repeats=1, seed=3)
    assert [(r.train_size, r.repeat, r.spec) for r in rows] == [
        (10, 0, "euclidean"), (10, 0, "mahalanobis:diagonal:class:unit")
    ]
    assert all(0.0 <= r.error_rate <= 1.0 for r in rows)


def test_learning_curve_deterministic():
    a = learning_curve("cc", [5, 10], n_test_per_class=10, repeats=2, seed=4)
    b = learning_curve("cc", [5, 10], n_test_per_class=10, repeats=2, seed=4)
    assert a == b
    assert len(a) == 2 * 2 * 2


def test_learning_curve_errors():
    with pytest.raises(UnknownGenerator):
        learning_curve("sines", [10])
    with pytest.raises(ValueError):
        learning_curve("cbf", [0])
