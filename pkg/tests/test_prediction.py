"""Features, auto-labeling, dataset assembly, training and evaluation."""

import numpy as np
import pytest

from gripsim.physics import ContactClass
from gripsim.prediction import (
    CLASS_ORDER,
    FEATURE_DIM,
    PER_TICK_DIM,
    Classifier,
    LabeledSample,
    SeriesRecord,
    TrainConfig,
    auto_label,
    build_dataset,
    collapse_frame,
    evaluate,
    extract_features,
    load_dataset,
    load_records,
    save_dataset,
    save_records,
    series_features,
    split_records,
    train,
    _onset_leads,
)
from gripsim.sensor import SensorFrame

SLIP, CONTACT, NO_CONTACT = (
    ContactClass.SLIP,
    ContactClass.CONTACT,
    ContactClass.NO_CONTACT,
)


def frame(tick, p_dc=0.0, p_ac_val=0.0):
    return SensorFrame(
        tick=tick,
        p_dc=p_dc,
        p_ac=[p_ac_val] * 22,
        electrodes=[0.0] * 19,
        t_dc=0.0,
        t_ac=0.0,
    )


def test_feature_dimensions():
    assert PER_TICK_DIM == 24
    assert FEATURE_DIM == 48
    feats = extract_features(frame(0), frame(1))
    assert len(feats) == 48


def test_collapse_frame_summary():
    f = frame(0, p_dc=7.0)
    f.p_ac = [1.0] * 21 + [5.0]
    x = collapse_frame(f)
    assert x[0] == 7.0
    assert x[1] == pytest.approx((21 * 1.0 + 5.0) / 22)  # batch mean
    assert x[2] == pytest.approx(4.0)  # peak-to-peak


def test_constant_stream_zero_delta():
    feats = extract_features(frame(0, p_dc=9.0), frame(1, p_dc=9.0))
    assert feats[PER_TICK_DIM:] == pytest.approx([0.0] * PER_TICK_DIM)


def test_hand_built_delta():
    a, b = frame(0), frame(1)
    a.p_dc, a.p_ac, a.electrodes, a.t_dc, a.t_ac = 1.0, [1.0] * 22, [1.0] * 19, 1.0, 1.0
    b.p_dc, b.p_ac, b.electrodes, b.t_dc, b.t_ac = 3.0, [3.0] * 22, [3.0] * 19, 3.0, 3.0
    feats = extract_features(a, b)
    deltas = feats[PER_TICK_DIM:]
    assert deltas[0] == 2.0 and deltas[3] == 2.0 and deltas[-1] == 2.0
    assert deltas[2] == 0.0  # constant batch: ptp delta is zero


def test_nonconsecutive_frames_rejected():
    with pytest.raises(ValueError):
        extract_features(frame(0), frame(2))


def test_auto_label_all_zero_pressure():
    labels = auto_label([0.0] * 50, [(0.0, 0.0)] * 50, 0.01)
    assert labels == [NO_CONTACT] * 50


def test_auto_label_pressed_and_still():
    labels = auto_label([20.0] * 50, [(0.0, 0.0)] * 50, 0.01)
    assert labels == [CONTACT] * 50


def test_auto_label_crafted_trace():
    # Contact from tick 100; sliding at 3x the movement threshold during
    # ticks 200-300. Oracle: independent one-pass thresholding below.
    dt, t_move = 0.01, 0.01
    n = 400
    p_dc = [0.0] * 100 + [50.0] * (n - 100)
    pos = []
    x = 0.0
    for t in range(n):
        if 200 <= t <= 300:
            x += 3.0 * t_move * dt
        pos.append((x, 0.0))
    labels = auto_label(p_dc, pos, dt)

    expected = []
    for t in range(n):
        prev = pos[t - 1] if t else pos[1] if n > 1 else pos[0]
        speed = abs(pos[t][0] - prev[0]) / dt
        if p_dc[t] <= 10.0:
            expected.append(NO_CONTACT)
        elif speed > t_move:
            expected.append(SLIP)
        else:
            expected.append(CONTACT)
    assert labels == expected
    assert labels[:100] == [NO_CONTACT] * 100
    assert labels[100:200] == [CONTACT] * 100
    assert labels[200:301] == [SLIP] * 101
    assert labels[301:] == [CONTACT] * (n - 301)


def test_auto_label_partition():
    rng = np.random.default_rng(0)
    p_dc = list(rng.uniform(-5, 60, size=300))
    pos = [(float(v), 0.0) for v in np.cumsum(rng.uniform(0, 3e-4, size=300))]
    labels = auto_label(p_dc, pos, 0.01)
    assert len(labels) == 300
    for p, lbl in zip(p_dc, labels):
        assert isinstance(lbl, ContactClass)
        assert (lbl is NO_CONTACT) == (p <= 10.0)


def test_auto_label_length_mismatch():
    with pytest.raises(ValueError):
        auto_label([0.0, 0.0], [(0.0, 0.0)], 0.01)


def make_record(n, trial="t0", finger=0, seed=0):
    rng = np.random.default_rng(seed)
    x = [list(rng.uniform(-1, 1, size=PER_TICK_DIM)) for _ in range(n)]
    labels = [CLASS_ORDER[int(v)] for v in rng.integers(0, 3, size=n)]
    return SeriesRecord(trial_id=trial, finger_id=finger, x=x, labels=labels)


def test_build_dataset_boundary_single_sample():
    horizon = 10
    samples = build_dataset([make_record(horizon + 2)], horizon)
    assert len(samples) == 1
    assert samples[0].tick == 1


def test_build_dataset_counts_and_alignment():
    horizon = 10
    recs = [make_record(1000, finger=i, seed=i) for i in range(3)]
    samples = build_dataset(recs, horizon)
    assert len(samples) == 3 * (1000 - horizon - 1)
    for s in samples[:50]:
        rec = recs[s.finger_id]
        assert s.label is rec.labels[s.tick + horizon]
        assert s.features == series_features(rec.x, s.tick)


def test_build_dataset_skips_short_records():
    warnings = []
    samples = build_dataset([make_record(5)], 10, warnings)
    assert samples == []
    assert len(warnings) == 1


def toy_dataset(n_per=60, spread=0.05, seed=0):
    """Three well-separated clusters on the vibration channels."""
    rng = np.random.default_rng(seed)
    samples = []
    for k, cls in enumerate(CLASS_ORDER):
        center = np.zeros(FEATURE_DIM)
        center[1] = 3.0 * k
        center[2] = -2.0 * k
        for i in range(n_per):
            feats = center + spread * rng.standard_normal(FEATURE_DIM)
            samples.append(
                LabeledSample(
                    features=list(feats), label=cls, trial_id=f"toy-{k}", finger_id=0, tick=i
                )
            )
    return samples


@pytest.mark.parametrize("kind", ["multinomial-linear", "k-nearest-neighbor"])
def test_separable_toy_training_is_exact(kind):
    samples = toy_dataset()
    model = train(samples, TrainConfig(kind=kind))
    hits = sum(model.predict(s.features) is s.label for s in samples)
    assert hits == len(samples)


def test_duplication_invariance():
    samples = toy_dataset()
    a = train(samples, TrainConfig())
    b = train(samples + samples, TrainConfig())
    assert np.max(np.abs(a.weights - b.weights)) < 1e-9


def test_training_determinism():
    samples = toy_dataset()
    for kind in ("multinomial-linear", "k-nearest-neighbor"):
        a = train(samples, TrainConfig(kind=kind, seed=3))
        b = train(samples, TrainConfig(kind=kind, seed=3))
        assert a.to_json() == b.to_json()


def test_train_rejects_degenerate_input():
    with pytest.raises(ValueError):
        train([], TrainConfig())
    missing = [s for s in toy_dataset() if s.label is not SLIP]
    with pytest.raises(ValueError):
        train(missing, TrainConfig())
    with pytest.raises(ValueError):
        train(toy_dataset(), TrainConfig(kind="decision-forest"))


def test_exact_tie_breaks_to_slip():
    model = Classifier(
        kind="multinomial-linear",
        feat_mean=np.zeros(FEATURE_DIM),
        feat_std=np.ones(FEATURE_DIM),
        weights=np.zeros((3, FEATURE_DIM + 1)),
    )
    assert model.predict([0.0] * FEATURE_DIM) is SLIP


def test_weight_scaling_preserves_argmax():
    samples = toy_dataset()
    model = train(samples, TrainConfig())
    scaled = Classifier(
        kind=model.kind,
        feat_mean=model.feat_mean,
        feat_std=model.feat_std,
        weights=2.0 * model.weights,
        feat_lo=model.feat_lo,
        feat_hi=model.feat_hi,
    )
    for s in samples[::7]:
        assert model.predict(s.features) is scaled.predict(s.features)


def test_feature_dim_checked_at_predict():
    model = train(toy_dataset(), TrainConfig())
    with pytest.raises(ValueError):
        model.predict([0.0] * 10)


def test_standardization_round_trip():
    model = train(toy_dataset(), TrainConfig())
    rng = np.random.default_rng(1)
    x = rng.uniform(-0.5, 0.5, size=FEATURE_DIM)
    z = (x - model.feat_mean) / model.feat_std
    back = z * model.feat_std + model.feat_mean
    assert np.max(np.abs(back - x)) < 1e-12


@pytest.mark.parametrize("kind", ["multinomial-linear", "k-nearest-neighbor"])
def test_model_save_load_round_trip(tmp_path, kind):
    samples = toy_dataset()
    model = train(samples, TrainConfig(kind=kind))
    path = tmp_path / "model.json"
    model.save(path)
    loaded = Classifier.load(path)
    assert loaded.to_json() == model.to_json()
    for s in samples[::11]:
        assert loaded.predict(s.features) is model.predict(s.features)


def test_model_format_guard(tmp_path):
    with pytest.raises(ValueError):
        Classifier.from_json({"format_version": 99})


class OracleStub:
    """Perfect predictor: reads the tick from the feature vector and returns
    the record's label at tick + horizon (clamped)."""

    def __init__(self, labels, horizon):
        self.labels = labels
        self.horizon = horizon

    def predict(self, features):
        t = int(round(features[0]))
        return self.labels[min(t + self.horizon, len(self.labels) - 1)]


def slip_episode_record(n=200, onset=100, end=140):
    x = [[float(t)] + [0.0] * (PER_TICK_DIM - 1) for t in range(n)]
    labels = [CONTACT] * n
    for t in range(onset, end):
        labels[t] = SLIP
    labels[:10] = [NO_CONTACT] * 10
    return SeriesRecord(trial_id="ep", finger_id=0, x=x, labels=labels)


def test_evaluate_oracle_is_perfect():
    horizon = 10
    rec = slip_episode_record()
    report = evaluate(OracleStub(rec.labels, horizon), [rec], horizon)
    assert report.balanced_accuracy == pytest.approx(1.0)
    assert len(report.onset_leads) == 1
    assert all(lead >= horizon for lead in report.onset_leads)


def test_evaluate_constant_contact_on_balanced_data():
    class AlwaysContact:
        def predict(self, features):
            return CONTACT

    horizon = 10
    n = 310
    x = [[0.0] * PER_TICK_DIM for _ in range(n)]
    labels = [NO_CONTACT] * 100 + [CONTACT] * 100 + [SLIP] * 110
    rec = SeriesRecord(trial_id="bal", finger_id=0, x=x, labels=labels)
    report = evaluate(AlwaysContact(), [rec], horizon)
    assert report.balanced_accuracy == pytest.approx(1.0 / 3.0)


def test_onset_leads_walk_back():
    p, c, s = NO_CONTACT, CONTACT, SLIP
    labels = [c, c, c, c, s, s, c, c, s]
    preds = [c, s, s, s, s, c, c, s, c]
    # Onsets at 4 and 8; sustained slip predictions start at 1 and 7.
    assert _onset_leads(preds, labels) == [3, 1]
    assert _onset_leads([c] * 9, labels) == [0, 0]
    assert p not in labels  # silence the unused warning


def test_records_round_trip(tmp_path):
    recs = [make_record(40, trial=f"t{i}", seed=i) for i in range(3)]
    path = tmp_path / "records.ndjson"
    save_records(recs, path)
    loaded = load_records(path)
    assert [r.trial_id for r in loaded] == [r.trial_id for r in recs]
    assert loaded[1].labels == recs[1].labels
    assert np.allclose(loaded[2].x, recs[2].x)


def test_dataset_round_trip(tmp_path):
    samples = build_dataset([make_record(40)], 10)
    path = tmp_path / "dataset.ndjson"
    save_dataset(samples, path)
    loaded = load_dataset(path)
    assert len(loaded) == len(samples)
    assert loaded[0].features == samples[0].features
    assert loaded[0].label is samples[0].label


def test_split_records_whole_trial_and_deterministic():
    recs = [
        make_record(30, trial=f"trial-{i}", finger=f, seed=i * 3 + f)
        for i in range(10)
        for f in range(3)
    ]
    a_train, a_hold = split_records(recs, seed=4)
    b_train, b_hold = split_records(recs, seed=4)
    assert [r.trial_id for r in a_hold] == [r.trial_id for r in b_hold]
    held_ids = {r.trial_id for r in a_hold}
    train_ids = {r.trial_id for r in a_train}
    assert held_ids.isdisjoint(train_ids)
    assert len(held_ids) == 2  # 20% of 10 trials
    # Whole trials move together: every held trial keeps its 3 fingers.
    for tid in held_ids:
        assert sum(1 for r in a_hold if r.trial_id == tid) == 3
