import json
import math
import os
from pathlib import Path

import pytest

import roofsim

SMALL = {
    "generation": {"n_policies": 400},
    "split": {"n_train": 200, "n_test": 200},
    "forest": {"n_trees": 20},
    "calibration_batch": 20000,
}


def labeled(seed=0, config=None):
    records = roofsim.generate_policies(seed=seed, config=config)
    records, cuts = roofsim.assign_roof_health(records)
    return records, cuts


def test_generate_and_assign():
    records, cuts = labeled()
    assert len(records) == 2000
    assert records[0].policy_id == "POL-000001"
    counts = [sum(r.roof_health == rh for r in records) for rh in (roofsim.RoofHealth.Good, roofsim.RoofHealth.Fair, roofsim.RoofHealth.Bad)]
    assert all(abs(c - e) <= 2 for c, e in zip(counts, (1100, 500, 400)))
    assert cuts.fair_cut < cuts.bad_cut
    assert roofsim.PRNG_ID.startswith("xoshiro256")


def test_generation_is_reproducible():
    a = roofsim.generate_policies(seed=5, config=SMALL)
    b = roofsim.generate_policies(seed=5, config=SMALL, threads=1)
    assert len(a) == 400
    assert [r.house_value for r in a] == [r.house_value for r in b]


def test_losses_and_oracle():
    records, _ = labeled()
    outcomes = roofsim.simulate_losses(records, seed=1)
    assert len(outcomes) == len(records)
    for o in outcomes:
        assert (o.claim_count == 0) == (o.total_loss == 0.0)
        assert math.isclose(sum(o.claim_losses), o.total_loss, rel_tol=0, abs_tol=1e-9 * max(1.0, o.total_loss))
    base = roofsim.PolicyRecord()
    base.policy_id = "POL-000001"
    base.house_value = 250000.0
    base.wall_type = roofsim.WallType.Brick
    base.credit_score = 700
    base.roof_health = roofsim.RoofHealth.Good
    bad = roofsim.PolicyRecord()
    for field in ("policy_id", "house_value", "wall_type", "credit_score"):
        setattr(bad, field, getattr(base, field))
    bad.roof_health = roofsim.RoofHealth.Bad
    good_pred, bad_pred = roofsim.oracle_predict([base, bad])
    assert good_pred == pytest.approx(math.exp(-3.0) * math.exp(7.0))
    assert bad_pred / good_pred == pytest.approx(math.exp(4.4))


def test_metrics():
    assert roofsim.raw_gini([10, 0, 5], [3, 1, 2]) == pytest.approx(2 / 9)
    g = roofsim.normalized_gini([10, 0, 5], [3, 2, 1])
    assert g.normalized == pytest.approx(0.5)
    assert g.tie_policy == "index"
    assert roofsim.ordinal_correlation([0, 0, 1, 2], [0, 1, 1, 2]) == pytest.approx(2 / math.sqrt(5.5))
    with pytest.raises(roofsim.UndefinedMetricError):
        roofsim.normalized_gini([0, 0, 0], [1, 2, 3])
    with pytest.raises(roofsim.RoofsimError):
        roofsim.raw_gini([1, 2], [1])


def test_calibration():
    res = roofsim.calibrate_labeler(0.8062, batch_size=50000)
    assert abs(res.achieved_correlation - 0.8062) <= 0.005
    assert 1 / 3 < res.accuracy < 1
    with pytest.raises(roofsim.ParameterError):
        roofsim.calibrate_labeler(1.5)


def test_config_helpers():
    cfg = roofsim.default_config()
    assert cfg["generation"]["n_policies"] == 2000
    assert roofsim.config_fingerprint(cfg) == roofsim.config_fingerprint()
    assert roofsim.config_fingerprint(SMALL) != roofsim.config_fingerprint()
    with pytest.raises(roofsim.ConfigError):
        roofsim.config_fingerprint({"generation": {"n_policy": 1}})
    source = os.environ.get("ROOFSIM_SOURCE_DIR")
    if source:
        shipped = json.loads((Path(source) / "configs" / "default.json").read_text())
        assert roofsim.config_fingerprint(shipped) == roofsim.config_fingerprint()


def test_run_and_score(tmp_path):
    report = roofsim.run_experiment(SMALL, seeds=[0], output_dir=str(tmp_path))
    seed = report["seeds"][0]
    names = [t["name"] for t in seed["tiers"]]
    assert names == ["tabular_only", "cluster_labels", "embedding_features", "noisy_label", "true_label", "oracle"]
    seed_dir = Path(report["directory"]) / "seed-0"
    scored = roofsim.score_submission(seed_dir / "predictions" / "oracle.csv", seed_dir / "answers.csv")
    oracle = next(t for t in seed["tiers"] if t["name"] == "oracle")
    assert scored["normalized_gini"] == pytest.approx(oracle["normalized_gini"], abs=1e-6)
    again = roofsim.run_experiment(SMALL, seeds=[0], write_files=False)
    assert json.dumps(again["seeds"]) == json.dumps(report["seeds"])
