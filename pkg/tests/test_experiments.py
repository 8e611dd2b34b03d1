import io
import json

import pytest

from conftest import F3, F5, F7, F9
from ffdist import ConsistencyError, PairSet, PointSet, UsageError
from ffdist.experiments import (
    CSV_FIELDS,
    ExperimentConfig,
    emit,
    generate,
    run_one,
    run_sweep,
    sample_distinct,
    threshold,
)
from ffdist.rng import SplitMix64, derive_seed


def test_threshold_examples():
    assert threshold("thm11", 3, 2) == pytest.approx(3**3.5)
    assert round(threshold("thm11", 3, 2), 2) == 46.77
    assert threshold("thm14", 5, 2) == pytest.approx(5**3.25)
    assert round(threshold("thm14", 5, 2), 1) == 186.9
    assert threshold("lemma21", 3, 2) == 27
    assert threshold("thm12", 3, 2) == pytest.approx(3 ** (10 / 3))
    assert threshold("lemma31", 11, 2) == pytest.approx(11**1.25)
    assert threshold("thm13", 5, 3) == pytest.approx(5**5)
    with pytest.raises(UsageError):
        threshold("thm14", 5, 3)
    with pytest.raises(UsageError):
        threshold("thm99", 5, 2)


def test_splitmix_reference_vector():
    # published SplitMix64 outputs for seed 0
    r = SplitMix64(0)
    assert r.next() == 0xE220A8397B1DCDAF
    assert r.next() == 0x6E789E6AA1B965F4
    assert r.next() == 0x06C45D188009454F


def test_below_is_in_range_and_covers():
    r = SplitMix64(5)
    vals = [r.below(7) for _ in range(2000)]
    assert set(vals) == set(range(7))


def test_sample_distinct_paths():
    for m in (0, 5, 30, 60, 81):
        out = sample_distinct(SplitMix64(1), 81, m)
        assert len(out) == m == len(set(out.tolist()))
        assert all(0 <= x < 81 for x in out)
    with pytest.raises(UsageError):
        sample_distinct(SplitMix64(1), 10, 11)


def _cfg(**kw):
    base = dict(field=F3, d=2, theorem="thm11", sizes=(47,), trials=1, seed=12345)
    base.update(kw)
    return ExperimentConfig(**base)


@pytest.mark.parametrize("gen", ["uniform-random", "product", "sphere-union", "subspace"])
@pytest.mark.parametrize("size", [0, 1, 9, 36, 47, 81])
def test_generators_exact_size_pairs(gen, size):
    cfg = _cfg(generator=gen)
    if gen == "product" and size == 47:
        with pytest.raises(UsageError):  # 47 is prime and > 9
            generate(cfg, size, 0)
        return
    E = generate(cfg, size, 0)
    assert isinstance(E, PairSet) and len(E) == size
    assert generate(cfg, size, 0) == E


@pytest.mark.parametrize("gen", ["uniform-random", "sphere-union", "subspace"])
@pytest.mark.parametrize("size", [0, 1, 12, 30, 49])
def test_generators_exact_size_sets(gen, size):
    cfg = ExperimentConfig(F7, 2, "lemma21", gen, (size,), 1, 3)
    X = generate(cfg, size, 2)
    assert isinstance(X, PointSet) and len(X) == size
    assert generate(cfg, size, 2) == X
    if gen == "uniform-random" and size in (12, 30):
        assert generate(cfg, size, 2, stream=1) != X


def test_product_full_space():
    E = generate(_cfg(generator="product"), 81, 0)
    assert len(E) == 81 and E == PairSet(E.space, range(81))


def test_subspace_generator_stays_in_subspace():
    cfg = ExperimentConfig(F5, 2, "lemma21", "subspace", (4,), 1, 0)
    X = generate(cfg, 4, 0)
    assert all(x[0] == 0 for x in X)


def test_product_generator_rejected_for_sets():
    with pytest.raises(UsageError):
        ExperimentConfig(F7, 2, "lemma21", "product", (4,), 1, 0)


def test_different_trials_differ():
    cfg = _cfg()
    assert generate(cfg, 47, 0) != generate(cfg, 47, 1)
    assert derive_seed(1, 2, 3) != derive_seed(1, 3, 2)


def test_config_validation():
    with pytest.raises(UsageError):
        _cfg(sizes=(82,))
    with pytest.raises(UsageError):
        _cfg(trials=0)
    with pytest.raises(UsageError):
        _cfg(theorem="thm12", d=3)
    with pytest.raises(UsageError):
        _cfg(theorem="thm14", field=F9)
    with pytest.raises(UsageError):
        _cfg(theorem="thm11", s=3)
    _cfg(theorem="thm13", s=3, a=(1, 2))


def test_thm11_full_space():
    for F in (F3, F5):
        cfg = _cfg(field=F, sizes=(F.q**4,), generator="product")
        row = run_one(cfg, F.q**4, 0)
        assert row.delta == F.q**2 and row.threshold_met is True


def test_thm11_small_set_can_fail():
    row = run_one(_cfg(sizes=(2,)), 2, 0)
    assert row.delta <= 4 and row.threshold_met is False
    assert row.above_threshold is False


def test_lemma21_row():
    cfg = ExperimentConfig(F7, 2, "lemma21", sizes=(19,), trials=3, seed=0)
    rows = run_sweep(cfg)
    assert [r.trial for r in rows] == [0, 1, 2]
    for r in rows:
        assert r.n_x == r.n_y == 19
        assert r.above_threshold  # 19 * 19 >= 343
        assert r.ratio == pytest.approx(r.delta / 7, rel=1e-5)
        assert r.threshold_met is None
        assert r.delta * r.Q >= 19**4 and r.Q <= 19 * r.T <= 19 * r.Tprime


def test_emit_csv_contract():
    assert emit([], "csv") == ",".join(CSV_FIELDS) + "\n"
    row = run_one(_cfg(), 47, 0)
    text = emit([row], "csv")
    assert len(text.splitlines()) == 2
    assert "elapsed_ms" not in text
    assert "elapsed_ms" in emit([row], "csv", timing=True)


def test_emit_plot_data_lines():
    cfg = ExperimentConfig(F3, 2, "thm11", sizes=(50, 60, 70), trials=10, seed=2)
    rows = run_sweep(cfg)
    lines = emit(rows, "plot-data").splitlines()
    assert len(lines) == 3
    assert [int(ln.split()[0]) for ln in lines] == [50, 60, 70]
    assert all(len(ln.split()) == 3 for ln in lines)


def test_emit_json_lines():
    rows = run_sweep(ExperimentConfig(F5, 2, "lemma31", sizes=(8,), trials=2, seed=1))
    recs = [json.loads(ln) for ln in emit(rows, "json-lines").splitlines()]
    assert len(recs) == 2 and recs[0]["theorem"] == "lemma31"
    assert recs[0]["pham_ratio"] is not None


def test_emit_reasserts_chain():
    row = run_one(ExperimentConfig(F5, 2, "lemma21", sizes=(6,), seed=1), 6, 0)
    row.Q = 1  # corrupt
    with pytest.raises(ConsistencyError):
        emit([row], "csv")


def test_emit_errors(tmp_path):
    with pytest.raises(UsageError):
        emit([], "xml")
    with pytest.raises(UsageError, match="nope"):
        emit([], "csv", out=str(tmp_path / "nope" / "x.csv"))
    buf = io.StringIO()
    emit([], "csv", out=buf)
    assert buf.getvalue().startswith("theorem,")


def test_sweep_deterministic_and_schedule_independent():
    cfg = ExperimentConfig(F5, 2, "thm13", "uniform-random", (100, 300), 4, 99, 3, (1, 2))
    a = emit(run_sweep(cfg), "csv")
    b = emit(run_sweep(cfg), "csv")
    c = emit(run_sweep(cfg, workers=2), "csv")
    assert a == b == c
