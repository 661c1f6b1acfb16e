"""End-to-end CLI checks through CliRunner: exit codes, files written, and
agreement with the library calls each subcommand wraps."""

import json
import warnings
from pathlib import Path

import pytest
from click.testing import CliRunner

import datagen
from conftest import LEXICON_LINES, NOUN_LINES, OVERLAP_POINT, RIDER_ANNOTATION
from openscene.cli import main
from openscene.metrics import aggregate, evaluate_dataset, format_report, report_to_json
from openscene.pipeline import build_scene, load_bundle, save_bundle
from openscene.roi import resolve_point, resolve_region, resolve_result_to_json
from openscene.segmenter import BoxFillBackend
from openscene.swig_data import serialize_annotations, serialize_predictions
from openscene.geometry import BoundingBox

ENV_KEYS = ("OSU_CONFIG", "OSU_SEGMENTER_BACKEND", "OSU_SEGMENTER_ENDPOINT",
            "OSU_SEGMENTER_TIMEOUT", "OSU_SEGMENTER_EXCHANGE_DIR",
            "OSU_SERVICE_HOST", "OSU_SERVICE_PORT", "OSU_SERVICE_BUNDLES")


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    # The CLI reads os.environ through load_config; keep host settings out.
    for key in ENV_KEYS:
        monkeypatch.delenv(key, raising=False)


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def eval_files(tmp_path):
    pairs = datagen.random_dataset(11, 30)
    ann_path = tmp_path / "annotations.json"
    pred_path = tmp_path / "predictions.json"
    ann_path.write_text(json.dumps(serialize_annotations([a for a, _ in pairs])))
    pred_path.write_text(json.dumps(serialize_predictions([p for _, p in pairs])))
    return ann_path, pred_path, pairs


@pytest.fixture()
def lexicon_files(tmp_path):
    lex = tmp_path / "lexicon.tsv"
    nouns = tmp_path / "nouns.tsv"
    lex.write_text("\n".join(LEXICON_LINES) + "\n")
    nouns.write_text("\n".join(NOUN_LINES) + "\n")
    return lex, nouns


@pytest.fixture()
def rider_files(tmp_path, lexicon_files):
    ann_path = tmp_path / "rider.json"
    ann_path.write_text(json.dumps(RIDER_ANNOTATION))
    return ann_path, lexicon_files


def test_evaluate_matches_library(runner, eval_files, tmp_path):
    ann_path, pred_path, pairs = eval_files
    out = tmp_path / "out"
    result = runner.invoke(main, ["evaluate", str(ann_path), str(pred_path),
                                  "--out-dir", str(out)])
    assert result.exit_code == 0, result.output

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report, _ = evaluate_dataset([a for a, _ in pairs], [p for _, p in pairs])
    assert result.stdout == format_report(report)
    assert (out / "report.txt").read_text() == format_report(report)
    assert json.loads((out / "report.json").read_text()) == report_to_json(report)


def test_evaluate_is_repeatable(runner, eval_files, tmp_path):
    ann_path, pred_path, _ = eval_files
    args = ["evaluate", str(ann_path), str(pred_path), "--out-dir", str(tmp_path / "o")]
    first = runner.invoke(main, args)
    second = runner.invoke(main, args)
    assert first.stdout == second.stdout


def test_evaluate_empty_predictions(runner, eval_files, tmp_path):
    ann_path, _, _ = eval_files
    empty = tmp_path / "empty.json"
    empty.write_text("[]")
    result = runner.invoke(main, ["evaluate", str(ann_path), str(empty),
                                  "--out-dir", str(tmp_path / "o")])
    assert result.exit_code == 0
    assert "prediction file is empty" in result.stderr
    assert result.stdout == format_report(aggregate([]))
    assert result.stdout.count("—") == 15


def test_evaluate_malformed_predictions(runner, eval_files, tmp_path):
    ann_path, _, _ = eval_files
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([{"image_id": "x.jpg", "verbs": [
        {"verb": "a", "score": 0.1}, {"verb": "b", "score": 0.9}]}]))
    result = runner.invoke(main, ["evaluate", str(ann_path), str(bad),
                                  "--out-dir", str(tmp_path / "o")])
    assert result.exit_code == 2
    assert result.stderr.startswith("error:")
    assert "x.jpg" in result.stderr


def test_evaluate_strict_id_mismatch(runner, eval_files, tmp_path):
    ann_path, pred_path, pairs = eval_files
    preds = [p for _, p in pairs][:-2]
    short = tmp_path / "short.json"
    short.write_text(json.dumps(serialize_predictions(preds)))
    base = ["evaluate", str(ann_path), str(short), "--out-dir", str(tmp_path / "o")]
    assert runner.invoke(main, base).exit_code == 0
    result = runner.invoke(main, base + ["--strict"])
    assert result.exit_code == 3
    assert result.stderr.count("missing prediction:") == 2


def test_evaluate_unknown_setting(runner, eval_files, tmp_path):
    ann_path, pred_path, _ = eval_files
    result = runner.invoke(main, ["evaluate", str(ann_path), str(pred_path),
                                  "--setting", "top3"])
    assert result.exit_code == 2
    assert "unknown setting" in result.stderr


def test_caption_command(runner, lexicon_files):
    lex, nouns = lexicon_files
    result = runner.invoke(main, [
        "caption", "--lexicon", str(lex), "--nouns", str(nouns),
        "riding", "Agent=n10287213", "Vehicle=n03790512", "Place=n04096066",
    ])
    assert result.exit_code == 0
    assert result.stdout == "A man rides the motorcycle at a road\n"


def test_caption_bad_assignment(runner, lexicon_files):
    lex, nouns = lexicon_files
    result = runner.invoke(main, ["caption", "--lexicon", str(lex),
                                  "--nouns", str(nouns), "riding", "Agent"])
    assert result.exit_code == 2
    assert "Role=noun" in result.stderr


def test_caption_unknown_verb(runner, lexicon_files):
    lex, nouns = lexicon_files
    result = runner.invoke(main, ["caption", "--lexicon", str(lex),
                                  "--nouns", str(nouns), "swimming"])
    assert result.exit_code == 2


def test_build_writes_bundle_and_warns_when_unconfigured(runner, rider_files,
                                                         tmp_path):
    ann_path, (lex, nouns) = rider_files
    out = tmp_path / "bundles"
    result = runner.invoke(main, [
        "build", "--lexicon", str(lex), "--nouns", str(nouns),
        "--annotations", str(ann_path), "--out-dir", str(out),
    ])
    assert result.exit_code == 0, result.output
    assert "no segmenter configured" in result.stderr
    assert f"wrote 1 bundle(s) to {out}" in result.stdout
    bundle = load_bundle(out / "riding_1.json")
    # Silent box-fill default is flagged so consumers can tell real masks apart.
    assert bundle.provenance.degraded
    assert bundle.caption == "A man rides the motorcycle at a road"
    assert len(bundle.masks) == 3


def test_build_explicit_backend_is_not_degraded(runner, rider_files, tmp_path):
    ann_path, (lex, nouns) = rider_files
    out = tmp_path / "bundles"
    result = runner.invoke(main, [
        "build", "--lexicon", str(lex), "--nouns", str(nouns),
        "--annotations", str(ann_path), "--out-dir", str(out),
        "--backend", "box-fill",
    ])
    assert result.exit_code == 0
    assert "no segmenter configured" not in result.stderr
    assert not load_bundle(out / "riding_1.json").provenance.degraded


def test_build_require_backend_exits_4(runner, rider_files, tmp_path):
    ann_path, (lex, nouns) = rider_files
    result = runner.invoke(main, [
        "build", "--lexicon", str(lex), "--nouns", str(nouns),
        "--annotations", str(ann_path), "--out-dir", str(tmp_path / "b"),
        "--backend", "http", "--endpoint", "http://127.0.0.1:9",
        "--timeout", "0.2", "--require-backend",
    ])
    assert result.exit_code == 4
    assert "segmenter unavailable" in result.stderr


def test_build_dead_backend_without_require_degrades(runner, rider_files, tmp_path):
    ann_path, (lex, nouns) = rider_files
    out = tmp_path / "b"
    result = runner.invoke(main, [
        "build", "--lexicon", str(lex), "--nouns", str(nouns),
        "--annotations", str(ann_path), "--out-dir", str(out),
        "--backend", "http", "--endpoint", "http://127.0.0.1:9",
        "--timeout", "0.2",
    ])
    assert result.exit_code == 0
    assert "filling boxes instead" in result.stderr
    assert load_bundle(out / "riding_1.json").provenance.degraded


def test_build_unknown_image_id(runner, rider_files, tmp_path):
    ann_path, (lex, nouns) = rider_files
    result = runner.invoke(main, [
        "build", "--lexicon", str(lex), "--nouns", str(nouns),
        "--annotations", str(ann_path), "--out-dir", str(tmp_path / "b"),
        "--image-id", "nope.jpg",
    ])
    assert result.exit_code == 2
    assert "image ids not in annotations: nope.jpg" in result.stderr


@pytest.fixture()
def bundle_file(tmp_path, rider_bundle):
    path = tmp_path / "riding_1.json"
    save_bundle(rider_bundle, path)
    return path


def test_query_point_bbox_mode(runner, bundle_file, rider_bundle):
    x, y = OVERLAP_POINT
    result = runner.invoke(main, ["query", "--bundle", str(bundle_file),
                                  "--x", str(x), "--y", str(y), "--mode", "bbox"])
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[0] == "candidates: 2"
    assert lines[1] == "  man, the agent"
    assert lines[2] == "  motorcycle, the vehicle"
    assert lines[3] == "spoken: man, the agent; motorcycle, the vehicle"


def test_query_point_mask_mode_default(runner, bundle_file):
    x, y = OVERLAP_POINT
    result = runner.invoke(main, ["query", "--bundle", str(bundle_file),
                                  "--x", str(x), "--y", str(y)])
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[0] == "candidates: 1"
    assert lines[1] == "  man, the agent  (confidence 1.00)"


def test_query_json_matches_library(runner, bundle_file, rider_bundle):
    x, y = OVERLAP_POINT
    result = runner.invoke(main, ["query", "--bundle", str(bundle_file),
                                  "--x", str(x), "--y", str(y), "--json"])
    assert result.exit_code == 0
    expected = resolve_result_to_json(resolve_point(rider_bundle, x, y, mode="mask"))
    assert json.loads(result.stdout) == expected


def test_query_center_flag(runner, bundle_file, rider_bundle):
    result = runner.invoke(main, ["query", "--bundle", str(bundle_file),
                                  "--center", "--json"])
    expected = resolve_result_to_json(resolve_point(rider_bundle, 320.0, 240.0,
                                                    mode="mask"))
    assert json.loads(result.stdout) == expected


def test_query_region(runner, bundle_file, rider_bundle):
    result = runner.invoke(main, ["query", "--bundle", str(bundle_file),
                                  "--region", "150,220,520,460"])
    assert result.exit_code == 0
    hits = resolve_region(rider_bundle, BoundingBox(150, 220, 520, 460))
    lines = result.stdout.splitlines()
    assert len(lines) == len(hits) > 0
    assert hits[0].noun in lines[0]


def test_query_region_errors(runner, bundle_file):
    result = runner.invoke(main, ["query", "--bundle", str(bundle_file),
                                  "--region", "1,2,3"])
    assert result.exit_code == 2
    assert "region needs 4 numbers" in result.stderr
    result = runner.invoke(main, ["query", "--bundle", str(bundle_file),
                                  "--region", "a,b,c,d"])
    assert result.exit_code == 2
    assert "region looks like" in result.stderr


def test_query_half_point_is_input_error(runner, bundle_file):
    result = runner.invoke(main, ["query", "--bundle", str(bundle_file),
                                  "--x", "10"])
    assert result.exit_code == 2
    assert "need both --x and --y" in result.stderr


def test_query_out_of_range(runner, bundle_file):
    result = runner.invoke(main, ["query", "--bundle", str(bundle_file),
                                  "--x", "10000", "--y", "10"])
    assert result.exit_code == 2


def test_bench_command(runner, tmp_path):
    out = tmp_path / "bench.json"
    result = runner.invoke(main, ["bench", "--width", "64", "--height", "48",
                                  "--entities", "2", "--repeats", "1",
                                  "--queries", "3", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert result.stdout.startswith("pipeline bench: 64x48")
    assert "total" in result.stdout
    data = json.loads(out.read_text())
    assert len(data["stages"]) == 5


def test_bench_rejects_entity_count(runner):
    result = runner.invoke(main, ["bench", "--entities", "9"])
    assert result.exit_code == 2


def test_bench_activation_command(runner, tmp_path):
    out = tmp_path / "lab.json"
    result = runner.invoke(main, ["bench-activation", "--seed", "3",
                                  "--epochs", "5", "--hidden", "8",
                                  "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "relu" in result.stdout and "gelu" in result.stdout
    data = json.loads(out.read_text())
    assert data["seed"] == 3


def test_bench_activation_bad_flags(runner):
    assert runner.invoke(main, ["bench-activation", "--hidden", "x"]).exit_code == 2
    assert runner.invoke(main, ["bench-activation", "--epochs", "0"]).exit_code == 2


def test_serve_rejects_missing_bundle_dir(runner, tmp_path):
    result = runner.invoke(main, ["serve", "--bundles", str(tmp_path / "nope")])
    assert result.exit_code == 2
    assert "bundle directory not readable" in result.stderr


def test_help_exits_clean(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for sub in ("evaluate", "caption", "build", "query", "bench", "serve"):
        assert sub in result.stdout
