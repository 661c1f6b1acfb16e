"""Command-line front end.

Subcommands delegate to the library with no logic of their own beyond flag
parsing and exit-code mapping:

    0  success
    2  input error (unparseable files, bad flags, unknown verbs or scenes)
    3  strict mode: annotation and prediction ids do not line up
    4  backend failure when one was explicitly required
"""

from __future__ import annotations

import json
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import click

from .bench import bench_to_json, format_bench, run_pipeline_bench
from .config import load_config, make_backend
from .errors import BuildError, ToolkitError
from .frames import load_lexicon, render_caption
from .geometry import BoundingBox
from .metrics import (
    DEFAULT_IOU_THRESHOLD,
    SETTINGS_ORDER,
    Setting,
    aggregate,
    evaluate_dataset,
    format_report,
    report_to_json,
)
from .numerics import ConvergenceConfig, format_summary, report_to_json as lab_to_json, run_convergence_lab
from .pipeline import build_scene, load_bundle, mark_degraded, save_bundle
from .roi import (
    resolve_center,
    resolve_point,
    resolve_region,
    resolve_result_to_json,
)
from .swig_data import parse_annotations, parse_predictions

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_STRICT = 3
EXIT_BACKEND = 4

# Everything the library raises for bad input maps to exit 2.
_INPUT_ERRORS = (ToolkitError, ValueError)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _read_lexicon(lexicon_path: str, nouns_path):
    lines = Path(lexicon_path).read_text().splitlines()
    nouns = Path(nouns_path).read_text().splitlines() if nouns_path else None
    return load_lexicon(lines, nouns=nouns)


@click.group()
def main():
    """Scene understanding toolkit: evaluation, captions, bundles, queries."""


_SETTING_BY_NAME = {"top1": Setting.TOP1, "top5": Setting.TOP5, "gt": Setting.GT_VERB}


@main.command()
@click.argument("annotations", type=click.Path(exists=True, dir_okay=False))
@click.argument("predictions", type=click.Path(exists=True, dir_okay=False))
@click.option("--setting", "setting_names", default="all", show_default=True,
              help="all, or a comma list of top1,top5,gt")
@click.option("--iou-threshold", default=DEFAULT_IOU_THRESHOLD, show_default=True,
              type=float)
@click.option("--frame-match", default="any_annotator", show_default=True,
              type=click.Choice(["any_annotator", "single_annotator"]))
@click.option("--out-dir", default=".", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--strict", is_flag=True,
              help="fail (exit 3) when annotation and prediction ids differ")
def evaluate(annotations, predictions, setting_names, iou_threshold, frame_match,
             out_dir, strict):
    """Score predictions against annotations; writes report.txt and report.json."""
    if setting_names == "all":
        settings = SETTINGS_ORDER
    else:
        try:
            settings = tuple(_SETTING_BY_NAME[s.strip()]
                             for s in setting_names.split(","))
        except KeyError as exc:
            _fail(EXIT_INPUT, f"unknown setting {exc.args[0]!r}")
    try:
        anns = parse_annotations(Path(annotations).read_text())
        preds = parse_predictions(Path(predictions).read_text())
    except _INPUT_ERRORS as exc:
        _fail(EXIT_INPUT, str(exc))

    if not preds:
        click.echo("warning: prediction file is empty; metrics are undefined",
                   err=True)
        report = aggregate([])
        match_missing, match_extra = (), ()
    else:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report, match = evaluate_dataset(
                anns, preds, settings=settings,
                iou_threshold=iou_threshold, frame_match=frame_match,
            )
        for w in caught:
            click.echo(f"warning: {w.message}", err=True)
        match_missing, match_extra = match.missing_predictions, match.extra_predictions

    text = format_report(report)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.txt").write_text(text)
    (out / "report.json").write_text(json.dumps(report_to_json(report), indent=2) + "\n")
    click.echo(text, nl=False)

    if strict and (match_missing or match_extra):
        for image_id in match_missing:
            click.echo(f"missing prediction: {image_id}", err=True)
        for image_id in match_extra:
            click.echo(f"extra prediction: {image_id}", err=True)
        sys.exit(EXIT_STRICT)


@main.command()
@click.option("--lexicon", "lexicon_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--nouns", "nouns_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("verb")
@click.argument("assignments", nargs=-1)
def caption(lexicon_path, nouns_path, verb, assignments):
    """Render the template caption for VERB given ROLE=NOUN assignments."""
    try:
        lexicon = _read_lexicon(lexicon_path, nouns_path)
        nouns = {}
        for item in assignments:
            if "=" not in item:
                _fail(EXIT_INPUT, f"assignments look like Role=noun, got {item!r}")
            role, _, noun = item.partition("=")
            nouns[role] = noun
        click.echo(render_caption(lexicon, verb, nouns))
    except _INPUT_ERRORS as exc:
        _fail(EXIT_INPUT, str(exc))


@main.command()
@click.option("--lexicon", "lexicon_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--nouns", "nouns_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--annotations", "annotations_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--image-id", "image_ids", multiple=True,
              help="build only these images (default: all)")
@click.option("--out-dir", default="bundles", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--annotator", default=0, show_default=True, type=int)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--backend", "backend_kind",
              type=click.Choice(["box-fill", "http", "file"]))
@click.option("--endpoint", help="http backend URL")
@click.option("--exchange-dir", help="file backend directory")
@click.option("--timeout", type=float)
@click.option("--require-backend", is_flag=True,
              help="exit 4 instead of writing degraded bundles")
def build(lexicon_path, nouns_path, annotations_path, image_ids, out_dir, annotator,
          config_path, backend_kind, endpoint, exchange_dir, timeout,
          require_backend):
    """Build scene bundles (caption + disjoint masks) from annotations."""
    try:
        cfg = load_config(config_path)
        cfg = replace(
            cfg,
            segmenter_backend=backend_kind or cfg.segmenter_backend,
            segmenter_endpoint=endpoint or cfg.segmenter_endpoint,
            segmenter_exchange_dir=exchange_dir or cfg.segmenter_exchange_dir,
            segmenter_timeout=timeout or cfg.segmenter_timeout,
            segmenter_configured=bool(backend_kind) or cfg.segmenter_configured,
        )
        backend = make_backend(cfg)
        lexicon = _read_lexicon(lexicon_path, nouns_path)
        anns = parse_annotations(Path(annotations_path).read_text())
    except _INPUT_ERRORS as exc:
        _fail(EXIT_INPUT, str(exc))

    if image_ids:
        by_id = {a.image_id: a for a in anns}
        missing = [i for i in image_ids if i not in by_id]
        if missing:
            _fail(EXIT_INPUT, f"image ids not in annotations: {', '.join(missing)}")
        anns = [by_id[i] for i in image_ids]

    if not cfg.segmenter_configured:
        click.echo(
            "warning: no segmenter configured; masks will be plain box fills",
            err=True,
        )

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    failures = []
    wrote = 0
    for ann in anns:
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                bundle = build_scene(ann, lexicon, backend, annotator=annotator)
            for w in caught:
                click.echo(f"warning: {w.message}", err=True)
        except BuildError as exc:
            failures.append(str(exc))
            continue
        if bundle.provenance.degraded and require_backend:
            _fail(EXIT_BACKEND,
                  f"{ann.image_id}: segmenter unavailable and --require-backend set")
        if not cfg.segmenter_configured:
            bundle = mark_degraded(bundle)
        save_bundle(bundle, out / (Path(ann.image_id).stem + ".json"))
        wrote += 1
    click.echo(f"wrote {wrote} bundle(s) to {out}")
    if failures:
        for f in failures:
            click.echo(f"error: {f}", err=True)
        sys.exit(EXIT_INPUT)


@main.command()
@click.option("--bundle", "bundle_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--x", "x", type=float)
@click.option("--y", "y", type=float)
@click.option("--mode", default="mask", show_default=True,
              type=click.Choice(["mask", "bbox"]))
@click.option("--region", help="x1,y1,x2,y2 sweep instead of a point")
@click.option("--center", is_flag=True, help="query the image center")
@click.option("--json", "as_json", is_flag=True)
def query(bundle_path, x, y, mode, region, center, as_json):
    """Resolve a point or region against a stored bundle."""
    try:
        bundle = load_bundle(bundle_path)
        if region is not None:
            try:
                coords = [float(v) for v in region.split(",")]
            except ValueError:
                _fail(EXIT_INPUT, f"region looks like x1,y1,x2,y2, got {region!r}")
            if len(coords) != 4:
                _fail(EXIT_INPUT, f"region needs 4 numbers, got {len(coords)}")
            hits = resolve_region(bundle, BoundingBox(*coords))
            if as_json:
                click.echo(json.dumps(
                    {"hits": [{"role": h.role, "noun": h.noun, "fraction": h.fraction}
                              for h in hits]}, indent=2))
            elif not hits:
                click.echo("background")
            else:
                for h in hits:
                    click.echo(f"{h.fraction:6.1%}  {h.noun}, the {h.role.lower()}")
            return
        if center or (x is None and y is None):
            result = resolve_center(bundle, mode=mode)
        elif x is None or y is None:
            _fail(EXIT_INPUT, "point queries need both --x and --y")
        else:
            result = resolve_point(bundle, x, y, mode=mode)
    except _INPUT_ERRORS as exc:
        _fail(EXIT_INPUT, str(exc))
    if as_json:
        click.echo(json.dumps(resolve_result_to_json(result), indent=2))
        return
    n = len(result.hits)
    click.echo(f"candidates: {n}")
    for h in result.hits:
        conf = "" if h.confidence is None else f"  (confidence {h.confidence:.2f})"
        click.echo(f"  {h.noun}, the {h.role.lower()}{conf}")
    click.echo(f"spoken: {result.spoken_text}")


@main.command()
@click.option("--width", default=1042, show_default=True, type=int)
@click.option("--height", default=1042, show_default=True, type=int)
@click.option("--entities", default=5, show_default=True, type=int)
@click.option("--repeats", default=5, show_default=True, type=int)
@click.option("--queries", default=100, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", type=click.Path(dir_okay=False),
              help="also write the timings as JSON")
def bench(width, height, entities, repeats, queries, seed, out_path):
    """Time each pipeline stage on a synthetic scene."""
    try:
        report = run_pipeline_bench(width=width, height=height, entities=entities,
                                    repeats=repeats, queries=queries, seed=seed)
    except (ValueError, ToolkitError) as exc:
        _fail(EXIT_INPUT, str(exc))
    click.echo(format_bench(report))
    if out_path:
        Path(out_path).write_text(json.dumps(bench_to_json(report), indent=2) + "\n")


@main.command("bench-activation")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--hidden", default="16", show_default=True,
              help="comma list of hidden layer widths")
@click.option("--learning-rate", default=0.05, show_default=True, type=float)
@click.option("--epochs", default=200, show_default=True, type=int)
@click.option("--threshold", default=0.05, show_default=True, type=float)
@click.option("--optimizer", default="adam", show_default=True,
              type=click.Choice(["sgd", "adam"]))
@click.option("--beta1", default=0.9, show_default=True, type=float)
@click.option("--beta2", default=0.999, show_default=True, type=float)
@click.option("--out", "out_path", type=click.Path(dir_okay=False),
              help="write the full loss curves as JSON")
def bench_activation(seed, hidden, learning_rate, epochs, threshold, optimizer,
                     beta1, beta2, out_path):
    """Race relu against gelu from identical seeded weights."""
    try:
        hidden_sizes = tuple(int(h) for h in hidden.split(","))
        config = ConvergenceConfig(
            seed=seed, hidden_sizes=hidden_sizes, learning_rate=learning_rate,
            epochs=epochs, loss_threshold=threshold, optimizer=optimizer,
            beta1=beta1, beta2=beta2,
        )
    except ValueError as exc:
        _fail(EXIT_INPUT, str(exc))
    report = run_convergence_lab(config)
    click.echo(format_summary(report))
    if out_path:
        Path(out_path).write_text(json.dumps(lab_to_json(report), indent=2) + "\n")


@main.command()
@click.option("--bundles", "bundles_dir", type=click.Path(file_okay=False),
              help="bundle directory (default from config)")
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--image-dir", type=click.Path(file_okay=False))
@click.option("--ui", "ui_dir", type=click.Path(file_okay=False),
              help="serve a static front end under /ui")
@click.option("--allow-reload", is_flag=True,
              help="enable POST /reload to rescan the bundle directory")
def serve(bundles_dir, host, port, config_path, image_dir, ui_dir, allow_reload):
    """Serve bundles over HTTP for interactive exploration."""
    from .service import create_app, serve as run_service

    try:
        cfg = load_config(config_path)
        app = create_app(
            bundles_dir or cfg.service_bundles,
            image_dir=image_dir,
            ui_dir=ui_dir,
            allow_reload=allow_reload,
        )
    except _INPUT_ERRORS as exc:
        _fail(EXIT_INPUT, str(exc))
    n = len(app.state.scenes)
    host = host or cfg.service_host
    port = port if port is not None else cfg.service_port
    click.echo(f"serving {n} scene(s) on http://{host}:{port}")
    try:
        run_service(app, host, port)
    except OSError as exc:
        _fail(EXIT_INPUT, f"cannot bind {host}:{port}: {exc}")


if __name__ == "__main__":
    main()
