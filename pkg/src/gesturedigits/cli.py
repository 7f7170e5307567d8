"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data/model error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dataset import (
    assign_splits,
    build_label_map,
    generate_dataset,
    ingest_directory,
    load_manifest,
    save_manifest,
)
from .dataset.labelmap import parse_label_map, write_label_map
from .errors import (
    CheckpointError,
    ContractViolation,
    DataError,
    IngestionError,
    NoHandRegionError,
    ParseError,
)
from .harness.config import TrainConfig, EvalConfig
from .harness.data import load_classifier_examples
from .harness.evaluate import evaluate
from .harness.infer import infer
from .harness.metrics import export_curves, metrics_to_csv, parse_metrics_csv
from .harness.stream import run_stream
from .harness.train import resume_training, train
from .models.checkpoint import load_checkpoint, save_checkpoint
from .models.detector import DetectorConfig
from .models.features import (
    FeatureStore,
    extract_gesture_features,
    load_feature_store,
    save_feature_store,
)
from .models.network import (
    build_classifier,
    build_detector,
    set_trainable,
    transfer_parameters,
)

USAGE_EXIT = 1
DATA_EXIT = 2

DATA_ERRORS = (CheckpointError, ContractViolation, DataError, IngestionError,
               NoHandRegionError, ParseError, FileNotFoundError, OSError)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the CLI contract wants 1
        raise _UsageError(message)


def _load_labels(root: Path | None, labels_path: str | None, manifest=None):
    if labels_path:
        return parse_label_map(Path(labels_path).read_text(encoding="utf-8"))
    if root is not None and (root / "labelmap.txt").is_file():
        return parse_label_map((root / "labelmap.txt").read_text(encoding="utf-8"))
    if manifest is not None:
        return build_label_map(manifest.class_names())
    raise DataError("no label map: pass --labels or keep labelmap.txt in the dataset root")


def _dataset(args):
    """Manifest + label map from either --manifest or --root."""
    if getattr(args, "manifest", None):
        manifest = load_manifest(args.manifest)
        root = Path(args.root) if getattr(args, "root", None) else None
        return manifest, _load_labels(root, args.labels, manifest)
    if not getattr(args, "root", None):
        raise _UsageError("one of --root or --manifest is required")
    root = Path(args.root)
    manifest = assign_splits(ingest_directory(root), args.fraction, args.seed)
    return manifest, _load_labels(root, args.labels, manifest)


def cmd_gen(args) -> int:
    paths = generate_dataset(args.out, num_classes=args.classes,
                             per_class=args.per_class, seed=args.seed,
                             canvas=args.canvas)
    print(f"wrote {len(paths)} images under {args.out}")
    return 0


def cmd_split(args) -> int:
    manifest = assign_splits(ingest_directory(args.root), args.fraction, args.seed)
    save_manifest(manifest, args.out)
    print(f"{len(manifest.train_items())} train / {len(manifest.val_items())} val "
          f"-> {args.out}")
    return 0


def cmd_labelmap(args) -> int:
    label_map = build_label_map([n for n in args.names.split(",") if n])
    text = write_label_map(label_map)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    for name, label_id in label_map.entries:
        print(f"{name} {label_id}")
    return 0


def _build_for_mode(args, label_map):
    if args.mode == "detector":
        dcfg = DetectorConfig(grid_size=args.grid_size, boxes_per_cell=args.boxes,
                              num_classes=len(label_map), weight_decay=args.weight_decay)
        return build_detector(dcfg.grid_size, dcfg.boxes_per_cell, dcfg.num_classes,
                              input_side=96, seed=args.seed), dcfg
    return build_classifier(len(label_map), 32, seed=args.seed), None


def cmd_train(args) -> int:
    manifest, label_map = _dataset(args)
    cfg = TrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                      learning_rate=args.lr, weight_decay=args.weight_decay,
                      seed=args.seed, checkpoint_every=args.checkpoint_every,
                      mode=args.mode)
    dcfg = None
    if args.mode == "detector":
        dcfg = DetectorConfig(grid_size=args.grid_size, boxes_per_cell=args.boxes,
                              num_classes=len(label_map),
                              weight_decay=args.weight_decay)
    if args.resume_from:
        net, log = resume_training(args.resume_from, manifest, cfg,
                                   label_map=label_map, detector_cfg=dcfg,
                                   checkpoint_dir=args.checkpoint_dir)
    else:
        net, dcfg = _build_for_mode(args, label_map)
        if args.mode == "finetune":
            if not args.init_from:
                raise _UsageError("finetune mode requires --init-from CHECKPOINT")
            pretrained, _ = load_checkpoint(args.init_from)
            copied = transfer_parameters(pretrained, net, args.transfer_prefixes.split(","))
            set_trainable(net, args.freeze_prefix, False)
            print(f"transferred {len(copied)} tensors; froze '{args.freeze_prefix}*'")
        net, log = train(net, manifest, cfg, label_map=label_map,
                         detector_cfg=dcfg, checkpoint_dir=args.checkpoint_dir)
    if args.checkpoint_dir:
        final = Path(args.checkpoint_dir) / "final.ckpt"
        steps = log.rows[-1].epoch * ((len(manifest.train_items()) + cfg.batch_size - 1)
                                      // cfg.batch_size)
        save_checkpoint(net, steps, final)
        print(f"final checkpoint -> {final}")
    if args.metrics_out:
        Path(args.metrics_out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.metrics_out).write_text(metrics_to_csv(log), encoding="utf-8")
        print(f"metrics -> {args.metrics_out}")
    last = log.rows[-1]
    print(f"epoch {last.epoch}: train_loss {last.train_loss:.4f} "
          f"val_acc {last.val_acc:.3f}")
    return 0


def cmd_eval(args) -> int:
    manifest, label_map = _dataset(args)
    net, _ = load_checkpoint(args.checkpoint)
    items = manifest.val_items() or list(manifest.items)
    examples = load_classifier_examples(items, label_map)
    result = evaluate(net, examples, EvalConfig(max_steps=args.max_steps))
    print(f"evaluated {result.evaluated} examples")
    print(f"accuracy {result.accuracy:.4f} mean_loss {result.mean_loss:.4f}")
    print("confusion (rows true, cols predicted):")
    for row in result.confusion:
        print("  " + " ".join(f"{v:4d}" for v in row))
    return 0


def cmd_enroll(args) -> int:
    manifest, label_map = _dataset(args)
    store = FeatureStore(label_map)
    from .imaging.image import load_png

    for item in manifest.train_items():
        store.add(item.label, extract_gesture_features(load_png(item.image_path)))
    store.finalize()
    save_feature_store(store, args.store)
    total = sum(len(v) for v in store.vectors.values())
    print(f"enrolled {total} vectors over {len(label_map)} gestures -> {args.store}")
    return 0


def cmd_infer(args) -> int:
    label_map = _load_labels(None, args.labels) if args.labels else None
    if args.pipeline == "features":
        model = load_feature_store(args.store)
    else:
        model, _ = load_checkpoint(args.checkpoint)
        if label_map is None:
            raise _UsageError("--labels is required for cnn/detector pipelines")
    dcfg = None
    if args.pipeline == "detector":
        d = model.descriptor
        dcfg = DetectorConfig(grid_size=d["grid_size"], boxes_per_cell=d["boxes_per_cell"],
                              num_classes=d["num_classes"])
    result = infer(model, args.image, args.pipeline, label_map=label_map,
                   detector_cfg=dcfg)
    if not result.detected:
        print("no detection")
    else:
        box = result.box
        box_text = (f" box=({box.x_min},{box.y_min},{box.x_max},{box.y_max})"
                    if box else "")
        print(f"label={result.label} confidence={result.confidence:.4f}{box_text}")
    return 0


def cmd_stream(args) -> int:
    label_map = _load_labels(None, args.labels) if args.labels else None
    if args.pipeline == "features":
        model = load_feature_store(args.store)
        dcfg = None
    else:
        model, _ = load_checkpoint(args.checkpoint)
        dcfg = None
        if args.pipeline == "detector":
            d = model.descriptor
            dcfg = DetectorConfig(grid_size=d["grid_size"],
                                  boxes_per_cell=d["boxes_per_cell"],
                                  num_classes=d["num_classes"])

    def sink(record):
        if record.error:
            print(f"frame {record.frame_index}: ERROR {record.error}")
        else:
            print(f"frame {record.frame_index}: label={record.label} "
                  f"confidence={record.confidence:.3f} {record.elapsed_ms:.1f}ms")

    records = run_stream(model, args.frames_dir, sink, pipeline=args.pipeline,
                         label_map=label_map, detector_cfg=dcfg)
    print(f"{len(records)} frames processed")
    return 0


def cmd_curves(args) -> int:
    log = parse_metrics_csv(Path(args.log).read_text(encoding="utf-8"))
    if args.svg:
        export_curves(log, args.svg, "svg")
        print(f"svg -> {args.svg}")
    if args.csv_out:
        export_curves(log, args.csv_out, "csv")
        print(f"csv -> {args.csv_out}")
    if not args.svg and not args.csv_out:
        raise _UsageError("pass --svg and/or --csv-out")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    label_map = _load_labels(Path(args.dataset), args.labels)
    app = create_app(args.dataset, label_map, static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="gesturedigits",
                     description="hand-gesture digit recognition toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic gesture dataset")
    p.add_argument("--classes", type=int, default=6)
    p.add_argument("--per-class", type=int, default=20)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--canvas", type=int, default=96)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("split", help="ingest a tree and write a split manifest")
    p.add_argument("--root", required=True)
    p.add_argument("--fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("labelmap", help="build a label map from names")
    p.add_argument("--names", required=True, help="comma-separated class names")
    p.add_argument("--out")
    p.set_defaults(func=cmd_labelmap)

    p = sub.add_parser("train", help="train a model")
    p.add_argument("--root")
    p.add_argument("--manifest")
    p.add_argument("--labels")
    p.add_argument("--mode", choices=("classifier", "detector", "finetune"),
                   default="classifier")
    p.add_argument("--epochs", type=int, default=60)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--lambda", dest="weight_decay", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--fraction", type=float, default=0.8)
    p.add_argument("--checkpoint-dir")
    p.add_argument("--checkpoint-every", type=int, default=0)
    p.add_argument("--metrics-out")
    p.add_argument("--resume-from")
    p.add_argument("--init-from", help="pretrained checkpoint for finetune mode")
    p.add_argument("--transfer-prefixes", default="conv1,conv2")
    p.add_argument("--freeze-prefix", default="conv")
    p.add_argument("--grid-size", type=int, default=3)
    p.add_argument("--boxes", type=int, default=1)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--root")
    p.add_argument("--manifest")
    p.add_argument("--labels")
    p.add_argument("--fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--max-steps", type=int, default=10000)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("enroll", help="build a feature store from a dataset")
    p.add_argument("--root")
    p.add_argument("--manifest")
    p.add_argument("--labels")
    p.add_argument("--fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--store", required=True)
    p.set_defaults(func=cmd_enroll)

    p = sub.add_parser("infer", help="classify one image")
    p.add_argument("--pipeline", choices=("cnn", "features", "detector"),
                   required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--checkpoint")
    p.add_argument("--store")
    p.add_argument("--labels")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("stream", help="run inference over a frame directory")
    p.add_argument("--frames-dir", required=True)
    p.add_argument("--pipeline", choices=("cnn", "features", "detector"),
                   default="detector")
    p.add_argument("--checkpoint")
    p.add_argument("--store")
    p.add_argument("--labels")
    p.set_defaults(func=cmd_stream)

    p = sub.add_parser("curves", help="render metric curves from a CSV log")
    p.add_argument("--log", required=True)
    p.add_argument("--svg")
    p.add_argument("--csv-out")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--dataset", required=True)
    p.add_argument("--labels")
    p.add_argument("--static-dir")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
