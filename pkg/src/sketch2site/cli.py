"""Command line entry points.

The CLI stays thin: argument parsing plus calls into the package; the
publish subcommand talks to a running preview service over HTTP.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import DEFAULT_CONFIG, PipelineConfig


def _load_config(path: str | None) -> PipelineConfig:
    return PipelineConfig.from_json(path) if path else DEFAULT_CONFIG


def cmd_capture(args) -> int:
    from .capture import NoPageFound, crop_to_sketch
    from .raster import load_png, save_png

    cfg = _load_config(args.config)
    try:
        edges = crop_to_sketch(load_png(args.input), cfg.capture)
    except NoPageFound as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    save_png(edges, args.output)
    print(f"wrote {args.output}")
    return 0


def cmd_run(args) -> int:
    from .dsl import emit_html, serialize, write_file
    from .pipeline import run_pipeline

    cfg = _load_config(args.config)
    doc = run_pipeline(args.input, args.checkpoint, cfg)
    if args.dsl:
        write_file(doc, args.dsl)
        print(f"wrote {args.dsl}")
    Path(args.out).write_text(emit_html(doc))
    print(f"wrote {args.out}")

    if args.serve is not None:
        import uvicorn

        from .service import create_app

        app = create_app(checkpoint=args.checkpoint)
        app.state.hub.seed_initial(serialize(doc))
        uvicorn.run(app, host=args.host, port=args.serve, log_level="warning")
    return 0


def cmd_dataset_gen(args) -> int:
    from .synth import LayoutConfig, easy_corpus_config, gen_dataset, load_corpus

    config = easy_corpus_config() if args.easy else LayoutConfig()
    corpus = load_corpus(args.corpus) if args.corpus else None
    gen_dataset(
        args.out,
        count=args.count,
        seed=args.seed,
        config=config,
        corpus=corpus,
        w_px=args.width,
        h_px=args.height,
        jitter=args.jitter,
    )
    print(f"wrote {args.count} samples to {args.out}")
    return 0


def cmd_train(args) -> int:
    from .mlp import TrainConfig, accuracy, save_checkpoint, train
    from .synth import gen_container_dataset, load_container_csv, save_container_csv

    if args.csv:
        rows = load_container_csv(args.csv)
    else:
        rows = gen_container_dataset(seed=args.seed, n_per_class=args.n_per_class)
        if args.save_csv:
            save_container_csv(rows, args.save_csv)
            print(f"wrote {args.save_csv}")
    cfg = TrainConfig(seed=args.seed, max_epochs=args.epochs, patience=args.patience)
    params, history = train(rows, cfg)
    save_checkpoint(params, args.out)
    print(f"wrote {args.out}  (epochs: {len(history)}, "
          f"best val acc: {max(h['val_acc'] for h in history):.3f}, "
          f"train acc: {accuracy(params, rows):.3f})")
    return 0


def cmd_eval_run(args) -> int:
    from .evaluate import control_pipeline, detection_pipeline, evaluate_corpus, oracle_pipeline
    from .mlp import load_checkpoint

    cfg = _load_config(args.config)
    if args.oracle:
        pipeline = oracle_pipeline(args.dataset)
    elif args.control:
        pipeline = control_pipeline(args.dataset)
    else:
        if not args.checkpoint:
            print("error: --checkpoint required unless --oracle/--control", file=sys.stderr)
            return 2
        pipeline = detection_pipeline(load_checkpoint(args.checkpoint), cfg)
    report = evaluate_corpus(pipeline, args.dataset, args.out)
    print(json.dumps(report.summary, indent=2, sort_keys=True))
    print(f"wrote {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        checkpoint=args.checkpoint,
        watch_path=args.watch,
        static_dir=args.static,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_publish(args) -> int:
    import httpx

    from .dsl import parse_file

    doc = parse_file(args.doc)
    payload = json.loads(json.dumps(doc, default=lambda o: o.__dict__))
    response = httpx.post(f"{args.server.rstrip('/')}/publish", json=payload, timeout=10.0)
    if response.status_code != 200:
        print(f"error: server said {response.status_code}: {response.text}", file=sys.stderr)
        return 2
    print(f"published seq {response.json()['seq']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sketch2site", description=__doc__)
    parser.add_argument("--config", help="pipeline config JSON", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capture", help="photo -> deskewed edge map PNG")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_capture)

    p = sub.add_parser("run", help="compile a wireframe image to HTML")
    p.add_argument("--input", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", default="page.html")
    p.add_argument("--dsl", help="also write the DSL document here")
    p.add_argument("--serve", type=int, default=None, metavar="PORT")
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("dataset", help="dataset tooling")
    dataset_sub = p.add_subparsers(dest="dataset_command", required=True)
    g = dataset_sub.add_parser("gen", help="generate a synthetic dataset")
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--easy", action="store_true", help="well-separated evaluation corpus")
    g.add_argument("--corpus", help="directory of scanned glyph PNGs")
    g.add_argument("--width", type=int, default=512)
    g.add_argument("--height", type=int, default=640)
    g.add_argument("--jitter", type=float, default=0.025)
    g.set_defaults(func=cmd_dataset_gen)

    p = sub.add_parser("train", help="train the container classifier")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-per-class", type=int, default=400)
    p.add_argument("--csv", help="train from an existing container CSV")
    p.add_argument("--save-csv", help="also dump the generated rows as CSV")
    p.add_argument("--epochs", type=int, default=120)
    p.add_argument("--patience", type=int, default=5)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluation harness")
    eval_sub = p.add_subparsers(dest="eval_command", required=True)
    r = eval_sub.add_parser("run", help="score a pipeline over a dataset")
    r.add_argument("--dataset", required=True)
    r.add_argument("--out", default="report.jsonl")
    r.add_argument("--checkpoint")
    r.add_argument("--oracle", action="store_true", help="score the ground truth against itself")
    r.add_argument("--control", action="store_true", help="score shuffled truths (study control)")
    r.set_defaults(func=cmd_eval_run)

    p = sub.add_parser("serve", help="run the live preview service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--checkpoint", help="enables POST /compile")
    p.add_argument("--watch", help="broadcast this .wire.json whenever it changes")
    p.add_argument("--static", help="serve this client build instead of the built-in page")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("publish", help="POST a DSL document to a running service")
    p.add_argument("doc", help="path to a .wire.json file")
    p.add_argument("--server", default="http://127.0.0.1:8000")
    p.set_defaults(func=cmd_publish)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
