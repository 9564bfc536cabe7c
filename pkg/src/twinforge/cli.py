"""Command-line pipeline: capture, twin ops, ingest, train, generate, validate.

Exit codes: 0 success, 1 usage error, 2 data error (parse failures, bad
files, I/O), 3 gate or validation failure. All randomness derives from the
config seed (``--seed`` overrides); per-stage streams are hashed from it so
stages stay independent.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path

import numpy as np

from twinforge.clock import now_iso
from twinforge.config import (
    PipelineConfig,
    WORKSPACE_SUBDIRS,
    config_from_doc,
    default_workspace,
    load_config,
)
from twinforge.errors import (
    GateExhausted,
    MacroSyntaxError,
    EmptyScript,
    TwinforgeError,
    WorkspaceLocked,
)
from twinforge.ingest import (
    emit_macro_script,
    parse_macro_script,
    parse_top_capture,
    read_dataset_csv,
    tokenize_script,
    write_dataset_csv,
)
from twinforge.sequence import (
    GenRequest,
    generate_sequence,
    generate_via_service,
    load_seq_model,
    save_seq_model,
    sequence_to_script,
    train_ngram,
)
from twinforge.tabular import (
    column_distances,
    generate_gated,
    load_model,
    save_model,
    train_gan,
)
from twinforge.twin import (
    apply_patch,
    capture_image,
    diff_states,
    instantiate_twin,
    load_checks,
    load_delta,
    load_image,
    load_manifest,
    run_checks,
    save_image,
    scan_tree,
    TwinState,
)
from twinforge.validate import (
    ColumnDistanceRecord,
    ScriptMetrics,
    bleu,
    build_report,
    compare_stats,
    cosine_similarity,
    load_report,
    replay_validate,
    save_report,
    summary_stats,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VALIDATION = 3

WORKSPACE_LOCK = "workspace.lock"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # noqa: A003 - argparse API
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def stage_seed(base: int, label: str) -> int:
    digest = hashlib.sha256(f"{base}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@contextmanager
def _workspace_lock(workspace: Path):
    workspace.mkdir(parents=True, exist_ok=True)
    for subdir in WORKSPACE_SUBDIRS:
        (workspace / subdir).mkdir(exist_ok=True)
    lock = workspace / WORKSPACE_LOCK
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise WorkspaceLocked(f"{workspace}: another invocation holds {WORKSPACE_LOCK}") from None
    os.close(fd)
    try:
        yield
    finally:
        lock.unlink(missing_ok=True)


def _workspace_path(config: PipelineConfig, subdir: str, name: str) -> Path:
    target = config.workspace / subdir
    target.mkdir(parents=True, exist_ok=True)
    return target / name


def _file_sha(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _build_parser() -> _Parser:
    parser = _Parser(prog="twinforge", description=__doc__)
    parser.add_argument("--config", type=Path, help="pipeline config JSON")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--quiet", action="store_true", help="suppress informational output")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = commands.add_parser("capture", help="capture a filesystem image")
    p.add_argument("--root", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p.add_argument("--name", default=None)
    p.add_argument("--exclude", action="append", default=None, metavar="GLOB")

    twin = commands.add_parser("twin", help="twin sandbox operations")
    twin_sub = twin.add_subparsers(dest="twin_command", required=True, parser_class=_Parser)
    p = twin_sub.add_parser("create")
    p.add_argument("--image", type=Path, required=True)
    p.add_argument("--sandbox", type=Path, required=True)
    p = twin_sub.add_parser("patch")
    p.add_argument("--sandbox", type=Path, required=True)
    p.add_argument("--delta", type=Path, required=True)
    p = twin_sub.add_parser("diff")
    p.add_argument("--pre", type=Path, required=True, help="sandbox dir, .twimg image, or manifest JSON")
    p.add_argument("--post", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p = twin_sub.add_parser("check")
    p.add_argument("--sandbox", type=Path, required=True)
    p.add_argument("--checks", type=Path, required=True)

    ingest = commands.add_parser("ingest", help="parse recorded system data")
    ingest_sub = ingest.add_subparsers(dest="ingest_command", required=True, parser_class=_Parser)
    p = ingest_sub.add_parser("top")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p = ingest_sub.add_parser("macro")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p.add_argument("--name", default=None)

    train = commands.add_parser("train", help="train a generative model")
    train_sub = train.add_subparsers(dest="train_command", required=True, parser_class=_Parser)
    p = train_sub.add_parser("tabular")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p.add_argument("--epochs", type=int)
    p = train_sub.add_parser("seq")
    p.add_argument("--corpus", type=Path, nargs="+", required=True)
    p.add_argument("--out", type=Path)
    p.add_argument("--order", type=int)

    gen = commands.add_parser("gen", help="generate synthetic data")
    gen_sub = gen.add_subparsers(dest="gen_command", required=True, parser_class=_Parser)
    p = gen_sub.add_parser("tabular")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--real", type=Path, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", type=Path)
    p = gen_sub.add_parser("seq")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--prompt", required=True)
    p.add_argument("--out", type=Path)
    p.add_argument("--temperature", type=float, default=0.8)
    p.add_argument("--max-len", type=int, default=200)
    p.add_argument("--name", default="generated")
    p.add_argument("--via-service", action="store_true")

    p = commands.add_parser("validate", help="compare synthetic against recorded data")
    p.add_argument("--real", type=Path, required=True)
    p.add_argument("--synth", type=Path, required=True)
    p.add_argument("--pair", nargs=2, action="append", default=[], metavar=("GEN", "REF"))
    p.add_argument("--sandbox", type=Path)
    p.add_argument("--out", type=Path)
    p.add_argument("--run-id", default=None)
    p.add_argument("--gate-attempts", type=int, default=None)

    p = commands.add_parser("report", help="load and display a report")
    p.add_argument("--in", dest="input", type=Path, required=True)

    return parser


def _load_pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    if args.config is not None:
        config = load_config(args.config)
    else:
        config = config_from_doc({"workspace": str(default_workspace())})
    if args.seed is not None:
        if args.seed < 0:
            raise _UsageError("--seed must be non-negative")
        config = replace(config, seed=args.seed)
    return config


def _twin_state(config: PipelineConfig, sandbox: Path) -> TwinState:
    return TwinState(
        sandbox=sandbox, screen_width=config.screen_width, screen_height=config.screen_height
    )


def _manifest_source(path: Path):
    if path.is_dir():
        return scan_tree(path)
    if path.suffix == ".twimg":
        return load_image(path).manifest
    return load_manifest(path)


def _cmd_capture(args, config, say) -> int:
    exclusions = tuple(args.exclude) if args.exclude else config.exclusions
    image = capture_image(args.root, exclusions)
    name = args.name or args.root.name or "image"
    out = args.out or _workspace_path(config, "images", f"{name}.twimg")
    save_image(image, out)
    say(f"captured {len(image.manifest)} entries -> {out}")
    return EXIT_OK


def _cmd_twin(args, config, say) -> int:
    if args.twin_command == "create":
        image = load_image(args.image)
        twin = instantiate_twin(
            image, args.sandbox, screen=(config.screen_width, config.screen_height)
        )
        say(f"twin ready at {twin.sandbox} ({len(twin.manifest())} entries)")
        return EXIT_OK
    if args.twin_command == "patch":
        twin = _twin_state(config, args.sandbox)
        report = apply_patch(twin, load_delta(args.delta))
        for op in report.applied:
            say(f"applied {op}")
        say(f"manifest now {len(report.manifest)} entries")
        return EXIT_OK
    if args.twin_command == "diff":
        diff = diff_states(_manifest_source(args.pre), _manifest_source(args.post))
        doc = {
            "added": list(diff.added),
            "removed": list(diff.removed),
            "modified": [
                {"path": m.path, "old_sha256": m.old_sha256, "new_sha256": m.new_sha256}
                for m in diff.modified
            ],
        }
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
        if args.out:
            args.out.write_text(text, encoding="utf-8")
            say(f"diff -> {args.out}")
        else:
            sys.stdout.write(text)
        return EXIT_OK
    # check
    twin = _twin_state(config, args.sandbox)
    results = run_checks(twin, load_checks(args.checks))
    failed = 0
    for result in results:
        status = "pass" if result.passed else "FAIL"
        say(f"{status}: {result.assertion} ({result.detail})")
        failed += 0 if result.passed else 1
    if failed:
        print(f"{failed} of {len(results)} checks failed", file=sys.stderr)
        return EXIT_VALIDATION
    say(f"all {len(results)} checks passed")
    return EXIT_OK


def _cmd_ingest(args, config, say) -> int:
    if args.ingest_command == "top":
        dataset = parse_top_capture(args.input.read_text(encoding="utf-8"))
        out = args.out or _workspace_path(config, "datasets", args.input.stem + ".csv")
        write_dataset_csv(dataset, out)
        say(f"{len(dataset.rows)} rows -> {out}")
        return EXIT_OK
    name = args.name or args.input.stem
    script = parse_macro_script(args.input.read_text(encoding="utf-8"), name=name)
    out = args.out or _workspace_path(config, "scripts", f"{name}.ahk")
    out.write_text(emit_macro_script(script), encoding="utf-8")
    say(f"{len(script.commands)} commands -> {out}")
    return EXIT_OK


def _cmd_train(args, config, say) -> int:
    if args.train_command == "tabular":
        dataset = read_dataset_csv(args.data)
        gan_config = config.gan if args.epochs is None else replace(config.gan, epochs=args.epochs)
        seed = stage_seed(config.seed, "train.tabular")
        model = train_gan(dataset, gan_config, seed=seed)
        out = args.out or _workspace_path(config, "models", "tabular.json")
        save_model(model, out)
        say(
            f"trained {gan_config.epochs} epochs on {len(dataset.rows)} rows "
            f"(final G loss {model.gen_losses[-1]:.4f}) -> {out}"
        )
        return EXIT_OK
    order = args.order if args.order is not None else config.ngram.order
    corpus = []
    for path in args.corpus:
        script = parse_macro_script(path.read_text(encoding="utf-8"), name=path.stem)
        corpus.append(tokenize_script(script))
    model = train_ngram(corpus, order=order, delta=config.ngram.delta, seed=config.seed)
    out = args.out or _workspace_path(config, "models", "sequence.json")
    save_seq_model(model, out)
    say(f"trained order-{order} model on {len(corpus)} scripts ({len(model.vocab)} tokens) -> {out}")
    return EXIT_OK


def _cmd_gen(args, config, say) -> int:
    if args.gen_command == "tabular":
        model = load_model(args.model)
        real = read_dataset_csv(args.real)
        seed = stage_seed(config.seed, "gen.tabular")
        rng = np.random.default_rng(seed)
        synth, attempts = generate_gated(model, real, args.n, config.gate, rng)
        out = args.out or _workspace_path(config, "datasets", "synthetic.csv")
        write_dataset_csv(synth, out)
        meta = {"gate_attempts": attempts, "seed": seed, "n": args.n, "model": str(args.model)}
        Path(str(out) + ".meta.json").write_text(
            json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        print(f"accepted after {attempts} attempt(s) -> {out}")
        return EXIT_OK
    # seq
    seed = stage_seed(config.seed, "gen.seq")
    request = GenRequest(
        prompt=(args.prompt,), temperature=args.temperature, max_len=args.max_len, seed=seed
    )
    if args.via_service:
        if config.service is None:
            raise _UsageError("--via-service requires a service block in the config")
        tokens = generate_via_service(config.service, request)
    else:
        model = load_seq_model(args.model)
        tokens = generate_sequence(model, request)
    try:
        script = sequence_to_script(tokens, name=args.name)
    except (MacroSyntaxError, EmptyScript) as exc:
        print(f"generated sequence failed validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    out = args.out or _workspace_path(config, "scripts", f"{args.name}.ahk")
    out.write_text(emit_macro_script(script), encoding="utf-8")
    say(f"{len(script.commands)} commands -> {out}")
    return EXIT_OK


def _cmd_validate(args, config, say) -> int:
    real = read_dataset_csv(args.real)
    synth = read_dataset_csv(args.synth)
    comparison = compare_stats(real, synth)
    distances = tuple(
        ColumnDistanceRecord(cd.column, cd.kind, cd.distance)
        for cd in column_distances(real, synth)
    )

    if args.pair and args.sandbox is None:
        raise _UsageError("--pair needs --sandbox for replay validation")
    scripts = []
    for gen_path, ref_path in args.pair:
        gen_path, ref_path = Path(gen_path), Path(ref_path)
        gen = parse_macro_script(gen_path.read_text(encoding="utf-8"), name=gen_path.stem)
        ref = parse_macro_script(ref_path.read_text(encoding="utf-8"), name=ref_path.stem)
        twin = _twin_state(config, args.sandbox)
        replay = replay_validate(gen, twin)
        scripts.append(
            ScriptMetrics(
                name=gen.name,
                cosine=cosine_similarity(gen, ref),
                bleu=bleu(
                    [c.emit() for c in gen.commands], [[c.emit() for c in ref.commands]]
                ),
                replay_ok=replay.ok,
            )
        )

    gate_attempts = args.gate_attempts
    seeds = {"global": config.seed}
    meta_path = Path(str(args.synth) + ".meta.json")
    if gate_attempts is None and meta_path.is_file():
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        gate_attempts = meta.get("gate_attempts")
        if "seed" in meta:
            seeds["gen_tabular"] = meta["seed"]

    run_id = args.run_id or hashlib.sha256(
        f"{config.seed}|{_file_sha(args.real)}|{_file_sha(args.synth)}".encode("utf-8")
    ).hexdigest()[:12]
    report = build_report(
        run_id=run_id,
        created_at=now_iso(),
        seeds=seeds,
        config=config.snapshot(),
        real_stats=summary_stats(real),
        synth_stats=summary_stats(synth),
        comparison=comparison,
        distances=distances,
        scripts=tuple(scripts),
        gate_attempts=gate_attempts,
    )
    out = args.out or _workspace_path(config, "reports", f"report-{run_id}.json")
    save_report(report, out)
    say(f"report -> {out}")
    for name, delta in comparison.continuous.items():
        say(f"  {name}: real {delta.real:.4f} synth {delta.synth:.4f} (abs {delta.abs_delta:.4f})")
    for name, modal in comparison.discrete.items():
        say(f"  {name}: modal {modal.real!r} vs {modal.synth!r} match={modal.match}")
    return EXIT_OK


def _cmd_report(args, config, say) -> int:
    report = load_report(args.input)
    say(f"run {report.run_id} at {report.created_at}")
    say(f"rows: real {report.real_stats.row_count}, synthetic {report.synth_stats.row_count}")
    if report.gate_attempts is not None:
        say(f"gate attempts: {report.gate_attempts}")
    for name, delta in report.comparison.continuous.items():
        say(
            f"  {name}: real {delta.real:.4f} synth {delta.synth:.4f} "
            f"(abs {delta.abs_delta:.4f}, rel {delta.rel_delta:.2%})"
        )
    for name, modal in report.comparison.discrete.items():
        say(f"  {name}: modal {modal.real!r} vs {modal.synth!r} match={modal.match}")
    for cd in report.distances:
        say(f"  distance {cd.column} ({cd.kind}): {cd.distance:.4f}")
    for sm in report.scripts:
        say(f"  script {sm.name}: cosine {sm.cosine:.4f} bleu {sm.bleu:.4f} replay_ok={sm.replay_ok}")
    return EXIT_OK


_DISPATCH = {
    "capture": _cmd_capture,
    "twin": _cmd_twin,
    "ingest": _cmd_ingest,
    "train": _cmd_train,
    "gen": _cmd_gen,
    "validate": _cmd_validate,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        config = _load_pipeline_config(args)

        def say(message: str) -> None:
            if not args.quiet:
                print(message)

        with _workspace_lock(config.workspace):
            return _DISPATCH[args.command](args, config, say)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except GateExhausted as exc:
        print(f"gate failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except TwinforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
