"""Batch command-line front-end.

Subcommands: extract-token, fuse, eval, prompt, filter, split,
selfcheck. Every run is replayable: all randomness flows from explicit
seeds, input manifests are never rewritten in place, and reruns with
identical inputs produce bitwise-identical outputs. Row-level problems
are reported per utterance and turn into exit code 1; bad invocations
exit 2.

Relative tensor/audio paths in a manifest resolve against the manifest
file's directory. Fields this front-end reads beyond the core record:
``acoustic_path`` (t x d acoustic embedding for fusion), and for
evaluation ``hyp_audio_path`` / ``hyp_transcript``. It writes
``token_<strategy>_path``, ``fused_path``, ``attn_path``.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import dataset_filter, fusion, metrics, prompts, report, selfcheck, strategies, tensor_io

STRATEGY_CHOICES = ("ave", "pca", "last", "eis-word", "eis-sentence", "tex", "pho")

EXIT_OK = 0
EXIT_ROW_FAILURES = 1
EXIT_USAGE = 2


class RowError(Exception):
    """Problem confined to one manifest row."""


def _field_name(strategy: str) -> str:
    return f"token_{strategy.replace('-', '_')}_path"


def _resolve(path_value: str, manifest_path: Path) -> Path:
    path = Path(path_value)
    return path if path.is_absolute() else manifest_path.parent / path


def _rebase_paths(record, src_dir: Path, dst_dir: Path) -> None:
    """Re-anchor relative ``*_path`` fields when a manifest copy moves.

    Paths in a manifest resolve against the manifest's own directory, so
    a copy written elsewhere must point back at the original files.
    """

    def rebase(value):
        if not isinstance(value, str) or Path(value).is_absolute():
            return value
        return Path(os.path.relpath(src_dir / value, dst_dir)).as_posix()

    for name in ("audio_path", "hs_text_path", "hs_phoneme_path", "hs_eis_e_path",
                 "hs_eis_i_path", "hs_eis_s_path", "hs_eis_sentence_path"):
        value = getattr(record, name)
        if value is not None:
            setattr(record, name, rebase(value))
    for key, value in record.extra.items():
        if key.endswith("_path"):
            record.extra[key] = rebase(value)


def _load_required(record, field, manifest_path) -> np.ndarray:
    value = getattr(record, field, None)
    if value is None:
        value = record.extra.get(field)
    if value is None:
        raise RowError(f"missing {field}")
    try:
        return tensor_io.read_array(_resolve(value, manifest_path)).astype(np.float64)
    except (OSError, ValueError) as exc:
        raise RowError(f"{field}: {exc}")


def _extract_one(record, strategy: str, manifest_path: Path):
    if strategy in ("ave", "pca", "last", "tex"):
        h = _load_required(record, "hs_text_path", manifest_path)
        if strategy == "ave":
            return strategies.extract_ave(h).vector[np.newaxis, :]
        if strategy == "last":
            return strategies.extract_last(h).vector[np.newaxis, :]
        if strategy == "pca":
            try:
                return strategies.extract_pca(h).vector[np.newaxis, :]
            except ValueError as exc:
                raise RowError(str(exc))
        return strategies.make_sequence(h, strategies.TEX).matrix
    if strategy == "pho":
        h = _load_required(record, "hs_phoneme_path", manifest_path)
        return strategies.make_sequence(h, strategies.PHO).matrix
    if strategy == "eis-word":
        h_e = _load_required(record, "hs_eis_e_path", manifest_path)
        h_i = _load_required(record, "hs_eis_i_path", manifest_path)
        h_s = _load_required(record, "hs_eis_s_path", manifest_path)
        try:
            return strategies.extract_eis_word(h_e, h_i, h_s).vector[np.newaxis, :]
        except ValueError as exc:
            raise RowError(str(exc))
    if strategy == "eis-sentence":
        h = _load_required(record, "hs_eis_sentence_path", manifest_path)
        return strategies.extract_eis_sentence(h).vector[np.newaxis, :]
    raise RowError(f"unknown strategy {strategy!r}")


def cmd_extract_token(args) -> int:
    manifest_path = Path(args.manifest)
    records = tensor_io.read_manifest(manifest_path)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    field = _field_name(args.strategy)

    failures = []
    updated = []
    for record in records:
        try:
            matrix = _extract_one(record, args.strategy, manifest_path)
            _rebase_paths(record, manifest_path.parent, out_dir)
            name = f"{record.utt_id}.{args.strategy.replace('-', '_')}.npy"
            tensor_io.write_array(matrix, out_dir / name)
            record.extra[field] = name
        except RowError as exc:
            _rebase_paths(record, manifest_path.parent, out_dir)
            failures.append((record.utt_id, str(exc)))
            print(f"error: {record.utt_id}: {exc}", file=sys.stderr)
        updated.append(record)
    tensor_io.write_manifest(updated, out_dir / "manifest.jsonl")
    return EXIT_ROW_FAILURES if failures else EXIT_OK


def _load_or_init_projection(args, d_out: int, d_in: int, out_dir: Path) -> fusion.ProjectionMatrix:
    if args.projection:
        w = tensor_io.read_array(args.projection).astype(np.float64)
        return fusion.ProjectionMatrix(w)
    proj = fusion.init_projection(d_out, d_in, args.seed)
    tensor_io.write_array(proj.w, out_dir / "projection.npy", dtype="<f8")
    return proj


def cmd_fuse(args) -> int:
    manifest_path = Path(args.manifest)
    records = tensor_io.read_manifest(manifest_path)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    token_field = _field_name(args.strategy)

    cfg = fusion.FusionConfig(
        gamma=args.gamma,
        mask_fill=args.mask_fill,
        dropout_p=args.dropout,
        rng_seed=args.seed,
        train_mode=args.dropout > 0,
    )

    projection = None
    failures = []
    updated = []
    for record in records:
        error = None
        acoustic = token = None
        try:
            acoustic = _load_required(record, "acoustic_path", manifest_path)
            token = _load_required(record, token_field, manifest_path)
        except RowError as exc:
            error = exc
        _rebase_paths(record, manifest_path.parent, out_dir)
        if error is None:
            try:
                if projection is None:
                    projection = _load_or_init_projection(
                        args, acoustic.shape[1], token.shape[1], out_dir
                    )
                if token.shape[1] != projection.d_in or acoustic.shape[1] != projection.d_out:
                    raise RowError(
                        f"projection is {projection.d_out}x{projection.d_in} but acoustic "
                        f"is {acoustic.shape} and token is {token.shape}"
                    )
                projected = projection.w @ token.T  # d_out x rows
                if args.mode == "add":
                    if token.shape[0] != 1:
                        raise RowError(
                            f"add mode needs a single global token, got {token.shape[0]} rows"
                        )
                    fused = fusion.fuse_global(acoustic, projected[:, 0])
                else:
                    fused = fusion.fuse_sequential(acoustic, projected.T, cfg)
                fused_name = f"{record.utt_id}.fused_{args.mode}.npy"
                tensor_io.write_array(fused.matrix, out_dir / fused_name)
                record.extra["fused_path"] = fused_name
                if fused.attention is not None:
                    attn_name = f"{record.utt_id}.attn.npy"
                    tensor_io.write_array(fused.attention, out_dir / attn_name)
                    record.extra["attn_path"] = attn_name
            except RowError as exc:
                error = exc
        if error is not None:
            failures.append((record.utt_id, str(error)))
            print(f"error: {record.utt_id}: {error}", file=sys.stderr)
        updated.append(record)
    tensor_io.write_manifest(updated, out_dir / "manifest.jsonl")
    return EXIT_ROW_FAILURES if failures else EXIT_OK


def cmd_eval(args) -> int:
    manifest_path = Path(args.manifest)
    records = tensor_io.read_manifest(manifest_path)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    failures = 0
    for record in records:
        row = {"utt_id": record.utt_id}
        try:
            if record.audio_path is None or record.extra.get("hyp_audio_path") is None:
                raise RowError("needs audio_path and hyp_audio_path")
            try:
                ref_cep = metrics.mel_cepstra_from_wav(_resolve(record.audio_path, manifest_path))
                hyp_cep = metrics.mel_cepstra_from_wav(
                    _resolve(record.extra["hyp_audio_path"], manifest_path)
                )
            except (OSError, ValueError) as exc:
                raise RowError(f"audio: {exc}")
            row["mcd"] = metrics.mcd(ref_cep, hyp_cep, use_dtw=args.dtw, skip_c0=args.skip_c0)
            hyp_text = record.extra.get("hyp_transcript")
            if hyp_text is None:
                raise RowError("needs hyp_transcript")
            try:
                row["cer"] = metrics.cer(record.transcript, hyp_text)
                row["wer"] = metrics.wer(record.transcript, hyp_text)
            except ValueError as exc:
                raise RowError(f"transcript: {exc}")
        except RowError as exc:
            row = {"utt_id": record.utt_id, "error": str(exc)}
            failures += 1
            print(f"error: {record.utt_id}: {exc}", file=sys.stderr)
        rows.append(row)

    summary = report.write_report(rows, out_dir / "report.jsonl")
    if args.figures:
        report.render_report_figures(rows, out_dir)
    parts = [f"{name}: {summary[name]}" for name in ("mcd", "cer", "wer") if name in summary]
    skipped = f", skipped {summary['skipped']}" if summary["skipped"] else ""
    print(f"evaluated {summary['count']} utterances{skipped}; " + "; ".join(parts))
    return EXIT_ROW_FAILURES if failures else EXIT_OK


def cmd_prompt(args) -> int:
    manifest_path = Path(args.manifest)
    records = tensor_io.read_manifest(manifest_path)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    template = None
    if args.template:
        name = {
            "eis-word": prompts.EIS_WORD_NAME,
            "eis-sentence": prompts.EIS_SENTENCE_NAME,
            "emotion": prompts.EMOTION_LABEL_NAME,
        }[args.kind]
        template = prompts.PromptTemplate.from_file(name, args.template)

    failures = 0
    for record in records:
        try:
            if args.kind == "eis-word":
                text = prompts.build_eis_word_prompt(record.transcript, template)
            elif args.kind == "eis-sentence":
                text = prompts.build_eis_sentence_prompt(record.transcript, template)
            else:
                text = prompts.build_emotion_label_prompt(
                    record.transcript, args.labels.split(","), template
                )
        except ValueError as exc:
            failures += 1
            print(f"error: {record.utt_id}: {exc}", file=sys.stderr)
            continue
        target = out_dir / f"{record.utt_id}.{args.kind}.prompt.txt"
        target.write_text(text, encoding="utf-8")
    return EXIT_ROW_FAILURES if failures else EXIT_OK


def cmd_filter(args) -> int:
    manifest_path = Path(args.manifest)
    records = tensor_io.read_manifest(manifest_path)
    if args.speaker is not None:
        records = dataset_filter.filter_by_speaker(records, args.speaker)
    if args.agree:
        records = dataset_filter.filter_by_emotion_agreement(records)
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    for record in records:
        _rebase_paths(record, manifest_path.parent, out_path.parent)
    tensor_io.write_manifest(records, out_path)
    print(f"kept {len(records)} records")
    return EXIT_OK


def cmd_split(args) -> int:
    records = tensor_io.read_manifest(Path(args.manifest))
    fractions = [float(f) for f in args.fractions.split(",")]
    if len(fractions) != 3:
        print("error: --fractions needs three comma-separated values", file=sys.stderr)
        return EXIT_USAGE
    spec = dataset_filter.SplitSpec(*fractions, seed=args.seed)
    try:
        train, dev, test = dataset_filter.split(records, spec, by_duration=args.by_duration)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for record in records:
        _rebase_paths(record, Path(args.manifest).parent, out_dir)
    for name, part in (("train", train), ("dev", dev), ("test", test)):
        tensor_io.write_manifest(part, out_dir / f"{name}.jsonl")
    print(f"split {len(records)} records into {len(train)}/{len(dev)}/{len(test)}")
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    results = selfcheck.run_all(edit_max_len=args.edit_max_len)
    for result in results:
        print(result.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_ROW_FAILURES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semfuse",
        description="Semantic token extraction, fusion, and objective TTS evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract-token", help="compute semantic tokens for each utterance")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--strategy", required=True, choices=STRATEGY_CHOICES)
    p.set_defaults(func=cmd_extract_token)

    p = sub.add_parser("fuse", help="fuse semantic tokens with acoustic embeddings")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--strategy", required=True, choices=STRATEGY_CHOICES)
    p.add_argument("--mode", required=True, choices=("add", "att"))
    p.add_argument("--projection", help="projection matrix file (default: seeded init)")
    p.add_argument("--gamma", type=float, default=0.0, help="temperature; 0 means sqrt(d)")
    p.add_argument("--dropout", type=float, default=0.0)
    p.add_argument("--mask-fill", type=float, default=fusion.DEFAULT_MASK_FILL)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("eval", help="MCD and CER/WER over reference/hypothesis pairs")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--dtw", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--skip-c0", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("prompt", help="write LM prompt files per utterance")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--kind", required=True, choices=("eis-word", "eis-sentence", "emotion"))
    p.add_argument("--template", help="template file with {transcript} placeholder")
    p.add_argument("--labels", default=",".join(prompts.DEFAULT_EMOTION_LABELS))
    p.set_defaults(func=cmd_prompt)

    p = sub.add_parser("filter", help="speaker / emotion-agreement filtering")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--speaker")
    p.add_argument("--agree", action="store_true", help="require annotated == predicted emotion")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("split", help="deterministic train/dev/test split")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--fractions", default="0.8,0.1,0.1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--by-duration", action="store_true")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("selfcheck", help="run the built-in verification suites")
    p.add_argument("--edit-max-len", type=int, default=4)
    p.set_defaults(func=cmd_selfcheck)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (tensor_io.ManifestError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
