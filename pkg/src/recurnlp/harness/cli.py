"""Command-line interface: ``recurnlp <subcommand> [flags]``.

Exit status is 0 on success, 1 on a data error (unreadable or empty input,
undefined measure) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Sequence

from ..corpus import load_manifest, read_text, tokenize
from ..errors import RecurNLPError
from ..multiseries import (
    build_cross_rp,
    build_trajectory,
    joint_rp,
    load_embeddings,
    radius_for_target_rr,
    semantic_rp,
)
from ..ngram import (
    build_profile,
    chi_square_from_rr,
    chi_square_uniform,
    compare_paths,
    ngram_entropy,
    write_profile_csv,
)
from ..recurrence import RecurrencePlot, WindowSpec, build_rp, rqa_measures, windowed_rqa
from . import experiments
from .render import FORMATS, render_rp

log = logging.getLogger("recurnlp")

JOBS_ENV = "RECURNLP_JOBS"
_BOOL_FLAGS = {"csv", "percent", "json"}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


class UsageError(Exception):
    pass


def load_config(path: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment. Keys are flag
    names with or without leading dashes."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _add_common(p: argparse.ArgumentParser, theiler: bool = True) -> None:
    if theiler:
        p.add_argument("--theiler", type=int, default=1, help="central diagonals excluded (default 1)")
    p.add_argument("--csv", action="store_true", help="CSV instead of JSON")
    p.add_argument(
        "--percent",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="report RR and DET in percent (default); --no-percent gives fractions",
    )
    p.add_argument("--log-base", choices=["e", "2"], default="e", help="logarithm base for ENT")
    p.add_argument("--trend-tail", type=float, default=0.1, help="fraction of far diagonals left out of TREND")
    p.add_argument("--out", help="output path")
    p.add_argument("--jobs", type=int, default=_default_jobs(), help=f"worker count (env {JOBS_ENV})")
    p.add_argument("--config", help="file of 'flag = value' lines; command-line flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="recurnlp", description="Recurrence quantification analysis of text.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("rqa", help="RQA measures of one text")
    p.add_argument("--file", required=True)
    _add_common(p)

    p = sub.add_parser("winrqa", help="windowed RQA, one CSV row per window")
    p.add_argument("--file", required=True)
    p.add_argument("--winsz", type=int, default=500)
    p.add_argument("--wshft", type=int, default=20)
    p.add_argument("--json", action="store_true", help="JSON list instead of CSV")
    _add_common(p)

    p = sub.add_parser("crqa", help="cross-recurrence measures of two texts")
    p.add_argument("--file", action="append", required=True, help="give twice: first and second text")
    _add_common(p, theiler=False)

    p = sub.add_parser("semrqa", help="RQA of a thresholded word-embedding trajectory")
    p.add_argument("--file", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--radius", type=float)
    p.add_argument("--target-rr", type=float, default=0.05)
    p.add_argument("--oov", choices=["skip", "error"], default="skip")
    _add_common(p, theiler=False)

    p = sub.add_parser("jrp", help="joint plot of word identity and semantic proximity")
    p.add_argument("--file", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--radius", type=float)
    p.add_argument("--target-rr", type=float, default=0.05)
    p.add_argument("--oov", choices=["skip", "error"], default="skip")
    _add_common(p)

    p = sub.add_parser("ngram", help="n-gram route to RR/DET/ENT and n-gram statistics")
    p.add_argument("--file", required=True)
    p.add_argument("--order", type=int, default=2, help="n-gram order for the profile and entropy")
    _add_common(p, theiler=False)

    p = sub.add_parser("genre", help="genre experiment over a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--slice-start", type=int, default=5000)
    p.add_argument("--slice-end", type=int, default=10000)
    p.add_argument("--min-words", type=int, default=10000)
    _add_common(p)

    p = sub.add_parser("compress-exp", help="DET versus compressibility on random strings")
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    _add_common(p, theiler=False)

    p = sub.add_parser("render", help="draw a recurrence plot")
    p.add_argument("--file", required=True)
    p.add_argument("--format", choices=FORMATS, default="pbm")
    _add_common(p)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        cfg = load_config(known.config)
    except OSError as e:
        raise UsageError(f"cannot read config: {e}") from None
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for sp in subparsers.choices.values():
        actions = {a.dest: a for a in sp._actions}
        defaults = {}
        for key, value in cfg.items():
            action = actions.get(key)
            if action is None:
                continue
            if key in _BOOL_FLAGS:
                low = value.lower()
                if low not in _TRUE | _FALSE:
                    raise UsageError(f"config key {key!r} needs a boolean, got {value!r}")
                defaults[key] = low in _TRUE
            elif isinstance(action, argparse._AppendAction):
                defaults[key] = [s.strip() for s in value.split(",") if s.strip()]
            else:
                defaults[key] = value
        for a in sp._actions:
            if a.dest in defaults and a.required:
                a.required = False
        sp.set_defaults(**defaults)
    all_dests = {a.dest for sp in subparsers.choices.values() for a in sp._actions}
    unknown = sorted(set(cfg) - all_dests)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")


def _coerce(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    # set_defaults bypasses type conversion for non-string-typed actions
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    sp = subparsers.choices[args.command]
    for a in sp._actions:
        v = getattr(args, a.dest, None)
        if isinstance(v, str) and a.type is not None and a.type is not str:
            try:
                setattr(args, a.dest, a.type(v))
            except ValueError:
                raise UsageError(f"bad value for {a.dest}: {v!r}") from None
        if a.choices is not None and v is not None and not isinstance(v, list) and v not in a.choices:
            raise UsageError(f"{a.dest} must be one of {list(a.choices)}, got {v!r}")


def _log_base(args) -> float:
    return math.e if args.log_base == "e" else 2.0


def _measure_kw(args) -> dict:
    return {"exclude_tail": args.trend_tail, "log_base": _log_base(args)}


def _read_seq(path: str):
    return tokenize(read_text(path), source_id=str(path))


def _emit(args, text: str) -> None:
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)


def _csv_rows(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\r\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: "" if v is None else v for k, v in r.items()})
    return buf.getvalue()


def _measures_out(args, record: dict) -> None:
    if args.csv:
        _emit(args, _csv_rows([record]))
    else:
        _emit(args, _json(record))


def _semantic_plot(args, seq):
    table = load_embeddings(args.embeddings)
    traj = build_trajectory(seq, table, args.oov)
    search = None
    if args.radius is not None:
        radius = args.radius
    else:
        search = radius_for_target_rr(traj, args.target_rr)
        radius = search.radius
    return traj, semantic_rp(traj, radius), radius, search


def cmd_rqa(args) -> None:
    rp = build_rp(_read_seq(args.file), args.theiler)
    rec = {"file": args.file, "theiler": args.theiler, **rqa_measures(rp, **_measure_kw(args)).as_dict(args.percent)}
    _measures_out(args, rec)


def cmd_winrqa(args) -> None:
    seq = _read_seq(args.file)
    w = WindowSpec(args.winsz, args.wshft)
    res = windowed_rqa(seq, w, args.theiler, jobs=args.jobs, **_measure_kw(args))
    rows = [{"window_start": s, "window_end": s + w.winsz, **m.as_dict(args.percent)} for s, m in res]
    _emit(args, _json(rows) if args.json else _csv_rows(rows))


def cmd_crqa(args) -> None:
    if len(args.file) != 2:
        raise UsageError("crqa needs exactly two --file arguments")
    a, b = (_read_seq(f) for f in args.file)
    rp = build_cross_rp(a, b)
    rec = {"file_a": args.file[0], "file_b": args.file[1], **rqa_measures(rp, **_measure_kw(args)).as_dict(args.percent)}
    _measures_out(args, rec)


def _search_fields(radius, search) -> dict:
    d = {"radius": radius}
    if search is not None:
        d.update(target_rr=search.target_rr, achieved_rr=search.achieved_rr, target_met=search.met)
    return d


def cmd_semrqa(args) -> None:
    seq = _read_seq(args.file)
    traj, rp, radius, search = _semantic_plot(args, seq)
    rec = {"file": args.file, "t": traj.t, **_search_fields(radius, search)}
    rec.update(rqa_measures(rp, **_measure_kw(args)).as_dict(args.percent))
    _measures_out(args, rec)


def cmd_jrp(args) -> None:
    seq = _read_seq(args.file)
    traj, sem, radius, search = _semantic_plot(args, seq)
    kept = seq.ids[traj.index_map]
    word = build_rp(kept, args.theiler)
    jrp = joint_rp([word, sem])
    rec = {"file": args.file, "t": traj.t, **_search_fields(radius, search)}
    rec.update(rqa_measures(jrp, **_measure_kw(args)).as_dict(args.percent))
    _measures_out(args, rec)


def cmd_ngram(args) -> None:
    seq = _read_seq(args.file)
    cmp_ = compare_paths(seq)
    uni = build_profile(seq, 1)
    prof = build_profile(seq, args.order)
    ent = ngram_entropy(prof)
    rec = {
        "file": args.file,
        **cmp_.as_dict(),
        "vocabulary": uni.b,
        "chi_square_from_rr": chi_square_from_rr(cmp_.rr_ngram, uni.n, uni.b),
        "chi_square_direct": chi_square_uniform(uni),
        "order": args.order,
        "ngram_types": prof.b,
        "entropy_shannon": ent.shannon,
        "entropy_printed_form": ent.printed_form,
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_profile_csv(prof, fh)
    if args.csv:
        rec = {k: (json.dumps(v) if isinstance(v, dict) else v) for k, v in rec.items()}
    _measures_out(args, rec)


def cmd_genre(args) -> None:
    manifest = load_manifest(args.manifest)
    report = experiments.genre_experiment(
        manifest, (args.slice_start, args.slice_end), args.min_words, args.theiler, args.jobs
    )
    if args.out:
        write_genre_outputs(report, Path(args.out))
    if args.csv:
        rows = [{"label": r.label, "n_docs": r.n_docs, **r.means} for r in report.rows]
        _emit(args, _csv_rows(rows))
    else:
        _emit(args, _json(report.as_dict()))


def write_genre_outputs(report: experiments.GenreReport, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    rows = [{"label": r.label, "n_docs": r.n_docs, **r.means} for r in report.rows]
    (out / "genre_means.csv").write_text(_csv_rows(rows), encoding="utf-8")
    docs = [
        {"doc_id": d.doc_id, "labels": "|".join(d.labels), "n_words": d.n_words, **d.display()}
        for d in report.documents
    ]
    (out / "documents.csv").write_text(_csv_rows(docs) if docs else "", encoding="utf-8")
    skipped = [vars(s) for s in report.skipped]
    (out / "skipped.csv").write_text(
        _csv_rows(skipped) if skipped else "doc_id,path,reason\r\n", encoding="utf-8"
    )
    (out / "dendrogram.nwk").write_text(report.dendrogram.to_newick() + "\n", encoding="utf-8")
    (out / "report.json").write_text(_json(report.as_dict()) + "\n", encoding="utf-8")


def cmd_compress(args) -> None:
    report = experiments.compression_experiment(args.runs, args.samples, args.seed)
    if args.out:
        rows = [{"run": k, "det": a, "ratio": b} for k, (a, b) in enumerate(report.runs)]
        Path(args.out).write_text(_csv_rows(rows), encoding="utf-8")
    if args.csv:
        _emit(args, _csv_rows([report.as_dict()]))
    else:
        _emit(args, _json(report.as_dict()))


def cmd_render(args) -> None:
    if not args.out:
        raise UsageError("render needs --out")
    rp: RecurrencePlot = build_rp(_read_seq(args.file), args.theiler)
    render_rp(rp, args.out, args.format)


COMMANDS = {
    "rqa": cmd_rqa,
    "winrqa": cmd_winrqa,
    "crqa": cmd_crqa,
    "semrqa": cmd_semrqa,
    "jrp": cmd_jrp,
    "ngram": cmd_ngram,
    "genre": cmd_genre,
    "compress-exp": cmd_compress,
    "render": cmd_render,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)
        _coerce(args, parser)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"recurnlp: error: {e}", file=sys.stderr)
        return 2
    except (RecurNLPError, OSError, UnicodeDecodeError, ValueError) as e:
        print(f"recurnlp: error: {e}", file=sys.stderr)
        return 1
    return 0


cli_main = main

if __name__ == "__main__":
    sys.exit(main())
