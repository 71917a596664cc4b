"""
siren-elm: CLI for siren-vs-urban detection with an Extreme Learning Machine.

Prints human-readable tables by default; ``--json`` prints one JSON object
per invocation on stdout for script use.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, NamedTuple

import numpy as np

from . import elm, reports
from .balance import DEFAULT_K_NEIGHBORS, balance_training_set
from .config import setup_logging
from .errors import OutputExistsError, RateMismatchError, SirenElmError, UnsupportedModelError
from .evaluation import (
    DEFAULT_REPEATS,
    DEFAULT_SWEEP,
    DEFAULT_WARMUP,
    MODEL_KINDS,
    ModelParams,
    compare_models,
    crossval,
    feature_summary,
    sweep_neurons,
)
from .feature_store import LabeledDataset, load_features, save_features
from .features import FrameConfig, MelFilterbank, Normalizer, features_from_samples
from .ingest import SAMPLE_RATE, decode_wav, load_dataset, standardize
from .synthetic import write_fixture
from .version_info import __version__ as _PKG_VER

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
N_DEFAULT_SEEDS = 5


class Output(NamedTuple):
    data: dict[str, Any]
    text: str


# ---------------------------------------------------------------------------
# Argument types
# ---------------------------------------------------------------------------


def _int_list(raw: str, minimum: int) -> list[int]:
    try:
        values = [int(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("list must not be empty")
    bad = [v for v in values if v < minimum]
    if bad:
        raise argparse.ArgumentTypeError(f"values must be >= {minimum}, got {bad}")
    return values


def _seed_list(raw: str) -> list[int]:
    values = _int_list(raw, 0)
    if len(set(values)) != len(values):
        raise argparse.ArgumentTypeError(f"seeds must be distinct, got {values}")
    return values


def _size_list(raw: str) -> list[int]:
    return _int_list(raw, 1)


def _nonneg_int(raw: str) -> int:
    try:
        v = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {raw!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {v}")
    return v


def _positive_int(raw: str) -> int:
    try:
        v = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {raw!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg_float(raw: str) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {raw!r}") from None
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"expected a value >= 0, got {raw}")
    return v


def _emit(obj: dict[str, Any], pretty: bool) -> None:
    if pretty:
        print(json.dumps(obj, indent=2, ensure_ascii=False, default=_json_default))
    else:
        print(json.dumps(obj, ensure_ascii=False, separators=(",", ":"), default=_json_default))


def _json_default(v: Any) -> Any:
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, Path):
        return str(v)
    raise TypeError(f"not JSON serializable: {type(v).__name__}")


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    """Validated view of the command line; built before any work starts."""

    command: str
    seed: int = 0
    model: str = "elm"
    hidden: list[int] = field(default_factory=lambda: [elm.DEFAULT_HIDDEN])
    k: int = 5
    seeds: list[int] = field(default_factory=list)
    smote: bool = True
    smote_k: int = DEFAULT_K_NEIGHBORS
    ridge: float | None = None
    activation: str = elm.DEFAULT_ACTIVATION
    warmup: int = DEFAULT_WARMUP
    repeats: int = DEFAULT_REPEATS
    out: Path | None = None

    @classmethod
    def from_args(cls, a: argparse.Namespace, parser: argparse.ArgumentParser) -> "RunConfig":
        cfg = cls(command=a.command, seed=a.seed)
        model = getattr(a, "model", None)
        if model is not None:
            if model not in MODEL_KINDS:
                parser.error(
                    str(UnsupportedModelError(f"unsupported model {model!r}; supported: {', '.join(MODEL_KINDS)}"))
                )
            cfg.model = model
        hidden = getattr(a, "hidden", None)
        k = getattr(a, "k", None)
        ridge = getattr(a, "ridge", None)
        activation = getattr(a, "activation", None)
        if cfg.model == "knn" and (hidden is not None or ridge is not None or activation is not None):
            parser.error("--hidden, --ridge and --activation apply to --model elm only")
        if cfg.model == "elm" and k is not None and a.command == "crossval":
            parser.error("--k applies to --model knn only")
        if hidden is not None:
            cfg.hidden = hidden if isinstance(hidden, list) else [hidden]
        elif a.command == "sweep":
            cfg.hidden = list(DEFAULT_SWEEP)
        if a.command != "sweep" and len(cfg.hidden) != 1:
            parser.error("--hidden takes a single value here (lists are for sweep)")
        if k is not None:
            cfg.k = k
        cfg.ridge = ridge
        cfg.activation = activation or elm.DEFAULT_ACTIVATION
        cfg.smote = not getattr(a, "no_smote", False)
        cfg.smote_k = getattr(a, "smote_k", None) or DEFAULT_K_NEIGHBORS
        cfg.warmup = getattr(a, "warmup", None) if getattr(a, "warmup", None) is not None else DEFAULT_WARMUP
        cfg.repeats = getattr(a, "repeats", None) or DEFAULT_REPEATS
        seeds = getattr(a, "seeds", None)
        if seeds is not None:
            cfg.seeds = seeds
        elif cfg.model == "knn" and a.command == "crossval":
            cfg.seeds = [cfg.seed]
        else:
            cfg.seeds = list(range(cfg.seed, cfg.seed + N_DEFAULT_SEEDS))
        out = getattr(a, "out", None)
        cfg.out = Path(out) if out is not None else None
        return cfg

    def params(self, kind: str | None = None, hidden: int | None = None) -> ModelParams:
        return ModelParams(
            kind=kind or self.model,
            hidden=hidden if hidden is not None else self.hidden[0],
            activation=self.activation,
            ridge=self.ridge,
            k=self.k,
            smote=self.smote,
            smote_k=self.smote_k,
        )


# ---------------------------------------------------------------------------
# Handlers: (RunConfig, args) -> Output
# ---------------------------------------------------------------------------


def _check_output(path: Path, force: bool) -> None:
    if path.exists() and not force:
        raise OutputExistsError(f"{path} already exists; pass --force to overwrite")
    path.parent.mkdir(parents=True, exist_ok=True)


def _h_prepare(cfg: RunConfig, a: argparse.Namespace) -> Output:
    out = Path(a.out)
    _check_output(out, a.force)
    loaded = load_dataset(a.manifest, a.audio_dir)
    ds = LabeledDataset.from_clips(loaded.clips)
    save_features(ds, out)
    counts = ds.counts()
    data = {
        "features": str(out),
        "rows": len(ds),
        "counts": counts,
        "excluded_rows": loaded.excluded,
        "duration_hours": round(loaded.duration_hours, 4),
        "seed": cfg.seed,
    }
    text = (
        f"wrote {len(ds)} feature rows to {out}\n"
        f"  siren: {counts['siren']}  urban: {counts['urban']}  excluded manifest rows: {loaded.excluded}\n"
        f"  audio duration: {loaded.duration_hours:.2f} h\n"
    )
    return Output(data, text)


def _run_dir(cfg: RunConfig) -> Path:
    return reports.new_run_dir(cfg.out or Path("results"))


def _h_crossval(cfg: RunConfig, a: argparse.Namespace) -> Output:
    ds = load_features(a.features)
    report = crossval(ds, cfg.params(), cfg.seeds, warmup=cfg.warmup, repeats=cfg.repeats)
    text = reports.crossval_text(report)
    files = reports.write_report(
        _run_dir(cfg), f"crossval-{cfg.model}", report.to_dict(),
        reports.crossval_rows(report), text, {**report.config, "seed": cfg.seed},
    )
    return Output({"report": report.to_dict(), "files": files, "seed": cfg.seed}, text)


def _h_sweep(cfg: RunConfig, a: argparse.Namespace) -> Output:
    ds = load_features(a.features)
    sweep = sweep_neurons(ds, cfg.hidden, cfg.seeds, cfg.params("elm"), warmup=cfg.warmup, repeats=cfg.repeats)
    text = reports.sweep_text(sweep)
    config = {**sweep.reports[0].config, "hidden": cfg.hidden, "seed": cfg.seed}
    files = reports.write_report(_run_dir(cfg), "sweep", sweep.to_dict(), reports.sweep_rows(sweep), text, config)
    return Output({"report": sweep.to_dict(), "files": files, "seed": cfg.seed}, text)


def _h_compare(cfg: RunConfig, a: argparse.Namespace) -> Output:
    ds = load_features(a.features)
    cmp = compare_models(
        ds, cfg.params("elm"), cfg.params("knn"), cfg.seeds, warmup=cfg.warmup, repeats=cfg.repeats,
    )
    text = reports.compare_text(cmp)
    config = {"elm": cmp.elm.config, "knn": cmp.knn.config, "seed": cfg.seed}
    files = reports.write_report(_run_dir(cfg), "compare", cmp.to_dict(), reports.compare_rows(cmp), text, config)
    return Output({"report": cmp.to_dict(), "files": files, "seed": cfg.seed}, text)


def _h_summary(cfg: RunConfig, a: argparse.Namespace) -> Output:
    ds = load_features(a.features)
    rows = feature_summary(ds)
    text = reports.summary_text(rows)
    config = {"features": str(a.features), "counts": ds.counts(), "seed": cfg.seed}
    files = reports.write_report(_run_dir(cfg), "feature-summary", {"rows": rows}, rows, text, config)
    return Output({"rows": rows, "files": files, "seed": cfg.seed}, text)


def _h_train(cfg: RunConfig, a: argparse.Namespace) -> Output:
    out = Path(a.out)
    _check_output(out, a.force)
    ds = load_features(a.features)
    normalizer = Normalizer.fit(ds.X)
    X, y = normalizer.apply(ds.X), ds.y
    if cfg.smote:
        X, y = balance_training_set(X, y, cfg.seed, k_neighbors=cfg.smote_k)
    model = elm.train(
        X, y, elm.ElmConfig(cfg.hidden[0], cfg.activation, cfg.ridge, cfg.seed),
        normalizer=normalizer, label_names=ds.label_names,
    )
    elm.save_model(model, out)
    train_acc = 100.0 * float(np.mean(elm.predict_batch(model, ds.X) == ds.y))
    data = {
        "model": str(out),
        "hidden": model.hidden_nodes,
        "activation": model.activation,
        "ridge": cfg.ridge,
        "smote": cfg.smote,
        "train_rows": int(X.shape[0]),
        "train_accuracy": train_acc,
        "seed": cfg.seed,
    }
    text = (
        f"saved ELM (L={model.hidden_nodes}, {model.activation}) to {out}\n"
        f"  trained on {X.shape[0]} rows, accuracy on the original rows: {train_acc:.2f}%\n"
    )
    return Output(data, text)


def _h_predict(cfg: RunConfig, a: argparse.Namespace) -> Output:
    model = elm.load_model(a.model_file)
    wav = decode_wav(a.wav)
    if wav.sample_rate != SAMPLE_RATE:
        raise RateMismatchError(f"{a.wav}: sample rate {wav.sample_rate} Hz, expected {SAMPLE_RATE} Hz")
    samples = standardize(wav)
    features = features_from_samples(samples, FrameConfig(), MelFilterbank.build())
    label, scores = elm.predict(model, features.values)
    name = model.label_names[label]
    data = {
        "wav": str(a.wav),
        "label": name,
        "scores": {n: float(s) for n, s in zip(model.label_names, scores)},
        "seed": model.seed,
    }
    text = f"{name}  " + "  ".join(f"{n}={s:.4f}" for n, s in zip(model.label_names, scores)) + "\n"
    return Output(data, text)


def _h_synth(cfg: RunConfig, a: argparse.Namespace) -> Output:
    out = Path(a.out)
    if out.exists() and any(out.iterdir()) and not a.force:
        raise OutputExistsError(f"{out} is not empty; pass --force to write into it")
    manifest = write_fixture(out, a.n_siren, a.n_urban, cfg.seed, n_excluded=a.n_excluded)
    data = {
        "manifest": str(manifest),
        "audio_dir": str(out / "audio"),
        "siren": a.n_siren,
        "urban": a.n_urban,
        "excluded": a.n_excluded,
        "seed": cfg.seed,
    }
    text = (
        f"wrote {a.n_siren} siren + {a.n_urban} urban clips\n"
        f"  manifest:  {manifest}\n  audio dir: {out / 'audio'}\n"
    )
    return Output(data, text)


def _h_version(cfg: RunConfig, _a: argparse.Namespace) -> Output:
    return Output({"cli": "siren-elm", "package_version": _PKG_VER, "seed": cfg.seed}, f"siren-elm {_PKG_VER}\n")


# ---------------------------------------------------------------------------
# Build CLI
# ---------------------------------------------------------------------------

GLOBAL_EPILOG = """
Environment (optional):
  SIREN_ELM_THREADS     Cap on worker threads for decoding / feature extraction.
  SIREN_ELM_LOG_LEVEL   DEBUG | INFO | WARNING | ERROR (default WARNING).
  SIREN_ELM_LOG_FILE    Also write logs to this file (rotating).

Global flags (--json, --pretty, --seed, -v) work before OR after the subcommand.

Exit codes: 0 success, 1 runtime error, 2 usage error.
With --json, stdout is one object: {"success": true, "data": ...} or
{"success": false, "error": "...", "code": "..."}.

Typical workflow:
  siren-elm prepare --manifest ESC-50/meta/esc50.csv --audio-dir ESC-50/audio --out features.csv
  siren-elm crossval --features features.csv --model elm --hidden 10
  siren-elm crossval --features features.csv --model knn --k 5
  siren-elm sweep --features features.csv --hidden 10,100,1000,10000
  siren-elm train --features features.csv --out siren.elmm
  siren-elm predict --model-file siren.elmm --wav clip.wav

No dataset at hand:
  siren-elm synth --out fixture
  siren-elm prepare --manifest fixture/meta/esc50.csv --audio-dir fixture/audio --out fixture.csv
"""


def _global_options_parent() -> argparse.ArgumentParser:
    """Shared --json / --pretty / --seed / -v on root and every subparser (either order)."""
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument(
        "--json",
        action="store_true",
        default=argparse.SUPPRESS,
        help="Print one JSON object instead of text tables.",
    )
    p.add_argument(
        "--pretty",
        action="store_true",
        default=argparse.SUPPRESS,
        help="Pretty-print JSON (implies --json).",
    )
    p.add_argument(
        "--seed",
        type=_nonneg_int,
        default=argparse.SUPPRESS,
        help="Base RNG seed (default 0). Evaluation seeds default to seed..seed+4.",
    )
    p.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=argparse.SUPPRESS,
        help="Log progress to stderr (-v INFO, -vv DEBUG).",
    )
    return p


def _add_features(p: argparse.ArgumentParser) -> None:
    p.add_argument("--features", required=True, help="Feature file from `prepare` (.csv or .selm).")


def _add_eval_options(p: argparse.ArgumentParser, *, with_seeds: bool = True) -> None:
    if with_seeds:
        p.add_argument("--seeds", type=_seed_list, default=None, help="Comma-separated seeds, e.g. 0,1,2,3,4.")
    p.add_argument("--no-smote", action="store_true", help="Skip SMOTE balancing of the training split.")
    p.add_argument("--smote-k", type=_positive_int, default=None, help="SMOTE neighbours (default 5).")
    p.add_argument("--warmup", type=_nonneg_int, default=None, help=f"Untimed warmup runs (default {DEFAULT_WARMUP}).")
    p.add_argument("--repeats", type=_positive_int, default=None, help=f"Timed runs (default {DEFAULT_REPEATS}).")
    p.add_argument("--out", default=None, help="Results directory (default ./results).")


def _add_elm_options(p: argparse.ArgumentParser, *, hidden_list: bool = False) -> None:
    if hidden_list:
        p.add_argument(
            "--hidden", type=_size_list, default=None,
            help="Comma-separated hidden-layer sizes (default 10,100,1000,10000).",
        )
    else:
        p.add_argument("--hidden", type=_positive_int, default=None, help="Hidden nodes L (default 10).")
    p.add_argument("--ridge", type=_nonneg_float, default=None, help="Ridge weight lambda (default: pure pseudoinverse).")
    p.add_argument(
        "--activation", choices=sorted(elm.ACTIVATIONS), default=None, help="Hidden activation (default sigmoid).",
    )


def build_parser() -> argparse.ArgumentParser:
    common = _global_options_parent()
    parser = argparse.ArgumentParser(
        prog="siren-elm",
        parents=[common],
        description=(
            "Siren-vs-urban audio detection: MFCC/ZCR features, SMOTE balancing, "
            "Extreme Learning Machine and KNN baseline, 5-fold ESC-50 evaluation."
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=GLOBAL_EPILOG,
    )

    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def subcmd(
        name: str,
        *,
        help_text: str,
        desc: str,
        epilog: str,
        handler: Callable[[RunConfig, argparse.Namespace], Output],
    ) -> argparse.ArgumentParser:
        sp = sub.add_parser(
            name,
            parents=[common],
            help=help_text,
            description=desc,
            epilog=epilog,
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        sp.set_defaults(_handler=handler)
        return sp

    p = subcmd(
        "prepare",
        help_text="Decode the dataset and write the feature file",
        desc=(
            "Load the siren / urban rows of an ESC-50 manifest, standardize clips to 5 s "
            "at 44.1 kHz, and write 28 features per clip with label and fold columns."
        ),
        epilog=(
            "Example:\n"
            "  siren-elm prepare --manifest ESC-50/meta/esc50.csv --audio-dir ESC-50/audio --out features.csv\n"
            "  siren-elm prepare --manifest ESC-50/meta/esc50.csv --audio-dir ESC-50/audio --out features.selm"
        ),
        handler=_h_prepare,
    )
    p.add_argument("--manifest", required=True, help="ESC-50 meta/esc50.csv (filename, fold, category).")
    p.add_argument("--audio-dir", required=True, help="Directory holding the WAV files.")
    p.add_argument("--out", required=True, help="Feature file; .selm/.bin = binary, anything else = CSV.")
    p.add_argument("--force", action="store_true", help="Overwrite an existing feature file.")

    p = subcmd(
        "crossval",
        help_text="5-fold accuracy and run-time for one model",
        desc="Cross-validate on the predefined folds; per-fold accuracy, confusion and median run-time.",
        epilog=(
            "Example:\n"
            "  siren-elm crossval --features features.csv --model elm --hidden 10\n"
            "  siren-elm crossval --features features.csv --model knn --k 5\n"
            "  siren-elm crossval --features features.csv --model elm --ridge 1000 --json"
        ),
        handler=_h_crossval,
    )
    _add_features(p)
    p.add_argument("--model", default="elm", help=f"Model kind: {', '.join(MODEL_KINDS)} (default elm).")
    _add_elm_options(p)
    p.add_argument("--k", type=_positive_int, default=None, help="KNN neighbours (default 5).")
    _add_eval_options(p)

    p = subcmd(
        "sweep",
        help_text="ELM accuracy and run-time versus hidden-layer size",
        desc="Cross-validate the ELM for each hidden-layer size.",
        epilog=(
            "Example:\n"
            "  siren-elm sweep --features features.csv\n"
            "  siren-elm sweep --features features.csv --hidden 10,100 --seeds 0"
        ),
        handler=_h_sweep,
    )
    _add_features(p)
    _add_elm_options(p, hidden_list=True)
    _add_eval_options(p)

    p = subcmd(
        "compare",
        help_text="ELM vs KNN on identical splits (accuracy and run-time ratio)",
        desc="Run both models on the same folds, seeds and balanced training sets.",
        epilog="Example:\n  siren-elm compare --features features.csv --hidden 10 --k 5",
        handler=_h_compare,
    )
    _add_features(p)
    _add_elm_options(p)
    p.add_argument("--k", type=_positive_int, default=None, help="KNN neighbours (default 5).")
    _add_eval_options(p)

    p = subcmd(
        "summary",
        help_text="Per-class mean / std of every feature",
        desc="Write per-class feature statistics (CSV, JSON and a text table).",
        epilog="Example:\n  siren-elm summary --features features.csv --out results",
        handler=_h_summary,
    )
    _add_features(p)
    p.add_argument("--out", default=None, help="Results directory (default ./results).")

    p = subcmd(
        "train",
        help_text="Train an ELM on all features and save the model file",
        desc="Normalize, SMOTE-balance and train on every row; writes a model file for `predict`.",
        epilog="Example:\n  siren-elm train --features features.csv --hidden 10 --seed 0 --out siren.elmm",
        handler=_h_train,
    )
    _add_features(p)
    _add_elm_options(p)
    p.add_argument("--no-smote", action="store_true", help="Skip SMOTE balancing.")
    p.add_argument("--smote-k", type=_positive_int, default=None, help="SMOTE neighbours (default 5).")
    p.add_argument("--out", required=True, help="Model file to write.")
    p.add_argument("--force", action="store_true", help="Overwrite an existing model file.")

    p = subcmd(
        "predict",
        help_text="Classify one WAV file",
        desc="Print `siren` or `urban` and both scores for a 44.1 kHz WAV file.",
        epilog=(
            "Example:\n"
            "  siren-elm predict --model-file siren.elmm --wav clip.wav\n"
            "  siren-elm predict --model-file siren.elmm --wav clip.wav --json"
        ),
        handler=_h_predict,
    )
    p.add_argument("--model-file", required=True, help="Model file from `train`.")
    p.add_argument("--wav", required=True, help="WAV file (PCM16 or float32, 44.1 kHz).")

    p = subcmd(
        "synth",
        help_text="Write a synthetic siren / noise fixture in ESC-50 layout",
        desc="Generate two-tone sweep 'sirens' and noise 'urban' clips plus meta/esc50.csv.",
        epilog="Example:\n  siren-elm synth --out fixture --n-siren 40 --n-urban 640",
        handler=_h_synth,
    )
    p.add_argument("--out", required=True, help="Output directory.")
    p.add_argument("--n-siren", type=_positive_int, default=40, help="Siren clips (default 40).")
    p.add_argument("--n-urban", type=_positive_int, default=640, help="Urban clips (default 640).")
    p.add_argument("--n-excluded", type=int, default=0, help="Extra out-of-scope manifest rows (default 0).")
    p.add_argument("--force", action="store_true", help="Write into a non-empty directory.")

    subcmd(
        "version",
        help_text="Print package version",
        desc="Print the siren-elm version.",
        epilog="Example:\n  siren-elm version --json",
        handler=_h_version,
    )

    return parser


def _log_level(verbose: int) -> int | None:
    if verbose >= 2:
        return logging.DEBUG
    if verbose == 1:
        return logging.INFO
    return None


def main(argv: list[str] | None = None) -> int:
    argv = argv if argv is not None else sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("json", False), ("pretty", False), ("seed", 0), ("verbose", 0)):
        if not hasattr(args, name):
            setattr(args, name, default)
    as_json = args.json or args.pretty
    setup_logging(_log_level(args.verbose))

    cfg = RunConfig.from_args(args, parser)
    try:
        out = args._handler(cfg, args)
    except SirenElmError as e:
        log.debug("command failed", exc_info=True)
        return _fail(e.to_envelope(), as_json, args.pretty)
    except OSError as e:
        return _fail({"success": False, "error": str(e), "code": "IO_ERROR"}, as_json, args.pretty)

    if as_json:
        _emit({"success": True, "data": out.data}, args.pretty)
    else:
        sys.stdout.write(out.text)
    return EXIT_OK


def _fail(envelope: dict[str, Any], as_json: bool, pretty: bool) -> int:
    if as_json:
        _emit(envelope, pretty)
    else:
        print(f"error [{envelope['code']}]: {envelope['error']}", file=sys.stderr)
    return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
