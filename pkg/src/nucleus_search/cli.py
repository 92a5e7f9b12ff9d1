"""Command-line harness: decode, train-ngram, sweep, oracle-check, analyze-ranks.

Output files are JSON Lines with a fixed field order and floats rounded to
six decimal places, so identical commands over identical files produce
byte-identical outputs (records are ordered by instance id, never by
completion order).  Exit codes: 0 success, 1 usage error, 2 data error,
3 search failure.  Fatal errors print one machine-readable JSON record to
stderr; per-instance failures become error records in the output file while
the remaining instances are still processed.
"""

from __future__ import annotations

import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Tuple

import click

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import (
    EmptyCorpus,
    InvalidConfig,
    InvalidDistribution,
    InvalidThreshold,
    InvalidTokenId,
    MisplacedEos,
    MissingTrace,
    ModelFormatError,
    NoFinishedHypothesis,
    SpaceTooLarge,
    UnknownContext,
)
from .models import load_model, random_model, save_model, train_ngram
from .oracle import exhaustive_best
from .rerank import rerank
from .search import SearchConfig, analyze_max_rank, p_exact_search, run_search

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SEARCH = 3

_DATA_ERRORS = (
    ModelFormatError,
    UnknownContext,
    InvalidTokenId,
    MisplacedEos,
    InvalidDistribution,
    MissingTrace,
    EmptyCorpus,
    SpaceTooLarge,
)

# Field order for decode records; changing it would break byte-compatibility.
_DECODE_DEFAULTS = {
    "model": None,
    "input": None,
    "output": None,
    "algorithm": None,
    "k": None,
    "p": None,
    "candidate_cap": 320,
    "k_cap": None,
    "max_steps": 200,
    "scoring": "original",
    "on_unfinished": "error",
    "trace": False,
    "rerank": False,
    "jobs": 1,
}


def _round6(value: float) -> float:
    """Fix floats to six decimal places for byte-stable output."""
    if value is None or not math.isfinite(value):
        return value
    return float(f"{value:.6f}")


def _dumps(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False)


def _fail(code: int, err_type: str, message: str, **extra) -> int:
    payload = {"error": {"type": err_type, "message": message, **extra}}
    click.echo(_dumps(payload), err=True)
    return code


def _load_toml(path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _read_instances(path) -> List[dict]:
    instances = []
    seen = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ModelFormatError(f"{path}:{lineno}: not valid JSON ({exc})") from exc
            if not isinstance(row, dict) or not isinstance(row.get("id"), str):
                raise ModelFormatError(f"{path}:{lineno}: every instance needs a string 'id'")
            if row["id"] in seen:
                raise ModelFormatError(f"{path}:{lineno}: duplicate instance id {row['id']!r}")
            seen.add(row["id"])
            context = row.get("context", "")
            if not isinstance(context, str):
                raise ModelFormatError(f"{path}:{lineno}: 'context' must be a string")
            instances.append({"id": row["id"], "context": context})
    return instances


def _params_echo(cfg: SearchConfig, rerank_flag: bool) -> dict:
    return {
        "algorithm": cfg.algorithm,
        "k": cfg.k,
        "p": cfg.p,
        "candidate_cap": cfg.candidate_cap,
        "k_cap": cfg.k_cap,
        "max_steps": cfg.max_steps,
        "scoring": cfg.scoring,
        "on_unfinished": cfg.on_unfinished,
        "rerank": rerank_flag,
    }


def _decode_instance(model, cfg, instance, trace_flag, rerank_flag, params) -> Tuple[dict, Optional[str]]:
    """Returns (record, failure class); failure class None on success."""
    try:
        result = run_search(model, instance["context"], cfg)
    except NoFinishedHypothesis as exc:
        record = {
            "id": instance["id"],
            "error": {"type": type(exc).__name__, "message": str(exc)},
            "params": params,
        }
        return record, "search"
    except _DATA_ERRORS as exc:
        record = {
            "id": instance["id"],
            "error": {"type": type(exc).__name__, "message": str(exc)},
            "params": params,
        }
        return record, "data"
    top = result.finished[0]
    norm_score = None
    if rerank_flag and not result.unfinished_flag:
        reranked = rerank(result)
        top = reranked.hypotheses[0]
        norm_score = reranked.scores[0]
    record = {
        "id": instance["id"],
        "tokens": list(model.vocabulary.to_tokens(top.tokens)),
        "logprob": _round6(top.cum_logprob),
    }
    if norm_score is not None:
        record["norm_score"] = _round6(norm_score)
    if result.unfinished_flag:
        record["unfinished"] = True
    if trace_flag:
        record["trace"] = {
            "widths": [s.width for s in result.trace],
            "ranks": list(top.rank_history),
            "pool_sizes": [s.pool_size for s in result.trace],
        }
    record["params"] = params
    return record, None


def _run_batch(model, cfg, instances, trace_flag, rerank_flag, jobs) -> Tuple[List[dict], Dict[str, int]]:
    params = _params_echo(cfg, rerank_flag)
    failures = {"data": 0, "search": 0}

    def work(instance):
        return _decode_instance(model, cfg, instance, trace_flag, rerank_flag, params)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(work, instances))
    else:
        outcomes = [work(inst) for inst in instances]
    for _, failure in outcomes:
        if failure:
            failures[failure] += 1
    records = sorted((rec for rec, _ in outcomes), key=lambda r: r["id"])
    return records, failures


def _write_jsonl(path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(_dumps(record))
            fh.write("\n")


def _batch_exit(failures: Dict[str, int]) -> int:
    if failures["data"]:
        return EXIT_DATA
    if failures["search"]:
        return EXIT_SEARCH
    return EXIT_OK


@click.group(name="nucleus-search")
def cli():
    """Deterministic decoding harness for autoregressive models."""


@cli.command("decode")
@click.option("--model", "model_path", type=str, default=None, help="Model JSON file.")
@click.option("--input", "input_path", type=str, default=None, help="Instances JSONL file.")
@click.option("--output", "output_path", type=str, default=None, help="Output JSONL file.")
@click.option("--algorithm", type=click.Choice(["beam", "p_exact", "dynamic"]), default=None)
@click.option("--k", type=int, default=None, help="Beam width (beam search only).")
@click.option("--p", type=float, default=None, help="Nucleus threshold (p_exact/dynamic).")
@click.option("--candidate-cap", type=int, default=None, help="Candidates kept per expansion wave.")
@click.option("--k-cap", type=int, default=None, help="Optional width bound (p_exact/dynamic).")
@click.option("--max-steps", type=int, default=None, help="Maximum generated length, EOS included.")
@click.option("--scoring", type=click.Choice(["original", "renormalized"]), default=None)
@click.option("--on-unfinished", type=click.Choice(["error", "return_flagged"]), default=None)
@click.option("--trace/--no-trace", "trace_flag", default=None, help="Record per-step search traces.")
@click.option("--rerank/--no-rerank", "rerank_flag", default=None, help="Rerank by length-normalized score.")
@click.option("--jobs", type=int, default=None, help="Instances decoded concurrently.")
@click.option("--config", "config_path", type=str, default=None, help="TOML run file; flags override it.")
@click.option("--print-config", is_flag=True, help="Print the effective configuration and exit.")
@click.pass_context
def cmd_decode(ctx, model_path, input_path, output_path, algorithm, k, p, candidate_cap,
               k_cap, max_steps, scoring, on_unfinished, trace_flag, rerank_flag, jobs,
               config_path, print_config):
    """Decode every instance in a JSONL file with one search configuration."""
    effective = dict(_DECODE_DEFAULTS)
    if config_path is not None:
        try:
            data = _load_toml(config_path)
        except FileNotFoundError:
            return _fail(EXIT_DATA, "ModelNotFound", f"run file not found: {config_path}", path=config_path)
        except tomllib.TOMLDecodeError as exc:
            return _fail(EXIT_DATA, "ModelFormatError", f"{config_path}: {exc}")
        unknown = set(data) - set(_DECODE_DEFAULTS)
        if unknown:
            return _fail(EXIT_USAGE, "InvalidConfig", f"unknown run-file keys: {sorted(unknown)}")
        effective.update(data)
    flag_values = {
        "model": model_path, "input": input_path, "output": output_path,
        "algorithm": algorithm, "k": k, "p": p, "candidate_cap": candidate_cap,
        "k_cap": k_cap, "max_steps": max_steps, "scoring": scoring,
        "on_unfinished": on_unfinished, "trace": trace_flag, "rerank": rerank_flag,
        "jobs": jobs,
    }
    param_names = {
        "model": "model_path", "input": "input_path", "output": "output_path",
        "trace": "trace_flag", "rerank": "rerank_flag",
    }
    for name, value in flag_values.items():
        source = ctx.get_parameter_source(param_names.get(name, name))
        if source is not None and source.name == "COMMANDLINE":
            effective[name] = value
    if print_config:
        click.echo(json.dumps(effective, indent=2))
        return EXIT_OK
    for required in ("model", "input", "output", "algorithm"):
        if effective[required] is None:
            return _fail(EXIT_USAGE, "InvalidConfig", f"--{required} is required")
    if not isinstance(effective["jobs"], int) or effective["jobs"] < 1:
        return _fail(EXIT_USAGE, "InvalidConfig", "--jobs must be a positive integer")
    try:
        cfg = SearchConfig(
            algorithm=effective["algorithm"],
            k=effective["k"],
            p=effective["p"],
            candidate_cap=effective["candidate_cap"],
            k_cap=effective["k_cap"],
            max_steps=effective["max_steps"],
            scoring=effective["scoring"],
            on_unfinished=effective["on_unfinished"],
        )
    except (InvalidConfig, InvalidThreshold) as exc:
        return _fail(EXIT_USAGE, type(exc).__name__, str(exc))
    try:
        model = load_model(effective["model"])
    except FileNotFoundError:
        return _fail(EXIT_DATA, "ModelNotFound", f"model file not found: {effective['model']}",
                     path=effective["model"])
    except ModelFormatError as exc:
        return _fail(EXIT_DATA, "ModelFormatError", str(exc))
    try:
        instances = _read_instances(effective["input"])
    except FileNotFoundError:
        return _fail(EXIT_DATA, "ModelNotFound", f"input file not found: {effective['input']}",
                     path=effective["input"])
    except ModelFormatError as exc:
        return _fail(EXIT_DATA, "ModelFormatError", str(exc))
    records, failures = _run_batch(
        model, cfg, instances, bool(effective["trace"]), bool(effective["rerank"]), effective["jobs"]
    )
    _write_jsonl(effective["output"], records)
    return _batch_exit(failures)


@cli.command("train-ngram")
@click.option("--corpus", "corpus_path", type=str, required=True, help="Text file, one sequence per line.")
@click.option("--order", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--add-k", type=float, default=1.0, show_default=True, help="Additive smoothing constant.")
@click.option("--output", "output_path", type=str, required=True, help="Model JSON file to write.")
def cmd_train_ngram(corpus_path, order, add_k, output_path):
    """Count n-grams from a text corpus and write a model file."""
    if not add_k > 0:
        return _fail(EXIT_USAGE, "InvalidConfig", "--add-k must be > 0")
    try:
        with open(corpus_path, "r", encoding="utf-8") as fh:
            model = train_ngram(fh, order=order, add_k=add_k)
    except FileNotFoundError:
        return _fail(EXIT_DATA, "ModelNotFound", f"corpus file not found: {corpus_path}", path=corpus_path)
    except (EmptyCorpus, ModelFormatError) as exc:
        return _fail(EXIT_DATA, type(exc).__name__, str(exc))
    save_model(model, output_path)
    click.echo(
        f"trained order-{order} model: {len(model.vocabulary)} tokens, "
        f"{len(model.counts)} histories -> {output_path}"
    )
    return EXIT_OK


def _cell_id(cfg: SearchConfig) -> str:
    parts = [cfg.algorithm]
    if cfg.k is not None:
        parts.append(f"k{cfg.k}")
    if cfg.p is not None:
        parts.append(f"p{cfg.p:g}")
    if cfg.k_cap is not None:
        parts.append(f"kcap{cfg.k_cap}")
    if cfg.candidate_cap != _DECODE_DEFAULTS["candidate_cap"]:
        parts.append(f"cap{cfg.candidate_cap}")
    if cfg.max_steps != _DECODE_DEFAULTS["max_steps"]:
        parts.append(f"steps{cfg.max_steps}")
    if cfg.scoring != "original":
        parts.append(cfg.scoring)
    if cfg.on_unfinished != "error":
        parts.append("flagged")
    return "_".join(parts)


def _expand_grid(grid: dict) -> List[SearchConfig]:
    cells_raw = grid.get("cell")
    if not isinstance(cells_raw, list) or not cells_raw:
        raise ModelFormatError("grid file must define at least one [[cell]] table")
    configs: List[SearchConfig] = []
    for index, cell in enumerate(cells_raw):
        if not isinstance(cell, dict):
            raise ModelFormatError(f"cell #{index + 1} is not a table")
        unknown = set(cell) - {"algorithm", "k", "p", "candidate_cap", "k_cap",
                               "max_steps", "scoring", "on_unfinished"}
        if unknown:
            raise ModelFormatError(f"cell #{index + 1} has unknown keys: {sorted(unknown)}")
        ks = cell.get("k")
        ps = cell.get("p")
        k_caps = cell.get("k_cap")
        k_values = ks if isinstance(ks, list) else [ks]
        p_values = ps if isinstance(ps, list) else [ps]
        k_cap_values = k_caps if isinstance(k_caps, list) else [k_caps]
        for k_value in k_values:
            for p_value in p_values:
                for k_cap_value in k_cap_values:
                    kwargs = {key: cell[key] for key in
                              ("candidate_cap", "max_steps", "scoring", "on_unfinished")
                              if key in cell}
                    if k_cap_value is not None:
                        kwargs["k_cap"] = k_cap_value
                    try:
                        configs.append(SearchConfig(
                            algorithm=cell.get("algorithm"), k=k_value, p=p_value, **kwargs))
                    except (InvalidConfig, InvalidThreshold) as exc:
                        raise ModelFormatError(f"cell #{index + 1}: {exc}") from exc
    ids = [_cell_id(cfg) for cfg in configs]
    duplicates = {i for i in ids if ids.count(i) > 1}
    if duplicates:
        raise ModelFormatError(f"grid expands to duplicate cells: {sorted(duplicates)}")
    return configs


@cli.command("sweep")
@click.option("--model", "model_path", type=str, required=True)
@click.option("--grid", "grid_path", type=str, required=True, help="TOML grid of search configurations.")
@click.option("--input", "input_path", type=str, required=True)
@click.option("--output-dir", "output_dir", type=str, required=True)
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True)
def cmd_sweep(model_path, grid_path, input_path, output_dir, jobs):
    """Decode the same instances under every configuration in a grid.

    Writes one JSONL file per cell plus summary.json with per-cell mean
    cumulative log probability, mean length, and failure counts.
    """
    import os

    try:
        grid = _load_toml(grid_path)
    except FileNotFoundError:
        return _fail(EXIT_DATA, "ModelNotFound", f"grid file not found: {grid_path}", path=grid_path)
    except tomllib.TOMLDecodeError as exc:
        return _fail(EXIT_DATA, "ModelFormatError", f"{grid_path}: {exc}")
    try:
        configs = _expand_grid(grid)
    except ModelFormatError as exc:
        return _fail(EXIT_DATA, "ModelFormatError", str(exc))
    try:
        model = load_model(model_path)
    except FileNotFoundError:
        return _fail(EXIT_DATA, "ModelNotFound", f"model file not found: {model_path}", path=model_path)
    except ModelFormatError as exc:
        return _fail(EXIT_DATA, "ModelFormatError", str(exc))
    try:
        instances = _read_instances(input_path)
    except FileNotFoundError:
        return _fail(EXIT_DATA, "ModelNotFound", f"input file not found: {input_path}", path=input_path)
    except ModelFormatError as exc:
        return _fail(EXIT_DATA, "ModelFormatError", str(exc))
    os.makedirs(output_dir, exist_ok=True)

    summary = []
    worst = {"data": 0, "search": 0}
    for cfg in configs:
        cell = _cell_id(cfg)
        records, failures = _run_batch(model, cfg, instances, True, False, jobs)
        _write_jsonl(os.path.join(output_dir, f"{cell}.jsonl"), records)
        decoded = [r for r in records if "error" not in r]
        logprobs = [r["logprob"] for r in decoded]
        lengths = [len(r["tokens"]) for r in decoded]
        summary.append({
            "cell": cell,
            "algorithm": cfg.algorithm,
            "params": _params_echo(cfg, False),
            "instances": len(instances),
            "decoded": len(decoded),
            "failures": failures["data"] + failures["search"],
            "unfinished": sum(1 for r in decoded if r.get("unfinished")),
            "mean_logprob": _round6(sum(logprobs) / len(logprobs)) if logprobs else None,
            "mean_length": _round6(sum(lengths) / len(lengths)) if lengths else None,
        })
        worst["data"] += failures["data"]
        worst["search"] += failures["search"]
    with open(os.path.join(output_dir, "summary.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    click.echo(f"{'cell':<40} {'decoded':>8} {'failures':>9} {'mean_logprob':>13} {'mean_length':>12}")
    for row in summary:
        mean_lp = "-" if row["mean_logprob"] is None else f"{row['mean_logprob']:.6f}"
        mean_len = "-" if row["mean_length"] is None else f"{row['mean_length']:.6f}"
        click.echo(f"{row['cell']:<40} {row['decoded']:>8} {row['failures']:>9} {mean_lp:>13} {mean_len:>12}")
    return _batch_exit(worst)


@cli.command("oracle-check")
@click.option("--model", "model_path", type=str, default=None,
              help="Check one model file instead of the seeded random suite.")
@click.option("--p", "p_values", type=float, multiple=True,
              default=(0.3, 0.5, 0.7, 0.9), show_default=True)
@click.option("--max-len", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--models", "model_count", type=click.IntRange(min=1), default=200, show_default=True,
              help="Number of seeded random models in the suite.")
@click.option("--max-prefix-len", type=click.IntRange(min=1), default=4, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--candidate-cap", type=click.IntRange(min=1), default=1_000_000, show_default=True)
@click.option("--scoring", type=click.Choice(["original", "renormalized", "both"]),
              default="both", show_default=True)
@click.option("--report", "report_path", type=str, default=None, help="Write the full report as JSON.")
def cmd_oracle_check(model_path, p_values, max_len, model_count, max_prefix_len, seed,
                     candidate_cap, scoring, report_path):
    """Compare p_exact search against brute-force enumeration, case by case.

    A mismatch means the search (as configured) is not exact; with the
    default uncapped frontier every case should pass.
    """
    modes = ("original", "renormalized") if scoring == "both" else (scoring,)
    cases = []
    if model_path is not None:
        try:
            named_models = [(model_path, load_model(model_path))]
        except FileNotFoundError:
            return _fail(EXIT_DATA, "ModelNotFound", f"model file not found: {model_path}", path=model_path)
        except ModelFormatError as exc:
            return _fail(EXIT_DATA, "ModelFormatError", str(exc))
    else:
        named_models = []
        for i in range(model_count):
            vocab_size = 3 + (i % 4)
            named_models.append(
                (f"seed{seed + i}_v{vocab_size}", random_model(seed + i, vocab_size, max_prefix_len))
            )
    failures = 0
    errors = 0
    for name, model in named_models:
        for p in p_values:
            for mode in modes:
                case = {"case": name, "p": p, "scoring": mode}
                try:
                    expected = exhaustive_best(model, "", p, max_len, scoring=mode)
                    cfg = SearchConfig.p_exact(
                        p=p, candidate_cap=candidate_cap, max_steps=max_len, scoring=mode)
                    try:
                        found = p_exact_search(model, "", cfg).finished[0]
                    except NoFinishedHypothesis:
                        found = None
                except (SpaceTooLarge, InvalidThreshold) as exc:
                    case["status"] = "error"
                    case["detail"] = f"{type(exc).__name__}: {exc}"
                    errors += 1
                    cases.append(case)
                    continue
                if expected is None and found is None:
                    case["status"] = "pass"
                    case["detail"] = "both empty"
                elif expected is None or found is None:
                    case["status"] = "mismatch"
                    case["detail"] = (
                        f"oracle={'none' if expected is None else list(expected.tokens)} "
                        f"search={'none' if found is None else list(found.tokens)}"
                    )
                    failures += 1
                elif expected.tokens == found.tokens and abs(expected.cum_logprob - found.cum_logprob) <= 1e-12:
                    case["status"] = "pass"
                    case["detail"] = f"logprob={found.cum_logprob:.6f}"
                else:
                    case["status"] = "mismatch"
                    case["detail"] = (
                        f"oracle={list(expected.tokens)}@{expected.cum_logprob!r} "
                        f"search={list(found.tokens)}@{found.cum_logprob!r}"
                    )
                    failures += 1
                cases.append(case)
    for case in cases:
        click.echo(f"{case['status']:>8}  {case['case']} p={case['p']:g} scoring={case['scoring']}"
                   f"  {case['detail']}")
    verdict = "all-pass" if failures == 0 and errors == 0 else f"{failures} mismatches, {errors} errors"
    click.echo(f"oracle-check: {len(cases)} cases, {verdict}")
    if report_path is not None:
        with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump({"cases": cases, "mismatches": failures, "errors": errors}, fh, indent=2)
            fh.write("\n")
    if failures:
        return EXIT_SEARCH
    if errors:
        return EXIT_DATA
    return EXIT_OK


@cli.command("analyze-ranks")
@click.option("--input", "input_path", type=str, required=True,
              help="Decode output JSONL written with --trace.")
@click.option("--threshold", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--output", "output_path", type=str, default=None, help="Write the report as JSON.")
def cmd_analyze_ranks(input_path, threshold, output_path):
    """Partition decoded instances by the worst rank their output survived."""
    ranks_by_id = {}
    skipped = 0
    try:
        with open(input_path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    return _fail(EXIT_DATA, "ModelFormatError", f"{input_path}:{lineno}: {exc}")
                if "error" in row:
                    skipped += 1
                    continue
                trace = row.get("trace")
                if not isinstance(trace, dict) or "ranks" not in trace:
                    return _fail(EXIT_DATA, "MissingTrace",
                                 f"{input_path}:{lineno}: record has no trace.ranks "
                                 f"(decode with --trace)")
                ranks_by_id[row["id"]] = trace["ranks"]
    except FileNotFoundError:
        return _fail(EXIT_DATA, "ModelNotFound", f"input file not found: {input_path}", path=input_path)
    report = analyze_max_rank(ranks_by_id, threshold)
    payload = {
        "threshold": report.threshold,
        "within_count": len(report.within),
        "beyond_count": len(report.beyond),
        "skipped": skipped,
        "within": list(report.within),
        "beyond": list(report.beyond),
        "max_rank_by_id": {i: report.max_rank_by_id[i] for i in sorted(report.max_rank_by_id)},
    }
    click.echo(f"max-rank threshold {report.threshold}: "
               f"{len(report.within)} within, {len(report.beyond)} beyond, {skipped} skipped")
    if output_path is not None:
        with open(output_path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def main(argv=None) -> None:
    """Entry point mapping exceptions to the documented exit codes."""
    try:
        code = cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        code = exc.exit_code
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        code = EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        code = EXIT_DATA if isinstance(exc, click.FileError) else EXIT_USAGE
    sys.exit(code if isinstance(code, int) else EXIT_OK)


if __name__ == "__main__":
    main()
