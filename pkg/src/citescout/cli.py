"""Operator entry points.

Subcommands: index (build a local search index), ask (ground one excerpt,
optionally steering between runs), bench (run a benchmark file and emit
reports), judge (run attribution cases), serve (start the session service).

Flag precedence: built-in defaults < --config file values < explicit flags.
The effective configuration is serialized into the output directory so any
command can be reproduced from it alone.

Exit codes: 0 success, 1 infrastructure failure, 2 config or schema failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import judge as judging
from .agent import (
    AgentDecidesController,
    ExcerptTask,
    FixedRunsController,
    InteractiveController,
    Limits,
    PromptConfig,
    Session,
    TERMINAL_ERROR,
    save_trajectory,
    run_alternatives,
)
from .corpus import LocalCorpus, RecordedTransport, RemoteCorpus
from .errors import (
    BadConfig,
    CorpusError,
    GatewayError,
    SchemaError,
    ServiceError,
)
from .evaluation import (
    apply_annotations,
    build_report,
    emit_report,
    load_annotations,
    load_benchmark,
    make_run_record,
)
from .gateway import HttpGateway, ModelProfile, ScriptedGateway, load_endpoint_configs
from .service import SessionManager, SessionStore, create_app

EXIT_OK = 0
EXIT_INFRA = 1
EXIT_CONFIG = 2


def build_parser(config: dict | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="citescout")
    parser.add_argument("--config", help="JSON file of flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers: list[argparse.ArgumentParser] = []

    def add_backend_flags(p):
        p.add_argument("--corpus", help="corpus JSONL or prebuilt .index.json")
        p.add_argument("--backend", choices=["local", "remote"], default="local")
        p.add_argument("--fixtures", help="recorded API exchanges for remote backend")
        p.add_argument("--profile", default="scripted")
        p.add_argument("--endpoints", help="endpoint configs JSON")
        p.add_argument("--scripted", help="scripted responses JSON for dry runs")
        p.add_argument(
            "--actions",
            choices=["find_in_text", "read"],
            default="find_in_text",
            help="in-paper information action",
        )
        p.add_argument("--max-steps", type=int, default=20)
        p.add_argument("--year-cutoff", type=int, default=None)
        p.add_argument("--out", help="output directory")

    p_index = sub.add_parser("index", help="build a local index artifact")
    p_index.add_argument("--corpus", required=True)
    p_index.add_argument("--out", required=True)
    p_index.set_defaults(func=cmd_index)

    p_ask = sub.add_parser("ask", help="find reference(s) for one excerpt")
    add_backend_flags(p_ask)
    p_ask.add_argument("--excerpt", required=True)
    p_ask.add_argument("--source-title", default=None)
    p_ask.add_argument("--source-paper-id", default=None)
    p_ask.add_argument("--runs", type=int, default=1)
    p_ask.add_argument("--interactive", action="store_true")
    p_ask.add_argument(
        "--controller",
        choices=["fixed", "agent"],
        default="fixed",
        help="non-interactive continue/stop policy",
    )
    p_ask.set_defaults(func=cmd_ask)

    p_bench = sub.add_parser("bench", help="run a benchmark file")
    add_backend_flags(p_bench)
    p_bench.add_argument("--benchmark", required=True)
    p_bench.add_argument("--annotations", help="human label sets JSONL")
    p_bench.add_argument("--runs", type=int, default=1)
    p_bench.add_argument("--workers", type=int, default=1)
    p_bench.set_defaults(func=cmd_bench)

    p_judge = sub.add_parser("judge", help="run attribution cases")
    p_judge.add_argument("--cases", required=True)
    p_judge.add_argument("--shots", choices=["zero", "few"], default="zero")
    p_judge.add_argument("--profile", default="scripted")
    p_judge.add_argument("--endpoints")
    p_judge.add_argument("--scripted")
    p_judge.add_argument("--out", required=True)
    p_judge.set_defaults(func=cmd_judge)

    p_serve = sub.add_parser("serve", help="start the session service")
    add_backend_flags(p_serve)
    p_serve.add_argument("--store", required=True, help="session store directory")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8377)
    p_serve.set_defaults(func=cmd_serve)

    subparsers.extend([p_index, p_ask, p_bench, p_judge, p_serve])
    if config:
        # config-file values become defaults everywhere; explicit flags win
        for p in [parser, *subparsers]:
            p.set_defaults(**config)
    return parser


# -- shared construction --------------------------------------------------------


def build_corpus(args):
    if args.backend == "remote":
        if args.fixtures:
            return RemoteCorpus(RecordedTransport.from_file(args.fixtures))
        return RemoteCorpus()
    if not args.corpus:
        raise BadConfig("--corpus is required for the local backend")
    path = Path(args.corpus)
    if path.suffix == ".json" and path.name.endswith(".index.json"):
        return LocalCorpus.from_index_file(path)
    return LocalCorpus.from_jsonl(path)


def build_gateway_and_profile(args) -> tuple[object, ModelProfile]:
    if args.scripted:
        gateway = ScriptedGateway.from_file(args.scripted)
        return gateway, ModelProfile(name=args.profile, endpoint="scripted")
    if not args.endpoints:
        raise BadConfig("provide --scripted responses or an --endpoints file")
    configs = load_endpoint_configs(args.endpoints)
    if args.profile not in configs:
        raise BadConfig(f"profile {args.profile!r} not in {args.endpoints}")
    config = configs[args.profile]
    profile = ModelProfile(
        name=args.profile,
        endpoint=args.profile,
        temperature=config.temperature,
        max_output_tokens=config.max_output_tokens,
    )
    return HttpGateway(configs), profile


def build_session(args) -> Session:
    corpus = build_corpus(args)
    gateway, profile = build_gateway_and_profile(args)
    prompt_config = (
        PromptConfig.read_mode() if args.actions == "read" else PromptConfig()
    )
    return Session(
        corpus=corpus,
        gateway=gateway,
        profile=profile,
        prompt_config=prompt_config,
        limits=Limits(max_steps=args.max_steps),
        year_cutoff=args.year_cutoff,
    )


def write_effective_config(args, out_dir: Path) -> None:
    payload = {
        key: value
        for key, value in vars(args).items()
        if key not in ("func", "config") and not callable(value)
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "run_config.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


# -- subcommands ------------------------------------------------------------------


def cmd_index(args) -> int:
    corpus = LocalCorpus.from_jsonl(args.corpus)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / (Path(args.corpus).stem + ".index.json")
    corpus.save_index(target)
    print(f"indexed {len(corpus.papers)} papers -> {target}")
    return EXIT_OK


def cmd_ask(args) -> int:
    session = build_session(args)
    task = ExcerptTask(
        item_id="ask",
        excerpt=args.excerpt,
        source_title=args.source_title,
        source_paper_id=args.source_paper_id,
    )
    if args.interactive:
        controller = InteractiveController()
    elif args.controller == "agent":
        controller = AgentDecidesController(session.gateway, session.profile)
    else:
        controller = FixedRunsController(args.runs)
    result = run_alternatives(session, task, controller, max_runs=max(args.runs, 10))
    if args.out:
        out_dir = Path(args.out)
        write_effective_config(args, out_dir)
        for trajectory in result.trajectories:
            save_trajectory(
                trajectory, out_dir / f"trajectory-run{trajectory.run_index}.json"
            )
    if not result.suggestions:
        print("No suggestion: every run ended without a selection.")
        return EXIT_OK
    for paper_id in result.suggestions:
        title = _safe_title(session.corpus, paper_id)
        print(f"{paper_id}  {title}")
    print(f"stopped: {result.stop_reason}")
    return EXIT_OK


def cmd_bench(args) -> int:
    items = load_benchmark(args.benchmark)
    if args.annotations:
        items = apply_annotations(items, load_annotations(args.annotations))
    session = build_session(args)
    out_dir = Path(args.out) if args.out else Path("bench-out")
    write_effective_config(args, out_dir)
    trajectory_dir = out_dir / "trajectories"
    trajectory_dir.mkdir(parents=True, exist_ok=True)

    def run_item(item):
        task = ExcerptTask(
            item_id=item.item_id,
            excerpt=item.excerpt,
            source_title=item.source_title or None,
            source_paper_id=item.source_paper_id,
        )
        return run_alternatives(
            session, task, FixedRunsController(args.runs), max_runs=args.runs
        )

    # workers > 1 trades deterministic ordering for throughput; scripted
    # gateways should stay at the default of 1
    if args.workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(run_item, items))
    else:
        results = [run_item(item) for item in items]

    records = []
    suggestion_sets: dict[str, list[str]] = {}
    any_errored = False
    for item, result in zip(items, results):
        first = result.trajectories[0]
        if any(t.terminal.kind == TERMINAL_ERROR for t in result.trajectories):
            any_errored = True
        for trajectory in result.trajectories:
            save_trajectory(
                trajectory,
                trajectory_dir / f"{item.item_id}-run{trajectory.run_index}.json",
            )
        first_suggestion = (
            [first.terminal.paper_id] if first.selected_paper_id else []
        )
        records.append(
            make_run_record(
                item,
                suggestions=first_suggestion,
                model_name=session.profile.name,
                usage=first.total_usage,
                history_length=first.history_length,
            )
        )
        suggestion_sets[item.item_id] = list(result.suggestions)

    report = build_report(
        items, records, suggestion_sets, model_name=session.profile.name
    )
    json_path, text_path = emit_report(report, out_dir)
    print(Path(text_path).read_text(encoding="utf-8"), end="")
    print(f"report: {json_path}")
    return EXIT_INFRA if any_errored else EXIT_OK


def cmd_judge(args) -> int:
    cases = judging.load_cases(args.cases)
    gateway, profile = build_gateway_and_profile(args)
    verdicts = [judging.judge(case, gateway, profile, shots=args.shots) for case in cases]
    result = judging.score(verdicts, cases)
    out_dir = Path(args.out)
    write_effective_config(args, out_dir)
    judging.write_verdicts(verdicts, out_dir / "verdicts.jsonl")
    p, r, f1 = result.rendered
    scores = {
        "shots": args.shots,
        "precision": p,
        "recall": r,
        "f1": f1,
        "abstentions": result.abstentions,
        "confusion": result.confusion,
        "flags": result.flags,
    }
    report_path = out_dir / "report.json"
    report = {}
    if report_path.is_file():
        report = json.loads(report_path.read_text(encoding="utf-8"))
    report.setdefault("attribution", {})[args.shots] = scores
    report_path.write_text(
        json.dumps(report, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    print(f"precision {p}  recall {r}  f1 {f1}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    corpus = build_corpus(args)
    gateway, profile = build_gateway_and_profile(args)
    manager = SessionManager(
        store=SessionStore(args.store),
        corpus=corpus,
        gateway_factory=lambda _profile: gateway,
        profiles={profile.name: profile},
        limits=Limits(max_steps=args.max_steps),
        prompt_config=(
            PromptConfig.read_mode() if args.actions == "read" else PromptConfig()
        ),
    )
    manager.restore()
    app = create_app(manager)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def _safe_title(corpus, paper_id: str) -> str:
    try:
        return corpus.get_paper(paper_id).title
    except CorpusError:
        return "(title unavailable)"


def main(argv: list[str] | None = None) -> int:
    scanner = argparse.ArgumentParser(add_help=False)
    scanner.add_argument("--config")
    found, _ = scanner.parse_known_args(argv)
    config = None
    if found.config:
        try:
            with open(found.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    parser = build_parser(config)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, BadConfig, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CorpusError, GatewayError, ServiceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFRA


if __name__ == "__main__":
    sys.exit(main())
