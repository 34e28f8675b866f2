"""Operator CLI: ingest, simulate, eval, stats, serve.

`simulate` drives the exact same engine the server uses, but hermetically:
the script carries its own bundles and events, state is built in a
scratch directory, and all timestamps derive from the script's base_ts, so
identical scripts produce identical output bytes.
"""

import json
import os
import sys
import tempfile

import click

from citelens import SCHEMA_VERSION
from citelens.activity import KIND_CARD_OPEN, KIND_SAVE
from citelens.analytics import render_usage_text, usage_stats
from citelens.citeparse import bundle_from_file, make_bundle
from citelens.errors import CiteLensError, InvalidBundle, UnknownPaper, UnparsedDocument
from citelens.server import run as run_server
from citelens.service import ReadingService, data_dir_from_env
from citelens.textnorm import normalize_title

DEFAULT_BASE_TS = 1_700_000_000.0


@click.group()
@click.option("--data-dir", default=None, help="Data directory (default: $CITELENS_DATA_DIR or ./data)")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--seed", default=0, type=int, help="Seed for tie-breaking shuffles")
@click.pass_context
def main(ctx, data_dir, fmt, seed):
    """Personalized citation augmentation engine."""
    ctx.ensure_object(dict)
    ctx.obj["data_dir"] = data_dir or data_dir_from_env()
    ctx.obj["format"] = fmt
    ctx.obj["seed"] = seed


def _emit(ctx, payload: dict, text: str):
    if ctx.obj["format"] == "json":
        click.echo(json.dumps(payload, ensure_ascii=False, sort_keys=True))
    else:
        click.echo(text)


@main.command()
@click.argument("paths", nargs=-1, required=True)
@click.pass_context
def ingest(ctx, paths):
    """Parse and register document bundle files."""
    service = ReadingService(ctx.obj["data_dir"])
    results = []
    hard_failures = 0
    for path in paths:
        if not os.path.exists(path):
            click.echo(f"{path}: file not found", err=True)
            hard_failures += 1
            results.append({"path": path, "error": "file_not_found"})
            continue
        try:
            bundle = bundle_from_file(path)
            res = service.ingest_bundle(bundle)
        except (InvalidBundle, CiteLensError, OSError) as e:
            click.echo(f"{path}: {e}", err=True)
            hard_failures += 1
            results.append({"path": path, "error": str(e)})
            continue
        results.append({"path": path, "paper_id": res.paper_id, "report": res.report})
        warn = f" warnings={res.report['warnings']}" if res.report["warnings"] else ""
        if ctx.obj["format"] == "text":
            click.echo(
                f"{path}: paper_id={res.paper_id} markers={res.report['markers']} "
                f"entries={res.report['entries']} linked={res.report['linked']} "
                f"unlinked={res.report['unlinked']} style={res.report['style']}{warn}"
            )
    if ctx.obj["format"] == "json":
        click.echo(json.dumps({"schema_version": SCHEMA_VERSION, "results": results}, sort_keys=True))
    if hard_failures:
        sys.exit(2)


def _resolve_ref(service: ReadingService, ref: str) -> str:
    """A paper reference in a script/CLI arg: id first, unique title second."""
    if ref in service.corpus:
        return ref
    norm = normalize_title(ref)
    hits = [
        pid
        for pid in service.corpus.paper_ids()
        if normalize_title(service.corpus.get(pid).title) == norm
    ]
    if len(hits) == 1:
        return hits[0]
    raise UnknownPaper(ref)


def _load_script(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        script = json.load(f)
    if not isinstance(script, dict) or not isinstance(script.get("events", []), list):
        raise click.ClickException("script must be a JSON object with an 'events' list")
    return script


def run_simulation(script: dict, script_dir: str = ".", seed: int = 0) -> dict:
    """Replay a session script in a scratch service and return the outcome."""
    base_ts = float(script.get("base_ts", DEFAULT_BASE_TS))
    with tempfile.TemporaryDirectory() as tmp:
        service = ReadingService(tmp, fsync=False, clock=lambda: base_ts)
        for item in script.get("bundles", []):
            if isinstance(item, str):
                bundle = bundle_from_file(os.path.join(script_dir, item))
            else:
                bundle = make_bundle(
                    title=item.get("title", ""),
                    sections=item.get("sections", []),
                    references_block=item.get("references_block", ""),
                    style_hint=item.get("style_hint", "auto"),
                )
            service.ingest_bundle(bundle)
        if script.get("own_papers"):
            service.set_own_papers([_resolve_ref(service, r) for r in script["own_papers"]])

        last_card_reading = {}  # subject pid -> reading pid of its latest card open
        for lineno, ev in enumerate(script.get("events", []), start=1):
            try:
                kind = ev["kind"]
                ts = base_ts + float(ev.get("at", lineno))
                paper = _resolve_ref(service, ev["paper"]) if ev.get("paper") else ""
                payload = {}
                if kind == "scroll":
                    payload["fraction"] = ev["fraction"]
                elif kind == "set_window":
                    payload["window_size"] = ev["window_size"]
                elif kind == KIND_CARD_OPEN:
                    reading = _resolve_ref(service, ev["reading"])
                    payload["reading_paper_id"] = reading
                    last_card_reading[paper] = reading
                elif kind == KIND_SAVE:
                    if ev.get("from_card"):
                        reading = last_card_reading.get(paper)
                        if reading is None:
                            raise CiteLensError("from_card save without a prior card_open")
                        marker_id = service.first_marker_citing(reading, paper)
                        if marker_id is None:
                            raise CiteLensError(f"{reading} has no marker citing {paper}")
                        payload["source_paper_id"] = reading
                        payload["marker_id"] = marker_id
                service.record_event(kind, paper, payload, ts=ts)
            except (KeyError, ValueError, CiteLensError) as e:
                raise click.ClickException(f"script event {lineno}: {e}")

        stats = usage_stats(service.store.events())
        return {
            "schema_version": SCHEMA_VERSION,
            "seed": seed,
            "events_applied": service.store.state.last_seq,
            "usage": stats.to_dict(),
            "history": service.history(),
            "library": service.library(),
            "window": service.store.state.window,
        }


@main.command()
@click.argument("script_path")
@click.pass_context
def simulate(ctx, script_path):
    """Replay a session script and print its usage statistics."""
    if not os.path.exists(script_path):
        click.echo(f"{script_path}: file not found", err=True)
        sys.exit(2)
    script = _load_script(script_path)
    outcome = run_simulation(script, os.path.dirname(script_path) or ".", seed=ctx.obj["seed"])
    if ctx.obj["format"] == "json":
        click.echo(json.dumps(outcome, ensure_ascii=False, sort_keys=True))
    else:
        stats = UsageFromDict(outcome["usage"])
        click.echo(render_usage_text(stats))
        click.echo(f"events applied: {outcome['events_applied']}")


class UsageFromDict:
    """Adapter so render_usage_text can print a serialized stats dict."""

    def __init__(self, d: dict):
        self._d = d

    def to_dict(self) -> dict:
        return self._d


@main.command("eval")
@click.argument("doc")
@click.argument("peers", nargs=-1, required=True)
@click.option("-k", default=5, type=int, help="Top-k per strategy")
@click.pass_context
def eval_cmd(ctx, doc, peers, k):
    """Run the four selection strategies on an ingested document."""
    service = ReadingService(ctx.obj["data_dir"])
    try:
        doc_id = _resolve_ref(service, doc)
        peer_ids = [_resolve_ref(service, p) for p in peers]
        report = service.strategy_report(doc_id, peer_ids, k=k, seed=ctx.obj["seed"])
    except (UnknownPaper, UnparsedDocument) as e:
        click.echo(f"unknown document: {e}", err=True)
        sys.exit(2)
    payload = {"schema_version": SCHEMA_VERSION, "report": report.to_dict()}
    lines = []
    for name, picks in sorted(report.per_strategy.items()):
        titles = ", ".join(f"{service.corpus.get(pid).title} ({score:g})" for pid, score in picks)
        lines.append(f"{name:>14}: {titles}")
    lines.append(f"pooled ({len(report.pooled)}): " + ", ".join(sorted(report.pooled)))
    hist = report.overlap_histogram
    lines.append("overlap: " + "  ".join(f"{n} strategies: {hist.get(n, 0)}" for n in (1, 2, 3, 4)))
    _emit(ctx, payload, "\n".join(lines))


@main.command()
@click.pass_context
def stats(ctx):
    """Print usage statistics from the event log."""
    service = ReadingService(ctx.obj["data_dir"])
    s = usage_stats(service.store.events())
    _emit(ctx, {"schema_version": SCHEMA_VERSION, **s.to_dict()}, render_usage_text(s))


@main.command()
@click.option("--port", default=None, type=int)
@click.option("--host", default="127.0.0.1")
@click.pass_context
def serve(ctx, port, host):
    """Launch the HTTP server."""
    service = ReadingService(ctx.obj["data_dir"])
    run_server(service, port=port, host=host)


if __name__ == "__main__":
    main()
