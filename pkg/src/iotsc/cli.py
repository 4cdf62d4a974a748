"""Command-line interface.

Exit codes: 0 success, 1 expected failure (parse errors, error-severity
findings, failed operations; diagnostics printed), 2 usage error.
"""

from __future__ import annotations

import csv as csv_module
import io
import json
from pathlib import Path

import click

from .catalog import DefectType, load_arrangement_catalog, load_default
from .checks import FindingSeverity, run_checks
from .fixtures import STUDY_NAMES, study_measures
from .lexicons import DEFAULT_LEXICONS, load_lexicons
from .metrics import aggregate_report, render_table, report_to_csv
from .model import SourceLocation
from .parser import parse_file, render
from .process import (
    Answer,
    Classification,
    Discrepancy,
    DiscrepancyOrigin,
    Phase,
    ProcessError,
    StepRef,
    TechniqueTag,
    plan_assignments,
)
from .server import document_to_dict
from .workspace import WorkspaceError, init_workspace, open_workspace

pass_fail = click.exceptions.Exit


class ExpectedFailure(click.ClickException):
    exit_code = 1

    def show(self, file=None) -> None:
        click.echo(self.message, err=True)


@click.group()
@click.version_option(version="0.1.0", prog_name="iotsc")
def main() -> None:
    """Inspection toolkit for IoT scenario specifications."""


@main.command()
@click.argument("path", type=click.Path(path_type=Path))
@click.option("--name", default=None, help="Workspace name (defaults to the directory name).")
def init(path: Path, name: str | None) -> None:
    """Create a workspace with the bundled example fixtures."""
    try:
        workspace = init_workspace(path, name or path.name)
    except WorkspaceError as exc:
        raise ExpectedFailure(str(exc))
    click.echo(f"initialized workspace {workspace.manifest.name!r} at {workspace.root}")


@main.command(name="parse")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--json", "as_json", is_flag=True, help="Print the parsed document as JSON.")
def parse_cmd(file: Path, as_json: bool) -> None:
    """Parse a scenario file and report diagnostics."""
    result = parse_file(file)
    for diag in result.diagnostics:
        click.echo(f"{file}:{diag}", err=True)
    if not result.ok:
        raise ExpectedFailure(f"{file}: {len(result.errors)} error(s)")
    if as_json:
        click.echo(json.dumps(document_to_dict(result.document), indent=2))
    else:
        doc = result.document
        click.echo(f"{file}: {len(doc.scenarios)} scenario(s)")
        for scenario in doc.scenarios:
            flows = 1 + len(scenario.alternative_flows) + len(scenario.exception_flows)
            steps = sum(len(f.steps) for f in scenario.flows())
            click.echo(f"  {scenario.scenario_id}: {scenario.title} "
                       f"({flows} flow(s), {steps} step(s))")


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--check", "check_only", is_flag=True,
              help="Exit 1 if the file is not in canonical form; write nothing.")
def fmt(file: Path, check_only: bool) -> None:
    """Rewrite a scenario file in canonical form."""
    result = parse_file(file)
    if not result.ok:
        for diag in result.errors:
            click.echo(f"{file}:{diag}", err=True)
        raise ExpectedFailure(f"{file}: cannot format a file with parse errors")
    canonical = render(result.document)
    current = file.read_text(encoding="utf-8")
    if check_only:
        if canonical != current:
            raise ExpectedFailure(f"{file}: not in canonical form")
        return
    if canonical != current:
        file.write_text(canonical, encoding="utf-8")
        click.echo(f"reformatted {file}")


@main.command()
@click.argument("files", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--lexicons", "lexicons_file", type=click.Path(exists=True, path_type=Path),
              help="Lexicon override file.")
@click.option("--catalog", "catalog_file", type=click.Path(exists=True, path_type=Path),
              help="Arrangement catalog override file.")
@click.option("--format", "output_format", type=click.Choice(["text", "csv"]),
              default="text", show_default=True)
def check(files: tuple[Path, ...], lexicons_file: Path | None,
          catalog_file: Path | None, output_format: str) -> None:
    """Run the automated checks over scenario files."""
    checklist, catalog = load_default()
    if catalog_file is not None:
        catalog = load_arrangement_catalog(catalog_file)
    lexicons = load_lexicons(lexicons_file) if lexicons_file else DEFAULT_LEXICONS

    rows = []
    parse_failed = False
    for file in files:
        result = parse_file(file)
        if not result.ok:
            for diag in result.errors:
                click.echo(f"{file}:{diag}", err=True)
            parse_failed = True
            continue
        for finding in run_checks(result.document, checklist, catalog, lexicons):
            rows.append((file, finding))

    if output_format == "csv":
        buffer = io.StringIO()
        writer = csv_module.writer(buffer, lineterminator="\n")
        writer.writerow(["file", "scenario", "line", "column", "question",
                         "confidence", "severity", "defect_type", "message"])
        for file, f in rows:
            writer.writerow([
                str(file), f.scenario_id or "", f.location.line if f.location else "",
                f.location.column if f.location else "", f.question_id,
                f.confidence.value, f.severity.value, f.suggested_defect_type.value,
                f.message])
        click.echo(buffer.getvalue(), nl=False)
    else:
        for file, f in rows:
            where = f"{file}"
            if f.location is not None:
                where += f":{f.location.line}:{f.location.column}"
            scenario = f" [{f.scenario_id}]" if f.scenario_id else ""
            click.echo(f"{where}: {f.question_id} {f.severity.value} "
                       f"({f.confidence.value}){scenario}: {f.message} "
                       f"-> {f.suggested_defect_type.value}")
    has_errors = any(f.severity is FindingSeverity.ERROR for _, f in rows)
    if parse_failed or has_errors:
        raise pass_fail(1)


@main.command()
@click.option("--inspectors", required=True,
              help="Comma-separated inspector ids, in rotation order.")
@click.option("--artifacts", default=None,
              help="Comma-separated artifact ids authored by each inspector "
                   "(defaults to '<inspector>-artifact').")
@click.option("--trials", required=True,
              help="Comma-separated techniques per trial (ad-hoc|checklist).")
def plan(inspectors: str, artifacts: str | None, trials: str) -> None:
    """Plan cross-checked artifact assignments for the inspection trials."""
    inspector_list = [i.strip() for i in inspectors.split(",") if i.strip()]
    if artifacts:
        artifact_list = [a.strip() for a in artifacts.split(",") if a.strip()]
        if len(artifact_list) != len(inspector_list):
            raise click.UsageError("--artifacts must match --inspectors in length")
        artifact_map = dict(zip(inspector_list, artifact_list))
    else:
        artifact_map = {i: f"{i}-artifact" for i in inspector_list}
    try:
        technique_list = [TechniqueTag(t.strip()) for t in trials.split(",") if t.strip()]
    except ValueError as exc:
        raise click.UsageError(str(exc))
    try:
        result = plan_assignments(inspector_list, artifact_map, technique_list)
    except ProcessError as exc:
        raise ExpectedFailure(str(exc))
    for trial in result.trials:
        click.echo(f"trial {trial.trial_number} ({trial.technique.value}):")
        for inspector in inspector_list:
            click.echo(f"  {inspector} <- {trial.assignments[inspector]}")


@main.command()
@click.option("--study", type=click.Choice(STUDY_NAMES), default=None,
              help="Report over a bundled study fixture.")
@click.option("--workspace", "workspace_path", type=click.Path(path_type=Path),
              default=None, help="Report over a workspace's discriminated sessions.")
@click.option("--format", "output_format", type=click.Choice(["table", "csv"]),
              default="table", show_default=True)
def metrics(study: str | None, workspace_path: Path | None, output_format: str) -> None:
    """Compute cost-efficiency, efficiency and effectiveness."""
    if (study is None) == (workspace_path is None):
        raise click.UsageError("choose exactly one of --study or --workspace")
    if study is not None:
        measures = study_measures(study)
    else:
        try:
            measures = open_workspace(workspace_path).workspace_measures()
        except WorkspaceError as exc:
            raise ExpectedFailure(str(exc))
    report = aggregate_report(measures)
    if output_format == "csv":
        click.echo(report_to_csv(report), nl=False)
    else:
        click.echo(render_table(report), nl=False)


@main.command()
@click.option("--csv", "csv_out", required=True, type=click.Path(path_type=Path),
              help="Destination CSV file.")
@click.option("--study", type=click.Choice(STUDY_NAMES), default=None)
@click.option("--workspace", "workspace_path", type=click.Path(path_type=Path), default=None)
def export(csv_out: Path, study: str | None, workspace_path: Path | None) -> None:
    """Export the metrics report as CSV."""
    if (study is None) == (workspace_path is None):
        raise click.UsageError("choose exactly one of --study or --workspace")
    if study is not None:
        measures = study_measures(study)
    else:
        try:
            measures = open_workspace(workspace_path).workspace_measures()
        except WorkspaceError as exc:
            raise ExpectedFailure(str(exc))
    csv_out.parent.mkdir(parents=True, exist_ok=True)
    csv_out.write_text(report_to_csv(aggregate_report(measures)), encoding="utf-8")
    click.echo(f"wrote {csv_out}")


@main.group()
@click.option("--workspace", "workspace_path", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.pass_context
def session(ctx: click.Context, workspace_path: Path) -> None:
    """Manage inspection sessions in a workspace."""
    try:
        ctx.obj = open_workspace(workspace_path)
    except WorkspaceError as exc:
        raise ExpectedFailure(str(exc))


def _session_op(workspace, session_id: str, command) -> None:
    try:
        updated = workspace.mutate_session(session_id, command)
    except (WorkspaceError, ProcessError, ValueError) as exc:
        raise ExpectedFailure(str(exc))
    click.echo(f"{updated.session_id}: phase={updated.phase.value} "
               f"discrepancies={len(updated.discrepancies)} "
               f"elapsed={updated.elapsed_us // 1_000_000}s")


@session.command(name="new")
@click.option("--artifact", required=True)
@click.option("--inspector", required=True)
@click.option("--technique", type=click.Choice([t.value for t in TechniqueTag]),
              default=TechniqueTag.CHECKLIST.value, show_default=True)
@click.option("--trial", type=int, default=1, show_default=True)
@click.pass_obj
def session_new(workspace, artifact: str, inspector: str, technique: str, trial: int) -> None:
    """Create a session in the planning phase."""
    try:
        created = workspace.create_session(artifact, inspector,
                                           TechniqueTag(technique), trial=trial)
    except (WorkspaceError, ProcessError, ValueError) as exc:
        raise ExpectedFailure(str(exc))
    click.echo(created.session_id)


@session.command(name="start")
@click.argument("session_id")
@click.option("--at", default=None, help="ISO timestamp (defaults to now, UTC).")
@click.pass_obj
def session_start(workspace, session_id: str, at: str | None) -> None:
    """Enter detection (if needed) and start the timer."""
    from . import process

    def command(current):
        events = []
        if current.phase is Phase.PLANNING:
            current, advanced = process.advance_phase(current, Phase.DETECTION, ts=at)
            events.append(advanced)
        current, started = process.start_timer(current, at=at)
        events.append(started)
        return current, events

    _session_op(workspace, session_id, command)


@session.command(name="stop")
@click.argument("session_id")
@click.option("--at", default=None)
@click.pass_obj
def session_stop(workspace, session_id: str, at: str | None) -> None:
    """Stop (pause) the detection timer."""
    from . import process

    _session_op(workspace, session_id, lambda s: process.stop_timer(s, at=at))


@session.command(name="record")
@click.argument("session_id")
@click.option("--scenario", required=True, help="Scenario id, e.g. SC01.")
@click.option("--description", required=True)
@click.option("--defect-type", type=click.Choice([d.value for d in DefectType]),
              required=True)
@click.option("--question", default=None, help="Checklist question id, e.g. Q18.")
@click.option("--line", type=int, default=None)
@click.option("--step", type=int, default=None)
@click.option("--flow", default="", help="Flow label for --step ('' = main).")
@click.option("--origin", type=click.Choice([o.value for o in DiscrepancyOrigin]),
              default=DiscrepancyOrigin.HUMAN.value, show_default=True)
@click.option("--at", default=None)
@click.pass_obj
def session_record(workspace, session_id: str, scenario: str, description: str,
                   defect_type: str, question: str | None, line: int | None,
                   step: int | None, flow: str, origin: str, at: str | None) -> None:
    """Record a discrepancy during detection."""
    from . import process

    if step is not None:
        location = StepRef(flow_label=flow, step_number=step)
    elif line is not None:
        location = SourceLocation(line=line)
    else:
        raise click.UsageError("provide --line or --step")
    try:
        entry = Discrepancy(
            discrepancy_id="pending", session_id=session_id, scenario_id=scenario,
            location=location, description=description,
            defect_type=DefectType(defect_type), origin=DiscrepancyOrigin(origin),
            question_id=question)
    except ValueError as exc:
        raise ExpectedFailure(str(exc))
    _session_op(workspace, session_id,
                lambda s: process.record_discrepancy(s, entry, ts=at))


@session.command(name="answer")
@click.argument("session_id")
@click.argument("question_id")
@click.argument("answer", type=click.Choice([a.value for a in Answer]))
@click.pass_obj
def session_answer(workspace, session_id: str, question_id: str, answer: str) -> None:
    """Record a checklist answer (checklist-guided sessions only)."""
    from . import process

    _session_op(workspace, session_id,
                lambda s: process.record_answer(s, question_id, Answer(answer)))


@session.command(name="collect")
@click.argument("session_ids", nargs=-1, required=True)
@click.pass_obj
def session_collect(workspace, session_ids: tuple[str, ...]) -> None:
    """Advance sessions out of detection and merge their discrepancies."""
    from . import process

    def advance(current):
        events = []
        if current.timer_running:
            current, stopped = process.stop_timer(current)
            events.append(stopped)
        current, advanced = process.advance_phase(current, Phase.COLLECTION)
        events.append(advanced)
        return current, events

    try:
        for sid in session_ids:
            if workspace.load_session(sid).phase is Phase.DETECTION:
                workspace.mutate_session(sid, advance)
        collection = workspace.create_collection(list(session_ids))
    except (WorkspaceError, ProcessError, ValueError) as exc:
        raise ExpectedFailure(str(exc))
    click.echo(f"{collection.collection_id}: {collection.total_count} discrepancies, "
               f"{collection.distinct_count} distinct")


@session.command(name="discriminate")
@click.argument("collection_id")
@click.option("--defect", "defects", multiple=True,
              help="Discrepancy id classified as a real defect (repeatable).")
@click.option("--false-positive", "false_positives", multiple=True,
              help="Discrepancy id classified as a false positive (repeatable).")
@click.option("--rest", type=click.Choice([c.value for c in Classification]), default=None,
              help="Classification applied to every undecided distinct discrepancy.")
@click.pass_obj
def session_discriminate(workspace, collection_id: str, defects: tuple[str, ...],
                         false_positives: tuple[str, ...], rest: str | None) -> None:
    """Classify the distinct discrepancies of a merged collection."""
    from . import process

    try:
        collection = workspace.load_collection(collection_id)
        decisions = {d: Classification.DEFECT for d in defects}
        decisions.update({d: Classification.FALSE_POSITIVE for d in false_positives})
        if rest is not None:
            for d in collection.discrepancies:
                if d.duplicate_of is None and d.discrepancy_id not in decisions:
                    decisions[d.discrepancy_id] = Classification(rest)
        classified = workspace.mutate_collection(
            collection_id, lambda c: process.discriminate(c, decisions))
    except (WorkspaceError, ProcessError, ValueError) as exc:
        raise ExpectedFailure(str(exc))
    click.echo(f"{collection_id}: {classified.real_defect_count} real defects of "
               f"{classified.distinct_count} distinct")


@session.command(name="duplicate")
@click.argument("collection_id")
@click.argument("duplicate_id")
@click.argument("target_id")
@click.pass_obj
def session_duplicate(workspace, collection_id: str, duplicate_id: str,
                      target_id: str) -> None:
    """Mark a collected discrepancy as a duplicate of an earlier one."""
    from . import process

    try:
        collection = workspace.mutate_collection(
            collection_id, lambda c: process.mark_duplicate(c, duplicate_id, target_id))
    except (WorkspaceError, ProcessError, ValueError) as exc:
        raise ExpectedFailure(str(exc))
    click.echo(f"{collection_id}: {collection.distinct_count} distinct of "
               f"{collection.total_count}")


@main.command()
@click.option("--workspace", "workspace_path", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--bind", default="127.0.0.1:8347", show_default=True,
              help="host:port to listen on.")
@click.option("--ui", "ui_path", type=click.Path(exists=True, file_okay=False, path_type=Path),
              default=None, help="Directory with the built browser client "
                                 "(index.html + dist/), served at /.")
def serve(workspace_path: Path, bind: str, ui_path: Path | None) -> None:
    """Serve the HTTP API (and the browser client, if built) over a workspace."""
    import uvicorn

    from .server import create_app

    try:
        workspace = open_workspace(workspace_path)
    except WorkspaceError as exc:
        raise ExpectedFailure(str(exc))
    host, _, port = bind.rpartition(":")
    if not host or not port.isdigit():
        raise click.UsageError(f"--bind must look like host:port, got {bind!r}")
    uvicorn.run(create_app(workspace, ui_dir=ui_path), host=host, port=int(port))


if __name__ == "__main__":
    main()
