"""Inspection toolkit for IoT scenario specifications.

Parses the `.iotsc` scenario format, evaluates the machine-checkable
subset of the 32-question inspection checklist, manages multi-inspector
inspection sessions through detection, collection and discrimination,
and computes the cost-efficiency / efficiency / effectiveness review
metrics.
"""

from .catalog import (
    ArrangementCatalog,
    AutomationLevel,
    Checklist,
    ChecklistQuestion,
    DefectType,
    QuestionPart,
    automation_partition,
    load_default,
    questions_for_facet,
)
from .checks import Finding, FindingSeverity, run_checks
from .lexicons import DEFAULT_LEXICONS, Lexicons, load_lexicons
from .metrics import (
    MetricsReport,
    SessionMeasures,
    UndefinedMetricError,
    aggregate_report,
    cost_efficiency,
    effectiveness,
    efficiency,
)
from .model import (
    ActorDecl,
    ActorRole,
    ArrangementRef,
    DocumentHeader,
    FacetId,
    Flow,
    FlowKind,
    Scenario,
    ScenarioDocument,
    SourceLocation,
    Step,
    enumerate_actor_terms,
    resolve_step_ref,
)
from .parser import ParseDiagnostic, ParseResult, parse, parse_file, render
from .process import (
    Answer,
    Classification,
    ClassifiedCollection,
    Discrepancy,
    DiscrepancyOrigin,
    InspectionPlan,
    InspectionSession,
    KnownDefectSet,
    MergedCollection,
    Phase,
    PhaseError,
    PlanningError,
    ProcessError,
    StepRef,
    TechniqueTag,
    collect,
    discriminate,
    known_defects,
    mark_duplicate,
    plan_assignments,
    record_discrepancy,
    suggest_duplicates,
)
from .workspace import Workspace, WorkspaceError, init_workspace, open_workspace

__version__ = "0.1.0"
