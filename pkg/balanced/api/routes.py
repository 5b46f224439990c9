"""HTTP route layer for commands, graph analysis, and group descriptions."""

from fastapi import APIRouter, Request

from balanced import __version__
from balanced.command_schemas import (
    Command,
    CommandPayload,
    CommandReport,
    GraphAnalyzeRequest,
    GraphAnalyzeResponse,
    GroupDescribeRequest,
    GroupDescribeResponse,
    HealthResponse,
    ServiceInfo,
)
from balanced.schemas import Family, Mode
from balanced.services import abelian
from balanced.services.command import execute
from balanced.services.digraph import bipartition, parse_graph, scc, weak_components

router = APIRouter()


@router.get("/", response_model=ServiceInfo, tags=["meta"])
def root() -> ServiceInfo:
    """Name the service and list the commands, families and modes `/v1/commands:run` accepts."""
    return ServiceInfo(
        service="balanced",
        version=__version__,
        commands=list(Command),
        families=list(Family),
        modes=list(Mode),
    )


@router.get("/health", response_model=HealthResponse, tags=["meta"])
def health(request: Request) -> HealthResponse:
    return HealthResponse(version=__version__, caps=request.app.state.caps)


@router.post(
    "/v1/commands:run",
    response_model=CommandReport,
    response_model_exclude_none=True,
    tags=["commands"],
)
def run(payload: CommandPayload, request: Request) -> CommandReport:
    """Run one command on inline graph and labeling texts under the app's caps; verdicts are carried in `status`."""
    return execute(payload, request.app.state.caps)


@router.post(
    "/v1/graphs:analyze",
    response_model=GraphAnalyzeResponse,
    response_model_exclude_none=True,
    tags=["graphs"],
)
def analyze_graph(req: GraphAnalyzeRequest) -> GraphAnalyzeResponse:
    """Report weak components, bipartiteness and the strongly connected decomposition."""
    graph = parse_graph(req.graph)
    split = bipartition(graph)
    decomposition = scc(graph)
    return GraphAnalyzeResponse(
        vertices=len(graph.vertices),
        edges=len(graph.edges),
        weak_components=[list(component) for component in weak_components(graph)],
        bipartite=split.bipartite,
        odd_cycle=split.odd_cycle.tokens() if split.odd_cycle is not None else None,
        strong_components=[list(component) for component in decomposition.components],
        component_count=decomposition.component_count,
        cross_edges=list(decomposition.cross_edges),
        r=decomposition.r,
    )


@router.post(
    "/v1/groups:describe",
    response_model=GroupDescribeResponse,
    response_model_exclude_none=True,
    tags=["groups"],
)
def describe_group(req: GroupDescribeRequest) -> GroupDescribeResponse:
    """Describe a parsed group spec and its subgroup of elements with a + a = 0."""
    spec = abelian.parse_group_spec(req.group)
    involutions = abelian.involution_subgroup(spec)
    return GroupDescribeResponse(
        group=abelian.format_group_spec(spec),
        free_rank=spec.free_rank,
        torsion=list(spec.torsion),
        finite=spec.is_finite,
        cardinality=spec.cardinality,
        involution_rank=spec.involution_rank,
        involution_generators=[abelian.format_element(element) for element in involutions.embedding],
    )
