import time
from typing import Dict, List, Optional, Tuple

from errors import PreconditionError, ScenarioError
from expansion import expand_arc
from logging_setup import logger
from scenarios import (
    generate_polygon,
    list_bundled,
    load_scenario,
    scenario_from_document,
    serialize_scenario,
)
from schemas import ScenarioDocument
from snake_graph import build_snake_graph, count_matchings, enumerate_matchings, to_dot
from verification import CheckReport, Scenario, run_suite


def service_load_scenario(scenario: Optional[str] = None,
                          document: Optional[ScenarioDocument] = None) -> Scenario:
    """按名称/路径载入场景，或校验内联文档"""
    if document is not None:
        return scenario_from_document(document)
    if scenario:
        return load_scenario(scenario)
    raise ScenarioError("必须给出 scenario 或 document 之一")


def _render_exponent(a) -> str:
    return "x^{(" + ",".join(str(x) for x in a) + ")}"


def render_commutative(terms: Dict[Tuple[int, ...], int]) -> str:
    if not terms:
        return "0"
    parts = []
    for a, c in sorted(terms.items()):
        parts.append(_render_exponent(a) if c == 1 else f"{c} {_render_exponent(a)}")
    return " + ".join(parts)


def service_expand(s: Scenario, arc: str, commutative: bool = False) -> Dict:
    """弧的量子或交换展开"""
    start_time = time.time()
    logger.info(f"收到展开请求: 场景 {s.name}, 弧 {arc}, {'交换' if commutative else '量子'}")
    result = expand_arc(s.triangulation, s.crossing_sequence(arc), s.seed, quantum=not commutative)
    if commutative:
        terms = result.commutative()
        text = render_commutative(terms)
        term_list = [{"exponent": list(a), "coefficient": c} for a, c in terms.items()]
    else:
        element = result.quantum()
        text = element.render()
        term_list = element.term_list()
    logger.info(f"展开完成: {len(term_list)} 项, 耗时 {time.time() - start_time:.3f} 秒")
    return {
        "arc": arc,
        "mode": "commutative" if commutative else "quantum",
        "text": text,
        "terms": term_list,
        "matchings": len(result.matchings),
    }


def service_matchings(s: Scenario, arc: str, count_only: bool = False) -> Dict:
    """完美匹配个数或明细 (边、标签、高度、指数向量、赋值)"""
    c = s.crossing_sequence(arc)
    if count_only:
        g = build_snake_graph(s.triangulation, c)
        return {"arc": arc, "count": count_matchings(g), "matchings": []}
    result = expand_arc(s.triangulation, c, s.seed)
    g = result.graph
    listing = []
    for p in result.matchings:
        edges = sorted(p.edges)
        listing.append({
            "edges": [f"e{eid}" for eid in edges],
            "labels": [g.edge(eid).label for eid in edges],
            "height": list(result.heights[p]),
            "exponent": list(result.exponents[p]),
            "valuation": result.valuation[p],
        })
    return {"arc": arc, "count": len(listing), "matchings": listing}


def service_snake(s: Scenario, arc: str, highlight: Optional[int] = None) -> Dict:
    """蛇形图的 DOT 文本，可加粗显示第 highlight 个匹配"""
    c = s.crossing_sequence(arc)
    g = build_snake_graph(s.triangulation, c)
    matching = None
    if highlight is not None:
        matchings = enumerate_matchings(g)
        if not 0 <= highlight < len(matchings):
            raise PreconditionError(f"匹配下标 {highlight} 超出 0..{len(matchings) - 1}")
        matching = matchings[highlight]
    return {"arc": arc, "tiles": g.d, "dot": to_dot(g, matching), "graph": g}


def service_verify(s: Scenario, check: Optional[str] = None) -> List[CheckReport]:
    start_time = time.time()
    reports = run_suite(s, check)
    logger.info(f"场景 {s.name} 校验耗时 {time.time() - start_time:.3f} 秒")
    return reports


def service_generate_polygon(vertices: int, kind: str = "fan", fan_apex: int = 0,
                             depth: Optional[int] = None, cover: bool = False) -> Tuple[Scenario, str]:
    scenario = generate_polygon(vertices, fan_apex=fan_apex, kind=kind, depth=depth, cover=cover)
    return scenario, serialize_scenario(scenario)


def service_list_scenarios() -> List[str]:
    return list_bundled()
