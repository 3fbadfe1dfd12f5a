"""
测试公共夹具

内置轨形场景、多边形场景，以及与生产代码无关的暴力完美匹配搜索。
"""
from itertools import combinations

import pytest

from quantum_torus import QHalfLaurent, TorusElement
from scenarios import generate_polygon, load_scenario
from snake_graph import build_snake_graph

# γ 的量子展开，q^{1/2} 指数 -> 系数
GAMMA_TERMS = {
    (1, -2, 0, 3, 2, 2): {0: 1},
    (-1, -2, 2, 3, 1, 2): {-2: 1, 2: 1},
    (-1, 0, 0, 2, 1, 2): {-2: 1, 2: 1},
    (-3, -2, 4, 3, 0, 2): {0: 1},
    (0, -1, 0, 2, 1, 1): {-1: 1, 1: 1},
    (-3, 0, 2, 2, 0, 2): {-4: 1, 0: 1, 4: 1},
    (-2, -1, 2, 2, 0, 1): {-1: 1, 1: 1},
    (-3, 2, 0, 1, 0, 2): {-4: 1, 0: 1, 4: 1},
    (-2, 1, 0, 1, 0, 1): {-3: 1, -1: 1, 1: 1, 3: 1},
    (-3, 4, -2, 0, 0, 2): {0: 1},
    (-2, 3, -2, 0, 0, 1): {-1: 1, 1: 1},
    (-1, 0, 0, 1, 0, 0): {0: 1},
    (-1, 2, -2, 0, 0, 0): {0: 1},
}


def brute_force_matchings(g):
    """逐一检查 |V|/2 元边子集，返回排序后的边 id 元组集合"""
    vertices = set(g.vertices)
    found = set()
    for subset in combinations(g.edges, len(vertices) // 2):
        covered = [v for edge in subset for v in edge.ends]
        if len(covered) == len(set(covered)) and set(covered) == vertices:
            found.add(tuple(sorted(edge.id for edge in subset)))
    return found


@pytest.fixture(scope="session")
def example():
    return load_scenario("orbifold_gamma")


@pytest.fixture(scope="session")
def gamma_expected():
    return TorusElement(6, {a: QHalfLaurent(c) for a, c in GAMMA_TERMS.items()})


@pytest.fixture(scope="session")
def pentagon():
    return generate_polygon(5)


@pytest.fixture(scope="session")
def hexagon_depth3():
    return generate_polygon(6, depth=3)


@pytest.fixture
def polygon_factory():
    cache = {}

    def build(n, kind="fan", depth=1, apex=0):
        key = (n, kind, depth, apex)
        if key not in cache:
            cache[key] = generate_polygon(n, fan_apex=apex, kind=kind, depth=depth)
        return cache[key]

    return build


# 结构性质在这些凸多边形上逐条对角线检查
POLYGON_SHAPES = [(n, kind) for n in range(4, 9) for kind in ("fan", "zigzag")]


def named_snake_graphs(s):
    """场景中每条命名弧的 (穿越序列, 蛇形图)"""
    return [(c, build_snake_graph(s.triangulation, c)) for c in s.named_arcs.values()]


@pytest.fixture(scope="session", params=POLYGON_SHAPES, ids=lambda shape: f"{shape[1]}{shape[0]}")
def polygon_shape(request):
    n, kind = request.param
    return generate_polygon(n, kind=kind, depth=0)
