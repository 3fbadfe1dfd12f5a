"""
命令行入口

    python cli.py expand orbifold_gamma --arc gamma
    python cli.py matchings orbifold_gamma --arc gamma --count
    python cli.py snake orbifold_gamma --arc gamma --dot
    python cli.py verify orbifold_gamma [--check exchange]
    python cli.py scenario gen polygon 6 [--kind zigzag] [--depth 3] [--cover] [--output f.scn]
    python cli.py scenario list

退出码: 0 成功, 1 校验失败或内部不一致, 2 输入错误或用法错误。
"""
import argparse
import json
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

from config import APP_TITLE, DEFAULT_FLIP_DEPTH
from errors import INPUT_ERRORS, QclError
from logging_setup import logger
from services import (
    service_expand,
    service_generate_polygon,
    service_list_scenarios,
    service_load_scenario,
    service_matchings,
    service_snake,
    service_verify,
)
from verification import CHECK_KINDS

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


@dataclass
class CliResult:
    status: int
    output: str = ""
    error: str = ""


class UsageError(Exception):
    """argparse 用法错误，不直接退出进程"""

    def __init__(self, message: str, usage: str):
        super().__init__(message)
        self.message = message
        self.usage = usage


class _Parser(argparse.ArgumentParser):

    def error(self, message):
        raise UsageError(message, self.format_usage())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cli.py", description=APP_TITLE)
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)
    commands.required = True

    expand = commands.add_parser("expand", help="弧的量子 (或交换) Laurent 展开")
    expand.add_argument("scenario", help="场景名或 .scn 路径")
    expand.add_argument("--arc", required=True, help="目标弧")
    expand.add_argument("--commutative", action="store_true", help="q=1 的交换展开")
    expand.add_argument("--format", choices=["text", "terms"], default="text", help="输出格式")

    matchings = commands.add_parser("matchings", help="完美匹配列表或个数")
    matchings.add_argument("scenario")
    matchings.add_argument("--arc", required=True)
    matchings.add_argument("--count", action="store_true", help="只输出个数")

    snake = commands.add_parser("snake", help="蛇形图")
    snake.add_argument("scenario")
    snake.add_argument("--arc", required=True)
    snake.add_argument("--dot", action="store_true", help="输出 DOT 文本")
    snake.add_argument("--highlight", type=int, default=None, help="加粗显示第几个匹配 (0 起)")

    verify = commands.add_parser("verify", help="运行校验")
    verify.add_argument("scenario")
    verify.add_argument("--check", choices=list(CHECK_KINDS), default=None, help="只运行某一类校验")

    scenario = commands.add_parser("scenario", help="场景管理")
    scenario_commands = scenario.add_subparsers(dest="scenario_command", parser_class=_Parser)
    scenario_commands.required = True
    scenario_commands.add_parser("list", help="内置场景")
    gen = scenario_commands.add_parser("gen", help="生成场景")
    gen_commands = gen.add_subparsers(dest="family", parser_class=_Parser)
    gen_commands.required = True
    polygon = gen_commands.add_parser("polygon", help="凸多边形三角剖分")
    polygon.add_argument("vertices", type=int, help="顶点数 (至少 4)")
    polygon.add_argument("--kind", choices=["fan", "zigzag"], default="fan")
    polygon.add_argument("--apex", type=int, default=0, help="扇形中心顶点")
    polygon.add_argument("--depth", type=int, default=DEFAULT_FLIP_DEPTH, help="翻转路径深度")
    polygon.add_argument("--cover", action="store_true", help="加入翻出每条对角线的路径")
    polygon.add_argument("--output", default=None, help="写入文件而非标准输出")
    return parser


def _format_vector(values: Sequence[int]) -> str:
    return "(" + ",".join(str(v) for v in values) + ")"


def _cmd_expand(args) -> CliResult:
    s = service_load_scenario(args.scenario)
    result = service_expand(s, args.arc, commutative=args.commutative)
    if args.format == "terms":
        return CliResult(EXIT_OK, json.dumps(result["terms"], ensure_ascii=False))
    return CliResult(EXIT_OK, result["text"])


def _cmd_matchings(args) -> CliResult:
    s = service_load_scenario(args.scenario)
    result = service_matchings(s, args.arc, count_only=args.count)
    if args.count:
        return CliResult(EXIT_OK, str(result["count"]))
    lines = []
    for i, info in enumerate(result["matchings"]):
        lines.append(
            f"P{i} edges={','.join(info['edges'])} labels={','.join(info['labels'])} "
            f"height={_format_vector(info['height'])} exponent={_format_vector(info['exponent'])} "
            f"v={info['valuation']}"
        )
    return CliResult(EXIT_OK, "\n".join(lines))


def _cmd_snake(args) -> CliResult:
    s = service_load_scenario(args.scenario)
    result = service_snake(s, args.arc, highlight=args.highlight)
    if args.dot:
        return CliResult(EXIT_OK, result["dot"].rstrip("\n"))
    g = result["graph"]
    lines = [f"{g.arc}: {g.d} 个瓦片"]
    for tile in g.tiles:
        sides = " ".join(f"{slot}={tile.label(slot)}" for slot in ("N", "E", "S", "W"))
        lines.append(f"瓦片 {tile.index}: 对角线 {tile.diagonal} {sides}")
    for j, direction in enumerate(g.attach, start=1):
        lines.append(f"瓦片 {j + 1} 接在瓦片 {j} 的 {direction}")
    return CliResult(EXIT_OK, "\n".join(lines))


def _cmd_verify(args) -> CliResult:
    s = service_load_scenario(args.scenario)
    reports = service_verify(s, args.check)
    status = EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED
    return CliResult(status, "\n".join(r.render() for r in reports))


def _cmd_scenario(args) -> CliResult:
    if args.scenario_command == "list":
        return CliResult(EXIT_OK, "\n".join(service_list_scenarios()))
    scenario, text = service_generate_polygon(args.vertices, kind=args.kind,
                                              fan_apex=args.apex, depth=args.depth,
                                              cover=args.cover)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
        return CliResult(EXIT_OK, f"已写入 {scenario.name}: {args.output}")
    return CliResult(EXIT_OK, text.rstrip("\n"))


_COMMANDS = {
    "expand": _cmd_expand,
    "matchings": _cmd_matchings,
    "snake": _cmd_snake,
    "verify": _cmd_verify,
    "scenario": _cmd_scenario,
}


def run(argv: Optional[List[str]] = None) -> CliResult:
    """执行一条命令，返回退出码与输出，不调用 sys.exit"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        return CliResult(EXIT_INPUT_ERROR, error=f"{e.usage}{parser.prog}: 错误: {e.message}")
    except SystemExit as e:
        # --help
        return CliResult(e.code if isinstance(e.code, int) else EXIT_OK)

    logger.info(f"执行命令: {' '.join(argv if argv is not None else sys.argv[1:])}")
    try:
        return _COMMANDS[args.command](args)
    except INPUT_ERRORS as e:
        logger.warning(f"输入错误: {e.detail}")
        return CliResult(EXIT_INPUT_ERROR, error=f"错误: {e.detail}")
    except QclError as e:
        logger.error(f"计算不一致: {e.detail}")
        return CliResult(EXIT_CHECK_FAILED, error=f"错误: {e.detail}")
    except OSError as e:
        logger.error(f"文件写入失败: {e}")
        return CliResult(EXIT_INPUT_ERROR, error=f"错误: {e}")


def main(argv: Optional[List[str]] = None) -> int:
    result = run(argv)
    if result.output:
        print(result.output)
    if result.error:
        print(result.error, file=sys.stderr)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
