"""
バッチ用のコマンドラインインターフェース。

役割
- `fa` / `fb`: A_{N-1} 型 / B_N 型固有関数の打ち切り級数を出力
- `branch-coeffs`: 分岐係数 e_branch(theta) の表を出力
- `verify`: 検査スイートを実行してレポートの配列を出力

設計のポイント
- 計算は `eigenfunctions` / `verification` に委譲し、ここでは引数の解釈と出力に専念
- 有理数はすべて "num/den" 文字列（浮動小数点は受け付けない）
- 成果物は標準出力（または `--output`）、ログは標準エラーに分ける
- 終了コード: 0 = 成功, 1 = 検査失敗, 2 = 一般点が得られない, 3 = 使い方の誤り
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .coefficients import branch_table
from .eigenfunctions import f_A_direct, f_B_branching
from .scalars import (
    DEFAULT_RETRIES,
    DegeneratePointError,
    GenericityError,
    ParamPoint,
    QTodaError,
    format_rational,
    parse_rational,
    random_point,
)
from .series import TruncatedSeries
from .verification import CHECKS, DEFAULT_POINTS, Report, run_suite, select_checks


logger = logging.getLogger(__name__)

COMMANDS = ("fa", "fb", "branch-coeffs", "verify")
FORMATS = ("json", "csv")
RANDOM = "random"

DEFAULT_N = 2
DEFAULT_ORDER = 4
SEED_ENV = "QTODA_SEED"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_GENERICITY = 2
EXIT_USAGE = 3


class UsageError(QTodaError):
    """引数・設定の誤り（終了コード 3）。"""


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int = DEFAULT_N
    order: int = DEFAULT_ORDER
    q: Optional[Fraction] = None  # None は random
    s: Optional[Tuple[Fraction, ...]] = None  # None は random
    seed: int = 0
    points: int = DEFAULT_POINTS
    format: str = "json"
    output: Optional[str] = None
    checks: Optional[Tuple[str, ...]] = None
    verbose: bool = False

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command: {self.command!r}")
        if self.n < 1:
            raise UsageError("--n must be >= 1")
        if self.order < 0:
            raise UsageError("--order must be >= 0")
        if self.points < 1:
            raise UsageError("--points must be >= 1")
        if self.format not in FORMATS:
            raise UsageError(f"--format must be one of {', '.join(FORMATS)}")
        if self.s is not None and len(self.s) != self.n:
            raise UsageError(f"--s needs {self.n} values (got {len(self.s)})")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("--seed must be a non-negative 64-bit integer")


class _ArgumentParser(argparse.ArgumentParser):
    # argparse は既定で exit(2) するが、2 は一般性の失敗に使うので例外に変える
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _seed_default() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or not raw.strip():
        return 0
    try:
        return int(raw.strip())
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer (got {raw!r})") from None


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=DEFAULT_N, help="number of variables N (default: %(default)s)")
    common.add_argument("--order", type=int, default=DEFAULT_ORDER, help="truncation degree M (default: %(default)s)")
    common.add_argument("--q", default=RANDOM, help='q as "num/den", or "random"')
    common.add_argument("--s", nargs="+", default=[RANDOM], help='s_1 .. s_N as "num/den", or "random"')
    common.add_argument("--seed", type=int, default=None, help=f"random seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument("--output", default=None, help="output file (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")

    parser = _ArgumentParser(prog="qtoda", description="q-Toda eigenfunctions and the branching formula, in exact arithmetic")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    sub.add_parser("fa", parents=[common], help="A_{N-1} eigenfunction series")
    sub.add_parser("fb", parents=[common], help="B_N eigenfunction series (branching formula)")
    sub.add_parser("branch-coeffs", parents=[common], help="table of branching coefficients")
    verify = sub.add_parser("verify", parents=[common], help="run the verification suite")
    verify.add_argument("--points", type=int, default=DEFAULT_POINTS, help="generic points per check (default: %(default)s)")
    verify.add_argument("--checks", default=None, help=f"comma separated subset of: {','.join(CHECKS)}")
    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """コマンドライン引数を `RunConfig` へ。誤りは `UsageError`。"""
    args = build_parser().parse_args(argv)
    try:
        q = None if args.q == RANDOM else parse_rational(args.q)
        if all(v == RANDOM for v in args.s):
            # "random" は 1 個でも成分ごとに N 個並べてもよい
            if len(args.s) not in (1, args.n):
                raise ValueError(f"--s needs 1 or {args.n} copies of {RANDOM!r} (got {len(args.s)})")
            s = None
        else:
            s = tuple(parse_rational(v) for v in args.s)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    checks = None
    if getattr(args, "checks", None):
        try:
            checks = select_checks(args.checks.split(","))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    seed = args.seed if args.seed is not None else _seed_default()
    return RunConfig(
        command=args.command,
        n=args.n,
        order=args.order,
        q=q,
        s=s,
        seed=seed,
        points=getattr(args, "points", DEFAULT_POINTS),
        format=args.format,
        output=args.output,
        checks=checks,
        verbose=args.verbose,
    )


def resolve_point(config: RunConfig) -> ParamPoint:
    """設定から一般点を作る。random 指定の成分は seed から引く。"""
    rng = np.random.default_rng(config.seed)
    p = random_point(config.n, config.order, rng, q=config.q, s=config.s, max_retries=DEFAULT_RETRIES)
    logger.info("parameter point: q=%s s=%s", format_rational(p.q), " ".join(format_rational(v) for v in p.s))
    return p


# ---- 出力 ----

def _dump_json(data: object) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _dump_csv(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def series_text(f: TruncatedSeries, fmt: str) -> str:
    if fmt == "json":
        return _dump_json(f.to_json())
    header = [f"x{i}" for i in range(1, f.n + 1)] + ["coefficient"]
    rows = [list(m) + [format_rational(c)] for m, c in f.terms.items()]
    return _dump_csv(header, rows)


def branch_table_text(p: ParamPoint, order: int, fmt: str) -> str:
    table = branch_table(p, order)
    if fmt == "json":
        return _dump_json({
            "n": p.n,
            "order": order,
            "params": p.to_json(),
            "coefficients": [{"theta": list(t), "coefficient": format_rational(e)} for t, e in table],
        })
    header = [f"theta{i}" for i in range(1, p.n + 1)] + ["coefficient"]
    return _dump_csv(header, [list(t) + [format_rational(e)] for t, e in table])


def reports_text(reports: Sequence[Report], fmt: str) -> str:
    if fmt == "json":
        return _dump_json([r.to_json() for r in reports])
    header = ["check", "n", "order", "seed", "pass", "trustedDegree", "params", "firstFailure"]
    rows = []
    for r in reports:
        d = r.to_json()
        rows.append([
            d["check"],
            d["n"],
            "" if d["order"] is None else d["order"],
            d["seed"],
            "true" if d["pass"] else "false",
            "" if d["trustedDegree"] is None else d["trustedDegree"],
            json.dumps(d["params"], ensure_ascii=False),
            "" if d["firstFailure"] is None else json.dumps(d["firstFailure"], ensure_ascii=False),
        ])
    return _dump_csv(header, rows)


def _emit(text: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(output, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def run(config: RunConfig) -> int:
    """1 回分の実行。成果物を書き出して終了コードを返す。

    `GenericityError` / `DegeneratePointError` はそのまま送出する（main が 2 に変換）。
    """
    if config.command == "verify":
        try:
            reports = run_suite(
                config.n,
                config.order,
                points=config.points,
                seed=config.seed,
                checks=config.checks,
                q=config.q,
                s=config.s,
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        _emit(reports_text(reports, config.format), config.output)
        failed = [r for r in reports if not r.passed]
        for r in failed:
            logger.error("%s failed: %s", r.check, r.first_failure)
        return EXIT_FAILED if failed else EXIT_OK

    p = resolve_point(config)
    if config.command == "fa":
        text = series_text(f_A_direct(p, config.order), config.format)
    elif config.command == "fb":
        text = series_text(f_B_branching(p, config.order), config.format)
    else:
        text = branch_table_text(p, config.order, config.format)
    _emit(text, config.output)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """エントリーポイント：引数解釈→実行→終了コード。"""
    try:
        config = parse_config(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if config.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return run(config)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except GenericityError as exc:
        logger.error("%s", exc)
        return EXIT_GENERICITY
    except DegeneratePointError as exc:
        logger.error("degenerate parameter point: %s", exc)
        return EXIT_GENERICITY
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n中断しました。", file=sys.stderr)
        sys.exit(130)
