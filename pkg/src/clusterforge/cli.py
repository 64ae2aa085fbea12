"""Command line surface; every command prints machine-readable JSON.

Exit codes: 0 for success or verified-true, 1 for verified-false (a
membership or check that came back negative), 2 for runtime errors and
64 for usage errors.  All randomized commands take --rng-seed and are
deterministic given the seed; the only environment knob is CF_THREADS.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import bounds, coxeter, double_bruhat, graphs, seeds, tropical
from .laurent import LaurentPoly, RatFunc

USAGE_ERROR = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _load_json_arg(value: str):
    """Accept inline JSON or a path to a JSON file."""
    text = value
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        path = Path(value)
        if not path.exists():
            raise ValueError(f"not valid JSON and not a file: {value!r}")
        return json.loads(path.read_text())


def _load_matrix(value: str) -> seeds.ExchangeMatrix:
    data = _load_json_arg(value)
    if isinstance(data, list):
        return seeds.ExchangeMatrix.make(data)
    return seeds.ExchangeMatrix.from_json(data)


def _parse_word(text: str) -> tuple:
    return tuple(int(x) for x in text.split())


def _emit(data) -> None:
    print(json.dumps(data, indent=2, sort_keys=True))


def _cmd_mutate(args) -> int:
    B = _load_matrix(args.matrix)
    for k in _parse_word(args.directions):
        B = seeds.matrix_mutate(B, k - 1)
    _emit(B.to_json())
    return 0


def _cmd_acyclic(args) -> int:
    B = _load_matrix(args.matrix)
    order = graphs.acyclic_order(B)
    _emit(
        {
            "acyclic": order is not None,
            "order": None if order is None else [i + 1 for i in order],
        }
    )
    return 0 if order is not None else 1


def _cmd_classify(args) -> int:
    B = _load_matrix(args.matrix)
    out = graphs.classify_finite_type(B, node_cap=args.node_cap)
    _emit(out.to_json())
    return 0 if out.verdict != "inconclusive" else 1


def _cmd_explore(args) -> int:
    B = _load_matrix(args.seed)
    rep = graphs.explore_exchange_graph(
        seeds.initial_seed(B), max_seeds=args.max_seeds
    )
    _emit(rep.to_json())
    return 0 if rep.exhausted else 1


def _cmd_btilde(args) -> int:
    cartan = coxeter.cartan_data(args.type)
    iw = double_bruhat.indexed_word(cartan, _parse_word(args.word))
    bt = double_bruhat.build_btilde(iw, cartan)
    check = double_bruhat.btilde_direct(iw, cartan)
    payload = bt.to_json()
    payload["direct_construction_agrees"] = bt.rows == check.rows
    payload["gamma_dot"] = double_bruhat.gamma_tilde_dot(
        double_bruhat.build_gamma_tilde(iw, cartan)
    )
    _emit(payload)
    return 0


def _closed_forms_for(cartan, word, choice):
    if choice == "none":
        return None
    if choice == "open-cell-a2":
        return double_bruhat.open_cell_a2_closed_forms()
    if choice == "coxeter":
        return double_bruhat.coxeter_cell_closed_forms(cartan)
    if choice == "auto":
        if cartan.name == "A2" and tuple(word) == (1, 2, 1, -1, -2, -1):
            return double_bruhat.open_cell_a2_closed_forms()
        if tuple(word) == double_bruhat.coxeter_cell_word(cartan):
            return double_bruhat.coxeter_cell_closed_forms(cartan)
        return None
    raise ValueError(f"unknown closed-form choice {choice!r}")


def _cmd_verify_cell(args) -> int:
    cartan = coxeter.cartan_data(args.type)
    word = _parse_word(args.word)
    rep = double_bruhat.verify_cell_identities(
        cartan,
        word,
        samples=args.samples,
        rng_seed=args.rng_seed,
        closed_forms=_closed_forms_for(cartan, word, args.closed_forms),
    )
    _emit(rep.to_json())
    return 0 if rep.ok else 1


def _cmd_tp_check(args) -> int:
    cartan = coxeter.cartan_data(args.type)
    rep = double_bruhat.tp_criterion_check(
        cartan,
        _parse_word(args.word),
        samples=args.samples,
        clusters=args.clusters,
        rng_seed=args.rng_seed,
    )
    _emit(rep.to_json())
    return 0 if rep.ok else 1


def _cmd_straighten(args) -> int:
    B = _load_matrix(args.matrix)
    seed = seeds.general_seed([list(r) for r in B.principal()])
    gctx = bounds.generator_context(seed)
    p = LaurentPoly.from_json(_load_json_arg(args.poly), gctx)
    out = bounds.straighten(p, seed)
    _emit(out.to_json())
    return 0


def _cmd_upper_member(args) -> int:
    B = _load_matrix(args.seed)
    seed = seeds.initial_seed(B)
    num = LaurentPoly.from_json(_load_json_arg(args.num), seed.ctx)
    if args.den:
        den = LaurentPoly.from_json(_load_json_arg(args.den), seed.ctx)
        y = RatFunc(num, den)
    else:
        y = num
    res = bounds.upper_bound_member(y, seed)
    _emit(res.to_json())
    return 0 if res.member else 1


def _cmd_tropical(args) -> int:
    B = _load_matrix(args.seed)
    seed = seeds.initial_seed(B)
    if args.delta is not None:
        witness = tropical.delta_witness(
            seed.matrix,
            radius=args.radius,
            delta0=[Fraction(x) for x in args.delta.split(",")],
        )
        _emit(witness.to_json())
        return 0 if witness.valid else 1
    v0 = tropical.Valuation.on_cluster(
        seed, [Fraction(x) for x in args.nu.split(",")]
    )
    out = tropical.propagate_valuation(seed, v0, depth=args.depth)
    _emit(out.to_json())
    return 0


def _cmd_diffcomb(args) -> int:
    ok = bounds.diffcomb_check(args.size)
    _emit({"size": args.size, "holds": ok})
    return 0 if ok else 1


def _cmd_roots(args) -> int:
    cartan = coxeter.cartan_data(args.type)
    _emit(
        {
            "type": cartan.name,
            "count": len(cartan.positive_roots),
            "positive_roots": [list(r) for r in cartan.positive_roots],
        }
    )
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="clusterforge")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mutate", help="apply matrix mutations (1-based directions)")
    p.add_argument("--matrix", required=True)
    p.add_argument("--directions", required=True)
    p.set_defaults(fn=_cmd_mutate)

    p = sub.add_parser("acyclic", help="test acyclicity and report an order")
    p.add_argument("--matrix", required=True)
    p.set_defaults(fn=_cmd_acyclic)

    p = sub.add_parser("classify", help="finite type classification by BFS")
    p.add_argument("--matrix", required=True)
    p.add_argument("--node-cap", type=int, default=100_000)
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("explore", help="exchange graph census")
    p.add_argument("--seed", required=True)
    p.add_argument("--max-seeds", type=int, default=10_000)
    p.set_defaults(fn=_cmd_explore)

    p = sub.add_parser("btilde", help="extended exchange matrix of a double word")
    p.add_argument("--type", required=True)
    p.add_argument("--word", required=True)
    p.set_defaults(fn=_cmd_btilde)

    p = sub.add_parser("verify-cell", help="verify exchange identities on samples")
    p.add_argument("--type", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--rng-seed", type=int, default=1)
    p.add_argument(
        "--closed-forms",
        choices=("auto", "open-cell-a2", "coxeter", "none"),
        default="auto",
    )
    p.set_defaults(fn=_cmd_verify_cell)

    p = sub.add_parser("tp-check", help="total positivity criteria on TP samples")
    p.add_argument("--type", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--clusters", type=int, default=10)
    p.add_argument("--rng-seed", type=int, default=1)
    p.set_defaults(fn=_cmd_tp_check)

    p = sub.add_parser("straighten", help="rewrite to standard monomials")
    p.add_argument("--matrix", required=True, help="principal exchange matrix")
    p.add_argument("--poly", required=True, help="polynomial in x_j, x_j' symbols")
    p.set_defaults(fn=_cmd_straighten)

    p = sub.add_parser("upper-member", help="upper bound membership with certificates")
    p.add_argument("--seed", required=True)
    p.add_argument("--num", required=True)
    p.add_argument("--den")
    p.set_defaults(fn=_cmd_upper_member)

    p = sub.add_parser("tropical", help="valuation propagation / delta witness")
    p.add_argument("--seed", required=True)
    p.add_argument("--nu", help="comma separated cluster weights")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--delta", help="comma separated initial delta triple")
    p.add_argument("--radius", type=int, default=4)
    p.set_defaults(fn=_cmd_tropical)

    p = sub.add_parser("diffcomb", help="verify the cyclic subset identity")
    p.add_argument("--size", type=int, required=True)
    p.set_defaults(fn=_cmd_diffcomb)

    p = sub.add_parser("roots", help="positive roots of a finite type")
    p.add_argument("--type", required=True)
    p.set_defaults(fn=_cmd_roots)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "tropical" and args.nu is None and args.delta is None:
        parser.error("tropical needs --nu or --delta")
    try:
        return args.fn(args)
    except (
        ValueError,
        KeyError,
        ArithmeticError,
        OSError,
        AssertionError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
