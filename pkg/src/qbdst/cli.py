"""Command line: ``qbdst solve|verify|exact|gen|selftest``.

stdout carries ``key=value`` lines only; diagnostics go to stderr. Exit codes:
0 success, 1 verification failed, 2 invalid input, 3 internal invariant error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import certificate
from .errors import DSTError, InstanceError, InvariantError, LimitError
from .generators import (from_set_cover, greedy_hard, random_corpus,
                         random_quasi_bipartite, random_quasi_bipartite_m,
                         random_set_cover, set_cover_corpus)
from .instance import format_rational, load_instance, serialize_instance
from .oracle import brute_force_opt, exact_opt
from .solver import solve

OK, VERIFY_FAILED, BAD_INPUT, INTERNAL = 0, 1, 2, 3


def _emit(**pairs):
    for key, value in pairs.items():
        if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
            value = format_rational(value)
        print(f"{key}={value}")


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def cmd_solve(args):
    inst = load_instance(args.instance)
    res = solve(inst, checked=args.checked)
    _emit(cost=res.total_cost, lb=res.dual_lower_bound, bound=res.harmonic_bound,
          phases=res.phase_count, k=inst.k, arcs=len(res.solution_arcs))
    if args.cert:
        with open(args.cert, "w", encoding="utf-8") as fh:
            fh.write(certificate.dumps(res.certificate) + "\n")
    if args.solution:
        with open(args.solution, "w", encoding="utf-8") as fh:
            for e in res.solution_arcs:
                a = inst.arcs[e]
                fh.write(f"{a.tail + 1} {a.head + 1} {format_rational(a.cost)}\n")
    return OK


def cmd_verify(args):
    inst = load_instance(args.instance)
    try:
        with open(args.certificate, encoding="utf-8") as fh:
            cert = certificate.loads(fh.read())
    except (ValueError, KeyError, TypeError) as exc:
        _err(f"malformed certificate: {exc}")
        return BAD_INPUT
    report = certificate.verify(inst, cert)
    for c in report.checks:
        print(f"{c.name}={'pass' if c.ok else 'fail'}")
        if not c.ok and c.detail:
            _err(f"{c.name}: {c.detail}")
    _emit(verified="true" if report.ok else "false")
    return OK if report.ok else VERIFY_FAILED


def cmd_exact(args):
    inst = load_instance(args.instance)
    if args.brute:
        res = brute_force_opt(inst, m_limit=args.m_limit)
    else:
        res = exact_opt(inst, k_limit=args.k_limit)
    _emit(opt=res.opt_cost)
    return OK


def cmd_gen(args):
    if args.family == "setcover":
        inst = from_set_cover(random_set_cover(args.universe, args.sets,
                                               (args.cost_min, args.cost_max), args.seed))
    elif args.family == "greedyhard":
        inst = from_set_cover(greedy_hard(args.n))
    elif args.arcs is not None:
        inst = random_quasi_bipartite_m(args.terminals, args.steiner, args.arcs,
                                        (args.cost_min, args.cost_max), args.seed)
    else:
        inst = random_quasi_bipartite(args.terminals, args.steiner, Fraction(args.density),
                                      (args.cost_min, args.cost_max), args.seed)
    text = serialize_instance(inst)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return OK


def selftest(count, seed):
    """Solve, verify and sandwich-check a seeded corpus. Returns failure messages."""
    failures = []
    n_sc = max(1, count // 4)
    corpus = [("random", i, inst) for i, inst in enumerate(random_corpus(count, seed))]
    corpus += [("setcover", i, from_set_cover(sc))
               for i, sc in enumerate(set_cover_corpus(n_sc, seed + 1))]
    for family, i, inst in corpus:
        tag = f"{family}#{i}"
        try:
            res = solve(inst, checked=True)
            report = certificate.verify(inst, res)
            opt = exact_opt(inst).opt_cost
        except DSTError as exc:
            failures.append(f"{tag}: {exc}")
            continue
        if not report.ok:
            failures.append(f"{tag}: certificate checks failed: "
                            + ", ".join(c.name for c in report.failures))
        if not res.dual_lower_bound <= opt <= res.total_cost <= res.harmonic_bound:
            failures.append(f"{tag}: sandwich violated lb={res.dual_lower_bound} opt={opt} "
                            f"cost={res.total_cost} bound={res.harmonic_bound}")
    return len(corpus), failures


def cmd_selftest(args):
    total, failures = selftest(args.count, args.seed)
    for msg in failures:
        _err(msg)
    _emit(instances=total, failures=len(failures))
    return OK if not failures else VERIFY_FAILED


def build_parser():
    p = argparse.ArgumentParser(prog="qbdst", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run the approximation and report its bounds")
    s.add_argument("instance")
    s.add_argument("--cert", help="write the dual certificate (JSON) here")
    s.add_argument("--solution", help="write solution arcs here, one 'tail head cost' per line")
    s.add_argument("--checked", action="store_true", help="assert invariants after every event")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a certificate against an instance")
    v.add_argument("instance")
    v.add_argument("certificate")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("exact", help="exact optimum for small instances")
    e.add_argument("instance")
    e.add_argument("--k-limit", type=int, default=12)
    e.add_argument("--brute", action="store_true", help="enumerate arc subsets instead")
    e.add_argument("--m-limit", type=int, default=20)
    e.set_defaults(func=cmd_exact)

    g = sub.add_parser("gen", help="write a generated instance")
    g.add_argument("family", choices=["setcover", "random", "greedyhard"])
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.add_argument("--universe", type=int, default=5)
    g.add_argument("--sets", type=int, default=4)
    g.add_argument("--terminals", type=int, default=4)
    g.add_argument("--steiner", type=int, default=6)
    g.add_argument("--density", default="3/10", help="arc probability, e.g. 0.3 or 3/10")
    g.add_argument("--arcs", type=int, help="draw exactly this many arcs instead")
    g.add_argument("--cost-min", type=int, default=1)
    g.add_argument("--cost-max", type=int, default=20)
    g.add_argument("--n", type=int, default=4, help="greedyhard size")
    g.set_defaults(func=cmd_gen)

    t = sub.add_parser("selftest", help="solve+verify+exact on a seeded corpus")
    t.add_argument("--count", type=int, default=100)
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantError as exc:
        _err(f"internal invariant violated: {exc}")
        return INTERNAL
    except (InstanceError, LimitError, ValueError) as exc:
        _err(str(exc))
        return BAD_INPUT
    except OSError as exc:
        _err(str(exc))
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
