"""Command-line interface.

Subcommands: ``run`` (full pipeline), ``benchmark`` (quality versus samples for
hybrid and uniform sampling), ``evaluate`` (Monte Carlo f*), ``oracle`` (exact
values on tiny graphs), ``sample``/``greedy`` (dump R-samples and select seeds
from a dump offline) and ``generate`` (synthetic scale-free graphs).

Exit codes: 0 success, 1 usage error, 2 data error, 3 degenerate instance.
"""

import argparse
import csv
import io
import os
import sys
import time

from . import rng as rngmod
from .cascade import monte_carlo_f_star, monte_carlo_f_star_many
from .coverage import SampleStore, greedy
from .errors import DegenerateInstanceError, DomainError, HmpError
from .graph import check_seeds, from_networkx, read_edge_list, select_misinfo_seeds
from .hmp import format_manifest, hmp
from .oracle import exact_f_star, exact_opt
from .sampler import generate_rsamples, generate_uniform, read_rsamples, write_rsamples

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DEGENERATE = 3

CSV_COLUMNS = [
    "method",
    "samples",
    "sampling_seconds",
    "greedy_seconds",
    "f_star_mean",
    "f_star_stderr",
    "empty_sample_fraction",
]
METHODS = ("hybrid", "uniform")
DEFAULT_EVAL_SIMS = 10_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read_labels(text):
    labels = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        for tok in line.replace(",", " ").split():
            try:
                labels.append(int(tok))
            except ValueError:
                raise DomainError(f"node id {tok!r} is not an integer") from None
    return labels


def resolve_seed_list(graph, spec, role):
    """Turn a FILE path or an inline comma list of original ids into dense ids."""
    if os.path.exists(spec):
        with open(spec) as fh:
            labels = _read_labels(fh.read())
    elif all(c.isdigit() or c in ", -" for c in spec.strip()) and spec.strip():
        labels = _read_labels(spec)
    else:
        raise FileNotFoundError(f"{role} seed file not found: {spec}")
    return check_seeds(graph, [graph.index_of(lab) for lab in labels], role)


def resolve_misinfo(graph, spec, seed, influence_sims, candidate_factor):
    if spec.startswith("auto:"):
        try:
            count = int(spec[len("auto:"):])
        except ValueError:
            raise DomainError(f"bad misinformation seed spec {spec!r}") from None
        rng = rngmod.block_rng(seed, rngmod.MISINFO_SELECTION, 0)
        return select_misinfo_seeds(graph, count, influence_sims, rng, candidate_factor)
    return resolve_seed_list(graph, spec, "misinformation")


def _load_graph(args):
    if not os.path.exists(args.graph):
        raise FileNotFoundError(f"graph file not found: {args.graph}")
    return read_edge_list(args.graph, args.prob)


def _labels(graph, nodes):
    return " ".join(str(graph.labels[u]) for u in nodes)


def _write_output(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _sample_counts(text):
    try:
        counts = [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise DomainError(f"sample counts must be integers: {text!r}") from None
    if not counts:
        raise DomainError("no sample counts given")
    if any(c < 1 for c in counts):
        raise DomainError("sample counts must be at least 1")
    if any(b <= a for a, b in zip(counts, counts[1:])):
        raise DomainError("sample counts must be strictly ascending")
    return counts


def benchmark(graph, S_r, k, sample_counts, methods, seed, eval_sims=DEFAULT_EVAL_SIMS,
              workers=1, timings=True):
    """Quality of greedy seeds as the number of samples grows.

    Samples for each method are drawn incrementally from one random stream, so
    the run for ``c`` samples reuses the first samples of smaller counts.  All
    seed sets are scored together by the Monte Carlo evaluator with the same
    seed, and each score equals what ``evaluate`` reports for that set.
    Returns rows matching ``CSV_COLUMNS``.
    """
    if sample_counts and isinstance(sample_counts, str):
        sample_counts = _sample_counts(sample_counts)
    if not sample_counts or any(c < 1 for c in sample_counts):
        raise DomainError("sample counts must be at least 1")
    if any(b <= a for a, b in zip(sample_counts, sample_counts[1:])):
        raise DomainError("sample counts must be strictly ascending")
    rows = []
    for method in methods:
        if method not in METHODS:
            raise DomainError(f"unknown method {method!r}; expected one of {METHODS}")
        samples = []
        sampling = 0.0
        for count in sample_counts:
            t0 = time.perf_counter()
            if method == "hybrid":
                samples += generate_rsamples(graph, S_r, len(samples), count, seed,
                                             rngmod.FRAMEWORK, workers)
            else:
                samples += generate_uniform(graph, S_r, len(samples), count, seed,
                                            rngmod.UNIFORM, workers)
            sampling += time.perf_counter() - t0

            t1 = time.perf_counter()
            if method == "hybrid":
                store = SampleStore.from_rsamples(graph.n, samples)
                empty = sum(1 for p in store.sets if not p)
                empty_frac = empty / store.total_sets if store.total_sets else 0.0
            else:
                store = SampleStore.from_sets(graph.n, [s.nodes for s in samples])
                empty_frac = sum(1 for s in samples if s.empty) / len(samples)
            seeds = greedy(store, k).seeds
            greedy_time = time.perf_counter() - t1
            rows.append({
                "method": method,
                "samples": count,
                "sampling_seconds": f"{sampling:.3f}" if timings else "0.000",
                "greedy_seconds": f"{greedy_time:.3f}" if timings else "0.000",
                "seeds": seeds,
                "empty_sample_fraction": f"{empty_frac:.6f}",
            })
    distinct = sorted({tuple(r["seeds"]) for r in rows})
    scores = dict(zip(distinct, monte_carlo_f_star_many(graph, S_r, distinct, eval_sims,
                                                        seed, workers)))
    for r in rows:
        mean, se = scores[tuple(r.pop("seeds"))]
        r["f_star_mean"] = f"{mean:.6f}"
        r["f_star_stderr"] = f"{se:.6f}"
    return rows


def format_csv(rows):
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return out.getvalue()


def cmd_run(args):
    graph = _load_graph(args)
    S_r = resolve_misinfo(graph, args.misinfo_seeds, args.seed, args.influence_sims,
                          args.candidate_factor)
    N = args.big_n if args.big_n is not None else max(graph.n, 10)
    result = hmp(graph, S_r, args.k, args.epsilon, N, args.seed, args.workers,
                 fallback=args.fallback)
    manifest = format_manifest(graph, S_r, result, args.seed, timings=args.timings)
    if args.out:
        _write_output(manifest, args.out)
        print(_labels(graph, result.seeds))
    else:
        sys.stdout.write(manifest)
    if args.verbose:
        for phase, secs in result.timings.items():
            print(f"{phase}: {secs:.3f}s", file=sys.stderr)
    return EXIT_OK


def cmd_benchmark(args):
    graph = _load_graph(args)
    S_r = resolve_misinfo(graph, args.misinfo_seeds, args.seed, args.influence_sims,
                          args.candidate_factor)
    counts = _sample_counts(args.samples)
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    if methods == ["both"]:
        methods = list(METHODS)
    rows = benchmark(graph, S_r, args.k, counts, methods, args.seed, args.eval_sims,
                     args.workers, args.timings)
    _write_output(format_csv(rows), args.out)
    return EXIT_OK


def cmd_evaluate(args):
    graph = _load_graph(args)
    S_r = resolve_misinfo(graph, args.misinfo_seeds, args.seed, args.influence_sims,
                          args.candidate_factor)
    S = resolve_seed_list(graph, args.positive_seeds, "positive") if args.positive_seeds else []
    if args.sims < 1:
        raise DomainError("--sims must be at least 1")
    mean, se = monte_carlo_f_star(graph, S_r, S, args.sims, args.seed, args.workers)
    _write_output(f"f_star={mean:.6f} stderr={se:.6f} sims={args.sims}\n", args.out)
    return EXIT_OK


def cmd_oracle(args):
    graph = _load_graph(args)
    S_r = resolve_seed_list(graph, args.misinfo_seeds, "misinformation")
    if args.opt is not None:
        best, value = exact_opt(graph, S_r, args.opt)
        text = f"S_opt={_labels(graph, best)}\nf_star={value}\nf_star_float={float(value)!r}\n"
    else:
        S = resolve_seed_list(graph, args.positive_seeds, "positive") if args.positive_seeds else []
        value = exact_f_star(graph, S_r, S).value
        text = f"f_star={value}\nf_star_float={float(value)!r}\n"
    _write_output(text, args.out)
    return EXIT_OK


def cmd_sample(args):
    graph = _load_graph(args)
    S_r = resolve_misinfo(graph, args.misinfo_seeds, args.seed, args.influence_sims,
                          args.candidate_factor)
    counts = _sample_counts(args.samples)
    samples = generate_rsamples(graph, S_r, 0, counts[-1], args.seed, rngmod.FRAMEWORK,
                                args.workers)
    out = io.StringIO()
    write_rsamples(out, samples, graph.content_hash(), args.seed)
    _write_output(out.getvalue(), args.out)
    return EXIT_OK


def cmd_greedy(args):
    graph = _load_graph(args)
    if not os.path.exists(args.dump):
        raise FileNotFoundError(f"sample dump not found: {args.dump}")
    with open(args.dump) as fh:
        header, samples = read_rsamples(fh)
    if header.get("graph_hash") not in (None, graph.content_hash()):
        raise DomainError("sample dump was produced for a different graph")
    result = greedy(SampleStore.from_rsamples(graph.n, samples), args.k)
    _write_output(_labels(graph, result.seeds) + "\n", args.out)
    return EXIT_OK


def cmd_generate(args):
    import networkx as nx

    if args.nodes < 2 or not 1 <= args.attach < args.nodes:
        raise DomainError("need nodes >= 2 and 1 <= attach < nodes")
    g = from_networkx(nx.barabasi_albert_graph(args.nodes, args.attach, seed=args.seed))
    text = "".join(f"{g.labels[u]} {g.labels[v]}\n" for u, v, _ in g.edges())
    _write_output(text, args.out)
    return EXIT_OK


def _add_common(p, misinfo=True):
    p.add_argument("--graph", required=True, help="edge-list file ('u v' or 'u v p' lines)")
    p.add_argument("--prob", default="file",
                   help="probability model: uniform:P, wc (1/in-degree) or file (default)")
    if misinfo:
        p.add_argument("--misinfo-seeds", default="auto:15",
                       help="FILE of node ids or auto:K (top-K individual influence; default auto:15)")
        p.add_argument("--influence-sims", type=int, default=100,
                       help="simulations per candidate for auto seed selection (default 100)")
        p.add_argument("--candidate-factor", type=int, default=10,
                       help="auto selection simulates the top FACTOR*K nodes by out-degree")
    p.add_argument("--seed", type=int, default=0, help="master random seed (default 0)")
    p.add_argument("--workers", type=int, default=1, help="sampling processes (default 1)")
    p.add_argument("--out", default=None, help="output file (default stdout)")


def build_parser():
    parser = _Parser(prog="hybridmp", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="select positive seeds with the full guarantee")
    _add_common(p)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--epsilon", type=float, default=0.3)
    p.add_argument("--big-n", type=float, default=None,
                   help="confidence parameter N, success prob. >= 1-3/N (default max(n, 10))")
    p.add_argument("--fallback", action="store_true",
                   help="use OPT_L = k when the lower bound cannot be estimated")
    p.add_argument("--timings", action=argparse.BooleanOptionalAction, default=False,
                   help="include phase wall times in the manifest")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("benchmark", help="quality versus number of samples, CSV output")
    _add_common(p)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--samples", required=True, help="ascending sample counts, e.g. 10,100,1000")
    p.add_argument("--method", default="hybrid,uniform", help="hybrid, uniform or both")
    p.add_argument("--eval-sims", type=int, default=DEFAULT_EVAL_SIMS)
    p.add_argument("--timings", action=argparse.BooleanOptionalAction, default=True,
                   help="fill the timing columns (--no-timings writes zeros)")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("evaluate", help="Monte Carlo estimate of f*(S)")
    _add_common(p)
    p.add_argument("--positive-seeds", default="", help="FILE or comma list of node ids")
    p.add_argument("--sims", type=int, default=DEFAULT_EVAL_SIMS)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("oracle", help="exact f*(S) or optimum on tiny graphs")
    _add_common(p)
    p.add_argument("--positive-seeds", default="", help="FILE or comma list of node ids")
    p.add_argument("--opt", type=int, default=None, metavar="K",
                   help="report the best K-set instead")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sample", help="dump hybrid R-samples to a text file")
    _add_common(p)
    p.add_argument("--samples", required=True, help="number of R-samples")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("greedy", help="select seeds from an R-sample dump")
    _add_common(p, misinfo=False)
    p.add_argument("--dump", required=True)
    p.add_argument("--k", type=int, default=10)
    p.set_defaults(func=cmd_greedy)

    p = sub.add_parser("generate", help="write a Barabasi-Albert graph as an edge list")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--attach", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except DegenerateInstanceError as exc:
        print(f"degenerate instance: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except HmpError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
