"""Command line interface.

Exit codes: 0 on success, 1 for input problems (missing or malformed
files, degenerate data, bad anchors), 2 for numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (AnchorError, ConvergenceError, DegenerateInputError,
                     InputError, StageError)
from .graph import build_graph, largest_weak_component
from .centrality import (PageRankParams, degree_scores, hits, pagerank,
                         modular_degree_ratio, top_k)
from .community import (MapEquationParams, ModularityParams,
                        community_profiles, infomap, louvain)
from .io import (parse_edges, parse_followership, parse_partition_csv,
                 parse_scores_csv, parse_tweets, write_csv, write_json)
from .pca import first_principal_component, node_score_array, score_accounts
from .pipeline import load_config, run_report
from .polarization import assortativity_report
from .synth import SyntheticSpec, generate_bundle
from .text import (chi_square, hashtag_top_per_community, keyword_subset,
                   unique_fraction, word_counts_by_class)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rtpol",
        description="Retweet-network polarization analytics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate inputs and print graph summary")
    p.add_argument("--edges", required=True, type=Path)
    p.add_argument("--json", type=Path, help="write the summary here instead of stdout")

    p = sub.add_parser("score", help="media-preference scores from followership")
    p.add_argument("--followership", required=True, type=Path)
    p.add_argument("--anchor", help="media label forced to a positive loading "
                                    "(default: first column)")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--loadings-out", type=Path)

    p = sub.add_parser("communities", help="community detection on the edge list")
    p.add_argument("--edges", required=True, type=Path)
    p.add_argument("--method", choices=("louvain", "infomap"), default="louvain")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=0.15)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--scores", type=Path, help="scores CSV for community profiles")
    p.add_argument("--profiles-out", type=Path)

    p = sub.add_parser("centrality", help="node centrality scores")
    p.add_argument("--edges", required=True, type=Path)
    p.add_argument("--measure", required=True,
                   choices=("pagerank", "hits", "indeg", "outdeg", "moddeg"))
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--topk", type=int, help="limit output to the k best nodes")
    p.add_argument("--partition", type=Path, help="partition CSV, needed for moddeg")
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("assort", help="dyad assortativity suite")
    p.add_argument("--edges", required=True, type=Path)
    p.add_argument("--scores", required=True, type=Path)
    p.add_argument("--permutations", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--drop-media-accounts", action="store_true",
                   help="remove the media accounts named by --followership first")
    p.add_argument("--followership", type=Path)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("text", help="tweet-content statistics")
    p.add_argument("--tweets", required=True, type=Path)
    p.add_argument("--scores", required=True, type=Path)
    p.add_argument("--keyword", action="append", default=[])
    p.add_argument("--partition", type=Path,
                   help="account partition CSV for per-community hashtags")
    p.add_argument("--out-dir", required=True, type=Path)

    p = sub.add_parser("synth", help="generate a planted synthetic bundle")
    p.add_argument("--out-dir", required=True, type=Path)
    p.add_argument("--n-left", type=int, default=500)
    p.add_argument("--n-right", type=int, default=500)
    p.add_argument("--p-in", type=float, default=0.02)
    p.add_argument("--p-out", type=float, default=0.001)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("report", help="run the full pipeline from a config file")
    p.add_argument("--config", required=True, type=Path)
    return parser


def _cmd_ingest(args) -> None:
    g = build_graph(parse_edges(args.edges))
    lwcc, _ = largest_weak_component(g)
    summary = {"n_nodes": g.n, "n_edges": g.n_edges, "n_retweets": g.w,
               "lwcc_nodes": lwcc.n, "lwcc_edges": lwcc.n_edges,
               "lwcc_retweets": lwcc.w}
    if args.json:
        write_json(args.json, summary)
    else:
        print(json.dumps(summary, indent=2, sort_keys=True))


def _cmd_score(args) -> None:
    matrix, dropped = parse_followership(args.followership)
    anchor = args.anchor or matrix.media[0]
    loadings = first_principal_component(matrix, anchor)
    scores = score_accounts(matrix, loadings)
    prov = f"anchor={anchor} dropped_zero_rows={dropped}"
    write_csv(args.out, ("account_id", "score", "class"),
              ((a, scores.scores[a], scores.classes[a])
               for a in sorted(scores.scores)), prov)
    if args.loadings_out:
        write_csv(args.loadings_out, ("media", "loading"),
                  zip(loadings.media, loadings.loadings),
                  prov + f" explained_variance={loadings.explained_variance!r}")


def _cmd_communities(args) -> None:
    g = build_graph(parse_edges(args.edges))
    if args.method == "louvain":
        part = louvain(g, ModularityParams(gamma=args.gamma), seed=args.seed)
    else:
        part = infomap(g, MapEquationParams(tau=args.tau), seed=args.seed)
    prov = f"method={args.method} gamma={args.gamma} tau={args.tau} seed={args.seed}"
    write_csv(args.out, ("node_id", "community"),
              ((g.ids[i], int(part.assignment[i])) for i in range(g.n)), prov)
    if args.profiles_out:
        if not args.scores:
            raise InputError("--profiles-out requires --scores")
        node_scores = node_score_array(parse_scores_csv(args.scores), g.ids)
        profs = community_profiles(part, node_scores)
        write_csv(args.profiles_out,
                  ("community", "size", "n_left", "n_right", "mean_score", "shannon"),
                  ((p.community, p.size, p.n_left, p.n_right, p.mean_score,
                    p.shannon) for p in profs), prov)


def _cmd_centrality(args) -> None:
    g = build_graph(parse_edges(args.edges))
    prov = f"measure={args.measure} damping={args.damping}"
    if args.measure == "moddeg":
        if not args.partition:
            raise InputError("--measure moddeg requires --partition")
        comm_of = parse_partition_csv(args.partition)
        try:
            assignment = [comm_of[ext] for ext in g.ids]
        except KeyError as exc:
            raise InputError(f"partition does not cover node {exc.args[0]!r}") from None
        ratios = modular_degree_ratio(g, assignment)
        write_csv(args.out, ("node_id", "inter_in", "intra_in", "ratio"),
                  ((g.ids[r.node], r.inter_in, r.intra_in, r.ratio)
                   for r in ratios), prov)
        return
    if args.measure == "pagerank":
        scores = [pagerank(g, PageRankParams(damping=args.damping, tol=args.tol))]
    elif args.measure == "hits":
        scores = list(hits(g, tol=args.tol))
    elif args.measure == "indeg":
        scores = [degree_scores(g, "in")]
    else:
        scores = [degree_scores(g, "out")]
    for cs in scores:
        out = args.out
        if len(scores) > 1:
            out = out.with_name(f"{out.stem}_{cs.kind}{out.suffix}")
        order = (top_k(cs, args.topk) if args.topk else range(g.n))
        write_csv(out, ("node_id", "score"),
                  ((g.ids[int(i)], float(cs.values[int(i)])) for i in order),
                  prov + f" kind={cs.kind}")


def _cmd_assort(args) -> None:
    g = build_graph(parse_edges(args.edges))
    node_scores = node_score_array(parse_scores_csv(args.scores), g.ids)
    drop: tuple[str, ...] = ()
    if args.drop_media_accounts:
        if not args.followership:
            raise InputError("--drop-media-accounts requires --followership "
                             "to name the media accounts")
        matrix, _ = parse_followership(args.followership)
        drop = matrix.media
    report = assortativity_report(g, node_scores, n_perm=args.permutations,
                                  seed=args.seed, drop_nodes=drop)
    payload = report.to_json_dict()
    payload["seed"] = args.seed
    payload["dropped_accounts"] = list(drop)
    write_json(args.out, payload)


def _cmd_text(args) -> None:
    corpus = parse_tweets(args.tweets)
    scores = parse_scores_csv(args.scores)
    out_dir = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    table = word_counts_by_class(corpus, scores)
    chi = chi_square(table)
    prov = f"excluded_tweets={table.n_excluded_tweets}"
    write_csv(out_dir / "word_counts.csv",
              ("token", "left_count", "right_count", "chi2"),
              ((r.token, r.f_left, r.f_right, r.chi2) for r in chi.rows), prov)
    if args.partition:
        community_of = parse_partition_csv(args.partition)
        covered = [rec for rec in corpus if rec.account in community_of]
        tags = hashtag_top_per_community(covered, community_of)
        write_csv(out_dir / "hashtags.csv", ("community", "hashtag", "count"),
                  ((c, tag, cnt) for c, (tag, cnt) in sorted(tags.items())),
                  prov + f" skipped_tweets={len(corpus) - len(covered)}")
    unique: dict = {"overall": {}, "keywords": {}}
    for side in ("left", "right"):
        stats = unique_fraction([r for r in corpus
                                 if scores.classes.get(r.account) == side])
        unique["overall"][side] = {"total": stats.total, "unique": stats.unique,
                                   "fraction": stats.fraction}
    for kw in args.keyword:
        sub = keyword_subset(corpus, kw)
        entry = {}
        for side in ("left", "right"):
            stats = unique_fraction([r for r in sub
                                     if scores.classes.get(r.account) == side])
            entry[side] = {"total": stats.total, "unique": stats.unique,
                           "fraction": stats.fraction}
        unique["keywords"][kw] = entry
    write_json(out_dir / "unique.json", unique)


def _cmd_synth(args) -> None:
    spec = SyntheticSpec(n_left=args.n_left, n_right=args.n_right,
                         p_in=args.p_in, p_out=args.p_out, seed=args.seed)
    bundle = generate_bundle(spec, args.out_dir)
    print(json.dumps({"edges": str(bundle.edges),
                      "followership": str(bundle.followership),
                      "tweets": str(bundle.tweets)}, indent=2, sort_keys=True))


def _cmd_report(args) -> None:
    manifest = run_report(load_config(args.config))
    print(json.dumps({"status": manifest["status"],
                      "stages": [s["name"] for s in manifest["stages"]]},
                     indent=2, sort_keys=True))


_COMMANDS = {
    "ingest": _cmd_ingest,
    "score": _cmd_score,
    "communities": _cmd_communities,
    "centrality": _cmd_centrality,
    "assort": _cmd_assort,
    "text": _cmd_text,
    "synth": _cmd_synth,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc.cause, ConvergenceError) else 1
    except (InputError, DegenerateInputError, AnchorError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
