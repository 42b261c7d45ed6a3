"""End-to-end report pipeline.

Runs ingest, largest-component reduction, media scoring, centralities,
community detection, community profiles, the assortativity suite, and the
text suite, writing one or more CSV/JSON files per stage plus a manifest
with input hashes, seeds, parameters and wall-clock times. Stage outputs
are written under a .partial suffix and renamed on stage completion, so an
aborted run leaves completed stages intact and the failing stage's files
clearly marked.

The output directory can be overridden with the RTPOL_OUT_DIR environment
variable. Analytical outputs are deterministic for a fixed config and
seed; wall-clock times live only in the manifest.
"""

from __future__ import annotations

import hashlib
import os
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .errors import InputError, StageError
from .graph import build_graph, largest_weak_component
from .centrality import (PageRankParams, degree_scores, hits, pagerank,
                         modular_degree_ratio, top_k)
from .community import (DEFAULT_GAMMA_GRID, MapEquationParams,
                        ModularityParams, community_profiles, infomap,
                        louvain, map_equation, modularity, resolution_sweep)
from .io import (parse_edges, parse_followership, parse_tweets, write_csv,
                 write_json)
from .pca import first_principal_component, node_score_array, score_accounts
from .polarization import assortativity_report
from .rng import derive_seed
from .text import (chi_square, hashtag_top_per_community, keyword_subset,
                   unique_fraction, word_counts_by_class)

ENV_OUT_DIR = "RTPOL_OUT_DIR"

STAGES = ("ingest", "lwcc", "scores", "centrality", "communities",
          "profiles", "assortativity", "text")

_CONFIG_KEYS = {"edges", "followership", "tweets", "out_dir", "anchor",
                "gammas", "tau", "n_perm", "seed", "size_floor", "top_k",
                "keywords", "drop_media_accounts"}


@dataclass(frozen=True)
class PipelineConfig:
    edges: Path
    followership: Path
    tweets: Path | None
    out_dir: Path
    anchor: str | None = None
    gammas: tuple[float, ...] = DEFAULT_GAMMA_GRID
    tau: float = 0.15
    n_perm: int = 100_000
    seed: int = 0
    size_floor: int | None = None
    top_k: int = 20
    keywords: tuple[str, ...] = ()
    drop_media_accounts: bool = False


def load_config(path: str | Path) -> PipelineConfig:
    """Flat key=value config file; '#' starts a comment line."""
    path = Path(path)
    raw: dict[str, str] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise InputError("expected key=value", path=path, line=lineno)
            key, value = line.split("=", 1)
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise InputError(f"unknown config key {key!r}", path=path, line=lineno)
            raw[key] = value.strip()
    for required in ("edges", "followership", "out_dir"):
        if required not in raw:
            raise InputError(f"config is missing required key {required!r}", path=path)

    def parse_num(key: str, conv, default):
        if key not in raw:
            return default
        try:
            return conv(raw[key])
        except ValueError:
            raise InputError(f"config key {key!r} has invalid value {raw[key]!r}",
                             path=path) from None

    gammas = DEFAULT_GAMMA_GRID
    if "gammas" in raw:
        try:
            gammas = tuple(float(v) for v in raw["gammas"].split(",") if v.strip())
        except ValueError:
            raise InputError(f"config key 'gammas' has invalid value {raw['gammas']!r}",
                             path=path) from None
        if not gammas:
            raise InputError("config key 'gammas' must list at least one value",
                             path=path)
    keywords = tuple(k.strip() for k in raw.get("keywords", "").split(",")
                     if k.strip())
    size_floor = None
    if raw.get("size_floor", "auto").lower() != "auto":
        size_floor = parse_num("size_floor", int, None)
    drop = raw.get("drop_media_accounts", "false").lower()
    if drop not in ("true", "false", "0", "1"):
        raise InputError("config key 'drop_media_accounts' must be true or false",
                         path=path)
    return PipelineConfig(
        edges=Path(raw["edges"]),
        followership=Path(raw["followership"]),
        tweets=Path(raw["tweets"]) if "tweets" in raw else None,
        out_dir=Path(os.environ.get(ENV_OUT_DIR, raw["out_dir"])),
        anchor=raw.get("anchor"),
        gammas=gammas,
        tau=parse_num("tau", float, 0.15),
        n_perm=parse_num("n_perm", int, 100_000),
        seed=parse_num("seed", int, 0),
        size_floor=size_floor,
        top_k=parse_num("top_k", int, 20),
        keywords=keywords,
        drop_media_accounts=drop in ("true", "1"),
    )


def auto_size_floor(n_nodes: int) -> int:
    """Default reporting floor: 1000, scaled down for small graphs."""
    if n_nodes < 10_000:
        return max(10, n_nodes // 200)
    return 1000


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


class _StageWriter:
    """Writes stage outputs under .partial names, renames on completion."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.pending: list[tuple[Path, Path]] = []
        self.written: list[str] = []

    def path(self, name: str) -> Path:
        final = self.out_dir / name
        partial = self.out_dir / (name + ".partial")
        self.pending.append((partial, final))
        return partial

    def commit(self) -> list[str]:
        for partial, final in self.pending:
            os.replace(partial, final)
        names = [final.name for _, final in self.pending]
        self.pending.clear()
        return names


def run_report(config: PipelineConfig) -> dict:
    """Run all stages; returns the manifest dictionary.

    Raises StageError naming the first stage that failed; outputs written
    before the failure stay on disk, the failing stage's files keep their
    .partial suffix.
    """
    out_dir = Path(os.environ.get(ENV_OUT_DIR, config.out_dir))
    out_dir.mkdir(parents=True, exist_ok=True)
    writer = _StageWriter(out_dir)
    seed = config.seed
    manifest: dict = {
        "package": "rtpol",
        "version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "seed": seed,
        "params": {
            "anchor": config.anchor,
            "gammas": list(config.gammas),
            "tau": config.tau,
            "n_perm": config.n_perm,
            "size_floor": config.size_floor,
            "top_k": config.top_k,
            "keywords": list(config.keywords),
            "drop_media_accounts": config.drop_media_accounts,
        },
        "inputs": {},
        "stages": [],
    }
    state: dict = {}

    def run_stage(name: str, fn) -> None:
        start = time.perf_counter()
        try:
            fn()
        except Exception as exc:
            manifest["stages"].append({"name": name, "status": "failed",
                                       "error": str(exc)})
            manifest["status"] = "aborted"
            write_json(out_dir / "manifest.json.partial", manifest)
            raise StageError(name, exc) from exc
        manifest["stages"].append({
            "name": name,
            "status": "complete",
            "seconds": time.perf_counter() - start,
            "outputs": writer.commit(),
        })

    prov = f"seed={seed} tau={config.tau} n_perm={config.n_perm}"

    def stage_ingest():
        if not config.edges.exists():
            raise InputError(f"edges file {config.edges} does not exist")
        manifest["inputs"]["edges"] = _sha256(config.edges)
        records = parse_edges(config.edges)
        g = build_graph(records)
        state["g_full"] = g
        write_json(writer.path("ingest.json"), {
            "n_nodes": g.n, "n_edges": g.n_edges, "n_retweets": g.w,
            "seed": seed})

    def stage_lwcc():
        g_full = state["g_full"]
        g, mapping = largest_weak_component(g_full)
        state["g"] = g
        write_json(writer.path("lwcc.json"), {
            "n_nodes": g.n, "n_edges": g.n_edges, "n_retweets": g.w,
            "n_dropped_nodes": g_full.n - g.n, "seed": seed})
        write_csv(writer.path("nodes.csv"), ("index", "node_id"),
                  ((i, ext) for i, ext in enumerate(g.ids)), prov)

    def stage_scores():
        if not config.followership.exists():
            raise InputError(f"followership file {config.followership} does not exist")
        manifest["inputs"]["followership"] = _sha256(config.followership)
        matrix, dropped = parse_followership(config.followership)
        anchor = config.anchor or matrix.media[0]
        loadings = first_principal_component(matrix, anchor)
        scores = score_accounts(matrix, loadings)
        state["media_labels"] = list(matrix.media)
        state["scores"] = scores
        state["node_scores"] = node_score_array(scores, state["g"].ids)
        write_csv(writer.path("loadings.csv"), ("media", "loading"),
                  zip(loadings.media, loadings.loadings),
                  prov + f" anchor={anchor}"
                  f" explained_variance={loadings.explained_variance!r}"
                  f" dropped_zero_rows={dropped}")
        write_csv(writer.path("scores.csv"), ("account_id", "score", "class"),
                  ((a, scores.scores[a], scores.classes[a])
                   for a in sorted(scores.scores)), prov)

    def stage_centrality():
        g = state["g"]
        pr = pagerank(g, PageRankParams())
        hub, auth = hits(g)
        indeg = degree_scores(g, "in")
        outdeg = degree_scores(g, "out")
        for cs in (pr, hub, auth, indeg, outdeg):
            write_csv(writer.path(f"centrality_{cs.kind}.csv"),
                      ("node_id", "score"),
                      ((g.ids[i], float(cs.values[i])) for i in range(g.n)),
                      prov)
        rows = []
        for cs in (pr, hub, auth, indeg, outdeg):
            for rank, i in enumerate(top_k(cs, config.top_k), start=1):
                rows.append((cs.kind, rank, g.ids[i], float(cs.values[i])))
        write_csv(writer.path("rankings.csv"),
                  ("measure", "rank", "node_id", "score"), rows, prov)
        state["pr"] = pr

    def stage_communities():
        g = state["g"]
        part_l = louvain(g, ModularityParams(gamma=1.0),
                         seed=derive_seed(seed, 20))
        part_i = infomap(g, MapEquationParams(tau=config.tau),
                         seed=derive_seed(seed, 21))
        state["part_louvain"] = part_l
        state["part_infomap"] = part_i
        q = modularity(g, part_l, ModularityParams(gamma=1.0))
        ell = map_equation(g, part_i, MapEquationParams(tau=config.tau))
        for name, part in (("louvain", part_l), ("infomap", part_i)):
            write_csv(writer.path(f"partition_{name}.csv"),
                      ("node_id", "community"),
                      ((g.ids[i], int(part.assignment[i])) for i in range(g.n)),
                      prov)
        floor = (config.size_floor if config.size_floor is not None
                 else auto_size_floor(g.n))
        state["size_floor"] = floor
        sweep = resolution_sweep(g, state["node_scores"], config.gammas,
                                 seed=derive_seed(seed, 22), size_floor=floor)
        rows = []
        for gamma, entries in sweep:
            for comm, size, mean in entries:
                rows.append((gamma, comm, size, mean))
        write_csv(writer.path("sweep.csv"),
                  ("gamma", "community", "size", "mean_score"), rows,
                  prov + f" size_floor={floor}")
        write_json(writer.path("communities.json"), {
            "louvain": {"k": part_l.k, "modularity": q},
            "infomap": {"k": part_i.k, "description_length_bits": ell},
            "size_floor": floor, "seed": seed})

    def stage_profiles():
        g = state["g"]
        node_scores = state["node_scores"]
        for name in ("louvain", "infomap"):
            profs = community_profiles(state[f"part_{name}"], node_scores)
            write_csv(writer.path(f"profiles_{name}.csv"),
                      ("community", "size", "n_left", "n_right",
                       "mean_score", "shannon"),
                      ((p.community, p.size, p.n_left, p.n_right,
                        p.mean_score, p.shannon) for p in profs), prov)
        ratios = modular_degree_ratio(g, state["part_louvain"].assignment)
        indeg_rank = np.argsort(-g.in_strength, kind="stable")[:config.top_k]
        write_csv(writer.path("modular_degree.csv"),
                  ("node_id", "in_degree", "inter_in", "intra_in", "ratio"),
                  ((g.ids[int(i)], int(g.in_strength[int(i)]),
                    ratios[int(i)].inter_in, ratios[int(i)].intra_in,
                    ratios[int(i)].ratio) for i in indeg_rank), prov)

    def stage_assortativity():
        g = state["g"]
        drop = state["media_labels"] if config.drop_media_accounts else ()
        report = assortativity_report(g, state["node_scores"],
                                      n_perm=config.n_perm,
                                      seed=derive_seed(seed, 23),
                                      drop_nodes=drop)
        payload = report.to_json_dict()
        payload["seed"] = seed
        payload["dropped_accounts"] = list(drop)
        write_json(writer.path("assortativity.json"), payload)

    def stage_text():
        if config.tweets is None:
            raise InputError("no tweets file configured")
        if not config.tweets.exists():
            raise InputError(f"tweets file {config.tweets} does not exist")
        manifest["inputs"]["tweets"] = _sha256(config.tweets)
        corpus = parse_tweets(config.tweets)
        scores = state["scores"]
        table = word_counts_by_class(corpus, scores)
        chi = chi_square(table)
        write_csv(writer.path("word_counts.csv"),
                  ("token", "left_count", "right_count", "chi2"),
                  ((r.token, r.f_left, r.f_right, r.chi2) for r in chi.rows),
                  prov + f" excluded_tweets={table.n_excluded_tweets}")
        g = state["g"]
        part = state["part_louvain"]
        community_of = {g.ids[i]: int(part.assignment[i]) for i in range(g.n)}
        covered = [rec for rec in corpus if rec.account in community_of]
        tags = hashtag_top_per_community(covered, community_of)
        write_csv(writer.path("hashtags.csv"),
                  ("community", "hashtag", "count"),
                  ((c, tag, cnt) for c, (tag, cnt) in sorted(tags.items())),
                  prov + f" skipped_tweets={len(corpus) - len(covered)}")
        by_class: dict[str, list] = {"left": [], "right": []}
        for rec in corpus:
            side = scores.classes.get(rec.account)
            if side in by_class:
                by_class[side].append(rec)
        unique: dict = {"overall": {}, "keywords": {}, "seed": seed}
        for side, subset in by_class.items():
            stats = unique_fraction(subset)
            unique["overall"][side] = {"total": stats.total,
                                       "unique": stats.unique,
                                       "fraction": stats.fraction}
        for kw in config.keywords:
            sub = keyword_subset(corpus, kw)
            entry = {}
            for side in ("left", "right"):
                stats = unique_fraction([r for r in sub
                                         if scores.classes.get(r.account) == side])
                entry[side] = {"total": stats.total, "unique": stats.unique,
                               "fraction": stats.fraction}
            unique["keywords"][kw] = entry
        write_json(writer.path("unique.json"), unique)

    for name, fn in zip(STAGES, (stage_ingest, stage_lwcc, stage_scores,
                                 stage_centrality, stage_communities,
                                 stage_profiles, stage_assortativity,
                                 stage_text)):
        run_stage(name, fn)

    manifest["status"] = "complete"
    write_json(out_dir / "manifest.json", manifest)
    return manifest
