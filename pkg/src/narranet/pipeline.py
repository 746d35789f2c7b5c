"""End-to-end orchestration: config, stages, artifacts and the run manifest.

A run is fully determined by its config file and input files: every random
choice flows from the single ``master_seed`` through a documented per-module
derivation (SHA-256 of ``"<master_seed>:<label>"``), no stage consults the
clock, and all artifacts are written with sorted keys. Re-running an
identical config over identical inputs therefore reproduces every output
byte for byte, which the manifest (config echo plus input/output checksums)
makes checkable.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from collections import Counter
from dataclasses import asdict, dataclass, field
from datetime import timedelta
from pathlib import Path

import numpy as np

from . import __version__
from . import clustering, communities, graph, grouping, ingest, metrics, news, synthetic

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "NARRANET_OUTPUT_DIR"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_STAGE = 4

STAGES = (
    "ingest",
    "group",
    "cluster",
    "graph",
    "communities",
    "newsnet",
    "coverage",
    "evaluate",
)


class ConfigError(ValueError):
    """Invalid configuration (exit code 2)."""


class InputError(ValueError):
    """Missing or unusable input file (exit code 3)."""


class StaleArtifactError(RuntimeError):
    """Upstream stage artifact was produced under a different config."""


def derive_seed(master_seed: int, label: str) -> int:
    """Per-module seed: first 8 bytes of SHA-256("<master>:<label>")."""
    digest = hashlib.sha256(f"{master_seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big") % (2**32)


@dataclass
class RunConfig:
    social_tuples: str = ""
    news_tuples: str = ""
    embeddings: str = ""
    seeds: str = ""
    stopwords: str = ""
    aliases: str = ""
    truth: str = ""
    output_dir: str = "out"
    master_seed: int = 1234
    kmeans_seed: int | None = None
    community_seed: int | None = None
    metric_seed: int | None = None
    min_cooc: int = 3
    k_override: int | None = None
    distance: str = "euclidean"
    min_edge_weight: int = 2
    allow_self_loops: bool = False
    directed_export: bool = False
    runs: int = 100
    tau_core: float = 0.9
    tau_relax: float = 0.5
    width: int = 5
    shift: int = 1
    top_tfidf: int = 25
    top_freq: int = 100
    attachment_pairs: list[list[str]] = field(default_factory=list)
    baseline_samples: int = 20
    baseline_size: int = 500
    max_lag: int = 7
    smooth_width: int = 5
    top_communities: int = 5
    coverage_mode: str = "labels"
    workers: int = 1
    simulate: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.min_cooc < 1:
            raise ConfigError(f"min_cooc must be >= 1, got {self.min_cooc}")
        if self.min_edge_weight < 1:
            raise ConfigError(f"min_edge_weight must be >= 1, got {self.min_edge_weight}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if not 0 < self.tau_relax <= self.tau_core <= 1:
            raise ConfigError(
                f"need 0 < tau_relax <= tau_core <= 1, got {self.tau_relax}, {self.tau_core}"
            )
        if self.width < 1 or self.shift < 1:
            raise ConfigError("width and shift must be >= 1")
        if self.distance not in ("euclidean", "cosine"):
            raise ConfigError(f"distance must be euclidean or cosine, got {self.distance!r}")
        if self.max_lag < 0:
            raise ConfigError(f"max_lag must be >= 0, got {self.max_lag}")
        if self.baseline_samples < 1 or self.baseline_size < 1:
            raise ConfigError("baseline_samples and baseline_size must be >= 1")
        if self.smooth_width < 1:
            raise ConfigError("smooth_width must be >= 1")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.k_override is not None and self.k_override < 1:
            raise ConfigError(f"k_override must be >= 1, got {self.k_override}")
        if self.coverage_mode not in ("labels", "phrases"):
            raise ConfigError(f"coverage_mode must be labels or phrases")

    @classmethod
    def from_file(cls, path: str | Path, overrides: dict | None = None) -> "RunConfig":
        try:
            payload = json.loads(Path(path).read_text("utf-8"))
        except FileNotFoundError as exc:
            raise InputError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(payload, dict):
            raise ConfigError("config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(payload) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        payload.update({k: v for k, v in (overrides or {}).items() if v is not None})
        try:
            cfg = cls(**payload)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        env_out = os.environ.get(OUTPUT_DIR_ENV)
        if env_out:
            cfg.output_dir = env_out
        cfg.validate()
        return cfg

    def canonical(self) -> dict:
        return json.loads(json.dumps(asdict(self), sort_keys=True))

    def config_hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.canonical(), sort_keys=True).encode()
        ).hexdigest()


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8")


def _require(path: str, what: str) -> Path:
    if not path:
        raise InputError(f"config does not name a {what} file")
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{what} file not found: {p}")
    return p


class PipelineRun:
    """Shared state across stages of one run directory."""

    def __init__(self, config: RunConfig):
        config.validate()
        self.config = config
        self.out = Path(config.output_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self._social: ingest.Corpus | None = None
        self._news: ingest.Corpus | None = None
        self._embeddings: ingest.EmbeddingTable | None = None
        self._seeds: ingest.SeedEntityList | None = None
        self._stops: set[str] | None = None
        self._aliases: ingest.AliasMap | None = None

    # -- run-state bookkeeping -------------------------------------------

    def _state_path(self) -> Path:
        return self.out / "run_state.json"

    def _load_state(self) -> dict:
        path = self._state_path()
        if path.is_file():
            return json.loads(path.read_text("utf-8"))
        return {"stages": {}}

    def _record_stage(self, stage: str, outputs: list[Path]) -> None:
        state = self._load_state()
        state["stages"][stage] = {
            "config_hash": self.config.config_hash(),
            "outputs": {str(p.relative_to(self.out)): _sha256(p) for p in sorted(outputs)},
        }
        _write_json(self._state_path(), state)

    def check_upstream(self, stage: str, force: bool = False) -> None:
        """Refuse to run a stage over artifacts from a different config."""
        state = self._load_state()
        for upstream in STAGES[: STAGES.index(stage)]:
            entry = state["stages"].get(upstream)
            if entry is None:
                continue
            if entry["config_hash"] != self.config.config_hash():
                if force:
                    logger.warning("stage %s: stale upstream %s overridden by --force", stage, upstream)
                    continue
                raise StaleArtifactError(
                    f"stage {upstream!r} artifacts were built with a different config; "
                    "re-run it or pass --force"
                )

    # -- lazily loaded inputs --------------------------------------------

    def social(self) -> ingest.Corpus:
        if self._social is None:
            path = _require(self.config.social_tuples, "social tuples")
            self._social = ingest.load_tuples(path, "social")
        return self._social

    def news_corpus(self) -> ingest.Corpus:
        if self._news is None:
            path = _require(self.config.news_tuples, "news tuples")
            self._news = ingest.load_tuples(path, "news")
        return self._news

    def embeddings(self) -> ingest.EmbeddingTable:
        if self._embeddings is None:
            path = _require(self.config.embeddings, "embeddings")
            self._embeddings = ingest.load_embeddings(path)
        return self._embeddings

    def seeds(self) -> ingest.SeedEntityList:
        if self._seeds is None:
            path = _require(self.config.seeds, "seed list")
            self._seeds = ingest.load_seed_entities(path)
        return self._seeds

    def stops(self) -> set[str]:
        if self._stops is None:
            if self.config.stopwords:
                self._stops = ingest.load_stop_words(_require(self.config.stopwords, "stop list"))
            else:
                self._stops = ingest.default_stop_words()
        return self._stops

    def alias_map(self) -> ingest.AliasMap:
        if self._aliases is None:
            if self.config.aliases:
                self._aliases = ingest.load_aliases(_require(self.config.aliases, "alias map"))
            else:
                self._aliases = ingest.AliasMap()
        return self._aliases

    # -- stages ------------------------------------------------------------

    def stage_ingest(self) -> list[Path]:
        # fail fast on every configured input, not just the ones read here
        for name in ("embeddings", "stopwords", "aliases", "truth"):
            value = getattr(self.config, name)
            if value:
                _require(value, name)
        social = self.social()
        stats = {
            "social": {
                "tuples": len(social.tuples),
                "malformed": social.malformed_count,
                "vocabulary_size": len(social.vocabulary),
                "date_span": [
                    social.t_min.isoformat() if social.t_min else None,
                    social.t_max.isoformat() if social.t_max else None,
                ],
            },
            "seeds": len(self.seeds()),
        }
        if self.config.news_tuples:
            news_c = self.news_corpus()
            stats["news"] = {
                "tuples": len(news_c.tuples),
                "malformed": news_c.malformed_count,
                "vocabulary_size": len(news_c.vocabulary),
                "date_span": [
                    news_c.t_min.isoformat() if news_c.t_min else None,
                    news_c.t_max.isoformat() if news_c.t_max else None,
                ],
            }
        out = self.out / "ingest.json"
        _write_json(out, stats)
        self._record_stage("ingest", [out])
        return [out]

    def stage_group(self) -> list[Path]:
        corpus = self.social()
        pair_counts = grouping.seed_cooccurrence(corpus, self.seeds())
        groups = grouping.form_groups(self.seeds(), pair_counts, self.config.min_cooc)
        assignment, groups = grouping.assign_phrases(corpus, groups)
        payload = {
            "min_cooc": self.config.min_cooc,
            "groups": [
                {
                    "id": g.id,
                    "seeds": sorted(g.seeds),
                    "members": sorted(g.member_phrases),
                    "frequency": g.frequency,
                }
                for g in groups
            ],
        }
        out = self.out / "groups.json"
        _write_json(out, payload)
        self._record_stage("group", [out])
        return [out]

    def _load_groups(self) -> list[grouping.ContextualGroup]:
        path = self.out / "groups.json"
        if not path.is_file():
            raise InputError(f"groups artifact missing: {path}; run the group stage first")
        payload = json.loads(path.read_text("utf-8"))
        return [
            grouping.ContextualGroup(
                id=g["id"],
                seeds=frozenset(g["seeds"]),
                member_phrases=frozenset(g["members"]),
                frequency=g["frequency"],
            )
            for g in payload["groups"]
        ]

    def _seed(self, label: str, explicit: int | None = None) -> int:
        return explicit if explicit is not None else derive_seed(self.config.master_seed, label)

    def stage_cluster(self) -> list[Path]:
        groups = self._load_groups()
        seed = self._seed("kmeans", self.config.kmeans_seed)
        subnodes = clustering.cluster_groups(
            groups,
            self.embeddings(),
            seed=seed,
            k_override=self.config.k_override,
            distance=self.config.distance,
        )
        subnodes = clustering.label_tfidf(subnodes, self.social())
        subnodes = clustering.score_subnodes(subnodes, self.social(), self.seeds())
        payload = [
            {
                "id": sn.id,
                "group": sn.group_id,
                "label": list(sn.label),
                "ner_score": sn.ner_score,
                "members": list(sn.member_phrases),
                "centroid": [float(x) for x in sn.centroid],
            }
            for sn in subnodes
        ]
        out = self.out / "subnodes.json"
        _write_json(out, payload)
        self._record_stage("cluster", [out])
        return [out]

    def _load_subnodes(self) -> list[clustering.Subnode]:
        path = self.out / "subnodes.json"
        if not path.is_file():
            raise InputError(f"subnodes artifact missing: {path}; run the cluster stage first")
        payload = json.loads(path.read_text("utf-8"))
        return [
            clustering.Subnode(
                id=sn["id"],
                group_id=sn["group"],
                member_phrases=tuple(sn["members"]),
                centroid=np.array(sn["centroid"]),
                label=tuple(sn["label"]),
                ner_score=sn["ner_score"],
            )
            for sn in payload
        ]

    def stage_graph(self) -> list[Path]:
        subnodes = self._load_subnodes()
        index = clustering.subnode_index(subnodes)
        g = graph.build_graph(
            self.social(), index, subnodes, allow_self_loops=self.config.allow_self_loops
        )
        g = graph.threshold_edges(g, self.config.min_edge_weight)
        out_xml = self.out / "graph.graphml"
        out_json = self.out / "graph.json"
        graph.write_graphml(g, out_xml, directed=self.config.directed_export)
        graph.write_graph_json(g, out_json)
        self._record_stage("graph", [out_xml, out_json])
        return [out_xml, out_json]

    def _load_graph(self) -> graph.NarrativeGraph:
        subnodes = self._load_subnodes()
        index = clustering.subnode_index(subnodes)
        g = graph.build_graph(
            self.social(), index, subnodes, allow_self_loops=self.config.allow_self_loops
        )
        return graph.threshold_edges(g, self.config.min_edge_weight)

    def stage_communities(self) -> list[Path]:
        g = self._load_graph()
        cset = communities.ensemble_communities(
            g,
            runs=self.config.runs,
            tau_core=self.config.tau_core,
            tau_relax=self.config.tau_relax,
            seed=self._seed("communities", self.config.community_seed),
            workers=self.config.workers,
        )
        cset = communities.label_communities(cset, g)
        out = self.out / "communities.json"
        _write_json(out, communities.communities_to_json(cset))
        out_xml = self.out / "graph_communities.graphml"
        graph.write_graphml(g, out_xml, communities=cset.node_index)
        self._record_stage("communities", [out, out_xml])
        return [out, out_xml]

    def _load_communities(self) -> communities.CommunitySet:
        path = self.out / "communities.json"
        if not path.is_file():
            raise InputError(f"communities artifact missing: {path}; run the communities stage first")
        payload = json.loads(path.read_text("utf-8"))
        params = payload["parameters"]
        cset = communities.CommunitySet(
            communities=[
                communities.Community(
                    id=c["id"],
                    core=frozenset(c["core"]),
                    peripheral=frozenset(c["peripheral"]),
                    label=c["label"],
                )
                for c in payload["communities"]
            ],
            runs=params["runs"],
            tau_core=params["tau_core"],
            tau_relax=params["tau_relax"],
            seed=params["seed"],
        )
        cset.rebuild_index()
        return cset

    def _news_networks(self) -> tuple[list[news.WindowSegment], list[news.CooccurrenceNetwork]]:
        news_c = self.news_corpus()
        if news_c.t_min is None:
            raise InputError("news corpus has no dated tuples")
        segments = news.make_windows(
            news_c.t_min, news_c.t_max, self.config.width, self.config.shift
        )
        news.populate_windows(segments, news_c)
        vocabulary = sorted(self.social().vocabulary)
        global_freq = self.social().vocabulary
        tfidf = news.tfidf_matrix(segments, vocabulary)
        networks = []
        for seg in segments:
            entities = news.select_entities(
                seg,
                tfidf,
                vocabulary,
                global_freq,
                alias_map=self.alias_map(),
                top_tfidf=self.config.top_tfidf,
                top_freq=self.config.top_freq,
            )
            networks.append(
                news.cooccur_network(
                    seg.tuples,
                    entities,
                    self.stops(),
                    alias_map=self.alias_map(),
                    window_index=seg.index,
                    window_start=seg.start,
                )
            )
        return segments, networks

    def stage_newsnet(self) -> list[Path]:
        segments, networks = self._news_networks()
        net_dir = self.out / "newsnet"
        net_dir.mkdir(parents=True, exist_ok=True)
        outputs = []
        meta = []
        for seg, net in zip(segments, networks):
            csv_path = net_dir / f"window_{seg.index:04d}.csv"
            csv_path.write_text(news.network_to_csv(net), "utf-8")
            outputs.append(csv_path)
            xml_path = net_dir / f"window_{seg.index:04d}.graphml"
            news.write_network_graphml(net, xml_path)
            outputs.append(xml_path)
            meta.append(
                {
                    "index": seg.index,
                    "start": seg.start.isoformat(),
                    "end": seg.end.isoformat(),
                    "tuples": len(seg.tuples),
                    "entities": seg.entities,
                }
            )
        windows_path = self.out / "windows.json"
        _write_json(windows_path, meta)
        outputs.append(windows_path)
        series_dir = self.out / "series"
        for a1, a2 in self.config.attachment_pairs:
            series = news.attachment_series(networks, a1, a2)
            path = series_dir / f"attachment_{_slug(a1)}__{_slug(a2)}.csv"
            _write_series_csv(path, series)
            outputs.append(path)
        self._record_stage("newsnet", outputs)
        return outputs

    def _coverage_series(
        self, corpus: ingest.Corpus, words: list[str], vocabulary: list[str], seed: int
    ) -> metrics.TimeSeries:
        """Daily relative-coverage series over a corpus's full date span.

        Days whose baseline is degenerate (no tokens at all) enter the
        series as 0 so it stays finite for smoothing and correlation.
        """
        points = []
        day = corpus.t_min
        while day <= corpus.t_max:
            tokens = metrics.subcorpus_tokens(corpus, day, day + _one_day())
            result = metrics.relative_coverage(
                words,
                tokens,
                vocabulary,
                n_samples=self.config.baseline_samples,
                sample_size=self.config.baseline_size,
                seed=seed,
            )
            value = result.ratio if not result.degenerate else 0.0
            points.append((day, value))
            day = day + _one_day()
        return metrics.TimeSeries(points=points)

    def stage_coverage(self) -> list[Path]:
        cset = self._load_communities()
        g = self._load_graph()
        social = self.social()
        vocabulary = sorted(social.vocabulary)
        if social.t_min is None:
            raise InputError("social corpus has no dated tuples; coverage needs dates")
        news_c = self.news_corpus()
        outputs = []
        series_dir = self.out / "series"
        xcorr_rows = []
        seed = self._seed("coverage", self.config.metric_seed)
        for com in cset.communities[: self.config.top_communities]:
            words = communities.community_vocabulary(com, g, mode=self.config.coverage_mode)
            if not words:
                continue
            social_series = self._coverage_series(social, words, vocabulary, seed)
            news_series = self._coverage_series(news_c, words, vocabulary, seed)
            social_smooth = metrics.smooth_series(social_series, self.config.smooth_width)
            news_smooth = metrics.smooth_series(news_series, self.config.smooth_width)
            for name, series in (
                (f"coverage_social_{com.id}", social_smooth),
                (f"coverage_news_{com.id}", news_smooth),
            ):
                path = series_dir / f"{name}.csv"
                _write_series_csv(path, series)
                outputs.append(path)
            xcorr = metrics.cross_correlate(social_smooth, news_smooth, self.config.max_lag)
            for lag in sorted(xcorr.correlations):
                val = xcorr.correlations[lag]
                xcorr_rows.append(
                    {
                        "community": com.id,
                        "label": com.label,
                        "lag": lag,
                        "correlation": "" if val is None else f"{val:.6f}",
                        "peak": lag == xcorr.peak_lag,
                    }
                )
        xcorr_path = self.out / "xcorr.csv"
        lines = ["community,label,lag,correlation,peak"]
        for row in xcorr_rows:
            lines.append(
                f"{row['community']},\"{row['label']}\",{row['lag']},{row['correlation']},{int(row['peak'])}"
            )
        xcorr_path.parent.mkdir(parents=True, exist_ok=True)
        xcorr_path.write_text("\n".join(lines) + "\n", "utf-8")
        outputs.append(xcorr_path)
        self._record_stage("coverage", outputs)
        return outputs

    def stage_evaluate(self) -> list[Path]:
        cset = self._load_communities()
        g = self._load_graph()
        segments, networks = self._news_networks()
        socmed = {
            com.id: set(communities.community_vocabulary(com, g, mode=self.config.coverage_mode))
            for com in cset.communities
        }
        socmed = {cid: words for cid, words in socmed.items() if words}
        rows = ["window,start,coverage,homogeneity,completeness,v_measure,matched,total"]
        news_seed = derive_seed(self.config.master_seed, "newsnet-louvain")
        for seg, net in zip(segments, networks):
            adj = _network_adjacency(net)
            partition = communities.louvain_once(adj, seed=news_seed + seg.index).partition
            news_comms: dict[int, set[str]] = {}
            for node, cid in partition.items():
                news_comms.setdefault(cid, set()).add(node)
            if not news_comms or not socmed:
                continue
            report = metrics.evaluate_communities(news_comms, socmed)
            rows.append(
                ",".join(
                    [
                        str(seg.index),
                        seg.start.isoformat(),
                        f"{report.coverage:.6f}",
                        _fmt(report.homogeneity),
                        _fmt(report.completeness),
                        _fmt(report.v_measure),
                        str(report.matched),
                        str(report.total),
                    ]
                )
            )
        agreement_path = self.out / "agreement.csv"
        agreement_path.write_text("\n".join(rows) + "\n", "utf-8")
        outputs = [agreement_path]
        if self.config.truth:
            truth = synthetic.load_truth_json(_require(self.config.truth, "ground truth"))
            labels = actant_community_labels(cset, self._load_subnodes())
            matched = sorted(set(labels) & set(truth.actant_labels))
            payload: dict = {"matched_actants": len(matched), "planted_actants": len(truth.actant_labels)}
            if matched:
                y_true = [truth.actant_labels[a] for a in matched]
                y_pred = [labels[a] for a in matched]
                payload.update(
                    {
                        "homogeneity": metrics.homogeneity(y_true, y_pred),
                        "completeness": metrics.completeness(y_true, y_pred),
                        "v_measure": metrics.v_measure(y_true, y_pred),
                    }
                )
            planted_path = self.out / "planted_eval.json"
            _write_json(planted_path, payload)
            outputs.append(planted_path)
        self._record_stage("evaluate", outputs)
        return outputs

    def run_all(self) -> Path:
        outputs: list[Path] = []
        for stage in STAGES:
            if stage in ("newsnet", "coverage", "evaluate") and not self.config.news_tuples:
                logger.info("skipping %s: no news corpus configured", stage)
                continue
            outputs.extend(getattr(self, f"stage_{stage}")())
        return self.write_manifest(outputs)

    def write_manifest(self, outputs: list[Path]) -> Path:
        inputs = {}
        for name in ("social_tuples", "news_tuples", "embeddings", "seeds", "stopwords", "aliases", "truth"):
            value = getattr(self.config, name)
            if value and Path(value).is_file():
                inputs[name] = {"path": value, "sha256": _sha256(Path(value))}
        manifest = {
            "version": __version__,
            "config": self.config.canonical(),
            "config_hash": self.config.config_hash(),
            "inputs": inputs,
            "outputs": {
                str(p.relative_to(self.out)): _sha256(p) for p in sorted(set(outputs))
            },
        }
        path = self.out / "manifest.json"
        _write_json(path, manifest)
        return path


def _one_day() -> timedelta:
    return timedelta(days=1)


def _slug(text: str) -> str:
    return "".join(ch if ch.isalnum() else "-" for ch in text)


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def _write_series_csv(path: Path, series: metrics.TimeSeries) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["date,value"]
    for day, value in series.points:
        lines.append(f"{day.isoformat()},{value:.6f}")
    path.write_text("\n".join(lines) + "\n", "utf-8")


def _network_adjacency(net: news.CooccurrenceNetwork) -> communities.Adjacency:
    adj: communities.Adjacency = {e: {} for e in net.entities}
    for i, a in enumerate(net.entities):
        for j in range(i + 1, len(net.entities)):
            w = float(net.matrix[i, j])
            if w > 0:
                b = net.entities[j]
                adj[a][b] = w
                adj[b][a] = w
    return adj


def actant_community_labels(
    cset: communities.CommunitySet, subnodes: list[clustering.Subnode]
) -> dict[str, int]:
    """Map each seed actant to the community holding most of its sub-nodes.

    An actant's sub-nodes are those whose member phrases contain its token;
    each sub-node votes with its core community (ties to the smallest id).
    """
    core_of: dict[str, int] = {}
    for com in cset.communities:
        for node in com.core:
            core_of[node] = com.id
    votes: dict[str, Counter] = {}
    for sn in subnodes:
        if sn.id not in core_of:
            continue
        tokens = set()
        for phrase in sn.member_phrases:
            tokens.update(phrase.split())
        for token in tokens:
            votes.setdefault(token, Counter())[core_of[sn.id]] += 1
    labels = {}
    for token, counter in votes.items():
        best = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]
        labels[token] = best
    return labels


def simulate(config: RunConfig, out_dir: str | Path) -> dict[str, Path]:
    """Generate a synthetic input set (tuples, embeddings, seeds, truth).

    Config keys under ``simulate``: k, n, r, separation, posts, tuples_per_post,
    overlap, sigma, news (bool), posts_per_day, num_days, lag, prefix_prob.
    """
    params = dict(config.simulate)
    k = int(params.get("k", 3))
    n = int(params.get("n", 30))
    r = int(params.get("r", 4))
    model = synthetic.make_model(
        k,
        n,
        r,
        separation=float(params.get("separation", 6.0)),
        seed=derive_seed(config.master_seed, "model"),
        overlap=float(params.get("overlap", 0.0)),
        sigma=float(params.get("sigma", 1.0)),
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus_seed = derive_seed(config.master_seed, "sample")
    if params.get("news", False):
        social, news_c, truth = synthetic.sample_coupled_streams(
            model,
            posts_per_day=int(params.get("posts_per_day", 30)),
            num_days=int(params.get("num_days", 45)),
            lag=int(params.get("lag", 0)),
            seed=corpus_seed,
            tuples_per_post=int(params.get("tuples_per_post", 3)),
            prefix_prob=float(params.get("prefix_prob", 0.6)),
        )
    else:
        social, truth = synthetic.sample_corpus(
            model,
            num_posts=int(params.get("posts", 2000)),
            tuples_per_post=int(params.get("tuples_per_post", 3)),
            seed=corpus_seed,
            num_days=int(params.get("num_days", 14)),
            prefix_prob=float(params.get("prefix_prob", 0.6)),
        )
        news_c = None
    paths = {}
    paths["social_tuples"] = out / "social_tuples.jsonl"
    ingest.save_tuples(social, paths["social_tuples"])
    phrases = set(social.phrases())
    if news_c is not None:
        paths["news_tuples"] = out / "news_tuples.jsonl"
        ingest.save_tuples(news_c, paths["news_tuples"])
        phrases |= news_c.phrases()
    table = synthetic.synth_embeddings(model, phrases, seed=derive_seed(config.master_seed, "embeddings"))
    paths["embeddings"] = out / "embeddings.tsv"
    ingest.save_embeddings(table, paths["embeddings"])
    paths["seeds"] = out / "seeds.txt"
    ingest.save_seed_entities(synthetic.seed_entities_from_corpus(model, social), paths["seeds"])
    paths["truth"] = out / "ground_truth.json"
    synthetic.write_truth_json(truth, paths["truth"])
    return paths
