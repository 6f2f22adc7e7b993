"""Edge-list files, dataset statistics rows, and report serialization.

Edge lists are UTF-8 text, one edge per line, "userToken<TAB>itemToken" by
default; '#' starts a comment line.  User and item label spaces are
independent: the same token may appear in both columns and names two
different nodes.  Loading streams line by line, so memory tracks the graph
rather than the file.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Optional, Union

from .analytics import (
    DegreeHistogram,
    blcc_report,
    neighborhood_report,
    second_neighbor_stats,
)
from .bigraph import ITEM, USER, Bigraph, Modality
from .generator import GeneratorParams

log = logging.getLogger(__name__)

REPORT_FORMAT_VERSION = 1
STATS_CSV_HEADER = "name,users,items,edges,real_n2,theoretic_n2,ratio"

_DELIMITERS = {"tab": "\t", "comma": ",", "whitespace": None}


@dataclass(frozen=True)
class EdgeListFormat:
    """Delimited two-column layout of an edge-list file."""

    delimiter: str = "tab"  # tab | comma | whitespace
    header: bool = False
    user_column: int = 0
    item_column: int = 1

    def __post_init__(self) -> None:
        if self.delimiter not in _DELIMITERS:
            raise ValueError(
                f"delimiter must be one of {sorted(_DELIMITERS)}, "
                f"got {self.delimiter!r}"
            )
        if self.user_column == self.item_column:
            raise ValueError("user and item columns must differ")
        if min(self.user_column, self.item_column) < 0:
            raise ValueError("column indices must be nonnegative")

    @property
    def separator(self) -> Optional[str]:
        return _DELIMITERS[self.delimiter]


@dataclass
class LoadedGraph:
    """A parsed edge list: the graph plus everything needed to round-trip."""

    graph: Bigraph
    user_labels: list[str]
    item_labels: list[str]
    duplicate_count: int


def load_edge_list(
    source: Union[str, Path, IO[str], Iterable[str]],
    fmt: EdgeListFormat = EdgeListFormat(),
) -> LoadedGraph:
    """Stream an edge list into a graph, collapsing duplicate lines.

    Labels are mapped to dense per-modality indices in first-seen order.
    Malformed lines raise ValueError naming the line number; duplicates are
    counted and logged, not fatal.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_edge_list(fh, fmt)

    graph = Bigraph()
    user_ids: dict[str, int] = {}
    item_ids: dict[str, int] = {}
    user_labels: list[str] = []
    item_labels: list[str] = []
    seen: set[tuple[int, int]] = set()
    duplicates = 0
    sep = fmt.separator
    need = max(fmt.user_column, fmt.item_column) + 1
    header_pending = fmt.header

    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if header_pending:
            header_pending = False
            continue
        fields = line.split(sep) if sep is not None else line.split()
        if len(fields) < need:
            raise ValueError(
                f"line {lineno}: expected at least {need} fields, got {len(fields)}"
            )
        u_tok = fields[fmt.user_column].strip()
        i_tok = fields[fmt.item_column].strip()
        if not u_tok or not i_tok:
            raise ValueError(f"line {lineno}: empty node token")
        u = user_ids.get(u_tok)
        if u is None:
            u = user_ids[u_tok] = graph.add_node(USER).index
            user_labels.append(u_tok)
        i = item_ids.get(i_tok)
        if i is None:
            i = item_ids[i_tok] = graph.add_node(ITEM).index
            item_labels.append(i_tok)
        if (u, i) in seen:
            duplicates += 1
            continue
        seen.add((u, i))
        graph._add_edge_unchecked(u, i)

    if duplicates:
        log.warning("collapsed %d duplicate edge line(s)", duplicates)
    return LoadedGraph(
        graph=graph,
        user_labels=user_labels,
        item_labels=item_labels,
        duplicate_count=duplicates,
    )


def save_edge_list(
    graph: Bigraph,
    sink: Union[str, Path, IO[str]],
    fmt: EdgeListFormat = EdgeListFormat(),
    user_labels: Optional[list[str]] = None,
    item_labels: Optional[list[str]] = None,
) -> None:
    """Write one line per edge, ordered by user then item index.

    Default labels are u<index> and i<index>; pass the label lists of a
    LoadedGraph to round-trip a parsed file.  Output is byte-identical for
    equal graphs and labels.
    """
    if fmt.separator is None:
        raise ValueError("whitespace format is read-only; pick tab or comma")
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            save_edge_list(graph, fh, fmt, user_labels, item_labels)
        return
    sep = fmt.separator
    first = "{u}" + sep + "{i}\n"
    if fmt.user_column > fmt.item_column:
        first = "{i}" + sep + "{u}\n"
    for u, adj in enumerate(graph.adjacency(USER)):
        u_tok = user_labels[u] if user_labels else f"u{u}"
        for i in sorted(adj):
            i_tok = item_labels[i] if item_labels else f"i{i}"
            sink.write(first.format(u=u_tok, i=i_tok))


# -- dataset statistics -----------------------------------------------------


@dataclass(frozen=True)
class DatasetRow:
    """One stats-table row for a named dataset."""

    name: str
    users: int
    items: int
    edges: int
    real_n2: float
    theoretic_n2: float
    ratio: Optional[float]


def dataset_stats(
    graph: Bigraph, name: str, modality: Modality = USER
) -> DatasetRow:
    """Second-neighbor statistics row; the ratio is None when the tree
    approximation is zero."""
    if graph.user_count == 0 or graph.item_count == 0:
        raise ValueError("dataset graph must have nodes in both modalities")
    stats = second_neighbor_stats(graph, modality)
    return DatasetRow(
        name=name,
        users=graph.user_count,
        items=graph.item_count,
        edges=graph.edge_count,
        real_n2=stats.real_mean,
        theoretic_n2=stats.theoretic_mean,
        ratio=stats.ratio,
    )


def write_stats_csv(rows: Iterable[DatasetRow], sink: Union[str, Path, IO[str]]) -> None:
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            write_stats_csv(rows, fh)
        return
    sink.write(STATS_CSV_HEADER + "\n")
    for r in rows:
        ratio = "" if r.ratio is None else repr(round(r.ratio, 6))
        sink.write(
            f"{r.name},{r.users},{r.items},{r.edges},"
            f"{round(r.real_n2, 6)!r},{round(r.theoretic_n2, 6)!r},{ratio}\n"
        )


# -- report JSON ---------------------------------------------------------------


def _histogram_dict(hist: DegreeHistogram) -> dict:
    return {
        "counts": {str(k): c for k, c in hist.sorted_items()},
        "mean": hist.mean,
        "second_moment": hist.second_moment,
    }


def build_report(
    graph: Bigraph,
    params: Optional[GeneratorParams] = None,
    t: Optional[int] = None,
    modality: Modality = USER,
    per_node: bool = False,
) -> dict:
    """Full analysis report as a JSON-ready dict.

    Histograms, clustering, the second-neighbor row for `modality`, and
    neighborhood means; per-node values included on request.
    """
    clustering = blcc_report(graph, keep_per_node=per_node)
    neighborhoods = neighborhood_report(graph, keep_per_user=per_node)
    n2 = second_neighbor_stats(graph, modality)
    report = {
        "format_version": REPORT_FORMAT_VERSION,
        "params": None if params is None else params.__dict__.copy(),
        "t": t,
        "counts": {
            "users": graph.user_count,
            "items": graph.item_count,
            "edges": graph.edge_count,
        },
        "histograms": {
            "user": _histogram_dict(DegreeHistogram.from_graph(graph, USER)),
            "item": _histogram_dict(DegreeHistogram.from_graph(graph, ITEM)),
        },
        "blcc": {
            "user_mean": clustering.mean_by_modality[USER],
            "item_mean": clustering.mean_by_modality[ITEM],
            "defined_count": clustering.defined_count,
            "undefined_count": clustering.undefined_count,
        },
        "neighborhood": {
            "mean_similar_users": neighborhoods.mean_similar_users,
            "mean_neighbor_items": neighborhoods.mean_neighbor_items,
        },
        "second_neighbors": {
            "modality": Modality(modality).name.lower(),
            "real_mean": n2.real_mean,
            "theoretic_mean": n2.theoretic_mean,
            "ratio": n2.ratio,
        },
    }
    if per_node:
        report["blcc"]["per_node"] = {
            repr(node): value for node, value in clustering.per_node.items()
        }
        report["neighborhood"]["per_user"] = [
            list(pair) for pair in neighborhoods.per_user
        ]
    return report


def write_report(report: dict, sink: Union[str, Path, IO[str]]) -> None:
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            write_report(report, fh)
        return
    json.dump(report, sink, indent=2, sort_keys=True)
    sink.write("\n")
