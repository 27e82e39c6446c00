"""Plain-text SLAB artifact formats.

Graph::

    SLAB v1 layered=<0|1> layers=<l> dims=<d1,d2,...> n=<n> m=<m>
    u v            (one edge per line, CSR order)

Critical paths::

    SLAB-P v1 count=<|P|> d=<d>
    x1 ... xd y s1 ... sd

Shortcut set::

    SLAB-H v1 k=<count>
    u v

Source set::

    SLAB-S v1 count=<k>
    v
"""
import numpy as np

from .construct import PathSet, _build_layered
from .errors import FormatError
from .graph import LayeredGraph, ShortcutSet, SourceSet


def _header(line, magic):
    parts = line.split()
    if len(parts) < 2 or parts[0] != magic or parts[1] != "v1":
        raise FormatError(f"expected '{magic} v1' header, got {line.strip()!r}")
    fields = {}
    for item in parts[2:]:
        key, sep, value = item.partition("=")
        if not sep:
            raise FormatError(f"malformed header field {item!r}")
        fields[key] = value
    return fields


def _int_field(fields, key):
    try:
        return int(fields[key])
    except (KeyError, ValueError):
        raise FormatError(f"header field {key!r} missing or not an integer") from None


def _body(lines, width, count, what):
    text = " ".join(lines)
    try:
        flat = np.array(text.split(), dtype=np.int64)
    except ValueError:
        raise FormatError(f"non-integer token in {what} body") from None
    if len(flat) != width * count:
        raise FormatError(f"{what}: header announces {count} rows, body has {len(flat) / width:g}")
    return flat.reshape(count, width)


def _rows(rows):
    return "".join(" ".join(map(str, r)) + "\n" for r in rows.tolist())


def format_graph(graph):
    dims = ",".join(map(str, graph.dims))
    head = (f"SLAB v1 layered={int(graph.is_layered)} layers={graph.num_layers} "
            f"dims={dims} n={graph.n} m={graph.m}\n")
    return head + _rows(graph.edge_array())


def parse_graph(text):
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty graph file")
    f = _header(lines[0], "SLAB")
    n, m, layers = _int_field(f, "n"), _int_field(f, "m"), _int_field(f, "layers")
    layered = _int_field(f, "layered")
    try:
        dims = tuple(int(x) for x in f.get("dims", "").split(",") if x)
    except ValueError:
        raise FormatError("dims must be comma-separated integers") from None
    edges = _body(lines[1:], 2, m, "graph")
    if not layered:
        return LayeredGraph.from_edges(n, edges)
    graph = LayeredGraph.from_edges(n, edges, num_layers=layers, dims=dims)
    schedule = infer_schedule(graph)
    if schedule is not None:
        graph = LayeredGraph(n, graph.indptr, graph.indices, num_layers=layers, dims=dims,
                             schedule=schedule)
    return graph


def infer_schedule(graph):
    """Recover the per-layer nonzero edge vector when ``graph`` is exactly a generated instance."""
    if not graph.is_layered or graph.num_layers < 2:
        return None
    size = graph.layer_size
    edges = graph.edge_array()
    layer = edges[:, 0] // size
    delta = edges[:, 1] - edges[:, 0] - size
    schedule = np.zeros((graph.num_layers - 1, len(graph.dims)), dtype=np.int64)
    for i in range(graph.num_layers - 1):
        offs = np.unique(delta[layer == i])
        offs = offs[offs != 0]
        if len(offs) != 1:
            return None
        u = int(edges[(layer == i) & (delta == offs[0]), 0][0])
        v = int(u + size + offs[0])
        schedule[i] = np.subtract(graph.coords(v)[1], graph.coords(u)[1])
    if (schedule < 0).any():
        return None
    rebuilt = _build_layered(graph.dims, schedule)
    if rebuilt.m != graph.m or not np.array_equal(rebuilt.indices, graph.indices):
        return None
    return schedule


def format_paths(paths):
    head = f"SLAB-P v1 count={len(paths)} d={paths.d}\n"
    return head + _rows(np.hstack([paths.starts, paths.svecs]))


def parse_paths(text):
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty paths file")
    f = _header(lines[0], "SLAB-P")
    count, d = _int_field(f, "count"), _int_field(f, "d")
    rows = _body(lines[1:], 2 * d + 1, count, "paths")
    return PathSet(rows[:, :d + 1], rows[:, d + 1:])


def format_shortcuts(edges):
    arr = edges.as_array() if isinstance(edges, ShortcutSet) else np.asarray(
        edges, dtype=np.int64).reshape(-1, 2)
    return f"SLAB-H v1 k={len(arr)}\n" + _rows(arr)


def parse_shortcuts(text):
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty shortcut file")
    f = _header(lines[0], "SLAB-H")
    return _body(lines[1:], 2, _int_field(f, "k"), "shortcuts")


def format_sources(sources):
    arr = np.asarray(sources.vertices if isinstance(sources, SourceSet) else sources,
                     dtype=np.int64)
    return f"SLAB-S v1 count={len(arr)}\n" + "".join(f"{v}\n" for v in arr.tolist())


def parse_sources(text):
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty sources file")
    f = _header(lines[0], "SLAB-S")
    return SourceSet(_body(lines[1:], 1, _int_field(f, "count"), "sources")[:, 0])


def _reader(parse):
    def read(path):
        with open(path, encoding="ascii") as fh:
            return parse(fh.read())
    read.__name__ = parse.__name__.replace("parse", "read")
    return read


def _writer(fmt):
    def write(obj, path):
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(fmt(obj))
    write.__name__ = fmt.__name__.replace("format", "write")
    return write


read_graph, write_graph = _reader(parse_graph), _writer(format_graph)
read_paths, write_paths = _reader(parse_paths), _writer(format_paths)
read_shortcuts, write_shortcuts = _reader(parse_shortcuts), _writer(format_shortcuts)
read_sources, write_sources = _reader(parse_sources), _writer(format_sources)
