"""Top-down d-DNNF compilation: exhaustive DPLL with unit propagation,
component decomposition, and component caching. Also parses externally
compiled circuits in the c2d and d4 text formats."""

from __future__ import annotations

import random
import warnings
from collections import Counter
from dataclasses import dataclass

from .circuit import AND, FALSE, TRUE, Circuit, check_decomposable
from .cnf import Clause, CnfInstance
from .errors import ToolkitError

ComponentKey = bytes


class CompileBudgetError(ToolkitError):
    pass


class NnfFormatError(ToolkitError):
    pass


@dataclass
class CompileConfig:
    """Branching behaviour of the compiler.

    ``order`` is ``"input"`` (smallest variable first), ``"dynamic"`` (most
    clause occurrences first), ``"random"`` (a seed-shuffled fixed order), or
    an explicit variable list. An explicit order may cover a subset of the
    variables; the rest fall back to input order.
    """

    order: str | tuple[int, ...] | list[int] = "input"
    seed: int = 0
    cache_enabled: bool = True
    max_decisions: int | None = None


def component_key(clauses) -> ComponentKey:
    """Canonical byte string of a clause set; equal keys iff equal sets."""
    return repr(tuple(sorted(set(clauses)))).encode()


def compile(cnf: CnfInstance, config: CompileConfig | None = None) -> Circuit:
    """Compile a CNF into an equivalent d-DNNF circuit.

    Every OR in the output is a two-way decision on a variable, so the
    result is deterministic by construction; ANDs combine variable-disjoint
    components and propagated unit literals, so it is decomposable. Variables
    in no clause stay out of the circuit and are handled by counting via the
    declared universe.
    """
    cfg = config or CompileConfig()
    explicit = _explicit_order(cfg, cnf.num_vars)
    circuit = Circuit(
        universe=range(1, cnf.num_vars + 1),
        tseitin_vars=cnf.tseitin_vars,
        determinism_verified=True,
    )
    cache: dict[ComponentKey, int] | None = {} if cfg.cache_enabled else None
    decisions = 0

    def pick_var(clauses: tuple[Clause, ...]) -> int:
        present = {abs(l) for c in clauses for l in c}
        if explicit is not None:
            for v in explicit:
                if v in present:
                    return v
            return min(present)
        if cfg.order == "dynamic":
            occurrences = Counter(abs(l) for c in clauses for l in c)
            return max(occurrences, key=lambda v: (occurrences[v], -v))
        return min(present)

    def mk_and(parts: list[int]) -> int:
        merged: dict[int, None] = {}
        for p in parts:
            node = circuit.node(p)
            if node.kind == FALSE:
                return circuit.add_false()
            if node.kind == TRUE:
                continue
            if node.kind == AND:
                for c in node.children:
                    merged.setdefault(c)
            else:
                merged.setdefault(p)
        if not merged:
            return circuit.add_true()
        if len(merged) == 1:
            return next(iter(merged))
        return circuit.add_and(merged)

    def branch(clauses: tuple[Clause, ...]) -> int:
        nonlocal decisions
        decisions += 1
        if cfg.max_decisions is not None and decisions > cfg.max_decisions:
            raise CompileBudgetError(f"decision budget {cfg.max_decisions} exceeded")
        v = pick_var(clauses)
        hi = rec(_condition(clauses, v))
        lo = rec(_condition(clauses, -v))
        children = []
        if circuit.node(hi).kind != FALSE:
            children.append(mk_and([circuit.add_literal(v), hi]))
        if circuit.node(lo).kind != FALSE:
            children.append(mk_and([circuit.add_literal(-v), lo]))
        if not children:
            return circuit.add_false()
        if len(children) == 1:
            return children[0]
        return circuit.add_or(children, decision=v)

    def rec(clauses: tuple[Clause, ...]) -> int:
        units, residual, conflict = _unit_propagate(clauses)
        if conflict:
            return circuit.add_false()
        parts = [circuit.add_literal(l) for l in units]
        for comp in _components(residual):
            nid = cache.get(component_key(comp)) if cache is not None else None
            if nid is None:
                nid = branch(comp)
                if cache is not None:
                    cache[component_key(comp)] = nid
            parts.append(nid)
        return mk_and(parts)

    circuit.set_root(rec(cnf.clauses))
    return circuit


def _explicit_order(cfg: CompileConfig, num_vars: int) -> tuple[int, ...] | None:
    if cfg.order == "random":
        order = list(range(1, num_vars + 1))
        random.Random(cfg.seed).shuffle(order)
        return tuple(order)
    if isinstance(cfg.order, (tuple, list)):
        order = tuple(cfg.order)
        if len(set(order)) != len(order):
            raise ValueError("explicit order contains duplicates")
        for v in order:
            if not 1 <= v <= num_vars:
                raise ValueError(f"order variable {v} out of range 1..{num_vars}")
        return order
    if cfg.order in ("input", "dynamic"):
        return None
    raise ValueError(f"unknown branch order {cfg.order!r}")


def _condition(clauses: tuple[Clause, ...], lit: int) -> tuple[Clause, ...]:
    out = []
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            out.append(tuple(l for l in c if l != -lit))
        else:
            out.append(c)
    return tuple(out)


def _unit_propagate(clauses: tuple[Clause, ...]):
    units: dict[int, None] = {}
    current = clauses
    while True:
        unit = None
        for c in current:
            if not c:
                return (), (), True
            if unit is None and len(c) == 1:
                unit = c[0]
        if unit is None:
            return tuple(units), current, False
        units[unit] = None
        current = _condition(current, unit)


def _components(clauses: tuple[Clause, ...]) -> list[tuple[Clause, ...]]:
    parent: dict[int, int] = {}

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for c in clauses:
        for l in c:
            parent.setdefault(abs(l), abs(l))
        for l in c[1:]:
            ra, rb = find(abs(c[0])), find(abs(l))
            if ra != rb:
                parent[rb] = ra
    groups: dict[int, list[Clause]] = {}
    for c in clauses:
        groups.setdefault(find(abs(c[0])), []).append(c)
    ordered = sorted(groups.values(), key=lambda g: min(abs(l) for c in g for l in c))
    return [tuple(g) for g in ordered]


# ---------------------------------------------------------------------------
# Reading compiled circuits


def parse_nnf(text: str, format: str = "c2d") -> Circuit:
    """Parse a compiled circuit. Decomposability is verified on load;
    determinism is assumed (the circuit is flagged unverified)."""
    if format == "c2d":
        circuit = _parse_c2d(text)
    elif format == "d4":
        circuit = _parse_d4(text)
    else:
        raise ValueError(f"unknown NNF format {format!r}")
    ok, bad = check_decomposable(circuit)
    if not ok:
        raise NnfFormatError(f"AND node {bad} has children sharing variables")
    return circuit


def _parse_c2d(text: str) -> Circuit:
    header = None
    universe: frozenset[int] | None = None
    tseitin: frozenset[int] = frozenset()
    node_lines: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "c":
            if len(fields) > 1 and fields[1] == "universe":
                universe = frozenset(int(t) for t in fields[2:])
            elif len(fields) > 1 and fields[1] == "tseitin":
                tseitin = frozenset(int(t) for t in fields[2:])
            continue
        if fields[0] == "nnf":
            if header is not None:
                raise NnfFormatError(f"line {lineno}: duplicate header")
            try:
                header = tuple(int(t) for t in fields[1:])
            except ValueError:
                header = None
            if header is None or len(header) != 3:
                raise NnfFormatError(f"line {lineno}: malformed header {line!r}")
            continue
        if header is None:
            raise NnfFormatError(f"line {lineno}: node before 'nnf' header")
        node_lines.append((lineno, fields))

    if header is None:
        raise NnfFormatError("missing 'nnf' header")
    num_nodes, _, num_vars = header
    if universe is None:
        universe = frozenset(range(1, num_vars + 1))
    elif any(v < 1 or v > num_vars for v in universe):
        raise NnfFormatError("universe directive outside header variable range")
    if not tseitin <= universe:
        raise NnfFormatError("tseitin directive outside universe")
    if not node_lines:
        raise NnfFormatError("no nodes")
    if num_nodes != len(node_lines):
        warnings.warn(
            f"header declares {num_nodes} nodes, found {len(node_lines)}", stacklevel=3
        )

    circuit = Circuit(universe, tseitin)
    ids: list[int] = []

    def child_ids(lineno: int, fields: list[str]) -> list[int]:
        out = []
        for t in fields:
            i = int(t)
            if not 0 <= i < len(ids):
                raise NnfFormatError(f"line {lineno}: dangling node reference {i}")
            out.append(ids[i])
        return out

    for lineno, fields in node_lines:
        tag = fields[0]
        try:
            args = [int(t) for t in fields[1:]]
        except ValueError:
            raise NnfFormatError(f"line {lineno}: non-integer argument") from None
        if tag == "L":
            if len(args) != 1 or args[0] == 0:
                raise NnfFormatError(f"line {lineno}: malformed literal node")
            if abs(args[0]) not in universe:
                raise NnfFormatError(f"line {lineno}: literal {args[0]} out of range")
            ids.append(circuit.add_literal(args[0]))
        elif tag == "A":
            if not args or args[0] != len(args) - 1:
                raise NnfFormatError(f"line {lineno}: AND child count mismatch")
            if args[0] == 0:
                ids.append(circuit.add_true())
            else:
                ids.append(circuit.add_and(child_ids(lineno, fields[2:])))
        elif tag == "O":
            if len(args) < 2 or args[1] != len(args) - 2:
                raise NnfFormatError(f"line {lineno}: OR child count mismatch")
            if args[1] == 0:
                ids.append(circuit.add_false())
            else:
                ids.append(circuit.add_or(child_ids(lineno, fields[3:]), decision=args[0]))
        else:
            raise NnfFormatError(f"line {lineno}: unknown node tag {tag!r}")

    circuit.set_root(ids[-1])
    return circuit


_D4_KINDS = ("o", "a", "t", "f")


def _parse_d4(text: str) -> Circuit:
    kinds: dict[int, str] = {}
    edges: dict[int, list[tuple[int, tuple[int, ...]]]] = {}
    first_node: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        if fields[-1] != "0":
            raise NnfFormatError(f"line {lineno}: line must end with 0")
        fields = fields[:-1]
        if len(fields) == 2 and (fields[0] in _D4_KINDS or fields[1] in _D4_KINDS):
            # Accept both `<id> o` (spec order) and `o <id>` (d4 output order).
            kind, raw_id = (fields[0], fields[1]) if fields[0] in _D4_KINDS else (fields[1], fields[0])
            try:
                nid = int(raw_id)
            except ValueError:
                raise NnfFormatError(f"line {lineno}: bad node id {raw_id!r}") from None
            if nid in kinds:
                raise NnfFormatError(f"line {lineno}: duplicate node {nid}")
            kinds[nid] = kind
            edges.setdefault(nid, [])
            if first_node is None:
                first_node = nid
        else:
            try:
                ints = [int(t) for t in fields]
            except ValueError:
                raise NnfFormatError(f"line {lineno}: non-integer token") from None
            if len(ints) < 2:
                raise NnfFormatError(f"line {lineno}: malformed edge")
            src, dst, lits = ints[0], ints[1], tuple(ints[2:])
            if src not in kinds or dst not in kinds:
                raise NnfFormatError(f"line {lineno}: edge references undeclared node")
            edges[src].append((dst, lits))
    if first_node is None:
        raise NnfFormatError("no nodes")

    max_var = max(
        (abs(l) for pairs in edges.values() for _, lits in pairs for l in lits),
        default=0,
    )
    circuit = Circuit(range(1, max_var + 1))
    built: dict[int, int] = {}
    in_progress: set[int] = set()

    def build(nid: int) -> int:
        if nid in built:
            return built[nid]
        if nid in in_progress:
            raise NnfFormatError(f"cyclic reference through node {nid}")
        in_progress.add(nid)
        kind = kinds[nid]
        if kind == "t":
            result = circuit.add_true()
        elif kind == "f":
            result = circuit.add_false()
        elif kind == "o":
            if not edges[nid]:
                raise NnfFormatError(f"node {nid} has no outgoing edges")
            parts = []
            for dst, lits in edges[nid]:
                conj = [circuit.add_literal(l) for l in lits] + [build(dst)]
                parts.append(conj[0] if len(conj) == 1 else circuit.add_and(conj))
            result = circuit.add_or(parts)
        else:
            if not edges[nid]:
                raise NnfFormatError(f"node {nid} has no outgoing edges")
            flat: list[int] = []
            for dst, lits in edges[nid]:
                flat.extend(circuit.add_literal(l) for l in lits)
                flat.append(build(dst))
            result = flat[0] if len(flat) == 1 else circuit.add_and(flat)
        in_progress.discard(nid)
        built[nid] = result
        return result

    circuit.set_root(build(first_node))
    return circuit
