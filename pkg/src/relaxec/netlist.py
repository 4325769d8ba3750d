"""Gate-level combinational netlists, a BLIF subset, levels, buffering and cuts."""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

OPS = ("AND", "OR", "XOR", "NOT", "BUF", "CONST0", "CONST1", "NAND", "NOR", "XNOR")
ARITY = {"AND": 2, "OR": 2, "XOR": 2, "NAND": 2, "NOR": 2, "XNOR": 2,
         "NOT": 1, "BUF": 1, "CONST0": 0, "CONST1": 0}
BINARY_OPS = ("AND", "OR", "XOR", "NAND", "NOR", "XNOR")

# truth tables indexed by the input bits read as a binary number (first input = MSB)
_TABLES = {
    "CONST0": (0,), "CONST1": (1,),
    "BUF": (0, 1), "NOT": (1, 0),
    "AND": (0, 0, 0, 1), "OR": (0, 1, 1, 1), "XOR": (0, 1, 1, 0),
    "NAND": (1, 1, 1, 0), "NOR": (1, 0, 0, 0), "XNOR": (1, 0, 0, 1),
}
_OP_OF_TABLE = {(ARITY[op], tt): op for op, tt in _TABLES.items()}

_COVERS = {
    "CONST0": [], "CONST1": ["1"],
    "BUF": ["1 1"], "NOT": ["0 1"],
    "AND": ["11 1"], "OR": ["1- 1", "-1 1"], "XOR": ["01 1", "10 1"],
    "NAND": ["0- 1", "-0 1"], "NOR": ["00 1"], "XNOR": ["00 1", "11 1"],
}

_NET_RE = re.compile(r"^[A-Za-z0-9_$.]+$")


class NetlistError(ValueError):
    pass


class BlifSyntaxError(NetlistError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class MultiplyDriven(NetlistError):
    def __init__(self, net: str):
        super().__init__(f"net {net!r} is driven more than once")
        self.net = net


class UndefinedNet(NetlistError):
    def __init__(self, net: str):
        super().__init__(f"net {net!r} is used but never driven")
        self.net = net


class CombinationalCycle(NetlistError):
    def __init__(self, nets):
        super().__init__(f"combinational cycle through {sorted(nets)[:5]}")
        self.nets = tuple(nets)


class LevelMismatch(NetlistError):
    pass


@dataclass(frozen=True)
class Gate:
    output: str
    op: str
    inputs: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.op not in ARITY:
            raise NetlistError(f"unknown gate op {self.op!r}")
        if len(self.inputs) != ARITY[self.op]:
            raise NetlistError(f"{self.op} gate {self.output!r} needs "
                               f"{ARITY[self.op]} inputs, got {len(self.inputs)}")


@dataclass(frozen=True)
class Netlist:
    """Single-output-gate combinational circuit.

    Gates are stored in topological order; construction validates the
    single-driver, defined-before-use and acyclicity invariants.
    """

    inputs: Tuple[str, ...]
    outputs: Tuple[str, ...]
    gates: Tuple[Gate, ...]
    name: str = "top"
    _driver: Dict[str, Gate] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "gates", tuple(self.gates))
        driver = {}
        defined = set()
        for x in self.inputs:
            if x in defined:
                raise MultiplyDriven(x)
            defined.add(x)
        for g in self.gates:
            for i in g.inputs:
                if i not in defined:
                    raise UndefinedNet(i)
            if g.output in defined:
                raise MultiplyDriven(g.output)
            defined.add(g.output)
            driver[g.output] = g
        for o in self.outputs:
            if o not in defined:
                raise UndefinedNet(o)
        object.__setattr__(self, "_driver", driver)

    @classmethod
    def build(cls, inputs, outputs, gates, name="top") -> "Netlist":
        """Like the constructor but accepts gates in any order."""
        return cls(inputs, outputs, _toposort(inputs, gates), name)

    def driver(self, net: str) -> Optional[Gate]:
        return self._driver.get(net)

    @property
    def nets(self) -> List[str]:
        return list(self.inputs) + [g.output for g in self.gates]

    def fanout(self) -> Dict[str, List[Gate]]:
        fo = defaultdict(list)
        for g in self.gates:
            for i in g.inputs:
                fo[i].append(g)
        return fo

    def renamed(self, name: str) -> "Netlist":
        return Netlist(self.inputs, self.outputs, self.gates, name)


def _toposort(inputs, gates) -> List[Gate]:
    gates = list(gates)
    drivers = {}
    for g in gates:
        if g.output in drivers or g.output in inputs:
            raise MultiplyDriven(g.output)
        drivers[g.output] = g
    known = set(inputs)
    for g in gates:
        for i in g.inputs:
            if i not in known and i not in drivers:
                raise UndefinedNet(i)
    done = set(inputs)
    order = []
    state = {}
    # iterative DFS keeps file order when the file is already topological
    for g in gates:
        if g.output in done:
            continue
        stack = [(g, 0)]
        while stack:
            node, k = stack.pop()
            if k == 0:
                if state.get(node.output) == 1:
                    raise CombinationalCycle([n.output for n, _ in stack] + [node.output])
                state[node.output] = 1
            if k < len(node.inputs):
                stack.append((node, k + 1))
                src = node.inputs[k]
                if src not in done:
                    if state.get(src) == 1:
                        raise CombinationalCycle([n.output for n, _ in stack])
                    stack.append((drivers[src], 0))
            else:
                state[node.output] = 2
                done.add(node.output)
                order.append(node)
    return order


# --------------------------------------------------------------------- BLIF
def parse_blif(text: str) -> Netlist:
    """Parse the single-model, single-output-cover BLIF subset."""
    lines = []
    pending = ""
    pending_no = 0
    for no, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not pending:
            pending_no = no
        if line.endswith("\\"):
            pending += line[:-1] + " "
            continue
        line = pending + line
        pending = ""
        if line.strip():
            lines.append((pending_no, line.strip()))

    name = "top"
    inputs: List[str] = []
    outputs: List[str] = []
    gates: List[Gate] = []
    driven_line: Dict[str, int] = {}
    cur = None  # (line, names, rows)
    seen_end = False

    def check_net(n, no):
        if not _NET_RE.match(n):
            raise BlifSyntaxError(no, f"bad net name {n!r}")
        return n

    def close_cover():
        nonlocal cur
        if cur is None:
            return
        no, names, rows = cur
        cur = None
        out = names[-1]
        ins = names[:-1]
        op = _cover_to_op(no, len(ins), rows)
        # a constant cover ignores its listed inputs
        gates.append(Gate(out, op, () if ARITY[op] == 0 else tuple(ins)))

    for no, line in lines:
        if seen_end:
            raise BlifSyntaxError(no, "content after .end")
        toks = line.split()
        head = toks[0]
        if head.startswith("."):
            close_cover()
            if head == ".model":
                name = toks[1] if len(toks) > 1 else "top"
            elif head == ".inputs":
                inputs.extend(check_net(t, no) for t in toks[1:])
            elif head == ".outputs":
                outputs.extend(check_net(t, no) for t in toks[1:])
            elif head == ".names":
                if len(toks) < 2:
                    raise BlifSyntaxError(no, ".names needs an output net")
                names = [check_net(t, no) for t in toks[1:]]
                if len(names) - 1 > 2:
                    raise BlifSyntaxError(no, "covers with more than 2 inputs are not supported")
                out = names[-1]
                if out in driven_line:
                    raise MultiplyDriven(out)
                driven_line[out] = no
                cur = (no, names, [])
            elif head == ".end":
                seen_end = True
            else:
                raise BlifSyntaxError(no, f"unsupported directive {head}")
        else:
            if cur is None:
                raise BlifSyntaxError(no, "cover row outside .names")
            cur[2].append((no, toks))
    close_cover()
    for x in inputs:
        if x in driven_line:
            raise MultiplyDriven(x)
    return Netlist.build(inputs, outputs, gates, name)


def _cover_to_op(no: int, nin: int, rows) -> str:
    if not rows:
        return "CONST0"
    onset = None
    table = [0] * (1 << nin)
    for rno, toks in rows:
        if nin == 0:
            if len(toks) != 1 or toks[0] not in "01":
                raise BlifSyntaxError(rno, "bad constant cover row")
            plane, val = "", toks[0]
        else:
            if len(toks) != 2 or len(toks[0]) != nin or toks[1] not in ("0", "1"):
                raise BlifSyntaxError(rno, "bad cover row")
            plane, val = toks
        if onset is None:
            onset = val
        elif onset != val:
            raise BlifSyntaxError(rno, "mixed on-set/off-set cover")
        for idx in range(1 << nin):
            bits = format(idx, f"0{nin}b") if nin else ""
            if all(p == "-" or p == b for p, b in zip(plane, bits)):
                table[idx] = 1
    if onset == "0":
        table = [1 - t for t in table]
    op = _OP_OF_TABLE.get((nin, tuple(table)))
    if op is None:
        raise BlifSyntaxError(no, f"cover is not in the gate library: {table}")
    return op


def emit_blif(n: Netlist) -> str:
    out = [f".model {n.name}",
           ".inputs " + " ".join(n.inputs),
           ".outputs " + " ".join(_blif_outputs(n))]
    for g in n.gates:
        out.append(".names " + " ".join(g.inputs + (g.output,)))
        out.extend(_COVERS[g.op])
    inset = set(n.inputs)
    for o in n.outputs:
        if o in inset:
            out.append(f".names {o} {o}$out")
            out.append("1 1")
    out.append(".end")
    return "\n".join(out) + "\n"


def _blif_outputs(n: Netlist):
    inset = set(n.inputs)
    return [f"{o}$out" if o in inset else o for o in n.outputs]


# ------------------------------------------------------------- simulation
def simulate(n: Netlist, values: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
    """Bit-parallel evaluation; ``values`` maps every input to a bool array."""
    env = {x: np.asarray(values[x], dtype=bool) for x in n.inputs}
    shape = next(iter(env.values())).shape if env else (1,)
    for g in n.gates:
        a = [env[i] for i in g.inputs]
        op = g.op
        if op == "AND":
            r = a[0] & a[1]
        elif op == "OR":
            r = a[0] | a[1]
        elif op == "XOR":
            r = a[0] ^ a[1]
        elif op == "NAND":
            r = ~(a[0] & a[1])
        elif op == "NOR":
            r = ~(a[0] | a[1])
        elif op == "XNOR":
            r = ~(a[0] ^ a[1])
        elif op == "NOT":
            r = ~a[0]
        elif op == "BUF":
            r = a[0].copy()
        elif op == "CONST0":
            r = np.zeros(shape, dtype=bool)
        else:
            r = np.ones(shape, dtype=bool)
        env[g.output] = r
    return env


def all_input_patterns(k: int) -> np.ndarray:
    """(2**k, k) bool matrix, row r = binary digits of r (column 0 = MSB)."""
    idx = np.arange(1 << k, dtype=np.int64)
    return ((idx[:, None] >> np.arange(k - 1, -1, -1)) & 1).astype(bool)


def truth_table(n: Netlist, nets: Optional[Sequence[str]] = None) -> np.ndarray:
    """Exhaustive simulation; rows follow ``all_input_patterns`` order."""
    pats = all_input_patterns(len(n.inputs))
    env = simulate(n, {x: pats[:, i] for i, x in enumerate(n.inputs)})
    nets = n.outputs if nets is None else nets
    return np.stack([env[x] for x in nets], axis=1) if nets else np.zeros((len(pats), 0), bool)


# ------------------------------------------------------- levels and cuts
def topo_levels(n: Netlist) -> Dict[str, int]:
    lvl = {x: 0 for x in n.inputs}
    for g in n.gates:
        lvl[g.output] = 1 + max((lvl[i] for i in g.inputs), default=0)
    return lvl


def depth(n: Netlist) -> int:
    lv = topo_levels(n)
    return max((lv[o] for o in n.outputs), default=0)


def sweep(n: Netlist) -> Netlist:
    """Drop gates outside the transitive fan-in of the outputs."""
    live = set(n.outputs)
    for g in reversed(n.gates):
        if g.output in live:
            live.update(g.inputs)
    return Netlist(n.inputs, n.outputs, [g for g in n.gates if g.output in live], n.name)


def bufferize(n: Netlist, depth: Optional[int] = None) -> Netlist:
    """Make every gate edge span exactly one level and align all outputs.

    Non-local edges get a shared chain of BUF gates per driver.  Outputs are
    padded with BUFs up to ``depth`` (default: the deepest output, at least 1).
    """
    lvl = topo_levels(n)
    top = max([lvl[o] for o in n.outputs] + [1])
    if depth is None:
        depth = top
    if depth < top:
        raise LevelMismatch(f"requested depth {depth} below circuit depth {top}")

    chains: Dict[str, List[str]] = {}
    taken = set(n.nets)
    new_gates: List[Gate] = []

    def tap(net: str, at_level: int) -> str:
        """Name of the copy of ``net`` living at level ``at_level``."""
        base = lvl[net]
        if at_level == base:
            return net
        chain = chains.setdefault(net, [])
        while len(chain) < at_level - base:
            prev = chain[-1] if chain else net
            k = len(chain) + 1
            name = f"{net}$buf{k}"
            while name in taken:
                name += "_"
            taken.add(name)
            chain.append(name)
            pending.append(Gate(name, "BUF", (prev,)))
        return chain[at_level - base - 1]

    # chains are created lazily; gates are emitted level by level so that
    # buffers precede their consumers
    pending: List[Gate] = []
    by_level: Dict[int, List[Gate]] = defaultdict(list)
    for g in n.gates:
        ins = tuple(tap(i, lvl[g.output] - 1) for i in g.inputs)
        by_level[lvl[g.output]].append(Gate(g.output, g.op, ins))
    outs = [tap(o, depth) for o in n.outputs]
    if not pending:
        return n
    lvl_new = dict(lvl)
    for b in pending:
        lvl_new[b.output] = lvl_new[b.inputs[0]] + 1
        by_level[lvl_new[b.output]].append(b)
    for L in sorted(by_level):
        new_gates.extend(by_level[L])
    return Netlist(n.inputs, outs, new_gates, n.name)


def bufferize_pair(n1: Netlist, n2: Netlist) -> Tuple[Netlist, Netlist]:
    d = max(depth(n1), depth(n2), 1)
    return bufferize(n1, d), bufferize(n2, d)


@dataclass(frozen=True)
class CutPlan:
    """Level cuts of a bufferized pair: ``cuts[i] = (nets of n1, nets of n2)``."""

    levels: int
    cuts: Tuple[Tuple[Tuple[str, ...], Tuple[str, ...]], ...]
    level1: Dict[str, int]
    level2: Dict[str, int]

    def cut(self, i: int) -> List[Tuple[int, str]]:
        a, b = self.cuts[i]
        return [(0, x) for x in a] + [(1, x) for x in b]


def level_cuts(n1: Netlist, n2: Netlist) -> CutPlan:
    l1, l2 = topo_levels(n1), topo_levels(n2)
    d1, d2 = depth(n1), depth(n2)
    if d1 != d2:
        raise LevelMismatch(f"depths differ: {d1} vs {d2}")
    for n, lv in ((n1, l1), (n2, l2)):
        for g in n.gates:
            for i in g.inputs:
                if lv[i] != lv[g.output] - 1:
                    raise LevelMismatch(f"non-local edge {i} -> {g.output}; bufferize first")
        for o in n.outputs:
            if lv[o] != d1:
                raise LevelMismatch(f"output {o} at level {lv[o]}, expected {d1}")
    cuts = []
    for i in range(d1 + 1):
        a = tuple(x for x in n1.nets if l1[x] == i)
        b = tuple(x for x in n2.nets if l2[x] == i)
        cuts.append((a, b))
    return CutPlan(d1, tuple(cuts), l1, l2)


def cone(n: Netlist, max_level: int) -> Netlist:
    """Sub-circuit of gates at level <= max_level; its outputs are the level cut."""
    lv = topo_levels(n)
    gates = [g for g in n.gates if lv[g.output] <= max_level]
    outs = [x for x in n.nets if lv[x] == max_level]
    return Netlist(n.inputs, outs, gates, f"{n.name}@{max_level}")
