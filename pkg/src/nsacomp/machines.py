"""Register machines with an oracle, their indices and the s-m-n construction.

Instructions (opcode, arg1, arg2):

* ``INC r``          opcode 0, ``r += 1``
* ``DECJZ r L``      opcode 1, jump to ``L`` if ``r == 0`` else ``r -= 1``
* ``QUERY d s``      opcode 2, ``r_d = A(r_s)``
* ``HALT r``         opcode 3, stop with output ``r``

An instruction codes as ``pair(op, pair(a1, a2))`` and a program as the
length-prefixed list of its instruction codes.  Input goes in register 0;
every executed instruction is one step and the first one is step 1.  Running
past the last instruction (or jumping to ``len(program)``) never halts.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

from .pairing import decode_list, encode_rational, pair, unpair

INC, DECJZ, QUERY, HALT = 0, 1, 2, 3
OPCODES = {"INC": INC, "DECJZ": DECJZ, "QUERY": QUERY, "HALT": HALT}
OPNAMES = {v: k for k, v in OPCODES.items()}
MAX_PROGRAM_LENGTH = 4096


class Instr(NamedTuple):
    op: int
    a: int
    b: int = 0

    def __str__(self):
        name = OPNAMES[self.op]
        if self.op in (INC, HALT):
            return f"{name} {self.a}"
        return f"{name} {self.a} {self.b}"


@dataclass(frozen=True)
class Program:
    instructions: tuple

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(Instr(*i) for i in self.instructions))
        for ins in self.instructions:
            if ins.op not in OPNAMES:
                raise ValueError(f"unknown opcode {ins.op}")
            if ins.op == DECJZ and ins.b > len(self.instructions):
                raise ValueError(f"label {ins.b} out of range")

    def __len__(self):
        return len(self.instructions)

    @property
    def register_count(self):
        regs = [0]
        for ins in self.instructions:
            regs.append(ins.a)
            if ins.op == QUERY:
                regs.append(ins.b)
        return max(regs) + 1

    def __str__(self):
        return "; ".join(str(i) for i in self.instructions)


LOOP = Program([(DECJZ, 1, 0)])


def encode_instr(ins) -> int:
    op, a, b = ins
    if op in (INC, HALT):
        b = 0
    return pair(op, pair(a, b))


class IndexTooLarge(OverflowError):
    pass


MAX_INDEX_BITS = 1 << 20


def encode(program, max_bits: int = MAX_INDEX_BITS) -> int:
    """Integer index of a program.

    Nested pairing roughly doubles the bit length per instruction, so long
    programs have no practical integer index; :class:`IndexTooLarge` is
    raised past ``max_bits``.
    """
    if not isinstance(program, Program):
        program = Program(program)
    body = 0
    for ins in reversed(program.instructions):
        body = pair(encode_instr(ins), body)
        if body.bit_length() > max_bits:
            raise IndexTooLarge(f"index of a {len(program)}-instruction program exceeds {max_bits} bits")
    return pair(len(program), body)


@dataclass(frozen=True)
class MachineIndex:
    """A program standing for its index when the integer is too large to write down."""
    program: Program
    label: str

    def __str__(self):
        return self.label

    @property
    def code(self) -> int:
        return encode(self.program)


def decode(e: int, max_length: int = MAX_PROGRAM_LENGTH) -> Program:
    """Total decoding: codes that name no valid program give the self-loop."""
    codes = decode_list(e, max_length=max_length)
    if codes is None:
        return LOOP
    instrs = []
    for c in codes:
        op, args = unpair(c)
        a, b = unpair(args)
        if op not in OPNAMES or (op in (INC, HALT) and b != 0):
            return LOOP
        instrs.append((op, a, b))
    try:
        return Program(instrs)
    except ValueError:
        return LOOP


def parse_program(text: str) -> Program:
    """Read ``"INC 0; DECJZ 1 0; HALT 0"`` (semicolons or newlines)."""
    instrs = []
    for part in text.replace("\n", ";").split(";"):
        words = part.split("#")[0].split()
        if not words:
            continue
        op = OPCODES[words[0].upper()]
        args = [int(w) for w in words[1:]]
        want = 1 if op in (INC, HALT) else 2
        if len(args) != want:
            raise ValueError(f"{words[0]} takes {want} argument(s)")
        instrs.append((op, *args))
    return Program(instrs)


# -- oracles -------------------------------------------------------------------

@dataclass(frozen=True)
class Oracle:
    """A total 0/1 function with a name used as a cache key."""
    name: str
    fn: Callable[[int], int] = field(compare=False)

    def __call__(self, k: int) -> int:
        return 1 if self.fn(k) else 0

    def tape(self):
        return OracleTape(self)


class OracleTape:
    """Private query log around an oracle; re-queries hit the log."""

    def __init__(self, oracle):
        self.oracle = oracle
        self.log = []
        self._seen = {}

    def __call__(self, k: int) -> int:
        if k not in self._seen:
            self._seen[k] = 1 if self.oracle(k) else 0
        bit = self._seen[k]
        self.log.append((k, bit))
        return bit


ALL0 = Oracle("all0", lambda k: 0)
ALL1 = Oracle("all1", lambda k: 1)
PARITY = Oracle("parity", lambda k: k % 2)
STANDARD_ORACLES = (ALL0, ALL1, PARITY)


def bits_oracle(bits: str, name: str | None = None) -> Oracle:
    """Oracle from an ASCII bit string; positions past the end read as 0."""
    bits = "".join(ch for ch in bits if not ch.isspace())
    if any(ch not in "01" for ch in bits):
        raise ValueError("oracle files contain only 0 and 1")
    digest = hashlib.sha1(bits.encode()).hexdigest()[:12]
    table = tuple(int(ch) for ch in bits)
    return Oracle(name or f"bits:{digest}", lambda k: table[k] if k < len(table) else 0)


def oracle_from_spec(spec: str) -> Oracle:
    for o in STANDARD_ORACLES:
        if spec == o.name:
            return o
    if spec.startswith("file:"):
        path = spec[5:]
        with open(path) as fh:
            return bits_oracle(fh.read(), name=f"file:{path}")
    raise ValueError(f"unknown oracle {spec!r}; use all0, all1, parity or file:<path>")


# -- simulation -------------------------------------------------------------

class Halted(NamedTuple):
    output: int
    steps: int


def _transfer_loops(program: Program):
    """Find loops ``L: DECJZ x X'; INC ...; DECJZ z L`` that only move x's value.

    Such a loop is run in one go (with its exact step count) whenever ``z``
    is zero on entry, which keeps the exponential-size outputs of the s-m-n
    programs cheap to simulate.
    """
    ins = program.instructions
    out = {}
    for start, first in enumerate(ins):
        if first.op != DECJZ:
            continue
        x = first.a
        incs = []
        j = start + 1
        while j < len(ins) and ins[j].op == INC and ins[j].a != x:
            incs.append(ins[j].a)
            j += 1
        if not incs or j >= len(ins):
            continue
        last = ins[j]
        if last.op == DECJZ and last.b == start and last.a != x and last.a not in incs:
            out[start] = (x, tuple(incs), last.a, first.b)
    return out


_LOOP_CACHE: dict = {}


def _loops_for(program):
    key = program.instructions
    if key not in _LOOP_CACHE:
        if len(_LOOP_CACHE) > 4096:
            _LOOP_CACHE.clear()
        _LOOP_CACHE[key] = _transfer_loops(program)
    return _LOOP_CACHE[key]


def simulate(program: Program, n: int, oracle, s: int):
    """Run for at most ``s`` steps; :class:`Halted` or ``None``."""
    ins = program.instructions
    size = len(ins)
    regs = [0] * program.register_count
    regs[0] = n
    loops = _loops_for(program)
    pc, steps = 0, 0
    while pc < size:
        loop = loops.get(pc)
        if loop is not None:
            x, incs, z, exit_label = loop
            if regs[z] == 0 and regs[x] > 0:
                count = regs[x]
                cost = count * (len(incs) + 2)
                if steps + cost > s:
                    return None
                steps += cost
                regs[x] = 0
                for r in incs:
                    regs[r] += count
                continue
        steps += 1
        if steps > s:
            return None
        op, a, b = ins[pc]
        if op == INC:
            regs[a] += 1
            pc += 1
        elif op == DECJZ:
            if regs[a] == 0:
                pc = b
            else:
                regs[a] -= 1
                pc += 1
        elif op == QUERY:
            regs[a] = 1 if oracle(regs[b]) else 0
            pc += 1
        else:
            return Halted(regs[a], steps)
    return None


def as_program(e):
    if isinstance(e, Program):
        return e
    if isinstance(e, MachineIndex):
        return e.program
    return decode(e)


# halting results per (program, input, oracle name): (Halted or None, budget explored)
_RUN_CACHE: dict = {}


def run_bounded(e, n: int, A, s: int):
    """``Halted(m, s0)`` if program ``e`` on ``n`` with oracle ``A`` halts in ``s0 <= s`` steps."""
    program = as_program(e)
    key = None
    if isinstance(A, Oracle):
        key = (program.instructions, n, A.name)
        hit = _RUN_CACHE.get(key)
        if hit is not None:
            result, explored = hit
            if result is not None:
                return result if result.steps <= s else None
            if explored >= s:
                return None
    tape = A.tape() if isinstance(A, Oracle) else A
    result = simulate(program, n, tape, s)
    if key is not None:
        if len(_RUN_CACHE) > 200_000:
            _RUN_CACHE.clear()
        _RUN_CACHE[key] = (result, s)
    return result


def check_tot_up_to(e, A, n_max: int, s_cap: int) -> bool:
    """Halting on every input ``n <= n_max`` within ``s_cap`` steps (an under-approximation of totality)."""
    return all(run_bounded(e, n, A, s_cap) is not None for n in range(n_max + 1))


def f0(e, n: int, A, k: int) -> int:
    """0 iff the program halts within ``k`` steps with output at most ``k``."""
    r = run_bounded(e, n, A, k)
    return 0 if r is not None and r.output <= k else 1


def jump_point(e, n: int, A, cap: int):
    """Least ``k <= cap`` with ``f0(e, n, A, k) = 0``, or ``None``."""
    r = run_bounded(e, n, A, cap)
    if r is None:
        return None
    k = max(r.steps, r.output)
    return k if k <= cap else None


# -- s-m-n -------------------------------------------------------------------

# fixed registers of the wrapper; the wrapped program's registers start at OFFSET
_M, _Z, _B, _C, _D, _P, _Q = range(7)
OFFSET = 7


class _Asm:
    def __init__(self):
        self.code = []
        self.fixups = []
        self.labels = {}

    def here(self, name):
        self.labels[name] = len(self.code)

    def emit(self, op, a, b=0):
        self.code.append([op, a, b])

    def jump(self, op, a, label):
        self.fixups.append((len(self.code), label))
        self.code.append([op, a, 0])

    def goto(self, label):
        self.jump(DECJZ, _Z, label)

    def program(self):
        for idx, label in self.fixups:
            self.code[idx][2] = self.labels[label]
        return Program([tuple(c) for c in self.code])


def smn_program(e, n: int) -> Program:
    """Program computing ``m -> code(t(lam k. f0(e, n, A, k))(m))`` for every oracle.

    The wrapper copies ``m`` into a step budget, loads ``n`` into the
    (shifted) input register of ``e``, and ticks the budget before every
    instruction of ``e``.  A halt within ``m`` steps with output ``<= m``
    yields ``code(1 - 2^-m) = 2^(2m+1)``; anything else yields
    ``code(0) = 2``.
    """
    inner = as_program(e)
    size = len(inner)
    asm = _Asm()
    # m into B, C, D
    asm.here("copy")
    asm.jump(DECJZ, _M, "load")
    asm.emit(INC, _B)
    asm.emit(INC, _C)
    asm.emit(INC, _D)
    asm.goto("copy")
    asm.here("load")
    for _ in range(n):
        asm.emit(INC, OFFSET)
    for i, ins in enumerate(inner.instructions):
        asm.here(("ins", i))
        asm.jump(DECJZ, _B, "out0")
        if ins.op == INC:
            asm.emit(INC, ins.a + OFFSET)
        elif ins.op == DECJZ:
            target = ("ins", ins.b) if ins.b < size else "falloff"
            asm.jump(DECJZ, ins.a + OFFSET, target)
        elif ins.op == QUERY:
            asm.emit(QUERY, ins.a + OFFSET, ins.b + OFFSET)
        else:
            asm.goto(("cmp", i))
    asm.here("falloff")
    asm.jump(DECJZ, _B, "out0")
    asm.goto("falloff")
    for i, ins in enumerate(inner.instructions):
        if ins.op == HALT:
            asm.here(("cmp", i))
            asm.jump(DECJZ, ins.a + OFFSET, "ok")
            asm.jump(DECJZ, _C, "out0")
            asm.goto(("cmp", i))
    asm.here("out0")
    asm.emit(INC, _P)
    asm.emit(INC, _P)
    asm.emit(HALT, _P)
    # P = 2, then multiply by 4 m times
    asm.here("ok")
    asm.emit(INC, _P)
    asm.emit(INC, _P)
    asm.here("pow")
    asm.jump(DECJZ, _D, "done")
    asm.here("quad")
    asm.jump(DECJZ, _P, "back")
    for _ in range(4):
        asm.emit(INC, _Q)
    asm.goto("quad")
    asm.here("back")
    asm.jump(DECJZ, _Q, "pow")
    asm.emit(INC, _P)
    asm.goto("back")
    asm.here("done")
    asm.emit(HALT, _P)
    return asm.program()


def smn_monotone_index(e, n: int) -> MachineIndex:
    """Index ``e'`` of :func:`smn_program`; total for every oracle.

    Kept symbolic: the wrapper has dozens of instructions and its integer
    code would have astronomically many bits.
    """
    label = f"smn({e if isinstance(e, int) else as_program(e)},{n})"
    return MachineIndex(smn_program(e, n), label)


def smn_step_bound(e, n: int, m: int) -> int:
    """Steps within which ``smn_program(e, n)`` halts on input ``m``.

    Copying costs ``5m+1``, loading ``n``, the ticked run at most ``2m+2``
    plus a fall-off loop of ``2m+2``, the comparison ``3m+3``, and the
    power loop ``sum_i (6*2*4^i + 1) + (3*8*4^i + 1)``, bounded by
    ``12 * 4^(m+1)``.  Exponential in ``m`` because outputs are
    ``2^(2m+1)`` and registers only grow by one per step.
    """
    return 5 * m + 1 + n + 2 * (2 * m + 2) + 3 * m + 3 + 3 + 12 * 4 ** (m + 1) + 2 * m + 8


def t_code(e, n: int, A, m: int) -> int:
    """``code(t(lam k. f0(e, n, A, k))(m))`` evaluated directly."""
    hit = f0(e, n, A, m) == 0
    return encode_rational(1 - Fraction(1, 2 ** m) if hit else 0)


# -- MU^A --------------------------------------------------------------------

PASS, VACUOUS, FAIL = "PASS", "VACUOUS", "FAIL"


class Verdict(NamedTuple):
    verdict: str
    halting_step: int | None = None
    output: int | None = None
    bound: int | None = None

    @property
    def ok(self):
        return self.verdict != FAIL


def check_mu_a(nu, e, n: int, A, s_cap: int) -> Verdict:
    """Check ``(exists m, s <= nu(e, n)) phi^A_{e,s}(n) = m`` whenever a halt is seen within ``s_cap``."""
    r = run_bounded(e, n, A, s_cap)
    if r is None:
        return Verdict(VACUOUS)
    bound = nu(e, n)
    ok = r.steps <= bound and r.output <= bound
    return Verdict(PASS if ok else FAIL, r.steps, r.output, bound)


# -- test programs -------------------------------------------------------------

E_ECHO = encode([(HALT, 0)])
E_LOOP = encode([(DECJZ, 1, 0)])
E_QUERY = encode([(QUERY, 0, 0), (HALT, 0)])

CANONICAL_SOURCES = (
    ("echo", "HALT 0"),
    ("loop", "DECJZ 1 0"),
    ("query", "QUERY 0 0; HALT 0"),
    ("even-halts", "DECJZ 0 3; DECJZ 0 4; DECJZ 1 0; HALT 0; DECJZ 1 4"),
    ("zero", "HALT 1"),
    ("succ", "INC 0; HALT 0"),
    ("double", "DECJZ 0 4; INC 1; INC 1; DECJZ 2 0; HALT 1"),
    ("halt-if-A1", "QUERY 1 0; DECJZ 1 3; HALT 0; DECJZ 2 3"),
    ("fall-off", "INC 0"),
    ("countdown", "DECJZ 0 2; DECJZ 1 0; HALT 0"),
    ("plus-ten", "INC 0; INC 0; INC 0; INC 0; INC 0; INC 0; INC 0; INC 0; INC 0; INC 0; HALT 0"),
    ("halt-if-A0", "QUERY 1 0; DECJZ 1 3; DECJZ 2 2; HALT 0"),
    ("empty", ""),
    ("slow-zero", "DECJZ 0 4; INC 1; DECJZ 1 3; DECJZ 2 0; HALT 0"),
    ("query-A0-plus", "QUERY 1 2; DECJZ 1 3; INC 0; HALT 0"),
    ("square-ish", "DECJZ 0 6; INC 2; INC 1; INC 1; INC 1; DECJZ 3 0; HALT 1"),
)

CANONICAL_PROGRAMS = tuple(parse_program(src) for _, src in CANONICAL_SOURCES)
CANONICAL_NAMES = tuple(name for name, _ in CANONICAL_SOURCES)
CANONICAL_INDICES = tuple(encode(p) for p in CANONICAL_PROGRAMS)


def canonical(i: int) -> int:
    """Index of the ``i``-th test program."""
    return CANONICAL_INDICES[i]
