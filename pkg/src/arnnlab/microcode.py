"""Compilation of micro-coded stack programs into exact-weight networks.

The compilers in this package all target the same machinery: a network that
buffers its line input into a base-B "tape" rational, freezes the buffer when
the input ends, and then executes a small rule program over a set of stack
registers, one rule application per ring cycle.  Stacks live in saturated
neurons as base-B rationals whose most significant digit is the top; control
state, rule matching, and write gating are threshold (signal) neurons.

Phase discipline (ring of RING_LEN phases): senses and guard conditions are
recomputed every tick from the stable stacks; rule guards are sampled at
phase 2, matches and pop remainders exist at phase 4, write gates at phase 5,
and new stack/state values land entering phase 0 of the next cycle.  Because
stacks only change on the write tick, the continuously recomputed senses are
always fresh by the time guards sample them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import ConstructionError
from .exact import ExactScalar
from .network import SAT, SIG, Network

__all__ = [
    "Guard",
    "InputFrontend",
    "MicroProgram",
    "MicroRule",
    "NetBuilder",
    "OutputSpec",
    "StackOp",
    "StackSpec",
    "compile_program",
    "reversal_rules",
]

RING_LEN = 7

# Phases at which the engine samples things (values exist one tick later):
# guards at 2, the no-match test at 3, match delays and candidates at 4,
# gates at 5, writes land entering phase 0 of the next cycle.
_PH_RAW = 2
_PH_NOMATCH = 3
_PH_EXEC = 4


class NetBuilder:
    """Incremental sparse network assembly with named neurons."""

    def __init__(self) -> None:
        self._names: list[str] = []
        self._acts: list[str] = []
        self._biases: dict[int, Fraction] = {}
        self._state_w: dict[tuple[int, int], Fraction] = {}
        self._state_scalars: dict[tuple[int, int], ExactScalar] = {}
        self._input_w: dict[tuple[int, int], Fraction] = {}

    def neuron(self, name: str, act: str = SIG, bias: Union[int, Fraction] = 0) -> int:
        idx = len(self._names)
        self._names.append(name)
        self._acts.append(act)
        if bias:
            self._biases[idx] = Fraction(bias)
        return idx

    def w(self, dst: int, src: int, weight: Union[int, Fraction]) -> None:
        if weight:
            key = (dst, src)
            self._state_w[key] = self._state_w.get(key, Fraction(0)) + Fraction(weight)

    def w_scalar(self, dst: int, src: int, scalar: ExactScalar) -> None:
        """Attach a weight that must keep its scalar identity (oracle reals)."""
        self._state_scalars[(dst, src)] = scalar

    def win(self, dst: int, column: int, weight: Union[int, Fraction]) -> None:
        if weight:
            key = (dst, column)
            self._input_w[key] = self._input_w.get(key, Fraction(0)) + Fraction(weight)

    def add_bias(self, dst: int, weight: Union[int, Fraction]) -> None:
        if weight:
            self._biases[dst] = self._biases.get(dst, Fraction(0)) + Fraction(weight)

    def build(
        self,
        n_inputs: int,
        *,
        out_data: Optional[int],
        out_valid: Optional[int],
        out_flag: Optional[int] = None,
        input_symbols: Optional[Sequence[str]] = None,
    ) -> Network:
        def scalarise(frac: Fraction) -> ExactScalar:
            return ExactScalar.from_fraction(frac)

        state_weights = {k: scalarise(v) for k, v in self._state_w.items() if v}
        state_weights.update(self._state_scalars)
        input_weights = {k: scalarise(v) for k, v in self._input_w.items() if v}
        biases = {k: scalarise(v) for k, v in self._biases.items() if v}
        return Network(
            len(self._names),
            n_inputs,
            state_weights=state_weights,
            input_weights=input_weights,
            biases=biases,
            activations=tuple(self._acts),
            out_data=out_data,
            out_valid=out_valid,
            out_flag=out_flag,
            input_symbols=input_symbols,
            neuron_names=tuple(self._names),
        )


# ---------------------------------------------------------------------------
# Program model


@dataclass(frozen=True)
class StackSpec:
    """Register holding a base-``base`` rational; digits listed ascending.

    Digit value 0, when present, is a skippable filler; all other digit
    values must be odd and pairwise >= 2 apart so threshold tests never land
    on an exact boundary.
    """

    name: str
    base: int
    digit_values: tuple[int, ...]

    def __post_init__(self) -> None:
        vals = self.digit_values
        if not vals or tuple(sorted(vals)) != vals:
            raise ConstructionError(f"stack {self.name}: digits must ascend")
        for v in vals:
            if v >= self.base:
                raise ConstructionError(f"stack {self.name}: digit {v} >= base")
            if v != 0 and v % 2 == 0:
                raise ConstructionError(f"stack {self.name}: nonzero digits must be odd")
        for a, b in zip(vals, vals[1:]):
            if b - a < 2:
                raise ConstructionError(f"stack {self.name}: digit gap below 2")

    @property
    def is_unary(self) -> bool:
        return self.digit_values == (1,)


@dataclass(frozen=True)
class Guard:
    stack: str
    kind: str  # "empty" | "nonempty" | "top"
    digit_class: int = -1


@dataclass(frozen=True)
class StackOp:
    stack: str
    kind: str  # "pop" | "push" | "poppush" | "pushmany" | "popmany"
    digit_class: int = -1
    count: int = 1


@dataclass(frozen=True)
class MicroRule:
    state: str
    guards: tuple[Guard, ...]
    ops: tuple[StackOp, ...]
    next_state: str
    emit: bool = False


@dataclass(frozen=True)
class InputFrontend:
    """How line input is folded into the buffer register.

    Every tick appends one base-(8K) digit to the buffer: 0 when the
    validation line is low, else 4K + 2*rank + 1 where the rank comes from
    the one-hot data lines (mode "onehot") or from the single line's binary
    value (mode "binary").  ``fresh_mode`` selects when the buffer freeze
    fires: "immediate" treats the first low-validation tick as end of input
    (the outer word protocol, where input starts at tick 0), "edge" waits
    for validation to rise and then fall (composed nets fed by another net).
    """

    n_lines: int
    n_classes: int
    mode: str = "onehot"  # "onehot" | "binary"
    fresh_mode: str = "immediate"  # "immediate" | "edge"
    buffer_stack: str = "wb"
    input_symbols: Optional[tuple[str, ...]] = None


@dataclass(frozen=True)
class OutputSpec:
    mode: str  # "verdict" | "emission"
    accept_states: frozenset = frozenset()
    require_empty: tuple[str, ...] = ()
    flag_states: frozenset = frozenset()
    emit_states: frozenset = frozenset()


@dataclass(frozen=True)
class MicroProgram:
    stacks: tuple[StackSpec, ...]
    rules: tuple[MicroRule, ...]
    start_state: str
    frontend: InputFrontend
    output: OutputSpec
    oracle: Optional[tuple[str, ExactScalar]] = None  # (stack name, weight)


def buffer_stack_spec(name: str, n_classes: int) -> StackSpec:
    """Digit set the input frontend produces: 0 plus 4K+2s+1 per class s."""
    k = n_classes
    return StackSpec(name, 8 * k, (0,) + tuple(4 * k + 2 * s + 1 for s in range(k)))


def buffer_class(digit_class: int) -> int:
    """Index of frontend symbol class ``s`` within the buffer digit list."""
    return digit_class + 1  # class 0 of the digit list is the filler


def reversal_rules(
    wb: str, target: str, n_classes: int, state: str, next_state: str
) -> list[MicroRule]:
    """Drain the frozen buffer onto ``target``, dropping fillers.

    The buffer holds the most recent tick on top, so draining it restores
    the original symbol order on the target stack.
    """
    rules = [
        MicroRule(
            state,
            (Guard(wb, "top", buffer_class(s)),),
            (StackOp(wb, "pop"), StackOp(target, "push", s)),
            state,
        )
        for s in range(n_classes)
    ]
    rules.append(
        MicroRule(state, (Guard(wb, "top", 0),), (StackOp(wb, "pop"),), state)
    )
    rules.append(MicroRule(state, (Guard(wb, "empty"),), (), next_state))
    return rules


# ---------------------------------------------------------------------------
# Compilation


def compile_program(prog: MicroProgram) -> Network:
    fe = prog.frontend
    stacks = {s.name: s for s in prog.stacks}
    if fe.buffer_stack not in stacks:
        raise ConstructionError(f"frontend buffer {fe.buffer_stack!r} undeclared")
    states: list[str] = []
    for rule in prog.rules:
        for st in (rule.state, rule.next_state):
            if st not in states:
                states.append(st)
    if prog.start_state not in states:
        states.insert(0, prog.start_state)

    b = NetBuilder()
    v_col = fe.n_lines  # validation column

    # Ring of phases.
    phi = [b.neuron(f"phi{j}") for j in range(RING_LEN)]
    for j in range(1, RING_LEN):
        b.w(phi[j], phi[j - 1], 1)

    # Input frontend: buffer accumulation and freeze detection.
    wb_spec = stacks[fe.buffer_stack]
    base_b = wb_spec.base
    k = fe.n_classes
    buf = b.neuron("buf", act=SAT)
    b.w(buf, buf, Fraction(1, base_b))
    if fe.mode == "onehot":
        if fe.n_lines != k:
            raise ConstructionError("onehot frontend needs one line per class")
        for line in range(fe.n_lines):
            b.win(buf, line, Fraction(2 * line, base_b))
    elif fe.mode == "binary":
        if fe.n_lines != 1 or k != 2:
            raise ConstructionError("binary frontend is one line, two classes")
        b.win(buf, 0, Fraction(2, base_b))
    else:
        raise ConstructionError(f"unknown frontend mode {fe.mode!r}")
    b.win(buf, v_col, Fraction(4 * k + 1, base_b))

    started = b.neuron("started")
    b.w(started, started, 1)
    b.win(started, v_col, 1)
    over = b.neuron("over")
    b.w(over, over, 1)
    b.win(over, v_col, -1)
    fresh = b.neuron("fresh")
    b.win(fresh, v_col, -1)
    b.w(fresh, over, -1)
    if fe.fresh_mode == "immediate":
        b.add_bias(over, 1)
        b.add_bias(fresh, 1)
    elif fe.fresh_mode == "edge":
        b.w(over, started, 1)
        b.w(fresh, started, 1)
    else:
        raise ConstructionError(f"unknown fresh mode {fe.fresh_mode!r}")
    grab = b.neuron("grab", act=SAT, bias=-1)
    b.w(grab, buf, 1)
    b.w(grab, fresh, 1)
    sp1 = b.neuron("sp1")
    b.w(sp1, fresh, 1)
    sp2 = b.neuron("sp2")
    b.w(sp2, sp1, 1)
    b.w(phi[0], phi[RING_LEN - 1], 1)
    b.w(phi[0], sp2, 1)

    # Stack registers with senses, thermometers, and pop remainders.
    reg: dict[str, int] = {}
    ne: dict[str, int] = {}
    thermo: dict[str, dict[int, int]] = {}  # stack -> digit class -> neuron
    rem: dict[str, int] = {}
    for spec in prog.stacks:
        s_idx = b.neuron(f"{spec.name}.val", act=SAT)
        b.w(s_idx, s_idx, 1)
        reg[spec.name] = s_idx
        ne_idx = b.neuron(f"{spec.name}.ne")
        b.w(ne_idx, s_idx, 1)
        ne[spec.name] = ne_idx
        thermo[spec.name] = {}
        positive = [(ci, d) for ci, d in enumerate(spec.digit_values) if d > 0]
        for ci, d in positive:
            theta = d - 1
            if theta == 0:
                thermo[spec.name][ci] = ne_idx
            else:
                t_idx = b.neuron(f"{spec.name}.ge{d}", bias=-theta)
                b.w(t_idx, s_idx, spec.base)
                thermo[spec.name][ci] = t_idx
        r_idx = b.neuron(f"{spec.name}.rem", act=SAT)
        b.w(r_idx, s_idx, spec.base)
        prev = 0
        for ci, d in positive:
            b.w(r_idx, thermo[spec.name][ci], -(d - prev))
            prev = d
        rem[spec.name] = r_idx
    b.w(reg[fe.buffer_stack], grab, 1)

    # Control states.
    q: dict[str, int] = {}
    for st in states:
        q_idx = b.neuron(f"q.{st}")
        b.w(q_idx, q_idx, 1)
        q[st] = q_idx
    b.w(q[prog.start_state], sp2, 1)
    if prog.oracle is not None:
        stack_name, scalar = prog.oracle
        b.w_scalar(reg[stack_name], sp2, scalar)

    # Guard condition neurons (continuous), cached per (stack, class).
    cond_cache: dict[tuple[str, int], int] = {}

    def top_cond(stack: str, digit_class: int) -> int:
        key = (stack, digit_class)
        if key in cond_cache:
            return cond_cache[key]
        spec = stacks[stack]
        d = spec.digit_values[digit_class]
        c_idx = b.neuron(f"{stack}.top{d}")
        if d == 0:
            # Nonempty but below the smallest positive digit.
            b.w(c_idx, ne[stack], 1)
            first_pos = next(
                ci for ci, dv in enumerate(spec.digit_values) if dv > 0
            )
            b.w(c_idx, thermo[stack][first_pos], -1)
        else:
            b.w(c_idx, thermo[stack][digit_class], 1)
            higher = [
                ci
                for ci, dv in enumerate(spec.digit_values)
                if dv > d
            ]
            if higher:
                b.w(c_idx, thermo[stack][higher[0]], -1)
        cond_cache[key] = c_idx
        return c_idx

    # Rules: raw guards sampled at phase _PH_RAW, prioritised matches a tick
    # later, write gating and candidate assembly after that.
    raw_by_state: dict[str, list[int]] = {st: [] for st in states}
    raws: list[int] = []
    matches: list[int] = []
    for r_i, rule in enumerate(prog.rules):
        if rule.state not in q:
            raise ConstructionError(f"rule {r_i} uses undeclared state {rule.state!r}")
        raw = b.neuron(f"raw{r_i}.{rule.state}")
        positives = 2  # the state indicator and the phase gate
        b.w(raw, q[rule.state], 1)
        b.w(raw, phi[_PH_RAW], 1)
        for guard in rule.guards:
            if guard.stack not in stacks:
                raise ConstructionError(f"guard on undeclared stack {guard.stack!r}")
            if guard.kind == "empty":
                b.w(raw, ne[guard.stack], -1)
            elif guard.kind == "nonempty":
                b.w(raw, ne[guard.stack], 1)
                positives += 1
            elif guard.kind == "top":
                b.w(raw, top_cond(guard.stack, guard.digit_class), 1)
                positives += 1
            else:
                raise ConstructionError(f"unknown guard kind {guard.kind!r}")
        b.add_bias(raw, -(positives - 1))
        match = b.neuron(f"match{r_i}.{rule.state}")
        b.w(match, raw, 1)
        for earlier in raw_by_state[rule.state]:
            b.w(match, earlier, -1)
        raw_by_state[rule.state].append(raw)
        raws.append(raw)
        matches.append(match)

    nomatch = b.neuron("nomatch")
    b.w(nomatch, phi[_PH_NOMATCH], 1)
    for raw in raws:
        b.w(nomatch, raw, -1)
    halt_pulse = b.neuron("halt")
    b.w(halt_pulse, nomatch, 1)

    # Per-rule execution: delayed match pulse, candidates, gates.
    md: list[int] = []
    for r_i, rule in enumerate(prog.rules):
        m_idx = b.neuron(f"md{r_i}", bias=-1)
        b.w(m_idx, matches[r_i], 1)
        b.w(m_idx, phi[_PH_EXEC], 1)
        md.append(m_idx)

    touching: dict[str, list[int]] = {name: [] for name in stacks}
    gates: dict[str, list[int]] = {name: [] for name in stacks}
    for r_i, rule in enumerate(prog.rules):
        per_stack: dict[str, list[StackOp]] = {}
        for op in rule.ops:
            if op.stack not in stacks:
                raise ConstructionError(f"op on undeclared stack {op.stack!r}")
            per_stack.setdefault(op.stack, []).append(op)
        for stack_name, ops in per_stack.items():
            if len(ops) != 1:
                raise ConstructionError(
                    f"rule {r_i}: at most one op per stack per rule"
                )
            op = ops[0]
            spec = stacks[stack_name]
            base = spec.base
            cand = b.neuron(f"cand{r_i}.{stack_name}", act=SAT)
            if op.kind == "pop":
                b.w(cand, rem[stack_name], 1)
                b.w(cand, phi[_PH_EXEC], 1)
                b.add_bias(cand, -1)
            elif op.kind == "push":
                d = spec.digit_values[op.digit_class]
                b.w(cand, reg[stack_name], Fraction(1, base))
                b.add_bias(cand, Fraction(d, base))
            elif op.kind == "poppush":
                d = spec.digit_values[op.digit_class]
                b.w(cand, rem[stack_name], Fraction(1, base))
                b.add_bias(cand, Fraction(d, base))
            elif op.kind == "pushmany":
                if not spec.is_unary:
                    raise ConstructionError("pushmany only on unary stacks")
                m = op.count
                b.w(cand, reg[stack_name], Fraction(1, base**m))
                b.add_bias(cand, Fraction(base**m - 1, (base - 1) * base**m))
            elif op.kind == "popmany":
                if not spec.is_unary:
                    raise ConstructionError("popmany only on unary stacks")
                m = op.count
                b.w(cand, reg[stack_name], base**m)
                b.add_bias(cand, -Fraction(base**m - 1, base - 1))
            else:
                raise ConstructionError(f"unknown op kind {op.kind!r}")
            gate = b.neuron(f"g{r_i}.{stack_name}", act=SAT, bias=-1)
            b.w(gate, cand, 1)
            b.w(gate, md[r_i], 1)
            gates[stack_name].append(gate)
            touching[stack_name].append(matches[r_i])

    for stack_name, match_list in touching.items():
        if not match_list:
            continue
        ww = b.neuron(f"ww.{stack_name}", bias=-1)
        for m_idx in match_list:
            b.w(ww, m_idx, 1)
        b.w(ww, phi[_PH_EXEC], 1)
        kill = b.neuron(f"kill.{stack_name}", act=SAT, bias=-1)
        b.w(kill, reg[stack_name], 1)
        b.w(kill, ww, 1)
        b.w(reg[stack_name], kill, -1)
        for gate in gates[stack_name]:
            b.w(reg[stack_name], gate, 1)

    # State transitions: the kill and the target pulse must land on the same
    # tick, so the delayed match is delayed once more for the target.
    anymatch = b.neuron("anymatch", bias=-1)
    for m_idx in matches:
        b.w(anymatch, m_idx, 1)
    b.w(anymatch, phi[_PH_EXEC], 1)
    for st in states:
        kq = b.neuron(f"kq.{st}", bias=-1)
        b.w(kq, q[st], 1)
        b.w(kq, anymatch, 1)
        b.w(q[st], kq, -1)
    target_pulse: dict[str, int] = {}
    for r_i, rule in enumerate(prog.rules):
        if rule.next_state not in target_pulse:
            target_pulse[rule.next_state] = b.neuron(f"tp.{rule.next_state}")
            b.w(q[rule.next_state], target_pulse[rule.next_state], 1)
        b.w(target_pulse[rule.next_state], md[r_i], 1)

    # Outputs.
    out = prog.output
    flag_idx: Optional[int] = None
    if out.flag_states:
        flag_idx = b.neuron("out.flag")
        for st in out.flag_states:
            b.w(flag_idx, q[st], 1)
    if out.mode == "verdict":
        out_valid = b.neuron("out.valid")
        b.w(out_valid, halt_pulse, 1)
        out_data = b.neuron("out.data", bias=-1)
        b.w(out_data, halt_pulse, 1)
        for st in out.accept_states:
            b.w(out_data, q[st], 1)
        for stack_name in out.require_empty:
            b.w(out_data, ne[stack_name], -1)
    elif out.mode == "emission":
        out_valid = b.neuron("out.valid")
        for st in out.emit_states:
            b.w(out_valid, q[st], 1)
        out_data = b.neuron("out.data")
        for r_i, rule in enumerate(prog.rules):
            if rule.emit:
                b.w(out_data, md[r_i], 1)
    else:
        raise ConstructionError(f"unknown output mode {out.mode!r}")

    return b.build(
        fe.n_lines,
        out_data=out_data,
        out_valid=out_valid,
        out_flag=flag_idx,
        input_symbols=fe.input_symbols,
    )
