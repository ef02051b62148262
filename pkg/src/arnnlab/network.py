"""The analog recurrent network and its synchronous dynamics.

A network is a finite set of neurons with exact-scalar state weights a[i][j],
input-line weights b[i][j], and biases c[i]; every neuron updates at once::

    x_i(t+1) = act_i( sum_j a_ij x_j(t) + sum_j b_ij u_j(t) + c_i )

where act_i is the saturated-linear clamp or the binary signal function.
Words are presented one symbol per tick, one-hot on the M data lines, with a
shared validation line (input column M) held at 1 exactly while symbols are
present.  The verdict is read from the output data line on the first tick the
output validation line is 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .errors import ConfigError, ShapeError, UnknownSign
from .exact import (
    ExactScalar,
    Interval,
    PrecisionBudget,
    affine_combine,
    saturated_sigma,
    signal,
)

try:  # exact rationals with a faster core, if available
    from gmpy2 import mpq as _fastrat
except ImportError:  # pragma: no cover - gmpy2 is an optional speedup
    _fastrat = Fraction

__all__ = [
    "IOTrace",
    "Network",
    "NetworkState",
    "RecognitionReport",
    "RunResult",
    "TickRecord",
    "Verdict",
    "recognizes",
    "run",
    "step",
    "zero_state",
]

SAT = "sat"
SIG = "sig"


class Verdict(Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    TIMEOUT = "timeout"


class Network:
    """ARNN with N neurons and M data lines (+ implicit validation line).

    Weights are sparse maps; omitted entries are zero.  Input weight columns
    run 0..M where column M is the validation line.  ``input_symbols``, when
    given, names the symbol carried one-hot by each data line so that words
    can be run directly.
    """

    def __init__(
        self,
        n_neurons: int,
        n_inputs: int,
        *,
        state_weights: Optional[dict[tuple[int, int], ExactScalar]] = None,
        input_weights: Optional[dict[tuple[int, int], ExactScalar]] = None,
        biases: Optional[dict[int, ExactScalar]] = None,
        activations: Optional[Sequence[str]] = None,
        out_data: Optional[int] = None,
        out_valid: Optional[int] = None,
        out_flag: Optional[int] = None,
        input_symbols: Optional[Sequence[str]] = None,
        neuron_names: Optional[Sequence[str]] = None,
    ) -> None:
        if n_neurons < 1:
            raise ShapeError("a network needs at least one neuron")
        if n_inputs < 0:
            raise ShapeError("n_inputs must be nonnegative")
        self.n_neurons = n_neurons
        self.n_inputs = n_inputs
        self.state_weights = dict(state_weights or {})
        self.input_weights = dict(input_weights or {})
        self.biases = dict(biases or {})
        if activations is None:
            activations = (SAT,) * n_neurons
        self.activations = tuple(activations)
        if len(self.activations) != n_neurons:
            raise ShapeError("one activation per neuron required")
        for act in self.activations:
            if act not in (SAT, SIG):
                raise ShapeError(f"unknown activation {act!r}")
        for (i, j) in self.state_weights:
            if not (0 <= i < n_neurons and 0 <= j < n_neurons):
                raise ShapeError(f"state weight ({i},{j}) out of range")
        for (i, j) in self.input_weights:
            if not (0 <= i < n_neurons and 0 <= j <= n_inputs):
                raise ShapeError(f"input weight ({i},{j}) out of range")
        for i in self.biases:
            if not 0 <= i < n_neurons:
                raise ShapeError(f"bias index {i} out of range")
        for name, idx in (("out_data", out_data), ("out_valid", out_valid), ("out_flag", out_flag)):
            if idx is not None and not 0 <= idx < n_neurons:
                raise ShapeError(f"{name} index {idx} out of range")
        self.out_data = out_data
        self.out_valid = out_valid
        self.out_flag = out_flag
        self.input_symbols = tuple(input_symbols) if input_symbols is not None else None
        if self.input_symbols is not None and len(self.input_symbols) != n_inputs:
            raise ShapeError("one symbol per data line required")
        self.neuron_names = tuple(neuron_names) if neuron_names is not None else None
        if self.neuron_names is not None and len(self.neuron_names) != n_neurons:
            raise ShapeError("one name per neuron required")
        self._compiled = None

    def scalars(self) -> Iterable[ExactScalar]:
        yield from self.state_weights.values()
        yield from self.input_weights.values()
        yield from self.biases.values()

    def is_exact(self) -> bool:
        """True when every scalar denotes a single known rational."""
        return all(s.is_exact for s in self.scalars())

    def replace_state_weight(self, i: int, j: int, scalar: ExactScalar) -> "Network":
        """Copy of the network with one state weight substituted."""
        weights = dict(self.state_weights)
        weights[(i, j)] = scalar
        return Network(
            self.n_neurons,
            self.n_inputs,
            state_weights=weights,
            input_weights=self.input_weights,
            biases=self.biases,
            activations=self.activations,
            out_data=self.out_data,
            out_valid=self.out_valid,
            out_flag=self.out_flag,
            input_symbols=self.input_symbols,
            neuron_names=self.neuron_names,
        )

    def line_for_symbol(self, symbol: str) -> int:
        if self.input_symbols is None:
            raise ConfigError("network declares no input symbols")
        try:
            return self.input_symbols.index(symbol)
        except ValueError:
            raise ConfigError(
                f"symbol {symbol!r} not among input symbols {self.input_symbols}"
            )


Value = Union[int, Fraction, Interval]

#: A network state: one value per neuron, each confined to [0, 1] (or an
#: interval enclosure of such a value when lazy scalars are involved).
NetworkState = tuple[Value, ...]


def zero_state(net: Network) -> NetworkState:
    return (0,) * net.n_neurons


def step(
    net: Network,
    state: Sequence[Value],
    inputs: Sequence[int] = (),
    validation: int = 0,
    budget: Optional[PrecisionBudget] = None,
) -> tuple[Value, ...]:
    """One synchronous update; exact for integer/rational scalars.

    With lazy scalars a precision budget is required and state components
    may become interval enclosures; an undecidable signal activation raises
    ``UnknownSign`` naming the neuron.
    """
    if len(state) != net.n_neurons:
        raise ShapeError(f"state has {len(state)} components, expected {net.n_neurons}")
    if len(inputs) != net.n_inputs:
        raise ShapeError(f"{len(inputs)} inputs given, expected {net.n_inputs}")
    u = tuple(int(b) for b in inputs) + (int(validation),)
    new_state: list[Value] = []
    for i in range(net.n_neurons):
        weights, sources = [], []
        for j in range(net.n_neurons):
            w = net.state_weights.get((i, j))
            if w is not None:
                weights.append(w)
                sources.append(state[j])
        in_weights, in_bits = [], []
        for j in range(net.n_inputs + 1):
            w = net.input_weights.get((i, j))
            if w is not None:
                in_weights.append(w)
                in_bits.append(u[j])
        bias = net.biases.get(i, 0)
        acc = affine_combine(weights, sources, in_weights, in_bits, bias, budget=budget)
        try:
            if net.activations[i] == SIG:
                new_state.append(signal(acc, budget))
            else:
                new_state.append(saturated_sigma(acc, budget))
        except UnknownSign as exc:
            raise UnknownSign(f"neuron {i}: {exc}") from exc
    return tuple(new_state)


# ---------------------------------------------------------------------------
# Fast exact runner (push-based sparse propagation)


class _CompiledNet:
    """Per-network precomputation for the exact simulation fast path."""

    def __init__(self, net: Network) -> None:
        def num(scalar: ExactScalar):
            frac = scalar.exact_fraction()
            if frac is None:
                raise ValueError("network contains a lazily-known scalar")
            if frac.denominator == 1:
                return int(frac)
            return _fastrat(frac.numerator, frac.denominator)

        n = net.n_neurons
        self.n = n
        self.out_state: list[list[tuple[int, object]]] = [[] for _ in range(n)]
        for (i, j), scalar in net.state_weights.items():
            w = num(scalar)
            if w:
                self.out_state[j].append((i, w))
        self.out_input: list[list[tuple[int, object]]] = [
            [] for _ in range(net.n_inputs + 1)
        ]
        for (i, j), scalar in net.input_weights.items():
            w = num(scalar)
            if w:
                self.out_input[j].append((i, w))
        self.biases = [0] * n
        for i, scalar in net.biases.items():
            self.biases[i] = num(scalar)
        self.sat_mask = [act == SAT for act in net.activations]


def _compiled(net: Network) -> _CompiledNet:
    if net._compiled is None:
        net._compiled = _CompiledNet(net)
    return net._compiled


def _fast_step(cn: _CompiledNet, state: list, inputs: Sequence[int], validation: int):
    acc = cn.biases.copy()
    for j, xj in enumerate(state):
        if xj:
            if xj == 1:
                for i, w in cn.out_state[j]:
                    acc[i] += w
            else:
                for i, w in cn.out_state[j]:
                    acc[i] += w * xj
    for j, uj in enumerate(inputs):
        if uj:
            for i, w in cn.out_input[j]:
                acc[i] += w
    if validation:
        for i, w in cn.out_input[-1]:
            acc[i] += w
    sat = cn.sat_mask
    new = []
    for i, a in enumerate(acc):
        if a <= 0:
            new.append(0)
        elif sat[i]:
            new.append(1 if a >= 1 else a)
        else:
            new.append(1)
    return new


# ---------------------------------------------------------------------------
# Word protocol


@dataclass(frozen=True)
class TickRecord:
    """I/O lines observed across one tick."""

    inputs: tuple[int, ...]
    validation: int
    out_data: int
    out_valid: int
    out_flag: Optional[int] = None


IOTrace = tuple[TickRecord, ...]


@dataclass(frozen=True)
class RunResult:
    verdict: Verdict
    trace: IOTrace
    ticks: int
    decided_at: Optional[int] = None
    flagged: bool = False


def _out_bit(value: Value) -> int:
    if isinstance(value, Interval):
        return signal(value)
    return 1 if value > 0 else 0


def run(
    net: Network,
    word: str,
    budget: int,
    *,
    record_trace: bool = True,
    budget_precision: Optional[PrecisionBudget] = None,
) -> RunResult:
    """Present a word and poll the output lines for a verdict.

    The word's symbols are shown one per tick, one-hot on the data lines with
    validation 1, then all lines drop to 0.  The verdict is latched from the
    output data line on the first tick the output validation line is 1;
    ``Verdict.TIMEOUT`` is returned if the tick budget runs out first.
    """
    if net.out_data is None or net.out_valid is None:
        raise ConfigError("network has no designated output lines")
    if budget < len(word) + 1:
        raise ConfigError(
            f"budget {budget} is too small for a {len(word)}-symbol word"
        )
    lines = [net.line_for_symbol(ch) for ch in word] if word else []

    exact = net.is_exact()
    if exact:
        cn = _compiled(net)
        state: Sequence[Value] = [0] * net.n_neurons
    else:
        if budget_precision is None:
            budget_precision = PrecisionBudget(max_digits=128, on_exhaustion="fail")
        state = zero_state(net)

    records: list[TickRecord] = []
    zeros = (0,) * net.n_inputs
    for t in range(budget):
        if t < len(lines):
            inputs = tuple(1 if j == lines[t] else 0 for j in range(net.n_inputs))
            validation = 1
        else:
            inputs = zeros
            validation = 0
        if exact:
            state = _fast_step(cn, state, inputs, validation)
        else:
            state = step(net, state, inputs, validation, budget=budget_precision)
        data_bit = _out_bit(state[net.out_data])
        valid_bit = _out_bit(state[net.out_valid])
        flag_bit = _out_bit(state[net.out_flag]) if net.out_flag is not None else None
        if record_trace:
            records.append(
                TickRecord(inputs, validation, data_bit, valid_bit, flag_bit)
            )
        if valid_bit:
            verdict = Verdict.ACCEPT if data_bit else Verdict.REJECT
            return RunResult(
                verdict,
                tuple(records),
                ticks=t + 1,
                decided_at=t + 1,
                flagged=bool(flag_bit),
            )
    return RunResult(Verdict.TIMEOUT, tuple(records), ticks=budget)


@dataclass(frozen=True)
class RecognitionReport:
    """Agreement tabulation between a network and a labeled sample."""

    total: int
    agreements: int
    disagreements: tuple[tuple[str, int, Verdict], ...]
    timeouts: tuple[str, ...]

    @property
    def all_agree(self) -> bool:
        return self.agreements == self.total and not self.timeouts

    def __str__(self) -> str:
        base = f"{self.agreements}/{self.total} agree"
        if self.timeouts:
            base += f", {len(self.timeouts)} timeouts"
        return base


def recognizes(
    net: Network,
    language_sample: Iterable[tuple[str, int]],
    budget: Union[int, "callable"],
) -> RecognitionReport:
    """Run each sample word and tabulate agreement with the expected bits.

    ``budget`` may be a tick count or a function of the word.  A budget too
    small to even present a word counts as a timeout for that word.
    """
    total = 0
    agreements = 0
    disagreements: list[tuple[str, int, Verdict]] = []
    timeouts: list[str] = []
    for word, expected in language_sample:
        total += 1
        ticks = budget(word) if callable(budget) else budget
        if ticks < len(word) + 1:
            timeouts.append(word)
            continue
        result = run(net, word, ticks, record_trace=False)
        if result.verdict == Verdict.TIMEOUT:
            timeouts.append(word)
            continue
        got = 1 if result.verdict == Verdict.ACCEPT else 0
        if got == int(expected):
            agreements += 1
        else:
            disagreements.append((word, int(expected), result.verdict))
    return RecognitionReport(total, agreements, tuple(disagreements), tuple(timeouts))
