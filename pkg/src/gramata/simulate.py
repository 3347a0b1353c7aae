"""Budget-bounded nondeterministic execution of group automata.

The search is a breadth-first exploration of configurations
(state, input position, register) with duplicate pruning. A path may take
epsilon moves before, between and after input symbols; depth counts every
transition applied. Acceptance means some configuration with an accepting
state, the whole input consumed and the identity register is reachable
within the depth budget.

Verdicts are three-valued. Let d_min be the length of the shortest path
from (initial, 0) to (accepting, |w|) in the register-ignoring projection
of the machine on the word. BudgetExhausted is reported exactly when no
acceptance was found and budget < d_min < infinity: the budget was too
small for the machine to even consume the input and reach an accepting
state, so nothing was decided. Otherwise a failed search is a Reject:
either acceptance is structurally impossible (d_min infinite), or every
configuration that could still have accepted within the budget was
explored. Branches that provably cannot reach acceptance in the remaining
depth are pruned by the same register-ignoring distance table; the pruning
is admissible, so it never changes a verdict.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional

from .errors import GramataError, MemoryGuard, UnknownSymbol

DEFAULT_MEM_GUARD = 10**7


def _mem_guard():
    value = os.environ.get("GRAMATA_MEM_GUARD")
    return int(value) if value else DEFAULT_MEM_GUARD


def _ceil_log2(n):
    return (n - 1).bit_length()


@dataclass(frozen=True)
class BudgetPolicy:
    """Depth budget slope*m + log_coeff*ceil(log2(m + log_shift)) + offset.
    Monotone nondecreasing and picklable, so policies travel to workers."""

    slope: int
    offset: int
    log_coeff: int = 0
    log_shift: int = 1

    def __call__(self, m):
        budget = self.slope * m + self.offset
        if self.log_coeff:
            budget += self.log_coeff * _ceil_log2(m + self.log_shift)
        return max(1, budget)


@dataclass(frozen=True)
class ConstantPolicy:
    depth: int

    def __call__(self, m):
        return self.depth


# the stock depth budget: 4m + 8*ceil(log2(m+2)) + 16
default_policy = BudgetPolicy(slope=4, offset=16, log_coeff=8, log_shift=2)


def constant_policy(depth):
    return ConstantPolicy(depth)


class Verdict(str, Enum):
    ACCEPT = "Accept"
    REJECT = "Reject"
    BUDGET_EXHAUSTED = "BudgetExhausted"

    def __str__(self):
        return self.value


class Configuration(NamedTuple):
    state: str
    position: int
    register: object


@dataclass
class SearchStats:
    expanded: int = 0
    max_depth: int = 0
    accept_depth: Optional[int] = None


@dataclass
class RunResult:
    verdict: Verdict
    stats: SearchStats
    certificate: Optional[tuple] = None  # transitions of the accepting path

    @property
    def accepted(self):
        return self.verdict is Verdict.ACCEPT


def tokenize_word(text, alphabet):
    """Split CLI/word input into symbols of the given alphabet."""
    if text in ("", "ε"):
        return ()
    alphabet = set(alphabet)
    if any(ch.isspace() for ch in text):
        tokens = tuple(text.split())
    elif text in alphabet:
        tokens = (text,)
    else:
        tokens = tuple(text)
    for tok in tokens:
        if tok not in alphabet:
            raise UnknownSymbol(f"symbol {tok!r} not in alphabet")
    return tokens


def format_word(word):
    if not word:
        return "ε"
    if all(len(sym) == 1 for sym in word):
        return "".join(word)
    return " ".join(word)


def _submachine(efa):
    """Transition tables: per-state epsilon list and per (state, symbol) list."""
    eps = {q: tuple() for q in efa.states}
    sym = {}
    for t in efa.transitions:
        if t.symbol is None:
            eps[t.source] = eps[t.source] + (t,)
        else:
            sym.setdefault((t.source, t.symbol), []).append(t)
    sym = {k: tuple(v) for k, v in sym.items()}
    return eps, sym


def _distances_to_accept(efa, word, eps, sym):
    """Register-ignoring distance from each (state, position) to acceptance,
    via backward breadth-first search on the product graph."""
    n = len(word)
    back = {(q, p): [] for q in efa.states for p in range(n + 1)}
    for q in efa.states:
        for p in range(n + 1):
            for t in eps[q]:
                back[(t.target, p)].append((q, p))
            if p < n:
                for t in sym.get((q, word[p]), ()):
                    back[(t.target, p + 1)].append((q, p))
    dist = {}
    frontier = [(q, n) for q in efa.accepting]
    for node in frontier:
        dist[node] = 0
    d = 0
    while frontier:
        d += 1
        nxt = []
        for node in frontier:
            for prev in back.get(node, ()):
                if prev not in dist:
                    dist[prev] = d
                    nxt.append(prev)
        frontier = nxt
    return dist


def step(efa, config, word):
    """All one-transition successors of a configuration on the given word."""
    eps, sym = _submachine(efa)
    group = efa.group
    out = set()
    q, pos, reg = config
    for t in eps[q]:
        out.add(Configuration(t.target, pos, group.mul(reg, t.register)))
    if pos < len(word):
        for t in sym.get((q, word[pos]), ()):
            out.add(Configuration(t.target, pos + 1, group.mul(reg, t.register)))
    return out


def accepts(efa, word, policy=default_policy, *, dedup=True):
    """Run the machine on a word under a depth budget."""
    word = tuple(word)
    alphabet = set(efa.alphabet)
    for symb in word:
        if symb not in alphabet:
            raise UnknownSymbol(f"symbol {symb!r} not in alphabet")
    budget = max(1, policy(len(word)))
    eps, sym = _submachine(efa)
    dist = _distances_to_accept(efa, word, eps, sym)
    d_min = dist.get((efa.initial, 0))

    search = _search_bfs if dedup else _search_dfs
    stats, certificate = search(efa, word, budget, eps, sym, dist)
    if certificate is not None:
        _verify_certificate(efa, word, certificate)
        return RunResult(Verdict.ACCEPT, stats, certificate)
    if d_min is not None and d_min > budget:
        return RunResult(Verdict.BUDGET_EXHAUSTED, stats)
    return RunResult(Verdict.REJECT, stats)


def _move_table(word, eps, sym):
    """Applicable transitions per (state, position), cached by the input
    symbol under the cursor."""
    n = len(word)
    cache = {}

    def moves_for(q, pos):
        s = word[pos] if pos < n else None
        key = (q, s)
        got = cache.get(key)
        if got is None:
            got = eps[q] + (sym.get((q, s), ()) if s is not None else ())
            cache[key] = got
        return got

    return moves_for


def _search_bfs(efa, word, budget, eps, sym, dist):
    group = efa.group
    n = len(word)
    accepting = efa.accepting
    is_identity = group.is_identity
    mul = group.mul
    guard = _mem_guard()
    moves_for = _move_table(word, eps, sym)

    root = Configuration(efa.initial, 0, group.identity())
    stats = SearchStats()
    if root.state in accepting and n == 0 and is_identity(root.register):
        stats.accept_depth = 0
        return stats, ()

    parents = {root: None}
    frontier = [root]
    depth = 0
    while frontier and depth < budget:
        depth += 1
        nxt = []
        for config in frontier:
            stats.expanded += 1
            q, pos, reg = config
            for t in moves_for(q, pos):
                npos = pos if t.symbol is None else pos + 1
                remaining = dist.get((t.target, npos))
                if remaining is None or depth + remaining > budget:
                    continue
                child = Configuration(t.target, npos, mul(reg, t.register))
                if child in parents:
                    continue
                parents[child] = (config, t)
                if t.target in accepting and npos == n and is_identity(child.register):
                    stats.accept_depth = depth
                    stats.max_depth = depth
                    return stats, _unwind(parents, child)
                nxt.append(child)
        if len(parents) > guard:
            raise MemoryGuard(f"visited set exceeded {guard} configurations")
        if nxt:
            stats.max_depth = depth
        frontier = nxt
    return stats, None


def _search_dfs(efa, word, budget, eps, sym, dist):
    """The same bounded search without duplicate pruning (verdict oracle for
    the deduplication-soundness check). The tree can be millions of nodes,
    so the loop leans on locals and flat stack frames."""
    group = efa.group
    n = len(word)
    accepting = efa.accepting
    is_identity = group.is_identity
    mul = group.mul
    dist_get = dist.get

    stats = SearchStats()
    root_reg = group.identity()
    if efa.initial in accepting and n == 0 and is_identity(root_reg):
        stats.accept_depth = 0
        return stats, ()

    moves_for = _move_table(word, eps, sym)
    # frames: [position, register, moves, next-move index]
    stack = [[0, root_reg, moves_for(efa.initial, 0), 0]]
    expanded = 0
    max_depth = 0
    while stack:
        frame = stack[-1]
        moves = frame[2]
        idx = frame[3]
        if idx >= len(moves):
            stack.pop()
            continue
        frame[3] = idx + 1
        t = moves[idx]
        depth = len(stack)
        npos = frame[0] if t.symbol is None else frame[0] + 1
        # once depth reaches the budget, remaining >= 0 prunes everything
        remaining = dist_get((t.target, npos))
        if remaining is None or depth + remaining > budget:
            continue
        reg = mul(frame[1], t.register)
        expanded += 1
        if depth > max_depth:
            max_depth = depth
        if npos == n and t.target in accepting and is_identity(reg):
            stats.expanded = expanded
            stats.max_depth = max_depth
            stats.accept_depth = depth
            return stats, tuple(f[2][f[3] - 1] for f in stack)
        stack.append([npos, reg, moves_for(t.target, npos), 0])
    stats.expanded = expanded
    stats.max_depth = max_depth
    return stats, None


def _unwind(parents, config):
    path = []
    while parents[config] is not None:
        parent, t = parents[config]
        path.append(t)
        config = parent
    path.reverse()
    return tuple(path)


def _verify_certificate(efa, word, certificate):
    """Re-multiply the register product along the claimed accepting path."""
    group = efa.group
    state, pos, reg = efa.initial, 0, group.identity()
    for t in certificate:
        if t.source != state:
            raise GramataError("unsound certificate: broken path")
        if t.symbol is not None:
            if pos >= len(word) or word[pos] != t.symbol:
                raise GramataError("unsound certificate: symbol mismatch")
            pos += 1
        state = t.target
        reg = group.mul(reg, t.register)
    if state not in efa.accepting or pos != len(word) or not group.is_identity(reg):
        raise GramataError("unsound certificate: not accepting")


@dataclass
class EnumerationResult:
    words: list
    budget_exhausted: list

    def __iter__(self):
        return iter(self.words)


def all_words(alphabet, max_len):
    alphabet = tuple(sorted(alphabet))
    for length in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=length)


def _verdict_chunk(args):
    efa, words, policy = args
    return [(w, accepts(efa, w, policy).verdict) for w in words]


def _verdicts_for_words(efa, words, policy, workers=1):
    if workers and workers > 1 and len(words) > 256:
        chunks = [words[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_verdict_chunk, [(efa, chunk, policy) for chunk in chunks])
        merged = dict(pair for part in parts for pair in part)
        return [merged[w] for w in words]
    return [accepts(efa, w, policy).verdict for w in words]


def enumerate_words(efa, max_len, policy=default_policy, workers=1):
    """All accepted words of length <= max_len, in length-then-lex order.
    BudgetExhausted words are attached as warnings."""
    words = list(all_words(efa.alphabet, max_len))
    verdicts = _verdicts_for_words(efa, words, policy, workers)
    accepted = [w for w, v in zip(words, verdicts) if v is Verdict.ACCEPT]
    undecided = [w for w, v in zip(words, verdicts) if v is Verdict.BUDGET_EXHAUSTED]
    return EnumerationResult(accepted, undecided)


@dataclass
class EquivReport:
    machine_name: str
    oracle_name: str
    max_len: int
    checked: int
    mismatches: list = field(default_factory=list)  # (word, expected, verdict)
    budget_exhausted: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.mismatches

    @property
    def clean(self):
        return self.passed and not self.budget_exhausted

    def lines(self):
        out = [
            f"machine {self.machine_name} vs oracle {self.oracle_name}: "
            f"{self.checked} words up to length {self.max_len}: "
            f"{len(self.mismatches)} mismatches, {len(self.budget_exhausted)} undecided"
        ]
        for word, expected, verdict in self.mismatches:
            out.append(f"mismatch\t{format_word(word)}\texpected={expected}\tgot={verdict}")
        for word in self.budget_exhausted:
            out.append(f"undecided\t{format_word(word)}")
        return out


def equiv_check(efa, oracle, alphabet, max_len, policy=default_policy, workers=1, name=""):
    """Exhaustively compare machine verdicts against a membership predicate."""
    words = list(all_words(alphabet, max_len))
    verdicts = _verdicts_for_words(efa, words, policy, workers)
    report = EquivReport(
        machine_name=name or "machine",
        oracle_name=getattr(oracle, "name", "oracle"),
        max_len=max_len,
        checked=len(words),
    )
    member = oracle.member if hasattr(oracle, "member") else oracle
    for word, verdict in zip(words, verdicts):
        expected = bool(member(word))
        if verdict is Verdict.BUDGET_EXHAUSTED:
            report.budget_exhausted.append(word)
        elif (verdict is Verdict.ACCEPT) != expected:
            report.mismatches.append((word, expected, verdict))
    return report


def reachable_register_count(efa, max_len, policy=default_policy):
    """Per length l <= max_len: the number of distinct (state, register)
    pairs reachable while consuming any input of length at most l, within
    the depth budget policy(l)."""
    group = efa.group
    eps, sym = _submachine(efa)
    symbol_moves = {}
    for (q, _), ts in sym.items():
        symbol_moves.setdefault(q, tuple())
        symbol_moves[q] = symbol_moves[q] + ts
    guard = _mem_guard()
    budget_cap = max(1, policy(max_len))

    root = (efa.initial, 0, group.identity())
    visited = {root: 0}  # (state, symbols consumed, register) -> min depth
    frontier = [root]
    depth = 0
    while frontier and depth < budget_cap:
        depth += 1
        nxt = []
        for q, k, reg in frontier:
            moves = eps[q]
            if k < max_len:
                moves = moves + symbol_moves.get(q, ())
            for t in moves:
                nk = k if t.symbol is None else k + 1
                node = (t.target, nk, group.mul(reg, t.register))
                if node not in visited:
                    visited[node] = depth
                    nxt.append(node)
        if len(visited) > guard:
            raise MemoryGuard(f"visited set exceeded {guard} configurations")
        frontier = nxt

    counts = []
    for length in range(max_len + 1):
        limit = max(1, policy(length))
        seen = {(q, reg) for (q, k, reg), d in visited.items() if k <= length and d <= limit}
        counts.append(len(seen))
    return counts
