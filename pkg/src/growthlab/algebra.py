"""Growth of finitely generated monomial algebras by counting words.

A monomial algebra on ``g`` generators with forbidden factors ``W`` has the
surviving words as a basis, so ``dim V^n`` is the number of words of length
at most ``n`` avoiding every word of ``W`` (the empty word included).  Counts
come from an Aho-Corasick automaton over ``W``; brute-force enumeration is
kept as an independent oracle.
"""

from __future__ import annotations

import itertools
import json
import warnings
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

from .verify import IntSequence

__all__ = [
    "MonomialAlgebraSpec",
    "FactorAutomaton",
    "DegenerateSpec",
    "BudgetExceeded",
    "growth_table",
    "word_count",
    "word_counts",
    "brute_force_count",
    "characteristic_recurrence",
    "word_counts_by_recurrence",
    "parse_word",
    "load_spec",
]

Word = Tuple[int, ...]
BRUTE_FORCE_BUDGET = 10 ** 7


class DegenerateSpec(UserWarning):
    """Every generator is forbidden; the growth is the constant 1."""


class BudgetExceeded(RuntimeError):
    pass


def parse_word(text: Union[str, Sequence[int]]) -> Word:
    if isinstance(text, str):
        return tuple(int(ch) for ch in text)
    return tuple(int(a) for a in text)


def _reduce(words: Iterable[Word]) -> Tuple[Tuple[Word, ...], Tuple[Word, ...]]:
    """Drop duplicates and words containing another forbidden word."""
    uniq = sorted(set(words), key=lambda w: (len(w), w))
    kept, dropped = [], []
    for w in uniq:
        b = bytes(w)
        if any(bytes(u) in b for u in kept):
            dropped.append(w)
        else:
            kept.append(w)
    return tuple(kept), tuple(dropped)


@dataclass(frozen=True)
class MonomialAlgebraSpec:
    alphabet_size: int
    forbidden: Tuple[Word, ...] = ()
    dropped: Tuple[Word, ...] = ()

    def __post_init__(self):
        if self.alphabet_size < 1:
            raise ValueError("need at least one generator")
        words = tuple(parse_word(w) for w in self.forbidden)
        for w in words:
            if not w:
                raise ValueError("the empty word cannot be forbidden")
            if any(not 0 <= a < self.alphabet_size for a in w):
                raise ValueError(f"word {w} uses letters outside 0..{self.alphabet_size - 1}")
        kept, dropped = _reduce(words)
        object.__setattr__(self, "forbidden", kept)
        object.__setattr__(self, "dropped", tuple(self.dropped) + dropped)

    @property
    def degenerate(self) -> bool:
        return all((a,) in self.forbidden for a in range(self.alphabet_size))

    def to_dict(self) -> dict:
        return {"alphabet": self.alphabet_size,
                "forbidden": ["".join(map(str, w)) for w in self.forbidden]}

    @classmethod
    def from_dict(cls, d: dict) -> "MonomialAlgebraSpec":
        return cls(int(d["alphabet"]), tuple(parse_word(w) for w in d.get("forbidden", [])))


def load_spec(path) -> MonomialAlgebraSpec:
    return MonomialAlgebraSpec.from_dict(json.loads(Path(path).read_text()))


class FactorAutomaton:
    """Deterministic automaton whose live runs are exactly the surviving words.

    States are the prefixes of forbidden words; a state is dead when it or
    one of its suffix-link ancestors completes a forbidden word.
    """

    def __init__(self, spec: MonomialAlgebraSpec):
        g = spec.alphabet_size
        goto: List[dict] = [{}]
        terminal = [False]
        for w in spec.forbidden:
            s = 0
            for a in w:
                if a not in goto[s]:
                    goto.append({})
                    terminal.append(False)
                    goto[s][a] = len(goto) - 1
                s = goto[s][a]
            terminal[s] = True
        n = len(goto)
        fail = [0] * n
        delta = [[0] * g for _ in range(n)]
        dead = list(terminal)
        queue = deque()
        for a in range(g):
            t = goto[0].get(a)
            if t is None:
                delta[0][a] = 0
            else:
                delta[0][a] = t
                queue.append(t)
        while queue:
            s = queue.popleft()
            dead[s] = dead[s] or dead[fail[s]]
            for a in range(g):
                t = goto[s].get(a)
                if t is None:
                    delta[s][a] = delta[fail[s]][a]
                else:
                    fail[t] = delta[fail[s]][a]
                    delta[s][a] = t
                    queue.append(t)
        live = [s for s in range(n) if not dead[s]]
        index = {s: i for i, s in enumerate(live)}
        self.spec = spec
        self.live = live
        # transfer matrix over live states: edges[i] lists targets (with repeats)
        self.edges = [[index[delta[s][a]] for a in range(g) if not dead[delta[s][a]]] for s in live]
        self.start = index[0]

    @property
    def size(self) -> int:
        return len(self.live)

    def matrix(self) -> List[List[int]]:
        m = [[0] * self.size for _ in range(self.size)]
        for i, row in enumerate(self.edges):
            for j in row:
                m[i][j] += 1
        return m

    def counts(self, N: int) -> List[int]:
        """Number of surviving words of each length 0..N."""
        vec = [0] * self.size
        vec[self.start] = 1
        out = [1]
        for _ in range(N):
            nxt = [0] * self.size
            for i, c in enumerate(vec):
                if c:
                    for j in self.edges[i]:
                        nxt[j] += c
            vec = nxt
            out.append(sum(vec))
        return out


def word_counts(spec: MonomialAlgebraSpec, N: int) -> List[int]:
    return FactorAutomaton(spec).counts(N)


def word_count(spec: MonomialAlgebraSpec, length: int) -> int:
    if length < 0:
        raise ValueError("length must be nonnegative")
    return word_counts(spec, length)[length]


def growth_table(spec: MonomialAlgebraSpec, N: int) -> IntSequence:
    """gamma(0..N): words of length <= n avoiding the forbidden factors."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if spec.degenerate:
        warnings.warn("every generator is forbidden; growth is constant", DegenerateSpec)
    return IntSequence(list(itertools.accumulate(word_counts(spec, N))), first=0)


def brute_force_count(spec: MonomialAlgebraSpec, length: int, budget: int = BRUTE_FORCE_BUDGET) -> int:
    """Enumerate all words of the given length and scan for forbidden factors."""
    g = spec.alphabet_size
    if g ** length > budget:
        raise BudgetExceeded(f"{g}^{length} words exceed budget {budget}")
    bad = [bytes(w) for w in spec.forbidden]
    return sum(1 for w in itertools.product(range(g), repeat=length)
               if not any(b in bytes(w) for b in bad))


def characteristic_recurrence(spec: MonomialAlgebraSpec) -> List[int]:
    """Coefficients ``c_0..c_s`` (``c_s = 1``) of the transfer matrix's characteristic polynomial.

    Word counts satisfy ``sum_i c_i w(l + i) = 0`` for every l >= 0.
    Computed with Faddeev-LeVerrier, exact over the integers.
    """
    A = FactorAutomaton(spec).matrix()
    s = len(A)
    coeffs = [0] * (s + 1)
    coeffs[s] = 1
    M = [[0] * s for _ in range(s)]
    for k in range(1, s + 1):
        AM = [[sum(A[i][t] * M[t][j] for t in range(s)) for j in range(s)] for i in range(s)]
        for i in range(s):
            AM[i][i] += coeffs[s - k + 1]
        M = AM
        AM2 = [[sum(A[i][t] * M[t][j] for t in range(s)) for j in range(s)] for i in range(s)]
        tr = sum(AM2[i][i] for i in range(s))
        coeffs[s - k] = -tr // k
    return coeffs


def word_counts_by_recurrence(spec: MonomialAlgebraSpec, N: int) -> List[int]:
    """Word counts from the characteristic recurrence, seeded with the first terms."""
    c = characteristic_recurrence(spec)
    s = len(c) - 1
    out = word_counts(spec, min(N, s - 1)) if s else [1]
    while len(out) <= N:
        l = len(out) - s
        out.append(-sum(c[i] * out[l + i] for i in range(s)))
    return out[:N + 1]
