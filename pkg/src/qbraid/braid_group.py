"""Words, presentations and the isomorphism between the quiver braid group G and Br_4.

Words are tuples of signed 1-based generator indices, so ``Word((1, 2, -1))``
is g1 g2 g1^-1; the text form is ``"1 2 -1"``.  Triviality in Br_n is decided by
Dehornoy handle reduction, falling back to the Garside left normal form when
the reduction hits its step cap.  Identities in G are certified by a bounded
breadth-first rewriting search whose traces can be replayed.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import Inconclusive
from .lattice_core import IntMatrix, identity, integer_inverse, matmul

DEFAULT_MAX_LEN = 24
DEFAULT_MAX_STATES = 10**6
DEFAULT_HANDLE_STEPS = 200_000


@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        if any(x == 0 for x in letters):
            raise ValueError("generator indices start at 1")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "Word":
        try:
            return cls(tuple(int(tok) for tok in text.split()))
        except ValueError as exc:
            raise ValueError(f"cannot parse word {text!r}: {exc}") from exc

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "Word":
        return cls(tuple(g * s for g, s in pairs))

    def pairs(self) -> list[tuple[int, int]]:
        return [(abs(x), 1 if x > 0 else -1) for x in self.letters]

    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __str__(self):
        return " ".join(str(x) for x in self.letters)

    def max_index(self) -> int:
        return max((abs(x) for x in self.letters), default=0)


def _reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def free_reduce(w: Word) -> Word:
    return Word(_reduce(w.letters))


def substitute(w: Word, images: Sequence[Word]) -> Word:
    """Image of ``w`` under g_i -> images[i-1], freely reduced."""
    out: list[int] = []
    for x in w:
        img = images[abs(x) - 1]
        out.extend(img.letters if x > 0 else img.inverse().letters)
    return Word(_reduce(out))


@dataclass(frozen=True)
class Presentation:
    generator_count: int
    relators: tuple[Word, ...]
    name: str = ""
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        rels = tuple(free_reduce(r) for r in self.relators)
        if any(not r for r in rels):
            raise ValueError("relators must be nonempty after free reduction")
        if any(r.max_index() > self.generator_count for r in rels):
            raise ValueError("relator uses a generator outside the presentation")
        object.__setattr__(self, "relators", rels)

    def without_relator(self, i: int) -> "Presentation":
        rels = self.relators[:i] + self.relators[i + 1 :]
        return Presentation(self.generator_count, rels, f"{self.name} minus relator {i}", dict(self.metadata))


def _relation(lhs: Sequence[int], rhs: Sequence[int]) -> Word:
    return free_reduce(Word(tuple(lhs)) * Word(tuple(rhs)).inverse())


def quiver_braid_group() -> Presentation:
    """G = < g1, g2, g3 | g1 g2 g3 g1 = g2 g3 g1 g2, g_i g_j g_i = g_j g_i g_j >.

    The cycle relation comes from the 3-cycle quiver 1 -a-> 2 -b-> 3 -c-> 1 with
    potential W = cba.
    """
    rels = [_relation((1, 2, 3, 1), (2, 3, 1, 2))]
    for i, j in ((1, 2), (1, 3), (2, 3)):
        rels.append(_relation((i, j, i), (j, i, j)))
    quiver = {"vertices": [1, 2, 3], "arrows": {"a": [1, 2], "b": [2, 3], "c": [3, 1]}, "potential": "cba"}
    return Presentation(3, tuple(rels), "G", {"quiver": quiver})


def artin_braid_group(n: int) -> Presentation:
    """Br_n on sigma_1..sigma_{n-1}: braid relations for neighbours, commutation otherwise."""
    rels = []
    for i in range(1, n):
        for j in range(i + 1, n):
            if j == i + 1:
                rels.append(_relation((i, j, i), (j, i, j)))
            else:
                rels.append(_relation((i, j), (j, i)))
    return Presentation(n - 1, tuple(rels), f"Br{n}")


# ---------------------------------------------------------------------------
# the braid word problem


def _check_indices(n: int, w: Word) -> None:
    for x in w:
        if not 1 <= abs(x) <= n - 1:
            raise IndexError(f"generator {abs(x)} is out of range for Br_{n}")


def _first_handle(w: Sequence[int]) -> tuple[int, int] | None:
    """(start, end) of the handle whose closing letter comes first."""
    for p, x in enumerate(w):
        i = abs(x)
        for q in range(p - 1, -1, -1):
            if abs(w[q]) <= i:
                if w[q] == -x:
                    return q, p
                break
    return None


def handle_reduce(w: Word, max_steps: int = DEFAULT_HANDLE_STEPS) -> Word | None:
    """Dehornoy handle reduction; returns the reduced word, or None on hitting the step cap.

    A sigma_i-handle is sigma_i^e u sigma_i^-e with u free of sigma_j for j <= i.
    Reducing it deletes the outer letters and rewrites each sigma_{i+1}^d in u
    as sigma_{i+1}^-e sigma_i^d sigma_{i+1}^e.  The handle that closes first
    never contains another handle, so every step is a permitted reduction.
    The result is empty exactly when w is trivial.
    """
    cur = list(_reduce(w.letters))
    for _ in range(max_steps):
        h = _first_handle(cur)
        if h is None:
            return Word(tuple(cur))
        q, p = h
        e = 1 if cur[q] > 0 else -1
        i = abs(cur[q])
        inner: list[int] = []
        for y in cur[q + 1 : p]:
            if abs(y) == i + 1:
                d = 1 if y > 0 else -1
                inner.extend((-e * (i + 1), d * i, e * (i + 1)))
            else:
                inner.append(y)
        cur = list(_reduce(cur[:q] + inner + cur[p + 1 :]))
    return None


def _perm_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(a[x] for x in b)


def _transposition(n: int, i: int) -> tuple[int, ...]:
    p = list(range(n))
    p[i - 1], p[i] = p[i], p[i - 1]
    return tuple(p)


def _right_descents(p: tuple[int, ...]) -> set[int]:
    return {i for i in range(1, len(p)) if p[i - 1] > p[i]}


def _left_descents(p: tuple[int, ...]) -> set[int]:
    inv = [0] * len(p)
    for pos, v in enumerate(p):
        inv[v] = pos
    return {i for i in range(1, len(p)) if inv[i - 1] > inv[i]}


def garside_normal_form(n: int, w: Word) -> tuple[int, list[tuple[int, ...]]]:
    """Left normal form Delta^inf A_1 ... A_k, with simple factors as permutations."""
    _check_indices(n, w)
    w0 = tuple(range(n - 1, -1, -1))
    ident = tuple(range(n))
    s = {i: _transposition(n, i) for i in range(1, n)}
    inf = 0
    factors: list[tuple[int, ...]] = []
    for x in w:
        if x > 0:
            factors.append(s[x])
        else:
            # factors . Delta^-1 = Delta^-1 . tau(factors)
            inf -= 1
            factors = [_perm_mul(_perm_mul(w0, f), w0) for f in factors]
            factors.append(_perm_mul(w0, s[-x]))
    changed = True
    while changed:
        changed = False
        for j in range(len(factors) - 1):
            a, b = factors[j], factors[j + 1]
            moved = True
            while moved:
                moved = False
                for i in sorted(_left_descents(b) - _right_descents(a)):
                    a, b = _perm_mul(a, s[i]), _perm_mul(s[i], b)
                    moved = changed = True
                    break
            factors[j], factors[j + 1] = a, b
    while factors and factors[0] == w0:
        factors.pop(0)
        inf += 1
    while factors and factors[-1] == ident:
        factors.pop()
    return inf, factors


def permutation_of(n: int, w: Word) -> tuple[int, ...]:
    p = tuple(range(n))
    for x in w:
        p = _perm_mul(p, _transposition(n, abs(x)))
    return p


def exponent_sum(w: Word) -> int:
    return sum(1 if x > 0 else -1 for x in w)


def braid_is_trivial(n: int, w: Word, method: str = "auto", max_steps: int = DEFAULT_HANDLE_STEPS) -> bool:
    """Whether ``w`` is the identity of Br_n.

    ``method`` is ``"handle"``, ``"garside"``, or ``"auto"`` (handle reduction,
    Garside on step-cap overflow).
    """
    _check_indices(n, w)
    if method not in ("auto", "handle", "garside"):
        raise ValueError(f"unknown method {method!r}")
    result = None
    if method in ("auto", "handle"):
        reduced = handle_reduce(w, max_steps)
        if reduced is not None:
            result = not reduced
        elif method == "handle":
            raise Inconclusive("handle reduction exceeded its step cap")
    if result is None:
        inf, factors = garside_normal_form(n, w)
        result = inf == 0 and not factors
    if result and (permutation_of(n, w) != tuple(range(n)) or exponent_sum(w) != 0):
        raise AssertionError(f"decider calls {w} trivial but its permutation or exponent sum is not")
    return result


# ---------------------------------------------------------------------------
# bounded rewriting in a presentation


@dataclass(frozen=True)
class RewriteStep:
    """Replace ``replaced`` at ``position`` by ``by``; ``replaced * by^-1`` is a cyclic conjugate of relator^sign."""

    relator: int
    sign: int
    rotation: int
    split: int
    position: int
    replaced: tuple[int, ...]
    by: tuple[int, ...]
    result: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "relator": self.relator,
            "sign": self.sign,
            "rotation": self.rotation,
            "split": self.split,
            "position": self.position,
            "replaced": " ".join(map(str, self.replaced)),
            "by": " ".join(map(str, self.by)),
            "result": " ".join(map(str, self.result)),
        }


@dataclass(frozen=True)
class Derivation:
    target: Word
    steps: tuple[RewriteStep, ...]

    def __len__(self):
        return len(self.steps)

    def to_dict(self) -> dict:
        return {"target": str(self.target), "steps": [s.to_dict() for s in self.steps]}


@dataclass(frozen=True)
class NotFound:
    """Search gave up; this never proves the word nontrivial."""

    target: Word
    states: int
    exhausted: bool
    inconclusive: bool = True

    def __bool__(self):
        return False

    def to_dict(self) -> dict:
        return {"target": str(self.target), "states": self.states, "exhausted": self.exhausted,
                "inconclusive": True}


def budget_from_env(max_len: int | None = None, max_states: int | None = None) -> tuple[int, int]:
    """Budgets, overridden by ``QBRAID_BUDGET`` as ``"max_states"`` or ``"max_len,max_states"``."""
    env = os.environ.get("QBRAID_BUDGET", "").strip()
    env_len, env_states = None, None
    if env:
        parts = [p for p in env.replace(":", ",").split(",") if p.strip()]
        try:
            nums = [int(p) for p in parts]
        except ValueError as exc:
            raise ValueError(f"bad QBRAID_BUDGET {env!r}") from exc
        if len(nums) == 1:
            env_states = nums[0]
        elif len(nums) == 2:
            env_len, env_states = nums
        else:
            raise ValueError(f"bad QBRAID_BUDGET {env!r}")
    ml = max_len if max_len is not None else env_len if env_len is not None else DEFAULT_MAX_LEN
    ms = max_states if max_states is not None else env_states if env_states is not None else DEFAULT_MAX_STATES
    return ml, ms


def _cyclic_words(p: Presentation):
    for ri, r in enumerate(p.relators):
        for sign in (1, -1):
            base = r.letters if sign == 1 else r.inverse().letters
            for t in range(len(base)):
                yield ri, sign, t, base[t:] + base[:t]


def _moves(p: Presentation):
    """(pattern, replacement, relator, sign, rotation, split) with pattern = replacement in the group."""
    seen = set()
    out = []
    for ri, sign, t, c in _cyclic_words(p):
        for j in range(1, len(c) + 1):
            u, v = c[:j], c[j:]
            repl = tuple(-x for x in reversed(v))
            if (u, repl) in seen:
                continue
            seen.add((u, repl))
            out.append((u, repl, ri, sign, t, j))
    return out


def relation_search(p: Presentation, target: Word, max_len: int | None = None,
                    max_states: int | None = None) -> Derivation | NotFound:
    """Breadth-first search for a rewrite sequence taking ``target`` to the empty word.

    A move replaces an occurrence of a prefix u of a cyclic conjugate u v of a
    relator (or its inverse) by v^-1, then freely reduces.  Insertions of whole
    relators are not tried, so a NotFound result is only ever inconclusive.
    """
    max_len, max_states = budget_from_env(max_len, max_states)
    start = _reduce(target.letters)
    if not start:
        return Derivation(target, ())
    moves = _moves(p)
    parent: dict[tuple[int, ...], tuple[tuple[int, ...], RewriteStep] | None] = {start: None}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        n = len(w)
        for u, repl, ri, sign, t, j in moves:
            k = len(u)
            for pos in range(n - k + 1):
                if w[pos : pos + k] != u:
                    continue
                new = _reduce(w[:pos] + repl + w[pos + k :])
                if new in parent or len(new) > max_len:
                    continue
                step = RewriteStep(ri, sign, t, j, pos, u, repl, new)
                parent[new] = (w, step)
                if not new:
                    steps = []
                    cur = new
                    while parent[cur] is not None:
                        prev, st = parent[cur]
                        steps.append(st)
                        cur = prev
                    return Derivation(target, tuple(reversed(steps)))
                if len(parent) >= max_states:
                    return NotFound(target, len(parent), exhausted=False)
                queue.append(new)
    return NotFound(target, len(parent), exhausted=True)


def replay(p: Presentation, derivation: Derivation) -> bool:
    """Independently re-apply a derivation's steps and confirm it ends at the empty word."""
    cur = _reduce(derivation.target.letters)
    for st in derivation.steps:
        r = p.relators[st.relator]
        base = r.letters if st.sign == 1 else r.inverse().letters
        c = base[st.rotation :] + base[: st.rotation]
        u, v = c[: st.split], c[st.split :]
        if u != st.replaced or tuple(-x for x in reversed(v)) != st.by:
            return False
        if cur[st.position : st.position + len(u)] != u:
            return False
        cur = _reduce(cur[: st.position] + st.by + cur[st.position + len(u) :])
        if cur != st.result:
            return False
    return cur == ()


# ---------------------------------------------------------------------------
# homomorphisms


Oracle = Callable[[Word], "bool | None"]


def braid_oracle(n: int) -> Oracle:
    return lambda w: braid_is_trivial(n, w)


def rewriting_oracle(p: Presentation, max_len: int | None = None, max_states: int | None = None) -> Oracle:
    def oracle(w: Word):
        return True if isinstance(relation_search(p, w, max_len, max_states), Derivation) else None

    return oracle


def verify_homomorphism(source: Presentation, images: Sequence[Word], target_oracle: Oracle) -> bool:
    """True iff every relator of ``source`` maps to a word the oracle certifies trivial.

    The oracle returns True, False, or None (undecided).  Raises Inconclusive
    when no relator image is refuted but some are undecided.
    """
    if len(images) != source.generator_count:
        raise ValueError("need one image per generator")
    undecided = []
    for i, r in enumerate(source.relators):
        verdict = target_oracle(substitute(r, images))
        if verdict is False:
            return False
        if verdict is None:
            undecided.append(i)
    if undecided:
        raise Inconclusive(f"relators {undecided} could not be decided")
    return True


def word_matrix(w: Word, matrices: Sequence[IntMatrix]) -> IntMatrix:
    """Product of generator matrices along ``w`` (inverse matrices for negative letters)."""
    n = len(matrices[0])
    out = identity(n)
    inverses: dict[int, IntMatrix] = {}
    for x in w:
        g = abs(x) - 1
        if x > 0:
            m = matrices[g]
        else:
            if g not in inverses:
                inverses[g] = integer_inverse(matrices[g])
            m = inverses[g]
        out = matmul(out, m)
    return out


PHI_IMAGES = (Word((1,)), Word((2,)), Word((-2, 3, 2)))
PSI_IMAGES = (Word((1,)), Word((2,)), Word((2, 3, -2)))


@dataclass
class IsoCertificate:
    parts: dict[str, dict]
    status: str
    failing: list[str]

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {"status": self.status, "failing_parts": self.failing, "parts": self.parts}


def verify_iso_G_Br4(
    presentation: Presentation | None = None,
    phi_images: Sequence[Word] = PHI_IMAGES,
    psi_images: Sequence[Word] = PSI_IMAGES,
    twists: Sequence[IntMatrix] | None = None,
    max_len: int | None = None,
    max_states: int | None = None,
) -> IsoCertificate:
    """Certificate that phi: G -> Br_4 and psi: Br_4 -> G are mutually inverse isomorphisms.

    Parts: ``phi`` (relators of G map to trivial braids), ``psi`` (relators of
    Br_4 map to words derivable in G, with replayable traces), ``composites``
    (both composites fix the generators after free reduction) and
    ``k_theory`` (T_1, T_2, T_2 T_3 T_2^-1 satisfy the Br_4 relations).
    """
    g = presentation or quiver_braid_group()
    br4 = artin_braid_group(4)
    parts: dict[str, dict] = {}

    phi_rel = []
    status = "pass"
    for r in g.relators:
        img = substitute(r, phi_images)
        ok = braid_is_trivial(4, img)
        phi_rel.append({"relator": str(r), "image": str(img), "trivial": ok})
        if not ok:
            status = "fail"
    parts["phi"] = {"status": status, "images": [str(w) for w in phi_images], "relators": phi_rel}

    psi_rel = []
    status = "pass"
    for r in br4.relators:
        img = substitute(r, psi_images)
        res = relation_search(g, img, max_len, max_states)
        entry = {"relator": str(r), "image": str(img)}
        if isinstance(res, Derivation):
            entry.update(derived=True, replayed=replay(g, res), trace=res.to_dict()["steps"])
            if not entry["replayed"]:
                status = "fail"
        else:
            entry.update(derived=False, search=res.to_dict())
            if status == "pass":
                status = "inconclusive"
        psi_rel.append(entry)
    parts["psi"] = {"status": status, "images": [str(w) for w in psi_images], "relators": psi_rel}

    comp = []
    ok_all = True
    for i in range(g.generator_count):
        back = substitute(phi_images[i], psi_images)
        ok = back.letters == (i + 1,)
        comp.append({"map": "psi.phi", "generator": i + 1, "image": str(back), "identity": ok})
        ok_all &= ok
    for i in range(br4.generator_count):
        back = substitute(psi_images[i], phi_images)
        ok = back.letters == (i + 1,)
        comp.append({"map": "phi.psi", "generator": i + 1, "image": str(back), "identity": ok})
        ok_all &= ok
    parts["composites"] = {
        "status": "pass" if ok_all else "fail",
        "checks": comp,
        "g3_in_new_generators": "g3 = g2^-1 (g2 g3 g2^-1) g2",
    }

    if twists is None:
        from .sheaf_calculus import standard_twists

        twists = [t.m for t in standard_twists()]
    t1, t2, t3 = twists
    t3p = word_matrix(Word((2, 3, -2)), [t1, t2, t3])
    mats = [t1, t2, t3p]
    kt = []
    for r in br4.relators:
        m = word_matrix(r, mats)
        kt.append({"relator": str(r), "identity": m == identity(len(t1))})
    parts["k_theory"] = {
        "status": "pass" if all(e["identity"] for e in kt) else "fail",
        "generators": {"T1": [list(x) for x in t1], "T2": [list(x) for x in t2], "T2T3T2inv": [list(x) for x in t3p]},
        "relators": kt,
    }

    failing = [k for k, v in parts.items() if v["status"] != "pass"]
    statuses = {v["status"] for v in parts.values()}
    overall = "fail" if "fail" in statuses else "inconclusive" if "inconclusive" in statuses else "pass"
    return IsoCertificate(parts, overall, failing)
