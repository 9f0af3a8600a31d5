"""Abstract finite groups as Cayley tables, and isomorphism search between them."""
from __future__ import annotations

from collections import Counter
from collections.abc import Sequence

from .errors import NotAGroup, OrderBoundExceeded

ISOMORPHISM_BOUND = 2000


class FiniteGroup:
    """A group on ``range(order)`` with ``table[a][b] = a*b`` and identity 0.

    The axioms are checked on construction.  Associativity uses Light's test
    over a generating set, which costs ``order**2 * len(gens)``.
    """

    def __init__(self, table: Sequence[Sequence[int]], names: Sequence[str] | None = None):
        self.table: tuple[tuple[int, ...], ...] = tuple(tuple(int(x) for x in row) for row in table)
        self.order = n = len(self.table)
        self.names = tuple(names) if names is not None else tuple(str(i) for i in range(n))
        if n == 0:
            raise NotAGroup("empty table")
        if len(self.names) != n:
            raise NotAGroup("wrong number of element names")
        full = set(range(n))
        for a, row in enumerate(self.table):
            if len(row) != n or set(row) != full:
                raise NotAGroup(f"row {a} is not a permutation of the elements")
        for b in range(n):
            if {self.table[a][b] for a in range(n)} != full:
                raise NotAGroup(f"column {b} is not a permutation of the elements")
        if self.table[0] != tuple(range(n)) or any(self.table[a][0] != a for a in range(n)):
            raise NotAGroup("element 0 is not the identity")
        self._inverse = [row.index(0) for row in self.table]
        gens = self.generating_set()
        t = self.table
        for g in gens:
            for x in range(n):
                xg = t[x][g]
                tg = t[g]
                for y in range(n):
                    if t[xg][y] != t[x][tg[y]]:
                        raise NotAGroup(f"not associative at ({x}, {g}, {y})")

    def __len__(self) -> int:
        return self.order

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteGroup) and self.table == other.table

    def __hash__(self) -> int:
        return hash(self.table)

    def __repr__(self) -> str:
        return f"<FiniteGroup order={self.order}>"

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inverse(self, a: int) -> int:
        return self._inverse[a]

    def power(self, a: int, k: int) -> int:
        x = 0
        for _ in range(k):
            x = self.table[x][a]
        return x

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    def element_orders(self) -> list[int]:
        return [self.element_order(a) for a in range(self.order)]

    def subgroup_closure(self, gens: Sequence[int]) -> set[int]:
        seen = {0}
        queue = [0]
        for x in queue:
            for g in gens:
                y = self.table[x][g]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def generating_set(self, smallest_order_first: bool = False) -> list[int]:
        """A greedy generating set.

        Elements are scanned by (order, index) ascending when
        ``smallest_order_first`` is set, otherwise by order descending; an
        element is kept if it is not already in the span of those kept.
        """
        orders = [self.element_order(a) for a in range(self.order)]
        if smallest_order_first:
            cand = sorted(range(1, self.order), key=lambda a: (orders[a], a))
        else:
            cand = sorted(range(1, self.order), key=lambda a: (-orders[a], a))
        gens: list[int] = []
        span = {0}
        for a in cand:
            if len(span) == self.order:
                break
            if a not in span:
                gens.append(a)
                span = self.subgroup_closure(gens)
        return gens

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def relabel(self, perm: Sequence[int]) -> FiniteGroup:
        """The same group with element ``a`` renamed ``perm[a]`` (``perm[0]`` must be 0)."""
        n = self.order
        inv = [0] * n
        for a, b in enumerate(perm):
            inv[b] = a
        table = [[perm[self.table[inv[x]][inv[y]]] for y in range(n)] for x in range(n)]
        names = [self.names[inv[x]] for x in range(n)]
        return FiniteGroup(table, names)


def _extend_map(G: FiniteGroup, H: FiniteGroup, gens: Sequence[int], imgs: Sequence[int]) -> dict[int, int] | None:
    """The homomorphism on ``<gens>`` sending ``gens[i] -> imgs[i]``, if it exists and is injective."""
    phi = {0: 0}
    used = {0}
    queue = [0]
    tg, th = G.table, H.table
    for x in queue:
        fx = phi[x]
        for g, h in zip(gens, imgs):
            y = tg[x][g]
            fy = th[fx][h]
            known = phi.get(y)
            if known is None:
                if fy in used:
                    return None
                phi[y] = fy
                used.add(fy)
                queue.append(y)
            elif known != fy:
                return None
    return phi


def group_isomorphic(G: FiniteGroup, H: FiniteGroup, bound: int = ISOMORPHISM_BOUND) -> list[int] | None:
    """An isomorphism ``G -> H`` as a list of images, or ``None``.

    Backtracks over images of a greedy generating set of ``G``, pruning on
    element orders and on consistency of the partial map.
    """
    if G.order != H.order:
        return None
    if G.order > bound:
        raise OrderBoundExceeded(f"order {G.order} exceeds isomorphism bound {bound}")
    og, oh = G.element_orders(), H.element_orders()
    if Counter(og) != Counter(oh):
        return None
    if G.is_abelian() != H.is_abelian():
        return None
    gens = G.generating_set()
    by_order: dict[int, list[int]] = {}
    for b, o in enumerate(oh):
        by_order.setdefault(o, []).append(b)

    def search(i: int, imgs: list[int]) -> dict[int, int] | None:
        if i == len(gens):
            phi = _extend_map(G, H, gens, imgs)
            return phi if phi is not None and len(phi) == G.order else None
        for h in by_order[og[gens[i]]]:
            cand = imgs + [h]
            phi = _extend_map(G, H, gens[: i + 1], cand)
            if phi is None:
                continue
            found = search(i + 1, cand)
            if found is not None:
                return found
        return None

    phi = search(0, [])
    if phi is None:
        return None
    return [phi[a] for a in range(G.order)]


def is_isomorphism(G: FiniteGroup, H: FiniteGroup, phi: Sequence[int]) -> bool:
    if len(phi) != G.order or sorted(phi) != list(range(H.order)):
        return False
    return all(phi[G.table[a][b]] == H.table[phi[a]][phi[b]] for a in range(G.order) for b in range(G.order))


# -- named groups -----------------------------------------------------------


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)], names=[f"a^{a}" for a in range(n)])


def dihedral_group(m: int) -> FiniteGroup:
    """Symmetries of an m-gon, order 2m; element ``(k, s)`` is ``r^k f^s`` at index ``k + m*s``."""
    n = 2 * m

    def mul(x: int, y: int) -> int:
        k1, s1 = x % m, x // m
        k2, s2 = y % m, y // m
        k = (k1 + (-k2 if s1 else k2)) % m
        return k + m * ((s1 + s2) % 2)

    names = [f"r^{k}" + ("f" if s else "") for s in range(2) for k in range(m)]
    return FiniteGroup([[mul(x, y) for y in range(n)] for x in range(n)], names)


def klein_four() -> FiniteGroup:
    return FiniteGroup([[a ^ b for b in range(4)] for a in range(4)], names=["e", "a", "b", "ab"])


def quaternion_group() -> FiniteGroup:
    # index = 4*sign + unit, units 1, i, j, k
    unit_mul = {
        (0, 0): (0, 0), (0, 1): (0, 1), (0, 2): (0, 2), (0, 3): (0, 3),
        (1, 0): (0, 1), (1, 1): (1, 0), (1, 2): (0, 3), (1, 3): (1, 2),
        (2, 0): (0, 2), (2, 1): (1, 3), (2, 2): (1, 0), (2, 3): (0, 1),
        (3, 0): (0, 3), (3, 1): (0, 2), (3, 2): (1, 1), (3, 3): (1, 0),
    }

    def mul(x: int, y: int) -> int:
        s, u = unit_mul[(x % 4, y % 4)]
        return 4 * ((x // 4 + y // 4 + s) % 2) + u

    names = [sign + u for sign in ("", "-") for u in ("1", "i", "j", "k")]
    return FiniteGroup([[mul(x, y) for y in range(8)] for x in range(8)], names)


def symmetric_group(n: int) -> FiniteGroup:
    from .perm import GeneratedGroup, to_finite_group

    return to_finite_group(GeneratedGroup.symmetric(n))


def named_group(name: str) -> FiniteGroup:
    """Built-ins: ``Z1``..``Z8`` (any ``Zn``), ``V4``, ``S3`` (any ``Sn``), ``D4`` (any ``Dm``), ``Q8``."""
    key = name.strip().upper()
    if key == "V4":
        return klein_four()
    if key == "Q8":
        return quaternion_group()
    if key[:1] in "ZSD" and key[1:].isdigit():
        k = int(key[1:])
        if k >= 1:
            if key[0] == "Z":
                return cyclic_group(k)
            if key[0] == "S":
                return symmetric_group(k)
            if k >= 2:
                return dihedral_group(k)
    raise ValueError(f"unknown group name {name!r}")


CATALOG = ("Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "V4", "S3", "D4", "Q8")


# -- text format -------------------------------------------------------------


def format_table(G: FiniteGroup) -> str:
    lines = [f"order {G.order}"]
    lines += [" ".join(map(str, row)) for row in G.table]
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> FiniteGroup:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("order"):
        raise ValueError("Cayley table must start with 'order n'")
    n = int(lines[0].split()[1])
    rows = [[int(x) for x in ln.split()] for ln in lines[1 : n + 1]]
    if len(rows) != n:
        raise ValueError(f"expected {n} rows, got {len(rows)}")
    return FiniteGroup(rows)
