"""Constraint store over numeric intervals and categorical domains.

Per numeric variable: an interval of scaled integers plus excluded points.
Per categorical variable: a bound symbol or (optional domain, exclusion set).
Equalities merge variables (union-find); disequalities and order relations
between two unbound variables are suspended and re-propagated on every
refinement. All operations are persistent: they return a new store (or None
when the addition is infeasible) and never mutate the receiver.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..errors import EngineError
from ..rulelang.ast import Op

_OVERFLOW = 10**15

NUM = "num"
CAT = "cat"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class VRef:
    """Runtime variable handle."""

    id: int

    def __repr__(self) -> str:
        return f"_V{self.id}"


RTerm = VRef | int | str  # runtime term: variable, scaled integer, or symbol


@dataclass(frozen=True)
class _Info:
    parent: int | None = None
    kind: str = UNKNOWN
    value: int | str | None = None
    lo: int | None = None
    hi: int | None = None
    excluded: frozenset = frozenset()
    domain: tuple[str, ...] | None = None
    name: str = ""


@dataclass(frozen=True)
class _Rel:
    """Suspended binary relation between two variables (by id at creation)."""

    op: Op  # LT, LE, or NEQ
    a: int
    b: int


class ConstraintStore:
    """Immutable store; mutators return refined copies or None if infeasible."""

    __slots__ = ("_info", "_rels", "_next")

    def __init__(
        self,
        info: dict[int, _Info] | None = None,
        rels: tuple[_Rel, ...] = (),
        next_id: int = 0,
    ):
        self._info = info or {}
        self._rels = rels
        self._next = next_id

    # -- allocation ------------------------------------------------------

    def fresh(self, name: str = "", domain: tuple[str, ...] | None = None):
        """Allocate a variable; a known categorical domain may be given."""
        vid = self._next
        kind = CAT if domain is not None else UNKNOWN
        info = dict(self._info)
        info[vid] = _Info(kind=kind, domain=domain, name=name or f"_V{vid}")
        return ConstraintStore(info, self._rels, vid + 1), VRef(vid)

    def fresh_many(self, names: list[str]):
        """Allocate several variables with one copy of the table."""
        info = dict(self._info)
        refs = []
        vid = self._next
        for name in names:
            info[vid] = _Info(name=name or f"_V{vid}")
            refs.append(VRef(vid))
            vid += 1
        return ConstraintStore(info, self._rels, vid), refs

    # -- lookups ---------------------------------------------------------

    def _find(self, vid: int) -> int:
        while True:
            parent = self._info[vid].parent
            if parent is None:
                return vid
            vid = parent

    def root(self, var: VRef) -> int:
        return self._find(var.id)

    def info(self, var: VRef) -> _Info:
        return self._info[self._find(var.id)]

    def value(self, var: VRef) -> int | str | None:
        return self.info(var).value

    def resolve(self, term: RTerm) -> RTerm:
        """Follow a variable to its bound value when there is one."""
        if isinstance(term, VRef):
            val = self.value(term)
            return term if val is None else val
        return term

    def name_of(self, var: VRef) -> str:
        return self._info[self._find(var.id)].name

    def describe(self, var: VRef) -> tuple:
        """Canonical state tuple used for output and solution dedup."""
        inf = self.info(var)
        if inf.value is not None:
            return ("value", inf.value)
        if inf.kind == NUM:
            return ("interval", inf.lo, inf.hi, tuple(sorted(inf.excluded)))
        if inf.kind == CAT:
            return ("symbols", inf.domain, tuple(sorted(inf.excluded)))
        return ("free",)

    # -- internal refinement ---------------------------------------------

    def _with(self, vid: int, inf: _Info) -> "ConstraintStore":
        info = dict(self._info)
        info[vid] = inf
        return ConstraintStore(info, self._rels, self._next)

    def _normalize_num(self, vid: int):
        """Shrink bounds past excluded endpoints; bind singletons."""
        inf = self._info[vid]
        lo, hi, excluded = inf.lo, inf.hi, set(inf.excluded)
        while lo is not None and lo in excluded:
            excluded.discard(lo)
            lo += 1
        while hi is not None and hi in excluded:
            excluded.discard(hi)
            hi -= 1
        if lo is not None and hi is not None and lo > hi:
            return None
        if lo is not None and abs(lo) > _OVERFLOW or hi is not None and abs(hi) > _OVERFLOW:
            raise EngineError(f"store overflow on {inf.name}: [{lo}, {hi}]")
        excluded = {c for c in excluded if (lo is None or c > lo) and (hi is None or c < hi)}
        value = inf.value
        if value is None and lo is not None and lo == hi:
            value = lo
        return self._with(
            vid, replace(inf, lo=lo, hi=hi, excluded=frozenset(excluded), value=value)
        )

    def _set_kind(self, vid: int, kind: str):
        inf = self._info[vid]
        if inf.kind == kind:
            return self
        if inf.kind != UNKNOWN:
            raise EngineError(
                f"kind mismatch on {inf.name}: {inf.kind} used as {kind}"
            )
        return self._with(vid, replace(inf, kind=kind))

    def _refine_num(self, vid: int, lo: int | None = None, hi: int | None = None,
                    exclude: int | None = None):
        store = self._set_kind(vid, NUM)
        inf = store._info[vid]
        if inf.value is not None:
            if lo is not None and inf.value < lo:
                return None
            if hi is not None and inf.value > hi:
                return None
            if exclude is not None and inf.value == exclude:
                return None
            return store
        new_lo = inf.lo if lo is None else (lo if inf.lo is None else max(inf.lo, lo))
        new_hi = inf.hi if hi is None else (hi if inf.hi is None else min(inf.hi, hi))
        excluded = inf.excluded | ({exclude} if exclude is not None else frozenset())
        if new_lo == inf.lo and new_hi == inf.hi and excluded == inf.excluded:
            return store
        store = store._with(vid, replace(inf, lo=new_lo, hi=new_hi, excluded=excluded))
        return store._normalize_num(vid)

    def _bind_num(self, vid: int, value: int):
        return self._refine_num(vid, lo=value, hi=value)

    def _refine_cat(self, vid: int, bind: str | None = None, exclude: str | None = None):
        store = self._set_kind(vid, CAT)
        inf = store._info[vid]
        if inf.value is not None:
            if bind is not None and inf.value != bind:
                return None
            if exclude is not None and inf.value == exclude:
                return None
            return store
        if bind is not None:
            if bind in inf.excluded:
                return None
            if inf.domain is not None and bind not in inf.domain:
                return None
            return store._with(vid, replace(inf, value=bind))
        if exclude in inf.excluded:
            return store
        excluded = inf.excluded | {exclude}
        if inf.domain is not None:
            left = [s for s in inf.domain if s not in excluded]
            if not left:
                return None
            if len(left) == 1:
                return store._with(vid, replace(inf, excluded=excluded, value=left[0]))
        return store._with(vid, replace(inf, excluded=excluded))

    def _merge(self, aid: int, bid: int):
        """Union two variables: intersect feasible sets, re-check relations."""
        ra, rb = self._find(aid), self._find(bid)
        if ra == rb:
            return self
        ia, ib = self._info[ra], self._info[rb]
        if ia.kind != UNKNOWN and ib.kind != UNKNOWN and ia.kind != ib.kind:
            raise EngineError(f"kind mismatch merging {ia.name} and {ib.name}")
        kind = ia.kind if ia.kind != UNKNOWN else ib.kind
        if ia.value is not None and ib.value is not None:
            return self if ia.value == ib.value else None
        value = ia.value if ia.value is not None else ib.value
        lo = ia.lo if ib.lo is None else (ib.lo if ia.lo is None else max(ia.lo, ib.lo))
        hi = ia.hi if ib.hi is None else (ib.hi if ia.hi is None else min(ia.hi, ib.hi))
        if ia.domain is not None and ib.domain is not None:
            domain: tuple[str, ...] | None = tuple(s for s in ia.domain if s in ib.domain)
        else:
            domain = ia.domain if ia.domain is not None else ib.domain
        merged = _Info(
            kind=kind,
            value=value,
            lo=lo,
            hi=hi,
            excluded=ia.excluded | ib.excluded,
            domain=domain,
            name=ia.name,
        )
        info = dict(self._info)
        info[rb] = _Info(parent=ra, name=ib.name)
        info[ra] = merged
        store = ConstraintStore(info, self._rels, self._next)
        if value is not None and kind == CAT and value in merged.excluded:
            return None
        if kind == NUM:
            store = store._normalize_num(ra)
            if store is None:
                return None
        elif kind == CAT and value is None and domain is not None:
            left = [s for s in domain if s not in merged.excluded]
            if not left:
                return None
            if len(left) == 1:
                store = store._with(ra, replace(store._info[ra], value=left[0]))
        return store._propagate()

    def _apply_rel(self, rel: _Rel):
        """One propagation step for a relation; returns self when stable."""
        store = self
        ra, rb = store._find(rel.a), store._find(rel.b)
        ia, ib = store._info[ra], store._info[rb]
        if rel.op is Op.NEQ:
            if ra == rb:
                return None
            if ia.value is not None and ib.value is not None:
                return store if ia.value != ib.value else None
            if ia.value is not None:
                if isinstance(ia.value, int):
                    return store._refine_num(rb, exclude=ia.value)
                return store._refine_cat(rb, exclude=ia.value)
            if ib.value is not None:
                if isinstance(ib.value, int):
                    return store._refine_num(ra, exclude=ib.value)
                return store._refine_cat(ra, exclude=ib.value)
            return store
        # LT / LE between numeric variables: bounds consistency
        strict = 1 if rel.op is Op.LT else 0
        a_lo = ia.value if ia.value is not None else ia.lo
        b_hi = ib.value if ib.value is not None else ib.hi
        if isinstance(b_hi, int):
            store = store._refine_num(ra, hi=b_hi - strict)
            if store is None:
                return None
        if isinstance(a_lo, int):
            store = store._refine_num(store._find(rel.b), lo=a_lo + strict)
        return store

    def _propagate(self):
        """Fixpoint over all suspended relations."""
        store = self
        for _ in range(1000):
            changed = False
            for rel in store._rels:
                nxt = store._apply_rel(rel)
                if nxt is None:
                    return None
                if nxt is not store:
                    store = nxt
                    changed = True
            if not changed:
                return store
        raise EngineError("constraint propagation did not converge")

    # -- public constraint entry points -----------------------------------

    def unify(self, a: RTerm, b: RTerm):
        """a = b over runtime terms; returns refined store or None."""
        a, b = self.resolve(a), self.resolve(b)
        if isinstance(a, VRef) and isinstance(b, VRef):
            return self._merge(a.id, b.id)
        if isinstance(a, VRef) or isinstance(b, VRef):
            var, const = (a, b) if isinstance(a, VRef) else (b, a)
            vid = self._find(var.id)
            if isinstance(const, int):
                store = self._bind_num(vid, const)
            else:
                store = self._refine_cat(vid, bind=const)
            return store._propagate() if store is not None else None
        return self if a == b else None

    def add_cmp(self, lhs: RTerm, op: Op, rhs: RTerm):
        """Add one comparison; returns refined store or None if infeasible."""
        lhs, rhs = self.resolve(lhs), self.resolve(rhs)
        if op is Op.EQ:
            return self.unify(lhs, rhs)
        if op in (Op.GT, Op.GE):
            lhs, rhs = rhs, lhs
            op = Op.LT if op is Op.GT else Op.LE

        if not isinstance(lhs, VRef) and not isinstance(rhs, VRef):
            return self if _eval_ground(lhs, op, rhs) else None

        if op is Op.NEQ:
            if isinstance(lhs, VRef) and isinstance(rhs, VRef):
                if self._find(lhs.id) == self._find(rhs.id):
                    return None
                store = ConstraintStore(
                    dict(self._info),
                    self._rels + (_Rel(Op.NEQ, lhs.id, rhs.id),),
                    self._next,
                )
                return store._propagate()
            var, const = (lhs, rhs) if isinstance(lhs, VRef) else (rhs, lhs)
            vid = self._find(var.id)
            if isinstance(const, int):
                store = self._refine_num(vid, exclude=const)
            else:
                store = self._refine_cat(vid, exclude=const)
            return store._propagate() if store is not None else None

        # LT / LE, numeric only
        for side in (lhs, rhs):
            if isinstance(side, str):
                raise EngineError(f"kind mismatch: numeric comparison on symbol {side!r}")
        strict = 1 if op is Op.LT else 0
        if isinstance(lhs, VRef) and isinstance(rhs, VRef):
            store = self._set_kind(self._find(lhs.id), NUM)
            store = store._set_kind(store._find(rhs.id), NUM)
            store = ConstraintStore(
                dict(store._info),
                store._rels + (_Rel(op, lhs.id, rhs.id),),
                store._next,
            )
            return store._propagate()
        if isinstance(lhs, VRef):
            store = self._refine_num(self._find(lhs.id), hi=rhs - strict)
        else:
            store = self._refine_num(self._find(rhs.id), lo=lhs + strict)
        return store._propagate() if store is not None else None

    # -- witnesses ---------------------------------------------------------

    def witness(self, var: VRef) -> int | str | None:
        """Deterministic concrete value: smallest feasible integer or first
        feasible domain symbol. None when the variable has no known domain."""
        return self.witness_all().get(self._find(var.id))

    def witness_all(self) -> dict[int, int | str]:
        """Greedy global witness assignment honoring suspended relations."""
        store: ConstraintStore | None = self
        out: dict[int, int | str] = {}
        roots = sorted({store._find(v) for v in store._info})
        for vid in roots:
            inf = store._info[store._find(vid)]
            if inf.value is not None:
                out[vid] = inf.value
                continue
            if inf.kind == NUM:
                if inf.lo is None:
                    raise EngineError(f"{inf.name}: unbounded below, no witness")
                candidate, nxt = inf.lo, None
                for _ in range(10000):
                    while candidate in inf.excluded:
                        candidate += 1
                    if inf.hi is not None and candidate > inf.hi:
                        break
                    nxt = store._bind_num(store._find(vid), candidate)
                    nxt = nxt._propagate() if nxt is not None else None
                    if nxt is not None:
                        break
                    candidate += 1
                if nxt is None:
                    raise EngineError(f"{inf.name}: no feasible witness")
                store = nxt
                out[vid] = candidate
            elif inf.kind == CAT and inf.domain is not None:
                left = [s for s in inf.domain if s not in inf.excluded]
                nxt = None
                for symbol in left:
                    nxt = store._refine_cat(store._find(vid), bind=symbol)
                    nxt = nxt._propagate() if nxt is not None else None
                    if nxt is not None:
                        out[vid] = symbol
                        break
                if nxt is None:
                    raise EngineError(f"{inf.name}: no feasible witness")
                store = nxt
            # unknown-kind variables stay residual
        return out

    def interval(self, var: VRef) -> tuple[int | None, int | None]:
        inf = self.info(var)
        if inf.value is not None and isinstance(inf.value, int):
            return (inf.value, inf.value)
        return (inf.lo, inf.hi)


def _eval_ground(lhs: int | str, op: Op, rhs: int | str) -> bool:
    if op is Op.EQ:
        return lhs == rhs
    if op is Op.NEQ:
        return lhs != rhs
    if isinstance(lhs, str) or isinstance(rhs, str):
        raise EngineError("kind mismatch: numeric comparison on symbol")
    if op is Op.LT:
        return lhs < rhs
    if op is Op.LE:
        return lhs <= rhs
    if op is Op.GT:
        return lhs > rhs
    return lhs >= rhs
