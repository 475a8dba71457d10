"""Recursive structural-equations models.

Equations are guarded decision tables (ordered guard rows plus a mandatory
default), so totality is syntactic.  Dependency edges are computed by the
variation criterion, not by syntactic guard mention: X -> Y iff some setting
of the remaining variables and two values of X change the value of Y.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .formula import (
    And,
    BoxArrow,
    Bot,
    ExoEvent,
    Formula,
    FormulaError,
    Intervene,
    Not,
    Or,
    PrimEvent,
    Signature,
    Top,
    conjoin,
    evaluate_prop,
    event,
    format_formula,
    free_endogenous,
    parse_formula,
    tokenize,
    variables_of,
)


class ModelError(ValueError):
    """Raised for invalid models: cycles, bad equations, bad contexts."""


@dataclass(frozen=True)
class Equation:
    """Decision table for one endogenous variable: first matching guard wins,
    the default row covers everything else."""

    target: str
    rows: tuple[tuple[Formula, str], ...]
    default: str


class CausalModel:
    """A recursive causal model over a signature.

    Construction validates the equations, compiles each decision table down
    to a lookup over its semantic parents, and topologically sorts the
    dependency DAG (raising ModelError with a witness cycle otherwise).
    """

    def __init__(self, sig: Signature, equations: dict[str, Equation], name: str = "model"):
        self.sig = sig
        self.name = name
        self.equations = dict(equations)
        self._validate_equations()
        self._compile()
        self.parents: dict[str, tuple[str, ...]] = {
            x: self._semantic_parents(x) for x in sig.endo_names
        }
        self.topo_order = self._topological_order()
        self._solve_cache: dict = {}

    # -- validation and compilation

    def _validate_equations(self):
        sig = self.sig
        missing = [x for x in sig.endo_names if x not in self.equations]
        if missing:
            raise ModelError(f"missing equation for {', '.join(missing)}")
        extra = [x for x in self.equations if not sig.is_endogenous(x)]
        if extra:
            raise ModelError(f"equation for non-endogenous variable {', '.join(extra)}")
        for x, eq in self.equations.items():
            if eq.target != x:
                raise ModelError(f"equation registered under {x} targets {eq.target}")
            rng = sig.range_of(x)
            if eq.default not in rng:
                raise ModelError(f"default value {eq.default!r} outside the range of {x}")
            for guard, value in eq.rows:
                if value not in rng:
                    raise ModelError(f"row value {value!r} outside the range of {x}")
                for name in variables_of(guard):
                    if name == x:
                        raise ModelError(f"equation for {x} may not mention {x} itself")
                    sig.range_of(name)  # raises on unknown variables

    def _compile(self):
        """Tabulate each equation over its syntactically mentioned variables."""
        self._tables: dict[str, dict[tuple, str]] = {}
        self._table_vars: dict[str, tuple[str, ...]] = {}
        for x, eq in self.equations.items():
            mentioned = set()
            for guard, _ in eq.rows:
                mentioned |= variables_of(guard)
            order = tuple(n for n in self.sig.all_names() if n in mentioned)
            size = 1
            for n in order:
                size *= len(self.sig.range_of(n))
            if size > 1 << 22:
                raise ModelError(f"decision table for {x} is too large to tabulate ({size} rows)")
            table = {}
            for values in itertools.product(*(self.sig.range_of(n) for n in order)):
                asgn = dict(zip(order, values))
                table[values] = self._eval_rows(eq, asgn)
            self._tables[x] = table
            self._table_vars[x] = order

    @staticmethod
    def _eval_rows(eq: Equation, asgn: dict) -> str:
        for guard, value in eq.rows:
            if evaluate_prop(guard, asgn):
                return value
        return eq.default

    def equation_value(self, x: str, assignment: dict) -> str:
        """F_X applied to an assignment of (at least) the other variables."""
        key = tuple(assignment[n] for n in self._table_vars[x])
        return self._tables[x][key]

    def _semantic_parents(self, x: str) -> tuple[str, ...]:
        parents = []
        cand = self._table_vars[x]
        for z in cand:
            others = [n for n in cand if n != z]
            varies = False
            for values in itertools.product(*(self.sig.range_of(n) for n in others)):
                base = dict(zip(others, values))
                seen = set()
                for zv in self.sig.range_of(z):
                    base[z] = zv
                    seen.add(self.equation_value(x, base))
                if len(seen) > 1:
                    varies = True
                    break
            if varies:
                parents.append(z)
        return tuple(parents)

    def _topological_order(self) -> tuple[str, ...]:
        endo = self.sig.endo_names
        preds = {x: [p for p in self.parents[x] if self.sig.is_endogenous(p)] for x in endo}
        remaining = {x: len(preds[x]) for x in endo}
        order = []
        ready = [x for x in endo if remaining[x] == 0]
        while ready:
            x = ready.pop(0)
            order.append(x)
            for y in endo:
                if x in preds[y]:
                    remaining[y] -= 1
                    if remaining[y] == 0:
                        ready.append(y)
                        ready.sort(key=endo.index)
        if len(order) != len(endo):
            cycle = self._find_cycle(preds, [x for x in endo if x not in order])
            raise ModelError("cyclic dependency: " + " -> ".join(cycle))
        return tuple(order)

    @staticmethod
    def _find_cycle(preds, stuck):
        start = stuck[0]
        path = [start]
        seen = {start}
        cur = start
        while True:
            nxt = next(p for p in preds[cur] if p in stuck)
            if nxt in seen:
                return path[path.index(nxt):] + [nxt]
            path.append(nxt)
            seen.add(nxt)
            cur = nxt

    # -- core operations

    def validate_context(self, u: dict) -> dict:
        ctx = {}
        for name in self.sig.exo_names:
            if name not in u:
                raise ModelError(f"context is missing exogenous variable {name}")
            if u[name] not in self.sig.range_of(name):
                raise ModelError(f"context value {u[name]!r} outside the range of {name}")
            ctx[name] = u[name]
        extra = set(u) - set(self.sig.exo_names)
        if extra:
            raise ModelError(f"context assigns non-exogenous variable {', '.join(sorted(extra))}")
        return ctx

    def solve(self, u: dict, interventions: dict | None = None) -> dict:
        """The unique simultaneous solution in context u, optionally under an
        intervention that pins some endogenous variables."""
        ctx = self.validate_context(u)
        inter = interventions or {}
        key = (tuple(ctx[n] for n in self.sig.exo_names), tuple(sorted(inter.items())))
        cached = self._solve_cache.get(key)
        if cached is not None:
            return dict(cached)
        asgn = dict(ctx)
        # The base topological order stays valid: intervening only removes edges.
        for x in self.topo_order:
            if x in inter:
                asgn[x] = inter[x]
            else:
                missing = [n for n in self._table_vars[x] if n not in asgn]
                if missing:
                    # Non-semantic mentions of not-yet-solved variables; the
                    # value cannot matter, so pick any in-range one.
                    for n in missing:
                        asgn[n] = self.sig.range_of(n)[0]
                    asgn[x] = self.equation_value(x, asgn)
                    for n in missing:
                        del asgn[n]
                else:
                    asgn[x] = self.equation_value(x, asgn)
        self._solve_cache[key] = dict(asgn)
        return asgn

    def intervene(self, assignments) -> "CausalModel":
        """M with each named equation replaced by a constant."""
        pairs = list(assignments)
        names = [n for n, _ in pairs]
        if len(set(names)) != len(names):
            raise ModelError("intervention assigns the same variable twice")
        equations = dict(self.equations)
        for name, value in pairs:
            if not self.sig.is_endogenous(name):
                raise ModelError(f"cannot intervene on non-endogenous variable {name}")
            if value not in self.sig.range_of(name):
                raise ModelError(f"value {value!r} outside the range of {name}")
            equations[name] = Equation(name, (), value)
        return CausalModel(self.sig, equations, name=self.name)

    # -- satisfaction

    def check_causal_fragment(self, phi: Formula, *, in_intervene=False, in_boxarrow=False):
        """Reject formulas outside L_ex(S): no nested box-arrows, box-arrow
        antecedents propositional, interventions with propositional bodies."""
        if isinstance(phi, (PrimEvent, ExoEvent, Top, Bot)):
            return
        if isinstance(phi, Not):
            self.check_causal_fragment(phi.sub, in_intervene=in_intervene, in_boxarrow=in_boxarrow)
        elif isinstance(phi, (And, Or)):
            self.check_causal_fragment(phi.left, in_intervene=in_intervene, in_boxarrow=in_boxarrow)
            self.check_causal_fragment(phi.right, in_intervene=in_intervene, in_boxarrow=in_boxarrow)
        elif isinstance(phi, Intervene):
            for name, value in phi.assignments:
                if not self.sig.is_endogenous(name):
                    raise FormulaError(f"cannot intervene on {name}: not endogenous")
                if value not in self.sig.range_of(name):
                    raise FormulaError(f"value {value!r} outside the range of {name}")
            for part in _walk(phi.body):
                if isinstance(part, (Intervene, BoxArrow)):
                    raise FormulaError("intervention bodies must be propositional")
            self.check_causal_fragment(phi.body, in_intervene=True, in_boxarrow=in_boxarrow)
        elif isinstance(phi, BoxArrow):
            if in_boxarrow:
                raise FormulaError("nested counterfactuals are not evaluable in causal models")
            if in_intervene:
                raise FormulaError("counterfactuals may not appear under an intervention")
            for part in _walk(phi.antecedent):
                if isinstance(part, (Intervene, BoxArrow)):
                    raise FormulaError("box-arrow antecedents must be propositional")
            self.check_causal_fragment(phi.consequent, in_boxarrow=True)
        else:
            raise FormulaError(f"not a causal formula: {phi!r}")

    def evaluate(self, u: dict, phi: Formula) -> bool:
        """Satisfaction at the causal setting (M, u), for L_ex(S)."""
        self.check_causal_fragment(phi)
        return self._eval(self.validate_context(u), phi, {})

    def _eval(self, u: dict, phi: Formula, inter: dict) -> bool:
        if isinstance(phi, PrimEvent):
            return self.solve(u, inter)[phi.var] == phi.val
        if isinstance(phi, ExoEvent):
            return u[phi.var] == phi.val
        if isinstance(phi, Top):
            return True
        if isinstance(phi, Bot):
            return False
        if isinstance(phi, Not):
            return not self._eval(u, phi.sub, inter)
        if isinstance(phi, And):
            return self._eval(u, phi.left, inter) and self._eval(u, phi.right, inter)
        if isinstance(phi, Or):
            return self._eval(u, phi.left, inter) or self._eval(u, phi.right, inter)
        if isinstance(phi, Intervene):
            merged = dict(inter)
            merged.update(phi.assignments)
            return self._eval(u, phi.body, merged)
        if isinstance(phi, BoxArrow):
            return self._eval_boxarrow(u, phi)
        raise FormulaError(f"not a causal formula: {phi!r}")

    def _eval_boxarrow(self, u: dict, phi: BoxArrow) -> bool:
        """phi ~> psi holds iff for some value vector y over the endogenous
        variables Y of phi, phi & Y=y is propositionally consistent and
        [Y <- y] psi holds."""
        ant, cons = phi.antecedent, phi.consequent
        ys = [n for n in self.sig.endo_names if n in free_endogenous(ant)]
        exo_occ = [n for n in self.sig.exo_names if n in variables_of(ant)]
        for values in itertools.product(*(self.sig.range_of(n) for n in ys)):
            fixed = dict(zip(ys, values))
            if not self._consistent_with(ant, fixed, exo_occ):
                continue
            if self._eval(u, cons, dict(fixed)):
                return True
        return False

    def _consistent_with(self, ant: Formula, fixed: dict, exo_occ: list) -> bool:
        """Consistency of ant & (Y=y): endogenous atoms are covered by
        `fixed`; exogenous atoms range freely."""
        if not exo_occ:
            return evaluate_prop(ant, fixed)
        for values in itertools.product(*(self.sig.range_of(n) for n in exo_occ)):
            asgn = dict(fixed)
            asgn.update(zip(exo_occ, values))
            if evaluate_prop(ant, asgn):
                return True
        return False


def _walk(phi: Formula):
    yield phi
    if isinstance(phi, Not):
        yield from _walk(phi.sub)
    elif isinstance(phi, (And, Or)):
        yield from _walk(phi.left)
        yield from _walk(phi.right)
    elif isinstance(phi, Intervene):
        yield from _walk(phi.body)
    elif isinstance(phi, BoxArrow):
        yield from _walk(phi.antecedent)
        yield from _walk(phi.consequent)


def validate_recursive(m: CausalModel) -> tuple[str, ...]:
    """Topological order of the endogenous variables (construction already
    guarantees acyclicity; this re-exposes the order as an operation)."""
    return m.topo_order


# ---------------------------------------------------------------------------
# Model DSL (.cm files)


def parse_model(text: str, name_hint: str = "model") -> CausalModel:
    """Parse the model DSL:

        model IDENT
        exo IDENT : { VALUE, ... }
        var IDENT : { VALUE, ... }
        eq IDENT = case { GUARD : VALUE ; ... default : VALUE }

    '#' starts a comment.
    """
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    body = "\n".join(lines)

    name = name_hint
    exo: list[tuple[str, tuple[str, ...]]] = []
    endo: list[tuple[str, tuple[str, ...]]] = []
    eq_texts: list[tuple[str, str]] = []

    i = 0
    statements = _split_statements(body)
    for stmt in statements:
        if stmt.startswith("model "):
            name = stmt.split(None, 1)[1].strip()
        elif stmt.startswith("exo ") or stmt.startswith("var "):
            kind, rest = stmt.split(None, 1)
            if ":" not in rest:
                raise ModelError(f"malformed declaration: {stmt!r}")
            var, rng = rest.split(":", 1)
            values = _parse_value_set(rng.strip(), stmt)
            (exo if kind == "exo" else endo).append((var.strip(), values))
        elif stmt.startswith("eq "):
            rest = stmt[3:]
            if "=" not in rest:
                raise ModelError(f"malformed equation: {stmt!r}")
            var, table = rest.split("=", 1)
            eq_texts.append((var.strip(), table.strip()))
        else:
            raise ModelError(f"unrecognized statement: {stmt!r}")

    sig = Signature(tuple(exo), tuple(endo))
    equations = {}
    for var, table in eq_texts:
        if not sig.is_endogenous(var):
            raise ModelError(f"equation for unknown endogenous variable {var!r}")
        equations[var] = _parse_case(var, table, sig)
    return CausalModel(sig, equations, name=name)


def _split_statements(body: str) -> list[str]:
    """Statements start with a keyword; braces may span lines."""
    statements = []
    current: list[str] = []
    depth = 0
    for line in body.splitlines():
        starts = line.split(None, 1)[0] if line else ""
        if depth == 0 and starts in ("model", "exo", "var", "eq", "structure", "state", "order"):
            if current:
                statements.append(" ".join(current))
            current = [line]
        else:
            current.append(line)
        depth += line.count("{") - line.count("}")
    if current:
        statements.append(" ".join(current))
    return statements


def _parse_value_set(text: str, ctx: str) -> tuple[str, ...]:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ModelError(f"expected a value set in braces: {ctx!r}")
    inner = text[1:-1].strip()
    if not inner:
        raise ModelError(f"empty value set: {ctx!r}")
    return tuple(v.strip() for v in inner.split(","))


def _parse_case(var: str, text: str, sig: Signature) -> Equation:
    text = text.strip()
    if not text.startswith("case"):
        raise ModelError(f"equation for {var} must be a case table")
    text = text[4:].strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ModelError(f"equation for {var}: expected braces around the case table")
    inner = text[1:-1]
    rows: list[tuple[Formula, str]] = []
    default: str | None = None
    for part in inner.split(";"):
        part = part.strip()
        if not part:
            continue
        if default is not None:
            raise ModelError(f"equation for {var}: default row must come last")
        guard_text, _, value = part.rpartition(":")
        guard_text, value = guard_text.strip(), value.strip()
        if not guard_text:
            raise ModelError(f"equation for {var}: malformed row {part!r}")
        if guard_text == "default":
            default = value
        else:
            rows.append((parse_formula(guard_text, sig), value))
    if default is None:
        raise ModelError(f"equation for {var} is missing a default row")
    return Equation(var, tuple(rows), default)


def model_to_text(m: CausalModel) -> str:
    """Serialize back to the model DSL (stable, deterministic output)."""
    out = [f"model {m.name}"]
    for n, rng in m.sig.exogenous:
        out.append(f"exo {n} : {{ {', '.join(rng)} }}")
    for n, rng in m.sig.endogenous:
        out.append(f"var {n} : {{ {', '.join(rng)} }}")
    for n in m.sig.endo_names:
        eq = m.equations[n]
        rows = "".join(f"{format_formula(g)} : {v} ; " for g, v in eq.rows)
        out.append(f"eq {n} = case {{ {rows}default : {eq.default} }}")
    return "\n".join(out) + "\n"


def parse_context(text: str, sig: Signature) -> dict:
    """Parse a context literal like "U=u11" or "U1=0 & U2=1" (commas also
    accepted) into a total exogenous assignment."""
    text = text.replace(",", "&")
    phi = parse_formula(text, sig)
    ctx = {}
    for part in _conj_parts(phi):
        if not isinstance(part, ExoEvent):
            raise ModelError(f"context literals must be exogenous events, got {format_formula(part)}")
        if part.var in ctx:
            raise ModelError(f"context assigns {part.var} twice")
        ctx[part.var] = part.val
    missing = [n for n in sig.exo_names if n not in ctx]
    if missing:
        raise ModelError(f"context is missing {', '.join(missing)}")
    return ctx


def _conj_parts(phi: Formula):
    if isinstance(phi, And):
        yield from _conj_parts(phi.left)
        yield from _conj_parts(phi.right)
    else:
        yield phi
