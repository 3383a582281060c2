"""Versioned text format for networks and decision-process models.

One directive per line; ``#`` starts a comment; blank lines separate
sections but carry no meaning.  Every file opens with::

    format qpomdp-model v1
    kind bayesnet            (or: kind pomdp)

Network files declare variables then dense CPT rows keyed by parent
value indices::

    variable Rain 2
    variable Sprinkler 2 parents Rain
    cpt Rain : 0.9 0.1
    cpt Sprinkler | 1 : 0.99 0.01

Decision-process files declare the four alphabets, discount, and the
initial belief, then dense table rows keyed by names::

    states tiger-left tiger-right
    actions listen open-left open-right
    observations hear-left hear-right
    rewards -10 -1 0 5
    discount 0.9
    belief 0.5 0.5
    transition listen tiger-left : 1 0
    sensor listen tiger-left : 0.85 0.15
    reward listen tiger-left : 0 1 0 0

``sensor`` rows are keyed by (action, next state), ``reward`` rows by
(action, current state).  Parse errors carry the offending line number.
"""

from __future__ import annotations

import numpy as np

from .bayesnet import BayesNet, Cpt, RandomVariable, build_net
from .errors import ModelFormatError
from .pomdp import Pomdp

FORMAT_TAG = "qpomdp-model"
FORMAT_VERSION = "v1"


def _tokens(text: str):
    """Yield (line_number, token_list) for meaningful lines."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _floats(parts: list[str], lineno: int) -> list[float]:
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ModelFormatError(f"expected numbers, got {parts!r}", lineno) from exc


def _split_row(tokens: list[str], lineno: int) -> tuple[list[str], list[float]]:
    if ":" not in tokens:
        raise ModelFormatError("expected ':' before the probability row", lineno)
    split = tokens.index(":")
    return tokens[:split], _floats(tokens[split + 1:], lineno)


def _check_header(lines, kind_expected: str | None):
    lineno, tokens = next(lines, (0, None))
    if tokens is None or tokens[:1] != ["format"]:
        raise ModelFormatError("file must start with a 'format' line", lineno or 1)
    if tokens[1:] != [FORMAT_TAG, FORMAT_VERSION]:
        raise ModelFormatError(
            f"unsupported format {' '.join(tokens[1:])!r} "
            f"(expected '{FORMAT_TAG} {FORMAT_VERSION}')",
            lineno,
        )
    lineno, tokens = next(lines, (0, None))
    if tokens is None or tokens[0] != "kind" or len(tokens) != 2:
        raise ModelFormatError("expected 'kind bayesnet' or 'kind pomdp'", lineno or 2)
    kind = tokens[1]
    if kind not in ("bayesnet", "pomdp"):
        raise ModelFormatError(f"unknown kind {kind!r}", lineno)
    if kind_expected is not None and kind != kind_expected:
        raise ModelFormatError(f"expected kind {kind_expected!r}, found {kind!r}", lineno)
    return kind


# ---------------------------------------------------------------------------
# Bayesian networks
# ---------------------------------------------------------------------------

def parse_bayesnet(text: str) -> BayesNet:
    lines = _tokens(text)
    _check_header(lines, "bayesnet")

    names: dict[str, int] = {}
    variables: list[RandomVariable] = []
    rows: list[tuple[int, str, list[str], list[float]]] = []

    for lineno, tokens in lines:
        directive = tokens[0]
        if directive == "variable":
            if len(tokens) < 3:
                raise ModelFormatError("usage: variable <name> <cardinality> "
                                       "[parents <names...>]", lineno)
            name = tokens[1]
            if name in names:
                raise ModelFormatError(f"duplicate variable {name!r}", lineno)
            try:
                card = int(tokens[2])
            except ValueError:
                raise ModelFormatError(f"bad cardinality {tokens[2]!r}", lineno) from None
            parents: tuple[int, ...] = ()
            if len(tokens) > 3:
                if tokens[3] != "parents":
                    raise ModelFormatError(f"unexpected token {tokens[3]!r}", lineno)
                try:
                    parents = tuple(names[p] for p in tokens[4:])
                except KeyError as exc:
                    raise ModelFormatError(
                        f"unknown parent {exc.args[0]!r} (declare parents first)",
                        lineno,
                    ) from None
            names[name] = len(variables)
            variables.append(RandomVariable(name, card, parents))
        elif directive == "cpt":
            key, values = _split_row(tokens[1:], lineno)
            if not key:
                raise ModelFormatError("cpt row must name its variable", lineno)
            parent_vals = [t for t in key[1:] if t != "|"]
            rows.append((lineno, key[0], parent_vals, values))
        else:
            raise ModelFormatError(f"unknown directive {directive!r}", lineno)

    tables: dict[int, np.ndarray] = {}
    for lineno, var_name, parent_vals, values in rows:
        if var_name not in names:
            raise ModelFormatError(f"cpt for unknown variable {var_name!r}", lineno)
        index = names[var_name]
        var = variables[index]
        if index not in tables:
            shape = tuple(variables[p].cardinality for p in var.parents) + (
                var.cardinality,
            )
            tables[index] = np.full(shape, np.nan)
        if len(parent_vals) != len(var.parents):
            raise ModelFormatError(
                f"{var_name!r} needs {len(var.parents)} parent values, "
                f"got {len(parent_vals)}",
                lineno,
            )
        try:
            key = tuple(int(v) for v in parent_vals)
        except ValueError:
            raise ModelFormatError(
                f"parent values must be integers, got {parent_vals!r}", lineno
            ) from None
        for p, v in zip(var.parents, key):
            if not 0 <= v < variables[p].cardinality:
                raise ModelFormatError(
                    f"parent value {v} out of range for {variables[p].name!r}", lineno
                )
        if len(values) != var.cardinality:
            raise ModelFormatError(
                f"{var_name!r} rows need {var.cardinality} probabilities", lineno
            )
        if not np.all(np.isnan(tables[index][key])):
            raise ModelFormatError(f"duplicate cpt row for {var_name!r}", lineno)
        tables[index][key] = values

    for index, var in enumerate(variables):
        if index not in tables:
            raise ModelFormatError(f"missing cpt for variable {var.name!r}")
        if np.any(np.isnan(tables[index])):
            raise ModelFormatError(
                f"cpt for {var.name!r} does not cover every parent assignment"
            )
    return build_net(variables, [Cpt(i, tables[i]) for i in range(len(variables))])


def format_bayesnet(net: BayesNet) -> str:
    out = [f"format {FORMAT_TAG} {FORMAT_VERSION}", "kind bayesnet", ""]
    for var in net.variables:
        line = f"variable {var.name} {var.cardinality}"
        if var.parents:
            line += " parents " + " ".join(net.variables[p].name for p in var.parents)
        out.append(line)
    out.append("")
    for i, var in enumerate(net.variables):
        table = net.cpts[i].table
        parent_cards = tuple(net.variables[p].cardinality for p in var.parents)
        for key in np.ndindex(*parent_cards) if parent_cards else [()]:
            row = " ".join(format(v, ".17g") for v in table[key])
            prefix = f"cpt {var.name}"
            if key:
                prefix += " | " + " ".join(str(v) for v in key)
            out.append(f"{prefix} : {row}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Decision processes
# ---------------------------------------------------------------------------

def parse_pomdp(text: str) -> Pomdp:
    lines = _tokens(text)
    _check_header(lines, "pomdp")

    alphabets: dict[str, list[str]] = {}
    rewards: list[float] | None = None
    discount: float | None = None
    belief: list[float] | None = None
    rows: list[tuple[int, str, list[str], list[float]]] = []

    for lineno, tokens in lines:
        directive = tokens[0]
        if directive in ("states", "actions", "observations"):
            if directive in alphabets:
                raise ModelFormatError(f"duplicate {directive!r} line", lineno)
            if len(tokens) < 2:
                raise ModelFormatError(f"{directive!r} needs at least one name", lineno)
            if len(set(tokens[1:])) != len(tokens[1:]):
                raise ModelFormatError(f"duplicate names in {directive!r}", lineno)
            alphabets[directive] = tokens[1:]
        elif directive == "rewards":
            rewards = _floats(tokens[1:], lineno)
        elif directive == "discount":
            (discount,) = _floats(tokens[1:], lineno) or (None,)
        elif directive == "belief":
            belief = _floats(tokens[1:], lineno)
        elif directive in ("transition", "sensor", "reward"):
            key, values = _split_row(tokens[1:], lineno)
            rows.append((lineno, directive, key, values))
        else:
            raise ModelFormatError(f"unknown directive {directive!r}", lineno)

    for section in ("states", "actions", "observations"):
        if section not in alphabets:
            raise ModelFormatError(f"missing {section!r} line")
    if rewards is None:
        raise ModelFormatError("missing 'rewards' line")
    if discount is None:
        raise ModelFormatError("missing 'discount' line")
    if belief is None:
        raise ModelFormatError("missing 'belief' line")

    states = alphabets["states"]
    actions = alphabets["actions"]
    observations = alphabets["observations"]
    ns, na, no, nr = len(states), len(actions), len(observations), len(rewards)
    if len(belief) != ns:
        raise ModelFormatError(f"belief needs {ns} entries, got {len(belief)}")

    widths = {"transition": ns, "sensor": no, "reward": nr}
    tables = {
        "transition": np.full((ns, na, ns), np.nan),
        "sensor": np.full((ns, na, no), np.nan),
        "reward": np.full((ns, na, nr), np.nan),
    }
    state_index = {name: i for i, name in enumerate(states)}
    action_index = {name: i for i, name in enumerate(actions)}

    for lineno, directive, key, values in rows:
        if len(key) != 2:
            raise ModelFormatError(
                f"{directive!r} rows are keyed by <action> <state>", lineno
            )
        action_name, state_name = key
        if action_name not in action_index:
            raise ModelFormatError(f"unknown action {action_name!r}", lineno)
        if state_name not in state_index:
            raise ModelFormatError(f"unknown state {state_name!r}", lineno)
        if len(values) != widths[directive]:
            raise ModelFormatError(
                f"{directive!r} rows need {widths[directive]} probabilities", lineno
            )
        cell = (state_index[state_name], action_index[action_name])
        if not np.all(np.isnan(tables[directive][cell])):
            raise ModelFormatError(f"duplicate {directive!r} row", lineno)
        tables[directive][cell] = values

    for directive, table in tables.items():
        if np.any(np.isnan(table)):
            raise ModelFormatError(f"{directive!r} rows do not cover every "
                                   "(action, state) pair")

    return Pomdp(
        state_names=tuple(states),
        action_names=tuple(actions),
        observation_names=tuple(observations),
        reward_values=tuple(rewards),
        transition=tables["transition"],
        sensor=tables["sensor"],
        reward_dist=tables["reward"],
        discount=discount,
        initial_belief=np.asarray(belief),
    )


def format_pomdp(pomdp: Pomdp) -> str:
    out = [
        f"format {FORMAT_TAG} {FORMAT_VERSION}",
        "kind pomdp",
        "",
        "states " + " ".join(pomdp.state_names),
        "actions " + " ".join(pomdp.action_names),
        "observations " + " ".join(pomdp.observation_names),
        "rewards " + " ".join(format(v, ".17g") for v in pomdp.reward_values),
        f"discount {format(pomdp.discount, '.17g')}",
        "belief " + " ".join(format(v, ".17g") for v in pomdp.initial_belief),
        "",
    ]
    sections = {
        "transition": pomdp.transition,
        "sensor": pomdp.sensor,
        "reward": pomdp.reward_dist,
    }
    for directive, table in sections.items():
        for a, action in enumerate(pomdp.action_names):
            for s, state in enumerate(pomdp.state_names):
                row = " ".join(format(v, ".17g") for v in table[s, a])
                out.append(f"{directive} {action} {state} : {row}")
        out.append("")
    return "\n".join(out)


def load_pomdp(path: str) -> Pomdp:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_pomdp(fh.read())


def load_bayesnet(path: str) -> BayesNet:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_bayesnet(fh.read())
