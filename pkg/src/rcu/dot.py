"""Graphviz DOT rendering of decision trees."""

from __future__ import annotations

from .tree import Chance, Decision, DecisionTree, Leaf, Strategy, strategy_edges


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(t: DecisionTree, strategy: Strategy | None = None, name: str = "tree") -> str:
    """Decision nodes are boxes, chance nodes circles, leaves plain gain labels.

    Node names are assigned in depth-first order so the output is stable.
    With ``strategy`` the decision edges it uses are drawn bold.
    """
    bold = strategy_edges(t, strategy) if strategy is not None else frozenset()
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;"]
    counter = 0

    def visit(node) -> str:
        nonlocal counter
        key = f"n{counter}"
        counter += 1
        if isinstance(node, Leaf):
            lines.append(f"  {key} [shape=plaintext, label={_quote(str(node.gain))}];")
            return key
        shape = "box" if isinstance(node, Decision) else "circle"
        lines.append(f"  {key} [shape={shape}, label={_quote(node.id)}];")
        for e in node.edges:
            child = visit(e.child)
            if isinstance(node, Chance):
                attrs = f"label={_quote(','.join(e.event.names()))}"
            else:
                attrs = f"label={_quote(e.action)}"
                if (node.id, e.index) in bold:
                    attrs += ", style=bold"
            lines.append(f"  {key} -> {child} [{attrs}];")
        return key

    visit(t.root)
    lines.append("}")
    return "\n".join(lines) + "\n"
