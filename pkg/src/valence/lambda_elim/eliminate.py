"""Entry points for λ-elimination, dispatching along the decomposition plan."""

from __future__ import annotations

from ..automata import ValenceAutomaton
from .classify import ClassificationError, DecompositionPlan, FreeB, TimesZ, decompose
from .transducer import SLTransducer, VTransducer


def _eliminate(T: VTransducer, plan: DecompositionPlan) -> SLTransducer:
    if not plan.steps:
        from .trivial import eliminate_trivial
        return eliminate_trivial(T)
    step = plan.steps[0]
    if isinstance(step, TimesZ):
        from .times_z import eliminate_times_z
        return eliminate_times_z(T, plan, _eliminate)
    if not plan.inner.steps:
        from .free_b import eliminate_b
        return eliminate_b(T, step.vertex)
    from .stack import eliminate_stack
    return eliminate_stack(T, plan, _eliminate)


def eliminate_to_transducer(A: ValenceAutomaton, plan: DecompositionPlan | None = None) -> SLTransducer:
    plan = decompose(A.graph) if plan is None else plan
    return _eliminate(VTransducer.from_automaton(A), plan)


def eliminate_lambda(g, A: ValenceAutomaton) -> ValenceAutomaton:
    """λ-free automaton with the same language, for graphs in C.

    Raises ClassificationError (with the forbidden path as witness) otherwise.
    """
    plan = decompose(g)
    if g is not A.graph:
        if not g.same_structure(A.graph) or set(g.vertices) != set(A.graph.vertices):
            raise ValueError("the automaton is over a different graph")
    return eliminate_to_transducer(A, plan).flatten()


def eliminate_lambda_B(A: ValenceAutomaton) -> ValenceAutomaton:
    g = A.graph
    if len(g.vertices) != 1 or g.is_looped(g.vertices[0]):
        raise ValueError("eliminate_lambda_B needs a graph with a single unlooped vertex")
    return eliminate_to_transducer(A, DecompositionPlan((FreeB(g.vertices[0]),))).flatten()


def eliminate_lambda_times_Z(A: ValenceAutomaton, inner_plan) -> ValenceAutomaton:
    g = A.graph
    inner = tuple(inner_plan)
    inner_vertices = {s.vertex for s in inner}
    rest = [v for v in g.vertices if v not in inner_vertices]
    if len(rest) != 1 or not g.is_looped(rest[0]):
        raise ValueError("the graph is not the inner graph plus one looped vertex")
    plan = _checked(g, (TimesZ(rest[0]),) + inner)
    return eliminate_to_transducer(A, plan).flatten()


def eliminate_lambda_free_B(A: ValenceAutomaton, inner_plan) -> ValenceAutomaton:
    g = A.graph
    inner = tuple(inner_plan)
    if not inner:
        raise ValueError("the inner monoid is trivial; use eliminate_lambda_B for a single unlooped vertex")
    inner_vertices = {s.vertex for s in inner}
    rest = [v for v in g.vertices if v not in inner_vertices]
    if len(rest) != 1 or g.is_looped(rest[0]):
        raise ValueError("the graph is not the inner graph plus one isolated unlooped vertex")
    plan = _checked(g, (FreeB(rest[0]),) + inner)
    return eliminate_to_transducer(A, plan).flatten()


def _checked(g, steps) -> DecompositionPlan:
    plan = DecompositionPlan(tuple(steps))
    if not g.same_structure(plan.replay()):
        raise ClassificationError(f"plan {plan} does not rebuild the graph")
    return plan
