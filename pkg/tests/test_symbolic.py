import numpy as np
import pytest

from src.symbolic import (
    Action,
    GroundAtom,
    LiftedAtom,
    Object,
    ObjType,
    Operator,
    PreconditionViolation,
    Predicate,
    State,
    Variable,
    abstract,
    apply,
    enumerate_groundings,
    render_operator,
    render_operators,
    successor,
)


def test_apply_runs_delete_then_add(books):
    ground = books.pick.ground((books.r, books.b1))
    s2 = apply(books.s1, ground)
    assert s2 == books.s2


def test_apply_rejects_missing_preconditions(books):
    ground = books.pick.ground((books.r, books.b1))
    with pytest.raises(PreconditionViolation, match="Reachable"):
        apply(books.s0, ground)


def test_quantified_delete_clears_predicate_but_keeps_add(books):
    ground = books.nav.ground((books.r, books.b1))
    state = books.s0 | {books.atom(books.Reachable, books.r, books.b1)}
    result = successor(state, ground)
    reachable = {a for a in result if a.predicate == books.Reachable}
    assert reachable == {books.atom(books.Reachable, books.r, books.b1)}
    assert books.atom(books.HandEmpty, books.r) in result


def test_ground_operator_substitutes_everything(books):
    ground = books.pick.ground((books.r, books.b2))
    assert ground.preconditions == {books.atom(books.Reachable, books.r, books.b2),
                                    books.atom(books.HandEmpty, books.r)}
    assert ground.controller_objects == (books.r, books.b2)
    assert str(ground) == "Pick0(robby, book2)"


def test_ground_operator_checks_types(books):
    with pytest.raises(ValueError):
        books.pick.ground((books.b1, books.r))


def test_enumerate_groundings_orders_by_object_name(books):
    groundings = enumerate_groundings(books.pick, [books.b2, books.r, books.b1])
    assert [g.objects for g in groundings] == [(books.r, books.b1), (books.r, books.b2)]


def test_enumerate_groundings_with_fixed_parameter(books):
    groundings = enumerate_groundings(books.pick, [books.r, books.b1, books.b2],
                                      fixed={books.vb: books.b2})
    assert [g.objects for g in groundings] == [(books.r, books.b2)]


def test_operator_rejects_undeclared_variables(books):
    stray = Variable('?z', books.book_t)
    with pytest.raises(ValueError, match="undeclared"):
        Operator('Bad', (books.vr,), frozenset(), {LiftedAtom(books.Holding, [books.vr, stray])},
                 frozenset(), frozenset(), 'Pick', (books.vr,))


def test_operator_rejects_add_and_delete_of_same_atom(books):
    atom = LiftedAtom(books.HandEmpty, [books.vr])
    with pytest.raises(ValueError, match="adds and deletes"):
        Operator('Bad', (books.vr,), frozenset(), {atom}, {atom}, frozenset(), 'Pick', (books.vr,))


def test_signature_ignores_name(books):
    renamed = books.pick.with_changes(name='Pick7')
    assert renamed.signature == books.pick.signature
    assert renamed != books.pick


def test_variable_and_object_naming_rules():
    t = ObjType('thing', ('x',))
    with pytest.raises(ValueError):
        Variable('x', t)
    with pytest.raises(ValueError):
        Object('?x', t)


def test_state_checks_feature_shape():
    t = ObjType('thing', ('x', 'y'))
    with pytest.raises(ValueError):
        State({Object('a', t): np.array([1.0])})


def test_state_copy_is_independent():
    t = ObjType('thing', ('x',))
    a = Object('a', t)
    state = State({a: np.array([1.0])})
    copy = state.copy()
    copy.set(a, 'x', 2.0)
    assert state.get(a, 'x') == 1.0
    assert copy != state


def test_abstract_evaluates_classifiers():
    t = ObjType('thing', ('x',))
    Positive = Predicate('Positive', (t,), lambda s, o: s.get(o[0], 'x') > 0)
    a, b = Object('a', t), Object('b', t)
    state = State({a: np.array([1.0]), b: np.array([-1.0])})
    assert abstract(state, [Positive]) == {GroundAtom(Positive, [a])}


def test_action_coerces_theta_to_floats(books):
    action = Action('NavTo', [books.r, books.b1], [1, 2])
    assert action.theta == (1.0, 2.0)
    assert action.objects == (books.r, books.b1)
    assert action.theta_array.tolist() == [1.0, 2.0]


def test_render_operator(books):
    text = render_operator(books.nav)
    assert text.splitlines() == [
        "NavTo0:",
        "  Args: ?r:robot ?b:book",
        "  Preconditions: ()",
        "  Add Effects: (Reachable ?r ?b)",
        "  Delete Effects: (forall (?q0:robot ?q1:book) (Reachable ?q0 ?q1))",
        "  Controller: (NavTo ?r ?b)",
    ]


def test_render_operators_sorted_with_conjunctions(books):
    text = render_operators([books.pick, books.nav])
    assert text.index("NavTo0:") < text.index("Pick0:")
    assert "  Preconditions: (and (HandEmpty ?r) (Reachable ?r ?b))" in text
    assert text.endswith("\n")
