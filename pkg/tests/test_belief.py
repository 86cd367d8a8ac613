import math

import pytest
from hypothesis import given, settings, strategies as st

from mddial.acts import (
    CommFunction,
    Dimension,
    INTERPRETATION_PROBLEM,
    NBestList,
    PERCEPTION_PROBLEM,
    act,
    nbest_event,
)
from mddial.belief import (
    UNKNOWN,
    extract_features,
    get_catalogue,
    init_belief,
    update_belief,
)


def inform(**kv):
    return act(CommFunction.INFORM, kv)


def single(acts_, conf=1.0):
    return nbest_event(NBestList(((tuple(acts_), conf),)))


def test_init_belief(restaurants, hotels):
    b = init_belief(restaurants.ontology)
    assert set(b.goal) == {"pricerange", "area", "near", "cuisine"}
    assert all(dist == {UNKNOWN: 1.0} for dist in b.goal.values())
    assert b.pending_social == frozenset() and b.offered is None
    assert init_belief(hotels.ontology).goal.keys() == {
        "pricerange", "area", "near", "type", "rating",
    }


def test_problem_event_leaves_goal_untouched(restaurants):
    b = init_belief(restaurants.ontology)
    b = update_belief(b, single([inform(cuisine="thai")], 0.8))
    before = {s: dict(d) for s, d in b.goal.items()}
    after = update_belief(b, PERCEPTION_PROBLEM)
    assert {s: dict(d) for s, d in after.goal.items()} == before
    assert after.problem == "perception"
    assert update_belief(b, INTERPRETATION_PROBLEM).problem == "interpretation"


def test_full_confidence_update(restaurants):
    b = init_belief(restaurants.ontology)
    b = update_belief(b, single([inform(cuisine="thai")], 1.0))
    assert b.goal["cuisine"]["thai"] == pytest.approx(1.0)


def test_three_best_update_hand_computed(restaurants):
    # evidence: 0.6 thai + 0.3 indian, 0.1 of the mass mentions nothing, so
    # P'(thai) = 0.6, P'(indian) = 0.3, P'(unknown) = 0.1 * 1.0
    b = init_belief(restaurants.ontology)
    ev = nbest_event(
        NBestList(
            (
                ((inform(cuisine="thai"),), 0.6),
                ((inform(cuisine="indian"),), 0.3),
                ((act(CommFunction.GREET),), 0.1),
            )
        )
    )
    b = update_belief(b, ev)
    assert b.goal["cuisine"]["thai"] == pytest.approx(0.6)
    assert b.goal["cuisine"]["indian"] == pytest.approx(0.3)
    assert b.goal["cuisine"][UNKNOWN] == pytest.approx(0.1)


def test_update_is_pure(restaurants):
    b = init_belief(restaurants.ontology)
    ev = single([inform(area="north"), act(CommFunction.GREET)], 0.7)
    one = update_belief(b, ev)
    two = update_belief(b, ev)
    assert one == two
    assert b.goal["area"] == {UNKNOWN: 1.0}


def test_social_and_request_tracking(restaurants):
    b = init_belief(restaurants.ontology)
    ev = single([act(CommFunction.GREET), act(CommFunction.REQUEST, requested=["phone"])])
    b = update_belief(b, ev)
    assert b.pending_social == frozenset({"greet"})
    assert b.requested == frozenset({"phone"})
    assert b.turn_index == 1


def test_requests_for_goal_slots_are_not_owed(restaurants):
    # channel distortions can turn informs into requests for constraint
    # slots; those are the user's own preferences, nothing the system owes
    b = init_belief(restaurants.ontology)
    ev = single([act(CommFunction.REQUEST, requested=["area", "address"])])
    b = update_belief(b, ev)
    assert b.requested == frozenset({"address"})


_streams = st.lists(
    st.one_of(
        st.just(PERCEPTION_PROBLEM),
        st.just(INTERPRETATION_PROBLEM),
        st.builds(
            lambda slot, value, conf: single([inform(**{slot: value})], conf),
            st.sampled_from(["cuisine", "area"]),
            st.sampled_from(["thai", "indian", "centre", "north"]),
            st.floats(0.05, 1.0),
        ),
    ),
    max_size=12,
)


@given(_streams)
@settings(max_examples=200, deadline=None)
def test_distributions_stay_normalized(stream):
    from mddial.domain import load_builtin_domain

    db = load_builtin_domain("restaurants")
    b = init_belief(db.ontology)
    for ev in stream:
        if ev.kind == "nbest":
            slot = ev.nbest.top[0][0].content.constraints[0][0]
            value = ev.nbest.top[0][0].content.constraints[0][1]
            if value not in db.ontology.values_of(slot):
                continue
        b = update_belief(b, ev)
        for dist in b.goal.values():
            assert math.isclose(sum(dist.values()), 1.0, abs_tol=1e-9)
            assert all(p >= 0 for p in dist.values())


class TestFeatures:
    def test_initial_som_is_bias_only(self, restaurants):
        f = extract_features(init_belief(restaurants.ontology), Dimension.SOM, restaurants)
        assert f[0] == 1.0 and f[1:].sum() == 0.0

    def test_perception_one_hot(self, restaurants):
        b = update_belief(init_belief(restaurants.ontology), PERCEPTION_PROBLEM)
        f = extract_features(b, Dimension.FEEDBACK, restaurants)
        cat = get_catalogue(Dimension.FEEDBACK, restaurants.ontology)
        assert f[cat.names.index("problem:perception")] == 1.0
        assert f[cat.names.index("problem:interpretation")] == 0.0

    def test_confidence_buckets(self, restaurants):
        cat = get_catalogue(Dimension.FEEDBACK, restaurants.ontology)
        b = init_belief(restaurants.ontology)
        low = update_belief(b, single([inform(cuisine="thai")], 0.25))
        mid = update_belief(b, single([inform(cuisine="thai")], 0.5))
        high = update_belief(b, single([inform(cuisine="thai")], 0.9))
        for state, bucket in ((low, "conf:le0.3"), (mid, "conf:le0.6"), (high, "conf:gt0.6")):
            f = extract_features(state, Dimension.FEEDBACK, restaurants)
            assert f[cat.names.index(bucket)] == 1.0

    def test_task_length_differs_but_transferable_dims_do_not(self, restaurants, hotels):
        task_r = get_catalogue(Dimension.TASK, restaurants.ontology)
        task_h = get_catalogue(Dimension.TASK, hotels.ontology)
        assert len(task_r) != len(task_h)
        assert task_r.version != task_h.version
        for dim in (Dimension.FEEDBACK, Dimension.SOM):
            cat_r = get_catalogue(dim, restaurants.ontology)
            cat_h = get_catalogue(dim, hotels.ontology)
            assert cat_r.names == cat_h.names
            assert cat_r.version == cat_h.version

    def test_offered_stale_feature(self, restaurants):
        from mddial.belief import note_system_response
        from mddial.combiner import CombinedResponse

        cat = get_catalogue(Dimension.TASK, restaurants.ontology)
        stale_idx = cat.names.index("offered_stale")
        b = update_belief(init_belief(restaurants.ontology), single([inform(cuisine="thai", area="centre")]))
        offer = act(
            CommFunction.RECOMMEND,
            {"cuisine": "thai", "area": "centre", "pricerange": "moderate", "near": "riverside"},
            entity="Bangkok City",
        )
        b = note_system_response(b, CombinedResponse(acts=(offer,), cancelled=()))
        assert extract_features(b, Dimension.TASK, restaurants)[stale_idx] == 0.0
        # the user corrects an attribute: the standing offer no longer fits
        b = update_belief(b, single([inform(area="north")]))
        assert extract_features(b, Dimension.TASK, restaurants)[stale_idx] == 1.0

    def test_entries_in_unit_interval(self, restaurants):
        b = init_belief(restaurants.ontology)
        b = update_belief(b, single([inform(cuisine="thai"), act(CommFunction.GREET)], 0.6))
        for dim in (Dimension.TASK, Dimension.FEEDBACK, Dimension.SOM, "all"):
            f = extract_features(b, dim, restaurants)
            assert ((0.0 <= f) & (f <= 1.0)).all()
