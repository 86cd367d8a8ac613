"""Template-based generation of system utterances.

Deterministic: one template per act, joined in combiner order, with one
special case: a recommendation absorbs the confirmation echo into a single
sentence ("Bangkok City is a Thai restaurant; it is in the city centre").
Turn/Time tags are fixed presentation annotations, never policy-selected.
"""

from mddial.acts import CommFunction, format_act

_SIMPLE = {
    CommFunction.RETURN_GREET: "Hello! How can I help you?",
    CommFunction.RETURN_BYE: "Goodbye!",
    CommFunction.ACCEPT_THANK: "You're welcome!",
    CommFunction.AUTO_NEGATIVE_PERCEPTION: "Sorry, I didn't catch that. Could you repeat, please?",
    CommFunction.AUTO_NEGATIVE_INTERPRETATION: "Sorry, I don't understand. Could you rephrase that, please?",
}

_REQUEST_QUESTIONS = {
    "cuisine": "What kind of food would you like?",
    "pricerange": "What price range are you looking for?",
    "area": "Which part of town do you prefer?",
    "near": "Should it be near anywhere in particular?",
    "type": "Would you like a hotel, a guesthouse, or a b&b?",
    "rating": "What star rating would you like?",
}

# echo phrases used in "it is ..." clauses
_ECHO_CLAUSES = {
    "area": {
        "centre": "in the city centre",
        "north": "in the north of town",
        "south": "in the south of town",
        "east": "in the east of town",
        "west": "in the west of town",
    },
    "pricerange": "in the {} price range",
    "near": "near the {}",
    "rating": "rated {} stars",
    "type": "a {}",
}

_DOMAIN_NOUN = {"restaurants": "restaurant", "hotels": "hotel"}


def _echo_clause(slot, value):
    spec = _ECHO_CLAUSES.get(slot)
    if isinstance(spec, dict):
        return spec.get(value, f"in the {value}")
    if spec:
        return spec.format(value)
    return f"{slot} {value}"


def _standalone_fragments(constraints, domain_noun):
    frags = []
    for slot, value in constraints:
        if slot == "cuisine":
            frags.append(f"{value.capitalize()} food")
        elif slot == "type":
            frags.append(f"a {value}")
        else:
            frags.append(_echo_clause(slot, value))
    return frags


def _recommend_sentence(rec, echo, domain_name):
    """The recommendation sentence plus trailing echo clauses."""
    name = rec.content.entity
    values = rec.content.constraints_dict
    noun = _DOMAIN_NOUN.get(domain_name, "venue")
    echoed = dict(echo)
    if domain_name == "hotels" and "type" in values:
        head = f"{name} is a {values['type']}"
        echoed.pop("type", None)
    elif "cuisine" in values:
        head = f"{name} is a {values['cuisine'].capitalize()} {noun}"
        echoed.pop("cuisine", None)
    else:
        head = f"{name} is a {noun}"
    clauses = [_echo_clause(s, v) for s, v in sorted(echoed.items())]
    if clauses:
        return head + "; it is " + " and ".join(clauses)
    return head


def generate_utterance(response, ont):
    """Deterministic realization of one combined response."""
    if not response.acts:
        raise ValueError("cannot realize an empty response")
    echo = {}
    rec = None
    for a in response.acts:
        if a.function is CommFunction.FEEDBACK_INFORM:
            echo.update(a.content.constraints_dict)
        elif a.function is CommFunction.RECOMMEND:
            rec = a

    parts = []
    for a in response.acts:
        fn = a.function
        if fn in _SIMPLE:
            parts.append(_SIMPLE[fn])
        elif fn is CommFunction.AUTO_POSITIVE:
            parts.append("okay")
        elif fn is CommFunction.INFORM_SEARCH:
            parts.append("let me see, ...")
        elif fn is CommFunction.FEEDBACK_INFORM:
            if rec is None:
                frags = _standalone_fragments(a.content.constraints, ont.domain_name)
                parts.append("okay, " + " and ".join(frags))
            # otherwise absorbed into the recommendation sentence
        elif fn is CommFunction.RECOMMEND:
            parts.append(_recommend_sentence(a, echo, ont.domain_name))
        elif fn is CommFunction.REQUEST:
            for slot in a.content.requested:
                parts.append(_REQUEST_QUESTIONS.get(slot, f"Which {slot} would you like?"))
        elif fn is CommFunction.INFORM:
            name = a.content.entity or "the venue"
            for slot, value in a.content.constraints:
                label = "phone number" if slot == "phone" else slot
                parts.append(f"The {label} of {name} is {value}.")
        else:
            raise ValueError(f"no template for system act {format_act(a)}")

    return _join(parts)


def _join(parts):
    """Comma-join running fragments ("okay" + "let me see, ..."), start a
    new sentence after terminal punctuation."""
    out = parts[0][0].upper() + parts[0][1:]
    for p in parts[1:]:
        if out[-1] in ".?!":
            out += " " + p[0].upper() + p[1:]
        else:
            out += ", " + p
    return out


def presentation_annotations(response):
    """Fixed Turn/Time tags: the system takes the turn every response and
    pauses when it signals an ongoing search."""
    tags = ["turn.take()"]
    if any(a.function is CommFunction.INFORM_SEARCH for a in response.acts):
        tags.append("time.pausing()")
    return tags
