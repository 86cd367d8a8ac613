"""Rule-based text understanding: keyword and pattern matching over the
slot-value lexicons and social cues.

Returns a possibly multifunctional act list; unknown input yields an empty
list, which the dialogue layer treats as an interpretation-level problem.
"""

import re

from mddial.acts import CommFunction, act

_GREET_WORDS = ("hi", "hello", "hey", "good morning", "good afternoon")
_BYE_WORDS = ("bye", "goodbye", "see you")
_THANK_WORDS = ("thanks", "thank you", "cheers")
_YES_WORDS = ("yes", "yeah", "yep", "correct", "right")
_NO_WORDS = ("no", "nope", "wrong")

_PRICE_SYNONYMS = {
    "cheap": "cheap",
    "inexpensive": "cheap",
    "budget": "cheap",
    "moderate": "moderate",
    "moderately": "moderate",
    "mid range": "moderate",
    "expensive": "expensive",
    "pricey": "expensive",
    "upmarket": "expensive",
}

_AREA_SYNONYMS = {
    "centre": "centre",
    "center": "centre",
    "city centre": "centre",
    "middle of town": "centre",
    "north": "north",
    "south": "south",
    "east": "east",
    "west": "west",
}

_TYPE_SYNONYMS = {
    "hotel": "hotel",
    "guesthouse": "guesthouse",
    "guest house": "guesthouse",
    "b&b": "b&b",
    "bed and breakfast": "b&b",
}

_NEAR_RE = re.compile(r"\b(?:near|close to|next to|by)\s+(?:the\s+)?([a-z&]+)")
_RATING_RE = re.compile(r"\b([1-5])[\s-]*star")

_PHONE_WORDS = ("phone", "telephone")
_ADDRESS_WORDS = ("address", "located")


def _has_word(text, phrase):
    return re.search(rf"\b{re.escape(phrase)}\b", text) is not None


def _match_synonyms(text, table, allowed):
    # longest phrases first so "city centre" wins over "centre"
    for phrase in sorted(table, key=len, reverse=True):
        if table[phrase] in allowed and _has_word(text, phrase):
            return table[phrase]
    return None


def parse_utterance(text, ont):
    """Parse one user utterance into dialogue acts; [] when nothing matched."""
    text = text.strip().lower()
    if not text:
        raise ValueError("empty utterance")
    out = []

    if any(_has_word(text, w) for w in _GREET_WORDS):
        out.append(act(CommFunction.GREET))

    constraints = {}
    slots = set(ont.constraint_slot_names)
    if "cuisine" in slots:
        for value in ont.values_of("cuisine"):
            if _has_word(text, value):
                constraints["cuisine"] = value
                break
    if "pricerange" in slots:
        value = _match_synonyms(text, _PRICE_SYNONYMS, set(ont.values_of("pricerange")))
        if value:
            constraints["pricerange"] = value
    if "area" in slots:
        value = _match_synonyms(text, _AREA_SYNONYMS, set(ont.values_of("area")))
        if value:
            constraints["area"] = value
    if "near" in slots:
        m = _NEAR_RE.search(text)
        if m and m.group(1) in ont.values_of("near"):
            constraints["near"] = m.group(1)
    if "type" in slots:
        value = _match_synonyms(text, _TYPE_SYNONYMS, set(ont.values_of("type")))
        if value:
            constraints["type"] = value
    if "rating" in slots:
        m = _RATING_RE.search(text)
        if m and m.group(1) in ont.values_of("rating"):
            constraints["rating"] = m.group(1)
    if constraints:
        out.append(act(CommFunction.INFORM, constraints))

    requested = []
    if any(_has_word(text, w) for w in _PHONE_WORDS):
        requested.append("phone")
    if any(_has_word(text, w) for w in _ADDRESS_WORDS):
        requested.append("address")
    requested = [s for s in requested if s in ont.requestable_slot_names]
    if requested:
        out.append(act(CommFunction.REQUEST, requested=requested))

    if not constraints and not requested:
        if any(_has_word(text, w) for w in _YES_WORDS):
            out.append(act(CommFunction.CONFIRM))
        elif any(_has_word(text, w) for w in _NO_WORDS):
            out.append(act(CommFunction.DISCONFIRM))

    if any(_has_word(text, w) for w in _THANK_WORDS):
        out.append(act(CommFunction.THANK))
    if any(_has_word(text, w) for w in _BYE_WORDS):
        out.append(act(CommFunction.BYE))
    return out


# ---------------------------------------------------------------------------
# user-side rendering (scripted cooperative dialogues and demos)

_USER_CONSTRAINT_FRAGMENTS = {
    "cuisine": "{} food",
    "pricerange": "something {}",
    "area": "in the {}",
    "near": "near the {}",
    "type": "a {}",
    "rating": "{} star",
}

_USER_REQUEST_TEXT = {"phone": "what is the phone number", "address": "what is the address"}

_USER_SIMPLE = {
    CommFunction.GREET: "hi",
    CommFunction.THANK: "thank you",
    CommFunction.BYE: "goodbye",
    CommFunction.CONFIRM: "yes",
    CommFunction.DISCONFIRM: "no",
}


def render_user_acts(user_acts):
    """Text a cooperative user would type for the given acts; parses back to
    the same slot-level semantics (see the round-trip tests). Constraints
    from multiple inform acts merge into one sentence."""
    parts = []
    constraints = {}
    for a in user_acts:
        if a.function is CommFunction.INFORM:
            constraints.update(a.content.constraints_dict)
    inform_emitted = False
    for a in user_acts:
        if a.function in _USER_SIMPLE:
            parts.append(_USER_SIMPLE[a.function])
        elif a.function is CommFunction.INFORM:
            if not inform_emitted:
                frags = [
                    _USER_CONSTRAINT_FRAGMENTS[s].format(v)
                    for s, v in sorted(constraints.items())
                ]
                parts.append("i am looking for " + " ".join(frags))
                inform_emitted = True
        elif a.function is CommFunction.REQUEST:
            parts.extend(_USER_REQUEST_TEXT[s] for s in a.content.requested)
        else:
            raise ValueError(f"no user rendering for {a.function}")
    return ", ".join(parts)
