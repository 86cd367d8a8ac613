"""Domain ontologies, venue databases, and task scenario generation.

A domain file is a JSON document with ``domain``, ``slots`` and ``entities``
arrays. Constraint slots are the informable ones; ``phone``/``address`` are
requestable info slots. Databases are immutable after load and safe to share
across sessions and training workers.
"""

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

REQUESTABLE_INFO_SLOTS = ("phone", "address")


class DomainError(ValueError):
    """Domain file failed to parse or violated a schema invariant."""


@dataclass(frozen=True)
class SlotSpec:
    name: str
    values: tuple
    informable: bool
    requestable: bool


@dataclass(frozen=True)
class Ontology:
    domain_name: str
    slots: tuple

    @property
    def constraint_slots(self):
        return tuple(s for s in self.slots if s.informable)

    @property
    def constraint_slot_names(self):
        return tuple(s.name for s in self.constraint_slots)

    @property
    def requestable_slot_names(self):
        return tuple(s.name for s in self.slots if s.requestable)

    @property
    def info_slots(self):
        """Slots the system can tell the user about: requestables plus the
        constraint slots (confirmable back to the user)."""
        return tuple(s for s in self.slots if s.requestable) + self.constraint_slots

    def values_of(self, slot_name):
        for s in self.slots:
            if s.name == slot_name:
                return s.values
        raise KeyError(slot_name)


@dataclass(frozen=True)
class Entity:
    id: str
    name: str
    slot_values: dict
    info_values: dict


@dataclass(frozen=True)
class TaskSpec:
    constraints: dict
    requests: tuple  # sorted tuple of requestable slot names, never empty


@dataclass
class Database:
    ontology: Ontology
    entities: list
    # entity-index bitmask per (slot, value), built once at load; bit i set
    # means entities[i] has that value
    _masks: dict = field(default_factory=dict, repr=False)
    _by_name: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._masks:
            for slot in self.ontology.constraint_slot_names:
                per_value = {}
                for i, ent in enumerate(self.entities):
                    v = ent.slot_values[slot]
                    per_value[v] = per_value.get(v, 0) | (1 << i)
                self._masks[slot] = per_value
        if not self._by_name:
            self._by_name.update({e.name: e for e in self.entities})

    def match_count(self, constraints):
        """Number of entities matching every constraint (bitmask AND)."""
        mask = (1 << len(self.entities)) - 1
        for slot, value in constraints.items():
            mask &= self._masks[slot].get(value, 0)
            if not mask:
                return 0
        return mask.bit_count()

    def entity_by_name(self, name):
        return self._by_name.get(name)


def _check_slot(raw):
    for key in ("name", "values", "informable", "requestable"):
        if key not in raw:
            raise DomainError(f"slot entry missing field '{key}': {raw}")
    if raw["informable"] and not raw["values"]:
        raise DomainError(f"informable slot '{raw['name']}' has no values")


def _parse(doc, origin="<domain>"):
    for key in ("domain", "slots", "entities"):
        if key not in doc:
            raise DomainError(f"{origin}: missing top-level field '{key}'")
    seen = set()
    slots = []
    for raw in doc["slots"]:
        _check_slot(raw)
        if raw["name"] in seen:
            raise DomainError(f"{origin}: duplicate slot '{raw['name']}'")
        seen.add(raw["name"])
        slots.append(
            SlotSpec(raw["name"], tuple(raw["values"]), bool(raw["informable"]), bool(raw["requestable"]))
        )
    ont = Ontology(doc["domain"], tuple(slots))

    expected = {"restaurants": (4, 149), "hotels": (5, 39)}.get(ont.domain_name)
    if expected and len(ont.constraint_slots) != expected[0]:
        raise DomainError(
            f"{origin}: {ont.domain_name} must declare {expected[0]} constraint slots, "
            f"found {len(ont.constraint_slots)}"
        )

    entities = []
    ids = set()
    for raw in doc["entities"]:
        ent = Entity(
            id=raw["id"],
            name=raw["name"],
            slot_values=dict(raw["slot_values"]),
            info_values=dict(raw.get("info_values", {})),
        )
        if ent.id in ids:
            raise DomainError(f"{origin}: duplicate entity id '{ent.id}'")
        ids.add(ent.id)
        for slot in ont.constraint_slot_names:
            if slot not in ent.slot_values:
                raise DomainError(f"{origin}: entity '{ent.id}' missing value for slot '{slot}'")
            if ent.slot_values[slot] not in ont.values_of(slot):
                raise DomainError(
                    f"{origin}: entity '{ent.id}' has unknown {slot} value "
                    f"'{ent.slot_values[slot]}'"
                )
        entities.append(ent)

    if expected and len(entities) != expected[1]:
        raise DomainError(
            f"{origin}: {ont.domain_name} database must contain {expected[1]} entities, "
            f"found {len(entities)}"
        )
    return Database(ont, entities)


def load_domain(path):
    """Load and validate a domain file; raises DomainError on any violation."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read domain file {path}: {exc}") from exc
    return _parse(doc, origin=str(path))


def load_builtin_domain(name):
    """Load one of the shipped databases ('restaurants' or 'hotels')."""
    text = resources.files("mddial").joinpath("data").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return _parse(json.loads(text), origin=f"builtin:{name}")


def dump_domain(db):
    """Serialize a Database back to the domain-file JSON document."""
    return {
        "domain": db.ontology.domain_name,
        "slots": [
            {"name": s.name, "values": list(s.values), "informable": s.informable, "requestable": s.requestable}
            for s in db.ontology.slots
        ],
        "entities": [
            {"id": e.id, "name": e.name, "slot_values": dict(e.slot_values), "info_values": dict(e.info_values)}
            for e in db.entities
        ],
    }


def save_domain(db, path):
    Path(path).write_text(json.dumps(dump_domain(db), indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


def query_entities(db, constraints):
    """Entities whose slot values match every constraint; {} returns all."""
    for slot in constraints:
        if slot not in db.ontology.constraint_slot_names:
            raise KeyError(f"unknown constraint slot '{slot}'")
    return [
        e for e in db.entities
        if all(e.slot_values[s] == v for s, v in constraints.items())
    ]


def sample_task(db, rng, min_constraints=1, max_constraints=None, request_prob=0.75):
    """Draw a solvable task: rejection-sample constraint value combinations
    until at least one entity matches, then pick >= 1 requestable slots
    (each included with request_prob, resampled when none survive).

    Deterministic given the rng state. max_constraints defaults to the number
    of constraint slots.
    """
    slot_names = list(db.ontology.constraint_slot_names)
    if max_constraints is None:
        max_constraints = len(slot_names)
    max_constraints = min(max_constraints, len(slot_names))
    while True:
        k = rng.randint(min_constraints, max_constraints)
        chosen = rng.sample(slot_names, k)
        constraints = {s: rng.choice(db.ontology.values_of(s)) for s in slot_names if s in chosen}
        if db.match_count(constraints):
            break
    requests = [s for s in REQUESTABLE_INFO_SLOTS if s in db.ontology.requestable_slot_names]
    if requests:
        picked = sorted(s for s in requests if rng.random() < request_prob)
        if not picked:
            picked = [rng.choice(requests)]
    else:  # a domain file may ship without requestables; fall back to phone
        picked = ["phone"]
    return TaskSpec(constraints=constraints, requests=tuple(picked))


_SLOT_PHRASES = {
    "pricerange": "in the {} price range",
    "area": "in the {} of town",
    "near": "near the {}",
    "cuisine": "serving {} food",
    "type": "of type {}",
    "rating": "with a {} star rating",
}

_REQUEST_PHRASES = {"phone": "phone number", "address": "address"}


def render_task_text(task, domain_name="restaurants"):
    """Deterministic scenario text mentioning every constraint and request."""
    noun = "restaurant" if domain_name == "restaurants" else "hotel"
    parts = []
    for slot in sorted(task.constraints):
        value = task.constraints[slot]
        if slot == "cuisine":
            value = value.capitalize()
        parts.append(_SLOT_PHRASES.get(slot, f"with {slot} {{}}").format(value))
    want = " ".join([f"You are looking for a {noun}"] + [", ".join(parts)]) if parts else f"You are looking for a {noun}"
    asks = " and the ".join(_REQUEST_PHRASES[r] for r in task.requests)
    return f"{want}. Find out the {asks} of the venue."
