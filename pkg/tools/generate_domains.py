#!/usr/bin/env python3
"""Regenerate the seeded venue databases shipped in src/mddial/data/.

The corpus is synthetic but frozen: 149 restaurants / 39 hotels with fixed
value inventories, and "Bangkok City" as the unique thai + centre venue so
canned dialogues resolve deterministically. Run only when the schema
changes; the JSON files are committed.
"""

import json
import random
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "mddial" / "data"

PRICERANGES = ["cheap", "moderate", "expensive"]
AREAS = ["centre", "north", "south", "east", "west"]
LANDMARKS = ["station", "museum", "riverside", "park", "stadium", "university", "cathedral", "harbour"]
CUISINES = [
    "thai", "chinese", "indian", "italian", "french", "mexican",
    "japanese", "korean", "turkish", "vietnamese", "spanish", "greek",
]
HOTEL_TYPES = ["hotel", "guesthouse", "b&b"]
RATINGS = ["1", "2", "3", "4", "5"]

REST_FIRST = [
    "Golden", "Blue", "Royal", "Silver", "Jade", "Red", "Little", "Grand",
    "Old", "Spicy", "Sweet", "Lucky", "Copper", "Velvet", "Rustic", "Urban",
]
REST_SECOND = [
    "Lotus", "Orchid", "Dragon", "Garden", "Table", "Kitchen", "Spoon",
    "Harvest", "Lantern", "Olive", "Pepper", "Anchor", "Crown", "Willow",
]

HOTEL_FIRST = [
    "Riverside", "Parkview", "Harbour", "Crescent", "Victoria", "Albany",
    "Windsor", "Maple", "Granite", "Lakeside", "Meadow", "Summit",
]
HOTEL_SECOND = ["Lodge", "House", "Arms", "Court", "Inn", "Manor", "Rest", "View"]

STREETS = [
    "Mill Road", "King Street", "Bridge Lane", "Castle Hill", "Regent Street",
    "Orchard Way", "Chapel Walk", "Market Square", "Abbey Road", "Station Road",
]


def phone(rng):
    return "01223 " + "".join(str(rng.randrange(10)) for _ in range(6))


def address(rng):
    return f"{rng.randrange(1, 200)} {rng.choice(STREETS)}"


def make_restaurants(rng):
    names = [f"{a} {b}" for a in REST_FIRST for b in REST_SECOND]
    rng.shuffle(names)
    entities = [
        {
            "id": "r001",
            "name": "Bangkok City",
            "slot_values": {"pricerange": "moderate", "area": "centre", "near": "riverside", "cuisine": "thai"},
            "info_values": {"phone": phone(rng), "address": address(rng)},
        }
    ]
    i = 0
    while len(entities) < 149:
        sv = {
            "pricerange": rng.choice(PRICERANGES),
            "area": rng.choice(AREAS),
            "near": rng.choice(LANDMARKS),
            "cuisine": rng.choice(CUISINES),
        }
        # keep Bangkok City the unique thai venue in the centre
        if sv["cuisine"] == "thai" and sv["area"] == "centre":
            continue
        entities.append(
            {
                "id": f"r{len(entities) + 1:03d}",
                "name": names[i],
                "slot_values": sv,
                "info_values": {"phone": phone(rng), "address": address(rng)},
            }
        )
        i += 1
    return {
        "domain": "restaurants",
        "slots": [
            {"name": "pricerange", "values": PRICERANGES, "informable": True, "requestable": False},
            {"name": "area", "values": AREAS, "informable": True, "requestable": False},
            {"name": "near", "values": LANDMARKS, "informable": True, "requestable": False},
            {"name": "cuisine", "values": CUISINES, "informable": True, "requestable": False},
            {"name": "phone", "values": [], "informable": False, "requestable": True},
            {"name": "address", "values": [], "informable": False, "requestable": True},
        ],
        "entities": entities,
    }


def make_hotels(rng):
    names = [f"{a} {b}" for a in HOTEL_FIRST for b in HOTEL_SECOND]
    rng.shuffle(names)
    entities = []
    for i in range(39):
        entities.append(
            {
                "id": f"h{i + 1:03d}",
                "name": names[i],
                "slot_values": {
                    "pricerange": rng.choice(PRICERANGES),
                    "area": rng.choice(AREAS),
                    "near": rng.choice(LANDMARKS),
                    "type": rng.choice(HOTEL_TYPES),
                    "rating": rng.choice(RATINGS),
                },
                "info_values": {"phone": phone(rng), "address": address(rng)},
            }
        )
    return {
        "domain": "hotels",
        "slots": [
            {"name": "pricerange", "values": PRICERANGES, "informable": True, "requestable": False},
            {"name": "area", "values": AREAS, "informable": True, "requestable": False},
            {"name": "near", "values": LANDMARKS, "informable": True, "requestable": False},
            {"name": "type", "values": HOTEL_TYPES, "informable": True, "requestable": False},
            {"name": "rating", "values": RATINGS, "informable": True, "requestable": False},
            {"name": "phone", "values": [], "informable": False, "requestable": True},
            {"name": "address", "values": [], "informable": False, "requestable": True},
        ],
        "entities": entities,
    }


def main():
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240501)
    for doc in (make_restaurants(rng), make_hotels(rng)):
        path = DATA_DIR / f"{doc['domain']}.json"
        path.write_text(json.dumps(doc, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
        print(f"wrote {path} ({len(doc['entities'])} entities)")


if __name__ == "__main__":
    main()
