"""Regenerates the bundled sample data. Output is fully determined by SEED."""

import random
from pathlib import Path

SEED = 20240607
HERE = Path(__file__).parent

# (name, lon_min, lat_min, lon_max, lat_max, share of cities)
REGIONS = [
    ("Westmark", -10.0, 36.0, 30.0, 60.0, 220),
    ("Sundara", 68.0, 8.0, 98.0, 34.0, 150),
    ("Norvale", -125.0, 25.0, -70.0, 50.0, 160),
    ("Austrine", -75.0, -40.0, -40.0, -5.0, 90),
    ("Kiremba", 10.0, -30.0, 40.0, 5.0, 80),
]

SYLLABLES = ["al", "ber", "cor", "dun", "el", "fen", "gar", "hol", "is", "kar",
             "lin", "mor", "nor", "os", "pel", "quin", "ros", "sal", "tor", "ul",
             "ven", "wick", "yar", "zen"]
SUFFIXES = ["", "ton", "burg", "ville", "ford", "ia", "port", "stad"]


def city_name(rng, used):
    while True:
        parts = [rng.choice(SYLLABLES) for _ in range(rng.randint(2, 3))]
        name = ("".join(parts) + rng.choice(SUFFIXES)).capitalize()
        if name not in used:
            used.add(name)
            return name


def main():
    rng = random.Random(SEED)
    used = set()
    rows = ["id,name,lon,lat"]
    cid = 1
    for _, x0, y0, x1, y1, n in REGIONS:
        for _ in range(n):
            lon = round(rng.uniform(x0 + 1, x1 - 1), 4)
            lat = round(rng.uniform(y0 + 1, y1 - 1), 4)
            rows.append(f"{cid},{city_name(rng, used)},{lon},{lat}")
            cid += 1
    (HERE / "cities.csv").write_text("\n".join(rows) + "\n")

    lines = ["# one outline per region, counter-clockwise"]
    for name, x0, y0, x1, y1, _ in REGIONS:
        cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
        ring = [(x0, y0), (cx, y0 - 2), (x1, y0), (x1 + 2, cy), (x1, y1), (cx, y1 + 2), (x0, y1), (x0 - 2, cy)]
        coords = ", ".join(f"{x:g} {y:g}" for x, y in ring + ring[:1])
        lines.append(f"POLYGON(({coords})) # {name}")
    (HERE / "outlines.wkt").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
