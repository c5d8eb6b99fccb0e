#!/usr/bin/env python3
"""Writes a 200-host registrable-domain oracle table.

Hosts are built from randomly chosen suffix rules plus hand-picked edge
cases; expectations come from the brute-force evaluator in
reference_table1.py (a linear scan over every rule), not from the C++ code.
Output: host<TAB>registrable domain, or host<TAB>ERROR.
"""

import os
import random
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from reference_table1 import load_rules, registrable  # noqa: E402

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.normpath(os.path.join(HERE, "..", ".."))

EDGE = [
    "bbc.co.uk", "news.bbc.co.uk", "co.uk", "uk", "nytimes.com", "www.nytimes.com",
    "a.b.c.nytimes.com", "example.zzz", "deep.sub.example.zzz", "www.ck", "a.www.ck",
    "b.ck", "c.b.ck", "city.kawasaki.jp", "x.city.kawasaki.jp", "foo.kawasaki.jp",
    "bar.foo.kawasaki.jp", "192.168.0.1", "10.0.0.254", "blogspot.com", "me.blogspot.com",
    "a.me.blogspot.com", "github.io", "user.github.io", "pages.user.github.io",
    "com", "amazonaws.com", "s3.amazonaws.com", "bucket.s3.amazonaws.com", "gov.uk",
    "www.gov.uk", "parliament.gov.uk", "k12.ca.us", "school.k12.ca.us",
]


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(ROOT, "tests", "fixtures", "psl_oracle.tsv")
    rules = load_rules(os.path.join(ROOT, "data", "public_suffix_list.dat"))
    rng = random.Random(7)
    alphabet = "abcdefghijklmnopqrstuvwxyz0123456789"

    def label():
        return "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 8)))

    hosts = list(EDGE)
    while len(hosts) < 200:
        rule = rng.choice(rules).lstrip("!")
        parts = [label() if p == "*" else p for p in rule.split(".")]
        extra = rng.choice([0, 0, 1, 1, 2])
        host = ".".join([label() for _ in range(extra)] + parts)
        if host not in hosts:
            hosts.append(host)

    cache = {}
    with open(out, "w", encoding="utf-8") as f:
        for h in hosts:
            d = registrable(rules, h, cache)
            f.write("%s\t%s\n" % (h, d if d is not None else "ERROR"))


if __name__ == "__main__":
    main()
