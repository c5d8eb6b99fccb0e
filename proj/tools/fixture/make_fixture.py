#!/usr/bin/env python3
"""Generate the synthetic nine-platform fixture used by the test suites.

The fixture is deterministic (fixed seed) and is checked in under
tests/fixtures/synthetic/. Rerunning this script must reproduce the
checked-in files byte for byte.

Shape of the generated ecosystem:
  * nine platforms, each dumped in its own schema (JSONL, CSV or TSV);
  * Scored routes ~58% of its external links to patriots.win;
  * Facebook and Twitter have bimodal (left / right) user bases;
  * Gab and BitChute over-link each other well above the null model;
  * link behaviour is stationary over 2020, so restricting the time
    window preserves the aggregate structure.
"""

import csv
import io
import json
import math
import os
import random
import sys
from datetime import datetime, timedelta, timezone

SEED = 2020
HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.normpath(os.path.join(HERE, "..", ".."))
OUT = os.path.join(ROOT, "tests", "fixtures", "synthetic")

PLATFORMS = ["Facebook", "Reddit", "Twitter", "YouTube", "BitChute",
             "Gab", "Parler", "Scored", "Voat"]

PLATFORM_HOST = {
    "Facebook": ["facebook.com", "fb.watch"],
    "Reddit": ["reddit.com", "redd.it"],
    "Twitter": ["twitter.com"],
    "YouTube": ["youtube.com", "youtu.be"],
    "BitChute": ["bitchute.com"],
    "Gab": ["gab.com"],
    "Parler": ["parler.com"],
    "Scored": ["scored.co", "communities.win"],
    "Voat": ["voat.co"],
}

# domain, bias, questionable, factuality
CATALOG = [
    ("cnn.com", "left-center", 0, "mixed"),
    ("nytimes.com", "left-center", 0, "high"),
    ("washingtonpost.com", "left-center", 0, "high"),
    ("politico.com", "left-center", 0, "high"),
    ("nbcnews.com", "left-center", 0, "high"),
    ("apnews.com", "left-center", 0, "high"),
    ("theguardian.com", "left-center", 0, "high"),
    ("businessinsider.com", "left-center", 0, "high"),
    ("cnbc.com", "left-center", 0, "high"),
    ("cbsnews.com", "left-center", 0, "high"),
    ("pbs.org", "left-center", 0, "high"),
    ("yahoo.com", "left-center", 0, "mixed"),
    ("msn.com", "left-center", 0, "high"),
    ("bbc.co.uk", "left-center", 0, "high"),
    ("npr.org", "left-center", 0, "high"),
    ("msnbc.com", "left", 0, "mixed"),
    ("rawstory.com", "left", 0, "mixed"),
    ("huffpost.com", "left", 0, "mixed"),
    ("motherjones.com", "left", 0, "high"),
    ("tyt.com", "left", 0, "mixed"),
    ("democracynow.org", "left", 0, "high"),
    ("wsws.org", "extreme-left", 0, "mixed"),
    ("revcom.us", "extreme-left", 1, "low"),
    ("thehill.com", "least-biased", 0, "high"),
    ("reuters.com", "least-biased", 0, "very-high"),
    ("axios.com", "least-biased", 0, "high"),
    ("c-span.org", "least-biased", 0, "very-high"),
    ("nypost.com", "right-center", 0, "mixed"),
    ("foxbusiness.com", "right-center", 0, "mixed"),
    ("wsj.com", "right-center", 0, "high"),
    ("forbes.com", "right-center", 0, "mixed"),
    ("rt.com", "right-center", 1, "low"),
    ("foxnews.com", "right", 1, "mixed"),
    ("breitbart.com", "right", 1, "low"),
    ("dailywire.com", "right", 0, "mixed"),
    ("dailycaller.com", "right", 0, "mixed"),
    ("zerohedge.com", "right", 0, "conspiracy/pseudoscience"),
    ("theepochtimes.com", "right", 1, "mixed"),
    ("newsmax.com", "right", 1, "mixed"),
    ("townhall.com", "right", 1, "mixed"),
    ("washingtonexaminer.com", "right", 1, "mixed"),
    ("dailymail.co.uk", "right", 1, "low"),
    ("timcast.com", "right", 0, "mixed"),
    ("rebelnews.com", "right", 1, "low"),
    ("banned.video", "right", 1, "very-low"),
    ("thegatewaypundit.com", "extreme-right", 1, "very-low"),
    ("infowars.com", "extreme-right", 0, "conspiracy/pseudoscience"),
    ("westernjournal.com", "extreme-right", 1, "low"),
    ("justthenews.com", "extreme-right", 1, "mixed"),
    ("gnews.org", "extreme-right", 1, "very-low"),
    ("turleytalks.com", "extreme-right", 1, "low"),
    ("bigleaguepolitics.com", "extreme-right", 1, "low"),
]

# Rows that exercise catalog normalization and duplicate handling.
CATALOG_EXTRA = [
    ("WWW.Reuters.com", "least-biased", 0, "very-high"),  # duplicate after normalization
    ("news.yahoo.com", "left", 0, "mixed"),               # duplicate of yahoo.com
]

OVERRIDES = [
    ("patriots.win", "extreme-right", 1, "low",
     "reconstructed: top Scored domain, flagged questionable"),
    ("maga.gg", "right", 1, "low",
     "reconstructed: right-biased forum absent from catalog"),
    ("libertyclassroom.com", "right", 1, "low",
     "reconstructed: frequent BitChute destination"),
]

UNREPORTED = [
    "tv9hindi.com", "france24.com", "tuttletwins.com", "martinbrodel1776.com",
    "petelive.tv", "counterglobalist.com", "patriotpulse-news.net",
    "freedomwire.org", "truthcaucus.net", "eaglebulletin.com",
    "localnewsdaily.com", "substack.com", "medium.com", "blogspot.com",
    "wordpress.com", "realnewsfeed.net", "thenationalpulse.com",
    "ourcountrytoday.org", "heartlandsignal.net", "commonsenseview.net",
]

EXCLUDED = ["paypal.com", "spotify.com", "vimeo.com", "amazon.com",
            "instagram.com", "google.com", "nasa.gov", "patreon.com"]

BIAS_OF = {d: b for d, b, _, _ in CATALOG}
BIAS_OF.update({d: b for d, b, _, _, _ in OVERRIDES})
BY_BIAS = {}
for d, b in BIAS_OF.items():
    BY_BIAS.setdefault(b, []).append(d)
for b in BY_BIAS:
    BY_BIAS[b].sort()


def zipf_weights(items, s, rng):
    order = list(items)
    rng.shuffle(order)
    return {d: 1.0 / (r + 1) ** s for r, d in enumerate(order)}


class Profile:
    """Per-platform domain-choice model for one user type."""

    def __init__(self, weights, mix=None, signature=None):
        self.weights = dict(weights)
        self.mix = dict(mix or {})
        self.signature = set(signature or ())
        self._pure = {}
        total = sum(weights.values())
        self.domains = sorted(weights)
        self.cum = []
        acc = 0.0
        for d in self.domains:
            acc += weights[d] / total
            self.cum.append(acc)

    def draw(self, rng):
        u = rng.random()
        lo, hi = 0, len(self.cum) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if self.cum[mid] < u:
                lo = mid + 1
            else:
                hi = mid
        return self.domains[lo]

    def main_category(self, rng):
        cats = sorted(self.mix)
        return choose(rng, [(self.mix[c], c) for c in cats])

    def pure(self, category):
        """Same model with every labeled link drawn from one bias category.

        Unreported and signature domains keep their weights; the category's
        domains absorb the weight of all other labeled domains.
        """
        if category not in self._pure:
            fixed = set(UNREPORTED) | self.signature
            labeled = sum(w for d, w in self.weights.items() if d not in fixed)
            in_cat = sum(w for d, w in self.weights.items()
                         if d not in fixed and d in BY_BIAS[category])
            out = {}
            for d, w in self.weights.items():
                if d in fixed:
                    out[d] = w
                elif d in BY_BIAS[category]:
                    out[d] = w * labeled / in_cat
            self._pure[category] = Profile(out)
        return self._pure[category]


def leaning_profile(rng, mix, unreported_share, signature=None):
    """mix: bias -> total weight; signature: domain -> extra weight."""
    weights = {}
    for bias, w in mix.items():
        doms = BY_BIAS[bias]
        zw = zipf_weights(doms, 1.1, rng)
        tot = sum(zw.values())
        for d, x in zw.items():
            weights[d] = weights.get(d, 0.0) + w * x / tot
    if unreported_share > 0:
        zw = zipf_weights(UNREPORTED, 1.0, rng)
        tot = sum(zw.values())
        labeled = sum(weights.values())
        scale = labeled * unreported_share / (1 - unreported_share)
        for d, x in zw.items():
            weights[d] = weights.get(d, 0.0) + scale * x / tot
    if signature:
        for d, w in signature.items():
            weights[d] = weights.get(d, 0.0) + w * sum(weights.values())
    return Profile(weights, mix, signature)


LEFT = {"left": 0.35, "left-center": 0.6, "least-biased": 0.05}
CENTER_LEFT = {"left-center": 0.7, "least-biased": 0.2, "left": 0.1}
RIGHT = {"right": 0.6, "extreme-right": 0.3, "right-center": 0.1}
FAR_RIGHT = {"extreme-right": 0.55, "right": 0.45}
MIXED = {"left": 0.15, "left-center": 0.35, "least-biased": 0.1,
         "right-center": 0.15, "right": 0.25}

# Relative link propensities between platforms (row = source). Values are
# spread over two orders of magnitude so the rescaled matrix has a stable
# ranking; Gab<->BitChute are deliberately inflated.
CROSS = {
    "Facebook": {"YouTube": 8, "Twitter": 5, "Reddit": 0.6, "BitChute": 0.3, "Gab": 0.15, "Parler": 0.4, "Scored": 0.05, "Voat": 0.05},
    "Reddit": {"YouTube": 6, "Twitter": 4, "Facebook": 1.2, "BitChute": 0.1, "Gab": 0.2, "Parler": 0.1, "Scored": 0.05, "Voat": 0.5},
    "Twitter": {"YouTube": 7, "Facebook": 3, "Reddit": 0.8, "BitChute": 0.4, "Gab": 0.1, "Parler": 1.0, "Scored": 0.05, "Voat": 0.05},
    "YouTube": {"Twitter": 6, "Facebook": 5, "Reddit": 0.3, "BitChute": 0.9, "Gab": 0.3, "Parler": 0.6, "Scored": 0.05, "Voat": 0.1},
    "BitChute": {"Gab": 9, "YouTube": 3, "Twitter": 2, "Facebook": 1.5, "Parler": 1.2, "Reddit": 0.1, "Scored": 0.3, "Voat": 0.4},
    "Gab": {"BitChute": 8, "YouTube": 6, "Twitter": 3, "Reddit": 1.4, "Parler": 1.0, "Facebook": 0.6, "Scored": 0.4, "Voat": 0.5},
    "Parler": {"YouTube": 7, "Twitter": 4, "Facebook": 2, "BitChute": 1.2, "Gab": 0.5, "Reddit": 0.2, "Scored": 0.2, "Voat": 0.05},
    "Scored": {"YouTube": 6, "Twitter": 4, "BitChute": 1.6, "Gab": 1.2, "Reddit": 0.5, "Facebook": 0.3, "Parler": 0.6, "Voat": 0.2},
    "Voat": {"YouTube": 6, "BitChute": 1.6, "Twitter": 2, "Reddit": 1.5, "Gab": 1.0, "Facebook": 0.2, "Parler": 0.3, "Scored": 0.1},
}

# records, users, cross-link probability, user types
SETUP = {
    "Facebook": (8000, 140, 0.24),
    "Reddit": (5000, 100, 0.20),
    "Twitter": (9000, 170, 0.22),
    "YouTube": (4500, 36, 0.32),
    "BitChute": (3500, 40, 0.40),
    "Gab": (6000, 110, 0.34),
    "Parler": (6000, 110, 0.24),
    "Scored": (5000, 90, 0.16),
    "Voat": (4000, 70, 0.20),
}

# Share of users whose labeled links all come from one bias category.
PURE_USERS = 0.85


def build_types(rng):
    t = {}
    t["Facebook"] = [(0.5, leaning_profile(rng, LEFT, 0.25)),
                     (0.5, leaning_profile(rng, RIGHT, 0.25))]
    t["Twitter"] = [(0.55, leaning_profile(rng, LEFT, 0.2)),
                    (0.45, leaning_profile(rng, RIGHT, 0.2))]
    t["Reddit"] = [(0.85, leaning_profile(rng, CENTER_LEFT, 0.15)),
                   (0.15, leaning_profile(rng, LEFT, 0.15))]
    t["YouTube"] = [(1.0, leaning_profile(rng, MIXED, 0.4))]
    t["BitChute"] = [(1.0, leaning_profile(rng, FAR_RIGHT, 0.45,
                                           {"libertyclassroom.com": 0.05}))]
    t["Gab"] = [(1.0, leaning_profile(rng, FAR_RIGHT, 0.3))]
    t["Parler"] = [(1.0, leaning_profile(rng, RIGHT, 0.3))]
    t["Scored"] = [(1.0, leaning_profile(rng, RIGHT, 0.2,
                                         {"patriots.win": 1.55, "maga.gg": 0.03}))]
    t["Voat"] = [(0.75, leaning_profile(rng, FAR_RIGHT, 0.25)),
                 (0.25, leaning_profile(rng, CENTER_LEFT, 0.25))]
    return t


START = datetime(2020, 1, 1, tzinfo=timezone.utc)
YEAR_SECONDS = 366 * 86400

KEYWORD_TEXT = {
    "Facebook": ["Trump rally tonight", "#DonaldTrump speaks", "Biden town hall", "#JoeBiden campaign update"],
    "Twitter": ["Trump says", "Biden responds", "trump and biden debate", "BIDEN leads poll"],
    "YouTube": ["Trump interview", "Biden speech full", "#trump highlights", "#biden live"],
    "BitChute": ["trump2020 rally", "biden2020 exposed", "Donald speaks", "joebiden scandal"],
    "Gab": ["trump wins", "biden lies", "Trump!", "Biden?"],
    "Parler": ["Trump2020 all the way", "donaldtrump live", "biden", "Donald Trump"],
}
OFFTOPIC_TEXT = ["trumpet solo tonight", "great recipe", "bidenomics? no, cooking", "weather is nice", "my cat"]
COMMUNITIES_OFF = {"Voat": ["aww", "gaming", "music"], "Scored": ["FatPeopleHate", "funny"], "Reddit": ["aww", "pics"]}


def read_lines(name):
    with open(os.path.join(ROOT, "data", name)) as f:
        return [l.strip() for l in f if l.strip()]


def url_for(rng, domain):
    """Render a URL with realistic noise around the registrable domain."""
    sub = rng.random()
    host = domain
    if sub < 0.35:
        host = "www." + domain
    elif sub < 0.40 and domain in ("yahoo.com", "bbc.co.uk", "cnn.com"):
        host = {"yahoo.com": "news.yahoo.com", "bbc.co.uk": "news.bbc.co.uk",
                "cnn.com": "edition.cnn.com"}[domain]
    if rng.random() < 0.05:
        host = host.upper()
    scheme = "https" if rng.random() < 0.85 else "http"
    port = ":443" if rng.random() < 0.02 else ""
    path = "/%d/%02d/story-%d" % (2020, rng.randint(1, 12), rng.randint(1, 99999))
    frag = "#comments" if rng.random() < 0.03 else ""
    query = "?utm_source=share" if rng.random() < 0.1 else ""
    return "%s://%s%s%s%s%s" % (scheme, host, port, path, query, frag)


SHORT_FOR = {"foxnews.com": "fxn.ws", "nytimes.com": "nyti.ms", "cnn.com": "cnn.it",
             "washingtonpost.com": "wapo.st"}


def make_url(rng, domain):
    if domain in SHORT_FOR and rng.random() < 0.1:
        return "https://%s/%s" % (SHORT_FOR[domain], "".join(rng.choice("abcdefghijk") for _ in range(6)))
    return url_for(rng, domain)


def platform_url(rng, target):
    host = rng.choice(PLATFORM_HOST[target])
    prefix = "www." if rng.random() < 0.3 and "." in host and host.count(".") == 1 else ""
    return "https://%s%s/p/%d" % (prefix, host, rng.randint(1, 10**6))


def noise_url(rng, platform):
    r = rng.random()
    if r < 0.35:
        return url_for(rng, rng.choice(EXCLUDED))
    if r < 0.55:
        return platform_url(rng, platform)  # self-link
    if r < 0.65:
        return "http://%d.%d.%d.%d/feed" % tuple(rng.randint(1, 254) for _ in range(4))
    if r < 0.72:
        return "https://bit.ly/" + "".join(rng.choice("XYZxyz019") for _ in range(7))
    if r < 0.77:
        return "https://co.uk/landing"
    return url_for(rng, rng.choice(UNREPORTED))


def choose(rng, weighted):
    total = sum(w for w, _ in weighted)
    u = rng.random() * total
    for w, x in weighted:
        u -= w
        if u <= 0:
            return x
    return weighted[-1][1]


def decorate(rng, url):
    """Embed a URL in text with trailing punctuation noise."""
    r = rng.random()
    if r < 0.1:
        return "(" + url + ")"
    if r < 0.2:
        return url + "."
    if r < 0.25:
        return url + ","
    return url


def generate():
    rng = random.Random(SEED)
    types = build_types(rng)
    scored_comms = read_lines("communities_scored.txt")
    voat_comms = read_lines("communities_voat.txt")
    records = {}
    manifest = {"seed": SEED, "platforms": {}}
    for p in PLATFORMS:
        n_rec, n_users, p_cross = SETUP[p]
        users = ["%s_u%04d" % (p[:2].lower(), i) for i in range(n_users)]
        activity = [rng.lognormvariate(0, 0.5) for _ in users]
        user_type = {}
        for u in users:
            prof = choose(rng, types[p])
            if rng.random() < PURE_USERS:
                prof = prof.pure(prof.main_category(rng))
            user_type[u] = prof
        targets = [(w, t) for t, w in CROSS[p].items()]
        rows = []
        for _ in range(n_rec):
            u = choose(rng, list(zip(activity, users)))
            ts = START + timedelta(seconds=rng.randrange(YEAR_SECONDS))
            n_urls = 1 if rng.random() < 0.85 else 2
            urls = []
            for _k in range(n_urls):
                r = rng.random()
                if r < p_cross:
                    urls.append(platform_url(rng, choose(rng, targets)))
                elif r < p_cross + 0.04:
                    urls.append(noise_url(rng, p))
                else:
                    urls.append(make_url(rng, user_type[u].draw(rng)))
            on_topic = rng.random() >= 0.06
            community = None
            if p == "Scored":
                community = rng.choice(scored_comms) if on_topic else rng.choice(COMMUNITIES_OFF[p])
            elif p == "Voat":
                community = rng.choice(voat_comms) if on_topic else rng.choice(COMMUNITIES_OFF[p])
            elif p == "Reddit":
                community = "politics" if on_topic else rng.choice(COMMUNITIES_OFF[p])
            if p in KEYWORD_TEXT:
                text = rng.choice(KEYWORD_TEXT[p]) if on_topic else rng.choice(OFFTOPIC_TEXT)
            else:
                text = rng.choice(["Breaking", "Read this", "Must see", "Wow", "Thread"])
            rows.append({"user": u, "ts": ts, "text": text, "urls": urls,
                         "community": community})
        records[p] = rows
    return records, manifest


def iso(ts):
    return ts.strftime("%Y-%m-%dT%H:%M:%SZ")


def epoch(ts):
    return int(ts.timestamp())


def dump(records, manifest):
    rng = random.Random(SEED + 1)
    raw = os.path.join(OUT, "raw")
    os.makedirs(raw, exist_ok=True)
    files = {}

    def csv_text(header, rows, delim=","):
        buf = io.StringIO()
        w = csv.writer(buf, delimiter=delim, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(r)
        return buf.getvalue()

    def inject_malformed(lines, count, bad):
        for _ in range(count):
            pos = rng.randrange(1, len(lines) + 1)
            lines.insert(pos, bad[rng.randrange(len(bad))])
        return lines

    # Facebook: CSV, url in dedicated column, title + message
    rows = []
    for r in records["Facebook"]:
        text = " ".join(decorate(rng, u) for u in r["urls"][1:])
        rows.append([r["user"], iso(r["ts"]), (r["text"] + " " + text).strip(), "", r["urls"][0]])
    body = csv_text(["account_id", "created", "message", "title", "link"], rows).splitlines()
    body = [body[0]] + inject_malformed(body[1:], 40, ['fb_bad,"unterminated', "x,not-a-date,msg,,https://cnn.com/a"])
    files["Facebook"] = ("facebook.csv", "\n".join(body) + "\n", len(records["Facebook"]), 40)

    # Twitter: JSONL with nested user and entity urls, epoch timestamps
    lines = []
    for i, r in enumerate(records["Twitter"]):
        obj = {"id_str": str(10**15 + i), "created_at": epoch(r["ts"]),
               "user": {"id_str": r["user"], "lang": "en"},
               "full_text": r["text"],
               "entities": {"urls": [{"expanded_url": u} for u in r["urls"]]}}
        lines.append(json.dumps(obj, sort_keys=True))
    lines = inject_malformed(lines, 60, ['{"id_str": "1", "created_at": ', "null", '{"user": {}}'])
    files["Twitter"] = ("twitter.jsonl", "\n".join(lines) + "\n", len(records["Twitter"]), 60)

    # Reddit: pushshift-like JSONL
    lines = []
    for r in records["Reddit"]:
        obj = {"author": r["user"], "created_utc": epoch(r["ts"]), "title": r["text"],
               "selftext": " ".join(decorate(rng, u) for u in r["urls"][1:]),
               "subreddit": r["community"], "url": r["urls"][0]}
        lines.append(json.dumps(obj, sort_keys=True))
    lines = inject_malformed(lines, 25, ["{broken json", '{"author": "x"}'])
    files["Reddit"] = ("reddit.jsonl", "\n".join(lines) + "\n", len(records["Reddit"]), 25)

    # YouTube: CSV, URLs extracted from description
    rows = []
    for r in records["YouTube"]:
        desc = "Links: " + " ".join(decorate(rng, u) for u in r["urls"])
        rows.append([r["user"], iso(r["ts"]), r["text"], desc])
    body = csv_text(["channel_id", "published_at", "title", "description"], rows).splitlines()
    body = [body[0]] + inject_malformed(body[1:], 15, ["only,three,fields"])
    files["YouTube"] = ("youtube.csv", "\n".join(body) + "\n", len(records["YouTube"]), 15)

    # BitChute: TSV with space-separated timestamp
    rows = []
    for r in records["BitChute"]:
        desc = " ".join(decorate(rng, u) for u in r["urls"])
        rows.append([r["user"], r["ts"].strftime("%Y-%m-%d %H:%M:%S"), r["text"], desc])
    body = csv_text(["channel", "date", "title", "description"], rows, "\t").splitlines()
    body = [body[0]] + inject_malformed(body[1:], 12, ["bc_bad\t2020-13-45 99:00:00\tt\td"])
    files["BitChute"] = ("bitchute.tsv", "\n".join(body) + "\n", len(records["BitChute"]), 12)

    # Gab: JSONL, URLs in content text
    lines = []
    for r in records["Gab"]:
        content = r["text"] + " " + " ".join(decorate(rng, u) for u in r["urls"])
        obj = {"account": {"username": r["user"]}, "created_at": iso(r["ts"]), "content": content}
        lines.append(json.dumps(obj, sort_keys=True))
    lines = inject_malformed(lines, 30, ['{"account": ', '{"account": {"username": "g"}, "created_at": "yesterday", "content": "trump"}'])
    files["Gab"] = ("gab.jsonl", "\n".join(lines) + "\n", len(records["Gab"]), 30)

    # Parler: JSONL, ISO timestamps with offset
    lines = []
    for r in records["Parler"]:
        body_text = r["text"] + " " + " ".join(decorate(rng, u) for u in r["urls"])
        local = r["ts"].astimezone(timezone(timedelta(hours=-5)))
        obj = {"creator": r["user"], "createdAt": local.isoformat(), "body": body_text}
        lines.append(json.dumps(obj, sort_keys=True))
    lines = inject_malformed(lines, 30, ["[]", '{"creator": "p"'])
    files["Parler"] = ("parler.jsonl", "\n".join(lines) + "\n", len(records["Parler"]), 30)

    # Scored: JSONL submissions with community and link
    lines = []
    for r in records["Scored"]:
        obj = {"author": r["user"], "created": epoch(r["ts"]), "title": r["text"],
               "community": r["community"], "link": r["urls"][0],
               "content": " ".join(decorate(rng, u) for u in r["urls"][1:])}
        lines.append(json.dumps(obj, sort_keys=True))
    lines = inject_malformed(lines, 25, ["{", '"just a string"'])
    files["Scored"] = ("scored.jsonl", "\n".join(lines) + "\n", len(records["Scored"]), 25)

    # Voat: CSV with subverse
    rows = []
    for r in records["Voat"]:
        rows.append([r["user"], iso(r["ts"]), r["community"], r["text"],
                     " ".join(decorate(rng, u) for u in r["urls"][1:]), r["urls"][0]])
    body = csv_text(["user", "date", "subverse", "title", "body", "link"], rows).splitlines()
    body = [body[0]] + inject_malformed(body[1:], 20, ["v,2020-02-30T00:00:00Z,news,t,b,https://x.com"])
    files["Voat"] = ("voat.csv", "\n".join(body) + "\n", len(records["Voat"]), 20)

    for p, (name, content, n_ok, n_bad) in files.items():
        with open(os.path.join(raw, name), "w", newline="") as f:
            f.write(content)
        manifest["platforms"][p] = {"file": "raw/" + name, "records": n_ok, "malformed": n_bad}

    with open(os.path.join(OUT, "catalog.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["domain", "bias", "questionable", "factuality"])
        for row in CATALOG + CATALOG_EXTRA:
            w.writerow(row)
    with open(os.path.join(OUT, "overrides.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["domain", "bias", "questionable", "factuality", "note"])
        for row in OVERRIDES:
            w.writerow(row)
    with open(os.path.join(OUT, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")


ADAPTERS = {
    "facebook_csv": {"format": "csv", "user": "account_id", "timestamp": "created",
                     "timestamp_format": "iso8601", "text": ["message", "title"],
                     "urls": "link", "extract_urls_from_text": True},
    "twitter_jsonl": {"format": "jsonl", "user": "user.id_str", "timestamp": "created_at",
                      "timestamp_format": "epoch", "text": ["full_text"],
                      "urls": "entities.urls[].expanded_url", "extract_urls_from_text": False},
    "reddit_jsonl": {"format": "jsonl", "user": "author", "timestamp": "created_utc",
                     "timestamp_format": "epoch", "text": ["title", "selftext"],
                     "community": "subreddit", "urls": "url", "extract_urls_from_text": True},
    "youtube_csv": {"format": "csv", "user": "channel_id", "timestamp": "published_at",
                    "timestamp_format": "iso8601", "text": ["title", "description"],
                    "extract_urls_from_text": True},
    "bitchute_tsv": {"format": "tsv", "user": "channel", "timestamp": "date",
                     "timestamp_format": "iso8601", "text": ["title", "description"],
                     "extract_urls_from_text": True},
    "gab_jsonl": {"format": "jsonl", "user": "account.username", "timestamp": "created_at",
                  "timestamp_format": "iso8601", "text": ["content"],
                  "extract_urls_from_text": True},
    "parler_jsonl": {"format": "jsonl", "user": "creator", "timestamp": "createdAt",
                     "timestamp_format": "iso8601", "text": ["body"],
                     "extract_urls_from_text": True},
    "scored_jsonl": {"format": "jsonl", "user": "author", "timestamp": "created",
                     "timestamp_format": "epoch", "text": ["title", "content"],
                     "community": "community", "urls": "link", "extract_urls_from_text": True},
    "voat_csv": {"format": "csv", "user": "user", "timestamp": "date",
                 "timestamp_format": "iso8601", "text": ["title", "body"],
                 "community": "subverse", "urls": "link", "extract_urls_from_text": True},
}

PLATFORM_CONF = [
    ("Facebook", "facebook.csv", "facebook_csv", {"keyword_set": "candidate_lists_l1_l2"}),
    ("Reddit", "reddit.jsonl", "reddit_jsonl", {"communities": ["politics"]}),
    ("Twitter", "twitter.jsonl", "twitter_jsonl", {"keyword_set": "candidate_names"}),
    ("YouTube", "youtube.csv", "youtube_csv", {"keyword_set": "candidate_lists_l1_l2"}),
    ("BitChute", "bitchute.tsv", "bitchute_tsv", {"keyword_set": "fringe_extended"}),
    ("Gab", "gab.jsonl", "gab_jsonl", {"keyword_set": "candidate_names"}),
    ("Parler", "parler.jsonl", "parler_jsonl", {"keyword_set": "fringe_extended"}),
    ("Scored", "scored.jsonl", "scored_jsonl", {"communities_file": "../../../data/communities_scored.txt"}),
    ("Voat", "voat.csv", "voat_csv", {"communities_file": "../../../data/communities_voat.txt"}),
]


def write_configs():
    base = {
        "adapters": ADAPTERS,
        "platforms": [],
        "catalog": "catalog.csv",
        "overrides": "overrides.csv",
        "catalog_version": "synthetic-2024-10",
        "data": {
            "public_suffix_list": "../../../data/public_suffix_list.dat",
            "platform_domains": "../../../data/platform_domains.txt",
            "shorteners": "../../../data/shorteners.txt",
            "exclusions": "../../../data/exclusions.txt",
            "keyword_sets": "../../../data/keywords.json",
        },
        "analysis": {
            "exclude_extreme_left": True,
            "q_denominator": "labeled",
            "similarity_k": 20,
            "k_values": [10, 20, 30, 50],
            "support_mode": "pair-union",
            "min_urls": 10,
            "bins": 40,
            "variance_bins": 20,
            "pagerank": {"damping": 0.85, "tol": 1e-12, "max_iter": 10000},
            "monte_carlo": {"samples": 2000, "seed": 42},
            "patriots_win_as_scored": False,
            "max_malformed_fraction": 0.5,
        },
        "output_dir": "out/full",
    }
    for pid, fname, adapter, filt in PLATFORM_CONF:
        entry = {"id": pid, "files": ["raw/" + fname], "adapter": adapter}
        entry.update(filt)
        base["platforms"].append(entry)
    with open(os.path.join(OUT, "config.json"), "w") as f:
        json.dump(base, f, indent=2)
        f.write("\n")
    windowed = json.loads(json.dumps(base))
    windowed["time_window"] = {"start": "2020-04-01T00:00:00Z", "end": "2020-09-30T23:59:59Z"}
    windowed["output_dir"] = "out/window"
    with open(os.path.join(OUT, "config_window.json"), "w") as f:
        json.dump(windowed, f, indent=2)
        f.write("\n")


def main():
    records, manifest = generate()
    dump(records, manifest)
    write_configs()
    total = sum(len(v) for v in records.values())
    print("wrote %d records to %s" % (total, OUT), file=sys.stderr)


if __name__ == "__main__":
    main()
