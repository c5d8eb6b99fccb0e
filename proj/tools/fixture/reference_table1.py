#!/usr/bin/env python3
"""Brute-force reference for the dataset-statistics table.

This script recomputes the per-platform table (N, n_u, n_d, PR, q, sigma2)
straight from a run config and the raw dumps it names, without sharing any
code with the C++ pipeline. Every stage is written in the most direct way
possible: linear scans over suffix rules, dictionaries for counting, and a
dense linear solve for PageRank.

Usage: reference_table1.py CONFIG [--out FILE] [--window START..END]
"""

import argparse
import csv
import fnmatch
import json
import os
import re
import sys
from datetime import datetime, timezone

import numpy as np

SCORES = {"extreme-left": -1.0, "left": -0.66, "left-center": -0.33,
          "least-biased": 0.0, "right-center": 0.33, "right": 0.66,
          "extreme-right": 1.0}


def load_rules(path):
    rules = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("//"):
                continue
            rules.append(line.split()[0])
    return rules


def rule_matches(rule, labels):
    """True iff `rule` (without '!') matches the right end of `labels`."""
    rl = rule.split(".")
    if len(rl) > len(labels):
        return False
    tail = labels[len(labels) - len(rl):]
    return all(r == "*" or r == l for r, l in zip(rl, tail))


def public_suffix_length(rules, host):
    labels = host.split(".")
    best = None
    exception = None
    for rule in rules:
        if rule.startswith("!"):
            if rule_matches(rule[1:], labels):
                n = len(rule[1:].split("."))
                if exception is None or n > exception:
                    exception = n
        elif rule_matches(rule, labels):
            n = len(rule.split("."))
            if best is None or n > best:
                best = n
    if exception is not None:
        return exception - 1
    if best is None:
        return 1
    return best


IPV4 = re.compile(r"^\d+(\.\d+){3}$")


def registrable(rules, host, cache):
    if host in cache:
        return cache[host]
    if IPV4.match(host) or host.startswith("["):
        cache[host] = None
        return None
    n = public_suffix_length(rules, host)
    labels = host.split(".")
    out = None if len(labels) <= n else ".".join(labels[-(n + 1):])
    cache[host] = out
    return out


def load_table(path):
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            out.append((parts[0].strip(), parts[1].strip()))
    return out


URL_RE = re.compile(r"https?://[^\s<>\"'`]+", re.IGNORECASE)


def extract(text):
    out = []
    for m in URL_RE.finditer(text):
        u = m.group(0)
        while True:
            if u and u[-1] in ".,;:!?":
                u = u[:-1]
                continue
            pairs = {")": "(", "]": "[", "}": "{"}
            if u and u[-1] in pairs and u.count(pairs[u[-1]]) < u.count(u[-1]):
                u = u[:-1]
                continue
            break
        if re.match(r"(?i)^https?://.+", u):
            out.append(u)
    return out


HOST_OK = re.compile(r"^[a-z0-9_-]+(\.[a-z0-9_-]+)+$")


def normalize_host(raw, shorteners):
    """Returns (host, unexpanded) or None when unparseable."""
    s = raw.strip()
    m = re.match(r"^([A-Za-z][A-Za-z0-9+.\-]*)://(.*)$", s)
    if m:
        if m.group(1).lower() not in ("http", "https"):
            return None
        rest = m.group(2)
    else:
        rest = s
    authority = re.split(r"[/?#]", rest, maxsplit=1)[0]
    if "@" in authority:
        authority = authority.rsplit("@", 1)[1]
    if authority.startswith("["):
        return (authority.lower(), False) if authority.endswith("]") else None
    if ":" in authority:
        authority, port = authority.rsplit(":", 1)
        if port and not port.isdigit():
            return None
    host = authority.lower().rstrip(".")
    if not HOST_OK.match(host):
        return None
    if host.startswith("www.") and "." in host[4:]:
        host = host[4:]
    unexpanded = False
    if host in shorteners:
        if shorteners[host] == "-":
            unexpanded = True
        else:
            host = shorteners[host]
    return host, unexpanded


def parse_ts(value, fmt):
    if value is None:
        raise ValueError("missing")
    if fmt == "epoch":
        if isinstance(value, bool):
            raise ValueError("bool")
        return int(float(value))
    s = str(value).strip()
    if s.endswith("Z"):
        s = s[:-1] + "+00:00"
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp() // 1)


def get_path(obj, path):
    """Dotted path with optional trailing [] on a segment (maps arrays)."""
    if path is None:
        return None
    cur = [obj]
    is_list = False
    for seg in path.split("."):
        nxt = []
        arr = seg.endswith("[]")
        key = seg[:-2] if arr else seg
        for c in cur:
            if not isinstance(c, dict) or key not in c:
                continue
            v = c[key]
            if arr:
                if isinstance(v, list):
                    nxt.extend(v)
                    is_list = True
            else:
                nxt.append(v)
        cur = nxt
    if is_list:
        return cur
    return cur[0] if cur else None


WORD = re.compile(r"[0-9A-Za-z_\u0080-\U0010ffff]+")


def tokens(text):
    out = set()
    for m in WORD.finditer(text):
        tok = "".join(c.lower() if ord(c) < 128 else c for c in m.group(0))
        out.add(tok)
        if m.start() > 0 and text[m.start() - 1] == "#":
            out.add("#" + tok)
    return out


def keyword_hit(text, keywords):
    if not text:
        return False
    toks = tokens(text)
    return any(k in toks for k in keywords)


def read_records(path, adapter):
    fmt = adapter["format"]
    out = []
    with open(path, encoding="utf-8") as f:
        lines = f.read().split("\n")
    if fmt in ("csv", "tsv"):
        delim = "," if fmt == "csv" else "\t"
        header = None
        for line in lines:
            if not line.strip():
                continue
            try:
                row = next(csv.reader([line], delimiter=delim, strict=True))
            except (csv.Error, StopIteration):
                row = None
            if header is None:
                header = row
                continue
            if row is None or len(row) != len(header):
                continue
            out.append(dict(zip(header, row)))
    else:
        for line in lines:
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except ValueError:
                continue
            if isinstance(obj, dict):
                out.append(obj)
    records = []
    for obj in out:
        user = get_path(obj, adapter["user"])
        if user is None or user == "" or isinstance(user, (dict, list)):
            continue
        try:
            ts = parse_ts(get_path(obj, adapter["timestamp"]), adapter["timestamp_format"])
        except (ValueError, TypeError, OverflowError):
            continue
        parts = []
        for fld in adapter.get("text", []):
            v = get_path(obj, fld)
            if isinstance(v, str) and v != "":
                parts.append(v)
        text = " ".join(parts)
        community = get_path(obj, adapter["community"]) if adapter.get("community") else None
        urls = []
        if adapter.get("urls"):
            v = get_path(obj, adapter["urls"])
            if isinstance(v, list):
                urls.extend(x.strip() for x in v if isinstance(x, str) and x.strip())
            elif isinstance(v, str) and v.strip():
                urls.append(v.strip())
        if adapter.get("extract_urls_from_text", True):
            urls.extend(extract(text))
        records.append({"user": str(user), "ts": ts, "text": text,
                        "community": community, "urls": urls})
    return records


def load_catalog(path, override_path, rules, cache):
    labels = {}

    def norm_domain(d):
        h = normalize_host(d, {})
        if h is None:
            return None
        return registrable(rules, h[0], cache)

    def row_label(row):
        q = row["questionable"].strip().lower() in ("1", "true", "yes")
        if row.get("factuality", "").strip().lower() == "conspiracy/pseudoscience":
            q = True
        return row["bias"].strip().lower(), q

    with open(path, encoding="utf-8") as f:
        for row in csv.DictReader(f):
            d = norm_domain(row["domain"])
            if d is None or d in labels:
                continue
            labels[d] = row_label(row)
    if override_path:
        seen = set()
        with open(override_path, encoding="utf-8") as f:
            for row in csv.DictReader(f):
                d = norm_domain(row["domain"])
                if d is None or d in seen:
                    continue
                seen.add(d)
                labels[d] = row_label(row)
    return labels


def pagerank_dense(R, damping):
    n = R.shape[0]
    M = np.zeros((n, n))
    for i in range(n):
        s = R[i].sum()
        if s > 0:
            M[:, i] = R[i] / s
        else:
            M[:, i] = 1.0 / n
    A = np.eye(n) - damping * M
    b = np.full(n, (1 - damping) / n)
    x = np.linalg.solve(A, b)
    return x / x.sum()


def collect(config_path):
    """Runs ingestion and returns (cfg, platform ids, kept links, catalog)."""
    base = os.path.dirname(os.path.abspath(config_path))
    with open(config_path) as f:
        cfg = json.load(f)

    def p(rel):
        return os.path.normpath(os.path.join(base, rel))

    data = cfg["data"]
    rules = load_rules(p(data["public_suffix_list"]))
    cache = {}
    aliases = load_table(p(data["platform_domains"]))
    shorteners = dict(load_table(p(data["shorteners"])))
    exclusions = load_table(p(data["exclusions"]))
    with open(p(data["keyword_sets"])) as f:
        keyword_sets = json.load(f)
    analysis = cfg["analysis"]
    if analysis.get("patriots_win_as_scored"):
        aliases.append(("patriots.win", "Scored"))
    catalog = load_catalog(p(cfg["catalog"]), p(cfg["overrides"]) if cfg.get("overrides") else None,
                           rules, cache)

    window = cfg.get("time_window")
    if window:
        w0 = parse_ts(window["start"], "iso8601")
        w1 = parse_ts(window["end"], "iso8601")
    platform_ids = [pl["id"] for pl in cfg["platforms"]]

    kept = {pid: [] for pid in platform_ids}  # (user, domain, target)
    for pl in cfg["platforms"]:
        pid = pl["id"]
        adapter = cfg["adapters"][pl["adapter"]]
        keywords = None
        if "keyword_set" in pl:
            keywords = set(keyword_sets[pl["keyword_set"]])
        elif "keywords" in pl:
            keywords = set(pl["keywords"])
        allow = None
        if "communities" in pl:
            allow = set(c.lower() for c in pl["communities"])
        elif "communities_file" in pl:
            with open(p(pl["communities_file"])) as f:
                allow = set(l.strip().lower() for l in f if l.strip())
        for fname in pl["files"]:
            for rec in read_records(p(fname), adapter):
                if keywords is not None and not keyword_hit(rec["text"], keywords):
                    continue
                if window and not (w0 <= rec["ts"] <= w1):
                    continue
                if allow is not None:
                    c = rec["community"]
                    if not isinstance(c, str) or c.lower() not in allow:
                        continue
                for raw in rec["urls"]:
                    h = normalize_host(raw, shorteners)
                    if h is None:
                        continue
                    dom = registrable(rules, h[0], cache)
                    if dom is None:
                        continue
                    target = None
                    for entry, plat in aliases:
                        if "/" in entry:
                            continue
                        if entry == dom:
                            target = plat
                            break
                    dropped = False
                    for cat, pat in exclusions:
                        if pat == "@self":
                            if target == pid:
                                dropped = True
                                break
                        elif fnmatch.fnmatchcase(dom, pat):
                            dropped = True
                            break
                    if dropped:
                        continue
                    if target is not None and target not in platform_ids:
                        continue
                    kept[pid].append((rec["user"], dom, target))
    return cfg, platform_ids, kept, catalog


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("config")
    ap.add_argument("--out")
    args = ap.parse_args()
    cfg, platform_ids, kept, catalog = collect(args.config)
    analysis = cfg["analysis"]

    # platform graph and PageRank on the rescaled matrix
    n = len(platform_ids)
    idx = {pid: i for i, pid in enumerate(platform_ids)}
    W = np.zeros((n, n))
    for pid in platform_ids:
        for _, _, t in kept[pid]:
            if t is not None:
                W[idx[pid], idx[t]] += 1
    S = W.sum()
    s_out = W.sum(axis=1)
    s_in = W.sum(axis=0)
    R = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if W[i, j] > 0:
                R[i, j] = W[i, j] * S / (s_out[i] * s_in[j])
    pr = pagerank_dense(R, analysis["pagerank"]["damping"]) if S > 0 else [float("nan")] * n

    excl_el = analysis.get("exclude_extreme_left", True)
    min_urls = analysis.get("min_urls", 10)
    labeled_only = analysis.get("q_denominator", "labeled") == "labeled"
    lines = ["platform,N,n_u,n_d,PR,q,sigma2"]
    for pid in platform_ids:
        links = kept[pid]
        users = set(u for u, _, _ in links)
        domains = set(d for _, d, _ in links)
        labeled = 0
        quest = 0
        total_ext = 0
        per_user = {}
        for u, d, t in links:
            if t is not None:
                continue
            lab = catalog.get(d)
            if lab is not None and lab[0] == "extreme-left" and excl_el:
                continue
            total_ext += 1
            if lab is None:
                continue
            labeled += 1
            if lab[1]:
                quest += 1
            per_user.setdefault(u, []).append(SCORES[lab[0]])
        denom = labeled if labeled_only else total_ext
        q = "NA" if denom == 0 else "%.6f" % (quest / denom)
        xs = [sum(v) / len(v) for v in per_user.values() if len(v) >= min_urls]
        if xs:
            mean = sum(xs) / len(xs)
            sigma2 = "%.6f" % (sum((x - mean) ** 2 for x in xs) / len(xs))
        else:
            sigma2 = "NA"
        prv = pr[idx[pid]]
        prs = "NA" if prv != prv else "%.6f" % prv
        lines.append("%s,%d,%d,%d,%s,%s,%s" % (pid, len(users), len(links), len(domains), prs, q, sigma2))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
