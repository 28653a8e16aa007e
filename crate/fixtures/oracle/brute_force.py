#!/usr/bin/env python3
"""Scalar-loop reference for the fixture expectations.

Recomputes tokenization, tf-idf weights, cosine scores, URL slug mining,
query expansion and the paired t-test with plain dictionaries and loops,
sharing no code with the Rust implementation. Run from the repo root:

    python3 fixtures/oracle/brute_force.py

It rewrites fixtures/oracle/expected.json. The Rust tests compare against
that frozen file; they never call this script.
"""

import json
import math
import os
import re
import sys
from urllib.parse import urlsplit

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(os.path.dirname(HERE))

TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*")
SLUG_RE = re.compile(r"^[a-z0-9]+(?:-[a-z0-9]+)+$")
EXT_RE = re.compile(r"^(.*)\.[A-Za-z0-9]{1,5}$")


def load_lines(path):
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            out.append(line)
    return out


def tokenize(text, stopwords):
    # Fixture text is ASCII, so the regex word class matches the Rust rule.
    out = []
    for m in TOKEN_RE.finditer(text.lower()):
        tok = m.group(0)
        if tok in stopwords:
            continue
        out.append(tok)
    return out


def build(docs_tokens):
    n = len(docs_tokens)
    df = {}
    for toks in docs_tokens:
        for t in set(toks):
            df[t] = df.get(t, 0) + 1
    terms = sorted(df)
    return n, df, terms


def dense(tokens, n, df, terms):
    vec = []
    for t in terms:
        tf = 0
        for tok in tokens:
            if tok == t:
                tf += 1
        vec.append(tf * math.log(n / df[t]))
    return vec


def cos(a, b):
    dot = 0.0
    na = 0.0
    nb = 0.0
    for i in range(len(a)):
        dot += a[i] * b[i]
        na += a[i] * a[i]
        nb += b[i] * b[i]
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (math.sqrt(na) * math.sqrt(nb))


def rank(query, docs_tokens, stopwords, k):
    n, df, terms = build(docs_tokens)
    qv = dense(tokenize(query, stopwords), n, df, terms)
    if all(w == 0.0 for w in qv):
        return []
    scored = []
    for i, toks in enumerate(docs_tokens):
        scored.append((cos(qv, dense(toks, n, df, terms)), i))
    scored.sort(key=lambda p: (-p[0], p[1]))
    return scored[:k]


def slugs(urls, limit):
    counts = {}
    for url in urls:
        if "://" in url:
            try:
                path = urlsplit(url).path
            except ValueError:
                continue
        else:
            path = url.split("?")[0].split("#")[0]
        for seg in path.split("/"):
            m = EXT_RE.match(seg)
            if m:
                seg = m.group(1)
            seg = seg.lower()
            if SLUG_RE.match(seg):
                counts[seg] = counts.get(seg, 0) + 1
    ordered = sorted(counts.items(), key=lambda p: (-p[1], p[0]))
    return ordered[:limit]


def descriptors(query, lexicon, stopwords):
    q = set(tokenize(query, stopwords))
    return [p for p in lexicon if q & set(tokenize(p, stopwords))]


def expand(query, slug_list, phrases, stopwords):
    seen = set(tokenize(query, stopwords))
    extra = []
    pieces = []
    for s in slug_list:
        pieces.append(s)
        pieces.extend(s.split("-"))
    for p in phrases:
        pieces.extend(p.split())
    for piece in pieces:
        for tok in tokenize(piece, stopwords):
            if tok not in seen:
                seen.add(tok)
                extra.append(tok)
    if not extra:
        return query
    return query + " " + " ".join(extra)


def refine(query, docs, docs_tokens, stopwords, lexicon, k, m):
    base = rank(query, docs_tokens, stopwords, k)
    base_top = base[0][0] if base else 0.0
    urls = [docs[i]["url"] for s, i in base if s > 0.0]
    # Slugs the query already carries would be no-ops; they do not use up a slot.
    present = set(tokenize(query, stopwords))
    terms = [s for s, _ in slugs(urls, 10**9) if s not in present][:m]
    phrases = descriptors(query, lexicon, stopwords)
    refined = expand(query, terms, phrases, stopwords)
    after = rank(refined, docs_tokens, stopwords, k)
    top = after[0][0] if after else 0.0
    return {
        "query": query,
        "baseline_top_sim": base_top,
        "baseline_ranking": [[i, s] for s, i in base],
        "domain_terms": terms,
        "descriptors": phrases,
        "refined_query": refined,
        "refined_top_sim": top,
        "refined_ranking": [[i, s] for s, i in after],
    }


def mean(xs):
    total = 0.0
    for x in xs:
        total += x
    return total / len(xs)


def paired_t(baseline, refined):
    diffs = [b - r for b, r in zip(baseline, refined)]
    n = len(diffs)
    mu = mean(diffs)
    ss = 0.0
    for d in diffs:
        ss += (d - mu) ** 2
    sd = math.sqrt(ss / (n - 1))
    t = mu / (sd / math.sqrt(n))
    try:
        from scipy import stats

        p = float(stats.ttest_rel(baseline, refined).pvalue)
    except ImportError:
        p = None
    return {"t_stat": t, "df": n - 1, "p_two_tailed": p, "mean_diff": mu, "sd_diff": sd}


def load_corpus(path):
    docs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                docs.append(json.loads(line))
    return docs


def main():
    stopwords = set(load_lines(os.path.join(ROOT, "crates/core/data/stopwords_en.txt")))
    lexicon = load_lines(os.path.join(ROOT, "crates/core/data/descriptors.txt"))

    career = load_corpus(os.path.join(ROOT, "fixtures/career/corpus.jsonl"))
    career_tokens = [tokenize(d["text"], stopwords) for d in career]
    with open(os.path.join(ROOT, "fixtures/career/config.json"), encoding="utf-8") as fh:
        queries = json.load(fh)["queries"]
    rows = [refine(q, career, career_tokens, stopwords, lexicon, 5, 2) for q in queries]
    # The harness runs its t-test over scores at five decimals.
    b5 = [float("%.5f" % r["baseline_top_sim"]) for r in rows]
    r5 = [float("%.5f" % r["refined_top_sim"]) for r in rows]

    tiny = load_corpus(os.path.join(ROOT, "fixtures/tiny/corpus.jsonl"))
    tiny_tokens = [tokenize(d["text"], stopwords) for d in tiny]
    tiny_rank = rank("interview preparation", tiny_tokens, stopwords, 10)

    urls = load_lines(os.path.join(ROOT, "fixtures/slug_urls.txt"))

    # Reviewer path: every slug from Q1's top documents; accept the first one.
    q1 = queries[0]
    q1_base = rank(q1, career_tokens, stopwords, 5)
    q1_terms = slugs([career[i]["url"] for s, i in q1_base if s > 0.0], 10**9)
    accepted = expand(q1, [q1_terms[0][0]], [], stopwords)
    q1_after = rank(accepted, career_tokens, stopwords, 5)

    expected = {
        "career": {"rows": rows, "ttest_5dp": paired_t(b5, r5)},
        "suggest_q1": {
            "candidates": [[t, c] for t, c in q1_terms],
            "accepted_query": accepted,
            "baseline_top_sim": q1_base[0][0],
            "accepted_top_sim": q1_after[0][0],
        },
        "tiny": {"query": "interview preparation", "ranking": [[i, s] for s, i in tiny_rank]},
        "slug_urls": {"limit": 10, "terms": [[s, c] for s, c in slugs(urls, 10)]},
        "table": paired_t(
            [0.16888, 0.20048, 0.18041, 0.45991, 0.34464],
            [0.24619, 0.29034, 0.43898, 0.50654, 0.42653],
        ),
    }
    out = os.path.join(HERE, "expected.json")
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(expected, fh, indent=2)
        fh.write("\n")

    for r in rows:
        flag = "up" if r["refined_top_sim"] > r["baseline_top_sim"] else "NOT IMPROVED"
        print("%.5f -> %.5f %s | %s" % (r["baseline_top_sim"], r["refined_top_sim"], flag, r["refined_query"]))
        print("    base", [(i, round(s, 3)) for i, s in r["baseline_ranking"]], "after", [(i, round(s, 3)) for i, s in r["refined_ranking"]], r["domain_terms"])
    print("ttest:", expected["career"]["ttest_5dp"])
    print("table:", expected["table"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
