#!/usr/bin/env python3
"""Regenerates the desk-scale corpus under data/mini/.

Ten topical clusters, each with one master, one duplicate closed against
it, and one related-but-distinct question. Two extra questions carry no
images so the image filter has something to drop: one of them is a
duplicate, which is why the filtered corpus plants exactly ten duplicate
pairs. Image artifacts are constructed so that the matplotlib pair agrees
on OCR but not captions, the git pair agrees on captions but has no OCR,
and every other duplicate pair agrees on both, giving the divergence
audit a hand-checkable answer.
"""

import json
import os
from xml.sax.saxutils import quoteattr

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64_hex(text):
    h = FNV_OFFSET
    for b in text.encode("utf-8"):
        h = ((h ^ b) * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


def q(qid, title, body, tags, closed=False, images=1):
    imgs = ""
    if images >= 1:
        suffix = "a" if images > 1 else ""
        imgs += f'<img src="https://img.example/q{qid}{suffix}.png">'
    if images == 2:
        imgs += f'<img src="https://img.example/q{qid}b.png">'
    return {
        "id": qid,
        "title": title,
        "body": body + imgs,
        "tags": tags,
        "closed": closed,
    }


QUESTIONS = [
    # matplotlib legend
    q(110, "Matplotlib legend not showing on line plot",
      "<p>I plot two series with matplotlib but calling legend draws nothing. "
      "The legend is missing from the figure.</p>"
      "<pre><code>import matplotlib.pyplot as plt\n"
      "plt.plot(xs, ys, label=&quot;train&quot;)\nplt.legend()\nplt.show()\n</code></pre>"
      "<p>Why is the legend missing?</p>",
      ["python", "matplotlib"], images=2),
    q(111, "Legend not showing when I plot with matplotlib [Duplicate]",
      "<p>Calling legend after I plot my series draws nothing and the legend "
      "is missing from my figure.</p>"
      "<pre><code>plt.plot(xs, ys, label=&quot;loss&quot;)\nplt.legend()\n</code></pre>",
      ["py", "matplotlib"], closed=True),
    q(112, "How to place a matplotlib legend outside the axes",
      "<p>My legend overlaps the data. I want to move the legend box outside "
      "the axes area entirely.</p>"
      "<pre><code>plt.legend(bbox_to_anchor=(1.05, 1))\n</code></pre>",
      ["python", "matplotlib"], closed=True),
    # numpy reshape
    q(120, "Cannot reshape numpy array of size 12 into shape (5, 3)",
      "<p>Calling reshape on my numpy array raises a ValueError because the "
      "total number of elements must match the product of the new shape.</p>"
      "<pre><code>import numpy as np\narr = np.arange(12)\narr.reshape(5, 3)\n</code></pre>",
      ["python", "numpy"]),
    q(121, "ValueError when I reshape my numpy array [Duplicate]",
      "<p>Reshape on a numpy array raises a ValueError saying the total size "
      "of the new array must be unchanged.</p>"
      "<pre><code>np.arange(12).reshape(5, 3)\n</code></pre>",
      ["py", "np"], closed=True),
    q(122, "How to stack two numpy arrays vertically",
      "<p>I have two arrays with the same number of columns and want to stack "
      "them into one array row-wise.</p>"
      "<pre><code>np.vstack([a, b])\n</code></pre>",
      ["python", "numpy"], closed=True),
    # git merge conflict
    q(130, "How do I resolve a git merge conflict",
      "<p>Pulling a branch left conflict markers in my files and git stopped "
      "the merge. How do I resolve the conflict and finish the merge?</p>"
      "<pre><code>git merge feature\ngit status\n</code></pre>",
      ["git", "merge"]),
    q(131, "Git reports a merge conflict and stops the merge [Duplicate]",
      "<p>Merging a branch put conflict markers in my files and the merge "
      "stopped. I need to resolve the conflict and complete the merge.</p>"
      "<pre><code>git merge feature\n</code></pre>",
      ["git", "merge"], closed=True),
    q(132, "Undo the last git commit but keep my changes",
      "<p>I committed too early and want to undo the commit while keeping the "
      "working tree as it is.</p>"
      "<pre><code>git reset --soft HEAD~1\n</code></pre>",
      ["git"], closed=True),
    # css flexbox centering
    q(140, "How to center a div horizontally and vertically with flexbox",
      "<p>I want the inner div centered horizontally and vertically, using "
      "justify-content and align-items on the flex container.</p>"
      "<pre><code>.container { display: flex; justify-content: center; align-items: center; }\n</code></pre>",
      ["css", "flexbox"]),
    q(141, "Center content in the middle of the page using flexbox [Duplicate]",
      "<p>I need a div centered horizontally and vertically on the page. The "
      "container already uses display flex with justify-content.</p>"
      "<pre><code>.page { display: flex; justify-content: center; }\n</code></pre>",
      ["css", "flexbox"], closed=True),
    q(142, "Flexbox items wrap onto the next line unexpectedly",
      "<p>My flex items wrap onto a second line when the viewport shrinks. I "
      "want them to shrink instead of wrapping.</p>"
      "<pre><code>.row { flex-wrap: nowrap; }\n</code></pre>",
      ["css", "flexbox"], closed=True),
    # python unicode decode
    q(150, "UnicodeDecodeError when reading a file in Python",
      "<p>Opening a text file raises UnicodeDecodeError: the utf-8 codec "
      "cannot decode a byte. Passing the right encoding to open fixes it.</p>"
      "<pre><code>open(path, encoding=&quot;utf-8&quot;)\n</code></pre>",
      ["python", "unicode"]),
    q(151, "Python raises UnicodeDecodeError while reading my file [Duplicate]",
      "<p>Reading a text file raises UnicodeDecodeError because the utf-8 "
      "codec cannot decode a byte near the start. Which encoding should open use?</p>"
      "<pre><code>with open(path) as f:\n    data = f.read()\n</code></pre>",
      ["python3", "unicode"], closed=True),
    q(152, "How to write a list of strings to a file in Python",
      "<p>I have a list of lines and want them written to a file with a "
      "newline after each one.</p>"
      "<pre><code>f.writelines(line + &quot;\\n&quot; for line in lines)\n</code></pre>",
      ["python", "file-io"], closed=True),
    # java NullPointerException
    q(160, "What causes a NullPointerException in my Java constructor",
      "<p>My Java constructor throws a NullPointerException because a field "
      "is used before it is initialized, so the reference is still null.</p>"
      "<pre><code>this.name = name.trim();\n</code></pre>",
      ["java", "exception"]),
    q(161, "Java NullPointerException thrown inside a constructor [Duplicate]",
      "<p>Creating the object throws a NullPointerException from the "
      "constructor because a null reference is passed for a field.</p>"
      "<pre><code>Widget w = new Widget(null);\n</code></pre>",
      ["java", "nullpointerexception"], closed=True),
    q(162, "Difference between checked and unchecked exceptions in Java",
      "<p>Which Java exceptions must be declared and which ones are runtime "
      "only? When should a method declare throws?</p>"
      "<pre><code>try { run(); } catch (Exception e) { }\n</code></pre>",
      ["java", "exception"], closed=True),
    # docker ports
    q(170, "Docker container port not accessible from the host",
      "<p>My docker container runs but the published port is not accessible "
      "from the host. The -p flag should map the container port to a host port.</p>"
      "<pre><code>docker run -p 8080:80 nginx\n</code></pre>",
      ["docker", "networking"]),
    q(171, "Cannot reach my docker container port from the host [Duplicate]",
      "<p>The docker container is running yet the mapped port is not "
      "accessible from the host browser. The -p flag maps the port.</p>"
      "<pre><code>docker run -p 3000:3000 app\n</code></pre>",
      ["docker"], closed=True),
    q(172, "How to remove all stopped docker containers",
      "<p>Old stopped containers pile up on my machine. I want to remove all "
      "of them in one command.</p>"
      "<pre><code>docker container prune\n</code></pre>",
      ["docker"], closed=True),
    # pandas groupby
    q(180, "Pandas groupby aggregate multiple columns at once",
      "<p>After a groupby I want to aggregate several columns with different "
      "functions, sum for one column and mean for another.</p>"
      "<pre><code>df.groupby(&quot;city&quot;).agg({&quot;sales&quot;: &quot;sum&quot;, &quot;price&quot;: &quot;mean&quot;})\n</code></pre>",
      ["python", "pandas"]),
    q(181, "Aggregate several columns after a pandas groupby [Duplicate]",
      "<p>I group my dataframe and want to aggregate multiple columns, a sum "
      "for sales and a mean for price.</p>"
      "<pre><code>df.groupby(&quot;city&quot;).agg({&quot;sales&quot;: &quot;sum&quot;})\n</code></pre>",
      ["py", "pandas"], closed=True),
    q(182, "How to rename columns in a pandas dataframe",
      "<p>I want to rename two columns in my dataframe without touching the "
      "others.</p>"
      "<pre><code>df.rename(columns={&quot;old&quot;: &quot;new&quot;})\n</code></pre>",
      ["python", "pandas"], closed=True),
    # react useState
    q(190, "React useState does not update the value immediately",
      "<p>State updates from useState are batched and asynchronous, so the "
      "new value only appears on the next render.</p>"
      "<pre><code>const [count, setCount] = useState(0);\nsetCount(count + 1);\n</code></pre>",
      ["react", "javascript"]),
    q(191, "useState value not updating right away in React [Duplicate]",
      "<p>I call the setter but logging still shows the old value because the "
      "state update is asynchronous until the next render.</p>"
      "<pre><code>setCount(count + 1);\nconsole.log(count);\n</code></pre>",
      ["reactjs", "js"], closed=True),
    q(192, "How to fetch data on mount with React useEffect",
      "<p>I want to fetch data once when the component mounts, using "
      "useEffect with an empty dependency array.</p>"
      "<pre><code>useEffect(() =&gt; { fetchData(); }, []);\n</code></pre>",
      ["react", "javascript"], closed=True),
    # sql join duplicates
    q(200, "SQL join returns duplicate rows from the second table",
      "<p>A one to many join multiplies the rows of the first table. I get "
      "repeated rows and want one row per order, with distinct or an aggregate.</p>"
      "<pre><code>SELECT o.id FROM orders o JOIN items i ON i.order_id = o.id\n</code></pre>",
      ["sql", "join"]),
    q(201, "Why does my SQL join produce duplicated rows [Duplicate]",
      "<p>Joining two tables gives repeated rows for every match on the "
      "second table. I expected one row per order.</p>"
      "<pre><code>SELECT * FROM orders JOIN items ON items.order_id = orders.id\n</code></pre>",
      ["sql", "postgres"], closed=True),
    q(202, "Difference between inner join and left join in SQL",
      "<p>A left join keeps unmatched rows from the first table with nulls. "
      "When should I prefer it over an inner join?</p>"
      "<pre><code>SELECT * FROM a LEFT JOIN b ON a.id = b.id\n</code></pre>",
      ["sql", "join"], closed=True),
    # no images: filtered out before pairing
    q(301, "Matplotlib legend missing from my chart [Duplicate]",
      "<p>The legend is missing from my matplotlib chart even though I call "
      "legend after plotting.</p>",
      ["python", "matplotlib"], closed=True, images=0),
    q(302, "How do I exit the vim editor",
      "<p>I opened vim to edit a commit message and cannot leave the "
      "editor.</p><pre><code>:wq\n</code></pre>",
      ["vim"], images=0),
]

DUP_LINKS = [(m + 1, m) for m in range(110, 201, 10)] + [(301, 110)]

MASTERS = {m for _, m in DUP_LINKS}
DUPS = {d for d, _ in DUP_LINKS}

OCR_SHARED = {
    110: "no handles with labels found to put in legend",
    120: "valueerror cannot reshape array of size 12 into shape 5 3",
    130: "",
    140: "items centered inside a flex container",
    150: "unicodedecodeerror utf8 codec cannot decode byte 0xff in position 0",
    160: "exception in thread main java lang nullpointerexception",
    170: "curl failed to connect to localhost port 8080 connection refused",
    180: "city sales price sum mean grouped table",
    190: "console log prints stale count value zero",
    200: "order id repeated three times in query result",
}

CAPTION_SHARED = {
    120: "screenshot of a python traceback with a reshape error",
    130: "terminal window showing a git merge conflict message",
    140: "browser window with a box centered in the viewport",
    150: "python traceback ending in a decode failure",
    160: "java stack trace printed in a terminal",
    170: "terminal showing a refused connection to a docker container",
    180: "pandas dataframe grouped by city with aggregated columns",
    190: "react devtools showing a stale state value",
    200: "sql query result grid with repeated order rows",
}


def artifact(url, ocr, captions):
    return {
        "image_key": fnv1a64_hex(url),
        "url": url,
        "ocr_text": ocr,
        "captions": captions,
        "provider_ids": {"ocr": "fixture-ocr", "caption": "fixture-caption"},
        "fetched_at": "2025-11-04T12:00:00Z",
    }


def build_artifacts():
    out = []
    for rec in QUESTIONS:
        qid = rec["id"]
        cluster = (qid // 10) * 10
        if qid >= 300:
            continue
        if qid == 110:
            out.append(artifact("https://img.example/q110a.png",
                                OCR_SHARED[110],
                                ["line plot with two series and axes"]))
            out.append(artifact("https://img.example/q110b.png", "", []))
        elif qid == 111:
            out.append(artifact("https://img.example/q111.png",
                                OCR_SHARED[110],
                                ["a blank chart area with a missing legend box"]))
        elif qid in DUPS or qid in MASTERS:
            out.append(artifact(f"https://img.example/q{qid}.png",
                                OCR_SHARED[cluster],
                                [CAPTION_SHARED[cluster]]))
        else:
            out.append(artifact(f"https://img.example/q{qid}.png", "",
                                [f"unrelated decorative thumbnail number {qid}"]))
    return out


def status_of(qid):
    if qid in DUPS:
        return "closed_duplicate"
    if qid in MASTERS:
        return "master"
    rec = next(r for r in QUESTIONS if r["id"] == qid)
    return "closed_non_duplicate" if rec["closed"] else "open"


def write_posts_xml(path):
    lines = ['<?xml version="1.0" encoding="utf-8"?>', "<posts>"]
    for rec in QUESTIONS:
        attrs = {
            "Id": str(rec["id"]),
            "PostTypeId": "1",
            "CreationDate": "2024-03-01T09:00:00.000",
            "Title": rec["title"],
            "Body": rec["body"],
            "Tags": "".join(f"<{t}>" for t in rec["tags"]),
        }
        if rec["closed"]:
            attrs["ClosedDate"] = "2024-03-05T10:00:00.000"
        parts = " ".join(f"{k}={quoteattr(v)}" for k, v in attrs.items())
        lines.append(f"  <row {parts} />")
    for aid, answer in (("501", "<p>Use plt.legend() after plotting.</p>"),
                        ("502", "<p>Pass the encoding explicitly.</p>")):
        lines.append(f'  <row Id="{aid}" PostTypeId="2" Body={quoteattr(answer)} />')
    lines.append('  <row Id="601" PostTypeId="1" Title="Broken row without a body" />')
    lines.append("</posts>")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def write_postlinks_xml(path):
    lines = ['<?xml version="1.0" encoding="utf-8"?>', "<postlinks>"]
    for i, (dup, master) in enumerate(DUP_LINKS, start=1):
        lines.append(f'  <row Id="{i}" CreationDate="2024-03-05T10:00:00.000" '
                     f'PostId="{dup}" RelatedPostId="{master}" LinkTypeId="3" />')
    lines.append('  <row Id="99" PostId="112" RelatedPostId="110" LinkTypeId="1" />')
    lines.append("</postlinks>")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def write_corpus_jsonl(path):
    with open(path, "w", encoding="utf-8") as f:
        for rec in QUESTIONS:
            qid = rec["id"]
            row = {
                "id": qid,
                "title": rec["title"],
                "body_html": rec["body"],
                "tags": rec["tags"],
                "status": status_of(qid),
                "duplicate_of": dict(DUP_LINKS).get(qid),
            }
            f.write(json.dumps(row) + "\n")


def write_cache_jsonl(path):
    with open(path, "w", encoding="utf-8") as f:
        for art in build_artifacts():
            f.write(json.dumps(art) + "\n")


def write_manifest(path):
    manifest = {
        "corpus": {"posts_xml": "posts.xml", "postlinks_xml": "postlinks.xml"},
        "tag_synonyms": "../tag_synonyms.csv",
        "image_cache": "image_cache.jsonl",
        "seeds": {"pairing": 13, "split": 17, "training": 29},
        "k_values": [5, 10, 20],
        "pool": "masters_and_nondup",
        "out_dir": "out",
    }
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(manifest, indent=2) + "\n")


def main():
    base = os.path.normpath(os.path.join(os.path.dirname(__file__), "..", "data", "mini"))
    os.makedirs(base, exist_ok=True)
    write_posts_xml(os.path.join(base, "posts.xml"))
    write_postlinks_xml(os.path.join(base, "postlinks.xml"))
    write_corpus_jsonl(os.path.join(base, "corpus.jsonl"))
    write_cache_jsonl(os.path.join(base, "image_cache.jsonl"))
    write_manifest(os.path.join(base, "manifest.json"))
    n_img = sum(1 for r in QUESTIONS if "img.example" in r["body"])
    print(f"wrote {len(QUESTIONS)} questions ({n_img} with images), "
          f"{len(DUP_LINKS)} duplicate links, {len(build_artifacts())} cached artifacts")


if __name__ == "__main__":
    main()
