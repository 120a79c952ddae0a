import re
from pathlib import Path  # noqa: F401

text = Path("paper.md").read_text()
i0 = text.index("The construction formulas of Euclidean differential")
i1 = text.index(r"\label{table:5}")
block = text[i0:i1]
block = block.replace("\n", " ")
block = re.sub(r"\\tabincell\{l\}\{", " ", block)
block = block.replace(r"\\", " ").replace("$", " ").replace("{", " ").replace("}", " ")
block = block.replace(r"\hline", " ")
# drop table headers/caption noise before first "1&"
cells = [c.strip() for c in block.split("&")]

entries = {}
current = None
for cell in cells:
    m = re.fullmatch(r"(?:(.*\S)\s+)?(\d{1,3})", cell)
    if m:
        if m.group(1) and current is not None and entries[current] == "":
            entries[current] = m.group(1)
        current = int(m.group(2))
        entries[current] = ""
    elif current is not None and entries[current] == "":
        entries[current] = cell

def to_ops(body: str):
    body = body.replace(r"\circ", ".").replace("circ", ".").replace(r"\cdot", ".")
    body = re.sub(r"([FG])\^\s*(\d)\s*_\s*(\d)\s*,\s*(\d)", r"\1(\3,\4)^\2", body)
    body = re.sub(r"([FG])\s*_\s*(\d)\s*,\s*(\d)", r"\1(\2,\3)", body)
    body = re.sub(r"\s+", "", body)
    ops = []
    for m in re.finditer(r"([FG])\((\d),(\d)\)(?:\^(\d))?", body):
        ops.extend([(m.group(1), int(m.group(2)), int(m.group(3)))] * (int(m.group(4)) if m.group(4) else 1))
    return sorted(ops)

mine = {}
for line in Path("src/diffinv/data/chains.txt").read_text().splitlines():
    if not line or line.startswith("#"):
        continue
    num, chain = line.split(":")
    ops = []
    for m in re.finditer(r"([FG])\((\d),(\d)\)(?:\^(\d))?", chain):
        ops.extend([(m.group(1), int(m.group(2)), int(m.group(3)))] * (int(m.group(4)) if m.group(4) else 1))
    mine[int(num)] = sorted(ops)

bad = []
for num in range(1, 231):
    paper_ops = to_ops(entries.get(num, ""))
    if paper_ops != mine.get(num):
        bad.append((num, entries.get(num, "<missing>"), paper_ops, mine.get(num)))
print("paper entries parsed:", len([k for k in entries if 1 <= k <= 230]))
print("mismatches:", len(bad))
for num, raw, pops, mops in bad:
    print(f"--- entry {num}\n  raw: {raw.strip()[:140]}\n  paper: {pops}\n  mine : {mops}")
