"""
The whole pipeline from the command line
========================================

Write a tiny domain to disk, run ``mraug augment`` and read back the files
each stage leaves behind.
"""

import tempfile
from pathlib import Path

from mraug import cli
from mraug.mr import read_pairs, write_pairs
from mraug.synthetic import make_planted_domain

work = Path(tempfile.mkdtemp(prefix="mraug-demo-"))
planted = make_planted_domain(n_background=3000, seed=4)
write_pairs(work / "train.txt", planted.train_pairs)
(work / "pool.txt").write_text("\n".join(planted.pool_lines) + "\n", encoding="utf-8")

# the same as: mraug augment --in-domain train.txt --pool pool.txt ...
code = cli.main(["augment", "--in-domain", str(work / "train.txt"), "--pool", str(work / "pool.txt"),
                 "--index", str(work / "pool.idx"), "--out-dir", str(work / "out"),
                 "--max-keywords", "100", "--seed", "0"])
print("exit code", code)

for name in sorted(p.name for p in (work / "out").iterdir()):
    print(f"  {name}: {sum(1 for _ in open(work / 'out' / name, encoding='utf-8'))} lines")

print((work / "out" / "filter_report.tsv").read_text())
augmented = read_pairs(work / "out" / "augmented.txt")
print(f"{len(augmented)} augmented pairs, e.g. {augmented[0].mr} & {augmented[0].utterance}")
print("files are in", work)
