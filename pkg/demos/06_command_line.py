"""
The command line
================

Every construction is also a ``univlift`` verb reading and writing the
text formats; outputs re-parse, so verbs compose through pipes.  Here the
entry point is called in-process on temporary files.
"""

# %%
import io
import tempfile
from pathlib import Path

from univlift.cli import run

tmp = Path(tempfile.mkdtemp())
(tmp / "c5.rs").write_text("sig edge/2 sym\nstructure C5 { n 5; edge (0 1) (1 2) (2 3) (3 4) (4 0) }\n")
(tmp / "p2.rs").write_text("sig edge/2\nstructure P2 { n 3; edge (0 1) (1 2) }\n")


def univlift(*argv):
    out = io.StringIO()
    code = run([str(a) for a in argv], out, io.StringIO())
    print(f"$ univlift {' '.join(map(str, argv))}  (exit {code})")
    print(out.getvalue())
    return out.getvalue()


# %%
univlift("pieces", tmp / "c5.rs")
univlift("eo-dist", tmp / "c5.rs")

# %%
(tmp / "dual.rs").write_text(univlift("dual", tmp / "p2.rs"))
univlift("verify-dual", tmp / "p2.rs", tmp / "dual.rs", "--max-n", 4)
