"""Running the command-line front end from Python.

A job file fixes the quiver and the parameters; each subcommand prints a
canonical JSON report.  Here we write a gl(2) job, solve it and ask for the
tRS and q-Toda verifications, then reproduce the run to show that reports
are byte-identical.
"""
import io
import json
import tempfile
from contextlib import redirect_stdout
from pathlib import Path

from qkflags.cli import run

job = {
    "version": 1,
    "quiver": {"dims": [1], "framing": 2},
    "parameters": {"q": [0.3, 0.1], "hbar": [1.6, 0.4], "a": [1.0, [-0.7, 0.9]], "z": [[0.3, -0.2]]},
    "options": {"tol": 1e-10},
}

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "job.json"
    path.write_text(json.dumps(job))

    def report(*argv):
        buf = io.StringIO()
        with redirect_stdout(buf):
            code = run(list(argv) + ["--spec", str(path)])
        return code, buf.getvalue()

    code, text = report("solve")
    res = json.loads(text)["results"]
    print(f"solve: exit {code}, {res['count']} solutions, max residual {res['max_residual']:.1e}")
    for cmd in ("verify-trs", "verify-dual", "verify-qq", "toda"):
        code, text = report(cmd)
        res = json.loads(text)["results"]
        print(f"{cmd}: exit {code}, max residual {res['max_residual']:.1e} (tol {res['tol']:.0e})")
    print("reproducible:", report("verify-qq")[1] == report("verify-qq", "--threads", "2")[1])
