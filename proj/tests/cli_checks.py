#!/usr/bin/env python3
"""End-to-end checks for the command-line front end.

Usage: cli_checks.py /path/to/opsys-index
Exercises record emission, caching, digest invariance, and exit codes.
"""
import json
import math
import os
import subprocess
import sys
import tempfile

BIN = os.path.abspath(sys.argv[1])
FAILURES = []


def run(*args, env_extra=None, cwd=None):
    env = dict(os.environ)
    env.pop("OPSYS_INDEX_CACHE", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([BIN, *args], capture_output=True, text=True, env=env, cwd=cwd)


def check(name, cond, detail=""):
    print(("PASS " if cond else "FAIL ") + name + (f"  [{detail}]" if detail and not cond else ""))
    if not cond:
        FAILURES.append(name)


def record_of(proc):
    return json.loads(proc.stdout)


def main():
    tmp = tempfile.mkdtemp(prefix="opsys_cli_")
    c5 = os.path.join(tmp, "c5.dimacs")
    with open(c5, "w") as f:
        f.write("c five cycle\np edge 5 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 1\n")
    c5r = os.path.join(tmp, "c5_reordered.dimacs")
    with open(c5r, "w") as f:
        f.write("p edge 5 5\ne 5 1\ne 4 5\ne 3 4\ne 2 3\ne 2 1\n")

    # theta on the five-cycle: value, schema, exit code
    p = run("theta", "--graph", c5)
    check("theta exits 0", p.returncode == 0, p.stderr)
    rec = record_of(p)
    check("theta value is sqrt(5)", abs(rec["value"] - math.sqrt(5.0)) < 1e-6, str(rec["value"]))
    check("theta forms agree", abs(rec["value"] - rec["dual_value"]) < 1e-6)
    check(
        "record has the full schema",
        list(rec.keys()) == ["command", "inputs", "value", "dual_value", "gap", "status", "solver"]
        and list(rec["solver"].keys()) == ["iterations", "tol"],
    )
    check("record ends with newline", p.stdout.endswith("\n") and p.stdout.count("\n") == 1)

    # cache: second run replays byte-identically from one stored entry
    cache = os.path.join(tmp, "cache")
    p1 = run("theta", "--graph", c5, "--cache-dir", cache)
    p2 = run("theta", "--graph", c5, "--cache-dir", cache)
    check("cache replay is byte-identical", p1.stdout == p2.stdout and p2.returncode == 0)
    check("one cache entry per digest", len(os.listdir(cache)) == 1, str(os.listdir(cache)))

    # digest invariance: reordered edge file hits the same entry
    p3 = run("theta", "--graph", c5r, "--cache-dir", cache)
    check("edge order does not change the digest", p3.stdout == p1.stdout)
    check("reordered run added no entry", len(os.listdir(cache)) == 1)

    # changed tol is a different digest
    run("theta", "--graph", c5, "--cache-dir", cache, "--tol", "1e-9")
    check("changed tol misses the cache", len(os.listdir(cache)) == 2)

    # corrupted entry: warning, recompute, same bytes again
    entries = sorted(os.listdir(cache))
    victim = os.path.join(cache, entries[0])
    with open(victim, "w") as f:
        f.write("{ garbage")
    p5 = run("theta", "--graph", c5, "--cache-dir", cache)
    alt = run("theta", "--graph", c5, "--cache-dir", cache, "--tol", "1e-9")
    fixed = p5 if p5.stdout == p1.stdout else alt
    check(
        "corrupted entry warns and recomputes",
        "corrupted" in (p5.stderr + alt.stderr) and fixed.returncode == 0,
    )

    # env-variable cache directory
    envcache = os.path.join(tmp, "envcache")
    run("coindex", "--graph", c5, env_extra={"OPSYS_INDEX_CACHE": envcache})
    check("env cache directory is honored", os.path.isdir(envcache) and len(os.listdir(envcache)) == 1)

    # emitted record round-trips byte-identically through --out
    outfile = os.path.join(tmp, "rec.json")
    p = run("theta", "--graph", c5, "--out", outfile)
    with open(outfile) as f:
        check("--out carries the same bytes", f.read() == p1.stdout and p.stdout == "")

    # make-system files feed the system commands
    m3 = os.path.join(tmp, "m3.json")
    d3 = os.path.join(tmp, "d3.json")
    run("make-system", "--kind", "full", "--n", "3", "--out", m3)
    run("make-system", "--kind", "diag", "--n", "3", "--out", d3)
    p = run("lambda-tilde", "--system", d3)
    check("diagonal system index is its dimension", abs(record_of(p)["value"] - 3.0) < 1e-5)
    p = run("cp-index", "--graph", c5)
    rec = record_of(p)
    check("cp-index primal and dual agree", abs(rec["value"] - rec["dual_value"]) < 1e-6)
    check("cp-index equals theta on a graph system", abs(rec["value"] - math.sqrt(5.0)) < 1e-6)

    # closed-form command
    p = run("bounded-index-linf", "--n", "5")
    check("bounded-index-linf exits 0", p.returncode == 0)
    check("bounded-index-linf value", abs(record_of(p)["value"] - 5.0) < 1e-9)

    # error paths: exit 1 with a diagnostic on stderr
    loop = os.path.join(tmp, "loop.dimacs")
    with open(loop, "w") as f:
        f.write("p edge 3 1\ne 1 1\n")
    p = run("theta", "--graph", loop)
    check("self-loop input exits 1", p.returncode == 1 and "self-loop" in p.stderr)
    p = run("frobnicate", "--graph", c5)
    check("unknown command exits 1", p.returncode == 1)
    p = run("theta", "--graph", c5, "--max-block", "3")
    check("size guard exits 1", p.returncode == 1 and "size guard" in p.stderr)
    p = run("cp-index")
    check("missing input exits 1", p.returncode == 1)
    bad = os.path.join(tmp, "bad.json")
    with open(bad, "w") as f:
        f.write("{ not json")
    p = run("lambda-tilde", "--system", bad)
    check("malformed json exits 1", p.returncode == 1)

    # solver status exit codes
    p = run("cp-index", "--graph", c5, "--max-iter", "2")
    check("iteration cap exits 3", p.returncode == 3 and record_of(p)["status"] == "max_iterations")

    # batch runner: one record per line, comments skipped
    cmds = os.path.join(tmp, "cmds.txt")
    with open(cmds, "w") as f:
        f.write("# comment\ntheta --graph {0}\nbounded-index-linf --n 3\n".format(c5))
    p = run("batch", cmds)
    lines = [ln for ln in p.stdout.splitlines() if ln.strip()]
    check("batch emits one record per command", p.returncode == 0 and len(lines) == 2)
    check(
        "batch records parse",
        all(json.loads(ln)["status"] == "optimal" for ln in lines),
    )

    print(f"{len(FAILURES)} failures")
    return 1 if FAILURES else 0


if __name__ == "__main__":
    sys.exit(main())
