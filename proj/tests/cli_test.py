#!/usr/bin/env python3
"""CLI behaviour: exit codes, text output, and JSON validated against the shipped schema."""
import json
import os
import subprocess
import sys
import tempfile

import jsonschema

CLI, SCHEMA = sys.argv[1], sys.argv[2]
with open(SCHEMA) as f:
    schema = json.load(f)
validator = jsonschema.Draft202012Validator(schema)

failures = []


def run(args, env=None):
    e = dict(os.environ)
    if env:
        e.update(env)
    p = subprocess.run([CLI] + args, capture_output=True, text=True, env=e, timeout=600)
    return p.returncode, p.stdout, p.stderr


def case(name, args, code, kind=None, check=None, env=None):
    rc, out, err = run(args + (["--format", "json"] if kind else []), env)
    problems = []
    if rc != code:
        problems.append(f"exit {rc}, expected {code}; stderr: {err.strip()[:300]}")
    if kind:
        try:
            j = json.loads(out)
        except json.JSONDecodeError as ex:
            problems.append(f"bad json: {ex}")
            j = None
        if j is not None:
            errs = list(validator.iter_errors(j))
            if errs:
                problems.append("schema: " + errs[0].message[:300])
            if j.get("kind") != kind:
                problems.append(f"kind {j.get('kind')}, expected {kind}")
            if check and not problems:
                msg = check(j)
                if msg:
                    problems.append(msg)
    print(("ok   " if not problems else "FAIL ") + name)
    for p in problems:
        print("     " + p)
    if problems:
        failures.append(name)


# wpo
case("wpo skip", ["wpo", "--pre", "emp", "--prog", "skip"], 0, "assertion",
     lambda j: None if j["status"] == "Ok" and len(j["disjuncts"]) >= 1 else "expected emp")
case("wpo alloc er is false", ["wpo", "--pre", "emp", "--prog", "x := alloc(2)", "--exit", "er"], 0, "assertion",
     lambda j: None if j["status"] == "False" else "expected false")
case("wpo loop marked truncated", ["wpo", "--pre", "x == 0 * emp", "--prog", "(x := x + 1)*", "--loop-bound", "2"], 0,
     "assertion", lambda j: None if j["truncated"] and len(j["disjuncts"]) == 3 else f"got {j['disjuncts']}")
case("wpo size limit", ["wpo", "--pre", "arr(a, a+10) * b(a) == a * e(a) == a+10", "--prog", "free(a+1)"], 2, "error",
     lambda j: None if "9" in j["message"] or "exceeds" in j["message"] else j["message"])
case("wpo parse error has position", ["wpo", "--pre", "x |-> ", "--prog", "skip"], 2, "error",
     lambda j: None if ":" in j["message"] and "--pre" in j["message"] else j["message"])

# check
case("check intro triple", ["check", "--pre", "x |-> -", "--prog", "free(x)", "--post", "x !|->"], 0, "verdict")
case("check intro triple both", ["check", "--pre", "x |-> -", "--prog", "free(x)", "--post", "x !|->",
                                 "--method", "both"], 0, "verdict")
case("check naive frame", ["check", "--pre", "x |-> - * x |-> -", "--prog", "free(x)", "--post", "emp * x |-> -"], 1,
     "verdict", lambda j: None if j["witness"] is not None else "no witness")
case("check frame er", ["check", "--pre", "x != null * emp * x |-> 1", "--prog", "free(x)", "--exit", "er",
                        "--post", "x != null * emp * x |-> 1", "--method", "logical"], 1, "verdict")
case("check loop bounded", ["check", "--pre", "x == 0 * emp", "--prog", "(x := x + 1)*", "--post", "x == 2 * emp",
                            "--method", "both"], 2, "verdict",
     lambda j: None if j["status"] == "BoundedValid" else j["status"])
case("check text", ["check", "--pre", "emp", "--prog", "skip", "--post", "emp"], 0)

# find-bugs
case("find-bugs free(array+1)", ["find-bugs", "--pre", "arr(a, a+10) * b(a) == a * e(a) == a+10", "--prog",
                                 "free(a+1)", "--vmax", "11", "--case-cap", "16"], 1, "bug_report",
     lambda j: None if j["er_disjuncts"] and j["er_disjuncts"][0]["source_command"] == "free(a + 1)" else str(j))
case("find-bugs skip", ["find-bugs", "--pre", "x |-> 1", "--prog", "skip"], 0, "bug_report",
     lambda j: None if j["status"] == "NoBugs" else j["status"])

# oracle-diff
case("oracle-diff emp skip", ["oracle-diff", "--pre", "emp", "--prog", "skip"], 0, "diff_report")
case("oracle-diff free", ["oracle-diff", "--pre", "x |-> -", "--prog", "free(x)", "--vmax", "5"], 0, "diff_report")
case("oracle-diff random corpus", ["oracle-diff", "--corpus", "random", "--seed", "3", "--count", "8", "--jobs", "2",
                                   "--case-cap", "24"], 0, "corpus_summary",
     lambda j: None if j["count"] == 8 and j["valid"] == 8 else str({k: j[k] for k in ("valid", "invalid", "unknown")}))

# check-rule
case("check-rule skip", ["check-rule", "--rule", "Skip", "--pre", "x |-> 1", "--prog", "skip", "--post", "x |-> 1"], 0,
     "rule_check")
prem = json.dumps({"pre": "x != null * emp", "prog": "free(x)", "exit": "er", "post": "x != null * emp"})
case("check-rule frame er rejected", ["check-rule", "--rule", "frame-ok", "--premise", prem, "--frame", "x |-> 1",
                                      "--pre", "x != null * emp * x |-> 1", "--prog", "free(x)", "--exit", "er",
                                      "--post", "x != null * emp * x |-> 1"], 1, "rule_check",
     lambda j: None if not j["accepted"] and j["diagnostics"] else str(j))
case("check-rule unknown", ["check-rule", "--rule", "Nope", "--post", "emp"], 2, "error")

with tempfile.TemporaryDirectory() as d:
    inst = os.path.join(d, "inst.json")
    with open(inst, "w") as f:
        json.dump({"rule": "Seq1",
                   "premises": [{"pre": "x |-> 1", "prog": "error()", "exit": "er", "post": "x |-> 1"}],
                   "conclusion": {"pre": "x |-> 1", "prog": "error(); skip", "exit": "er", "post": "x |-> 1"}}, f)
    case("check-rule instance file", ["check-rule", "--instance", inst], 0, "rule_check")
    cfg = os.path.join(d, "cfg.json")
    with open(cfg, "w") as f:
        json.dump({"pre": "x |-> -", "prog": "free(x)", "post": "x !|->", "vmax": 5}, f)
    case("config file", ["check", "--config", cfg], 0, "verdict")
    case("flag beats config", ["check", "--config", cfg, "--post", "x |-> 1"], 1, "verdict")
    prog = os.path.join(d, "p.isl")
    with open(prog, "w") as f:
        f.write("x := alloc(2);\nfree(x + 1)\n")
    case("program from file", ["find-bugs", "--pre", "emp", "--prog", prog, "--vmax", "4", "--case-cap", "16"], 1, "bug_report")

case("log level env", ["check", "--pre", "emp", "--prog", "skip", "--post", "emp"], 0, None, env={"ISLARR_LOG": "debug"})
case("bad exit flag", ["check", "--exit", "maybe", "--post", "emp"], 2)

print(f"{len(failures)} failures")
sys.exit(1 if failures else 0)
