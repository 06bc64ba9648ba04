# Copyright 2026 The sofic-extract Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""End-to-end checks of sofic_harness exit codes and report layout."""

import argparse
import json
import os
import pathlib
import shutil
import subprocess
import sys

import jsonschema


def load(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


class Runner:
    def __init__(self, harness, work):
        self.harness = harness
        self.work = work
        self.failures = []

    def run(self, args, env=None, cwd=None):
        full_env = dict(os.environ)
        full_env.pop("SOFIC_REPORT_DIR", None)
        if env:
            full_env.update(env)
        proc = subprocess.run([self.harness] + args, cwd=cwd or self.work, env=full_env,
                              capture_output=True, text=True, timeout=600)
        return proc.returncode, proc.stdout + proc.stderr

    def expect(self, ok, what):
        print(("ok   " if ok else "FAIL ") + what)
        if not ok:
            self.failures.append(what)

    def write_config(self, name, doc):
        path = self.work / (name + ".json")
        path.write_text(json.dumps(doc), encoding="utf-8")
        return path


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--harness", required=True)
    ap.add_argument("--source-dir", required=True)
    ap.add_argument("--work-dir", required=True)
    opts = ap.parse_args()

    src = pathlib.Path(opts.source_dir).resolve()
    work = pathlib.Path(opts.work_dir)
    shutil.rmtree(work, ignore_errors=True)
    work.mkdir(parents=True)
    r = Runner(os.path.abspath(opts.harness), work)

    config_schema = load(src / "docs" / "config.schema.json")
    report_schema = load(src / "docs" / "report.schema.json")
    jsonschema.Draft202012Validator.check_schema(config_schema)
    jsonschema.Draft202012Validator.check_schema(report_schema)
    config_v = jsonschema.Draft202012Validator(config_schema)
    report_v = jsonschema.Draft202012Validator(report_schema)

    def valid_report(path, what):
        try:
            doc = load(path)
        except (OSError, ValueError) as e:
            r.expect(False, f"{what}: cannot read report ({e})")
            return None
        errors = sorted(report_v.iter_errors(doc), key=lambda e: list(e.path))
        r.expect(not errors, f"{what}: report matches schema" + (f" ({errors[0].message})" if errors else ""))
        return doc

    shipped = sorted((src / "configs").glob("*.json"))
    r.expect(len(shipped) >= 3, "shipped configs present")
    for p in shipped:
        errors = list(config_v.iter_errors(load(p)))
        r.expect(not errors, f"{p.name} matches config schema" + (f" ({errors[0].message})" if errors else ""))

    # Lemma run from a shipped config.
    out_dir = work / "lemma"
    code, log = r.run(["--report-dir", str(out_dir), "run", str(src / "configs" / "z200_lemma.json")])
    r.expect(code == 0, f"z200_lemma exits 0 (got {code})")
    rep = valid_report(out_dir / "report.json", "z200_lemma")
    if rep is not None:
        r.expect("covered_fraction" in rep and rep["exit_code"] == 0, "z200_lemma report has covered_fraction")
    r.expect((out_dir / "summary.csv").read_text().startswith("name,lhs,rhs,pass\n")
             if (out_dir / "summary.csv").exists() else False, "summary.csv header")

    base = {
        "name": "small", "group": "Z", "experiment": "pipeline",
        "generator": {"kind": "genuine", "size": 4},
        "test_set": ["-1", "0", "1"], "epsilon": 0.5,
        "schedule": {"mode": "practical", "stages": 2, "kappa": 0.25, "eta_target": 0.25},
    }
    small = r.write_config("small", base)
    r.expect(not list(config_v.iter_errors(base)), "small config matches schema")
    code, log = r.run(["--report-dir", str(work / "small"), "run", str(small)])
    r.expect(code == 3, f"dim below |M| exits 3 (got {code})")
    rep = valid_report(work / "small" / "report.json", "small")
    if rep is not None:
        r.expect(rep["complete"] is False and rep["pipeline"]["failed_stage"] == 1, "small run fails at stage 1")

    ident = dict(base, name="identity", generator={"kind": "identity", "size": 64}, max_sample_attempts=50)
    code, log = r.run(["--report-dir", str(work / "identity"), "run", str(r.write_config("identity", ident))])
    r.expect(code == 3, f"identity input exits 3 (got {code})")
    valid_report(work / "identity" / "report.json", "identity")

    bad = dict(base, name="bad", generator={"kind": "genuine", "size": "sixty"})
    r.expect(bool(list(config_v.iter_errors(bad))), "malformed config rejected by schema")
    code, log = r.run(["--report-dir", str(work / "bad"), "run", str(r.write_config("bad", bad))])
    r.expect(code == 2 and "generator.size" in log, f"malformed config exits 2 naming the field (got {code})")
    r.expect(not (work / "bad" / "report.json").exists(), "no report for a malformed config")

    theo = dict(base, name="theo", schedule={"mode": "theoretical"})
    r.expect(bool(list(config_v.iter_errors(theo))), "theoretical run config rejected by schema")
    code, log = r.run(["run", str(r.write_config("theo", theo))])
    r.expect(code == 2, f"theoretical run config exits 2 (got {code})")

    code, log = r.run(["run", str(work / "missing.json")])
    r.expect(code == 2, f"missing config exits 2 (got {code})")

    # verify-props with the smallest allowed budget.
    code, log = r.run(["--report-dir", str(work / "props"), "verify-props", "--samples", "10000"])
    r.expect(code == 0, f"verify-props exits 0 (got {code})")
    rep = valid_report(work / "props" / "report.json", "verify-props")
    if rep is not None:
        r.expect([d["dim"] for d in rep["dims"]] == [2, 4, 8, 16, 32], "verify-props default dims")
    code, log = r.run(["verify-props", "--samples", "100"])
    r.expect(code == 2, f"verify-props below the sample floor exits 2 (got {code})")

    # schedule, with SOFIC_REPORT_DIR in place of the flag.
    env_dir = work / "from_env"
    code, log = r.run(["schedule", "--group", "Z", "--epsilon", "0.2", "--stages", "5"],
                      env={"SOFIC_REPORT_DIR": str(env_dir)})
    r.expect(code == 0, f"practical schedule exits 0 (got {code})")
    rep = valid_report(env_dir / "report.json", "schedule")
    if rep is not None:
        r.expect(rep["mode"] == "practical" and len(rep["levels"]) == 6, "schedule has 6 levels")
    code, log = r.run(["schedule", "--group", "Z", "--epsilon", "0.1", "--mode", "theoretical",
                       "--test-set=-1,1"], env={"SOFIC_REPORT_DIR": str(work / "ignored")})
    r.expect(code == 0 and "1916 stages" in log, f"theoretical schedule reports 1916 stages (got {code})")
    valid_report(work / "ignored" / "report.json", "theoretical schedule")

    # The flag wins over the environment.
    flag_dir = work / "flag"
    code, log = r.run(["--report-dir", str(flag_dir), "schedule", "--group", "Z^2", "--epsilon", "0.5"],
                      env={"SOFIC_REPORT_DIR": str(work / "env_loses")})
    r.expect(code == 0 and (flag_dir / "report.json").exists() and not (work / "env_loses").exists(),
             "--report-dir takes precedence over SOFIC_REPORT_DIR")
    code, log = r.run(["schedule", "--group", "Q8", "--epsilon", "0.5"])
    r.expect(code == 2, f"unknown group exits 2 (got {code})")

    # Default directory relative to the working directory.
    code, log = r.run(["schedule", "--group", "C7", "--epsilon", "0.5"])
    r.expect(code == 0 and (work / "reports" / "schedule" / "report.json").exists(),
             "schedule defaults to reports/schedule")

    if r.failures:
        print(f"{len(r.failures)} failure(s)")
        return 1
    print("all CLI checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
