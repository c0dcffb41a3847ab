"""Runs the toy pipeline through evaluate and validates report.json against the schema."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def main(cli: str, fixtures: str, schema: str) -> int:
    conf = ["--config", str(pathlib.Path(fixtures) / "toy.conf")]
    with tempfile.TemporaryDirectory() as tmp:
        out = pathlib.Path(tmp)

        def run(*args):
            subprocess.run([cli, *args], check=True, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)

        run("build-data", *conf, "--out", str(out / "data"))
        run("train", *conf, "--set", f"train_tsv={out / 'data/train.tsv'}", "--out", str(out / "train"))
        run("reframe", *conf, "--set", "system=all", "--set", f"checkpoint={out / 'train/checkpoint.json'}",
            "--out", str(out / "reframe"))
        run("lexrep", *conf, "--out", str(out / "lexrep"))
        outputs = sorted(str(p) for p in (out / "reframe").glob("reframe.*.jsonl"))
        run("evaluate", *conf, "--set", "significance_mode=approx", "--set", "iterations=500",
            "--out", str(out / "eval"), *outputs, str(out / "lexrep/lexrep.jsonl"))
        report = json.loads((out / "eval/report.json").read_text())
        jsonschema.validate(report, json.loads(pathlib.Path(schema).read_text()))
        for name, system in report["systems"].items():
            if len(system["scores"]) != report["n_items"]:
                print(f"{name}: score count differs from n_items")
                return 1
        n = len(report["systems"])
        if len(report["significance"]) != n * (n - 1) // 2:
            print("significance does not cover every system pair")
            return 1
    print("report.json conforms to the schema")
    return 0


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:4]))
