"""Command line entry points: exit codes and output files."""

import json

import numpy as np
import pytest
from PIL import Image

from figalign.cli import main
from figalign.corpus import CorpusManifest, FigureRecord, load_manifest, save_manifest
from figalign.synth import make_corpus


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli_corpus")
    return make_corpus(out, n_records=20, n_compound=8, seed=41)


def write_manifest(tmp_path, records):
    path = tmp_path / "in.jsonl"
    save_manifest(CorpusManifest.build(records, []), path)
    return path


class TestParseCaptions:
    def test_writes_segments(self, tmp_path):
        path = write_manifest(
            tmp_path, [FigureRecord("f1", "a.png", "(a) CT. (b) MRI.")]
        )
        out = tmp_path / "segments.jsonl"
        assert main(["parse-captions", "--input", str(path), "--output", str(out)]) == 0
        rows = [json.loads(line) for line in out.read_text().strip().split("\n")]
        assert rows[0]["figure_id"] == "f1"
        assert [s["label"] for s in rows[0]["segments"]] == ["a", "b"]
        assert all(
            set(row) == {"figure_id", "shared_context", "flags", "segments"} for row in rows
        )

    def test_missing_input_exit_1(self, tmp_path):
        out = tmp_path / "segments.jsonl"
        assert main(["parse-captions", "--input", str(tmp_path / "no.jsonl"), "--output", str(out)]) == 1

    def test_malformed_manifest_exit_2(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("not json\n")
        out = tmp_path / "segments.jsonl"
        assert main(["parse-captions", "--input", str(bad), "--output", str(out)]) == 2


class TestSplitFigures:
    def test_splits_directory(self, tmp_path):
        pixels = np.full((100, 100), 255, dtype=np.uint8)
        pixels[:, :40] = 30
        pixels[:, 60:] = 30
        img_dir = tmp_path / "imgs"
        img_dir.mkdir()
        Image.fromarray(pixels, mode="L").save(img_dir / "figA.png")
        out = tmp_path / "det.jsonl"
        assert main(["split-figures", "--images", str(img_dir), "--output", str(out)]) == 0
        rows = [json.loads(line) for line in out.read_text().strip().split("\n")]
        assert rows[0]["figure_id"] == "figA"
        assert len(rows[0]["regions"]) == 2
        assert rows[0]["image_width"] == 100

    def test_missing_dir_exit_1(self, tmp_path):
        out = tmp_path / "det.jsonl"
        assert main(["split-figures", "--images", str(tmp_path / "none"), "--output", str(out)]) == 1

    def test_usage_error_exit_1(self):
        assert main(["split-figures"]) == 1


class TestRunAndStats:
    def test_run_from_config(self, corpus, tmp_path):
        out = tmp_path / "out.jsonl"
        cfg = {
            "input_manifest": str(corpus.manifest_path),
            "output_manifest": str(out),
            "ocr_file": str(corpus.ocr_path),
            "images_dir": str(corpus.images_dir),
            "keyword": "brain",
        }
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(cfg))
        assert main(["run", "--config", str(cfg_path)]) == 0
        manifest = load_manifest(out)
        assert manifest.records
        sidecar = out.with_suffix(".stats.json")
        stats = json.loads(sidecar.read_text())
        assert stats["pairs_out"] == len(manifest.pairs)

    def test_missing_config_exit_1(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "none.json")]) == 1

    def test_stats_prints_json(self, corpus, capsys):
        assert main(["stats", "--input", str(corpus.manifest_path)]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["records_in"] == 20
        assert data["pairs_out"] == 0

    def test_stats_malformed_exit_2(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"kind": "record"}\n')
        assert main(["stats", "--input", str(bad)]) == 2


class TestMatch:
    def test_match_subcommand(self, corpus, tmp_path):
        rows = []
        for fig in corpus.figures:
            img = Image.open(corpus.images_dir / f"images/{fig.figure_id}.png")
            rows.append(
                {
                    "figure_id": fig.figure_id,
                    "image_width": img.width,
                    "image_height": img.height,
                    "regions": [
                        {"x": p.box.x, "y": p.box.y, "w": p.box.w, "h": p.box.h, "score": 0.9}
                        for p in fig.panels
                    ],
                }
            )
        det = tmp_path / "det.jsonl"
        det.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
        out = tmp_path / "out.jsonl"
        code = main(
            [
                "match",
                "--input",
                str(corpus.manifest_path),
                "--detections",
                str(det),
                "--ocr",
                str(corpus.ocr_path),
                "--output",
                str(out),
            ]
        )
        assert code == 0
        manifest = load_manifest(out)
        assert manifest.pairs


class TestEvalRetrieval:
    def write_embeddings(self, tmp_path, name, vectors):
        path = tmp_path / name
        rows = [{"id": f"v{i}", "vector": list(map(float, v))} for i, v in enumerate(vectors)]
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
        return path

    def test_identity_retrieval(self, tmp_path, capsys):
        img = self.write_embeddings(tmp_path, "img.jsonl", np.eye(4))
        txt = self.write_embeddings(tmp_path, "txt.jsonl", np.eye(4))
        json_out = tmp_path / "report.json"
        code = main(
            [
                "eval-retrieval",
                "--image-emb",
                str(img),
                "--text-emb",
                str(txt),
                "--k",
                "1,2",
                "--json",
                str(json_out),
            ]
        )
        assert code == 0
        printed = capsys.readouterr().out
        assert "i2t@1" in printed and "t2i@2" in printed
        data = json.loads(json_out.read_text())
        assert data["i2t@1"] == 100.0
        assert data["n_queries"] == 4

    def test_k_above_n_exit_2(self, tmp_path):
        img = self.write_embeddings(tmp_path, "img.jsonl", np.eye(2))
        txt = self.write_embeddings(tmp_path, "txt.jsonl", np.eye(2))
        code = main(
            ["eval-retrieval", "--image-emb", str(img), "--text-emb", str(txt), "--k", "5"]
        )
        assert code == 2

    def test_bad_k_string_exit_1(self, tmp_path):
        img = self.write_embeddings(tmp_path, "img.jsonl", np.eye(2))
        txt = self.write_embeddings(tmp_path, "txt.jsonl", np.eye(2))
        code = main(
            ["eval-retrieval", "--image-emb", str(img), "--text-emb", str(txt), "--k", "one"]
        )
        assert code == 1


def test_unknown_subcommand_exit_1():
    assert main(["frobnicate"]) == 1


def test_no_arguments_exit_1():
    assert main([]) == 1
