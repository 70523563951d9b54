import csv
import io
import json
import shutil

import pytest
from click.testing import CliRunner

from cohkit import document_to_dict, load_documents
from cohkit.cli import cli

from helpers import chain_corpus, repetitive_document, scattered_document


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def corpus_path(tmp_path, data_dir):
    path = tmp_path / "corpus.jsonl"
    shutil.copy(data_dir / "hemingway.jsonl", path)
    return path


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def invoke(runner, args):
    result = runner.invoke(cli, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


class TestScoreCommand:
    def test_entropy_order_1_reciprocal(self, runner, corpus_path):
        result = invoke(
            runner,
            ["score", "--in", str(corpus_path), "--model", "entropy", "--order", "1",
             "--threads", "1"],
        )
        rows = read_csv(result.output)
        assert len(rows) == 1
        assert rows[0]["model"] == "entropy-1"
        assert float(rows[0]["raw"]) == pytest.approx(1 / 3.2776, abs=1e-4)
        assert float(rows[0]["raw"]) == pytest.approx(0.3051, abs=1e-4)

    def test_model_all_gives_nine_rows(self, runner, corpus_path):
        result = invoke(runner, ["score", "--in", str(corpus_path), "--threads", "1"])
        rows = read_csv(result.output)
        assert len(rows) == 9
        assert {row["doc_id"] for row in rows} == {"hemingway-excerpt"}

    def test_empty_input_gives_header_only(self, runner, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        result = invoke(runner, ["score", "--in", str(empty), "--threads", "1"])
        assert result.output.strip() == "doc_id,model,raw,oriented,normalized,defined"

    def test_invalid_jsonl_reports_line(self, runner, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"doc_id": "a", "sentences": []}\n{"sentences": []}\n')
        result = CliRunner().invoke(cli, ["score", "--in", str(bad), "--threads", "1"])
        assert result.exit_code == 1
        assert "line 2" in result.output

    def test_six_decimal_output(self, runner, corpus_path):
        result = invoke(
            runner, ["score", "--in", str(corpus_path), "--model", "atf", "--threads", "1"]
        )
        rows = read_csv(result.output)
        assert rows[0]["raw"] == "0.216667"
        assert rows[0]["normalized"] == "1.000000"

    def test_threads_do_not_change_output(self, runner, tmp_path):
        corpus = tmp_path / "many.jsonl"
        docs = chain_corpus(6, seed=5) + [repetitive_document("spam")]
        corpus.write_text("\n".join(json.dumps(document_to_dict(d)) for d in docs) + "\n")
        single = invoke(runner, ["score", "--in", str(corpus), "--threads", "1"]).output
        multi = invoke(runner, ["score", "--in", str(corpus), "--threads", "2"]).output
        assert single == multi

    def test_manifest_mirrors_flags(self, runner, corpus_path, tmp_path):
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps({"in": str(corpus_path), "model": ["atf"],
                                        "threads": 1}))
        via_manifest = invoke(runner, ["score", "--manifest", str(manifest)]).output
        via_flags = invoke(
            runner, ["score", "--in", str(corpus_path), "--model", "atf", "--threads", "1"]
        ).output
        assert via_manifest == via_flags

    def test_explicit_flag_beats_manifest(self, runner, corpus_path, tmp_path):
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps({"in": str(corpus_path), "model": ["atf"],
                                        "threads": 1}))
        out = invoke(
            runner,
            ["score", "--manifest", str(manifest), "--model", "awtf"],
        ).output
        assert read_csv(out)[0]["model"] == "awtf"


class TestReorderEvalCommand:
    def test_chain_corpus_atf(self, runner, tmp_path):
        corpus = tmp_path / "chains.jsonl"
        docs = chain_corpus(8, seed=3)
        corpus.write_text("\n".join(json.dumps(document_to_dict(d)) for d in docs) + "\n")
        out = tmp_path / "report.csv"
        result = invoke(
            runner,
            ["reorder-eval", "--in", str(corpus), "--model", "atf", "--k", "10",
             "--seed", "9", "--out", str(out), "--threads", "1"],
        )
        assert "atf: accuracy" in result.output
        rows = read_csv(out.read_text())
        assert len(rows) == 8
        assert {row["model"] for row in rows} == {"atf"}
        summary = json.loads((tmp_path / "report.json").read_text())
        assert summary["models"]["atf"]["accuracy"] >= 0.9
        assert summary["k"] == 10

    def test_entropy0_all_ties(self, runner, tmp_path):
        corpus = tmp_path / "chains.jsonl"
        docs = chain_corpus(4, seed=3)
        corpus.write_text("\n".join(json.dumps(document_to_dict(d)) for d in docs) + "\n")
        out = tmp_path / "r.csv"
        invoke(
            runner,
            ["reorder-eval", "--in", str(corpus), "--model", "entropy", "--order", "0",
             "--k", "6", "--seed", "1", "--out", str(out), "--threads", "1"],
        )
        summary = json.loads((tmp_path / "r.json").read_text())
        stats = summary["models"]["entropy-0"]
        assert stats["accuracy"] == 0.0
        assert stats["ties"] == 24

    def test_missing_seed_is_usage_error(self, runner, tmp_path):
        corpus = tmp_path / "c.jsonl"
        corpus.write_text("")
        result = CliRunner().invoke(
            cli, ["reorder-eval", "--in", str(corpus), "--out", str(tmp_path / "o.csv")]
        )
        assert result.exit_code == 2
        assert "--seed" in result.output

    def test_k_zero_vacuous_report(self, runner, tmp_path):
        corpus = tmp_path / "chains.jsonl"
        docs = chain_corpus(2, seed=1)
        corpus.write_text("\n".join(json.dumps(document_to_dict(d)) for d in docs) + "\n")
        out = tmp_path / "v.csv"
        result = invoke(
            runner,
            ["reorder-eval", "--in", str(corpus), "--model", "atf", "--k", "0",
             "--seed", "5", "--out", str(out), "--threads", "1"],
        )
        assert "n/a" in result.output
        summary = json.loads((tmp_path / "v.json").read_text())
        assert summary["models"]["atf"]["accuracy"] is None

    def test_determinism_across_runs_and_threads(self, runner, tmp_path):
        corpus = tmp_path / "chains.jsonl"
        docs = chain_corpus(6, seed=13)
        corpus.write_text("\n".join(json.dumps(document_to_dict(d)) for d in docs) + "\n")
        outputs = []
        for threads, name in (("1", "a"), ("2", "b"), ("1", "c")):
            out = tmp_path / f"{name}.csv"
            invoke(
                runner,
                ["reorder-eval", "--in", str(corpus), "--model", "atf", "--k", "5",
                 "--seed", "77", "--out", str(out), "--threads", threads],
            )
            outputs.append(out.read_text())
        assert outputs[0] == outputs[1] == outputs[2]


class TestRerankCommands:
    @pytest.fixture()
    def synthetic(self, tmp_path):
        """Tiny 2-query run over coherent (relevant) and scattered docs."""
        corpus, run_lines, qrels_lines = [], [], []
        for q in range(2):
            docs = []
            for j in range(6):
                doc_id = f"q{q}d{j}"
                if j in (3, 5):
                    docs.append(repetitive_document(doc_id))
                    qrels_lines.append(f"q{q} 0 {doc_id} 1")
                else:
                    docs.append(scattered_document(doc_id, salt=str(q)))
                    qrels_lines.append(f"q{q} 0 {doc_id} 0")
            corpus.extend(docs)
            for rank, doc in enumerate(docs, start=1):
                run_lines.append(f"q{q} Q0 {doc.doc_id} {rank} {10.0 - rank} base")
        paths = {
            "corpus": tmp_path / "corpus.jsonl",
            "run": tmp_path / "baseline.run",
            "qrels": tmp_path / "q.qrels",
        }
        paths["corpus"].write_text(
            "\n".join(json.dumps(document_to_dict(d)) for d in corpus) + "\n"
        )
        paths["run"].write_text("\n".join(run_lines) + "\n")
        paths["qrels"].write_text("\n".join(qrels_lines) + "\n")
        return paths

    def test_alpha_one_identity(self, runner, synthetic, tmp_path):
        out = tmp_path / "rr.run"
        invoke(
            runner,
            ["rerank", "--run", str(synthetic["run"]), "--in", str(synthetic["corpus"]),
             "--alpha", "1.0", "--out", str(out), "--threads", "1"],
        )
        baseline = [line.split()[:4] for line in synthetic["run"].read_text().splitlines()]
        reranked = [line.split()[:4] for line in out.read_text().splitlines()]
        assert [(a[0], a[2], a[3]) for a in baseline] == [
            (b[0], b[2], b[3]) for b in reranked
        ]

    def test_coherence_lifts_relevant(self, runner, synthetic, tmp_path):
        out = tmp_path / "rr.run"
        result = invoke(
            runner,
            ["rerank", "--run", str(synthetic["run"]), "--in", str(synthetic["corpus"]),
             "--qrels", str(synthetic["qrels"]), "--alpha", "0.5", "--out", str(out),
             "--threads", "1"],
        )
        metrics = read_csv((tmp_path / "rr.run.metrics.csv").read_text())[0]
        assert float(metrics["mrr"]) == 1.0  # repetitive docs jump to the top

    def test_score_file_round_trip(self, runner, synthetic, tmp_path):
        scores_csv = tmp_path / "scores.csv"
        invoke(
            runner,
            ["score", "--in", str(synthetic["corpus"]), "--model", "entropy",
             "--order", "0", "--out", str(scores_csv), "--threads", "1"],
        )
        inline_out = tmp_path / "inline.run"
        file_out = tmp_path / "fromfile.run"
        invoke(
            runner,
            ["rerank", "--run", str(synthetic["run"]), "--in", str(synthetic["corpus"]),
             "--alpha", "0.7", "--out", str(inline_out), "--threads", "1"],
        )
        invoke(
            runner,
            ["rerank", "--run", str(synthetic["run"]), "--scores", str(scores_csv),
             "--alpha", "0.7", "--out", str(file_out), "--threads", "1"],
        )
        assert inline_out.read_text() == file_out.read_text()

    def test_sweep_csv(self, runner, synthetic, tmp_path):
        out = tmp_path / "rr.run"
        invoke(
            runner,
            ["rerank", "--run", str(synthetic["run"]), "--in", str(synthetic["corpus"]),
             "--qrels", str(synthetic["qrels"]), "--alpha", "1.0",
             "--alpha-grid", "default", "--out", str(out), "--threads", "1"],
        )
        rows = read_csv((tmp_path / "rr.run.sweep.csv").read_text())
        assert len(rows) == 11
        assert rows[0]["alpha"] == "0.50" and rows[-1]["alpha"] == "1.00"

    def test_run_doc_missing_from_corpus_warns_not_fails(self, runner, synthetic, tmp_path):
        run_path = tmp_path / "extra.run"
        extra = synthetic["run"].read_text().rstrip("\n").splitlines()
        extra.append("q0 Q0 q0dX 7 2.0 base")
        run_path.write_text("\n".join(extra) + "\n")
        out = tmp_path / "rr.run"
        result = invoke(
            runner,
            ["rerank", "--run", str(run_path), "--in", str(synthetic["corpus"]),
             "--alpha", "0.5", "--out", str(out), "--threads", "1"],
        )
        assert result.exit_code == 0
        assert "q0dX" in out.read_text()

    def test_alpha_grid_forms(self):
        from cohkit.cli import _parse_alpha_grid
        from cohkit.rerank import DEFAULT_ALPHA_GRID

        assert _parse_alpha_grid("default") == DEFAULT_ALPHA_GRID
        assert _parse_alpha_grid("0.5,0.9,1.0") == (0.5, 0.9, 1.0)
        grid = _parse_alpha_grid("0.5:1.0:0.25")
        assert grid == (0.5, 0.75, 1.0)

    def test_requires_exactly_one_source(self, runner, synthetic, tmp_path):
        result = CliRunner().invoke(
            cli,
            ["rerank", "--run", str(synthetic["run"]), "--alpha", "1.0",
             "--out", str(tmp_path / "x.run")],
        )
        assert result.exit_code == 2

    def test_ir_eval_toy_fixture(self, runner, data_dir):
        result = invoke(
            runner,
            ["ir-eval", "--run", str(data_dir / "toy.run"),
             "--qrels", str(data_dir / "toy.qrels")],
        )
        row = read_csv(result.output)[0]
        assert float(row["mrr"]) == pytest.approx(2 / 3, abs=1e-6)
        assert float(row["p10"]) == pytest.approx(1 / 6, abs=1e-6)
        assert float(row["map"]) == pytest.approx(2 / 3, abs=1e-6)
        assert float(row["err20"]) == pytest.approx(19 / 48, abs=1e-6)


class TestExportGraph:
    def test_edge_list(self, runner, corpus_path):
        result = invoke(
            runner, ["export-graph", "--in", str(corpus_path), "--weighting", "distance"]
        )
        lines = result.output.strip().splitlines()
        assert lines[0] == "# hemingway-excerpt"
        triples = {tuple(line.split()[:2]): float(line.split()[2]) for line in lines[1:]}
        assert triples == {
            ("0", "2"): 0.5,
            ("0", "4"): 0.25,
            ("1", "3"): 0.5,
            ("2", "4"): 1.0,
        }


class TestDocsRoundTrip:
    def test_corpus_survives_cli_boundary(self, corpus_path):
        docs = load_documents(corpus_path)
        assert docs[0].doc_id == "hemingway-excerpt"
        assert docs[0].sentence_count == 5
