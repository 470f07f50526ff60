"""
System tests for the command-line interface.
Runs whole invocations against temporary audit databases.
"""

import io
import json
import os

import pytest

from src.cli import run
from src.fold import dump_etg, to_etg
from src.logger import LogManager
from src.signature import builtin_bintree
from src.storage import StorageManager
from src.term import parse_term
from src.term_manager import TermManager

GOLDEN = os.path.join(os.path.dirname(__file__), "..", "golden")
SHARING = "bin(bin(lf(5),lf(6)),bin(ptr(2,1.1),lf(7)))"
CYCLIC = "bin(bin(bin(ptr(3),lf(6)),ptr(1,1)),lf(9))"


class TestCli:
    """Test csterm invocations end to end."""

    @pytest.fixture
    def cli(self, temp_db):
        """Run the CLI and return (exit code, stdout, stderr)."""
        def invoke(*argv, stdin=""):
            out, err = io.StringIO(), io.StringIO()
            code = run(["--log-db", temp_db, *argv], io.StringIO(stdin), out, err)
            return code, out.getvalue(), err.getvalue()
        return invoke

    def test_check(self, cli):
        code, out, _ = cli("check", SHARING)
        assert code == 0
        assert out == "B(B(L,L),B(P,L))\n"

    def test_check_dangling(self, cli):
        """Test a type error exits 1 and names kind and path."""
        code, out, err = cli("check", "ptr(1)")
        assert code == 1
        assert out == ""
        assert "DanglingIndex at ε" in err

    def test_check_with_context(self, cli):
        code, out, _ = cli("check", "ptr(1,2)", "--ctx", "B(L,L)")
        assert (code, out) == (0, "P\n")

    def test_check_from_stdin(self, cli):
        code, out, _ = cli("check", "-", stdin=SHARING + "\n")
        assert (code, out) == (0, "B(B(L,L),B(P,L))\n")

    def test_direction_override(self, cli):
        """Test policy flags change the verdict for one corpus."""
        term = "bin(bin(lf(5),ptr(2,2.1)),bin(lf(8),lf(7)))"
        assert cli("check", term)[0] == 1
        assert cli("--direction", "left-to-right", "check", term) == (0, "B(B(L,P),B(L,L))\n", "")

    def test_indirect_flag(self, cli):
        term = "bin(bin(lf(5),ptr(1,1)),bin(ptr(2,1.2),lf(7)))"
        assert cli("--direction", "symmetric", "check", term)[0] == 1
        assert cli("--direction", "symmetric", "--indirect", "check", term)[0] == 0

    def test_signature_file(self, cli, tmp_path):
        """Test a ternary signature loaded from a file."""
        path = tmp_path / "tri.json"
        path.write_text(json.dumps({"symbols": [
            {"name": "tri", "arity": 3, "shape": "T"},
            {"name": "lf", "arity": 0, "valued": True, "shape": "L"},
        ]}), encoding="utf-8")
        code, out, _ = cli("--signature", str(path), "check", "tri(lf(1),ptr(1,1),lf(2))")
        assert (code, out) == (0, "T(L,P,L)\n")

    def test_bad_signature_file(self, cli, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"symbols": [{"name": "a", "arity": -2}]}', encoding="utf-8")
        code, _, err = cli("--signature", str(path), "check", "a")
        assert code == 1
        assert "arity" in err

    def test_missing_signature_file(self, cli, tmp_path):
        code, _, _ = cli("--signature", str(tmp_path / "absent.json"), "check", "lf(1)")
        assert code == 2

    def test_encode(self, cli):
        """Test encoding the example graph file."""
        code, out, _ = cli("encode", os.path.join(GOLDEN, "cycle_graph.json"))
        assert (code, out) == (0, CYCLIC + "\n")

    def test_encode_from_stdin(self, cli):
        with open(os.path.join(GOLDEN, "cycle_graph.json"), encoding="utf-8") as handle:
            document = handle.read()
        assert cli("encode", "-", stdin=document) == (0, CYCLIC + "\n", "")

    def test_decode(self, cli):
        code, out, _ = cli("decode", CYCLIC)
        assert code == 0
        document = json.loads(out)
        assert document["root"] == "ε"
        assert {node["id"] for node in document["nodes"]} == {"ε", "1", "1.1", "1.1.2", "2"}

    def test_decode_dot(self, cli):
        code, out, _ = cli("decode", "--dot", CYCLIC)
        assert code == 0
        assert '"1.1" -> "ε" [style=dashed];' in out

    def test_etg_matches_golden_file(self, cli):
        """Test the ETG of the cyclic example byte for byte."""
        with open(os.path.join(GOLDEN, "etg_cycle_example.json"), encoding="utf-8") as handle:
            golden = handle.read()
        code, out, _ = cli("etg", CYCLIC)
        assert code == 0
        assert out == golden

    def test_etg_equals_library_call(self, cli):
        sig = builtin_bintree()
        assert cli("etg", SHARING)[1] == dump_etg(to_etg(parse_term(SHARING, sig), sig))

    def test_letrec(self, cli):
        code, out, _ = cli("letrec", "bin(lf(1),ptr(1))")
        assert (code, out) == (0, "letrec x_e = bin(x_1, x_2); x_1 = lf(1); x_2 = x_e in x_e\n")

    def test_unfold(self, cli):
        code, out, _ = cli("unfold", CYCLIC, "--depth", "2")
        assert (code, out) == (0, "bin(bin(Truncated,Truncated),lf(9))\n")

    @pytest.mark.parametrize("algebra, expected", [
        ("leaves", "{5,6,7}"),
        ("height", "3"),
        ("size", "7"),
        ("skeleton", "B(B(L,L),B(P,L))"),
    ])
    def test_fold(self, cli, algebra, expected):
        assert cli("fold", SHARING, "--alg", algebra) == (0, expected + "\n", "")

    def test_enumerate(self, cli):
        code, out, _ = cli("enumerate", "--max", "1", "--ctx", "B(L,L)")
        assert code == 0
        assert out.splitlines() == ["ptr(1) : P", "ptr(1,1) : P", "ptr(1,2) : P",
                                    "lf(0) : L", "lf(1) : L"]

    def test_output_file(self, cli, tmp_path):
        target = tmp_path / "shape.txt"
        assert cli("-o", str(target), "check", "lf(4)") == (0, "", "")
        assert target.read_text(encoding="utf-8") == "L\n"

    def test_term_from_file(self, cli, tmp_path):
        path = tmp_path / "term.txt"
        path.write_text(SHARING, encoding="utf-8")
        assert cli("fold", "@" + str(path), "--alg", "height")[:2] == (0, "3\n")

    def test_usage_errors(self, cli):
        """Test argparse failures exit 2."""
        assert cli()[0] == 2
        assert cli("fold", SHARING)[0] == 2
        assert cli("frobnicate")[0] == 2

    def test_parse_error(self, cli):
        code, _, err = cli("check", "bin(lf(1),")
        assert code == 1
        assert "ParseFailure" in err

    def test_operations_are_logged(self, cli, temp_db):
        """Test each invocation leaves an audit entry under the given user."""
        cli("--user", "alice", "check", SHARING)
        cli("--user", "alice", "check", "ptr(1)")
        logs = LogManager(StorageManager(temp_db)).get_logs_by_user("alice")
        assert [log['action'] for log in logs] == ["CHECK_FAILED", "CHECK"]

    def test_help_goes_to_the_given_stdout(self, cli):
        code, out, err = cli("--help")
        assert (code, err) == (0, "")
        assert "enumerate" in out

    def test_usage_errors_go_to_the_given_stderr(self, cli):
        """Test argparse messages reach the injected stream, not the process one."""
        code, out, err = cli("frobnicate")
        assert (code, out) == (2, "")
        assert "invalid choice" in err
        code, _, err = cli("fold", SHARING)
        assert code == 2
        assert "--alg" in err

    def test_enumerate_writes_while_generating(self, temp_db):
        """Test lines reach the output before enumeration finishes and logs."""
        logged_at_write = []

        class Recorder(io.StringIO):
            def write(self, text):
                logs = LogManager(StorageManager(temp_db)).get_recent_logs()
                logged_at_write.append(len(logs))
                return super().write(text)

        out = Recorder()
        code = run(["--log-db", temp_db, "enumerate", "--max", "1"],
                   io.StringIO(), out, io.StringIO())
        assert code == 0
        assert out.getvalue() == "lf(0) : L\nlf(1) : L\n"
        assert logged_at_write == [0, 0]
        [entry] = LogManager(StorageManager(temp_db)).get_recent_logs()
        assert entry['action'] == "ENUMERATE"

    def test_configured_defaults(self, cli, temp_db):
        """Test --max, --depth and --user fall back to the configured defaults."""
        code, out, _ = cli("enumerate")
        assert code == 0
        assert len(out.splitlines()) == 13
        assert cli("unfold", CYCLIC)[1] == cli("unfold", CYCLIC, "--depth", "3")[1]
        assert LogManager(StorageManager(temp_db)).get_logs_by_user("cli")


class TestDeepInputs:
    """Inputs nested deeper than the interpreter stack."""

    @pytest.fixture
    def cli(self, temp_db):
        def invoke(*argv):
            out, err = io.StringIO(), io.StringIO()
            code = run(["--log-db", temp_db, *argv], io.StringIO(), out, err)
            return code, out.getvalue(), err.getvalue()
        return invoke

    def test_encode_long_chain(self, cli, tmp_path):
        """Test a 3000-node chain whose nodes all point back to the root."""
        depth = 3000
        nodes = [{"id": f"n{k}", "symbol": "bin",
                  "children": [f"n{k + 1}" if k + 1 < depth else "leaf", "n0"]}
                 for k in range(depth)]
        nodes.append({"id": "leaf", "symbol": "lf", "value": 7, "children": []})
        path = tmp_path / "chain.json"
        path.write_text(json.dumps({"root": "n0", "nodes": nodes}), encoding="utf-8")
        code, out, err = cli("encode", str(path))
        assert (code, err) == (0, "")
        assert out.count("bin(") == depth
        assert "bin(lf(7),ptr(3000))" in out
        assert out.endswith(",ptr(2)),ptr(1))\n")

    def test_check_deep_term(self, cli):
        depth = 2000
        term = "bin(lf(0)," * depth + "lf(0)" + ")" * depth
        code, out, err = cli("check", term)
        assert (code, err) == (0, "")
        assert out == "B(L," * depth + "L" + ")" * depth + "\n"

    def test_stack_exhaustion_is_an_input_error(self, cli, monkeypatch):
        """Test RecursionError from an operation exits 1 with a message."""
        def exhausted(*_args, **_kwargs):
            raise RecursionError("maximum recursion depth exceeded")

        monkeypatch.setattr(TermManager, "fold", exhausted)
        code, out, err = cli("fold", SHARING, "--alg", "height")
        assert (code, out) == (1, "")
        assert "nested too deeply" in err
