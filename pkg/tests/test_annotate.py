import io

import pytest

from proplab.annotate import (
    DEFAULT_DEPTH_CAP,
    DepthCapExceeded,
    annotate,
    annotation_record,
    read_annotations,
    write_annotations,
)
from proplab.formulas import Bin, Op, Var, parse_polish


def _vec(depth_cap, *labels):
    vec = [0] * (2 * depth_cap)
    for step, label in enumerate(labels):
        vec[2 * step + label] = 1
    return vec


class TestAnnotate:
    def test_single_variable(self):
        paths, adjacency = annotate(parse_polish("a"))
        assert paths == [[0] * (2 * DEFAULT_DEPTH_CAP)]
        assert adjacency == [[0]]

    def test_unary_edge(self):
        paths, adjacency = annotate(parse_polish("! a"))
        assert paths[0] == _vec(DEFAULT_DEPTH_CAP)
        assert paths[1] == _vec(DEFAULT_DEPTH_CAP, 0)
        assert adjacency == [[0, 1], [0, 1]]

    def test_example_formula(self):
        # tokens: 0=& 1=! 2=a 3=| 4=b 5=c
        paths, adjacency = annotate(parse_polish("& ! a | b c"))
        assert len(paths) == len(adjacency) == 6
        assert adjacency[0] == [0, 1, 3]  # root: self plus two children
        assert adjacency[1] == [0, 1, 2]
        assert adjacency[2] == [1, 2]
        assert adjacency[3] == [0, 3, 4, 5]
        assert paths[3] == _vec(DEFAULT_DEPTH_CAP, 1)  # right child of root
        assert paths[4] == _vec(DEFAULT_DEPTH_CAP, 1, 0)
        assert paths[5] == _vec(DEFAULT_DEPTH_CAP, 1, 1)

    def test_edge_count_is_tree_plus_self_loops(self):
        f = parse_polish("<-> xor a ! b & c | d e")
        n = 10
        _, adjacency = annotate(f)
        directed = sum(len(nbrs) for nbrs in adjacency)
        # each of the n-1 tree edges appears twice, plus n self entries
        assert directed == 2 * (n - 1) + n

    def test_paths_extend_parent(self):
        f = parse_polish("& ! a | b c")
        paths, adjacency = annotate(f, depth_cap=4)
        # node 4 (b) is the left child of node 3 (|)
        parent = paths[3]
        child = paths[4]
        assert child[:2] == parent[:2]
        assert child[2:4] == [1, 0]

    def test_depth_cap(self):
        f = Var("a")
        for _ in range(17):
            f = Bin(Op.AND, Var("a"), f)
        with pytest.raises(DepthCapExceeded):
            annotate(f, depth_cap=16)
        annotate(f, depth_cap=17)


class TestAnnotationFiles:
    def test_round_trip(self):
        formulas = [parse_polish("a"), parse_polish("& ! a | b c")]
        buf = io.StringIO()
        n = write_annotations(buf, formulas, depth_cap=8)
        assert n == 2
        records = read_annotations(io.StringIO(buf.getvalue()))
        assert [r["index"] for r in records] == [0, 1]
        assert records[1]["tokens"] == ["&", "!", "a", "|", "b", "c"]
        assert records[1]["adjacency"] == annotate(formulas[1], depth_cap=8)[1]

    def test_record_shape(self):
        record = annotation_record(7, parse_polish("! a"), depth_cap=4)
        assert record["index"] == 7
        assert len(record["paths"][0]) == 8
