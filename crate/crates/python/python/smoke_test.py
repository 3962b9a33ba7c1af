"""Smoke test for the sub2 extension module.

Build the module first, e.g. `maturin develop` in crates/python, or copy
target/release/libsub2.so next to this file as sub2.so.
"""

import sub2


def main():
    pos = sub2.Corpus.pos([
        (["I", "have", "a", "book"], ["PRP", "VBP", "DT", "NN"]),
        (["They", "ate", "an", "orange"], ["PRP", "VBD", "DT", "NN"]),
    ])
    out = pos.augment(seed=7, multiplier=3, max_span_len=2)
    assert len(out) == 2 * 4 + 2 * 2, len(out)
    assert out.validate() == []
    assert out.provenance()[0] is None
    assert out.provenance()[2].startswith("source:")
    again = sub2.Corpus.parse(out.dumps(), "pos")
    assert again.examples() == out.examples()

    report = pos.stats(max_span_len=2)
    assert report["histogram"]["DT NN"] == 2
    assert sum(report["histogram"].values()) == report["total_loci"]

    dep = sub2.Corpus.dep([
        (["My", "cat", "likes", "milk"], [2, 3, 0, 3], ["poss", "nsubj", "root", "dobj"]),
        (["I", "read", "books"], [2, 0, 2], ["nsubj", "root", "dobj"]),
    ])
    assert dep.augment(seed=1, target_size=20, replicate=1).validate() == []

    trees = sub2.Corpus.trees(["(S (NP The cat) (VP is sleeping))", "(S (NP I) (VP love books))"])
    grown = trees.augment(seed=2, multiplier=2)
    assert all(t.startswith("(S ") for t in grown.examples())

    text = sub2.Corpus.text([
        ("positive", ["I", "like", "the", "book"]),
        ("positive", ["I", "like", "the", "movie"], "(S (NP I) (VP like (NP the movie)))"),
    ])
    for method in ["sub2", "balanced", "rand", "randword"]:
        generated = text.augment(seed=3, method=method, multiplier=2, constraints="n,t")
        assert all(len(tokens) == 4 for _, tokens, _ in generated.examples()), method

    assert sub2.balanced_parse(5) == [(0, 5), (0, 2), (2, 5), (3, 5)]
    assert sub2.balanced_tree(["a", "b", "c"]) == "(BAL a (BAL b c))"

    try:
        text.augment(seed=0, constraints="l")
    except sub2.ConfigError:
        pass
    else:
        raise AssertionError("l without p must be rejected")

    try:
        sub2.Corpus.dep([(["a", "b"], [0, 0], ["root", "root"])])
    except sub2.ParseError as e:
        assert "single-root" in str(e)
    else:
        raise AssertionError("two roots must be rejected")

    print("sub2", sub2.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
