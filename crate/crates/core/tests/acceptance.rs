//! Acceptance suite. Each check prints one PASS/FAIL line; the process exits
//! nonzero if any check fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use statrs::distribution::{ChiSquared, ContinuousCDF};

use common::*;
use sub2_core::augment::{augment, one_step_reachable, AugmentConfig, Method, SizeSpec, SourcePool};
use sub2_core::corpus::{
    parse_tree, tree_to_string, ConstTree, Dataset, DepSentence, Example, Provenance, TagColumn, TaggedSentence,
    TextExample, TextFormat,
};
use sub2_core::substructure::{
    balanced_parse, BalancedTree, ConstScheme, Constraint, ConstraintSet, DepScheme, LabelKey, Locus, PosScheme,
    Restricted, Site, SubstructureIndex, TextScheme,
};
use sub2_core::validate::validate_dataset;

fn within(limit: Duration, start: Instant) {
    let took = start.elapsed();
    assert!(took < limit, "took {:?}, limit {:?}", took, limit);
}

fn set<E: std::fmt::Debug>(xs: impl IntoIterator<Item = E>) -> BTreeSet<String> {
    multiset(xs).into_iter().collect()
}

fn generated<E: Example>(d: &Dataset<E>) -> Vec<&E> {
    d.iter()
        .filter(|(_, p)| matches!(p, Provenance::Generated(_)))
        .map(|(e, _)| e)
        .collect()
}

// 1 -----------------------------------------------------------------------

fn pos_span_example() {
    let start = Instant::now();
    let d = Dataset::new(vec![
        TaggedSentence::from_strs(&["I", "have", "a", "book"], &["PRP", "VBP", "DT", "NN"]).unwrap(),
        TaggedSentence::from_strs(&["They", "ate", "an", "orange"], &["PRP", "VBD", "DT", "NN"]).unwrap(),
    ]);
    let scheme = Restricted::new(PosScheme::new(Some(2)), [LabelKey::from_strs(&["DT", "NN"])]);
    let got = set(one_step_reachable(&scheme, &d).unwrap().into_iter().map(|s| s.example));
    let want = set([
        TaggedSentence::from_strs(&["I", "have", "an", "orange"], &["PRP", "VBP", "DT", "NN"]).unwrap(),
        TaggedSentence::from_strs(&["They", "ate", "a", "book"], &["PRP", "VBD", "DT", "NN"]).unwrap(),
    ]);
    assert_eq!(got, want);
    within(Duration::from_secs(1), start);
}

// 2 -----------------------------------------------------------------------

fn const_dep_text_examples() {
    let start = Instant::now();
    let d: Dataset<ConstTree> = ["(S (NP The cat) (VP is sleeping))", "(S (NP I) (VP love books))"]
        .iter()
        .map(|s| parse_tree(s, 1).unwrap())
        .collect();
    let scheme = Restricted::new(ConstScheme::new(false), [LabelKey::from_strs(&["VP"])]);
    let got: BTreeSet<String> = one_step_reachable(&scheme, &d)
        .unwrap()
        .iter()
        .map(|s| tree_to_string(&s.example))
        .collect();
    let want: BTreeSet<String> = ["(S (NP The cat) (VP love books))", "(S (NP I) (VP is sleeping))"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    assert_eq!(got, want);
    within(Duration::from_secs(1), start);

    let start = Instant::now();
    let d = Dataset::new(vec![
        DepSentence::from_strs(&["My", "cat", "likes", "milk"], &[2, 3, 0, 3], &["poss", "nsubj", "root", "dobj"])
            .unwrap(),
        DepSentence::from_strs(&["I", "read", "books"], &[2, 0, 2], &["nsubj", "root", "dobj"]).unwrap(),
    ]);
    let scheme = Restricted::new(DepScheme, [LabelKey::from_strs(&["dobj"])]);
    let got = set(one_step_reachable(&scheme, &d).unwrap().into_iter().map(|s| s.example));
    let want = set([
        DepSentence::from_strs(&["My", "cat", "likes", "books"], &[2, 3, 0, 3], &["poss", "nsubj", "root", "dobj"])
            .unwrap(),
        DepSentence::from_strs(&["I", "read", "milk"], &[2, 0, 2], &["nsubj", "root", "dobj"]).unwrap(),
    ]);
    assert_eq!(got, want);
    within(Duration::from_secs(1), start);

    let start = Instant::now();
    let d = Dataset::new(vec![
        TextExample::from_strs("positive", &["I", "like", "the", "book"]).unwrap(),
        TextExample::from_strs("positive", &["I", "like", "the", "movie"]).unwrap(),
    ]);
    let scheme = TextScheme::new(ConstraintSet::new([Constraint::N, Constraint::T])).unwrap();
    let all = one_step_reachable(&scheme, &d).unwrap();
    let pick = |s: (usize, Site), v: (usize, Site)| {
        all.iter()
            .find(|x| x.source == Locus::new(s.0, s.1.clone()) && x.donor == Locus::new(v.0, v.1.clone()))
            .map(|x| x.example.clone())
            .unwrap()
    };
    assert_eq!(
        pick((0, Site::Span(1, 3)), (1, Site::Span(2, 4))),
        TextExample::from_strs("positive", &["I", "the", "movie", "book"]).unwrap()
    );
    assert_eq!(
        pick((1, Site::Span(2, 4)), (0, Site::Span(1, 3))),
        TextExample::from_strs("positive", &["I", "like", "like", "the"]).unwrap()
    );
    for s in &all {
        assert_eq!(s.example.label, "positive");
        assert_eq!(s.example.tokens.len(), 4);
    }
    within(Duration::from_secs(1), start);
}

// 3 -----------------------------------------------------------------------

fn oracle_equivalence() {
    let start = Instant::now();
    let mut compared = 0;
    for task in ["pos", "dep", "const", "text"] {
        for seed in 0..1000 {
            compared += oracle_trial(task, 10_000 + seed).unwrap_or_else(|e| panic!("{}", e));
        }
    }
    assert!(compared > 0);
    within(Duration::from_secs(30), start);
}

// 4 -----------------------------------------------------------------------

fn dep_well_formed_at_scale() {
    let mut r = rng(4);
    let d = dataset(1000, || random_projective_dep(&mut r, 3, 25));
    let start = Instant::now();
    let out = augment(&d, &AugmentConfig::new(4).size(SizeSpec::Multiplier(20))).unwrap();
    let gen = generated(&out);
    assert_eq!(gen.len(), 20_000);
    let only_generated = Dataset::new(gen.into_iter().cloned().collect());
    let violations = validate_dataset(&only_generated);
    assert!(violations.is_empty(), "{}", violations[0]);
    within(Duration::from_secs(10), start);
}

// 5 -----------------------------------------------------------------------

fn size_arithmetic() {
    for size in [10, 100] {
        let mut r = rng(size as u64);
        let d = dataset(size, || random_pos(&mut r, 8));
        for k in [2, 5, 20] {
            let out = augment(&d, &AugmentConfig::new(1).size(SizeSpec::Multiplier(k)).replicate(k)).unwrap();
            assert_eq!(out.len(), (k + 1) * size + (k - 1) * size, "|D| = {}, k = {}", size, k);
            let counts = out.provenance().iter().fold([0usize; 3], |mut c, p| {
                c[match p {
                    Provenance::Original => 0,
                    Provenance::Generated(_) => 1,
                    Provenance::Replicated { .. } => 2,
                }] += 1;
                c
            });
            assert_eq!(counts, [size, k * size, (k - 1) * size]);
            // The default replication factor equals the multiplier.
            assert_eq!(augment(&d, &AugmentConfig::new(1).size(SizeSpec::Multiplier(k))).unwrap().len(), out.len());
        }
    }
}

// 6 -----------------------------------------------------------------------

fn determinism() {
    let mut r = rng(6);
    let pos = dataset(40, || random_pos(&mut r, 8));
    let dep = dataset(40, || random_projective_dep(&mut r, 2, 10));
    let cons = dataset(40, || random_const(&mut r, 3));
    let text = dataset(40, || random_text(&mut r, 3));
    for method in [Method::Sub2, Method::Rand, Method::RandWord] {
        let run = |seed: u64| {
            let c = AugmentConfig::new(seed).method(method).size(SizeSpec::Multiplier(5));
            let mut bytes = roundtrip_pos(&augment(&pos, &c).unwrap(), TagColumn::Upos).0;
            bytes.extend(roundtrip_dep(&augment(&dep, &c).unwrap()).0);
            bytes.extend(roundtrip_const(&augment(&cons, &c).unwrap()).0);
            bytes.extend(roundtrip_text(&augment(&text, &c).unwrap(), TextFormat::Jsonl).0);
            bytes
        };
        assert_eq!(run(17), run(17), "{} is not reproducible", method);
        assert_ne!(run(17), run(18), "{} ignores the seed", method);
    }
    let run = |seed: u64| {
        let c = AugmentConfig::new(seed).method(Method::BalancedSub2).size(SizeSpec::Multiplier(5));
        roundtrip_text(&augment(&text, &c).unwrap(), TextFormat::Jsonl).0
    };
    assert_eq!(run(3), run(3));
    assert_ne!(run(3), run(4));
}

// 7 -----------------------------------------------------------------------

fn chi_square(observed: &BTreeMap<Locus, usize>, cells: usize, draws: usize) -> f64 {
    assert_eq!(observed.len(), cells, "some locus was never drawn");
    let expected = draws as f64 / cells as f64;
    let stat: f64 = observed
        .values()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum();
    ChiSquared::new((cells - 1) as f64).unwrap().sf(stat)
}

fn uniform_sampling() {
    // One key, loci multiplicities 1, 2, 3 and 4 across the examples.
    let d: Dataset<TaggedSentence> = [1usize, 2, 3, 4]
        .iter()
        .map(|&n| {
            let forms: Vec<String> = (0..n).map(|i| format!("w{}", i)).collect();
            let forms: Vec<&str> = forms.iter().map(String::as_str).collect();
            TaggedSentence::from_strs(&forms, &vec!["X"; n]).unwrap()
        })
        .collect();
    let draws = 100_000;
    let config = AugmentConfig::new(7)
        .size(SizeSpec::Target(d.len() + draws))
        .replicate(1)
        .max_span_len(Some(1))
        .source_pool(SourcePool::Original);
    let out = augment(&d, &config).unwrap();
    let mut sources: BTreeMap<Locus, usize> = BTreeMap::new();
    let mut donors: BTreeMap<Locus, usize> = BTreeMap::new();
    for (_, p) in out.iter() {
        if let Provenance::Generated(g) = p {
            let (s, v) = g.sites.clone().unwrap();
            assert_ne!((g.source, &s), (g.donor.unwrap(), &v));
            *sources.entry(Locus::new(g.source, s)).or_default() += 1;
            *donors.entry(Locus::new(g.donor.unwrap(), v)).or_default() += 1;
        }
    }
    let p_source = chi_square(&sources, 10, draws);
    let p_donor = chi_square(&donors, 10, draws);
    assert!(p_source > 0.01, "source draws p = {}", p_source);
    assert!(p_donor > 0.01, "donor draws p = {}", p_donor);
}

// 8 -----------------------------------------------------------------------

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v
}

fn skeleton(t: &ConstTree) -> ConstTree {
    match t {
        ConstTree::Leaf(_) => ConstTree::leaf("_"),
        ConstTree::Node { label, aux, children } => ConstTree::Node {
            label: label.clone(),
            aux: aux.clone(),
            children: children.iter().map(skeleton).collect(),
        },
    }
}

fn dep_triples(s: &DepSentence) -> Vec<(String, String, String)> {
    sorted(
        (0..s.tokens.len())
            .map(|i| {
                let head = match s.heads[i] {
                    0 => "ROOT".to_string(),
                    h => s.tokens[h - 1].to_string(),
                };
                (s.tokens[i].to_string(), head, s.deprels[i].clone())
            })
            .collect(),
    )
}

fn differing_positions(a: &[&str], b: &[&str]) -> usize {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Generated examples of a baseline paired with their source.
fn baseline_pairs<E: sub2_core::augment::Augmentable>(d: &Dataset<E>, method: Method) -> Vec<(E, E)> {
    let config = AugmentConfig::new(8).method(method).size(SizeSpec::Target(d.len() + 10_000)).replicate(1);
    let out = augment(d, &config).unwrap();
    assert!(validate_dataset(&out).is_empty());
    let pairs: Vec<(E, E)> = out
        .iter()
        .filter_map(|(e, p)| match p {
            Provenance::Generated(g) => Some((e.clone(), d.examples()[g.source].clone())),
            _ => None,
        })
        .collect();
    assert_eq!(pairs.len(), 10_000);
    pairs
}

fn baseline_conservation() {
    let mut r = rng(8);
    let pos = dataset(50, || random_pos(&mut r, 10));
    let dep = dataset(50, || random_projective_dep(&mut r, 2, 12));
    let cons = dataset(50, || random_const(&mut r, 3));
    let text = dataset(50, || random_text(&mut r, 3));

    let pairing = |s: &TaggedSentence| sorted(s.tokens.iter().cloned().zip(s.tags.iter().cloned()).collect());
    for (e, src) in baseline_pairs(&pos, Method::Rand) {
        assert_eq!(pairing(&e), pairing(&src));
    }
    for (e, src) in baseline_pairs(&dep, Method::Rand) {
        assert_eq!(dep_triples(&e), dep_triples(&src));
    }
    for (e, src) in baseline_pairs(&cons, Method::Rand) {
        assert_eq!(skeleton(&e), skeleton(&src));
        assert_eq!(sorted(e.forms()), sorted(src.forms()));
    }
    for (e, src) in baseline_pairs(&text, Method::Rand) {
        assert_eq!(e.label, src.label);
        assert_eq!(sorted(e.forms()), sorted(src.forms()));
    }

    for (e, src) in baseline_pairs(&pos, Method::RandWord) {
        assert_eq!(differing_positions(&e.forms(), &src.forms()), 1);
        assert_eq!(e.tags, src.tags);
    }
    for (e, src) in baseline_pairs(&dep, Method::RandWord) {
        assert_eq!(differing_positions(&e.forms(), &src.forms()), 1);
        assert_eq!((&e.heads, &e.deprels), (&src.heads, &src.deprels));
    }
    for (e, src) in baseline_pairs(&cons, Method::RandWord) {
        assert_eq!(differing_positions(&e.forms(), &src.forms()), 1);
        assert_eq!(skeleton(&e), skeleton(&src));
    }
    for (e, src) in baseline_pairs(&text, Method::RandWord) {
        assert_eq!(differing_positions(&e.forms(), &src.forms()), 1);
        assert_eq!(e.label, src.label);
    }
}

// 9 -----------------------------------------------------------------------

fn check_splits(t: &BalancedTree) -> usize {
    match t {
        BalancedTree::Leaf(_) => 1,
        BalancedTree::Node { span, left, right } => {
            let len = span.1 - span.0;
            let (l, r) = (check_splits(left), check_splits(right));
            assert_eq!((l, r), (len / 2, len - len / 2), "split of {:?}", span);
            assert_eq!(left.span(), (span.0, span.0 + l));
            assert_eq!(right.span(), (span.0 + l, span.1));
            len
        }
    }
}

fn balanced_shape() {
    for n in 1..=64 {
        let t = balanced_parse(n).unwrap();
        assert_eq!(check_splits(&t), n);
        assert_eq!(t.nonterminal_spans().len(), n - 1);
    }
}

// 10 ----------------------------------------------------------------------

fn lattice() {
    let mut r = rng(10);
    let d = dataset(12, || random_text(&mut r, 3));
    let flags = [Constraint::N, Constraint::P, Constraint::L, Constraint::T, Constraint::Senti];
    let mut lattice = Vec::new();
    for mask in 0u32..32 {
        let c = ConstraintSet::new(flags.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, f)| *f));
        if c.validate().is_ok() {
            let index = SubstructureIndex::build(&TextScheme::new(c.clone()).unwrap(), &d).unwrap();
            lattice.push((c, index));
        }
    }
    let loci = |i: &SubstructureIndex| -> BTreeSet<Locus> { i.loci().into_iter().cloned().collect() };
    let find = |c: &ConstraintSet| &lattice.iter().find(|(x, _)| x == c).unwrap().1;
    let all = loci(find(&ConstraintSet::default()));
    let phrases = loci(find(&ConstraintSet::new([Constraint::P])));
    assert!(phrases.is_subset(&all));
    assert!(phrases.len() < all.len());

    let mut checked = 0;
    for (fine, fine_index) in &lattice {
        for (coarse, coarse_index) in &lattice {
            let subset = coarse.flags().all(|f| fine.contains(f));
            if !subset || fine.contains(Constraint::P) != coarse.contains(Constraint::P) {
                continue;
            }
            assert_eq!(loci(fine_index), loci(coarse_index), "{} vs {}", fine, coarse);
            for fine_class in fine_index.entries().values() {
                let key = coarse_index.key_of(&fine_class[0]).unwrap();
                let coarse_class: BTreeSet<&Locus> = coarse_index.get(key).iter().collect();
                assert!(fine_class.iter().all(|l| coarse_class.contains(l)), "{} does not refine {}", fine, coarse);
            }
            checked += 1;
        }
    }
    assert!(checked > 10);
}

// 11 ----------------------------------------------------------------------

fn round_trips() {
    let mut r = rng(11);
    let config = AugmentConfig::new(11).size(SizeSpec::Target(500)).replicate(1);

    let mut pos: Dataset<TaggedSentence> = Dataset::new(Vec::new());
    for i in 0..100 {
        let mut s = random_pos(&mut r, 12);
        s.comments = vec![format!(" sent_id = train-{}", i)];
        pos.push(s, Provenance::Original);
    }
    let pos = augment(&pos, &config).unwrap();
    assert_eq!(pos.len(), 500);
    for col in [TagColumn::Upos, TagColumn::Xpos] {
        let (_, back) = roundtrip_pos(&pos, col);
        assert_eq!(back.examples(), pos.examples());
        assert_eq!(back.provenance().to_vec(), stored(&pos));
    }

    let dep = augment(&dataset(100, || random_projective_dep(&mut r, 1, 20)), &config).unwrap();
    let (_, back) = roundtrip_dep(&dep);
    assert_eq!(back.examples(), dep.examples());
    assert_eq!(back.provenance().to_vec(), stored(&dep));

    let cons = augment(&dataset(100, || random_const_aux(&mut r, 4)), &config.clone().use_aux(true)).unwrap();
    let (_, back) = roundtrip_const(&cons);
    assert_eq!(back.examples(), cons.examples());
    assert_eq!(back.provenance().to_vec(), stored(&cons));

    let text = augment(&dataset(100, || random_text(&mut r, 3)), &config).unwrap();
    let (_, back) = roundtrip_text(&text, TextFormat::Jsonl);
    assert_eq!(back.examples(), text.examples());
    assert_eq!(back.provenance().to_vec(), stored(&text));

    let plain: Dataset<TextExample> = text
        .examples()
        .iter()
        .map(|e| TextExample::new(e.label.clone(), e.tokens.clone()))
        .collect();
    let (_, back) = roundtrip_text(&plain, TextFormat::Tsv);
    assert_eq!(back, plain);
    assert_eq!(back.len(), 500);
}

// -------------------------------------------------------------------------

fn main() {
    let checks: [(&str, fn()); 11] = [
        ("pos span swap worked example", pos_span_example),
        ("constituent, dependency and text worked examples", const_dep_text_examples),
        ("one-step sets match brute-force enumeration", oracle_equivalence),
        ("20000 generated dependency trees are well formed", dep_well_formed_at_scale),
        ("output size arithmetic", size_arithmetic),
        ("seeded determinism", determinism),
        ("uniform draws over loci", uniform_sampling),
        ("baseline conservation", baseline_conservation),
        ("balanced tree splits", balanced_shape),
        ("text constraint lattice", lattice),
        ("format round trips", round_trips),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check));
        let took = start.elapsed();
        match outcome {
            Ok(()) => println!("criterion {:>2} PASS  {} ({:.2?})", i + 1, name, took),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {:>2} FAIL  {} ({:.2?}): {}", i + 1, name, took, msg);
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
