//! Random fixtures and brute-force enumerators shared by the integration
//! tests. The enumerators work from first principles (descendant sets,
//! recursive rebuilding, explicit index maps) and never call into the
//! library's index or splice code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sub2_core::corpus::{tokens, ConstTree, Dataset, DepSentence, TaggedSentence, TextExample};
use sub2_core::substructure::{Constraint, ConstraintSet};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

const WORDS: &[&str] = &["the", "cat", "dog", "runs", "a", "big", "milk", "sees", "old", "book"];
const TAGS: &[&str] = &["DT", "NN", "VB", "JJ"];
const DEPRELS: &[&str] = &["nsubj", "obj", "det", "amod"];
const PHRASES: &[&str] = &["S", "NP", "VP", "PP"];
const SENTI: &[&str] = &["0", "1", "2"];
const CLASSES: &[&str] = &["pos", "neg"];

fn pick<'a>(rng: &mut TestRng, xs: &[&'a str]) -> &'a str {
    xs[rng.gen_range(0..xs.len())]
}

fn words(rng: &mut TestRng, n: usize) -> Vec<&'static str> {
    (0..n).map(|_| pick(rng, WORDS)).collect()
}

pub fn random_pos(rng: &mut TestRng, max_len: usize) -> TaggedSentence {
    let n = rng.gen_range(1..=max_len);
    let w = words(rng, n);
    let t: Vec<&str> = (0..n).map(|_| pick(rng, &TAGS[..2])).collect();
    TaggedSentence::from_strs(&w, &t).unwrap()
}

/// Random tree with arbitrary (possibly crossing) arcs.
pub fn random_dep(rng: &mut TestRng, max_len: usize) -> DepSentence {
    let n = rng.gen_range(1..=max_len);
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut heads = vec![0; n];
    for k in 1..n {
        heads[order[k] - 1] = order[rng.gen_range(0..k)];
    }
    let mut rels: Vec<&str> = (0..n).map(|_| pick(rng, &DEPRELS[..2])).collect();
    rels[order[0] - 1] = "root";
    DepSentence::from_strs(&words(rng, n), &heads, &rels).unwrap()
}

/// Random projective tree, shaped loosely like treebank sentences.
pub fn random_projective_dep(rng: &mut TestRng, min_len: usize, max_len: usize) -> DepSentence {
    fn attach(rng: &mut TestRng, lo: usize, hi: usize, parent: usize, heads: &mut [usize]) -> usize {
        let h = rng.gen_range(lo..hi);
        heads[h] = parent;
        let split = |rng: &mut TestRng, a: usize, b: usize, heads: &mut [usize]| {
            let mut start = a;
            while start < b {
                let end = rng.gen_range(start + 1..=b);
                attach(rng, start, end, h + 1, heads);
                start = end;
            }
        };
        split(rng, lo, h, heads);
        split(rng, h + 1, hi, heads);
        h
    }
    let n = rng.gen_range(min_len..=max_len);
    let mut heads = vec![0; n];
    let root = attach(rng, 0, n, 0, &mut heads);
    let rels: Vec<&str> = (0..n)
        .map(|i| if i == root { "root" } else { pick(rng, DEPRELS) })
        .collect();
    DepSentence::from_strs(&words(rng, n), &heads, &rels).unwrap()
}

fn random_node(rng: &mut TestRng, depth: usize, labels: &[&str], aux: bool) -> ConstTree {
    let arity = rng.gen_range(1..=3);
    let children = (0..arity)
        .map(|_| {
            if depth == 0 || rng.gen_bool(0.45) {
                ConstTree::leaf(pick(rng, WORDS))
            } else {
                random_node(rng, depth - 1, labels, aux)
            }
        })
        .collect();
    let label = pick(rng, labels);
    if aux {
        ConstTree::node_with_aux(label, pick(rng, SENTI), children)
    } else {
        ConstTree::node(label, children)
    }
}

pub fn random_const(rng: &mut TestRng, depth: usize) -> ConstTree {
    random_node(rng, depth, &PHRASES[..3], false)
}

pub fn random_const_aux(rng: &mut TestRng, depth: usize) -> ConstTree {
    random_node(rng, depth, &PHRASES[..3], true)
}

/// Text example whose tokens are the yield of a random fully annotated parse.
pub fn random_text(rng: &mut TestRng, depth: usize) -> TextExample {
    let parse = random_node(rng, depth, &PHRASES[..2], true);
    let forms: Vec<String> = parse.yield_forms().into_iter().map(str::to_string).collect();
    TextExample::new(pick(rng, CLASSES), tokens(&forms).unwrap())
        .with_parse(parse)
        .unwrap()
}

pub fn dataset<E: sub2_core::corpus::Example>(n: usize, mut make: impl FnMut() -> E) -> Dataset<E> {
    (0..n).map(|_| make()).collect()
}

pub fn random_constraints(rng: &mut TestRng) -> ConstraintSet {
    let mut c = ConstraintSet::default();
    for f in [Constraint::N, Constraint::T] {
        if rng.gen_bool(0.5) {
            c.insert(f);
        }
    }
    if rng.gen_bool(0.6) {
        c.insert(Constraint::P);
        for f in [Constraint::L, Constraint::Senti] {
            if rng.gen_bool(0.5) {
                c.insert(f);
            }
        }
    }
    if rng.gen_bool(0.3) {
        c = c.with_max_span_len(Some(rng.gen_range(1..=3)));
    }
    c
}

/// Sorted debug renderings, so outputs compare as multisets.
pub fn multiset<E: std::fmt::Debug>(xs: impl IntoIterator<Item = E>) -> Vec<String> {
    let mut out: Vec<String> = xs.into_iter().map(|x| format!("{:?}", x)).collect();
    out.sort();
    out
}

/// All ordered pairs of distinct occurrences sharing a key.
fn pairs<L: Clone + PartialEq, K: Ord>(occ: Vec<(K, L)>) -> Vec<(L, L)> {
    let mut groups: BTreeMap<K, Vec<L>> = BTreeMap::new();
    for (k, l) in occ {
        groups.entry(k).or_default().push(l);
    }
    let mut out = Vec::new();
    for group in groups.values() {
        for s in group {
            for v in group {
                if s != v {
                    out.push((s.clone(), v.clone()));
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------- pos

pub fn pos_spans(d: &Dataset<TaggedSentence>, cap: Option<usize>) -> Vec<(Vec<String>, (usize, usize, usize))> {
    let mut occ = Vec::new();
    for (x, e) in d.examples().iter().enumerate() {
        let n = e.tokens.len();
        for i in 0..n {
            for j in i + 1..=n {
                if cap.is_none_or(|c| j - i <= c) {
                    occ.push((e.tags[i..j].to_vec(), (x, i, j)));
                }
            }
        }
    }
    occ
}

pub fn oracle_pos(d: &Dataset<TaggedSentence>, cap: Option<usize>) -> Vec<TaggedSentence> {
    pairs(pos_spans(d, cap))
        .into_iter()
        .map(|((x, i, j), (y, c, e))| {
            let host = &d.examples()[x];
            let donor = &d.examples()[y];
            let mut toks = host.tokens[..i].to_vec();
            toks.extend_from_slice(&donor.tokens[c..e]);
            toks.extend_from_slice(&host.tokens[j..]);
            let mut tags = host.tags[..i].to_vec();
            tags.extend_from_slice(&donor.tags[c..e]);
            tags.extend_from_slice(&host.tags[j..]);
            TaggedSentence::new(toks, tags)
        })
        .collect()
}

// ---------------------------------------------------------------- dep

/// 1-based descendants of `t`, itself included.
pub fn descendants(s: &DepSentence, t: usize) -> Vec<usize> {
    let mut out = vec![t];
    let mut k = 0;
    while k < out.len() {
        let cur = out[k];
        for (i, &h) in s.heads.iter().enumerate() {
            if h == cur {
                out.push(i + 1);
            }
        }
        k += 1;
    }
    out.sort();
    out
}

/// Non-root tokens whose subtree covers an unbroken stretch of positions.
pub fn dep_subtrees(d: &Dataset<DepSentence>) -> Vec<(String, (usize, usize))> {
    let mut occ = Vec::new();
    for (x, s) in d.examples().iter().enumerate() {
        for t in 1..=s.tokens.len() {
            if s.heads[t - 1] == 0 {
                continue;
            }
            let desc = descendants(s, t);
            if desc.windows(2).all(|w| w[1] == w[0] + 1) {
                occ.push((s.deprels[t - 1].clone(), (x, t)));
            }
        }
    }
    occ
}

pub fn dep_splice(host: &DepSentence, t: usize, donor: &DepSentence, u: usize) -> DepSentence {
    let hb = descendants(host, t);
    let db = descendants(donor, u);
    let (a, b) = (hb[0], *hb.last().unwrap());
    let (c, _) = (db[0], *db.last().unwrap());
    // Old host position / donor position → new position.
    let mut host_map = BTreeMap::new();
    let mut donor_map = BTreeMap::new();
    let mut forms = Vec::new();
    let mut origin = Vec::new();
    for p in 1..a {
        forms.push(host.tokens[p - 1].clone());
        origin.push((true, p));
        host_map.insert(p, forms.len());
    }
    for &q in &db {
        forms.push(donor.tokens[q - 1].clone());
        origin.push((false, q));
        donor_map.insert(q, forms.len());
    }
    for p in b + 1..=host.tokens.len() {
        forms.push(host.tokens[p - 1].clone());
        origin.push((true, p));
        host_map.insert(p, forms.len());
    }
    let _ = c;
    let mut heads = Vec::new();
    let mut rels = Vec::new();
    for (from_host, k) in origin {
        if from_host {
            let h = host.heads[k - 1];
            heads.push(if h == 0 { 0 } else { host_map[&h] });
            rels.push(host.deprels[k - 1].clone());
        } else if k == u {
            heads.push(host_map[&host.heads[t - 1]]);
            rels.push(host.deprels[t - 1].clone());
        } else {
            heads.push(donor_map[&donor.heads[k - 1]]);
            rels.push(donor.deprels[k - 1].clone());
        }
    }
    DepSentence::new(forms, heads, rels)
}

pub fn oracle_dep(d: &Dataset<DepSentence>) -> Vec<DepSentence> {
    pairs(dep_subtrees(d))
        .into_iter()
        .map(|((x, t), (y, u))| dep_splice(&d.examples()[x], t, &d.examples()[y], u))
        .collect()
}

// ---------------------------------------------------------------- const

/// Every internal node as (key, path), recursively.
pub fn const_nodes(tree: &ConstTree, use_aux: bool) -> Vec<(Vec<String>, Vec<usize>)> {
    fn go(t: &ConstTree, path: &mut Vec<usize>, use_aux: bool, out: &mut Vec<(Vec<String>, Vec<usize>)>) {
        if let ConstTree::Node { label, aux, children } = t {
            let mut key = vec![label.clone()];
            if use_aux {
                key.push(aux.clone().unwrap_or_default());
            }
            out.push((key, path.clone()));
            for (i, c) in children.iter().enumerate() {
                path.push(i);
                go(c, path, use_aux, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(tree, &mut Vec::new(), use_aux, &mut out);
    out
}

pub fn subtree_at<'a>(t: &'a ConstTree, path: &[usize]) -> &'a ConstTree {
    path.iter().fold(t, |node, &i| match node {
        ConstTree::Node { children, .. } => &children[i],
        ConstTree::Leaf(_) => panic!("path runs through a leaf"),
    })
}

pub fn replace_at(t: &ConstTree, path: &[usize], with: &ConstTree) -> ConstTree {
    match path.split_first() {
        None => with.clone(),
        Some((&i, rest)) => match t {
            ConstTree::Node { label, aux, children } => ConstTree::Node {
                label: label.clone(),
                aux: aux.clone(),
                children: children
                    .iter()
                    .enumerate()
                    .map(|(k, c)| if k == i { replace_at(c, rest, with) } else { c.clone() })
                    .collect(),
            },
            ConstTree::Leaf(_) => panic!("path runs through a leaf"),
        },
    }
}

pub fn oracle_const(d: &Dataset<ConstTree>, use_aux: bool) -> Vec<ConstTree> {
    let occ = d
        .examples()
        .iter()
        .enumerate()
        .flat_map(|(x, t)| const_nodes(t, use_aux).into_iter().map(move |(k, p)| (k, (x, p))))
        .collect();
    pairs(occ)
        .into_iter()
        .map(|((x, p), (y, q))| replace_at(&d.examples()[x], &p, subtree_at(&d.examples()[y], &q)))
        .collect()
}

/// Labels of all internal nodes, sorted.
pub fn label_multiset(t: &ConstTree) -> Vec<String> {
    let mut v: Vec<String> = const_nodes(t, false).into_iter().map(|(k, _)| k[0].clone()).collect();
    v.sort();
    v
}

// ---------------------------------------------------------------- text

/// Spans of parse constituents with the label and aux of the outermost
/// constituent covering exactly that span.
pub fn phrase_spans(parse: &ConstTree) -> BTreeMap<(usize, usize), (String, String)> {
    fn go(t: &ConstTree, start: usize, out: &mut BTreeMap<(usize, usize), (String, String)>) -> usize {
        match t {
            ConstTree::Leaf(_) => start + 1,
            ConstTree::Node { label, aux, children } => {
                let mut end = start;
                for c in children {
                    end = go(c, end, out);
                }
                // Children are visited first, so the parent overwrites.
                out.insert((start, end), (label.clone(), aux.clone().unwrap_or_default()));
                end
            }
        }
    }
    let mut out = BTreeMap::new();
    go(parse, 0, &mut out);
    out
}

/// Label and aux of a phrase.
type Phrase = (String, String);

pub fn text_spans(d: &Dataset<TextExample>, c: &ConstraintSet) -> Vec<(Vec<String>, (usize, usize, usize))> {
    let has = |f| c.contains(f);
    let mut occ = Vec::new();
    for (x, e) in d.examples().iter().enumerate() {
        let n = e.tokens.len();
        let mut spans: Vec<((usize, usize), Option<Phrase>)> = Vec::new();
        if has(Constraint::P) {
            for (s, info) in phrase_spans(e.parse.as_ref().expect("parsed fixture")) {
                spans.push((s, Some(info)));
            }
        } else {
            for i in 0..n {
                for j in i + 1..=n {
                    spans.push(((i, j), None));
                }
            }
        }
        for ((i, j), info) in spans {
            if c.max_span_len.is_some_and(|m| j - i > m) {
                continue;
            }
            let mut key = Vec::new();
            if has(Constraint::N) {
                key.push((j - i).to_string());
            }
            if has(Constraint::L) {
                key.push(info.as_ref().unwrap().0.clone());
            }
            if has(Constraint::Senti) {
                key.push(info.as_ref().unwrap().1.clone());
            }
            if has(Constraint::T) {
                key.push(e.label.clone());
            }
            if key.is_empty() {
                key.push("*".into());
            }
            occ.push((key, (x, i, j)));
        }
    }
    occ
}

pub fn oracle_text(d: &Dataset<TextExample>, c: &ConstraintSet) -> Vec<TextExample> {
    pairs(text_spans(d, c))
        .into_iter()
        .map(|((x, i, j), (y, a, b))| {
            let host = &d.examples()[x];
            let donor = &d.examples()[y];
            let mut toks = host.tokens[..i].to_vec();
            toks.extend_from_slice(&donor.tokens[a..b]);
            toks.extend_from_slice(&host.tokens[j..]);
            TextExample::new(host.label.clone(), toks)
        })
        .collect()
}

// ---------------------------------------------------------------- trials

use sub2_core::augment::one_step_reachable;
use sub2_core::substructure::{ConstScheme, DepScheme, PosScheme, TextScheme};

fn compare<E: std::fmt::Debug>(what: &str, seed: u64, got: Vec<E>, want: Vec<E>) -> Result<usize, String> {
    let (got, want) = (multiset(got), multiset(want));
    if got == want {
        Ok(got.len())
    } else {
        Err(format!(
            "{} seed {}: library produced {} examples, oracle {}",
            what,
            seed,
            got.len(),
            want.len()
        ))
    }
}

/// One randomized comparison of the library's one-step reachable set against
/// the matching brute-force enumerator. Returns the number of examples
/// compared.
pub fn oracle_trial(task: &str, seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    let size = r.gen_range(1..=5);
    let lib = |e: sub2_core::Error| format!("{} seed {}: {}", task, seed, e);
    match task {
        "pos" => {
            let cap = if r.gen_bool(0.5) { Some(r.gen_range(1..=3)) } else { None };
            let d = dataset(size, || random_pos(&mut r, 5));
            let got = one_step_reachable(&PosScheme::new(cap), &d).map_err(lib)?;
            compare(task, seed, got.into_iter().map(|s| s.example).collect(), oracle_pos(&d, cap))
        }
        "dep" => {
            let d = dataset(size, || random_dep(&mut r, 6));
            let got = one_step_reachable(&DepScheme, &d).map_err(lib)?;
            compare(task, seed, got.into_iter().map(|s| s.example).collect(), oracle_dep(&d))
        }
        "const" => {
            let use_aux = r.gen_bool(0.5);
            let d = if use_aux {
                dataset(size, || random_const_aux(&mut r, 3))
            } else {
                dataset(size, || random_const(&mut r, 3))
            };
            let got = one_step_reachable(&ConstScheme::new(use_aux), &d).map_err(lib)?;
            compare(task, seed, got.into_iter().map(|s| s.example).collect(), oracle_const(&d, use_aux))
        }
        "text" => {
            let c = random_constraints(&mut r);
            let d = dataset(size, || random_text(&mut r, 2));
            let got = one_step_reachable(&TextScheme::new(c.clone()).map_err(lib)?, &d).map_err(lib)?;
            compare(task, seed, got.into_iter().map(|s| s.example).collect(), oracle_text(&d, &c))
        }
        other => Err(format!("unknown task {}", other)),
    }
}

// ---------------------------------------------------------------- formats

use sub2_core::corpus::{
    read_brackets, read_conllu_dep, read_conllu_pos, read_text, write_brackets, write_conllu_dep, write_conllu_pos,
    write_text, TagColumn, TextFormat,
};

pub fn roundtrip_pos(d: &Dataset<TaggedSentence>, col: TagColumn) -> (Vec<u8>, Dataset<TaggedSentence>) {
    let mut buf = Vec::new();
    write_conllu_pos(d, col, &mut buf).unwrap();
    let back = read_conllu_pos(buf.as_slice(), col).unwrap();
    assert!(back.skipped.is_empty());
    (buf, back.dataset)
}

pub fn roundtrip_dep(d: &Dataset<DepSentence>) -> (Vec<u8>, Dataset<DepSentence>) {
    let mut buf = Vec::new();
    write_conllu_dep(d, &mut buf).unwrap();
    let back = read_conllu_dep(buf.as_slice()).unwrap();
    assert!(back.skipped.is_empty());
    (buf, back.dataset)
}

pub fn roundtrip_const(d: &Dataset<ConstTree>) -> (Vec<u8>, Dataset<ConstTree>) {
    let mut buf = Vec::new();
    write_brackets(d, &mut buf).unwrap();
    let back = read_brackets(buf.as_slice()).unwrap();
    (buf, back)
}

pub fn roundtrip_text(d: &Dataset<TextExample>, fmt: TextFormat) -> (Vec<u8>, Dataset<TextExample>) {
    let mut buf = Vec::new();
    write_text(d, fmt, &mut buf).unwrap();
    let back = read_text(buf.as_slice(), fmt).unwrap();
    (buf, back)
}

/// Provenance as it survives serialization.
pub fn stored(d: &Dataset<impl sub2_core::corpus::Example>) -> Vec<sub2_core::corpus::Provenance> {
    d.provenance().iter().map(|p| p.without_sites()).collect()
}
