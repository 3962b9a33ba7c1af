//! The substitution loop and run configuration.
//!
//! Each iteration draws a source substructure uniformly over all loci of the
//! growing output, then a donor uniformly over the same-key loci of the
//! original dataset (never the source itself), splices, and appends. Draws
//! are made in that order from a single seeded generator, so a run is a pure
//! function of the input and the configuration.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::baselines::{self, Perturb};
use crate::corpus::{
    ConstTree, Dataset, DepSentence, Example, Generation, Provenance, TaggedSentence, Task, TextExample,
};
use crate::error::{Error, Result};
use crate::substructure::{
    ConstScheme, ConstraintSet, DepScheme, LabelKey, Locus, PosScheme, Scheme, Site, SubstructureIndex, TextScheme,
};

pub mod rng;
pub mod splice;

pub use self::splice::{splice_const, splice_dep, splice_pos, splice_text};

/// Augmentation method.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Sub2,
    Rand,
    RandWord,
    BalancedSub2,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Sub2 => "sub2",
            Method::Rand => "rand",
            Method::RandWord => "randword",
            Method::BalancedSub2 => "balanced",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sub2" => Ok(Method::Sub2),
            "rand" => Ok(Method::Rand),
            "randword" => Ok(Method::RandWord),
            "balanced" | "balanced_sub2" => Ok(Method::BalancedSub2),
            other => Err(Error::Config(format!("unknown method '{}'", other))),
        }
    }
}

/// How large the augmented dataset should be before replication.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SizeSpec {
    /// Exact size `N`, which must exceed the original size.
    Target(usize),
    /// `k` new examples per original: `N = (k + 1)·|D|`.
    Multiplier(usize),
}

/// Which examples source substructures are drawn from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SourcePool {
    /// Originals plus every example generated so far.
    #[default]
    Growing,
    /// Originals only.
    Original,
}

impl FromStr for SourcePool {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "growing" => Ok(SourcePool::Growing),
            "original" => Ok(SourcePool::Original),
            other => Err(Error::Config(format!("unknown source pool '{}'", other))),
        }
    }
}

impl fmt::Display for SourcePool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourcePool::Growing => "growing",
            SourcePool::Original => "original",
        })
    }
}

pub const DEFAULT_MULTIPLIER: usize = 20;
pub const DEFAULT_MAX_RESAMPLE_ATTEMPTS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct AugmentConfig {
    pub method: Method,
    pub size: SizeSpec,
    /// Total copies of each original in the output. Defaults to the
    /// multiplier, or 1 when an explicit target size is given.
    pub replicate: Option<usize>,
    pub seed: u64,
    /// Source redraws allowed per generated example when the drawn
    /// substructure has no donor.
    pub max_resample_attempts: usize,
    pub source_pool: SourcePool,
    /// Text task only.
    pub constraints: ConstraintSet,
    /// Span length cap for the pos and text tasks.
    pub max_span_len: Option<usize>,
    /// Constituency task: key constituents by `(label, aux)`.
    pub use_aux: bool,
}

impl AugmentConfig {
    pub fn new(seed: u64) -> Self {
        AugmentConfig {
            method: Method::Sub2,
            size: SizeSpec::Multiplier(DEFAULT_MULTIPLIER),
            replicate: None,
            seed,
            max_resample_attempts: DEFAULT_MAX_RESAMPLE_ATTEMPTS,
            source_pool: SourcePool::Growing,
            constraints: ConstraintSet::default(),
            max_span_len: None,
            use_aux: false,
        }
    }

    pub fn method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn size(mut self, size: SizeSpec) -> Self {
        self.size = size;
        self
    }

    pub fn replicate(mut self, r: usize) -> Self {
        self.replicate = Some(r);
        self
    }

    pub fn source_pool(mut self, pool: SourcePool) -> Self {
        self.source_pool = pool;
        self
    }

    pub fn constraints(mut self, constraints: ConstraintSet) -> Self {
        self.constraints = constraints;
        self
    }

    pub fn max_span_len(mut self, cap: Option<usize>) -> Self {
        self.max_span_len = cap;
        self
    }

    pub fn use_aux(mut self, use_aux: bool) -> Self {
        self.use_aux = use_aux;
        self
    }

    /// Resolve the target size and replication factor for `original`
    /// examples.
    pub fn plan(&self, original: usize) -> Result<Plan> {
        if original == 0 {
            return Err(Error::Config("cannot augment an empty dataset".into()));
        }
        let (target, default_r) = match self.size {
            SizeSpec::Target(n) => {
                if n <= original {
                    return Err(Error::Config(format!(
                        "target size {} must exceed the dataset size {}",
                        n, original
                    )));
                }
                (n, 1)
            }
            SizeSpec::Multiplier(k) => {
                if k == 0 {
                    return Err(Error::Config("multiplier must be at least 1".into()));
                }
                ((k + 1) * original, k)
            }
        };
        let replicate = self.replicate.unwrap_or(default_r);
        if replicate == 0 {
            return Err(Error::Config("replicate must be at least 1".into()));
        }
        if self.max_resample_attempts == 0 {
            return Err(Error::Config("max resample attempts must be at least 1".into()));
        }
        if self.max_span_len == Some(0) {
            return Err(Error::Config("max span length must be at least 1".into()));
        }
        Ok(Plan { target, replicate })
    }

    /// Text constraints with the run's span cap applied.
    pub fn text_constraints(&self) -> ConstraintSet {
        let cap = self.max_span_len.or(self.constraints.max_span_len);
        self.constraints.clone().with_max_span_len(cap)
    }
}

/// Resolved sizes of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Plan {
    /// Dataset size after generation, originals included.
    pub target: usize,
    /// Total copies of each original in the final output.
    pub replicate: usize,
}

impl Plan {
    /// Size of the final output: `N + (r − 1)·|D|`.
    pub fn output_size(&self, original: usize) -> usize {
        self.target + (self.replicate - 1) * original
    }
}

/// Carrier types that know how to build their substitution scheme.
pub trait Augmentable: Perturb {
    type Scheme: Scheme<Example = Self>;

    fn scheme(config: &AugmentConfig) -> Result<Self::Scheme>;
}

impl Augmentable for TaggedSentence {
    type Scheme = PosScheme;

    fn scheme(config: &AugmentConfig) -> Result<PosScheme> {
        Ok(PosScheme::new(config.max_span_len))
    }
}

impl Augmentable for DepSentence {
    type Scheme = DepScheme;

    fn scheme(_: &AugmentConfig) -> Result<DepScheme> {
        Ok(DepScheme)
    }
}

impl Augmentable for ConstTree {
    type Scheme = ConstScheme;

    fn scheme(config: &AugmentConfig) -> Result<ConstScheme> {
        Ok(ConstScheme::new(config.use_aux))
    }
}

impl Augmentable for TextExample {
    type Scheme = TextScheme;

    fn scheme(config: &AugmentConfig) -> Result<TextScheme> {
        match config.method {
            Method::BalancedSub2 => TextScheme::balanced(config.text_constraints()),
            _ => TextScheme::new(config.text_constraints()),
        }
    }
}

/// Augment `dataset` according to `config`.
///
/// The output holds the originals in order, then the generated examples,
/// then `r − 1` further copies of the originals.
pub fn augment<E: Augmentable>(dataset: &Dataset<E>, config: &AugmentConfig) -> Result<Dataset<E>> {
    match config.method {
        Method::Sub2 => augment_with_scheme(&E::scheme(config)?, dataset, config),
        Method::BalancedSub2 => {
            if E::TASK != Task::Text {
                return Err(Error::Config(format!(
                    "balanced-tree substitution applies to the text task, not {}",
                    E::TASK
                )));
            }
            augment_with_scheme(&E::scheme(config)?, dataset, config)
        }
        Method::Rand | Method::RandWord => {
            let plan = config.plan(dataset.len())?;
            let generated = baselines::generate(dataset, config.method, plan.target - dataset.len(), config.seed)?;
            let mut out = dataset.clone();
            for (e, p) in generated {
                out.push(e, p);
            }
            replicate(&mut out, dataset, plan.replicate);
            Ok(out)
        }
    }
}

/// Substitution augmentation with an explicit scheme.
pub fn augment_with_scheme<S: Scheme>(
    scheme: &S,
    dataset: &Dataset<S::Example>,
    config: &AugmentConfig,
) -> Result<Dataset<S::Example>> {
    let plan = config.plan(dataset.len())?;
    let mut out = generate(scheme, dataset, plan.target, config)?;
    replicate(&mut out, dataset, plan.replicate);
    Ok(out)
}

fn replicate<E: Example>(out: &mut Dataset<E>, original: &Dataset<E>, r: usize) {
    for _ in 1..r {
        for (i, e) in original.examples().iter().enumerate() {
            out.push(e.clone(), Provenance::Replicated { of: i });
        }
    }
}

struct SourceEntry {
    example: usize,
    site: Site,
    donors: Option<usize>,
}

/// Donor lists frozen over the original dataset, addressed by key id.
struct DonorPool {
    ids: HashMap<LabelKey, usize>,
    lists: Vec<Vec<Locus>>,
}

impl DonorPool {
    fn new(index: &SubstructureIndex) -> Self {
        let mut ids = HashMap::with_capacity(index.key_count());
        let mut lists = Vec::with_capacity(index.key_count());
        for (key, loci) in index.entries() {
            ids.insert(key.clone(), lists.len());
            lists.push(loci.clone());
        }
        DonorPool { ids, lists }
    }
}

fn describe_largest(index: &SubstructureIndex) -> String {
    let parts: Vec<_> = index
        .largest(5)
        .into_iter()
        .map(|(k, n)| format!("({}) x{}", k, n))
        .collect();
    if parts.is_empty() {
        "none".into()
    } else {
        parts.join(", ")
    }
}

fn generate<S: Scheme>(
    scheme: &S,
    dataset: &Dataset<S::Example>,
    target: usize,
    config: &AugmentConfig,
) -> Result<Dataset<S::Example>> {
    let index = SubstructureIndex::build(scheme, dataset)?;
    if !index.has_substitution() {
        return Err(Error::NoAugmentation(format!(
            "no label key has two or more substructures among {} loci",
            index.total()
        )));
    }
    let donors = DonorPool::new(&index);
    let original = dataset.len();

    let mut pool: Vec<SourceEntry> = Vec::with_capacity(index.total());
    let push_loci = |pool: &mut Vec<SourceEntry>, example: usize, e: &S::Example| {
        for (site, key) in scheme.substructures(e) {
            pool.push(SourceEntry {
                example,
                site,
                donors: donors.ids.get(&key).copied(),
            });
        }
    };
    for (i, e) in dataset.examples().iter().enumerate() {
        push_loci(&mut pool, i, e);
    }

    let mut rng = rng::master(config.seed);
    let mut out = dataset.clone();
    while out.len() < target {
        let mut attempts = 0;
        let (s, donor) = loop {
            if attempts == config.max_resample_attempts {
                return Err(Error::ResampleExhausted {
                    attempts,
                    largest: describe_largest(&index),
                });
            }
            attempts += 1;
            let s = &pool[rng::below(&mut rng, pool.len())];
            let Some(id) = s.donors else { continue };
            let list = &donors.lists[id];
            let own = if s.example < original {
                list.binary_search_by(|l| (l.example, &l.site).cmp(&(s.example, &s.site))).ok()
            } else {
                None
            };
            let available = list.len() - own.is_some() as usize;
            if available == 0 {
                continue;
            }
            let v = &list[rng::below_except(&mut rng, list.len(), own)];
            break (s, v);
        };

        let host = &out.examples()[s.example];
        let new = scheme.splice(host, &s.site, &dataset.examples()[donor.example], &donor.site)?;
        let provenance = Provenance::Generated(Generation {
            source: s.example,
            donor: Some(donor.example),
            sites: Some((s.site.clone(), donor.site.clone())),
        });
        if config.source_pool == SourcePool::Growing {
            push_loci(&mut pool, out.len(), &new);
        }
        out.push(new, provenance);
        if (out.len() - original) % 10_000 == 0 {
            log::info!("generated {} examples", out.len() - original);
        }
    }
    Ok(out)
}

/// One possible substitution of a substructure by a same-key donor.
#[derive(Clone, Debug, PartialEq)]
pub struct Substitution<E> {
    pub example: E,
    pub source: Locus,
    pub donor: Locus,
}

/// Every example reachable by one substitution over `dataset` (donors from
/// the same dataset, donor locus never equal to the source locus), in
/// `(key, source, donor)` order.
pub fn one_step_reachable<S: Scheme>(scheme: &S, dataset: &Dataset<S::Example>) -> Result<Vec<Substitution<S::Example>>> {
    let index = SubstructureIndex::build(scheme, dataset)?;
    let mut out = Vec::new();
    for loci in index.entries().values() {
        for s in loci {
            for v in loci {
                if s == v {
                    continue;
                }
                let example = scheme.splice(
                    &dataset.examples()[s.example],
                    &s.site,
                    &dataset.examples()[v.example],
                    &v.site,
                )?;
                out.push(Substitution {
                    example,
                    source: s.clone(),
                    donor: v.clone(),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substructure::Restricted;

    fn figure_pos() -> Dataset<TaggedSentence> {
        Dataset::new(vec![
            TaggedSentence::from_strs(&["I", "have", "a", "book"], &["PRP", "VBP", "DT", "NN"]).unwrap(),
            TaggedSentence::from_strs(&["They", "ate", "an", "orange"], &["PRP", "VBD", "DT", "NN"]).unwrap(),
        ])
    }

    fn many_pos(n: usize) -> Dataset<TaggedSentence> {
        (0..n)
            .map(|i| {
                let w = format!("w{}", i);
                TaggedSentence::from_strs(&["the", &w], &["DT", "NN"]).unwrap()
            })
            .collect()
    }

    #[test]
    fn plan_arithmetic() {
        let c = AugmentConfig::new(0).size(SizeSpec::Multiplier(2)).replicate(1);
        let p = c.plan(10).unwrap();
        assert_eq!((p.target, p.output_size(10)), (30, 30));
        let p = AugmentConfig::new(0).size(SizeSpec::Multiplier(20)).plan(100).unwrap();
        assert_eq!(p.output_size(100), 4000);
        assert!(AugmentConfig::new(0).size(SizeSpec::Target(10)).plan(10).is_err());
        assert!(AugmentConfig::new(0).replicate(0).plan(10).is_err());
        assert_eq!(AugmentConfig::new(0).size(SizeSpec::Target(11)).plan(10).unwrap().replicate, 1);
    }

    #[test]
    fn exact_size_with_replication() {
        let d = many_pos(10);
        let c = AugmentConfig::new(3).size(SizeSpec::Multiplier(2)).replicate(1);
        assert_eq!(augment(&d, &c).unwrap().len(), 30);
        let c = AugmentConfig::new(3).size(SizeSpec::Multiplier(2));
        let out = augment(&d, &c).unwrap();
        assert_eq!(out.len(), 40);
        assert_eq!(out.provenance()[30..].iter().filter(|p| matches!(p, Provenance::Replicated { .. })).count(), 10);
        assert_eq!(&out.examples()[..10], d.examples());
    }

    #[test]
    fn figure_pos_generations_stay_in_reachable_set() {
        let scheme = Restricted::new(PosScheme::default(), [LabelKey::from_strs(&["DT", "NN"])]);
        let expected = [
            TaggedSentence::from_strs(&["I", "have", "an", "orange"], &["PRP", "VBP", "DT", "NN"]).unwrap(),
            TaggedSentence::from_strs(&["They", "ate", "a", "book"], &["PRP", "VBD", "DT", "NN"]).unwrap(),
        ];
        let config = AugmentConfig::new(0)
            .size(SizeSpec::Target(4))
            .replicate(1)
            .source_pool(SourcePool::Original);
        let mut both = false;
        for seed in 0..32 {
            let out = augment_with_scheme(&scheme, &figure_pos(), &AugmentConfig { seed, ..config.clone() }).unwrap();
            let generated = &out.examples()[2..];
            assert!(generated.iter().all(|g| expected.contains(g)));
            both |= generated.contains(&expected[0]) && generated.contains(&expected[1]);
        }
        assert!(both);
    }

    #[test]
    fn unique_keys_fail_fast() {
        let d = Dataset::new(vec![TaggedSentence::from_strs(&["a"], &["X"]).unwrap()]);
        assert!(matches!(augment(&d, &AugmentConfig::new(0)), Err(Error::NoAugmentation(_))));
    }

    #[test]
    fn rare_donors_exhaust_attempts() {
        // Only 2 of 42 spans have a same-key partner.
        let d = Dataset::new(vec![
            TaggedSentence::from_strs(&["a", "b", "c", "d", "e", "f"], &["A", "B", "C", "D", "E", "Z"]).unwrap(),
            TaggedSentence::from_strs(&["g", "h", "i", "j", "k", "l"], &["G", "H", "I", "J", "K", "Z"]).unwrap(),
        ]);
        let mut config = AugmentConfig::new(0).size(SizeSpec::Target(200));
        config.max_resample_attempts = 3;
        match augment(&d, &config) {
            Err(Error::ResampleExhausted { attempts, largest }) => {
                assert_eq!(attempts, 3);
                assert!(largest.starts_with("(Z) x2"), "{}", largest);
            }
            other => panic!("{:?}", other.map(|d| d.len())),
        }
    }

    #[test]
    fn balanced_only_for_text() {
        let c = AugmentConfig::new(0).method(Method::BalancedSub2);
        assert!(matches!(augment(&many_pos(3), &c), Err(Error::Config(_))));
    }

    #[test]
    fn same_seed_same_output() {
        let d = many_pos(5);
        let c = AugmentConfig::new(11).size(SizeSpec::Multiplier(4));
        assert_eq!(augment(&d, &c).unwrap(), augment(&d, &c).unwrap());
        let other = AugmentConfig { seed: 12, ..c };
        assert_ne!(augment(&d, &other).unwrap(), augment(&d, &AugmentConfig::new(11).size(SizeSpec::Multiplier(4))).unwrap());
    }
}
