//! Run settings shared by flags, config files and manifests.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use sub2_core::augment::{
    AugmentConfig, Method, SizeSpec, SourcePool, DEFAULT_MAX_RESAMPLE_ATTEMPTS, DEFAULT_MULTIPLIER,
};
use sub2_core::corpus::{TagColumn, Task};
use sub2_core::substructure::ConstraintSet;
use sub2_core::Error;

use crate::files::Format;

/// Every setting as it appears on the command line. Config files and
/// manifests use the same names.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Settings {
    /// pos, dep, const or text
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<String>,

    /// sub2, rand, randword or balanced
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,

    /// Input file, `-` for stdin
    #[arg(long = "in", value_name = "PATH")]
    #[serde(rename = "in", skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,

    /// Output file, `-` for stdout
    #[arg(long = "out", value_name = "PATH")]
    #[serde(rename = "out", skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,

    /// conllu, brackets, tsv or jsonl
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,

    /// New examples per original (N = (k+1)|D|); default 20
    #[arg(long, value_name = "K", conflicts_with = "target_size")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<usize>,

    /// Size N of the dataset before replication
    #[arg(long, value_name = "N")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_size: Option<usize>,

    /// Total copies of the originals in the output; defaults to the multiplier
    #[arg(long, value_name = "R")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicate: Option<usize>,

    /// Text constraints, comma separated: n,p,l,t,senti
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraints: Option<String>,

    /// Longest span considered for pos and text
    #[arg(long, value_name = "M")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_span_len: Option<usize>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// Where to write the run manifest; defaults to `<out>.manifest.json`
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing)]
    pub manifest: Option<PathBuf>,

    /// CoNLL-U column holding POS tags: upos or xpos
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tag_column: Option<String>,

    /// Key constituents by label and auxiliary label
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub use_aux: Option<bool>,

    /// Draw sources from growing (originals and generated) or original
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_pool: Option<String>,

    /// Draws allowed per generated example before giving up
    #[arg(long, value_name = "N")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_resample_attempts: Option<usize>,
}

impl Settings {
    /// Fill unset fields from `lower`. Size is taken as a unit so a
    /// multiplier in one layer and a target size in another never mix.
    pub fn over(self, lower: Settings) -> Settings {
        let (multiplier, target_size) = if self.multiplier.is_some() || self.target_size.is_some() {
            (self.multiplier, self.target_size)
        } else {
            (lower.multiplier, lower.target_size)
        };
        Settings {
            task: self.task.or(lower.task),
            method: self.method.or(lower.method),
            input: self.input.or(lower.input),
            output: self.output.or(lower.output),
            format: self.format.or(lower.format),
            multiplier,
            target_size,
            replicate: self.replicate.or(lower.replicate),
            constraints: self.constraints.or(lower.constraints),
            max_span_len: self.max_span_len.or(lower.max_span_len),
            seed: self.seed.or(lower.seed),
            manifest: self.manifest.or(lower.manifest),
            tag_column: self.tag_column.or(lower.tag_column),
            use_aux: self.use_aux.or(lower.use_aux),
            source_pool: self.source_pool.or(lower.source_pool),
            max_resample_attempts: self.max_resample_attempts.or(lower.max_resample_attempts),
        }
    }

    pub fn from_toml(path: &Path) -> Result<Settings, Error> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))
    }
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T, Error> {
    value.ok_or_else(|| Error::Config(format!("--{} is required", flag)))
}

fn parsed<T: std::str::FromStr<Err = Error>>(value: &Option<String>, default: T) -> Result<T, Error> {
    value.as_deref().map_or(Ok(default), str::parse)
}

/// Settings common to every subcommand, parsed.
#[derive(Clone, Debug)]
pub struct Input {
    pub task: Task,
    pub path: PathBuf,
    pub format: Format,
    pub tag_column: TagColumn,
}

impl Input {
    pub fn resolve(s: &Settings) -> Result<Input, Error> {
        let task: Task = required(s.task.as_deref(), "task")?.parse()?;
        let path = required(s.input.clone(), "in")?;
        let format = Format::resolve(task, s.format.as_deref(), &path)?;
        let tag_column = parsed(&s.tag_column, TagColumn::Upos)?;
        if s.tag_column.is_some() && task != Task::Pos {
            return Err(Error::Config("--tag-column applies to the pos task only".into()));
        }
        Ok(Input {
            task,
            path,
            format,
            tag_column,
        })
    }

    pub fn constraints(s: &Settings, task: Task) -> Result<ConstraintSet, Error> {
        let c: ConstraintSet = parsed(&s.constraints, ConstraintSet::default())?;
        if !c.is_empty() && task != Task::Text {
            return Err(Error::Config("--constraints applies to the text task only".into()));
        }
        c.validate()?;
        Ok(c)
    }
}

/// A fully resolved augmentation run.
#[derive(Clone, Debug)]
pub struct Run {
    pub input: Input,
    pub output: PathBuf,
    pub manifest: Option<PathBuf>,
    pub config: AugmentConfig,
    /// The settings with every default filled in, as recorded in manifests.
    pub resolved: Settings,
}

impl Run {
    pub fn resolve(s: &Settings) -> Result<Run, Error> {
        let input = Input::resolve(s)?;
        let output = required(s.output.clone(), "out")?;
        let seed = required(s.seed, "seed")?;
        let method: Method = parsed(&s.method, Method::Sub2)?;
        if method == Method::BalancedSub2 && input.task != Task::Text {
            return Err(Error::Config(format!("method balanced applies to the text task, not {}", input.task)));
        }
        let size = match (s.multiplier, s.target_size) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("--multiplier and --target-size are mutually exclusive".into()))
            }
            (_, Some(n)) => SizeSpec::Target(n),
            (k, None) => SizeSpec::Multiplier(k.unwrap_or(DEFAULT_MULTIPLIER)),
        };
        let replicate = s.replicate.unwrap_or(match size {
            SizeSpec::Multiplier(k) => k,
            SizeSpec::Target(_) => 1,
        });
        let constraints = Input::constraints(s, input.task)?;
        let use_aux = s.use_aux.unwrap_or(false);
        if use_aux && input.task != Task::Const {
            return Err(Error::Config("--use-aux applies to the const task only".into()));
        }
        let source_pool: SourcePool = parsed(&s.source_pool, SourcePool::Growing)?;
        let attempts = s.max_resample_attempts.unwrap_or(DEFAULT_MAX_RESAMPLE_ATTEMPTS);

        let config = AugmentConfig {
            method,
            size,
            replicate: Some(replicate),
            seed,
            max_resample_attempts: attempts,
            source_pool,
            constraints: constraints.clone(),
            max_span_len: s.max_span_len,
            use_aux,
        };

        let resolved = Settings {
            task: Some(input.task.to_string()),
            method: Some(method.to_string()),
            input: Some(input.path.clone()),
            output: Some(output.clone()),
            format: Some(input.format.to_string()),
            multiplier: match size {
                SizeSpec::Multiplier(k) => Some(k),
                SizeSpec::Target(_) => None,
            },
            target_size: match size {
                SizeSpec::Target(n) => Some(n),
                SizeSpec::Multiplier(_) => None,
            },
            replicate: Some(replicate),
            constraints: (input.task == Task::Text).then(|| constraints.to_string()),
            max_span_len: s.max_span_len,
            seed: Some(seed),
            manifest: None,
            tag_column: (input.task == Task::Pos).then(|| tag_column_name(input.tag_column).to_string()),
            use_aux: (input.task == Task::Const).then_some(use_aux),
            source_pool: Some(source_pool.to_string()),
            max_resample_attempts: Some(attempts),
        };

        let manifest = match (&s.manifest, output.as_os_str() == "-") {
            (Some(p), _) => Some(p.clone()),
            (None, false) => {
                let mut p = output.clone().into_os_string();
                p.push(".manifest.json");
                Some(PathBuf::from(p))
            }
            (None, true) => None,
        };

        Ok(Run {
            input,
            output,
            manifest,
            config,
            resolved,
        })
    }
}

pub fn tag_column_name(c: TagColumn) -> &'static str {
    match c {
        TagColumn::Upos => "upos",
        TagColumn::Xpos => "xpos",
    }
}

/// Record of an augmentation run, sufficient to repeat it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: Settings,
    pub input_sha256: String,
    pub output_sha256: String,
    pub examples: Counts,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub original: usize,
    pub generated: usize,
    pub replicated: usize,
    pub total: usize,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest, Error> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e)))
    }
}
