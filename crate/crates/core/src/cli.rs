//! The `attribcalc` command line.
//!
//! Exit codes are shared by every subcommand: 0 for success (valid,
//! positive, equivalent), 1 for a negative semantic outcome (invalid
//! document, negative match, concepts differ), 2 for usage or input errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::builder::RangedU64ValueParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::calculus::{
    concept_matches, count_extension_with, enumerate_extension, first_difference, label_examples,
    CalculusError, Concept, CountOptions, ObjectInstance, UniverseSchema, DEFAULT_IE_RULE_LIMIT,
};
use crate::universe_def::{load_universe, UniverseDefError};
use crate::vl1::{lower_to_concept, parse_vl1, Vl1Error};
use crate::xmlio::{
    generate_schema, parse_document, serialize_document_with, validate_document, ConceptDocument,
    DocumentError, Severity, SerializeOptions, ValidationReport, DEFAULT_EXPANSION_LIMIT,
};

/// Environment variable that disables styled output.
pub const NO_COLOR_ENV: &str = "ATTRIBCALC_NO_COLOR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    Text,
    #[default]
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "attribcalc", version, about = "Attributional-calculus concepts in XML")]
pub struct Cli {
    #[command(flatten)]
    pub config: CliConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CliConfig {
    /// Universe source: an XML Schema document or a plain-text definition.
    #[arg(long = "schema", global = true, value_name = "PATH")]
    pub schema_path: Option<PathBuf>,
    /// Input document (standard input when omitted).
    #[arg(long = "in", global = true, value_name = "PATH")]
    pub input_path: Option<PathBuf>,
    /// Output file (standard output when omitted).
    #[arg(long = "out", global = true, value_name = "PATH")]
    pub output_path: Option<PathBuf>,
    /// Concept to use, by name or zero-based index.
    #[arg(long, global = true, value_name = "NAME_OR_INDEX")]
    pub concept: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t)]
    pub format: OutputFormat,
    /// Maximum number of rule elements produced when expanding value sets.
    #[arg(long, global = true, default_value_t = DEFAULT_EXPANSION_LIMIT,
          value_parser = RangedU64ValueParser::<usize>::new().range(1..))]
    pub expansion_limit: usize,
    /// Rule count above which counting enumerates instead of using
    /// inclusion-exclusion.
    #[arg(long = "ie-rule-limit", global = true, default_value_t = DEFAULT_IE_RULE_LIMIT,
          value_parser = RangedU64ValueParser::<usize>::new().range(1..))]
    pub rule_limit_for_inclusion_exclusion: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the XML Schema for a universe definition.
    Schema,
    /// Check a concept document against a universe.
    Validate,
    /// Print "count/total" for a concept's extension.
    Count,
    /// Classify one object against a concept.
    Match {
        /// Comma-separated values in attribute declaration order.
        #[arg(long)]
        object: String,
    },
    /// List the objects of a concept's extension.
    Enumerate,
    /// Compare the extensions of two concepts.
    Equiv {
        /// Second document (defaults to --in).
        #[arg(long = "in-b", value_name = "PATH")]
        input_b: Option<PathBuf>,
        /// Concept of the second document, by name or index.
        #[arg(long = "concept-b", value_name = "NAME_OR_INDEX")]
        concept_b: Option<String>,
    },
    /// Export every universe object labeled positive or negative.
    Dataset,
    /// Convert a VL1 expression into a concept document.
    Lower {
        /// Expression such as "[headShape=round][jacketColor=red] v [holding<>sword]".
        expression: String,
        /// Name for the resulting concept.
        #[arg(long)]
        name: Option<String>,
        /// Root the document at the universe element instead of the concept.
        #[arg(long)]
        wrap: bool,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("--schema is required for this command")]
    MissingSchema,
    #[error("universe: {0}")]
    Universe(#[from] UniverseDefError),
    #[error("document: {0}")]
    Document(#[from] DocumentError),
    #[error("{0}")]
    Calculus(#[from] CalculusError),
    #[error("expression: {0}")]
    Vl1(#[from] Vl1Error),
    #[error("document does not validate against the universe:\n{0}")]
    InvalidDocument(ValidationReport),
    #[error("document has no concept {0:?}")]
    UnknownConcept(String),
    #[error("concept name {0:?} is used by more than one concept")]
    AmbiguousConcept(String),
    #[error("document holds {0} concepts; choose one with --concept")]
    ConceptRequired(usize),
    #[error("output: {0}")]
    Output(#[from] io::Error),
}

/// Output styling for terminals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Styling {
    pub color: bool,
}

impl Styling {
    /// Color when writing to a terminal and the opt-out variable is unset.
    pub fn detect(stdout_is_terminal: bool) -> Self {
        Self {
            color: stdout_is_terminal && std::env::var_os(NO_COLOR_ENV).is_none(),
        }
    }

    fn severity(self, severity: Severity) -> String {
        match (self.color, severity) {
            (false, s) => s.to_string(),
            (true, Severity::Error) => format!("\x1b[31m{severity}\x1b[0m"),
            (true, Severity::Warning) => format!("\x1b[33m{severity}\x1b[0m"),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        Some(p) => read(p),
        None => io::read_to_string(io::stdin()).map_err(|source| CliError::Io {
            path: "<stdin>".into(),
            source,
        }),
    }
}

struct Context<'a> {
    config: &'a CliConfig,
}

impl Context<'_> {
    fn universe(&self) -> Result<UniverseSchema, CliError> {
        let path = self.config.schema_path.as_deref().ok_or(CliError::MissingSchema)?;
        Ok(load_universe(&read(path)?)?)
    }

    fn document(&self, path: Option<&Path>, schema: &UniverseSchema) -> Result<ConceptDocument, CliError> {
        let doc = parse_document(&read_input(path)?)?;
        let report = validate_document(&doc, schema);
        if !report.valid() {
            return Err(CliError::InvalidDocument(report));
        }
        Ok(doc)
    }

    fn count_options(&self) -> CountOptions {
        CountOptions {
            ie_rule_limit: self.config.rule_limit_for_inclusion_exclusion,
        }
    }

    fn serialize_options(&self) -> SerializeOptions {
        SerializeOptions {
            expand: true,
            expansion_limit: self.config.expansion_limit,
        }
    }
}

/// Picks a concept by exact name, falling back to a zero-based index. With
/// no selector, a single-concept document yields its only concept.
pub fn select_concept<'d>(doc: &'d ConceptDocument, selector: Option<&str>) -> Result<&'d Concept, CliError> {
    let Some(selector) = selector else {
        return match doc.concepts.as_slice() {
            [only] => Ok(only),
            others => Err(CliError::ConceptRequired(others.len())),
        };
    };
    let mut named = doc
        .concepts
        .iter()
        .filter(|c| c.name.as_deref() == Some(selector));
    if let Some(first) = named.next() {
        if named.next().is_some() {
            return Err(CliError::AmbiguousConcept(selector.to_string()));
        }
        return Ok(first);
    }
    selector
        .parse::<usize>()
        .ok()
        .and_then(|i| doc.concepts.get(i))
        .ok_or_else(|| CliError::UnknownConcept(selector.to_string()))
}

fn write_report(out: &mut dyn Write, report: &ValidationReport, styling: Styling) -> io::Result<()> {
    for issue in &report.issues {
        writeln!(
            out,
            "{} {} {}: {}",
            styling.severity(issue.severity),
            issue.path,
            issue.code,
            issue.message
        )?;
    }
    let errors = report.errors().count();
    let warnings = report.warnings().count();
    let verdict = if report.valid() { "valid" } else { "invalid" };
    writeln!(out, "{verdict} ({errors} errors, {warnings} warnings)")
}

fn text_row(schema: &UniverseSchema, object: &ObjectInstance) -> String {
    schema
        .attributes()
        .iter()
        .zip(object.values())
        .map(|(a, v)| format!("{}={v}", a.name()))
        .collect::<Vec<_>>()
        .join(" ")
}

fn execute(cli: &Cli, out: &mut dyn Write, styling: Styling) -> Result<i32, CliError> {
    let ctx = Context { config: &cli.config };
    let input = cli.config.input_path.as_deref();
    match &cli.command {
        Command::Schema => {
            let path = cli
                .config
                .input_path
                .as_deref()
                .or(cli.config.schema_path.as_deref());
            let schema = load_universe(&read_input(path)?)?;
            out.write_all(generate_schema(&schema).as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Validate => {
            let schema = ctx.universe()?;
            let doc = parse_document(&read_input(input)?)?;
            let report = validate_document(&doc, &schema);
            write_report(out, &report, styling)?;
            Ok(if report.valid() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Count => {
            let schema = ctx.universe()?;
            let doc = ctx.document(input, &schema)?;
            let concept = select_concept(&doc, cli.config.concept.as_deref())?;
            let count = count_extension_with(concept, &schema, ctx.count_options())?;
            writeln!(out, "{count}/{}", schema.universe_size())?;
            Ok(EXIT_OK)
        }
        Command::Match { object } => {
            let schema = ctx.universe()?;
            let doc = ctx.document(input, &schema)?;
            let concept = select_concept(&doc, cli.config.concept.as_deref())?;
            let object = ObjectInstance::parse_csv(object, &schema)?;
            if concept_matches(concept, &object, &schema)? {
                writeln!(out, "positive")?;
                Ok(EXIT_OK)
            } else {
                writeln!(out, "negative")?;
                Ok(EXIT_NEGATIVE)
            }
        }
        Command::Enumerate => {
            let schema = ctx.universe()?;
            let doc = ctx.document(input, &schema)?;
            let concept = select_concept(&doc, cli.config.concept.as_deref())?;
            for object in enumerate_extension(concept, &schema)? {
                match cli.config.format {
                    OutputFormat::Csv => writeln!(out, "{}", object.to_csv())?,
                    OutputFormat::Text => writeln!(out, "{}", text_row(&schema, &object))?,
                }
            }
            Ok(EXIT_OK)
        }
        Command::Equiv { input_b, concept_b } => {
            let schema = ctx.universe()?;
            let doc_a = ctx.document(input, &schema)?;
            let doc_b = match input_b.as_deref() {
                Some(path) => ctx.document(Some(path), &schema)?,
                None => doc_a.clone(),
            };
            let a = select_concept(&doc_a, cli.config.concept.as_deref())?;
            let b = select_concept(&doc_b, concept_b.as_deref())?;
            match first_difference(a, b, &schema)? {
                None => {
                    writeln!(out, "equivalent")?;
                    Ok(EXIT_OK)
                }
                Some(diff) => {
                    let side = if diff.in_first { "first" } else { "second" };
                    writeln!(out, "differ: {} is only in the {side} concept", diff.object.to_csv())?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Dataset => {
            let schema = ctx.universe()?;
            let doc = ctx.document(input, &schema)?;
            let concept = select_concept(&doc, cli.config.concept.as_deref())?;
            let format = cli.config.format;
            if format == OutputFormat::Csv {
                let mut header: Vec<&str> = schema.attributes().iter().map(|a| a.name()).collect();
                header.push("label");
                writeln!(out, "{}", header.join(","))?;
            }
            for example in label_examples(concept, &schema)? {
                let label = if example.positive { "positive" } else { "negative" };
                match format {
                    OutputFormat::Csv if example.object.values().is_empty() => writeln!(out, "{label}")?,
                    OutputFormat::Csv => writeln!(out, "{},{label}", example.object.to_csv())?,
                    OutputFormat::Text => writeln!(out, "{} {label}", text_row(&schema, &example.object))?,
                }
            }
            Ok(EXIT_OK)
        }
        Command::Lower {
            expression,
            name,
            wrap,
        } => {
            let schema = ctx.universe()?;
            let expr = parse_vl1(expression, &schema)?;
            let mut concept = lower_to_concept(&expr, &schema)?;
            concept.name = name.clone();
            let doc = if *wrap {
                ConceptDocument::for_schema(&schema).with_concept(concept)
            } else {
                ConceptDocument::bare(concept)
            };
            let text = serialize_document_with(&doc, &schema, ctx.serialize_options())?;
            out.write_all(text.as_bytes())?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs the command line and returns the process exit code. Results go to
/// `stdout` unless `--out` names a file; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write, styling: Styling) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = err.render().to_string();
            let _ = if err.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };

    let result = match &cli.config.output_path {
        Some(path) => match File::create(path) {
            Ok(file) => {
                let mut writer = BufWriter::new(file);
                let r = execute(&cli, &mut writer, Styling::default());
                r.and_then(|code| writer.flush().map(|_| code).map_err(CliError::from))
            }
            Err(source) => Err(CliError::Io {
                path: path.display().to_string(),
                source,
            }),
        },
        None => {
            let mut writer = BufWriter::new(stdout);
            let r = execute(&cli, &mut writer, styling);
            r.and_then(|code| writer.flush().map(|_| code).map_err(CliError::from))
        }
    };

    match result {
        Ok(code) => code,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            EXIT_USAGE
        }
    }
}
