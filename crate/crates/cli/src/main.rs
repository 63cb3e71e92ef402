//! `morphkit` command-line front end.

mod records;

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use morphkit::analyzer::units::default_units;
use morphkit::automaton::SEP;
use morphkit::compiler::{
    compile, ingest_text, ingest_xml, CompileOptions, DictionarySections, EndingRecord, JoinableLinks,
};
use morphkit::language::LanguageData;
use morphkit::probability::{build_cpd_dafsa, count_corpus, count_corpus_xml, cpd_entries, estimate};
use morphkit::{Analyzer, Dictionary, DictionaryError, Parse};

use records::{Format, Record};

#[derive(Parser)]
#[command(name = "morphkit", version, about = "Morphological analysis and generation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a lexicon (OpenCorpora XML or the text format) into a dictionary.
    Compile(CompileArgs),
    /// Add P(tag | word) estimates from a disambiguated corpus to a dictionary.
    Estimate(EstimateArgs),
    /// Print every parse of each input token.
    Analyze(RunArgs),
    /// Print normal forms.
    Lemma(RunArgs),
    /// Inflect to the given grammemes.
    Inflect(InflectArgs),
    /// Inflect a noun to agree with a number.
    Agree(AgreeArgs),
    /// List one dictionary section.
    Dump(DumpArgs),
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// `all`, `none` or a comma-separated list of link type ids.
    #[arg(long, default_value = "all")]
    join_links: String,
    #[arg(long)]
    min_paradigm_lexemes: Option<u32>,
    #[arg(long)]
    min_ending_freq: Option<u32>,
    /// Comma-separated paradigm prefixes; the empty prefix is always included.
    #[arg(long)]
    paradigm_prefixes: Option<String>,
    #[arg(long, default_value = "ru")]
    language: String,
}

#[derive(Args)]
struct DictArg {
    #[arg(long, env = "MORPHKIT_DICT")]
    dict: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    dict: DictArg,
    /// One `word<TAB>tag` per line, or an OpenCorpora corpus XML.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    dict: DictArg,
    /// Tokens, one per line; standard input when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
    /// Apply to every parse instead of the top-scored one.
    #[arg(long)]
    all: bool,
    /// Remove a unit from the pipeline (repeatable).
    #[arg(long = "disable-unit", value_name = "ID")]
    disable: Vec<String>,
}

#[derive(Args)]
struct InflectArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    grammemes: Vec<String>,
}

#[derive(Args)]
struct AgreeArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long)]
    n: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Section {
    Words,
    Paradigms,
    Endings,
    Cpd,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    dict: DictArg,
    #[arg(long, value_enum)]
    what: Section,
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure { code: 1, message: message.to_string() }
    }
    fn input(message: impl ToString) -> Self {
        Failure { code: 2, message: message.to_string() }
    }
    fn container(message: impl ToString) -> Self {
        Failure { code: 3, message: message.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::input(e)
    }
}

type Outcome = Result<(), Failure>;

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// XML is recognized by its first non-blank byte.
fn read_maybe_xml(path: &Path) -> Result<(bool, Vec<u8>), Failure> {
    let mut bytes = Vec::new();
    open(path)?.read_to_end(&mut bytes)?;
    let xml = bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'<');
    Ok((xml, bytes))
}

fn load_sections(path: &Path) -> Result<DictionarySections, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    DictionarySections::from_bytes(&bytes).map_err(|e| Failure::container(format!("{}: {e}", path.display())))
}

fn load_dictionary(path: &Path) -> Result<Dictionary, Failure> {
    Dictionary::from_sections(load_sections(path)?).map_err(|e| match e {
        DictionaryError::Io(e) => Failure::input(e),
        e => Failure::container(format!("{}: {e}", path.display())),
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome {
    std::fs::write(path, bytes).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse_join_links(text: &str) -> Result<JoinableLinks, Failure> {
    match text {
        "all" => Ok(JoinableLinks::All),
        "none" => Ok(JoinableLinks::None),
        ids => ids
            .split(',')
            .map(|id| id.trim().parse::<u32>())
            .collect::<Result<BTreeSet<u32>, _>>()
            .map(JoinableLinks::Only)
            .map_err(|_| Failure::usage(format!("--join-links: expected all, none or ids, got {text:?}"))),
    }
}

fn cmd_compile(args: CompileArgs) -> Outcome {
    let mut options = CompileOptions {
        language: LanguageData::by_name(&args.language)
            .ok_or_else(|| Failure::usage(format!("unknown language {:?}", args.language)))?,
        joinable_links: parse_join_links(&args.join_links)?,
        ..CompileOptions::default()
    };
    if let Some(n) = args.min_paradigm_lexemes {
        options.prediction.min_paradigm_lexemes = n;
    }
    if let Some(n) = args.min_ending_freq {
        options.prediction.min_ending_frequency = n;
    }
    if let Some(csv) = &args.paradigm_prefixes {
        let mut prefixes = vec![String::new()];
        for p in csv.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if !prefixes.iter().any(|q| q == p) {
                prefixes.push(p.to_string());
            }
        }
        options.language.paradigm_prefixes = prefixes;
    }

    let (xml, bytes) = read_maybe_xml(&args.lexicon)?;
    let lexicon = if xml { ingest_xml(bytes.as_slice()) } else { ingest_text(bytes.as_slice()) }
        .map_err(|e| Failure::input(format!("{}: {e}", args.lexicon.display())))?;
    let compiled = compile(lexicon, &options).map_err(Failure::input)?;
    for w in &compiled.warnings {
        eprintln!("warning: {w}");
    }
    write_file(&args.out, &compiled.sections.to_bytes())?;
    let s = &compiled.stats;
    eprintln!(
        "lexemes {}, forms {}, paradigms {}, word states {}, prediction states {}, dangling links {}",
        s.lexemes, s.forms, s.paradigms, s.word_states, s.prediction_states, s.dangling_links
    );
    Ok(())
}

fn cmd_estimate(args: EstimateArgs) -> Outcome {
    let mut sections = load_sections(&args.dict.dict)?;
    let (xml, bytes) = read_maybe_xml(&args.corpus)?;
    let counts = if xml { count_corpus_xml(bytes.as_slice()) } else { count_corpus(bytes.as_slice()) }
        .map_err(|e| Failure::input(format!("{}: {e}", args.corpus.display())))?;

    sections.cpd = None;
    let analyzer = Analyzer::new(
        Dictionary::from_sections(sections.clone()).map_err(|e| Failure::container(e))?,
    );
    let table = estimate(&counts, |w| match analyzer.analyze(w) {
        Ok(parses) => parses.iter().map(|p| p.tag.to_string()).collect(),
        Err(_) => Vec::new(),
    });
    sections.cpd = Some(build_cpd_dafsa(&table).map_err(Failure::input)?);
    write_file(&args.out, &sections.to_bytes())?;
    eprintln!(
        "ambiguous words covered {}, entries {}, skipped words {}",
        table.words(),
        table.entries.len(),
        table.skipped.len()
    );
    if !table.skipped.is_empty() {
        eprintln!("warning: {} corpus words are not ambiguous for the analyzer and were skipped", table.skipped.len());
    }
    Ok(())
}

fn analyzer_for(run: &RunArgs) -> Result<Analyzer, Failure> {
    let dictionary = load_dictionary(&run.dict.dict)?;
    if run.disable.is_empty() {
        return Ok(Analyzer::new(dictionary));
    }
    let units: Vec<_> = default_units(dictionary.language())
        .into_iter()
        .filter(|u| !run.disable.iter().any(|d| d == u.id()))
        .collect();
    Analyzer::with_units(dictionary, units).map_err(Failure::usage)
}

/// What a derived command does with one parse.
enum Action<'a> {
    Analyze,
    Lemma,
    Inflect(&'a [String]),
    Agree(u64),
}

fn derive(analyzer: &Analyzer, parse: &Parse, action: &Action<'_>) -> Result<Option<Parse>, Failure> {
    let failed = |e: morphkit::AnalyzerError| Failure::container(e);
    match action {
        Action::Analyze => Ok(None),
        Action::Lemma => {
            let lexeme = analyzer.get_lexeme(parse).map_err(failed)?;
            let head = lexeme.into_iter().next().expect("a lexeme has forms");
            Ok(Some(Parse {
                word: head.word,
                tag: head.tag,
                normal_form: parse.normal_form.clone(),
                score: parse.score,
                trace: head.trace,
            }))
        }
        Action::Inflect(grammemes) => {
            let required: Vec<&str> = grammemes.iter().map(String::as_str).collect();
            analyzer.inflect_parse(parse, &required).map_err(failed)
        }
        Action::Agree(n) => analyzer.make_agree_with_number(parse, *n).map_err(failed),
    }
}

fn run(run: &RunArgs, action: Action<'_>) -> Outcome {
    let analyzer = analyzer_for(run)?;
    let input: Box<dyn BufRead> = match &run.input {
        Some(path) => Box::new(open(path)?),
        None => Box::new(io::stdin().lock()),
    };
    let mut out = BufWriter::new(io::stdout().lock());
    let derived = !matches!(action, Action::Analyze);
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let token = line.trim();
        if token.is_empty() {
            continue;
        }
        let parses = analyzer
            .analyze(token)
            .map_err(|e| Failure::input(format!("line {}: {e}", n + 1)))?;
        let take = if derived && !run.all { 1 } else { parses.len() };
        let mut records = Vec::with_capacity(take);
        for (rank, parse) in parses.iter().take(take).enumerate() {
            let result = derive(&analyzer, parse, &action)?;
            records.push(Record::new(token, rank + 1, parse, derived.then_some(result.as_ref())));
        }
        records::write(&mut out, run.format, token, &records)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_dump(args: DumpArgs) -> Outcome {
    let dictionary = load_dictionary(&args.dict.dict)?;
    let sections = dictionary.sections();
    let mut lines: Vec<String> = Vec::new();
    match args.what {
        Section::Words => {
            for (word, pid, idx) in dictionary.word_records() {
                lines.push(format!("{word}\t{pid}\t{idx}"));
            }
        }
        Section::Paradigms => {
            let t = &sections.tables;
            for (pid, paradigm) in t.paradigms.iter().enumerate() {
                for (idx, row) in paradigm.rows.iter().enumerate() {
                    lines.push(format!(
                        "{pid}\t{idx}\t{}\t{}\t{}",
                        t.prefixes[row.prefix_id as usize], t.suffixes[row.suffix_id as usize], t.tags[row.tag_id as usize]
                    ));
                }
            }
        }
        Section::Endings => {
            for (prefix_id, dafsa) in sections.prediction.iter().enumerate() {
                let prefix = &sections.language.paradigm_prefixes[prefix_id];
                dafsa.for_each_key(|key| {
                    let at = key.iter().position(|&b| b == SEP).expect("validated at load");
                    let ending = String::from_utf8_lossy(&key[..at]);
                    let r = EndingRecord::decode(&key[at + 1..]).expect("validated at load");
                    lines.push(format!(
                        "{prefix}\t{ending}\t{}\t{}\t{}",
                        r.frequency, r.paradigm_id, r.form_index
                    ));
                });
            }
        }
        Section::Cpd => {
            if let Some(cpd) = &sections.cpd {
                for (word, tag, value) in cpd_entries(cpd) {
                    lines.push(format!("{word}\t{tag}\t{value}"));
                }
            }
        }
    }
    let mut out = BufWriter::new(io::stdout().lock());
    for line in lines {
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Compile(args) => cmd_compile(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Analyze(args) => run(&args, Action::Analyze),
        Command::Lemma(args) => run(&args, Action::Lemma),
        Command::Inflect(args) => run(&args.run, Action::Inflect(&args.grammemes)),
        Command::Agree(args) => run(&args.run, Action::Agree(args.n)),
        Command::Dump(args) => cmd_dump(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) if f.code == 2 && f.message.contains("Broken pipe") => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("morphkit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
