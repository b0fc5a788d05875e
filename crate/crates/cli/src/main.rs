use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mathbench::bench::{
    self, fill_gold, load_adapters, load_gold, parse_records, read_results, run_eval, write_records, write_report,
    write_results, Converter, GoldEcho, InternalConverter, SubprocessAdapter,
};
use mathbench::content::RefinementConfig;
use mathbench::mathml::emit;
use mathbench::metrics::{load_rules, CostModel, ShortcutRule};
use mathbench::mlp::ContextDocument;
use mathbench::pipeline::{convert, ConvertError, ConvertOptions};
use mathbench::semantics::Lexicon;

#[derive(Parser)]
#[command(name = "mathbench", version, about = "LaTeX to parallel MathML conversion and benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Semantics {
    /// Refinements: `all`, `none`, or a list of power,subscript,apply,einstein
    #[arg(long, default_value = "all", value_parser = RefinementConfig::parse)]
    refine: RefinementConfig,
    /// Lexicon TSV replacing the bundled one
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

impl Semantics {
    fn options(&self) -> Result<ConvertOptions, String> {
        let lexicon = match &self.lexicon {
            Some(p) => Lexicon::load(p).map_err(|e| format!("{}: {e}", p.display()))?,
            None => Lexicon::bundled(),
        };
        Ok(ConvertOptions { lexicon, refine: self.refine, ..Default::default() })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Convert one TeX formula to MathML on standard output
    Convert {
        tex: String,
        /// Emit presentation markup only
        #[arg(long)]
        no_content: bool,
        /// Text surrounding the formula (plain text with $…$ math)
        #[arg(long)]
        context: Option<PathBuf>,
        /// Read the context file as XHTML
        #[arg(long, requires = "context")]
        xhtml: bool,
        #[command(flatten)]
        semantics: Semantics,
    },
    /// Score converters against a gold file; results as JSONL
    Eval {
        #[arg(long)]
        gold: PathBuf,
        /// TOML file with [[adapter]] tables
        #[arg(long)]
        adapters: Option<PathBuf>,
        /// Edit costs i,d,r[,e]
        #[arg(long, default_value = "1,1,0", value_parser = CostModel::parse)]
        costs: CostModel,
        /// Shortcut rules file
        #[arg(long)]
        shortcuts: Option<PathBuf>,
        #[command(flatten)]
        semantics: Semantics,
        #[arg(long, default_value_t = 4)]
        jobs: usize,
        /// Per-formula timeout for adapters, seconds (overrides the config)
        #[arg(long)]
        timeout: Option<f64>,
        /// Results file; standard output when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate JSONL results into summary, timing and plot CSVs
    Report {
        results: PathBuf,
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
    /// Fill gold_mathml of a record file from its semantic TeX
    Fixture {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn output(out: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    let fail = |m: String| (1u8, m);
    match cli.command {
        Command::Convert { tex, no_content, context, xhtml, semantics } => {
            let mut opts = semantics.options().map_err(fail)?;
            opts.content = !no_content;
            let doc = match context {
                Some(p) => {
                    let src = read(&p).map_err(fail)?;
                    let doc = if xhtml { ContextDocument::from_xhtml(&src, &tex) } else { ContextDocument::from_plain(&src, &tex) };
                    Some(doc.map_err(|e| fail(e.to_string()))?)
                }
                None => None,
            };
            match convert(&tex, doc.as_ref(), &opts) {
                Ok(pm) => println!("{}", emit(&pm)),
                Err(ConvertError::Empty) => return Err((2, "empty input".into())),
                Err(e) => return Err((2, e.to_string())),
            }
        }
        Command::Eval { gold, adapters, costs, shortcuts, semantics, jobs, timeout, out } => {
            let entries = load_gold(&gold).map_err(|e| fail(e.to_string()))?;
            let rules: Vec<ShortcutRule> = match shortcuts {
                Some(p) => load_rules(&p).map_err(|e| fail(e.to_string()))?,
                None => Vec::new(),
            };
            let opts = semantics.options().map_err(fail)?;
            let mut converters: Vec<Box<dyn Converter>> =
                vec![Box::new(GoldEcho), Box::new(InternalConverter::new("internal", opts))];
            if let Some(p) = adapters {
                for mut cfg in load_adapters(&p).map_err(|e| fail(e.to_string()))? {
                    if let Some(t) = timeout {
                        cfg.timeout = t;
                    }
                    converters.push(Box::new(SubprocessAdapter::new(cfg)));
                }
            }
            let results = run_eval(&entries, &converters, &costs, &rules, jobs).map_err(|e| fail(e.to_string()))?;
            output(out.as_ref(), &write_results(&results).map_err(|e| fail(e.to_string()))?).map_err(fail)?;
        }
        Command::Report { results, out } => {
            let results = read_results(&read(&results).map_err(fail)?).map_err(|e| fail(e.to_string()))?;
            let rep = write_report(&results, &out).map_err(|e| fail(e.to_string()))?;
            print!("{}", rep.summary_csv().map_err(|e| fail(e.to_string()))?);
        }
        Command::Fixture { input, out } => {
            let opts = ConvertOptions::default();
            let records = parse_records(&read(&input).map_err(fail)?).map_err(|e| fail(e.to_string()))?;
            let filled = records
                .into_iter()
                .map(|r| fill_gold(r, &opts))
                .collect::<Result<Vec<_>, bench::BenchError>>()
                .map_err(|e| fail(e.to_string()))?;
            output(out.as_ref(), &write_records(&filled).map_err(|e| fail(e.to_string()))?).map_err(fail)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("mathbench: {msg}");
            ExitCode::from(code)
        }
    }
}
