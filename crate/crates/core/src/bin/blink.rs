use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use blinkwrt::algebra::AlgebraTables;
use blinkwrt::classify::{classify, load_corpus, round_str, ClassifyParams};
use blinkwrt::flink::{build_flink, export_pd};
use blinkwrt::gem::{blink_to_gem, gem_to_codes, GemError};
use blinkwrt::homology::homology;
use blinkwrt::statesum::kappa_with;
use blinkwrt::{parse_blink, Blink};

#[derive(Parser)]
#[command(name = "blink", version, about = "Invariants of 3-manifolds presented by blinks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a blink and check that it is a plane map.
    Validate { file: PathBuf },
    /// kappa_r for every r in a range.
    Invariant {
        file: PathBuf,
        /// Inclusive range such as `3..8`, or a single level.
        #[arg(long, default_value = "3..8", value_parser = parse_range)]
        r: (u32, u32),
        #[arg(long)]
        json: bool,
    },
    /// First homology of the induced manifold.
    Homology { file: PathBuf },
    /// The blackboard framed link: components, crossings, linking matrix.
    Flink {
        file: PathBuf,
        /// Print a PD code instead of JSON.
        #[arg(long)]
        pd: bool,
    },
    /// A gem of the induced manifold in `v` / `e` text form.
    Gem {
        file: PathBuf,
        /// Print the triangulation codes of the gem as JSON instead.
        #[arg(long)]
        codes: bool,
    },
    /// Group the `*.blink` files of a directory by homology and kappa_3..kappa_rmax.
    Classify {
        dir: PathBuf,
        #[arg(long, default_value_t = 8)]
        rmax: u32,
        /// Decimals kept in the invariant keys.
        #[arg(long, default_value_t = 9)]
        round: u32,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a per-class CSV summary.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
    },
    /// Dump the algebra tables of one level.
    Tables {
        #[arg(long)]
        r: u32,
        #[arg(long, value_enum, default_value_t = Dump::Csv)]
        dump: Dump,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Dump {
    Csv,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let parse = |x: &str| x.trim().parse::<u32>().map_err(|_| format!("invalid level '{x}'"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let r = parse(s)?;
            (r, r)
        }
    };
    if a < 3 || b < a {
        return Err(format!("range {s} must satisfy 3 <= A <= B"));
    }
    Ok((a, b))
}

/// Failure classes map to the exit status: bad input 1, internal error 2.
enum Failure {
    Input(String),
    Internal(String),
}

type Outcome = Result<(), Failure>;

fn read_blink(path: &Path) -> Result<Blink, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_blink(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn blink_id(path: &Path) -> String {
    path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned())
}

fn write_out(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { file } => {
            let b = read_blink(&file)?;
            println!(
                "ok: {} vertices, {} edges, {} faces, {} components, {} link components",
                b.n_vertices(),
                b.n_edges(),
                b.faces().len(),
                b.components().len(),
                build_flink(&b).n_components()
            );
        }
        Command::Invariant { file, r: (lo, hi), json } => {
            let b = read_blink(&file)?;
            let id = blink_id(&file);
            for r in lo..=hi {
                let t = AlgebraTables::new(r).map_err(|e| Failure::Input(e.to_string()))?;
                let k = kappa_with(&b, &t).map_err(|e| Failure::Internal(e.to_string()))?;
                if json {
                    println!("{}", k.to_json(&id));
                } else {
                    let (m, a) = k.polar();
                    let im = round_str(k.kappa.im, 12);
                    let sign = if im.starts_with('-') { "" } else { "+" };
                    println!(
                        "r={r} kappa={}{sign}{im}i mod={} angle/pi={} states={}",
                        round_str(k.kappa.re, 12),
                        round_str(m, 12),
                        round_str(a, 12),
                        k.admissible_states
                    );
                }
            }
        }
        Command::Homology { file } => println!("{}", homology(&read_blink(&file)?)),
        Command::Flink { file, pd } => {
            let f = build_flink(&read_blink(&file)?);
            if pd {
                println!("{}", export_pd(&f));
            } else {
                println!("{}", serde_json::to_string_pretty(&f.to_json()).expect("json"));
            }
        }
        Command::Gem { file, codes } => {
            let g = blink_to_gem(&read_blink(&file)?).map_err(|e| match e {
                GemError::Construction(_) => Failure::Internal(e.to_string()),
                _ => Failure::Input(e.to_string()),
            })?;
            if codes {
                println!("{}", serde_json::to_string_pretty(&gem_to_codes(&g).to_json()).expect("json"));
            } else {
                let c = g.counts();
                println!("# v={} b={} t={}", c.v, c.b, c.t);
                print!("{}", g.to_text());
            }
        }
        Command::Classify { dir, rmax, round, out, csv, workers } => {
            let (corpus, mut skipped) = load_corpus(&dir).map_err(|e| Failure::Input(e.to_string()))?;
            let mut report = classify(&corpus, ClassifyParams::new(rmax, round), workers)
                .map_err(|e| Failure::Input(e.to_string()))?;
            skipped.append(&mut report.skipped);
            skipped.sort_by(|a, b| a.id.cmp(&b.id));
            report.skipped = skipped;
            match out {
                Some(p) => write_out(&p, &report.to_json())?,
                None => print!("{}", report.to_json()),
            }
            if let Some(p) = csv {
                write_out(&p, &report.to_csv())?;
            }
        }
        Command::Tables { r, dump: Dump::Csv } => {
            let t = AlgebraTables::new(r).map_err(|e| Failure::Input(e.to_string()))?;
            print!("{}", t.dump_csv());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(2)
        }
    }
}
