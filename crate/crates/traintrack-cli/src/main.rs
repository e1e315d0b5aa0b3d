//! Command line front end. Every subcommand reads its inputs, calls one or
//! two library operations and prints their results in a line format. File
//! arguments accept `-` for standard input.
//!
//! Exit status is 0 on success, 1 on an invariant violation or any library
//! error and 2 on a usage error.

use std::io::Read;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};

use traintrack::bicombing;
use traintrack::cubical;
use traintrack::dual_bigon;
use traintrack::io;
use traintrack::measures;
use traintrack::moves;
use traintrack::strips::{self, EnumerateOptions, FlatStrip, SplittingSequence, Target};
use traintrack::{BranchId, Direction, SplitRecord, Surface, TrainTrack, TrackError, Q};

#[derive(Parser)]
#[command(name = "traintrack", version, about = "Exact train-track calculus")]
struct Cli {
    /// Worker threads for strip enumeration and link checks.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StripArgs {
    /// Base track of the strip.
    #[arg(long)]
    strip: String,
    /// Target given by a guide measure.
    #[arg(long, conflicts_with = "splits", required_unless_present = "splits")]
    guide: Option<String>,
    /// Target given as the end of a list of `split` records.
    #[arg(long)]
    splits: Option<String>,
    /// Maximal number of splits from the base.
    #[arg(long, default_value_t = 4)]
    radius: usize,
    /// Build cubes over a truncated strip, excluding frontier vertices.
    #[arg(long)]
    accept_truncated: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check every track invariant; prints OK or one line per violation.
    Validate {
        track: String,
        /// Surface as `genus,punctures`; derived from the track by default.
        #[arg(long)]
        surface: Option<String>,
    },
    /// List complementary regions with their cusps and boundary darts.
    Regions { track: String },
    /// Split a large branch (`R` or `L`).
    Split {
        track: String,
        branch: String,
        direction: String,
        /// Transport this transverse measure and write it to `--guide-out`.
        #[arg(long, requires = "guide_out")]
        guide: Option<String>,
        #[arg(long)]
        guide_out: Option<String>,
    },
    /// Shift a mixed branch.
    Shift { track: String, branch: String },
    /// Collapse the diagonal of a split.
    Collapse { track: String, branch: String },
    /// Comb every switch of valence at least four.
    Comb {
        track: String,
        /// Tangential weights; a strictly positive tangential measure is
        /// computed when omitted.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        weights_out: Option<String>,
    },
    /// Completeness surrogate and positive measures of a track.
    Measures {
        track: String,
        /// Check a transverse measure against the switch conditions.
        #[arg(long)]
        guide: Option<String>,
    },
    /// Enumerate a flat strip: `v` and `e` lines.
    EnumerateStrip(StripArgs),
    /// Cubes of the maximal cubical extension of a strip.
    Complex(StripArgs),
    /// Flag condition at every vertex link of the complex.
    Links(StripArgs),
    /// Quasi-isometry constants of the strip embedding.
    Qi(StripArgs),
    /// Tight multi-sequence between a track and a track it splits to.
    Bicombe {
        track_a: String,
        track_b: String,
        /// Longest splitting sequence searched for.
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// Iterate the circle multi-split of a twist connector `large/small`.
    Twist {
        track: String,
        connector: String,
        #[arg(long, default_value_t = 64)]
        max_iter: usize,
    },
    /// Dual bigon track with region census comments.
    Dual { track: String },
    /// Dual construction, strand pulling and bigon collapse, with a trace.
    CollapseLambda {
        track: String,
        guide: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Step budget as a multiple of the dual branch count.
        #[arg(long, default_value_t = 4)]
        budget_factor: usize,
    },
    /// Fixed-field summary of a strip and its complex.
    Stats(StripArgs),
}

fn read_input(path: &str) -> anyhow::Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn load_track(path: &str) -> anyhow::Result<TrainTrack> {
    let text = read_input(path)?;
    io::parse_track(&text).map_err(|e| anyhow!("{path}: {e}"))
}

fn load_weights(path: &str, t: &TrainTrack) -> anyhow::Result<Vec<Q>> {
    let text = read_input(path)?;
    let w = io::parse_weights(&text).map_err(|e| anyhow!("{path}: {e}"))?;
    if w.len() > t.branch_capacity() {
        bail!("{path}: weight for branch {} which the track does not have", w.len() - 1);
    }
    Ok(measures::padded(&w, t.branch_capacity()))
}

fn write_output(path: &str, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {path}"))
}

/// Branch arguments are written `7` or `e7`.
fn parse_branch(arg: &str) -> anyhow::Result<BranchId> {
    let digits = arg.strip_prefix('e').unwrap_or(arg);
    digits.parse().map_err(|_| anyhow!("bad branch label {arg:?}"))
}

fn parse_direction(arg: &str) -> anyhow::Result<Direction> {
    match arg {
        "R" | "r" => Ok(Direction::Right),
        "L" | "l" => Ok(Direction::Left),
        _ => bail!("direction must be R or L, got {arg:?}"),
    }
}

fn parse_surface(arg: &str) -> anyhow::Result<Surface> {
    let (g, m) = arg.split_once(',').ok_or_else(|| anyhow!("surface must be genus,punctures"))?;
    Ok(Surface::new(g.trim().parse()?, m.trim().parse()?))
}

fn record_list(recs: &[SplitRecord]) -> String {
    if recs.is_empty() {
        return "-".into();
    }
    recs.iter().map(|r| format!("{}{}", r.slot, r.direction)).collect::<Vec<_>>().join(",")
}

fn build_strip(a: &StripArgs, jobs: Option<usize>) -> anyhow::Result<FlatStrip> {
    let base = load_track(&a.strip)?;
    let target = match (&a.guide, &a.splits) {
        (Some(g), _) => Target::Guide(load_weights(g, &base)?),
        (None, Some(s)) => {
            let recs = io::parse_splits(&read_input(s)?).map_err(|e| anyhow!("{s}: {e}"))?;
            Target::Track(SplittingSequence::new(base.clone(), recs))
        }
        (None, None) => bail!("a strip needs --guide or --splits"),
    };
    Ok(strips::enumerate_strip(&base, &target, EnumerateOptions { radius: Some(a.radius), jobs })?)
}

fn build_complex(a: &StripArgs, jobs: Option<usize>) -> anyhow::Result<(FlatStrip, cubical::CubicalComplex)> {
    let strip = build_strip(a, jobs)?;
    let cx = cubical::build_complex(&strip, a.accept_truncated || strip.truncated)?;
    Ok((strip, cx))
}

/// Outcome of a subcommand: text for stdout and whether an invariant was
/// violated.
struct Report {
    text: String,
    violated: bool,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, violated: false }
    }
}

fn run(cli: Cli) -> anyhow::Result<Report> {
    let jobs = cli.jobs;
    let mut out = String::new();
    macro_rules! line {
        ($($arg:tt)*) => {{ out.push_str(&format!($($arg)*)); out.push('\n'); }};
    }
    match cli.command {
        Command::Validate { track, surface } => {
            let t = load_track(&track)?;
            let surface = match surface {
                Some(s) => parse_surface(&s)?,
                None => match t.surface() {
                    Some(s) => s,
                    None => {
                        line!("VIOLATION euler mismatch: the track does not fill a closed orientable surface");
                        return Ok(Report { text: out, violated: true });
                    }
                },
            };
            let rep = t.validate(&surface)?;
            if rep.is_ok() {
                line!("OK");
            }
            for v in &rep.violations {
                line!("VIOLATION {}: {}", v.clause(), v);
            }
            return Ok(Report { text: out, violated: !rep.is_ok() });
        }
        Command::Regions { track } => {
            let t = load_track(&track)?;
            for (i, r) in t.regions().iter().enumerate() {
                let kind = if r.is_trigon() {
                    "trigon"
                } else if r.is_punctured_monogon() {
                    "monogon"
                } else if r.is_bigon() {
                    "bigon"
                } else {
                    "other"
                };
                let darts: Vec<String> =
                    r.darts.iter().map(|d| format!("{}{}", if d.forward { '+' } else { '-' }, d.branch)).collect();
                line!(
                    "region {i} kind={kind} cusps={} punctured={} darts={}",
                    r.cusps(),
                    u8::from(r.punctured),
                    darts.join(",")
                );
            }
            let c = dual_bigon::census(&t);
            line!("census trigons={} monogons={} bigons={} other={}", c.trigons, c.monogons, c.bigons, c.other);
        }
        Command::Split { track, branch, direction, guide, guide_out } => {
            let t = load_track(&track)?;
            let rec = SplitRecord::new(parse_branch(&branch)?, parse_direction(&direction)?);
            let (s, _) = moves::split(&t, rec.slot, rec.direction)?;
            if let (Some(g), Some(path)) = (guide, guide_out) {
                let mu = load_weights(&g, &t)?;
                let mu2 = moves::transport_transverse(&t, &mu, rec)?;
                write_output(&path, &io::write_weights(&s, &mu2))?;
            }
            out.push_str(&io::write_track(&s));
        }
        Command::Shift { track, branch } => {
            let t = load_track(&track)?;
            let (s, _) = moves::shift(&t, parse_branch(&branch)?)?;
            out.push_str(&io::write_track(&s));
        }
        Command::Collapse { track, branch } => {
            let t = load_track(&track)?;
            let b = parse_branch(&branch)?;
            let (c, _) = moves::collapse(&t, b)?
                .ok_or_else(|| TrackError::Precondition(format!("branch {b} is not the diagonal of a split")))?;
            out.push_str(&io::write_track(&c));
        }
        Command::Comb { track, weights, weights_out } => {
            let t = load_track(&track)?;
            let nu = match weights {
                Some(w) => load_weights(&w, &t)?,
                None => measures::positive_tangential(&t, true)
                    .ok_or_else(|| TrackError::Measure("track is not transversely recurrent".into()))?,
            };
            let (c, nu2, _, steps) = moves::comb(&t, &nu, None)?;
            if let Some(path) = weights_out {
                write_output(&path, &io::write_weights(&c, &nu2))?;
            }
            line!("# comb steps={steps}");
            out.push_str(&io::write_track(&c));
        }
        Command::Measures { track, guide } => {
            let t = load_track(&track)?;
            let rep = measures::completeness_surrogate(&t);
            line!("{rep}");
            let mut violated = false;
            if let Some(g) = guide {
                let mu = load_weights(&g, &t)?;
                let transverse = measures::is_transverse(&t, &mu);
                let positive = measures::is_positive(&t, &mu);
                let nonzero = moves::switch_residuals(&t, &mu).iter().filter(|r| !num_traits::Zero::is_zero(*r)).count();
                line!("guide transverse={} positive={} nonzero_residuals={nonzero}", u8::from(transverse), u8::from(positive));
                violated = !transverse;
            }
            match measures::positive_transverse(&t) {
                Some(w) => t.branch_ids().for_each(|b| line!("transverse {b} {}", io::fmt_q(&w[b as usize]))),
                None => line!("transverse none"),
            }
            match measures::positive_tangential(&t, true) {
                Some(w) => t.branch_ids().for_each(|b| line!("tangential {b} {}", io::fmt_q(&w[b as usize]))),
                None => line!("tangential none"),
            }
            return Ok(Report { text: out, violated });
        }
        Command::EnumerateStrip(a) => {
            let strip = build_strip(&a, jobs)?;
            out.push_str(&strip.export());
        }
        Command::Complex(a) => {
            let (_, cx) = build_complex(&a, jobs)?;
            out.push_str(&cx.export());
        }
        Command::Links(a) => {
            let (_, cx) = build_complex(&a, jobs)?;
            let rep = cubical::check_links(&cx);
            for v in &rep.failures {
                line!("nonflag {v}");
            }
            line!("links checked={} skipped={} nonflag={}", rep.checked, rep.skipped, rep.failures.len());
            return Ok(Report { text: out, violated: !rep.failures.is_empty() });
        }
        Command::Qi(a) => {
            let strip = build_strip(&a, jobs)?;
            let c = cubical::qi_constants(&strip)?;
            let (lo, hi) = c.decimals();
            line!("c_lower {lo} sq={}", io::fmt_q(&c.lower_sq));
            line!("c_upper {hi} sq={}", io::fmt_q(&c.upper_sq));
        }
        Command::Bicombe { track_a, track_b, max_len } => {
            let a = load_track(&track_a)?;
            let b = load_track(&track_b)?;
            let recs = strips::find_splitting_sequence(&a, &b, max_len)?
                .ok_or_else(|| anyhow!("{track_b} is not reached from {track_a} within {max_len} splits"))?;
            line!("sequence {}", record_list(&recs));
            let tm = bicombing::tight_multi_sequence(&a, &recs)?;
            line!("station 0 -");
            for (k, m) in tm.moves.iter().enumerate() {
                line!("station {} {}", k + 1, record_list(m));
            }
        }
        Command::Twist { track, connector, max_iter } => {
            let t = load_track(&track)?;
            let (l, s) = connector.split_once('/').ok_or_else(|| anyhow!("connector must be large/small"))?;
            let (l, s) = (parse_branch(l)?, parse_branch(s)?);
            let circle = bicombing::connector_circle(&t, l, s)?;
            let sign = bicombing::twist_sign(&t, l, s)?;
            let tw = bicombing::circle_multi_split(&t, &circle, max_iter)?;
            let matched = traintrack::canonical_label(&tw.track) == traintrack::canonical_label(&t);
            line!("k={} sign={:+} canonical_match={} splits={}", tw.k, sign, u8::from(matched), tw.records.len());
        }
        Command::Dual { track } => {
            let t = load_track(&track)?;
            let d = dual_bigon::dual_track(&t)?;
            let (cs, cd) = (dual_bigon::census(&t), dual_bigon::census(&d.dual));
            line!("# source trigons={} monogons={} bigons={}", cs.trigons, cs.monogons, cs.bigons);
            line!("# dual trigons={} monogons={} bigons={}", cd.trigons, cd.monogons, cd.bigons);
            out.push_str(&io::write_track(&d.dual));
        }
        Command::CollapseLambda { track, guide, seed, budget_factor } => {
            let t = load_track(&track)?;
            let mu = load_weights(&guide, &t)?;
            let p = dual_bigon::run_pipeline(&t, &mu, seed, budget_factor)?;
            for l in &p.outcome.trace {
                line!("{l}");
            }
            let check = dual_bigon::output_ok(&p.outcome);
            line!(
                "result steps={} budget={} proxy_draws={} output={}",
                p.outcome.trace.len(),
                p.outcome.budget,
                p.proxy_draws,
                match &check {
                    Ok(()) => "ok".to_string(),
                    Err(e) => e.to_string(),
                }
            );
            return Ok(Report { text: out, violated: check.is_err() });
        }
        Command::Stats(a) => {
            let (strip, cx) = build_complex(&a, jobs)?;
            line!("{}", cubical::stats_line(&strip, &cx));
        }
    }
    Ok(Report::ok(out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(r) => {
            print!("{}", r.text);
            if r.violated {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
