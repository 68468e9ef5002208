//! `threefold` — command-line front end for the weighted-basket calculus.
//!
//! Every subcommand is pure: it reads its arguments (and, for table
//! verification, the datasets under `--data-dir`), writes a report to
//! standard output, and exits.  `--json` switches to line-delimited JSON
//! with every rational rendered as the string `"p/q"`.
//!
//! Exit status: 0 on success, 1 on a verification mismatch, 2 on usage
//! errors (bad flags, unparsable baskets, missing datasets).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use threefold::basket::{Basket, WeightedBasket};
use threefold::bounds::{fourfold_threshold, table_a};
use threefold::classifier::{
    delta_census, enumerate_initial, verify_table, EnumConstraints, TABLE_NAMES,
};
use threefold::filters::FloorProfile;
use threefold::notation::{format_rational, parse_basket};
use threefold::packing::{full_unpack, min_volume_dominated, rebuild_steps};
use threefold::Rat;

#[derive(Parser)]
#[command(name = "threefold", version, about = "Exact basket calculus for 3-folds of general type")]
struct Cli {
    /// Emit line-delimited JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel subcommands (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory holding the table datasets.
    #[arg(long, global = true, default_value = "data")]
    data_dir: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct BasketArgs {
    /// Basket, e.g. "{5*(1,2), (4,9), 2*(3,8)}" (`x` also accepted for `*`).
    #[arg(long)]
    basket: String,
    /// Second plurigenus P_2 of the weighting.
    #[arg(long, default_value_t = 0)]
    p2: i64,
    /// Euler characteristic chi(O) of the weighting.
    #[arg(long, default_value_t = 1)]
    chi: i64,
}

#[derive(Copy, Clone, ValueEnum)]
enum FloorArg {
    Generic,
    Classified,
}

impl From<FloorArg> for FloorProfile {
    fn from(f: FloorArg) -> FloorProfile {
        match f {
            FloorArg::Generic => FloorProfile::Generic,
            FloorArg::Classified => FloorProfile::Classified,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact plurigenera P_2..P_mmax and volume of a weighted basket.
    Pluri {
        #[command(flatten)]
        basket: BasketArgs,
        #[arg(long, default_value_t = 24)]
        mmax: u32,
    },
    /// Canonical volume K^3 of a weighted basket.
    Volume {
        #[command(flatten)]
        basket: BasketArgs,
    },
    /// Pluricanonical section index: smallest m with P_m >= 2.
    Delta {
        #[command(flatten)]
        basket: BasketArgs,
        #[arg(long, default_value_t = 24)]
        mmax: u32,
    },
    /// Mediant-merge steps rebuilding a basket from its atomic form.
    Pack {
        #[arg(long)]
        basket: String,
    },
    /// Fully unpack a basket into points of the form (1, r).
    Unpack {
        #[arg(long)]
        basket: String,
    },
    /// Minimal-volume basket dominated by the given one (same section index).
    Dominated {
        #[command(flatten)]
        basket: BasketArgs,
    },
    /// Enumerate admissible initial baskets for given chi range and P_2.
    Enumerate {
        /// Single value "2" or inclusive range "0..3".
        #[arg(long, default_value = "0..3")]
        chi: String,
        #[arg(long, default_value_t = 2)]
        p2: i64,
        #[arg(long, default_value_t = 13)]
        rmax: i64,
        #[arg(long, default_value_t = 24)]
        mmax: u32,
        #[arg(long, value_enum, default_value_t = FloorArg::Classified)]
        floor: FloorArg,
    },
    /// Re-verify the shipped datasets column by column.
    VerifyTables {
        /// One of F0, F1, F2, H, II1, II2, II3; default: all, plus the
        /// delta census over the F tables.
        #[arg(long)]
        table: Option<String>,
        #[arg(long, default_value_t = 24)]
        mmax: u32,
    },
    /// Regenerate a lower-bound table (1..=4).
    Bounds {
        #[arg(long)]
        table: u8,
    },
    /// Birationality threshold for 4-folds with p_g sections.
    Fourfold {
        #[arg(long)]
        pg: u32,
    },
}

fn rs(r: &Rat) -> String {
    format_rational(r)
}

/// Usage-level failure: message to stderr, exit 2.
fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn parse_basket_arg(text: &str) -> Result<Basket, String> {
    parse_basket(text).map_err(|e| format!("--basket {text:?}: {e}"))
}

fn weighted(args: &BasketArgs) -> Result<WeightedBasket, String> {
    Ok(WeightedBasket::new(parse_basket_arg(&args.basket)?, args.p2, args.chi))
}

fn main() -> ExitCode {
    // die quietly when the consumer of a pipe goes away (e.g. `| head`)
    // instead of panicking on the failed write
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            return usage_error(e);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => usage_error(msg),
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    let json = cli.json;
    match &cli.cmd {
        Cmd::Pluri { basket, mmax } => {
            let wb = weighted(basket)?;
            let profile = wb.pluri_profile((*mmax).max(2)).map_err(|e| e.to_string())?;
            if json {
                println!("{}", json!({"k3": rs(&profile.k3)}));
                for m in 2..=profile.m_max() {
                    println!("{}", json!({"m": m, "P": profile.get(m).unwrap().to_string()}));
                }
            } else {
                println!("k3={}", rs(&profile.k3));
                for m in 2..=profile.m_max() {
                    println!("P_{m}={}", profile.get(m).unwrap());
                }
            }
        }
        Cmd::Volume { basket } => {
            let v = weighted(basket)?.volume();
            if json {
                println!("{}", json!({"k3": rs(&v)}));
            } else {
                println!("k3={}", rs(&v));
            }
        }
        Cmd::Delta { basket, mmax } => {
            let wb = weighted(basket)?;
            let delta = wb.ps_index((*mmax).max(2)).map_err(|e| e.to_string())?;
            match (json, delta) {
                (true, d) => println!("{}", json!({"delta": d})),
                (false, Some(d)) => println!("delta={d}"),
                (false, None) => println!("delta=-"),
            }
        }
        Cmd::Pack { basket } => {
            let b = parse_basket_arg(basket)?;
            let steps = rebuild_steps(&b);
            for s in &steps {
                if json {
                    println!(
                        "{}",
                        json!({
                            "left": s.left.to_string(),
                            "right": s.right.to_string(),
                            "merged": s.merged.to_string(),
                            "level": s.level(),
                        })
                    );
                } else {
                    println!("{}+{}>{} level={}", s.left, s.right, s.merged, s.level());
                }
            }
            if json {
                println!("{}", json!({"basket": b.to_string(), "steps": steps.len()}));
            } else {
                println!("basket={b} steps={}", steps.len());
            }
        }
        Cmd::Unpack { basket } => {
            let b = full_unpack(&parse_basket_arg(basket)?);
            if json {
                println!("{}", json!({"basket": b.to_string()}));
            } else {
                println!("basket={b}");
            }
        }
        Cmd::Dominated { basket } => {
            let b = parse_basket_arg(&basket.basket)?;
            let r = min_volume_dominated(&b, basket.p2, basket.chi);
            if json {
                println!(
                    "{}",
                    json!({
                        "basket": r.basket.to_string(),
                        "volume": rs(&r.volume),
                        "steps": r.path.len(),
                    })
                );
            } else {
                println!("basket={} volume={} steps={}", r.basket, rs(&r.volume), r.path.len());
            }
        }
        Cmd::Enumerate { chi, p2, rmax, mmax, floor } => {
            let (lo, hi) = match chi.split_once("..") {
                Some((lo, hi)) => (
                    lo.trim().parse::<i64>().map_err(|_| format!("bad --chi {chi}"))?,
                    hi.trim().parse::<i64>().map_err(|_| format!("bad --chi {chi}"))?,
                ),
                None => {
                    let v = chi.trim().parse::<i64>().map_err(|_| format!("bad --chi {chi}"))?;
                    (v, v)
                }
            };
            let mut c = EnumConstraints::new(lo, hi, *p2, *rmax);
            c.m_check = (*mmax).max(6);
            c.floor = (*floor).into();
            let out = enumerate_initial(&c);
            for cand in &out {
                if json {
                    println!(
                        "{}",
                        json!({
                            "chi": cand.chi,
                            "basket": cand.basket.to_string(),
                            "k3": rs(&cand.profile.k3),
                        })
                    );
                } else {
                    println!("chi={} | {} | k3={}", cand.chi, cand.basket, rs(&cand.profile.k3));
                }
            }
            if !json {
                println!("survivors={}", out.len());
            }
        }
        Cmd::VerifyTables { table, mmax } => {
            let names: Vec<&str> = match table {
                Some(t) => vec![t.as_str()],
                None => TABLE_NAMES.to_vec(),
            };
            let mut clean = true;
            for name in &names {
                let report = verify_table(&cli.data_dir, name, *mmax, 20, Some(40))
                    .map_err(|e| e.to_string())?;
                clean &= report.ok();
                if json {
                    println!(
                        "{}",
                        json!({
                            "table": report.table,
                            "rows": report.rows,
                            "instances": report.instances,
                            "mismatches": report.mismatches,
                            "unverifiable": report.unverifiable,
                        })
                    );
                } else {
                    println!("{report}");
                    for m in &report.mismatches {
                        println!("  mismatch: {m}");
                    }
                }
            }
            if table.is_none() {
                let census = delta_census(&cli.data_dir, *mmax).map_err(|e| e.to_string())?;
                clean &= census.errors.is_empty();
                for (delta, rows) in &census.by_delta {
                    let min = census.min_volume(*delta).expect("nonempty stratum");
                    if json {
                        println!(
                            "{}",
                            json!({"delta": delta, "baskets": rows.len(), "min_volume": rs(&min)})
                        );
                    } else {
                        println!("delta={delta}: baskets={} min_volume={}", rows.len(), rs(&min));
                    }
                }
                for e in &census.errors {
                    println!("  census error: {e}");
                }
            }
            if !clean {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Bounds { table } => {
            if !(1..=4).contains(table) {
                return Err(format!("--table {table}: expected 1..=4"));
            }
            for (m0, xi, k3) in table_a(*table) {
                if json {
                    println!("{}", json!({"m0": m0, "xi": rs(&xi), "k3": rs(&k3)}));
                } else {
                    println!("m0={m0} xi={} k3={}", rs(&xi), rs(&k3));
                }
            }
        }
        Cmd::Fourfold { pg } => {
            if *pg < 2 {
                return Err("--pg must be at least 2".to_string());
            }
            let m = fourfold_threshold(*pg);
            if json {
                println!("{}", json!({"pg": pg, "m_min": m}));
            } else {
                println!("m_min={m}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
