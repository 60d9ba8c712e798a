//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure (or differing `diff` inputs),
//! 2 usage error, including unparseable basket text or config files.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wbasket::b5::{b5_coefficients, head_coefficients, enumerate_b5, B5Ranges, B5Search, IntRange, PlurigenusData};
use wbasket::basket::{parse_terms, validate_terms, Basket, ValidateOptions, WeightedBasket};
use wbasket::bounds::{self, RefinementState};
use wbasket::classify::{self, ClassificationResult, ScenarioConfig};
use wbasket::manifest::{FilterRecord, RunManifest};
use wbasket::packing::{self, DescendantFilter, SearchOptions, Traversal};
use wbasket::{Error, Rational};

#[derive(Parser)]
#[command(name = "wbasket", version, about = "Exact weighted-basket calculator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Out {
    Text,
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Bfs,
    Dfs,
    Parallel,
}

#[derive(Subcommand)]
enum Cmd {
    /// Plurigenera, volume and index of a weighted basket.
    Eval {
        basket: String,
        #[arg(long)]
        p2: i64,
        #[arg(long)]
        chi: i64,
        /// Range of m, `a..b` (inclusive) or a single value.
        #[arg(long, default_value = "2..8")]
        m: String,
        #[arg(long, value_enum, default_value = "text")]
        out: Out,
    },
    /// Filtered packing descendants of a weighted basket.
    Pack {
        basket: String,
        #[arg(long)]
        p2: i64,
        #[arg(long)]
        chi: i64,
        #[arg(long)]
        min_k3: Option<String>,
        /// Keep chi_m fixed for 3 <= m <= M.
        #[arg(long)]
        preserve_pm: Option<u32>,
        /// Allowed plurigenus values, `m=v1,v2`; repeatable.
        #[arg(long = "pin")]
        pins: Vec<String>,
        #[arg(long)]
        rx_divisor: Option<u64>,
        #[arg(long)]
        integrality: Option<u32>,
        #[arg(long)]
        max_depth: Option<u32>,
        #[arg(long, value_enum, default_value = "bfs")]
        traversal: Order,
        /// Walk subtrees below unreachable plurigenus targets too.
        #[arg(long)]
        no_prune: bool,
        #[arg(long, value_enum, default_value = "text")]
        out: Out,
    },
    /// B^(5) from plurigenus data, or all of them over a box.
    B5 {
        /// Each of these takes a value or an inclusive range `a..b`.
        #[arg(long, allow_hyphen_values = true)]
        chi: String,
        #[arg(long)]
        p2: String,
        #[arg(long)]
        p3: String,
        #[arg(long)]
        p4: String,
        #[arg(long)]
        p5: String,
        #[arg(long)]
        p6: String,
        #[arg(long)]
        sigma5: Option<i64>,
        /// Tail indices, e.g. `7,7,9`; implies a single data point.
        #[arg(long)]
        tail: Option<String>,
        #[arg(long, default_value_t = 30)]
        tail_r_max: u32,
        #[arg(long)]
        min_k3: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        out: Out,
    },
    /// Scenario searches.
    Classify {
        #[arg(value_enum)]
        scenario: Scenario,
        /// Flat JSON config; a previous result or manifest also works.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Print the resolved config and exit.
        #[arg(long)]
        print_config: bool,
        #[arg(long, value_enum, default_value = "json")]
        out: Out,
    },
    /// Lower-bound refinement for xi with a derivation transcript.
    Xi {
        #[arg(long)]
        m0: u32,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        beta: String,
        /// Starting bound; seeded from deg K_C, mu and beta when absent.
        #[arg(long)]
        xi: Option<String>,
        #[arg(long)]
        deg_kc: i64,
        #[arg(long)]
        rx: Option<u64>,
        #[arg(long, default_value = "2..60")]
        range: String,
        #[arg(long)]
        m1: Option<u32>,
        #[arg(long)]
        zeta: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        out: Out,
    },
    /// Symmetric difference of the refined lists of two result files.
    Diff {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        out: Out,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scenario {
    Pg1,
    Pg3,
}

enum Failure {
    Usage(String),
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Config(_) | Error::OutOfRange(_) => Failure::Usage(e.to_string()),
            Error::InvalidPair { .. } | Error::Infeasible { .. } => Failure::Invalid(e.to_string()),
        }
    }
}

type CmdResult = Result<(String, bool), Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok((mut text, ok)) => {
            if !text.ends_with('\n') {
                text.push('\n');
            }
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> CmdResult {
    match cmd {
        Cmd::Eval { basket, p2, chi, m, out } => eval(&basket, p2, chi, &m, out),
        Cmd::Pack {
            basket,
            p2,
            chi,
            min_k3,
            preserve_pm,
            pins,
            rx_divisor,
            integrality,
            max_depth,
            traversal,
            no_prune,
            out,
        } => {
            let mut filter = DescendantFilter {
                k3_floor: min_k3.as_deref().map(rational).transpose()?,
                preserve_pm_upto: preserve_pm,
                rx_divisor,
                integrality_upto: integrality,
                ..Default::default()
            };
            for pin in &pins {
                let (m, vals) = parse_pin(pin)?;
                filter.pm_pins.insert(m, vals);
            }
            let opts = SearchOptions {
                max_depth,
                traversal: match traversal {
                    Order::Bfs => Traversal::BreadthFirst,
                    Order::Dfs => Traversal::DepthFirst,
                    Order::Parallel => Traversal::Parallel,
                },
                prune_on_pm_deficit: !no_prune,
            };
            pack(&basket, p2, chi, &filter, &opts, out)
        }
        Cmd::B5 {
            chi,
            p2,
            p3,
            p4,
            p5,
            p6,
            sigma5,
            tail,
            tail_r_max,
            min_k3,
            out,
        } => {
            let ranges = B5Ranges {
                chi: int_range(&chi)?,
                p: [
                    int_range(&p2)?,
                    int_range(&p3)?,
                    int_range(&p4)?,
                    int_range(&p5)?,
                    int_range(&p6)?,
                ],
            };
            let floor = min_k3.as_deref().map(rational).transpose()?;
            b5(ranges, sigma5, tail.as_deref(), tail_r_max, floor, out)
        }
        Cmd::Classify {
            scenario,
            config,
            print_config,
            out,
        } => classify_cmd(scenario, config, print_config, out),
        Cmd::Xi {
            m0,
            mu,
            beta,
            xi,
            deg_kc,
            rx,
            range,
            m1,
            zeta,
            out,
        } => {
            let mut s = RefinementState::seeded(m0, rational(&mu)?, rational(&beta)?, deg_kc)?;
            let seeded = xi.is_none();
            if let Some(x) = xi {
                s.xi_lb = rational(&x)?;
            }
            s.rx = rx;
            s.m1 = m1;
            if let Some(z) = zeta {
                s.zeta = rational(&z)?;
            }
            s.check()?;
            let r = int_range(&range)?;
            if r.lo < 1 || r.hi > u32::MAX as i64 {
                return usage("range must lie in 1..4294967295");
            }
            xi_cmd(s, seeded, r.lo as u32..=r.hi as u32, out)
        }
        Cmd::Diff { left, right, out } => diff(&left, &right, out),
    }
}

fn rational(s: &str) -> Result<Rational, Failure> {
    s.parse().map_err(|e: wbasket::rational::ParseRationalError| Failure::Usage(e.to_string()))
}

fn int_range(s: &str) -> Result<IntRange, Failure> {
    let num = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| Failure::Usage(format!("bad integer `{t}` in range `{s}`")))
    };
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok(IntRange::new(num(a)?, num(b)?))
        }
        None => Ok(IntRange::point(num(s)?)),
    }
}

fn parse_pin(s: &str) -> Result<(u32, BTreeSet<i64>), Failure> {
    let bad = || Failure::Usage(format!("bad pin `{s}`, expected m=v1,v2"));
    let (m, vals) = s.split_once('=').ok_or_else(bad)?;
    let m: u32 = m.trim().parse().map_err(|_| bad())?;
    if m < 2 {
        return Err(bad());
    }
    let vals = vals
        .split(',')
        .map(|v| v.trim().parse::<i64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    Ok((m, vals))
}

fn unsupported<T>(out: Out, cmd: &str) -> Result<T, Failure> {
    let name = match out {
        Out::Text => "text",
        Out::Json => "json",
        Out::Csv => "csv",
        Out::Dot => "dot",
    };
    usage(format!("`{cmd}` does not support --out {name}"))
}

fn to_json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn csv_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Parses basket text and validates it with the given weights.
fn weighted(text: &str, p2: i64, chi: i64, integrality: Option<u32>) -> Result<(WeightedBasket, Vec<String>), Failure> {
    let terms = parse_terms(text)?;
    let report = validate_terms(&terms, p2, chi, &ValidateOptions { integrality_upto: integrality });
    let failures: Vec<String> = report.failures.iter().map(|f| f.to_string()).collect();
    let bad_pair = report
        .failures
        .iter()
        .any(|f| matches!(f, wbasket::basket::Failure::InvalidPair { .. }));
    if bad_pair {
        return Err(Failure::Invalid(failures.join("; ")));
    }
    let basket = Basket::parse(text)?;
    Ok((WeightedBasket::new(basket, p2, chi), failures))
}

fn eval(text: &str, p2: i64, chi: i64, m: &str, out: Out) -> CmdResult {
    let started = Instant::now();
    let range = int_range(m)?;
    if range.lo < 2 {
        return usage("plurigenera are defined for m >= 2");
    }
    let (wb, failures) = weighted(text, p2, chi, None)?;
    let k3 = wb.k3();
    let rx = wb.cartier_index();
    let values: Vec<(u32, Rational)> = (range.lo..=range.hi.min(u32::MAX as i64))
        .map(|m| (m as u32, wb.plurigenus_with_k3(m as u32, &k3)))
        .collect();
    let ok = failures.is_empty();
    let body = match out {
        Out::Text => {
            let mut s = format!("basket {{{}}}  P2={p2}  chi={chi}\nK3 = {k3}\nr_X = {rx}\n", wb.basket);
            for (m, v) in &values {
                let flag = if v.is_integer() { "" } else { "  (not an integer)" };
                s += &format!("P{m} = {v}{flag}\n");
            }
            for f in &failures {
                s += &format!("invalid: {f}\n");
            }
            s
        }
        Out::Json => {
            let mut manifest = RunManifest::new("eval", json!({"basket": wb.basket, "p2": p2, "chi": chi, "m": [range.lo, range.hi]}));
            manifest.elapsed_ms = started.elapsed().as_millis();
            let pm: Vec<Value> = values
                .iter()
                .map(|(m, v)| json!({"m": m, "value": v, "integral": v.is_integer()}))
                .collect();
            to_json(&json!({
                "manifest": manifest,
                "basket": wb.basket,
                "p2": p2,
                "chi": chi,
                "k3": k3,
                "rx": rx,
                "plurigenera": pm,
                "valid": ok,
                "failures": failures,
            }))
        }
        Out::Csv => csv_rows(
            &["m", "value", "integral"],
            values
                .iter()
                .map(|(m, v)| vec![m.to_string(), v.to_string(), v.is_integer().to_string()]),
        ),
        Out::Dot => return unsupported(out, "eval"),
    };
    Ok((body, ok))
}

fn pack(text: &str, p2: i64, chi: i64, filter: &DescendantFilter, opts: &SearchOptions, out: Out) -> CmdResult {
    let started = Instant::now();
    let (wb, failures) = weighted(text, p2, chi, None)?;
    if !failures.is_empty() {
        return Err(Failure::Invalid(failures.join("; ")));
    }
    if out == Out::Dot {
        return Ok((packing::packing_dag_dot(&wb, filter, opts), true));
    }
    let s = packing::search(&wb, filter, opts);
    let body = match out {
        Out::Text => s
            .accepted
            .iter()
            .map(|d| format!("{{{}}}  K3={}  r_X={}\n", d.basket, d.k3(), d.cartier_index()))
            .collect(),
        Out::Json => {
            let mut manifest = RunManifest::new(
                "pack",
                json!({"basket": wb.basket, "p2": p2, "chi": chi, "filter": filter, "search": opts}),
            );
            if let Some(f) = &filter.k3_floor {
                manifest.filters.push(FilterRecord::new("k3_floor", f, None));
            }
            if let Some(m) = filter.preserve_pm_upto {
                manifest.filters.push(FilterRecord::new("preserve_pm_upto", m, None));
            }
            for (m, v) in &filter.pm_pins {
                manifest.filters.push(FilterRecord::new(format!("p{m}_pin"), format!("{v:?}"), None));
            }
            if let Some(d) = filter.rx_divisor {
                manifest.filters.push(FilterRecord::new("rx_divisor", d, None));
            }
            if let Some(d) = filter.integrality_upto {
                manifest.filters.push(FilterRecord::new("integrality_upto", d, None));
            }
            manifest.count("descendants", s.accepted.len());
            manifest.count("visited", s.visited);
            manifest.elapsed_ms = started.elapsed().as_millis();
            let list: Vec<_> = s.accepted.iter().map(classify::RefinedCandidate::new).collect();
            to_json(&json!({"manifest": manifest, "descendants": list}))
        }
        Out::Csv => csv_rows(
            &["basket", "p2", "chi", "k3", "rx"],
            s.accepted.iter().map(|d| {
                vec![
                    d.basket.to_string(),
                    d.p2.to_string(),
                    d.chi.to_string(),
                    d.k3().to_string(),
                    d.cartier_index().to_string(),
                ]
            }),
        ),
        Out::Dot => unreachable!(),
    };
    Ok((body, true))
}

fn parse_tail(s: &str) -> Result<BTreeMap<u32, u32>, Failure> {
    let mut tail = BTreeMap::new();
    for t in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let r: u32 = t.parse().map_err(|_| Failure::Usage(format!("bad tail index `{t}`")))?;
        *tail.entry(r).or_insert(0) += 1;
    }
    Ok(tail)
}

fn b5(
    ranges: B5Ranges,
    sigma5: Option<i64>,
    tail: Option<&str>,
    tail_r_max: u32,
    floor: Option<Rational>,
    out: Out,
) -> CmdResult {
    let started = Instant::now();
    if tail_r_max < 5 {
        return usage("--tail-r-max must be at least 5");
    }
    let point = |r: &IntRange| (r.lo == r.hi).then_some(r.lo);
    let single = point(&ranges.chi).is_some() && ranges.p.iter().all(|r| point(r).is_some());
    let candidates = if let (true, Some(tail)) = (single, tail) {
        let tail = parse_tail(tail)?;
        let d = PlurigenusData {
            chi: ranges.chi.lo,
            p: ranges.p.map(|r| r.lo),
            sigma5: sigma5.unwrap_or(tail.values().sum::<u32>() as i64),
            tail,
        };
        vec![(d.clone(), b5_coefficients(&d)?)]
    } else if tail.is_some() {
        return usage("--tail needs every plurigenus fixed to a single value");
    } else if let (true, Some(0)) = (single, sigma5) {
        let d = PlurigenusData::untailed(ranges.chi.lo, ranges.p.map(|r| r.lo));
        vec![(d.clone(), b5_coefficients(&d)?)]
    } else {
        if let (true, Some(s)) = (single, sigma5) {
            // Report a violated relation instead of an empty list.
            let d = PlurigenusData {
                sigma5: s,
                ..PlurigenusData::untailed(ranges.chi.lo, ranges.p.map(|r| r.lo))
            };
            head_coefficients(&d)?;
        }
        let mut s = B5Search::new(ranges.clone());
        s.tail_r_max = tail_r_max;
        s.sigma5 = sigma5;
        s.k3_floor = floor.clone();
        let e = enumerate_b5(&s);
        if e.boundary_rejections > 0 {
            eprintln!(
                "note: {} candidates need a tail index above {tail_r_max}",
                e.boundary_rejections
            );
        }
        e.candidates
    };
    let ok = !candidates.is_empty();
    let raw: Vec<_> = candidates.iter().map(|(d, r)| classify::RawCandidate::new(d, r)).collect();
    let body = match out {
        Out::Json => {
            let mut manifest = RunManifest::new(
                "b5",
                json!({"ranges": ranges, "sigma5": sigma5, "tail_r_max": tail_r_max, "k3_floor": floor}),
            );
            manifest.count("candidates", raw.len());
            manifest.elapsed_ms = started.elapsed().as_millis();
            to_json(&json!({"manifest": manifest, "candidates": raw}))
        }
        Out::Csv => csv_rows(
            &["chi", "p2", "p3", "p4", "p5", "p6", "sigma5", "basket", "k3"],
            raw.iter().map(|c| {
                let mut row = vec![c.chi.to_string()];
                row.extend(c.p.iter().map(i64::to_string));
                row.extend([c.sigma5.to_string(), c.basket.to_string(), c.k3.to_string()]);
                row
            }),
        ),
        Out::Text => raw
            .iter()
            .map(|c| {
                format!(
                    "chi={} P={:?} sigma5={}  n={:?}  {{{}}}  K3={}\n",
                    c.chi, c.p, c.sigma5, c.coefficients, c.basket, c.k3
                )
            })
            .collect(),
        Out::Dot => return unsupported(out, "b5"),
    };
    Ok((body, ok))
}

fn load_configs(scenario: Scenario, path: Option<&PathBuf>) -> Result<Vec<ScenarioConfig>, Failure> {
    let Some(path) = path else {
        return Ok(match scenario {
            Scenario::Pg1 => classify::pg1_subcases(),
            Scenario::Pg3 => vec![classify::pg3_default()],
        });
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    // A result document or a bare manifest carries the config in `parameters`.
    let params = v
        .get("manifest")
        .and_then(|m| m.get("parameters"))
        .or_else(|| v.get("parameters"))
        .cloned()
        .unwrap_or(v);
    let list = match params {
        Value::Array(items) => items,
        other => vec![other],
    };
    list.into_iter()
        .map(|c| {
            let cfg: ScenarioConfig =
                serde_json::from_value(c).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            cfg.check()?;
            Ok(cfg)
        })
        .collect()
}

fn classify_cmd(scenario: Scenario, config: Option<PathBuf>, print_config: bool, out: Out) -> CmdResult {
    let cfgs = load_configs(scenario, config.as_ref())?;
    if print_config {
        return Ok(match cfgs.as_slice() {
            [one] => (to_json(one), true),
            many => (to_json(&many), true),
        });
    }
    let res: ClassificationResult = match (scenario, cfgs.as_slice()) {
        (Scenario::Pg3, [cfg]) => classify::run_pg3(cfg),
        (Scenario::Pg3, many) => classify::run_configs("classify pg3", many),
        (Scenario::Pg1, many) => classify::run_configs("classify pg1", many),
    };
    // Independent re-check of everything that was emitted.
    let mut problems = Vec::new();
    for c in &res.raw {
        if cfgs.iter().all(|cfg| !classify::revalidate_raw(cfg, c).is_empty()) {
            problems.push(format!("raw candidate {} fails re-validation", c.basket));
        }
    }
    for c in &res.refined {
        if cfgs.iter().all(|cfg| !classify::revalidate_refined(cfg, c).is_empty()) {
            problems.push(format!("refined basket {} fails re-validation", c.basket));
        }
    }
    for p in &problems {
        eprintln!("error: {p}");
    }
    let ok = problems.is_empty();
    let body = match out {
        Out::Json => to_json(&res),
        Out::Csv => csv_rows(
            &["basket", "p2", "chi", "k3", "rx"],
            res.refined.iter().map(|c| {
                vec![
                    c.basket.to_string(),
                    c.p2.to_string(),
                    c.chi.to_string(),
                    c.k3.to_string(),
                    c.rx.to_string(),
                ]
            }),
        ),
        Out::Text => {
            let mut s = format!("{}: {} raw, {} refined\n", res.manifest.command, res.raw.len(), res.refined.len());
            for c in &res.refined {
                s += &format!("{{{}}}  P2={} chi={}  K3={}  r_X={}\n", c.basket, c.p2, c.chi, c.k3, c.rx);
            }
            s
        }
        Out::Dot => return unsupported(out, "classify"),
    };
    Ok((body, ok))
}

fn xi_cmd(s: RefinementState, seeded: bool, range: std::ops::RangeInclusive<u32>, out: Out) -> CmdResult {
    let started = Instant::now();
    let r = bounds::refine_xi(&s, range.clone());
    let detail = bounds::birational_level_detail(&r.state);
    let body = match out {
        Out::Text => {
            let mut t = String::new();
            if seeded {
                t += &format!(
                    "seed: ξ ≥ {} / (1 + 1/μ + 1/β) = {}\n",
                    s.deg_kc, s.xi_lb
                );
            } else {
                t += &format!("start: ξ ≥ {}\n", s.xi_lb);
            }
            for step in &r.transcript {
                t += &format!("{step}\n");
            }
            if r.capped {
                t += &format!("round limit reached after {} rounds\n", r.rounds);
            }
            t += &format!("K3 ≥ {}\n", bounds::k3_lower(&r.state));
            t += &format!("ξ ≥ {}; birational level {}\n", r.state.xi_lb, detail.level);
            t
        }
        Out::Json => {
            let mut manifest = RunManifest::new(
                "xi",
                json!({"state": s, "seeded": seeded, "range": [range.start(), range.end()]}),
            );
            manifest.notes = bounds::ASSUMPTIONS.iter().map(|a| a.to_string()).collect();
            manifest.elapsed_ms = started.elapsed().as_millis();
            let lines: Vec<String> = r.transcript.iter().map(ToString::to_string).collect();
            to_json(&json!({
                "manifest": manifest,
                "refinement": r,
                "lines": lines,
                "k3_lower": bounds::k3_lower(&r.state),
                "level": detail,
                "assumptions": bounds::ASSUMPTIONS,
            }))
        }
        Out::Csv => csv_rows(
            &["rule", "m", "old", "new"],
            r.transcript.iter().map(|st| {
                vec![
                    st.rule.to_string(),
                    st.m.map(|m| m.to_string()).unwrap_or_default(),
                    st.old.to_string(),
                    st.new.to_string(),
                ]
            }),
        ),
        Out::Dot => return unsupported(out, "xi"),
    };
    Ok((body, true))
}

fn diff(left: &PathBuf, right: &PathBuf, out: Out) -> CmdResult {
    let read = |p: &PathBuf| -> Result<_, Failure> {
        let text = fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
        classify::refined_from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
    };
    let d = classify::diff_refined(&read(left)?, &read(right)?);
    let same = d.is_empty();
    let body = match out {
        Out::Json => to_json(&d),
        Out::Text => {
            let mut s = format!(
                "common {}, only left {}, only right {}\n",
                d.common,
                d.only_left.len(),
                d.only_right.len()
            );
            for w in &d.only_left {
                s += &format!("< {{{}}} P2={} chi={}\n", w.basket, w.p2, w.chi);
            }
            for w in &d.only_right {
                s += &format!("> {{{}}} P2={} chi={}\n", w.basket, w.p2, w.chi);
            }
            s
        }
        _ => return unsupported(out, "diff"),
    };
    Ok((body, same))
}
