//! `eck`: command-line front end for the ECK calculator.
//!
//! Exit codes: 0 on success, 1 when a computation or validation fails, 2 on
//! malformed flags.

use std::fs;
use std::io::Read as _;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use eck::chaincx::spectral_sequence;
use eck::dehntwist::{closed_form_generators, enumerate_generators, pfc_complex, Endpoint};
use eck::euler::{categorification_check, fox_torsion_torus, graded_chi, MatchKind};
use eck::surgery::{surgery_eck_hat, SurgerySpec};
use eck::torusknot::render_diagram;
use eck::{
    ChainComplex, Direction, FiltrationSpec, Grading, Laurent, SlopeInterval, SurgeryResult,
    TorusKnot,
};

#[derive(Parser, Debug)]
#[command(
    name = "eck",
    version,
    about = "Exact F2 calculator for embedded contact knot homology"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hat groups or the full bi-filtered complex of T(2,n).
    Torus(TorusArgs),
    /// Hat ECK of large negative surgery on T(2,m).
    #[command(allow_negative_numbers = true)]
    Surgery(SurgeryArgs),
    /// Dehn-twist periodic Floer generators and homology.
    #[command(allow_negative_numbers = true)]
    Pfh(PfhArgs),
    /// Graded Euler characteristic of a complex stored as JSON.
    Chi(ChiArgs),
    /// Fox-calculus torsion of the torus-knot complement.
    Torsion(TorsionArgs),
    /// Compare the graded Euler characteristic with the torsion.
    #[command(allow_negative_numbers = true)]
    Categorify(CategorifyArgs),
    /// Render or convert complexes.
    #[command(subcommand)]
    Complex(ComplexCommand),
    /// Spectral-sequence page ranks of a filtered complex.
    Ss(SsArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ShowFormat {
    Ascii,
    Json,
}

#[derive(Args, Debug)]
struct TorusArgs {
    /// Odd n ≥ 3.
    #[arg(long)]
    n: i64,
    /// Emit the full complex (dot-and-arrow diagram or JSON) instead of the hat table.
    #[arg(long)]
    full: bool,
    /// Largest e+ power of the full complex (default 2g).
    #[arg(long, requires = "full")]
    imax: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
struct SurgeryArgs {
    /// The knot, written `t2_m`.
    #[arg(long, value_parser = parse_knot)]
    knot: i64,
    /// The framing; must be negative with |framing| > 2g.
    #[arg(long)]
    framing: i64,
    /// Restrict the output to one residue class.
    #[arg(long)]
    class: Option<i64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
struct PfhArgs {
    /// Interval endpoints, e.g. `-e 1/5+e`.
    #[arg(long, num_args = 2, allow_hyphen_values = true, value_names = ["LO", "HI"])]
    interval: Vec<String>,
    /// Total winding P.
    #[arg(long)]
    p: i64,
    /// Total Alexander grading Q.
    #[arg(long)]
    q: i64,
    /// Compute homology as well as generators.
    #[arg(long)]
    homology: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
struct ChiArgs {
    /// JSON file holding a complex (`-` for standard input).
    #[arg(long)]
    complex: String,
    /// Grading to take the characteristic in.
    #[arg(long, default_value = "alexander")]
    grading: String,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
struct TorsionArgs {
    /// Torus-knot parameters p and q.
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    torus: Vec<i64>,
    /// Highest degree kept.
    #[arg(long)]
    cutoff: i64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
struct CategorifyArgs {
    #[arg(long, value_parser = parse_knot)]
    knot: i64,
    /// Check the surgered knot for this (negative) framing instead.
    #[arg(long)]
    framing: Option<i64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum ComplexCommand {
    /// Render a complex as a diagram or as JSON.
    Show(ShowArgs),
}

#[derive(Args, Debug)]
struct ShowArgs {
    /// Build the full complex of this knot (`t2_m`).
    #[arg(long, value_parser = parse_knot, conflicts_with = "from_json", required_unless_present = "from_json")]
    knot: Option<i64>,
    /// Largest e+ power when building from a knot (default 2g).
    #[arg(long, requires = "knot")]
    imax: Option<u32>,
    /// Read the complex from a JSON file (`-` for standard input).
    #[arg(long)]
    from_json: Option<String>,
    #[arg(long, value_enum, default_value_t = ShowFormat::Ascii)]
    format: ShowFormat,
}

#[derive(Args, Debug)]
struct SsArgs {
    /// JSON file holding a complex (`-` for standard input).
    #[arg(long)]
    file: String,
    /// Grading used as the filtration.
    #[arg(long)]
    filtration: String,
    /// Whether the differential lowers (ascending) or raises (descending) the level.
    #[arg(long, default_value = "ascending", value_parser = parse_direction)]
    direction: Direction,
    /// Highest page index computed.
    #[arg(long)]
    pages: usize,
    /// Auxiliary grading splitting each level (default z2).
    #[arg(long)]
    aux: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

fn parse_knot(s: &str) -> Result<i64, String> {
    s.strip_prefix("t2_")
        .and_then(|m| m.parse::<i64>().ok())
        .ok_or_else(|| format!("expected a knot of the form t2_m, got `{s}`"))
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<String> {
    match command {
        Command::Torus(a) => torus(a),
        Command::Surgery(a) => surgery(a),
        Command::Pfh(a) => pfh(a),
        Command::Chi(a) => chi(a),
        Command::Torsion(a) => torsion(a),
        Command::Categorify(a) => categorify(a),
        Command::Complex(ComplexCommand::Show(a)) => show(a),
        Command::Ss(a) => ss(a),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .context("reading standard input")?;
        Ok(text)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn read_complex(path: &str) -> Result<ChainComplex> {
    Ok(ChainComplex::from_json(&read_input(path)?)?)
}

fn knot(m: i64) -> Result<TorusKnot> {
    Ok(TorusKnot::new(m)?)
}

/// Degree → coefficient map, keyed by the decimal degree.
fn laurent_json(p: &Laurent) -> Value {
    let map: Map<String, Value> = p.terms().map(|(d, c)| (d.to_string(), json!(c))).collect();
    Value::Object(map)
}

fn torus(a: TorusArgs) -> Result<String> {
    let k = knot(a.n)?;
    if a.full {
        let imax = a.imax.unwrap_or(u32::try_from(2 * k.genus())?);
        let c = k.full_complex(imax);
        return Ok(match a.format {
            Format::Table => render_diagram(&c),
            Format::Json => c.to_json() + "\n",
        });
    }
    let hat = k.eck_hat();
    let top = 2 * k.genus();
    match a.format {
        Format::Table => {
            let mut out = format!(
                "T(2,{}), genus {}: hat ECK (1 = empty orbit set)\n",
                a.n,
                k.genus()
            );
            out.push_str("grading  rank  generator\n");
            for g in 0..=top {
                let gen = hat.generator(g).unwrap_or_else(|| "-".into());
                out.push_str(&format!("{g:>7}  {:>4}  {gen}\n", hat.rank(g)));
            }
            out.push_str(&format!("rank 0 in gradings above {top}\n"));
            Ok(out)
        }
        Format::Json => {
            let groups: Vec<Value> = (0..=top)
                .map(|g| json!({"grading": g, "rank": hat.rank(g), "generator": hat.generator(g)}))
                .collect();
            Ok(pretty(
                &json!({"n": a.n, "genus": k.genus(), "groups": groups}),
            ))
        }
    }
}

fn surgery_spec(m: i64, framing: i64) -> Result<SurgerySpec> {
    let k = knot(m)?;
    if framing >= 0 {
        bail!(
            "framing {framing} is out of scope: only negative framings -n with n > 2g = {} are supported",
            2 * k.genus()
        );
    }
    Ok(SurgerySpec::new(k, -framing)?)
}

fn surgery(a: SurgeryArgs) -> Result<String> {
    let spec = surgery_spec(a.knot, a.framing)?;
    let mut result = surgery_eck_hat(&spec);
    if let Some(j) = a.class {
        let class = result.class(j)?.clone();
        result.classes = vec![class];
    }
    Ok(match a.format {
        Format::Table => surgery_table(&result),
        Format::Json => serde_json::to_string_pretty(&result)? + "\n",
    })
}

fn surgery_table(r: &SurgeryResult) -> String {
    let mut out = format!("surgery on T(2,{}) with framing -{}\n", r.m, r.n);
    for class in &r.classes {
        out.push_str(&format!("class [{}]\n", class.class));
        for piece in class.pieces.iter().filter(|p| p.rank > 0) {
            let reps: Vec<String> = piece
                .representatives
                .iter()
                .map(|r| r.join(" + "))
                .collect();
            out.push_str(&format!(
                "  grading {}: rank {}  [{}]\n",
                piece.grading,
                piece.rank,
                reps.join(", ")
            ));
        }
    }
    out
}

fn pfh(a: PfhArgs) -> Result<String> {
    let lo: Endpoint = a.interval[0].parse()?;
    let hi: Endpoint = a.interval[1].parse()?;
    let iv = SlopeInterval::new(lo, hi)?;
    let gens = enumerate_generators(&iv, a.p, a.q);
    let homology = if a.homology {
        let c = pfc_complex(&iv, a.p, a.q)?;
        let h = c.total_homology()?;
        Some((h, closed_form_generators(&iv, a.p, a.q)))
    } else {
        None
    };
    match a.format {
        Format::Table => {
            let mut out = format!("interval {iv}, P = {}, Q = {}\n", a.p, a.q);
            out.push_str(&format!("{} generators\n", gens.len()));
            for g in &gens {
                out.push_str(&format!("  {g}  (h count {})\n", g.hyperbolic_count()));
            }
            if let Some((h, closed)) = homology {
                out.push_str(&format!("homology rank {}\n", h.rank));
                for (i, rep) in h.representatives.iter().enumerate() {
                    out.push_str(&format!("  class {}: {}\n", i + 1, rep.join(" + ")));
                }
                if let Some((e, hs)) = closed {
                    out.push_str(&format!("  E = {e}\n"));
                    for h in hs {
                        out.push_str(&format!("  H = {h}\n"));
                    }
                }
            }
            Ok(out)
        }
        Format::Json => {
            let generators: Vec<Value> = gens
                .iter()
                .map(|g| json!({"id": g.to_string(), "z2": g.hyperbolic_count() % 2, "path": g.points()}))
                .collect();
            let mut v = json!({
                "interval": [iv.lo.to_string(), iv.hi.to_string()],
                "p": a.p,
                "q": a.q,
                "generators": generators,
            });
            if let Some((h, closed)) = homology {
                v["homology"] = json!({
                    "rank": h.rank,
                    "representatives": h.representatives,
                    "closed_form": closed.map(|(e, hs)| json!({
                        "e": e.to_string(),
                        "h": hs.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
                    })),
                });
            }
            Ok(pretty(&v))
        }
    }
}

fn chi(a: ChiArgs) -> Result<String> {
    let c = read_complex(&a.complex)?;
    let grading: Grading = a.grading.parse()?;
    let p = graded_chi(&c, &grading)?;
    Ok(match a.format {
        Format::Table => format!("{p}\n"),
        Format::Json => pretty(&laurent_json(&p)),
    })
}

fn torsion(a: TorsionArgs) -> Result<String> {
    let (p, q) = (a.torus[0], a.torus[1]);
    let s = fox_torsion_torus(p, q, a.cutoff)?;
    let poly = s.to_polynomial();
    Ok(match a.format {
        Format::Table => format!("{poly} + O(t^{})\n", a.cutoff + 1),
        Format::Json => {
            pretty(&json!({"p": p, "q": q, "cutoff": a.cutoff, "torsion": laurent_json(&poly)}))
        }
    })
}

fn categorify(a: CategorifyArgs) -> Result<String> {
    let k = knot(a.knot)?;
    let (hat, meridian, cutoff) = match a.framing {
        None => (k.eck_hat_complex(), 1, 2 * k.genus()),
        Some(f) => {
            let spec = surgery_spec(a.knot, f)?;
            let r = surgery_eck_hat(&spec);
            (r.as_complex(), spec.n, spec.n + 2 * k.genus() - 1)
        }
    };
    let tau = fox_torsion_torus(2, a.knot, cutoff)?;
    let report = categorification_check(&hat, &tau, meridian)?;
    let kind = match &report.kind {
        MatchKind::Signed => "signed".to_string(),
        MatchKind::Absolute => "absolute".to_string(),
        MatchKind::Mismatch {
            degree,
            chi,
            expected,
        } => {
            format!("mismatch at degree {degree}: chi {chi}, expected {expected}")
        }
    };
    let text = match a.format {
        Format::Table => format!(
            "match: {kind}\nchi:      {}\nexpected: {}\n",
            report.chi, report.expected
        ),
        Format::Json => pretty(&json!({
            "matches": report.matches,
            "kind": kind,
            "chi": laurent_json(&report.chi),
            "expected": laurent_json(&report.expected),
        })),
    };
    if report.matches {
        Ok(text)
    } else {
        print!("{text}");
        bail!("graded Euler characteristic does not match the torsion")
    }
}

fn show(a: ShowArgs) -> Result<String> {
    let c = match (&a.from_json, a.knot) {
        (Some(path), _) => read_complex(path)?,
        (None, Some(m)) => {
            let k = knot(m)?;
            k.full_complex(a.imax.unwrap_or(u32::try_from(2 * k.genus())?))
        }
        (None, None) => bail!("either --knot or --from-json is required"),
    };
    Ok(match a.format {
        ShowFormat::Ascii => render_diagram(&c),
        ShowFormat::Json => c.to_json() + "\n",
    })
}

fn ss(a: SsArgs) -> Result<String> {
    let c = read_complex(&a.file)?;
    let grading: Grading = a.filtration.parse()?;
    let f = FiltrationSpec::from_grading(&c, &grading, a.direction)?;
    let aux: Option<Grading> = a.aux.as_deref().map(str::parse).transpose()?;
    let pages = spectral_sequence(&c, &f, a.pages, aux.as_ref())?;
    match a.format {
        Format::Table => {
            let direction = format!("{:?}", a.direction).to_lowercase();
            let mut out = format!("filtration {} ({direction})\n", f.name);
            for page in &pages {
                out.push_str(&format!("E^{}: total {}\n", page.r, page.total()));
                for (&(level, aux), &rank) in page.ranks.iter().filter(|(_, &r)| r > 0) {
                    out.push_str(&format!("  level {level}, aux {aux}: rank {rank}\n"));
                }
            }
            Ok(out)
        }
        Format::Json => {
            let pages: Vec<Value> = pages
                .iter()
                .map(|p| {
                    let ranks: Vec<Value> = p
                        .ranks
                        .iter()
                        .filter(|(_, &r)| r > 0)
                        .map(|(&(level, aux), &rank)| json!({"level": level, "aux": aux, "rank": rank}))
                        .collect();
                    json!({"r": p.r, "total": p.total(), "ranks": ranks})
                })
                .collect();
            Ok(pretty(&json!({"filtration": f.name, "pages": pages})))
        }
    }
}
