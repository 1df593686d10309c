//! `tperiods`: kernel coefficients, coefficient matrices, bounds and verification reports.

mod cache;
mod emit;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tperiods::bounds::{
    asym_bracket, asym_product, min_weight, BoundName, BoundParams, BoundReport, MinWeight, Threshold,
    DEFAULT_WEIGHT_CAP,
};
use tperiods::chars::{CharFilter, DirichletCharacter, Parity};
use tperiods::cycmat::{build_conjecture_matrix, build_matrix, MatrixKind};
use tperiods::exact::Cyclotomic;
use tperiods::kernels::{coefficients, normalize, CoeffTable, KernelKind, KernelSpec};
use tperiods::qforms::{self, EisensteinKind, QSeries};
use tperiods::verify::{self, IdentitySet, ScanOptions};

use cache::CoeffCache;
use emit::{cyc_cell, report_output, Format, Output, Table};

#[derive(Parser, Debug)]
#[command(name = "tperiods", version, about = "Exact kernel forms and verification reports for twisted periods")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// JSON-lines coefficient cache.
    #[arg(long, global = true, env = "TPERIODS_CACHE")]
    cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dirichlet characters mod D.
    Chars(CharsArgs),
    /// q-expansions of Eisenstein series and level-one forms.
    Qexp(QexpArgs),
    /// Coefficients of a product or bracket kernel.
    Kernel(KernelArgs),
    /// Coefficient matrices and their exact determinants.
    Matrix(MatrixArgs),
    /// Explicit error-term bounds.
    Bounds(BoundsArgs),
    /// Verification tasks.
    Verify {
        #[command(subcommand)]
        task: VerifyTask,
    },
    /// Non-singularity scan of a conjecture matrix.
    Scan(ScanArgs),
    /// Non-vanishing of the first coefficient at l = K/2.
    Maeda(MaedaArgs),
}

#[derive(Args, Debug)]
struct CharsArgs {
    #[arg(long)]
    modulus: u64,
    #[arg(long)]
    primitive: bool,
    /// Include the values at 0..D-1.
    #[arg(long)]
    values: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SeriesKind {
    Twisted,
    Double,
    Level1,
    E4,
    E6,
    Delta,
    Basis,
}

#[derive(Args, Debug)]
struct QexpArgs {
    #[arg(long, value_enum)]
    kind: SeriesKind,
    #[arg(long)]
    weight: Option<u32>,
    #[arg(long, default_value_t = 1)]
    modulus: u64,
    #[arg(long = "char", default_value_t = 0)]
    label: u64,
    /// Modulus of the second character of a double series.
    #[arg(long, default_value_t = 1)]
    modulus2: u64,
    #[arg(long = "char2", default_value_t = 0)]
    label2: u64,
    #[arg(long, default_value_t = 10)]
    terms: usize,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long)]
    kind: KernelKind,
    #[arg(long)]
    weight: u32,
    #[arg(long)]
    ell: u32,
    #[arg(long, default_value_t = 1)]
    modulus: u64,
    #[arg(long = "char", default_value_t = 0)]
    label: u64,
    #[arg(long, default_value_t = 10)]
    terms: usize,
    #[arg(long)]
    normalized: bool,
    /// Attach a level-one cusp form certificate.
    #[arg(long)]
    certificate: bool,
}

#[derive(Args, Debug)]
struct MatrixArgs {
    #[arg(long)]
    which: MatrixKind,
    #[arg(long)]
    weight: u32,
    #[arg(long, default_value_t = 1)]
    modulus: u64,
    /// Character labels mod D.
    #[arg(long, value_delimiter = ',', required = true)]
    chars: Vec<u64>,
    #[arg(long, value_delimiter = ',', required = true)]
    ells: Vec<u32>,
    /// Column count for C1..C4.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Predicate {
    AsymProduct,
    AsymBracket,
    Maeda,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("what").required(true).args(["name", "min_weight", "aggregate"]))]
struct BoundsArgs {
    #[arg(long)]
    name: Option<BoundName>,
    /// Smallest weight certified by a predicate.
    #[arg(long, value_enum)]
    min_weight: Option<Predicate>,
    /// Ratio bound for the normalized coefficient at 2^j.
    #[arg(long, value_parser = ["product", "bracket"])]
    aggregate: Option<String>,
    #[arg(long)]
    weight: Option<u32>,
    #[arg(long)]
    ell: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 1)]
    modulus: u64,
    #[arg(long)]
    j: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    ells: Vec<u32>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_WEIGHT_CAP)]
    cap: u32,
}

#[derive(Subcommand, Debug)]
enum VerifyTask {
    /// Convolution identities for an odd prime modulus.
    Identities {
        #[arg(long)]
        modulus: u64,
        #[arg(long, default_value = "all")]
        set: IdentitySet,
    },
    /// All kernel coefficients vanish when there are no cusp forms.
    ZeroSpace {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        modulus: u64,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
    },
    /// Level-one cusp form certificates for every valid kernel.
    Cuspidality {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        modulus: u64,
    },
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    matrix: MatrixKind,
    #[arg(long, default_value_t = 24)]
    max_weight: u32,
    #[arg(long, default_value_t = 15)]
    max_modulus: u64,
    /// Extend to weight and modulus 40.
    #[arg(long)]
    full: bool,
    /// Enumerate every selection when dim S_K is at most this.
    #[arg(long, default_value_t = 4)]
    exhaustive_dim: usize,
    /// Selections per (K, D, group) cell.
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Args, Debug)]
struct MaedaArgs {
    /// Every odd square-free D up to this bound.
    #[arg(long, conflicts_with = "moduli")]
    max_modulus: Option<u64>,
    #[arg(long, default_value_t = 60)]
    max_weight: u32,
    /// Explicit moduli, each with K in [10D+2, 10D+2+span].
    #[arg(long, value_delimiter = ',')]
    moduli: Vec<u64>,
    #[arg(long, default_value_t = 20)]
    span: u32,
}

fn character(modulus: u64, label: u64) -> Result<DirichletCharacter> {
    Ok(DirichletCharacter::from_label(modulus, label)?)
}

fn parity_str(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

fn cmd_chars(a: &CharsArgs) -> Result<Output> {
    let filter = if a.primitive { CharFilter::Primitive } else { CharFilter::All };
    let chars = DirichletCharacter::enumerate(a.modulus, filter)?;
    let mut table = Table::new(&["label", "name", "order", "parity", "conductor", "values"]);
    let mut docs = Vec::new();
    for chi in &chars {
        let values: Option<Vec<Cyclotomic>> = a
            .values
            .then(|| (0..a.modulus as i64).map(|x| chi.evaluate(x)).collect());
        let mut doc = json!({
            "label": chi.label(),
            "name": chi.to_string(),
            "order": chi.order(),
            "parity": parity_str(chi.parity()),
            "conductor": chi.conductor(),
        });
        if let Some(v) = &values {
            doc["values"] = serde_json::to_value(v)?;
        }
        docs.push(doc);
        table.push(vec![
            chi.label().to_string(),
            chi.to_string(),
            chi.order().to_string(),
            parity_str(chi.parity()).into(),
            chi.conductor().to_string(),
            values.map(|v| v.iter().map(cyc_cell).collect::<Vec<_>>().join(" ")).unwrap_or_default(),
        ]);
    }
    Ok(Output::ok(Value::Array(docs), table))
}

fn series_output(kind: &str, weight: Option<u32>, series: &[(String, QSeries)]) -> Result<Output> {
    let mut headers = vec!["n".to_string()];
    headers.extend(series.iter().map(|(name, _)| name.clone()));
    let terms = series.iter().map(|(_, s)| s.precision()).max().unwrap_or(0);
    let mut table = Table { headers, rows: Vec::new() };
    for n in 0..terms {
        let mut row = vec![n.to_string()];
        row.extend(series.iter().map(|(_, s)| cyc_cell(s.coeff(n))));
        table.push(row);
    }
    let docs: Vec<Value> = series
        .iter()
        .map(|(name, s)| json!({"name": name, "coeffs": s.coeffs}))
        .collect();
    Ok(Output::ok(
        json!({"kind": kind, "weight": weight, "terms": terms, "series": docs}),
        table,
    ))
}

fn cmd_qexp(a: &QexpArgs) -> Result<Output> {
    let weight = || a.weight.ok_or_else(|| anyhow!("--weight is required for this kind"));
    let terms = a.terms;
    let one = |name: &str, s: QSeries| vec![(name.to_string(), s)];
    let (kind, series) = match a.kind {
        SeriesKind::E4 => ("e4", one("e4", qforms::e4(terms))),
        SeriesKind::E6 => ("e6", one("e6", qforms::e6(terms))),
        SeriesKind::Delta => ("delta", one("delta", qforms::delta(terms))),
        SeriesKind::Level1 => {
            let k = weight()?;
            ("level1", one("level1", qforms::eisenstein_series(&EisensteinKind::Level1 { k }, terms)?))
        }
        SeriesKind::Twisted => {
            let chi = character(a.modulus, a.label)?;
            let kind = EisensteinKind::Twisted { k: weight()?, chi };
            ("twisted", one("twisted", qforms::eisenstein_series(&kind, terms)?))
        }
        SeriesKind::Double => {
            let kind = EisensteinKind::Double {
                k: weight()?,
                chi1: character(a.modulus, a.label)?,
                chi2: character(a.modulus2, a.label2)?,
            };
            ("double", one("double", qforms::eisenstein_series(&kind, terms)?))
        }
        SeriesKind::Basis => {
            let k = weight()?;
            let toolkit = qforms::level1_toolkit_with_precision(k, terms);
            let series = toolkit
                .basis
                .iter()
                .enumerate()
                .map(|(i, s)| (format!("f{}", i + 1), s.truncate(terms)))
                .collect();
            ("basis", series)
        }
    };
    series_output(kind, a.weight, &series)
}

fn kernel_table(spec: &KernelSpec, terms: usize, cache: Option<&mut CoeffCache>) -> Result<CoeffTable> {
    if let Some(cache) = cache {
        if let Some(values) = cache.lookup(spec, terms) {
            return Ok(CoeffTable {
                spec: spec.clone(),
                values,
                normalized: None,
            });
        }
        let table = coefficients(spec, terms);
        cache.store(spec, &table.values)?;
        return Ok(table);
    }
    Ok(coefficients(spec, terms))
}

fn cmd_kernel(a: &KernelArgs, cache: Option<&mut CoeffCache>) -> Result<Output> {
    let spec = KernelSpec::new(a.kind, a.weight, a.ell, character(a.modulus, a.label)?)?;
    let mut table = kernel_table(&spec, a.terms, cache)?;
    if a.normalized {
        table = normalize(&table)?;
    }
    let mut csv = Table::new(&["n", "value", "normalized"]);
    for n in 1..=table.len() {
        csv.push(vec![
            n.to_string(),
            cyc_cell(table.coeff(n)),
            table.normalized_coeff(n).map(cyc_cell).unwrap_or_default(),
        ]);
    }
    let mut doc = json!({
        "kind": spec.kind(),
        "weight": spec.weight(),
        "ell": spec.ell(),
        "modulus": spec.chi().modulus(),
        "char": spec.chi().label(),
        "terms": a.terms,
        "values": table.values,
    });
    if let Some(norm) = &table.normalized {
        doc["normalized"] = serde_json::to_value(norm)?;
    }
    if a.certificate {
        doc["certificate"] = serde_json::to_value(tperiods::kernels::cuspidality_certificate(&spec))?;
    }
    Ok(Output::ok(doc, csv))
}

fn cmd_matrix(a: &MatrixArgs) -> Result<Output> {
    let chars = a
        .chars
        .iter()
        .map(|&l| character(a.modulus, l))
        .collect::<Result<Vec<_>>>()?;
    let m = if a.which.is_conjecture() {
        let n = a.n.ok_or_else(|| anyhow!("--n is required for {:?}", a.which))?;
        build_conjecture_matrix(a.which, a.weight, &chars, &a.ells, n)?
    } else {
        if a.n.is_some() {
            bail!("--n applies only to C1..C4");
        }
        build_matrix(a.which, a.weight, &chars, &a.ells)?
    };
    let det = if m.rows() == m.cols() { Some(m.det_exact()?) } else { None };
    let mut table = Table::new(&["row", "col", "value"]);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            table.push(vec![(i + 1).to_string(), (j + 1).to_string(), cyc_cell(m.get(i, j))]);
        }
    }
    if let Some(d) = &det {
        table.push(vec!["det".into(), String::new(), cyc_cell(d)]);
    }
    let rows: Vec<Vec<&Cyclotomic>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect();
    let doc = json!({
        "provenance": m.provenance(),
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": rows,
        "det": det,
        "singular": det.as_ref().map(Cyclotomic::is_zero),
        "rank": m.rank(),
    });
    Ok(Output::ok(doc, table))
}

fn cmd_bounds(a: &BoundsArgs) -> Result<Output> {
    if let Some(name) = a.name {
        let params = BoundParams {
            weight: a.weight,
            ell: a.ell,
            k: a.k,
            n: a.n,
            modulus: a.modulus,
            j: a.j,
            ells: a.ells.clone(),
            m: a.m,
        };
        let report = BoundReport::eval(name, params)?;
        let mut table = Table::new(&["name", "value", "certified", "params"]);
        table.push(vec![
            name.to_string(),
            report.value.to_string(),
            report.certified.to_string(),
            serde_json::to_string(&report.params)?,
        ]);
        return Ok(Output::ok(serde_json::to_value(&report)?, table));
    }
    if let Some(kind) = &a.aggregate {
        let need = |v: Option<u32>, f: &str| v.ok_or_else(|| anyhow!("--{f} is required"));
        let (w, l, j) = (need(a.weight, "weight")?, need(a.ell, "ell")?, a.j.unwrap_or(0));
        let agg = if kind == "product" {
            asym_product(w, l, j, a.modulus)?
        } else {
            asym_bracket(w, l, j, a.modulus)?
        };
        let mut table = Table::new(&["side", "name", "value"]);
        for (side, list) in [("numerator", &agg.numerator), ("denominator", &agg.denominator)] {
            for r in list {
                table.push(vec![side.into(), r.name.to_string(), r.value.to_string()]);
            }
        }
        table.push(vec!["total".into(), String::new(), agg.value.to_string()]);
        return Ok(Output::ok(serde_json::to_value(&agg)?, table));
    }
    let predicate = match a.min_weight.expect("argument group") {
        Predicate::AsymProduct => Threshold::AsymProduct {
            j: a.j.unwrap_or(0),
            modulus: a.modulus,
            tol: a.tol,
        },
        Predicate::AsymBracket => Threshold::AsymBracket {
            j: a.j.unwrap_or(0),
            modulus: a.modulus,
            tol: a.tol,
        },
        Predicate::Maeda => Threshold::Maeda { modulus: a.modulus },
    };
    let found = min_weight(predicate, a.cap)?;
    let mut table = Table::new(&["result", "weight", "value"]);
    match &found {
        MinWeight::Found { weight, value, .. } => {
            table.push(vec!["found".into(), weight.to_string(), value.to_string()]);
        }
        MinWeight::NotFound { cap } => table.push(vec!["not_found".into(), cap.to_string(), String::new()]),
    }
    Ok(Output::ok(json!({"predicate": predicate, "min_weight": found}), table))
}

fn cmd_verify(task: &VerifyTask) -> Result<Output> {
    let report = match *task {
        VerifyTask::Identities { modulus, set } => verify::verify_identities(modulus, set)?,
        VerifyTask::ZeroSpace { weight, modulus, n_max } => verify::verify_zero_space(weight, modulus, n_max)?,
        VerifyTask::Cuspidality { weight, modulus } => verify::verify_cuspidality(weight, modulus)?,
    };
    report_output(&report)
}

fn cmd_scan(a: &ScanArgs, jobs: usize) -> Result<Output> {
    let (k_max, d_max) = if a.full { (40, 40) } else { (a.max_weight, a.max_modulus) };
    let opts = ScanOptions {
        jobs,
        exhaustive_dim: a.exhaustive_dim,
        cap_per_cell: a.cap,
    };
    report_output(&verify::scan_conjectures(a.matrix, k_max, d_max, opts)?)
}

fn cmd_maeda(a: &MaedaArgs) -> Result<Output> {
    let report = if a.moduli.is_empty() {
        verify::maeda_scan(a.max_modulus.unwrap_or(7), a.max_weight)?
    } else {
        verify::maeda_scan_window(&a.moduli, a.span)?
    };
    report_output(&report)
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let mut cache = match &cli.cache {
        Some(path) => Some(CoeffCache::open(path)?),
        None => None,
    };
    match &cli.command {
        Command::Chars(a) => cmd_chars(a),
        Command::Qexp(a) => cmd_qexp(a),
        Command::Kernel(a) => cmd_kernel(a, cache.as_mut()),
        Command::Matrix(a) => cmd_matrix(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Verify { task } => cmd_verify(task),
        Command::Scan(a) => cmd_scan(a, cli.jobs),
        Command::Maeda(a) => cmd_maeda(a),
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    let pipe = Some(std::io::ErrorKind::BrokenPipe);
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>().map(|e| e.kind()) == pipe
            || c.downcast_ref::<serde_json::Error>().and_then(|e| e.io_error_kind()) == pipe
    })
}

fn run(argv: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("warning: {e}");
        }
    }
    match dispatch(&cli) {
        Ok(out) => {
            let stdout = std::io::stdout();
            if let Err(e) = out.write(cli.format, &mut stdout.lock()) {
                if !is_broken_pipe(&e) {
                    eprintln!("error: {e:#}");
                    return 2;
                }
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()) as u8)
}
