use std::collections::HashMap;
use std::fs;
use std::path::Path;

use nervecov::acceptance::{run_all, AcceptanceConfig};
use nervecov::coeffs::{CoefficientTable, Invariant};
use nervecov::coverage::{
    azuma_report, chi_distribution, chi_rel_distribution, coverage_probability_closed, coverage_probability_relative,
    mc_estimate, worker_rng, CenterSampler, ChiDistribution, CoverageReport, DistributionVector, Form,
    GoodCoverPolicy, McConfig, McEstimate, PairDistributionVector, PIPELINE_TOL,
};
use nervecov::metric_graph::MetricGraph;
use nervecov::moments::IntegerRange;
use nervecov::nerve::BallCoverRealization;
use nervecov::simplicial::{Subcomplex, SubcomplexFamily};
use nervecov::stevens::{stevens_coverage, stevens_gap_vector, three_arc_p_vector, ArcModel};
use nervecov::{Error, Result};

use crate::output::{csv_error, num, Report};
use crate::{
    BoundArgs, ChiDistArgs, Cli, Command, CoverageArgs, EnumerateArgs, FormArg, GraphArgs, McArgs, Mode,
    SamplingArgs, SelftestArgs, StevensArgs,
};

fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

/// Positive integer count, also written as `1e6` or `1000000.0`.
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return if v > 0 { Ok(v) } else { Err("count must be positive".into()) };
    }
    let x: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if x >= 1.0 && x.fract() == 0.0 && x < 1e18 {
        Ok(x as u64)
    } else {
        Err(format!("not a positive integer: {s}"))
    }
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(param(format!("{name} must be positive, got {x}")))
    }
}

fn check_n(n: usize) -> Result<usize> {
    if (1..=6).contains(&n) {
        Ok(n)
    } else {
        Err(param(format!("n must lie in 1..=6, got {n}")))
    }
}

pub fn load_graph(args: &GraphArgs) -> Result<MetricGraph> {
    let path = Path::new(&args.graph);
    let graph = if path.exists() {
        MetricGraph::parse(&fs::read_to_string(path)?)?
    } else {
        match args.graph.as_str() {
            "circle" => MetricGraph::circle(1.0)?,
            "interval" => MetricGraph::interval(1.0)?,
            "theta" => MetricGraph::theta(1.0, 1.0, 1.0)?,
            other => return Err(param(format!("no graph file or built-in named {other:?}"))),
        }
    };
    match &args.boundary_override {
        Some(ids) => graph.with_boundary(ids),
        None => Ok(graph),
    }
}

/// Circumference when the graph is a single loop.
fn circle_length(g: &MetricGraph) -> Option<f64> {
    match g.edges() {
        [e] if e.is_loop() => Some(e.length),
        _ => None,
    }
}

fn mc_config(s: &SamplingArgs) -> McConfig {
    let mut cfg = McConfig::new(s.trials, s.seed);
    cfg.workers = s.workers;
    cfg.policy = if s.keep { GoodCoverPolicy::Keep } else { GoodCoverPolicy::Reject };
    cfg.allow_large_eps = s.allow_large_eps;
    cfg.rips_cross_check = s.rips_check;
    if let Some(w) = &s.edge_weights {
        cfg.sampler = CenterSampler::EdgeMixture(w.clone());
    }
    cfg
}

fn echo_sampling(r: &mut Report, s: &SamplingArgs) {
    r.config("trials", s.trials)
        .config("policy", if s.keep { "keep" } else { "reject" })
        .config("allow_large_eps", s.allow_large_eps)
        .config("rips_check", s.rips_check);
    if let Some(w) = &s.edge_weights {
        r.config("edge_weights", w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"));
    }
    r.run(s.seed, s.workers);
}

fn note_estimate(r: &mut Report, e: &McEstimate) {
    r.note("good_samples", e.good_samples)
        .note("excluded", e.excluded)
        .note("rejections", e.rejections)
        .note("rips_mismatches", e.rips_mismatches);
}

fn parse_range(text: &str) -> Result<IntegerRange> {
    let (lo, hi) = text.split_once(':').ok_or_else(|| param(format!("range must be lo:hi, got {text:?}")))?;
    let p = |t: &str| t.trim().parse::<i64>().map_err(|_| param(format!("bad range bound {t:?}")));
    IntegerRange::new(p(lo)?, p(hi)?)
}

/// Inclusive grid `start:stop:step`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, s] = parts.as_slice() else {
        return Err(param(format!("grid must be start:stop:step, got {text:?}")));
    };
    let p = |t: &str| t.trim().parse::<f64>().map_err(|_| param(format!("bad grid value {t:?}")));
    let (a, b, s) = (p(a)?, p(b)?, p(s)?);
    if !(s > 0.0 && b >= a) {
        return Err(param("grid needs start <= stop and a positive step"));
    }
    let steps = ((b - a) / s + 1e-9).floor() as usize;
    Ok((0..=steps).map(|i| ((a + i as f64 * s) * 1e12).round() / 1e12).collect())
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    Ok(csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(fs::File::open(path)?))
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, what: &str) -> Result<T> {
    let line = rec.position().map_or(0, |p| p.line() as usize);
    rec.get(i)
        .ok_or_else(|| Error::Parse { line, message: format!("missing {what}") })?
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("bad {what} {:?}", rec.get(i).unwrap_or("")) })
}

fn parse_complex(rec: &csv::StringRecord, i: usize, n: usize) -> Result<Subcomplex> {
    let line = rec.position().map_or(0, |p| p.line() as usize);
    Subcomplex::parse(n, rec.get(i).unwrap_or(""))
        .map_err(|e| Error::Parse { line, message: e.to_string() })
}

/// Law file with columns `subcomplex,value`; unlisted complexes get 0.
pub fn read_law(path: &Path, n: usize, form: FormArg) -> Result<DistributionVector> {
    let family = SubcomplexFamily::shared(n)?;
    let mut values = vec![0.0; family.len()];
    for rec in reader(path)?.records() {
        let rec = rec.map_err(csv_error)?;
        let s = parse_complex(&rec, 0, n)?;
        values[family.index_or_err(&s)?] = parse_field(&rec, 1, "value")?;
    }
    let form = match form {
        FormArg::Atomic => Form::Atomic,
        FormArg::Cumulative => Form::Cumulative,
    };
    let d = DistributionVector::new(family, form, values)?;
    d.validate(PIPELINE_TOL)?;
    Ok(d)
}

/// Atomic pair law with columns `subcomplex,boundary,probability`.
pub fn read_pairs(path: &Path, n: usize) -> Result<PairDistributionVector> {
    let family = SubcomplexFamily::shared(n)?;
    let mut values = HashMap::new();
    for rec in reader(path)?.records() {
        let rec = rec.map_err(csv_error)?;
        let s = family.index_or_err(&parse_complex(&rec, 0, n)?)?;
        let r = family.index_or_err(&parse_complex(&rec, 1, n)?)?;
        *values.entry((s, r)).or_insert(0.0) += parse_field::<f64>(&rec, 2, "probability")?;
    }
    PairDistributionVector::new(family, values)
}

pub fn run(cli: &Cli) -> Result<u8> {
    let out = cli.output.as_deref();
    let wall = !cli.no_wall_time;
    match &cli.command {
        Command::Enumerate(a) => enumerate(a)?.finish(out, wall).map(|_| 0),
        Command::ChiDist(a) => chi_dist(a)?.finish(out, wall).map(|_| 0),
        Command::Coverage(a) => coverage(a, wall)?.finish(out, wall).map(|_| 0),
        Command::Stevens(a) => stevens(a)?.finish(out, wall).map(|_| 0),
        Command::Mc(a) => mc(a)?.finish(out, wall).map(|_| 0),
        Command::Bound(a) => bound(a)?.finish(out, wall).map(|_| 0),
        Command::Selftest(a) => {
            let (report, failed) = selftest(a)?;
            report.finish(out, wall)?;
            Ok(if failed { 2 } else { 0 })
        }
    }
}

fn enumerate(a: &EnumerateArgs) -> Result<Report> {
    let n = check_n(a.n)?;
    let family = SubcomplexFamily::shared(n)?;
    let mut r = Report::new("enumerate");
    r.config("n", n);
    match &a.coefficients {
        Some(name) => {
            let invariant = match name.as_str() {
                "chi" => Invariant::Chi,
                f if f.starts_with('f') => Invariant::FaceCount(
                    f[1..].parse().map_err(|_| param(format!("unknown invariant {name:?}")))?,
                ),
                _ => return Err(param(format!("unknown invariant {name:?}; use chi or f<d>"))),
            };
            r.config("coefficients", invariant).config("k", a.k);
            let table = CoefficientTable::shared(invariant, n, a.k)?;
            r.row(["subcomplex", "k", "coefficient"])?;
            for (s, c) in family.all().iter().zip(table.entries()) {
                if *c != 0 {
                    r.row([s.to_string(), a.k.to_string(), c.to_string()])?;
                }
            }
        }
        None => {
            r.note("count", family.len());
            r.row(["index", "subcomplex", "faces", "euler_char"])?;
            for (i, s) in family.all().iter().enumerate() {
                r.row([i.to_string(), s.to_string(), s.len().to_string(), s.euler_char().to_string()])?;
            }
        }
    }
    Ok(r)
}

fn write_chi_rows(r: &mut Report, d: &ChiDistribution) -> Result<()> {
    r.note("discrepancy", num(d.discrepancy));
    r.note("moments", d.moments.iter().map(|m| num(*m)).collect::<Vec<_>>().join(" "));
    r.row(["value", "probability_direct", "probability_moments"])?;
    for (i, v) in d.range.nodes().enumerate() {
        r.row([v.to_string(), num(d.direct[i]), num(d.from_moments[i])])?;
    }
    Ok(())
}

fn chi_dist(a: &ChiDistArgs) -> Result<Report> {
    let n = check_n(a.n)?;
    let mut r = Report::new("chi-dist");
    r.config("n", n);
    let (law, default_lo) = match (&a.input, &a.graph) {
        (Some(path), _) => {
            r.config("input", path.display()).config("form", format!("{:?}", a.form).to_lowercase());
            let d = read_law(path, n, a.form)?;
            let atomic = d.to_atomic(PIPELINE_TOL)?;
            let lo = d
                .family()
                .all()
                .iter()
                .zip(atomic.values())
                .filter(|(_, v)| **v > PIPELINE_TOL)
                .map(|(s, _)| s.euler_char())
                .min()
                .unwrap_or(0);
            (d, lo)
        }
        (None, Some(name)) => {
            let g = load_graph(&GraphArgs { graph: name.clone(), boundary_override: None })?;
            let eps = positive("eps", a.eps.ok_or_else(|| param("--eps is required with --graph"))?)?;
            r.config("graph", name).config("eps", eps);
            echo_sampling(&mut r, &a.sampling);
            let e = mc_estimate(&g, n, eps, &mc_config(&a.sampling))?;
            note_estimate(&mut r, &e);
            (e.atomic, g.euler_char())
        }
        (None, None) => return Err(param("give --input or --graph")),
    };
    let range = match &a.range {
        Some(t) => parse_range(t)?,
        None => IntegerRange::new(default_lo.min(n as i64), n as i64)?,
    };
    r.config("range", format!("{}:{}", range.lo(), range.hi()));
    let d = chi_distribution(&law, range, PIPELINE_TOL)?;
    write_chi_rows(&mut r, &d)?;
    Ok(r)
}

fn report_row(r: &mut Report, rep: &CoverageReport) -> Result<()> {
    r.row([
        rep.method.to_string(),
        num(rep.probability),
        rep.stderr.map(num).unwrap_or_default(),
        rep.samples.to_string(),
        rep.rejections.to_string(),
    ])
}

/// Exact law of the nerve when one is available: a supplied file, or the
/// three-arc values on a circle with n = 3.
fn exact_law(a: &CoverageArgs, g: &MetricGraph) -> Result<Option<PairDistributionVector>> {
    if let Some(p) = &a.pairs {
        let pairs = read_pairs(p, a.n)?;
        let family = pairs.family().clone();
        // the boundary component is void exactly when the graph has no boundary
        let closed = g.boundary().is_empty();
        if let Some(((_, r), _)) = pairs.sorted().into_iter().find(|((_, r), v)| *v != 0.0 && family.get(*r).is_void() != closed) {
            return Err(param(format!(
                "boundary component {} does not fit a graph {} boundary",
                family.get(r),
                if closed { "without" } else { "with" }
            )));
        }
        return Ok(Some(pairs));
    }
    if let Some(p) = &a.p_vector {
        if !g.boundary().is_empty() {
            return Err(param("the graph has a boundary; pass the pair law with --pairs"));
        }
        return PairDistributionVector::from_absolute(&read_law(p, a.n, a.form)?, PIPELINE_TOL).map(Some);
    }
    match circle_length(g) {
        Some(c) if a.n == 3 && 2.0 * a.eps / c < 0.5 => {
            PairDistributionVector::from_absolute(&three_arc_p_vector(2.0 * a.eps / c)?, PIPELINE_TOL).map(Some)
        }
        _ => Ok(None),
    }
}

fn pipeline(pairs: &PairDistributionVector, g: &MetricGraph) -> Result<(CoverageReport, ChiDistribution)> {
    let range = IntegerRange::new(g.chi_rel(), pairs.family().n() as i64)?;
    let rep = coverage_probability_relative(pairs, g, PIPELINE_TOL)?;
    Ok((rep, chi_rel_distribution(pairs, range, PIPELINE_TOL)?))
}

fn coverage(a: &CoverageArgs, wall: bool) -> Result<Report> {
    let n = check_n(a.n)?;
    let eps = positive("eps", a.eps)?;
    let g = load_graph(&a.graph)?;
    let mut r = Report::new("coverage");
    r.config("graph", &a.graph.graph).config("n", n).config("eps", eps);
    r.config("mode", format!("{:?}", a.mode).to_lowercase());
    echo_sampling(&mut r, &a.sampling);
    let mut rows = Vec::new();
    let mut dists = Vec::new();
    if matches!(a.mode, Mode::ExactFromP | Mode::All) {
        match exact_law(a, &g)? {
            Some(pairs) => {
                let (rep, d) = pipeline(&pairs, &g)?;
                if g.boundary().is_empty() {
                    // the closed pipeline must coincide with the relative one
                    let closed = coverage_probability_closed(&pairs.marginal()?, &g, PIPELINE_TOL)?;
                    if closed.probability != rep.probability {
                        return Err(Error::Consistency {
                            what: "closed and relative pipelines without boundary".into(),
                            discrepancy: (closed.probability - rep.probability).abs(),
                            tolerance: 0.0,
                        });
                    }
                }
                rows.push(rep);
                dists.push(("exact_pipeline", d));
            }
            None if a.mode == Mode::ExactFromP => {
                return Err(param("no exact law: pass --p-vector or --pairs (built-in only for circles with n = 3)"))
            }
            None => {}
        }
        if let Some(c) = circle_length(&g) {
            let m = ArcModel::new(n, (2.0 * eps / c).min(1.0 - f64::EPSILON))?;
            rows.push(CoverageReport {
                method: nervecov::coverage::Method::Stevens,
                probability: stevens_coverage(&m),
                stderr: None,
                range: None,
                direct_probability: None,
                discrepancy: None,
                samples: 0,
                rejections: 0,
            });
        }
    }
    if matches!(a.mode, Mode::Mc | Mode::Oracle | Mode::All) {
        let e = mc_estimate(&g, n, eps, &mc_config(&a.sampling))?;
        note_estimate(&mut r, &e);
        if a.mode != Mode::Oracle {
            let (rep, d) = pipeline(&e.pairs, &g)?;
            rows.push(rep.with_samples(e.good_samples, e.rejections));
            dists.push(("mc_pipeline", d));
        }
        if a.mode != Mode::Mc {
            rows.push(e.oracle.clone());
        }
    }
    r.row(["method", "probability", "stderr", "samples", "rejections"])?;
    for rep in &rows {
        report_row(&mut r, rep)?;
    }
    if let Some(path) = &a.distribution_output {
        let mut dr = Report::new("coverage-distribution");
        dr.config("graph", &a.graph.graph).config("n", n).config("eps", eps);
        echo_sampling(&mut dr, &a.sampling);
        dr.row(["method", "value", "probability"])?;
        for (method, d) in &dists {
            for (i, v) in d.range.nodes().enumerate() {
                dr.row([method.to_string(), v.to_string(), num(d.from_moments[i])])?;
            }
        }
        dr.finish(Some(path), wall)?;
    }
    Ok(r)
}

fn stevens(a: &StevensArgs) -> Result<Report> {
    let grid = match (&a.alpha_grid, a.alpha) {
        (Some(g), _) => parse_grid(g)?,
        (None, Some(x)) => vec![x],
        (None, None) => return Err(param("give --alpha or --alpha-grid")),
    };
    let mut r = Report::new("stevens");
    r.config("n", a.n);
    r.config("alpha", a.alpha_grid.clone().unwrap_or_else(|| grid[0].to_string()));
    let mut header = vec!["alpha".to_string(), "n".into(), "coverage".into()];
    header.extend((0..=a.n).map(|j| format!("gap_{j}")));
    r.row(&header)?;
    for alpha in grid {
        let m = ArcModel::new(a.n, alpha)?;
        let mut row = vec![num(alpha), a.n.to_string(), num(stevens_coverage(&m))];
        row.extend(stevens_gap_vector(&m).into_iter().map(num));
        r.row(&row)?;
    }
    Ok(r)
}

fn mc(a: &McArgs) -> Result<Report> {
    let n = check_n(a.n)?;
    let eps = positive("eps", a.eps)?;
    let g = load_graph(&a.graph)?;
    let cfg = mc_config(&a.sampling);
    let mut r = Report::new("mc");
    r.config("graph", &a.graph.graph).config("n", n).config("eps", eps);
    echo_sampling(&mut r, &a.sampling);
    let e = mc_estimate(&g, n, eps, &cfg)?;
    note_estimate(&mut r, &e);
    r.note("oracle_probability", num(e.oracle.probability));
    r.note("oracle_stderr", e.oracle.stderr.map(num).unwrap_or_default());
    r.row(["subcomplex", "boundary", "probability"])?;
    let family = e.pairs.family().clone();
    for ((s, b), p) in e.pairs.sorted() {
        r.row([family.get(s).to_string(), family.get(b).to_string(), num(p)])?;
    }
    if let Some(path) = &a.dump_realization {
        // same stream as the first sample of worker 0
        let mut rng = worker_rng(cfg.seed, 0);
        let centers = (0..n).map(|_| cfg.sampler.sample(&g, &mut rng)).collect::<Result<Vec<_>>>()?;
        let real = BallCoverRealization::new(&g, eps, centers)?;
        let mut buf = Vec::new();
        real.write_csv(&mut buf)?;
        fs::write(path, buf)?;
    }
    Ok(r)
}

fn bound(a: &BoundArgs) -> Result<Report> {
    let n = check_n(a.n)?;
    let g = load_graph(&a.graph)?;
    let mut r = Report::new("bound");
    r.config("graph", &a.graph.graph).config("n", n);
    let mean = match (a.mean, a.eps) {
        (Some(m), _) => {
            r.config("mean", m);
            m
        }
        (None, Some(eps)) => {
            let eps = positive("eps", eps)?;
            r.config("eps", eps);
            echo_sampling(&mut r, &a.sampling);
            let e = mc_estimate(&g, n, eps, &mc_config(&a.sampling))?;
            note_estimate(&mut r, &e);
            pipeline(&e.pairs, &g)?.1.mean()
        }
        (None, None) => return Err(param("give --mean or --eps")),
    };
    let rep = azuma_report(mean, n, &g)?;
    r.row(["mean", "shifted_mean", "bound", "bound_unshifted"])?;
    r.row([
        num(rep.mean),
        num(rep.shifted_mean),
        num(rep.bound),
        rep.bound_unshifted.map(num).unwrap_or_default(),
    ])?;
    Ok(r)
}

fn selftest(a: &SelftestArgs) -> Result<(Report, bool)> {
    if a.workers == 0 {
        return Err(param("workers must be positive"));
    }
    let cfg = AcceptanceConfig { seed: a.seed, workers: a.workers };
    let mut r = Report::new("selftest");
    r.run(a.seed, a.workers);
    let results = run_all(&cfg);
    r.row(["criterion", "name", "status", "seconds", "detail"])?;
    for c in &results {
        eprintln!("{c}");
        r.row([
            c.id.to_string(),
            c.name.to_string(),
            if c.passed { "PASS" } else { "FAIL" }.to_string(),
            format!("{:.3}", c.elapsed.as_secs_f64()),
            c.detail.clone(),
        ])?;
    }
    Ok((r, results.iter().any(|c| !c.passed)))
}
