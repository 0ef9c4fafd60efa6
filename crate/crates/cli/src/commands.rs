use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use curvehash::constrained::{plan_anchored, plan_anchored_dtw, plan_speed, plan_speed_dtw};
use curvehash::grid::{plan_basic, plan_basic_dtw, plan_constant, SchemeParams};
use curvehash::index::{plan_index, NNIndex};
use curvehash::partition::plan_tradeoff;
use curvehash::signature::plan_continuous;
use curvehash::workload::{generate_planted, PlantedConfig};
use curvehash::{constrained_distance, discrete_frechet, Curve, DistanceKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::{KindArg, MetricArg, SchemeArg, SchemeArgs};
use crate::dataset::{read_dataset, write_dataset};
use crate::error::{CliError, Result};

/// Formats `x` with `digits` significant digits, dropping trailing zeros.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim(mantissa.to_string()))
    } else {
        trim(format!("{:.*}", (digits as i32 - 1 - exp).max(0) as usize, x))
    }
}

fn distance_kind(kind: KindArg, w: Option<usize>) -> Result<DistanceKind> {
    let width = || w.ok_or_else(|| CliError::Input("--w is required for constrained distances".into()));
    Ok(match kind {
        KindArg::Frechet => DistanceKind::Frechet,
        KindArg::Dtw => DistanceKind::Dtw,
        KindArg::Anchored => DistanceKind::AnchoredFrechet(width()?),
        KindArg::AnchoredDtw => DistanceKind::AnchoredDtw(width()?),
        KindArg::Speed => DistanceKind::SpeedFrechet(width()?),
        KindArg::SpeedDtw => DistanceKind::SpeedDtw(width()?),
        KindArg::Continuous1d => DistanceKind::ContinuousFrechet1d,
    })
}

pub fn dist(out: &mut dyn Write, file: &Path, id1: &str, id2: &str, kind: KindArg, w: Option<usize>) -> Result<()> {
    let curves = read_dataset(file)?;
    let find =
        |id: &str| curves.iter().find(|c| c.id() == id).ok_or_else(|| CliError::Input(format!("unknown id {id:?}")));
    let (p, q) = (find(id1)?, find(id2)?);
    let d = constrained_distance(p, q, distance_kind(kind, w)?)?;
    writeln!(out, "{}", format_significant(d, 12))?;
    Ok(())
}

/// Plans a scheme for curves of dimension `dim` and length at most
/// `max_len`.
pub fn plan_scheme(args: &SchemeArgs, dim: usize, max_len: usize) -> Result<SchemeParams> {
    let m = args.max_len.unwrap_or(max_len).max(1);
    let unsupported = || CliError::Input(format!("the {:?} scheme has no DTW variant", args.scheme).to_lowercase());
    let dtw = args.metric == MetricArg::Dtw;
    let params = match args.scheme {
        SchemeArg::Basic if dtw => plan_basic_dtw(args.r, dim, m)?,
        SchemeArg::Basic => plan_basic(args.r, dim, m)?,
        SchemeArg::Anchored if dtw => plan_anchored_dtw(args.r, dim, args.w, args.ell, m, m)?,
        SchemeArg::Anchored => plan_anchored(args.r, dim, args.w, args.ell)?.with_max_len(m),
        SchemeArg::Speed if dtw => plan_speed_dtw(args.r, dim, args.w, args.ell, m, m)?,
        SchemeArg::Speed => plan_speed(args.r, dim, args.w, args.ell)?.with_max_len(m),
        _ if dtw => return Err(unsupported()),
        SchemeArg::Constant => plan_constant(args.r, dim)?.with_max_len(m),
        SchemeArg::Tradeoff => plan_tradeoff(args.r, dim, m, args.k)?,
        SchemeArg::Continuous1d => {
            if dim != 1 {
                return Err(CliError::Input(format!("continuous1d needs 1D curves, got dimension {dim}")));
            }
            plan_continuous(args.r, m)?
        }
    };
    Ok(params)
}

pub fn build(
    out: &mut dyn Write,
    file: &Path,
    scheme: &SchemeArgs,
    dim: usize,
    seed: u64,
    out_path: &Path,
) -> Result<()> {
    let curves = read_dataset(file)?;
    let dim = curves.first().map_or(dim, Curve::dim);
    let max_len = curves.iter().map(Curve::len).max().unwrap_or(1);
    let params = plan_scheme(scheme, dim, max_len)?;
    let config = plan_index(&params, curves.len() as u64, seed)?;
    let index = NNIndex::build(curves, config)?;
    index.save(out_path)?;
    writeln!(
        out,
        "delta={} c={} L={} reps={} k={}",
        format_significant(params.delta, 12),
        format_significant(params.c, 12),
        config.tables,
        config.reps,
        config.k
    )?;
    Ok(())
}

pub fn query(out: &mut dyn Write, index_path: &Path, queries: &Path) -> Result<()> {
    let index = NNIndex::load(index_path)?;
    let queries = read_dataset(queries)?;
    for (ordinal, q) in queries.iter().enumerate() {
        let answer = index.query_with_nonce(q, ordinal as u64)?;
        writeln!(out, "{}\t{}", q.id(), answer.map_or("none", Curve::id))?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

#[allow(clippy::too_many_arguments)]
pub fn gen(
    out: &mut dyn Write,
    n: usize,
    m: usize,
    d: usize,
    planted_r: f64,
    far_cr: f64,
    spread: Option<f64>,
    seed: u64,
    out_path: Option<&Path>,
    query_out: Option<&Path>,
) -> Result<()> {
    let mut config = PlantedConfig::new(n, m, d, planted_r, far_cr);
    if let Some(s) = spread {
        config.spread = s;
    }
    let inst = generate_planted(&config, &mut ChaCha8Rng::seed_from_u64(seed))?;
    match out_path {
        Some(path) => {
            let mut w = create(path)?;
            write_dataset(&mut w, &inst.dataset)?;
            w.flush()?;
        }
        None => write_dataset(&mut *out, &inst.dataset)?,
    }
    if let Some(path) = query_out {
        let mut w = create(path)?;
        write_dataset(&mut w, [&inst.query])?;
        w.flush()?;
    }
    eprintln!("planted {} ({} far curves rejected)", inst.planted_id(), inst.rejections);
    Ok(())
}

pub fn bench(out: &mut dyn Write, n: usize, m: usize, d: usize, r: f64, queries: u64, seed: u64) -> Result<()> {
    let params = plan_basic(r, d, m)?;
    let cr = params.far_radius();
    let start = Instant::now();
    let inst = generate_planted(&PlantedConfig::new(n, m, d, r, cr), &mut ChaCha8Rng::seed_from_u64(seed))?;
    let generate = start.elapsed();
    let config = plan_index(&params, n as u64, seed)?;
    let start = Instant::now();
    let index = NNIndex::build(inst.dataset.clone(), config)?;
    let build_time = start.elapsed();
    let (mut found, mut probes, mut wrong) = (0u64, 0u64, 0u64);
    let start = Instant::now();
    for nonce in 0..queries {
        let outcome = index.query_detailed(&inst.query, nonce)?;
        probes += outcome.probes;
        if let Some(i) = outcome.matched {
            if i == inst.planted {
                found += 1;
            } else if discrete_frechet(&index.curves()[i], &inst.query)? > cr {
                wrong += 1;
            }
        }
    }
    let query_time = start.elapsed();
    let per_query = query_time.as_secs_f64() * 1e6 / queries.max(1) as f64;
    writeln!(out, "n={n} m={m} d={d} r={r} cr={}", format_significant(cr, 6))?;
    writeln!(out, "tables={} reps={} entries={}", config.tables, config.reps, index.entries())?;
    writeln!(out, "generate_s={:.4}", generate.as_secs_f64())?;
    writeln!(out, "build_s={:.4}", build_time.as_secs_f64())?;
    writeln!(out, "query_us={per_query:.2} probes_per_query={:.2}", probes as f64 / queries.max(1) as f64)?;
    writeln!(out, "recall={found}/{queries} beyond_cr={wrong}")?;
    Ok(())
}
