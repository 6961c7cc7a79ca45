//! Monte Carlo sweeps.
//!
//! Trial `t` of every point draws its payload and its noise from one
//! ChaCha8 stream seeded with `seed + t`, so all decoders in a run (and all
//! runs sharing a seed) see the same blocks. Trials are evaluated in
//! parallel batches and folded in trial order, which keeps early stopping
//! and every reported number independent of the thread count.

use polarflip::channel::{trial_rng, transmit_with};
use polarflip::gauss::channel_mu_from_ebn0;
use polarflip::{
    channel_llrs, critical_set, encode, genie_first_error, genie_sc_decode, modulate,
    split_channel_means, ChannelParams, CodeConfig, CrcSpec, CriticalSet, FlipSet, GaProfile,
    ListDecoder, ProgressiveDecoder, Real, ScDecoder,
};
use rand::Rng;
use rayon::prelude::*;

use crate::codefile::CodeFile;
use crate::decoder::DecoderSpec;
use crate::output::ResultRow;
use crate::params::ParamsSource;
use crate::{HarnessError, Result};

const WILSON_Z: f64 = 1.959_964;

#[derive(Debug, Clone, PartialEq)]
pub enum CodeSource {
    File(CodeFile),
    /// GA construction; with no design SNR the code is rebuilt at every
    /// operating point.
    Construct {
        n: u32,
        k: usize,
        design_snr_db: Option<f64>,
        crc: Option<CrcSpec>,
    },
}

impl CodeSource {
    pub fn code_at(&self, ebn0_db: f64) -> Result<CodeConfig> {
        match self {
            Self::File(f) => f.to_config(),
            Self::Construct { n, k, design_snr_db, crc } => {
                CodeFile::construct(*n, *k, design_snr_db.unwrap_or(ebn0_db), crc.clone())?.to_config()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    F32,
    #[default]
    F64,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub code: CodeSource,
    pub snr_points_db: Vec<f64>,
    pub trials: u64,
    pub decoders: Vec<DecoderSpec>,
    pub params: ParamsSource,
    pub seed: u64,
    /// Stop a decoder at a point once it has this many block errors.
    pub max_block_errors: Option<u64>,
    /// Replace the channel output by its noise-free LLRs.
    pub noiseless: bool,
    pub precision: Precision,
    /// Trials per parallel batch; affects speed only.
    pub batch_size: usize,
}

impl SweepConfig {
    pub fn new(code: CodeSource, snr_points_db: Vec<f64>, trials: u64, decoders: Vec<DecoderSpec>) -> Self {
        Self {
            code,
            snr_points_db,
            trials,
            decoders,
            params: ParamsSource::Disabled,
            seed: 1,
            max_block_errors: Some(200),
            noiseless: false,
            precision: Precision::F64,
            batch_size: 512,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.snr_points_db.is_empty() || self.snr_points_db.iter().any(|s| !s.is_finite()) {
            return Err(HarnessError::Config("need at least one finite SNR point".into()));
        }
        if self.decoders.is_empty() {
            return Err(HarnessError::Config("no decoder selected".into()));
        }
        if self.max_block_errors == Some(0) {
            return Err(HarnessError::Config("max block errors must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub seed: u64,
    pub decoder: DecoderSpec,
    pub crc_ok: bool,
    pub block_error: bool,
    /// First wrong unfrozen bit of the decoder output (1-based).
    pub first_error_index: Option<usize>,
    /// Whether that bit lies in the critical set; SC only.
    pub first_error_in_s: Option<bool>,
    pub visits: u64,
    pub nodes_explored: usize,
}

/// 95% Wilson score interval for `errors` out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Everything fixed for one SNR point.
struct Point<T> {
    ebn0_db: f64,
    code: CodeConfig,
    profile: GaProfile<T>,
    channel: ChannelParams<T>,
    set: CriticalSet,
    seed: u64,
    noiseless: bool,
}

impl<T: Real> Point<T> {
    fn new(sweep: &SweepConfig, ebn0_db: f64) -> Result<Self> {
        let code = sweep.code.code_at(ebn0_db)?;
        if let Some(d) = sweep.decoders.iter().find(|d| d.needs_crc()) {
            if code.crc().is_none() {
                return Err(HarnessError::Config(format!("decoder {d} needs a code with a CRC")));
            }
        }
        let mu = channel_mu_from_ebn0(ebn0_db, code.rate());
        Ok(Self {
            ebn0_db,
            profile: split_channel_means(code.log_len(), T::of(mu))?,
            channel: ChannelParams::from_ebn0(ebn0_db, code.rate())?,
            set: critical_set(code.frozen_mask())?,
            code,
            seed: sweep.seed,
            noiseless: sweep.noiseless,
        })
    }

    /// Transmitted message and channel LLRs of trial `t`.
    fn block(&self, t: u64) -> Result<(Vec<u8>, Vec<T>)> {
        let mut rng = trial_rng(self.seed.wrapping_add(t));
        let payload: Vec<u8> = (0..self.code.payload_len()).map(|_| rng.random_range(0..2u8)).collect();
        let u = self.code.message(&payload)?;
        let x = modulate::<T>(&encode(&self.code, &u)?);
        let y = if self.noiseless { x } else { transmit_with(&x, &self.channel, &mut rng) };
        Ok((u, channel_llrs(&y, &self.channel)))
    }
}

/// Per-worker decoder state.
struct Workspace<'a, T> {
    point: &'a Point<T>,
    sc: ScDecoder<T>,
    flips: Vec<(usize, ProgressiveDecoder<'a, T>)>,
    lists: Vec<(usize, ListDecoder<T>)>,
}

impl<'a, T: Real> Workspace<'a, T> {
    fn new(point: &'a Point<T>, decoders: &[DecoderSpec], params: &ParamsSource) -> Result<Self> {
        let mut flips = Vec::new();
        let mut lists = Vec::new();
        for d in decoders {
            match *d {
                DecoderSpec::Flip(level) if !flips.iter().any(|(l, _)| *l == level) => {
                    let mut dec = ProgressiveDecoder::new(&point.code, &point.profile, level, params.prune(point.ebn0_db))?;
                    if let Some(b) = params.node_budget() {
                        dec = dec.with_node_budget(b);
                    }
                    flips.push((level, dec));
                }
                DecoderSpec::CaScl(l) if !lists.iter().any(|(s, _)| *s == l) => {
                    lists.push((l, ListDecoder::new(point.code.log_len(), l)?));
                }
                _ => {}
            }
        }
        Ok(Self { point, sc: ScDecoder::new(point.code.log_len()), flips, lists })
    }

    fn run(&mut self, t: u64, decoders: &[DecoderSpec]) -> Result<Vec<TrialRecord>> {
        let point = self.point;
        let code = &point.code;
        let (u, llrs) = point.block(t)?;
        let mut out = Vec::with_capacity(decoders.len());
        for &d in decoders {
            let (u_hat, crc_ok, visits, nodes, in_s) = match d {
                DecoderSpec::Sc => {
                    let tr = self.sc.decode(&llrs, code, &FlipSet::empty())?;
                    let in_s = genie_first_error(&tr, &u).map(|i| point.set.contains(i));
                    let ok = code.crc_passes(&tr.u_hat);
                    (tr.u_hat, ok, tr.visits, 1, in_s)
                }
                DecoderSpec::Flip(level) => {
                    let dec = &mut self.flips.iter_mut().find(|(l, _)| *l == level).expect("built").1;
                    let r = dec.decode(&llrs)?;
                    (r.u_hat, r.crc_ok, r.total_visits, r.nodes_explored, None)
                }
                DecoderSpec::CaScl(size) => {
                    let dec = &mut self.lists.iter_mut().find(|(l, _)| *l == size).expect("built").1;
                    let r = dec.decode(&llrs, code)?;
                    (r.u_hat, r.crc_ok, r.visits, 1, None)
                }
                DecoderSpec::Genie(k) => {
                    let r = genie_sc_decode(&llrs, code, &u, k)?;
                    (r.u_hat, r.crc_ok, r.visits, 1, None)
                }
            };
            let first = u_hat.iter().zip(&u).position(|(a, b)| a != b).map(|k| k + 1);
            out.push(TrialRecord {
                trial_index: t,
                seed: point.seed.wrapping_add(t),
                decoder: d,
                crc_ok,
                block_error: first.is_some(),
                first_error_index: first,
                first_error_in_s: in_s,
                visits,
                nodes_explored: nodes,
            });
        }
        Ok(out)
    }
}

#[derive(Default, Clone)]
struct Tally {
    trials: u64,
    errors: u64,
    visits: u128,
    in_s: u64,
    stopped: bool,
}

fn run_point<T: Real>(sweep: &SweepConfig, ebn0_db: f64, early_stop: bool) -> Result<Vec<ResultRow>> {
    let point = Point::<T>::new(sweep, ebn0_db)?;
    let decoders = &sweep.decoders;
    // surfaces decoder configuration errors before any work is scheduled
    Workspace::new(&point, decoders, &sweep.params)?;
    let mut tallies = vec![Tally::default(); decoders.len()];
    let batch = sweep.batch_size.max(1) as u64;
    let mut start = 0;
    while start < sweep.trials && tallies.iter().any(|t| !t.stopped) {
        let end = (start + batch).min(sweep.trials);
        let active: Vec<usize> = (0..decoders.len()).filter(|&k| !tallies[k].stopped).collect();
        let specs: Vec<DecoderSpec> = active.iter().map(|&k| decoders[k]).collect();
        let records: Vec<Vec<TrialRecord>> = (start..end)
            .into_par_iter()
            .map_init(
                || Workspace::new(&point, &specs, &sweep.params),
                |ws, t| match ws {
                    Ok(ws) => ws.run(t, &specs),
                    Err(e) => Err(HarnessError::Config(e.to_string())),
                },
            )
            .collect::<Result<_>>()?;
        for trial in &records {
            for (rec, &k) in trial.iter().zip(&active) {
                let tally = &mut tallies[k];
                if tally.stopped {
                    continue;
                }
                tally.trials += 1;
                tally.errors += rec.block_error as u64;
                tally.visits += rec.visits as u128;
                tally.in_s += (rec.first_error_in_s == Some(true)) as u64;
                if early_stop && sweep.max_block_errors.is_some_and(|m| tally.errors >= m) {
                    tally.stopped = true;
                }
            }
        }
        start = end;
    }

    let len = point.code.len() as f64;
    let sc_cost = len * len.log2();
    Ok(decoders
        .iter()
        .zip(&tallies)
        .map(|(d, t)| {
            let (ci_lo, ci_hi) = wilson_interval(t.errors, t.trials);
            ResultRow {
                snr_db: ebn0_db,
                decoder: d.to_string(),
                trials: t.trials,
                errors: t.errors,
                bler: t.errors as f64 / t.trials as f64,
                ci_lo,
                ci_hi,
                mean_norm_complexity: t.visits as f64 / t.trials as f64 / sc_cost,
                accuracy: (*d == DecoderSpec::Sc && t.errors > 0).then(|| t.in_s as f64 / t.errors as f64),
                s_size: point.set.len(),
            }
        })
        .collect())
}

fn run(sweep: &SweepConfig, early_stop: bool) -> Result<Vec<ResultRow>> {
    sweep.validate()?;
    let mut rows = Vec::new();
    for &snr in &sweep.snr_points_db {
        rows.extend(match sweep.precision {
            Precision::F64 => run_point::<f64>(sweep, snr, early_stop)?,
            Precision::F32 => run_point::<f32>(sweep, snr, early_stop)?,
        });
    }
    Ok(rows)
}

/// BLER, Wilson interval and mean complexity (visits over `N log2 N`) per
/// SNR point and decoder.
pub fn run_bler(sweep: &SweepConfig) -> Result<Vec<ResultRow>> {
    run(sweep, true)
}

/// SC first-error-in-S accuracy over all trials (no early stop). Rows carry
/// the failing count in `errors`; `accuracy` is `None` without failures.
pub fn run_accuracy(sweep: &SweepConfig) -> Result<Vec<ResultRow>> {
    if sweep.decoders != [DecoderSpec::Sc] {
        return Err(HarnessError::Config("the accuracy experiment runs the sc decoder only".into()));
    }
    run(sweep, false)
}

/// Per-trial records of `trials` at one point, for inspection and pairing checks.
pub fn trial_records(sweep: &SweepConfig, ebn0_db: f64, trials: std::ops::Range<u64>) -> Result<Vec<TrialRecord>> {
    sweep.validate()?;
    let point = Point::<f64>::new(sweep, ebn0_db)?;
    let mut ws = Workspace::new(&point, &sweep.decoders, &sweep.params)?;
    let mut out = Vec::new();
    for t in trials {
        out.extend(ws.run(t, &sweep.decoders)?);
    }
    Ok(out)
}
