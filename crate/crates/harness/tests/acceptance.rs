//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs as a plain binary (`harness = false`) so the lines appear
//! in `cargo test` output.

use std::time::Instant;

use polarflip::channel::{trial_rng, transmit_with};
use polarflip::*;
use polarflip_harness::decoder::parse_list;
use polarflip_harness::*;
use rand::Rng;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, pass: bool, detail: String) {
        println!("acceptance {id}: {} - {detail}", if pass { "PASS" } else { "FAIL" });
        self.failures += usize::from(!pass);
    }
}

fn main() {
    let mut report = Report { failures: 0 };
    let started = Instant::now();
    worked_encoding(&mut report);
    worked_critical_sets(&mut report);
    first_error_accuracy(&mut report);
    bler_ordering(&mut report);
    complexity_trend(&mut report);
    property_suites(&mut report);
    println!("acceptance: {} failing line(s), {:.0?} elapsed", report.failures, started.elapsed());
    if report.failures > 0 {
        std::process::exit(1);
    }
}

fn sixteen_leaf_mask() -> Vec<bool> {
    let mut mask = vec![true; 16];
    for i in [6, 7, 8, 11, 12, 13, 14, 15, 16] {
        mask[i - 1] = false;
    }
    mask
}

fn worked_encoding(r: &mut Report) {
    let c = polar_transform(&[0, 0, 1, 0]);
    r.line("1 (N=4 encoding)", c == [1, 1, 0, 0], format!("u=(0,0,1,0) -> c={c:?}"));
}

fn worked_critical_sets(r: &mut Report) {
    let s = critical_set(&sixteen_leaf_mask()).unwrap();
    let s13 = modified_critical_set(&sixteen_leaf_mask(), 13).unwrap();
    r.line(
        "2 (16-leaf critical sets)",
        s.members() == [6, 7, 11, 13] && s13.members() == [14, 15],
        format!("S={:?}, S'(13)={:?}", s.members(), s13.members()),
    );
}

fn half_rate_1024() -> CodeSource {
    CodeSource::Construct { n: 10, k: 512, design_snr_db: None, crc: Some(CrcSpec::crc24()) }
}

fn first_error_accuracy(r: &mut Report) {
    let t = Instant::now();
    let mut cfg = SweepConfig::new(half_rate_1024(), vec![1.0, 1.5, 2.0], 100_000, vec![DecoderSpec::Sc]);
    cfg.seed = 20_000;
    let rows = run_accuracy(&cfg).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (row, target) in rows.iter().zip([110usize, 112, 117]) {
        let acc = row.accuracy.unwrap_or(0.0);
        pass &= acc >= 0.99 && row.s_size.abs_diff(target) <= 6;
        parts.push(format!(
            "{} dB: {:.2}% of {} failures, |S|={} (target {target}±6)",
            row.snr_db,
            100.0 * acc,
            row.errors,
            row.s_size
        ));
    }
    r.line("3 (first error in S, 1e5 trials)", pass, format!("{} [{:.0?}]", parts.join("; "), t.elapsed()));
}

fn errors_of(rows: &[ResultRow], snr: f64, decoder: &str) -> u64 {
    rows.iter().find(|x| x.snr_db == snr && x.decoder == decoder).map(|x| x.errors).expect("row present")
}

fn bler_ordering(r: &mut Report) {
    let t = Instant::now();
    let decoders = parse_list("sc,flip:1,flip:2,cascl:2,cascl:4,genie:1,genie:2").unwrap();
    let mut cfg = SweepConfig::new(half_rate_1024(), vec![2.0, 2.5], 20_000, decoders);
    cfg.seed = 40_000;
    cfg.max_block_errors = None;
    let rows = run_bler(&cfg).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut chain_ok = true;
    let mut chain = String::new();
    for snr in [2.0, 2.5] {
        let e = |d: &str| errors_of(&rows, snr, d) as f64;
        let ok = e("flip:1") <= 1.1 * e("cascl:2")
            && e("flip:2") <= 1.1 * e("cascl:4")
            && e("flip:1") >= 0.9 * e("genie:1")
            && e("flip:2") >= 0.9 * e("genie:2");
        pass &= ok;
        parts.push(format!(
            "{snr} dB errors/2e4: flip1 {} cascl2 {} genie1 {} | flip2 {} cascl4 {} genie2 {}",
            e("flip:1"),
            e("cascl:2"),
            e("genie:1"),
            e("flip:2"),
            e("cascl:4"),
            e("genie:2")
        ));
        if snr == 2.0 {
            chain_ok = e("sc") >= e("flip:1") && e("flip:1") >= e("flip:2") && e("flip:2") >= e("genie:2");
            chain = format!("sc {} >= flip1 {} >= flip2 {} >= genie2 {}", e("sc"), e("flip:1"), e("flip:2"), e("genie:2"));
        }
    }
    r.line("4 (BLER ordering vs CA-SCL and genie)", pass, format!("{} [{:.0?}]", parts.join("; "), t.elapsed()));
    r.line("4 (BLER chain at 2 dB)", chain_ok, chain);
}

fn complexity_trend(r: &mut Report) {
    let t = Instant::now();
    let mut points = Vec::new();
    for (snr, trials) in [(1.5, 2_000u64), (2.0, 5_000), (2.5, 20_000)] {
        let mut cfg = SweepConfig::new(half_rate_1024(), vec![snr], trials, vec![DecoderSpec::Flip(4)]);
        cfg.params = ParamsSource::Tuned;
        cfg.seed = 60_000;
        cfg.max_block_errors = None;
        points.push(run_bler(&cfg).unwrap().remove(0));
    }
    let c: Vec<f64> = points.iter().map(|p| p.mean_norm_complexity).collect();
    let pass = c[2] < 1.5 && c[0] > c[1] && c[1] > c[2];
    r.line(
        "5 (level-4 complexity trend)",
        pass,
        format!("mean normalized complexity 1.5/2.0/2.5 dB = {:.3}/{:.3}/{:.3} [{:.0?}]", c[0], c[1], c[2], t.elapsed()),
    );

    let t = Instant::now();
    let mut cfg = SweepConfig::new(half_rate_1024(), vec![2.0], 20_000, parse_list("flip:2,flip:4").unwrap());
    cfg.params = ParamsSource::Tuned;
    cfg.seed = 80_000;
    cfg.max_block_errors = None;
    let rows = run_bler(&cfg).unwrap();
    let (e2, e4) = (rows[0].errors, rows[1].errors);
    r.line("5 (level 4 vs level 2 at 2 dB)", e4 <= e2, format!("errors/2e4: flip4 {e4} flip2 {e2} [{:.0?}]", t.elapsed()));
}

fn rate_one(log_len: u32) -> CodeConfig {
    let len = 1usize << log_len;
    CodeConfig::new(log_len, (1..=len).collect(), 0.0, vec![1.0; len]).unwrap()
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

fn odd_weight(m: u64, p: f64) -> f64 {
    (0..=m).filter(|w| w % 2 == 1).map(|w| binom(m, w) * p.powi(w as i32) * (1.0 - p).powi((m - w) as i32)).sum()
}

/// Composite Simpson on the tanh form of the GA function.
fn phi_quadrature(x: f64) -> f64 {
    let s = (2.0 * x).sqrt();
    let (a, b) = (x - 14.0 * s, x + 14.0 * s);
    let steps = 20_000;
    let h = (b - a) / steps as f64;
    let f = |u: f64| (u / 2.0).tanh() * (-(u - x).powi(2) / (4.0 * x)).exp();
    let mut acc = f(a) + f(b);
    for k in 1..steps {
        acc += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    1.0 - acc * h / 3.0 / (4.0 * std::f64::consts::PI * x).sqrt()
}

fn property_suites(r: &mut Report) {
    let mut results: Vec<(&str, bool)> = Vec::new();

    // Erasure channel: first bit recovered <=> whole rate-1 block recovered.
    let mut ok = true;
    for log_len in 1..=4u32 {
        let code = rate_one(log_len);
        let len = code.len();
        let mut rng = trial_rng(7);
        for pattern in 0u32..(1 << len) {
            let u: Vec<u8> = (0..len).map(|_| rng.random_range(0..2)).collect();
            let c = encode(&code, &u).unwrap();
            let llrs: Vec<f64> = c.iter().enumerate().map(|(k, &b)| if pattern >> k & 1 == 1 { 0.0 } else if b == 0 { 30.0 } else { -30.0 }).collect();
            let t = sc_decode(&llrs, &code).unwrap();
            let good = |i: usize| t.decision_llrs[i] != 0.0 && t.u_hat[i] == u[i];
            ok &= good(0) == (0..len).all(good);
        }
    }
    results.push(("erasure first-bit equivalence M<=16", ok));

    // Block/first-bit gap bound and odd-parity identity.
    let mut ok = true;
    for m in [2u64, 4, 8] {
        for p in [0.01f64, 0.05, 0.1] {
            let eps = p * 1.01;
            let gap: f64 = (1..=m / 2).map(|i| binom(m, 2 * i) * p.powi(2 * i as i32) * (1.0 - p).powi((m - 2 * i) as i32)).sum();
            let bound: f64 = (1..=m / 2).map(|i| binom(m, 2 * i) * eps.powi(2 * i as i32)).sum();
            ok &= gap < bound;
        }
        let code = rate_one(m.trailing_zeros());
        let p = 0.08f64;
        let mag = ((1.0 - p) / p).ln();
        let mut rng = trial_rng(m);
        let trials = 20_000;
        let mut wrong = 0;
        for _ in 0..trials {
            let u: Vec<u8> = (0..m as usize).map(|_| rng.random_range(0..2)).collect();
            let c = encode(&code, &u).unwrap();
            let llrs: Vec<f64> = c.iter().map(|&b| if (b == 1) ^ rng.random_bool(p) { -mag } else { mag }).collect();
            wrong += usize::from(sc_decode(&llrs, &code).unwrap().u_hat[0] != u[0]);
        }
        let want = odd_weight(m, p);
        let se = (want * (1.0 - want) / trials as f64).sqrt();
        ok &= (wrong as f64 / trials as f64 - want).abs() < 3.0 * se;
    }
    results.push(("subblock bound and odd-parity identity M=2,4,8", ok));

    let ok = (0..=40).all(|k| {
        let x = 0.1 + k as f64 * (39.9 / 40.0);
        let y = phi_quadrature(x);
        let back = phi_inv(y).unwrap();
        ((phi(x).unwrap() - y) / y).abs() < 1e-6 && ((back - x) / x).abs() < 1e-6
    });
    results.push(("phi/phi_inv vs quadrature on [0.1, 40]", ok));

    let code = construct_code(3, 4, 3.0).unwrap();
    let chan = ChannelParams::<f64>::from_ebn0(3.0, code.rate()).unwrap();
    let book: Vec<Vec<u8>> = (0..16u8).map(|m| encode(&code, &code.place(&[m & 1, m >> 1 & 1, m >> 2 & 1, m >> 3 & 1]).unwrap()).unwrap()).collect();
    let ll = |c: &[u8], l: &[f64]| -> f64 { c.iter().zip(l).map(|(&b, &x)| if b == 0 { x / 2.0 } else { -x / 2.0 }).sum() };
    let ok = (0..500u64).all(|t| {
        let mut rng = trial_rng(t);
        let bits: Vec<u8> = (0..4).map(|_| rng.random_range(0..2)).collect();
        let c = encode(&code, &code.place(&bits).unwrap()).unwrap();
        let l = channel_llrs(&transmit_with(&modulate::<f64>(&c), &chan, &mut rng), &chan);
        let sc = encode(&code, &sc_decode(&l, &code).unwrap().u_hat).unwrap();
        ll(&sc, &l) <= book.iter().map(|c| ll(c, &l)).fold(f64::NEG_INFINITY, f64::max) + 1e-12
    });
    results.push(("SC vs ML likelihood on N=8 (500 trials)", ok));

    let mut rng = trial_rng(99);
    let ok = (0..1000).all(|_| {
        let payload: Vec<u8> = (0..488).map(|_| rng.random_range(0..2)).collect();
        let mut frame = crc_attach(&payload);
        let k = rng.random_range(0..frame.len());
        frame[k] ^= 1;
        !crc_check(&frame).unwrap()
    });
    results.push(("CRC-24 single-bit errors (1000 cases)", ok));

    let code = construct_code(8, 128, 1.0).unwrap();
    let mut rng = trial_rng(3);
    let ok = (0..200).all(|_| {
        let llrs: Vec<f64> = (0..256).map(|_| rng.random_range(-3.0..5.0)).collect();
        let info = code.info_set();
        let i = info[rng.random_range(1..info.len())];
        let before: Vec<usize> = info.iter().copied().filter(|&j| j < i && rng.random_bool(0.05)).collect();
        let mut a = before.clone();
        a.push(i);
        let mut b = before;
        b.extend(info.iter().copied().filter(|&j| j > i).take(1));
        let ta = sc_decode_flip(&llrs, &code, &FlipSet::new(a).unwrap()).unwrap();
        let tb = sc_decode_flip(&llrs, &code, &FlipSet::new(b).unwrap()).unwrap();
        ta.u_hat[..i - 1] == tb.u_hat[..i - 1] && ta.decision_llrs[i - 1] == tb.decision_llrs[i - 1]
    });
    results.push(("flip-set prefix determinism", ok));

    let chan = ChannelParams::<f64>::from_ebn0(0.5, code.rate()).unwrap();
    let ok = (0..200u64).all(|t| {
        let mut rng = trial_rng(t);
        let bits: Vec<u8> = (0..128).map(|_| rng.random_range(0..2)).collect();
        let u = code.place(&bits).unwrap();
        let l = channel_llrs(&transmit_with(&modulate::<f64>(&encode(&code, &u).unwrap()), &chan, &mut rng), &chan);
        let s: Vec<bool> = (0..5).map(|k| genie_sc_decode(&l, &code, &u, k).unwrap().u_hat == u).collect();
        s.windows(2).all(|w| !w[0] || w[1])
    });
    results.push(("genie monotonicity in k", ok));

    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SweepConfig::new(
        CodeSource::Construct { n: 8, k: 128, design_snr_db: Some(2.0), crc: Some(CrcSpec::crc24()) },
        vec![1.0, 2.0],
        500,
        parse_list("sc,flip:2,cascl:2,genie:1").unwrap(),
    );
    cfg.seed = 5;
    let files: Vec<Vec<u8>> = (0..2)
        .map(|k| {
            let path = dir.path().join(format!("run{k}.csv"));
            emit_results(&run_bler(&cfg).unwrap(), Format::Csv, &path).unwrap();
            std::fs::read(path).unwrap()
        })
        .collect();
    results.push(("byte-identical result files for equal seeds", files[0] == files[1]));

    let failed: Vec<&str> = results.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    let detail = if failed.is_empty() {
        format!("{} suites: {}", results.len(), results.iter().map(|(n, _)| *n).collect::<Vec<_>>().join("; "))
    } else {
        format!("failing: {}", failed.join("; "))
    };
    r.line("6 (property suites)", failed.is_empty(), detail);
}
