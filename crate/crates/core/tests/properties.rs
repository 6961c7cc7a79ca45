use polarflip::channel::trial_rng;
use polarflip::*;
use proptest::prelude::*;
use rand::Rng;

fn rate_one(log_len: u32) -> CodeConfig {
    let len = 1usize << log_len;
    CodeConfig::new(log_len, (1..=len).collect(), 0.0, vec![1.0; len]).unwrap()
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Probability that an odd number of `m` independent bits flip.
fn odd_weight(m: u64, p: f64) -> f64 {
    (0..=m).filter(|w| w % 2 == 1).map(|w| binom(m, w) * p.powi(w as i32) * (1.0 - p).powi((m - w) as i32)).sum()
}

fn even_weight_nonzero(m: u64, p: f64) -> f64 {
    (1..=m / 2).map(|i| binom(m, 2 * i) * p.powi(2 * i as i32) * (1.0 - p).powi((m - 2 * i) as i32)).sum()
}

#[test]
fn rate_one_block_on_erasures_recovers_all_iff_first_bit() {
    // Erased symbols carry LLR 0; a bit counts as recovered when its
    // decision LLR is nonzero and its decision is right.
    for log_len in 1..=4u32 {
        let code = rate_one(log_len);
        let len = code.len();
        let mut rng = trial_rng(u64::from(log_len));
        for pattern in 0u32..(1 << len) {
            let u: Vec<u8> = (0..len).map(|_| rng.random_range(0..2)).collect();
            let c = encode(&code, &u).unwrap();
            let llrs: Vec<f64> = c
                .iter()
                .enumerate()
                .map(|(k, &b)| if pattern >> k & 1 == 1 { 0.0 } else if b == 0 { 30.0 } else { -30.0 })
                .collect();
            let t = sc_decode(&llrs, &code).unwrap();
            let ok = |i: usize| t.decision_llrs[i] != 0.0 && t.u_hat[i] == u[i];
            assert_eq!(ok(0), (0..len).all(ok), "M={len} pattern={pattern:b}");
        }
    }
}

#[test]
fn block_error_gap_is_bounded() {
    for m in [2u64, 4, 8] {
        for p in [0.01, 0.05, 0.1] {
            let eps: f64 = p * 1.01;
            let gap = even_weight_nonzero(m, p);
            let bound: f64 = (1..=m / 2).map(|i| binom(m, 2 * i) * eps.powi(2 * i as i32)).sum();
            assert!(gap < bound, "M={m} p={p}");
            // P_s - P_u1 is exactly the nonzero even-weight mass
            let p_block = 1.0 - (1.0 - p).powi(m as i32);
            assert!((p_block - odd_weight(m, p) - gap).abs() < 1e-15);
        }
    }
}

#[test]
fn first_bit_fails_exactly_on_odd_error_count() {
    let trials = 20_000usize;
    for (log_len, p) in [(1u32, 0.1f64), (2, 0.1), (3, 0.05)] {
        let code = rate_one(log_len);
        let m = code.len();
        let mag = ((1.0 - p) / p).ln();
        let mut rng = trial_rng(40 + u64::from(log_len));
        let mut wrong = 0usize;
        for _ in 0..trials {
            let u: Vec<u8> = (0..m).map(|_| rng.random_range(0..2)).collect();
            let c = encode(&code, &u).unwrap();
            let mut errors = 0;
            let llrs: Vec<f64> = c
                .iter()
                .map(|&b| {
                    let flip = rng.random_bool(p);
                    errors += flip as usize;
                    if (b == 1) ^ flip { -mag } else { mag }
                })
                .collect();
            let first_wrong = sc_decode(&llrs, &code).unwrap().u_hat[0] != u[0];
            assert_eq!(first_wrong, errors % 2 == 1);
            wrong += first_wrong as usize;
        }
        let want = odd_weight(m as u64, p);
        let se = (want * (1.0 - want) / trials as f64).sqrt();
        let got = wrong as f64 / trials as f64;
        assert!((got - want).abs() < 3.0 * se, "M={m} got={got} want={want}");
    }
}

#[test]
fn sc_never_beats_maximum_likelihood() {
    let code = construct_code(3, 4, 3.0).unwrap();
    let p = ChannelParams::<f64>::from_ebn0(3.0, code.rate()).unwrap();
    let codebook: Vec<Vec<u8>> = (0..16u8)
        .map(|m| encode(&code, &code.place(&[m & 1, m >> 1 & 1, m >> 2 & 1, m >> 3 & 1]).unwrap()).unwrap())
        .collect();
    let loglik = |c: &[u8], l: &[f64]| -> f64 { c.iter().zip(l).map(|(&b, &x)| if b == 0 { x / 2.0 } else { -x / 2.0 }).sum() };
    let mut differs = 0;
    for t in 0..500u64 {
        let mut rng = trial_rng(t);
        let bits: Vec<u8> = (0..4).map(|_| rng.random_range(0..2)).collect();
        let c = encode(&code, &code.place(&bits).unwrap()).unwrap();
        let l = channel_llrs(&channel::transmit_with(&modulate::<f64>(&c), &p, &mut rng), &p);
        let sc_c = encode(&code, &sc_decode(&l, &code).unwrap().u_hat).unwrap();
        let ml = codebook.iter().map(|c| loglik(c, &l)).fold(f64::NEG_INFINITY, f64::max);
        let sc = loglik(&sc_c, &l);
        assert!(sc <= ml + 1e-12);
        differs += (sc < ml - 1e-12) as usize;
    }
    assert!(differs < 500);
}

#[test]
fn crafted_sixteen_bit_flip_pair() {
    let mut info = vec![6, 7, 8, 11, 12, 13, 14, 15, 16];
    info.sort_unstable();
    let code = CodeConfig::new(4, info, 0.0, vec![1.0; 16]).unwrap();
    let mut rng = trial_rng(5);
    let llrs: Vec<f64> = (0..16).map(|_| rng.random_range(-3.0..3.0)).collect();
    let t = sc_decode_flip(&llrs, &code, &FlipSet::new(vec![13, 15]).unwrap()).unwrap();
    let only13 = sc_decode_flip(&llrs, &code, &FlipSet::new(vec![13]).unwrap()).unwrap();
    for i in 1..=16 {
        let sign = (t.decision_llrs[i - 1] < 0.0) as u8;
        let want = if code.is_frozen(i) { 0 } else if i == 13 || i == 15 { sign ^ 1 } else { sign };
        assert_eq!(t.u_hat[i - 1], want, "u_{i}");
    }
    assert_eq!(t.u_hat[..14], only13.u_hat[..14]);
    assert_eq!(t.decision_llrs[14], only13.decision_llrs[14]);
}

#[test]
fn genie_success_is_monotone_in_corrections() {
    let code = construct_code(7, 64, 1.0).unwrap();
    let p = ChannelParams::<f64>::from_ebn0(0.5, code.rate()).unwrap();
    for t in 0..150u64 {
        let mut rng = trial_rng(t);
        let bits: Vec<u8> = (0..64).map(|_| rng.random_range(0..2)).collect();
        let u = code.place(&bits).unwrap();
        let c = encode(&code, &u).unwrap();
        let l = channel_llrs(&channel::transmit_with(&modulate::<f64>(&c), &p, &mut rng), &p);
        let ok: Vec<bool> = (0..6).map(|k| genie_sc_decode(&l, &code, &u, k).unwrap().u_hat == u).collect();
        assert!(ok.windows(2).all(|w| !w[0] || w[1]), "trial {t}: {ok:?}");
    }
}

#[test]
fn list_output_is_truth_whenever_sc_succeeds() {
    let code = construct_code(7, 64, 1.5).unwrap().with_crc(CrcSpec::new(8, vec![8, 2, 1, 0]).unwrap()).unwrap();
    let p = ChannelParams::<f64>::from_ebn0(1.5, code.rate()).unwrap();
    for t in 0..200u64 {
        let mut rng = trial_rng(t);
        let payload: Vec<u8> = (0..code.payload_len()).map(|_| rng.random_range(0..2)).collect();
        let u = code.message(&payload).unwrap();
        let c = encode(&code, &u).unwrap();
        let l = channel_llrs(&channel::transmit_with(&modulate::<f64>(&c), &p, &mut rng), &p);
        if sc_decode(&l, &code).unwrap().u_hat == u {
            let out = ca_scl_decode(&l, &code, 4).unwrap();
            assert!(out.crc_ok);
            assert_eq!(out.u_hat, u, "trial {t}");
        }
    }
}

/// Brute-force partition: maximal aligned dyadic intervals of unfrozen leaves.
fn dyadic_blocks(mask: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < mask.len() {
        if mask[i] {
            i += 1;
            continue;
        }
        let mut size = 1;
        while i % (2 * size) == 0 && i + 2 * size <= mask.len() && mask[i..i + 2 * size].iter().all(|f| !f) {
            size *= 2;
        }
        out.push((i + 1, size));
        i += size;
    }
    out
}

proptest! {
    #[test]
    fn encoding_is_linear(a in prop::collection::vec(0u8..2, 32), b in prop::collection::vec(0u8..2, 32)) {
        let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let lhs = polar_transform(&sum);
        let rhs: Vec<u8> = polar_transform(&a).iter().zip(polar_transform(&b)).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn transform_is_an_involution(u in prop::collection::vec(0u8..2, 64)) {
        // G^{⊗n} squares to I over GF(2) and commutes with bit reversal
        prop_assert_eq!(polar_transform(&polar_transform(&u)), u);
    }

    #[test]
    fn crc_roundtrip(payload in prop::collection::vec(0u8..2, 1..200)) {
        prop_assert!(crc_check(&crc_attach(&payload)).unwrap());
    }

    #[test]
    fn partition_matches_brute_force(bits in prop::collection::vec(any::<bool>(), 64)) {
        prop_assume!(bits.iter().any(|f| !f));
        let p = partition(&bits).unwrap();
        let got: Vec<(usize, usize)> = p.blocks.iter().map(|b| (b.first, b.size)).collect();
        prop_assert_eq!(&got, &dyadic_blocks(&bits));
        // every unfrozen leaf sits in exactly one block
        for (k, &f) in bits.iter().enumerate() {
            let hits = p.blocks.iter().filter(|b| b.contains(k + 1)).count();
            prop_assert_eq!(hits, usize::from(!f));
        }
    }

    #[test]
    fn modified_sets_stay_past_the_prefix(bits in prop::collection::vec(any::<bool>(), 32), cut in 0usize..=32) {
        let s = modified_critical_set(&bits, cut).unwrap();
        prop_assert!(s.members().iter().all(|&i| i > cut && !bits[i - 1]));
        let mut forced = bits.clone();
        forced[..cut].iter_mut().for_each(|f| *f = true);
        let direct = if forced.iter().all(|&f| f) { CriticalSet::default() } else { critical_set(&forced).unwrap() };
        prop_assert_eq!(s, direct);
    }

    #[test]
    fn decisions_before_a_flip_do_not_depend_on_it(seed in any::<u64>(), pick in prop::collection::vec(0usize..64, 1..5), split in 0usize..64) {
        let code = construct_code(7, 64, 1.0).unwrap();
        let mut rng = trial_rng(seed);
        let llrs: Vec<f64> = (0..128).map(|_| rng.random_range(-4.0..6.0)).collect();
        let info = code.info_set();
        let i = info[split];
        let mut a: Vec<usize> = pick.iter().map(|&k| info[k]).collect();
        a.sort_unstable();
        a.dedup();
        // same flips before i, arbitrary (different) flips from i on
        let mut b: Vec<usize> = a.iter().copied().filter(|&j| j < i).collect();
        b.extend(info.iter().copied().filter(|&j| j >= i).take(2));
        let ta = sc_decode_flip(&llrs, &code, &FlipSet::new(a).unwrap()).unwrap();
        let tb = sc_decode_flip(&llrs, &code, &FlipSet::new(b).unwrap()).unwrap();
        prop_assert_eq!(&ta.u_hat[..i - 1], &tb.u_hat[..i - 1]);
        prop_assert_eq!(ta.decision_llrs[i - 1], tb.decision_llrs[i - 1]);
    }

    #[test]
    fn phi_inverse_roundtrip(x in 0.1f64..40.0) {
        let back = phi_inv(phi(x).unwrap()).unwrap();
        prop_assert!(((back - x) / x).abs() < 1e-6);
    }
}
