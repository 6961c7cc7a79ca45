//! Gaussian approximation (GA) of SC message densities.
//!
//! Every LLR is modelled as `N(mu, 2 mu)`, so a single mean per node carries
//! the whole density. The check-node update goes through
//! `phi(x) = 1 - E[tanh(U/2)]`, `U ~ N(x, 2x)`.
//!
//! `phi` is evaluated through the equivalent form
//!
//! ```text
//! phi(x) = exp(-x/4) / sqrt(4 pi x) * ∫ sech(u/2) exp(-u^2 / 4x) du
//! ```
//!
//! whose integrand is positive and smooth, so composite Gauss-Legendre gives
//! full relative precision even where `phi(x)` is astronomically small.
//! Everything is carried in the log domain to survive the large means found
//! near the bottom of long codes.

use crate::{Error, Real, Result};

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Below this argument the two-term series of `1 - phi` is used.
const SERIES_LIMIT: f64 = 1e-5;
const INV_LO: f64 = 1e-12;
const INV_HI: f64 = 200.0;

/// Mean LLR of every split channel, in u-domain order.
#[derive(Debug, Clone, PartialEq)]
pub struct GaProfile<T> {
    pub channel_mu: T,
    pub means: Vec<T>,
}

impl<T: Real> GaProfile<T> {
    pub fn from_means(channel_mu: T, means: Vec<T>) -> Self {
        Self { channel_mu, means }
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    /// Mean of `u_i`, 1-based.
    pub fn mean(&self, i: usize) -> T {
        self.means[i - 1]
    }

    /// Standard deviation `sqrt(2 mu_i)` implied by the symmetric model.
    pub fn sigma(&self, i: usize) -> T {
        (T::of(2.0) * self.mean(i)).sqrt()
    }

    pub fn cast<U: Real>(&self) -> GaProfile<U> {
        GaProfile {
            channel_mu: U::of(self.channel_mu.as_f64()),
            means: self.means.iter().map(|m| U::of(m.as_f64())).collect(),
        }
    }
}

/// `channel_mu = 2 / sigma^2` for BPSK at `ebn0_db` with
/// `sigma^2 = 1 / (2 R 10^(ebn0/10))`.
pub fn channel_mu_from_ebn0(ebn0_db: f64, rate: f64) -> f64 {
    4.0 * rate * 10f64.powf(ebn0_db / 10.0)
}

/// Returns `(I, dI/dx)` for `I(x) = ∫ sech(u/2) exp(-u^2/4x) du` over the real line.
fn sech_integral<T: Real>(x: T) -> (T, T) {
    let half = T::of(0.5);
    let s = (T::of(2.0) * x).sqrt();
    let upper = (T::of(9.0) * s).min(T::of(80.0));
    let width = (s * half).min(T::one());
    let panels = (upper / width).ceil().to_usize().unwrap_or(1).max(1);
    let h = upper / T::of(panels as f64);
    let inv4x = T::one() / (T::of(4.0) * x);

    let mut value = T::zero();
    let mut deriv = T::zero();
    for p in 0..panels {
        let mid = h * (T::of(p as f64) + half);
        for (&node, &weight) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            for sign in [-1.0, 1.0] {
                let u = mid + T::of(sign * node) * h * half;
                let u2 = u * u;
                let e = (-(u * half).abs()).exp();
                // sech(v) = 2 e^{-|v|} / (1 + e^{-2|v|})
                let sech = T::of(2.0) * e / (T::one() + e * e);
                let g = sech * (-u2 * inv4x).exp() * T::of(weight);
                value = value + g;
                deriv = deriv + g * u2 * inv4x / x;
            }
        }
    }
    // Symmetric integrand: double the half-line, and scale each panel by h/2.
    (value * h, deriv * h)
}

/// `ln phi(x)` and its derivative for `x > 0`.
fn ln_phi_with_slope<T: Real>(x: T) -> (T, T) {
    if x < T::of(SERIES_LIMIT) {
        let c = x * T::of(0.5) - x * x * T::of(0.25);
        let phi = T::one() - c;
        return ((-c).ln_1p(), -(T::of(0.5) - x * T::of(0.5)) / phi);
    }
    let (i, di) = sech_integral(x);
    let quarter = T::of(0.25);
    let ln = -x * quarter - T::of(0.5) * (T::of(4.0) * T::PI() * x).ln() + i.ln();
    let slope = -quarter - T::of(0.5) / x + di / i;
    (ln, slope)
}

pub(crate) fn ln_phi<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        ln_phi_with_slope(x).0
    }
}

/// `1 - phi(x)` without cancellation for small `x`.
fn one_minus_phi<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else if x < T::of(SERIES_LIMIT) {
        x * T::of(0.5) - x * x * T::of(0.25)
    } else {
        -ln_phi(x).exp_m1()
    }
}

pub fn phi<T: Real>(x: T) -> Result<T> {
    if x.is_nan() || x < T::zero() {
        return Err(Error::Domain(format!("phi({x}) requires x >= 0")));
    }
    if x == T::zero() {
        return Ok(T::one());
    }
    Ok(ln_phi(x).exp())
}

/// Solves `ln phi(x) = ln_y` by safeguarded Newton inside a bisection bracket.
fn phi_inv_ln<T: Real>(ln_y: T) -> T {
    if ln_y >= T::zero() {
        return T::zero();
    }
    let mut lo = T::of(INV_LO);
    let mut hi = T::of(INV_HI);
    if ln_phi(lo) <= ln_y {
        return lo;
    }
    while ln_phi(hi) > ln_y {
        lo = hi;
        hi = hi * T::of(2.0);
        if hi > T::of(1e9) {
            return hi;
        }
    }
    // phi(x) ~ exp(-x/4) for large x, ~ 1 - x/2 for small x
    let guess = if ln_y < T::of(-1.0) {
        T::of(-4.0) * ln_y
    } else {
        T::of(-2.0) * ln_y
    };
    let mut x = if guess > lo && guess < hi {
        guess
    } else {
        (lo + hi) * T::of(0.5)
    };
    for _ in 0..200 {
        let (lp, slope) = ln_phi_with_slope(x);
        let g = lp - ln_y;
        if g > T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - g / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = (lo + hi) * T::of(0.5);
        }
        let tol = T::of(1e-10).max(T::epsilon() * T::of(8.0) * next.abs());
        if (next - x).abs() < tol || (hi - lo) < tol {
            return next;
        }
        x = next;
    }
    x
}

/// Solves `1 - phi(x) = t`.
fn phi_inv_complement<T: Real>(t: T) -> T {
    if t <= T::zero() {
        return T::zero();
    }
    if t < T::of(1e-10) {
        return T::of(2.0) * t + T::of(2.0) * t * t;
    }
    phi_inv_ln((-t).ln_1p())
}

pub fn phi_inv<T: Real>(y: T) -> Result<T> {
    if !(y > T::zero() && y <= T::one()) {
        return Err(Error::Domain(format!("phi_inv({y}) requires 0 < y <= 1")));
    }
    Ok(phi_inv_ln(y.ln()))
}

/// `phi^-1(1 - (1 - phi(mu))^weight)`: mean after a parity combination of
/// `weight` independent copies.
fn parity_mean<T: Real>(mu: T, weight: T) -> T {
    if weight == T::one() || mu <= T::zero() {
        return mu.max(T::zero());
    }
    let lp = ln_phi(mu);
    let q = one_minus_phi(mu);
    let complement = (weight * q.ln()).exp();
    if complement < T::of(1e-10) {
        return phi_inv_complement(complement);
    }
    let ln_y = if lp < T::of(-600.0) {
        weight.ln() + lp
    } else {
        (-(weight * (-lp.exp()).ln_1p()).exp_m1()).ln()
    };
    phi_inv_ln(ln_y)
}

/// Mean of the check-direction child of a node with mean `mu`.
pub fn check_mean<T: Real>(mu: T) -> T {
    parity_mean(mu, T::of(2.0))
}

/// Mean LLR of the first bit of a rate-1 subblock of size `2^m` whose root
/// carries mean `mu`.
pub fn first_bit_mean<T: Real>(mu: T, m: u32) -> Result<T> {
    if mu.is_nan() || mu < T::zero() {
        return Err(Error::Domain(format!("first_bit_mean requires mu >= 0, got {mu}")));
    }
    if m == 0 {
        return Ok(mu);
    }
    Ok(parity_mean(mu, T::of(2f64.powi(m as i32))))
}

/// Node means of the whole code tree from `channel_mu` downward; entry `d`
/// holds the `2^d` nodes at depth `d`, left (check) child first.
pub fn tree_means<T: Real>(n: u32, channel_mu: T) -> Result<Vec<Vec<T>>> {
    if !(channel_mu > T::zero()) || !channel_mu.is_finite() {
        return Err(Error::Domain(format!(
            "channel mean must be positive and finite, got {channel_mu}"
        )));
    }
    let mut levels = vec![vec![channel_mu]];
    for _ in 0..n {
        let parent = levels.last().expect("root level");
        let next = parent
            .iter()
            .flat_map(|&m| [check_mean(m), T::of(2.0) * m])
            .collect();
        levels.push(next);
    }
    Ok(levels)
}

/// GA mean of each of the `2^n` split channels.
pub fn split_channel_means<T: Real>(n: u32, channel_mu: T) -> Result<GaProfile<T>> {
    let means = tree_means(n, channel_mu)?.pop().expect("leaf level");
    Ok(GaProfile { channel_mu, means })
}

/// `(P_s_bler, P_u1)` of a rate-1 subblock of size `2^m` with root mean `mu`.
pub fn subblock_probs<T: Real>(mu: T, m: u32) -> Result<(T, T)> {
    let mu1 = first_bit_mean(mu, m)?;
    let half = T::of(0.5);
    let p_u1 = q_func((mu1 * half).sqrt());
    let p = q_func((mu * half).sqrt());
    let p_block = -(T::of(2f64.powi(m as i32)) * (-p).ln_1p()).exp_m1();
    Ok((p_block, p_u1))
}

/// Gaussian tail probability `Q(x) = P(Z > x)`.
pub fn q_func<T: Real>(x: T) -> T {
    T::of(0.5 * libm::erfc(x.as_f64() / std::f64::consts::SQRT_2))
}
