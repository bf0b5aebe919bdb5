//! Spin <-> position encoding and the two potentials of the protocol.

use crate::error::{Error, Result};
use crate::pca::{CARule, Spin};

#[inline]
pub fn encode_q(s: Spin) -> f64 {
    s.value() as f64
}

/// Nearest encoded state. A position of exactly zero reads as up.
#[inline]
pub fn decode_s(q: f64) -> Result<Spin> {
    if !q.is_finite() {
        return Err(Error::NonFinite(q));
    }
    Ok(Spin::from_sign(q >= 0.0))
}

/// Double well `v_pin (q^2 - 1)^2 + F q` with minima near the encoded states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinPotential {
    pub v_pin: f64,
    pub field: f64,
}

impl PinPotential {
    /// `(energy, force)` with `force = -dV/dq`.
    #[inline]
    pub fn energy_force(&self, q: f64) -> (f64, f64) {
        let s = q * q - 1.0;
        (
            self.v_pin * s * s + self.field * q,
            -4.0 * self.v_pin * q * s - self.field,
        )
    }

    #[inline]
    pub fn force(&self, q: f64) -> f64 {
        -4.0 * self.v_pin * q * (q * q - 1.0) - self.field
    }
}

pub fn pin_potential(q: f64, v_pin: f64, field: f64) -> (f64, f64) {
    PinPotential { v_pin, field }.energy_force(q)
}

/// Continuous extension of a binary rule's output to real-valued inputs.
///
/// The encoded output table is interpolated multilinearly over the corners
/// `{-1, +1}^k`, after clamping every input to `[-1, 1]`. Internally the
/// interpolant is stored as its expansion in monomials `prod_{i in S} c_i`,
/// which for a multilinear function is exact.
#[derive(Debug, Clone)]
pub struct SmoothedRule {
    arity: usize,
    /// Nonzero `(subset mask, coefficient)` pairs.
    terms: Vec<(u32, f64)>,
}

impl SmoothedRule {
    pub fn new(rule: &CARule) -> Self {
        let k = rule.arity();
        let corners = 1usize << k;
        // Coefficient of prod_{i in S} c_i is 2^-k sum_s T(s) prod_{i in S} s_i.
        let terms = (0..corners)
            .filter_map(|subset| {
                let sum: f64 = (0..corners)
                    .map(|mask| {
                        let parity = (!mask & subset).count_ones() % 2;
                        let sign = if parity == 0 { 1.0 } else { -1.0 };
                        sign * encode_q(rule.apply_mask(mask))
                    })
                    .sum();
                let coef = sum / corners as f64;
                (coef != 0.0).then_some((subset as u32, coef))
            })
            .collect();
        Self { arity: k, terms }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Interpolated target; `grad[i]` receives d target / d q_i (zero when
    /// input `i` is clamped).
    #[inline]
    pub fn eval(&self, q: &[f64], grad: &mut [f64]) -> f64 {
        debug_assert_eq!(q.len(), self.arity);
        let mut c = [0.0f64; 16];
        let mut inside = [false; 16];
        for i in 0..self.arity {
            c[i] = q[i].clamp(-1.0, 1.0);
            inside[i] = q[i].abs() <= 1.0;
        }
        grad[..self.arity].iter_mut().for_each(|g| *g = 0.0);
        let mut value = 0.0;
        for &(mask, a) in &self.terms {
            let mut prod = a;
            let mut m = mask;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                prod *= c[i];
                m &= m - 1;
            }
            value += prod;
            let mut m = mask;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                if inside[i] {
                    let mut partial = a;
                    let mut r = mask & !(1 << i);
                    while r != 0 {
                        let j = r.trailing_zeros() as usize;
                        partial *= c[j];
                        r &= r - 1;
                    }
                    grad[i] += partial;
                }
            }
        }
        value
    }

    pub fn target(&self, q: &[f64]) -> f64 {
        let mut g = [0.0; 16];
        self.eval(q, &mut g[..self.arity])
    }
}

pub fn interaction_target(neighbors: &[f64], rule: &CARule) -> f64 {
    SmoothedRule::new(rule).target(neighbors)
}

/// Energy and forces of `(v_I / 2) (target(neighbors) - q_driven)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTerms {
    pub energy: f64,
    pub force_on_driven: f64,
    pub forces_on_neighbors: Vec<f64>,
}

pub fn interaction_potential(
    q_driven: f64,
    neighbors: &[f64],
    v_interaction: f64,
    rule: &CARule,
) -> InteractionTerms {
    let smooth = SmoothedRule::new(rule);
    let mut grad = vec![0.0; neighbors.len()];
    let target = smooth.eval(neighbors, &mut grad);
    let d = target - q_driven;
    let r = v_interaction * d;
    InteractionTerms {
        energy: 0.5 * v_interaction * d * d,
        force_on_driven: r,
        forces_on_neighbors: grad.iter().map(|g| -r * g).collect(),
    }
}
