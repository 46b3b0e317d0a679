//! The two single-copy distillation protocols for `a|001⟩ + b|010⟩ + c|100⟩`.
//!
//! Both protocols act only on Bob's particles (2 and 3) and one ancilla.
//! Protocol 1 rotates amplitude out of `|001⟩` and `|010⟩` into the ancilla
//! and heralds the W state on `anc = 0`. Protocol 2 uses a different pair of
//! rotations so that the failure branch leaves particles 2, 3 in an entangled
//! pair, which a further rotation on a fresh ancilla turns into a singlet.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::branching::{Classification, Node, ProtocolOutcome};
use crate::error::{Error, Result};
use crate::statevec::{JointUnitary, PureState, C64, NORM_TOL};

pub const PARTICLE_1: &str = "1";
pub const PARTICLE_2: &str = "2";
pub const PARTICLE_3: &str = "3";
pub const PARTICLES: [&str; 3] = [PARTICLE_1, PARTICLE_2, PARTICLE_3];
/// Ancilla heralding the W state.
pub const ANCILLA: &str = "anc";
/// Fresh ancilla used when recycling the garbage branch.
pub const RECYCLE_ANCILLA: &str = "anc2";

/// Slack allowed on `a ≥ b ≥ c` when coefficients come from square roots.
const ORDER_TOL: f64 = 1e-12;
/// Residual accepted for a root of the `m` condition.
pub const M_RESIDUAL_TOL: f64 = 1e-9;
/// Roots this close to ±1 are taken as ±1.
pub const M_SNAP_TOL: f64 = 1e-15;
/// Relative gap below which `a` and `b` are treated as equal.
pub const EQUAL_AB_TOL: f64 = 1e-12;
/// Purity slack when checking that particle 1 factors out.
const SEPARABLE_TOL: f64 = 1e-9;

/// Real, ordered, normalized coefficients of `a|001⟩ + b|010⟩ + c|100⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WCoefficients {
    a: f64,
    b: f64,
    c: f64,
}

impl WCoefficients {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if ![a, b, c].iter().all(|x| x.is_finite()) {
            return Err(Error::Coefficient(format!("non-finite coefficient in ({a}, {b}, {c})")));
        }
        if c < 0.0 {
            return Err(Error::Coefficient(format!("c = {c} is negative")));
        }
        if a + ORDER_TOL < b || b + ORDER_TOL < c {
            return Err(Error::Coefficient(format!(
                "ordering a >= b >= c violated by ({a}, {b}, {c})"
            )));
        }
        let norm = a * a + b * b + c * c;
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Coefficient(format!(
                "a^2 + b^2 + c^2 = {norm}, expected 1"
            )));
        }
        let c2 = c * c;
        if 1.0 - 3.0 * c2 < -1e-12 || 1.0 - 2.0 * c2 <= 0.0 {
            return Err(Error::Coefficient(format!("c^2 = {c2} out of range")));
        }
        Ok(Self {
            a,
            b: b.min(a),
            c: c.min(b),
        })
    }

    /// From `(a², b², c²)`.
    pub fn from_squares(a2: f64, b2: f64, c2: f64) -> Result<Self> {
        if [a2, b2, c2].iter().any(|x| *x < 0.0) {
            return Err(Error::Coefficient(format!(
                "negative square in ({a2}, {b2}, {c2})"
            )));
        }
        Self::new(a2.sqrt(), b2.sqrt(), c2.sqrt())
    }

    /// Uniform over the ordered region of the positive octant of the sphere,
    /// in squared coordinates (flat Dirichlet on `(a², b², c²)`).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let (u, v): (f64, f64) = (rng.random(), rng.random());
            let (lo, hi) = if u < v { (u, v) } else { (v, u) };
            let mut sq = [lo, hi - lo, 1.0 - hi];
            sq.sort_by(|x, y| y.total_cmp(x));
            if let Ok(w) = Self::from_squares(sq[0], sq[1], sq[2]) {
                return w;
            }
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `(a², b², c²)`.
    pub fn squares(&self) -> (f64, f64, f64) {
        (self.a * self.a, self.b * self.b, self.c * self.c)
    }

    /// `c = 0`: no `|100⟩` component, so no W state can be extracted.
    pub fn is_degenerate(&self) -> bool {
        self.c == 0.0
    }

    /// `a² − c²` without cancellation.
    pub fn a2_minus_c2(&self) -> f64 {
        ((self.a - self.c) * (self.a + self.c)).max(0.0)
    }

    pub fn b2_minus_c2(&self) -> f64 {
        ((self.b - self.c) * (self.b + self.c)).max(0.0)
    }

    pub fn a2_minus_b2(&self) -> f64 {
        ((self.a - self.b) * (self.a + self.b)).max(0.0)
    }

    fn a_equals_b(&self) -> bool {
        (self.a - self.b).abs() < EQUAL_AB_TOL * self.a.max(f64::MIN_POSITIVE)
    }
}

/// Closed-form branch probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticProbabilities {
    /// `3c²`
    pub p_w: f64,
    /// `2(b² − c²)`
    pub p_bell: f64,
    /// `a² − b²`
    pub p_fail: f64,
}

pub fn analytic_probabilities(w: &WCoefficients) -> AnalyticProbabilities {
    let (_, _, c2) = w.squares();
    AnalyticProbabilities {
        p_w: 3.0 * c2,
        p_bell: 2.0 * w.b2_minus_c2(),
        p_fail: w.a2_minus_b2(),
    }
}

/// `a|001⟩ + b|010⟩ + c|100⟩` over particles `1, 2, 3`.
pub fn make_wprime(w: &WCoefficients) -> PureState {
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    amps[0b001] = C64::new(w.a, 0.0);
    amps[0b010] = C64::new(w.b, 0.0);
    amps[0b100] = C64::new(w.c, 0.0);
    PureState::from_amplitudes(&PARTICLES, &[2, 2, 2], amps).expect("fixed register")
}

/// `(|001⟩ + |010⟩ + |100⟩)/√3` over particles `1, 2, 3`.
pub fn w3() -> PureState {
    let s = 1.0 / 3f64.sqrt();
    make_wprime(&WCoefficients { a: s, b: s, c: s })
}

/// `(|10⟩ − |01⟩)/√2` over particles `2, 3`.
pub fn singlet() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    PureState::from_amplitudes(
        &[PARTICLE_2, PARTICLE_3],
        &[2, 2],
        vec![z, C64::new(-s, 0.0), C64::new(s, 0.0), z],
    )
    .expect("fixed register")
}

/// W′ on particles `1, 2, 3` followed by an ancilla in `|0⟩`.
pub fn wprime_with_ancilla(w: &WCoefficients) -> PureState {
    make_wprime(w)
        .tensor(&PureState::qubit(ANCILLA, 0).expect("qubit"))
        .expect("fresh label")
}

/// Rotation mixing `|1⟩p|0⟩a` and `|0⟩p|1⟩a`:
/// `[[1,0,0,0],[0,r,s,0],[0,-s,r,0],[0,0,0,1]]` with `s = √(1−r²)`.
fn swap_rotation(r: f64) -> Result<JointUnitary> {
    let r = r.clamp(-1.0, 1.0);
    let s = (1.0 - r * r).max(0.0).sqrt();
    JointUnitary::from_real([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, r, s, 0.0],
        [0.0, -s, r, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
}

/// Reflection mixing `|1⟩p|0⟩a` and `|1⟩p|1⟩a`, with `|0⟩p|1⟩a → −|0⟩p|1⟩a`:
/// `[[1,0,0,0],[0,r,0,s],[0,0,-1,0],[0,s,0,-r]]`.
fn flip_reflection(r: f64) -> Result<JointUnitary> {
    let r = r.clamp(-1.0, 1.0);
    let s = (1.0 - r * r).max(0.0).sqrt();
    JointUnitary::from_real([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, r, 0.0, s],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, s, 0.0, -r],
    ])
}

fn ratio(num: f64, den: f64, what: &str) -> Result<f64> {
    if den <= 0.0 {
        return Err(Error::Coefficient(format!("{what}: zero denominator")));
    }
    Ok((num / den).min(1.0))
}

/// Protocol 1, first step, on `(particle 3, ancilla)`: moves `a → c` on `|001⟩`.
pub fn build_u1(w: &WCoefficients) -> Result<JointUnitary> {
    swap_rotation(ratio(w.c, w.a, "c/a")?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootSign {
    Plus,
    Minus,
}

/// The rotation parameter of protocol 1's second step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MParameter {
    pub value: f64,
    pub sign: RootSign,
    /// `b·m − √((a²−c²)(1−m²)) − c` at the chosen root.
    pub residual: f64,
}

/// Both roots of `m = (bc ± √((a²−c²)(1−3c²)))/(1−2c²)`, plus first.
pub fn m_roots(w: &WCoefficients) -> Result<[f64; 2]> {
    let c2 = w.c * w.c;
    let den = 1.0 - 2.0 * c2;
    if den <= 0.0 {
        return Err(Error::Coefficient(format!("1 - 2c^2 = {den} is not positive")));
    }
    let disc = w.a2_minus_c2() * (1.0 - 3.0 * c2);
    if disc < -1e-12 {
        return Err(Error::Coefficient(format!("negative discriminant {disc}")));
    }
    let root = disc.max(0.0).sqrt();
    let bc = w.b * w.c;
    Ok([snap_unit((bc + root) / den), snap_unit((bc - root) / den)])
}

/// Rounds `m` onto ±1 when it is within [`M_SNAP_TOL`].
fn snap_unit(m: f64) -> f64 {
    if (1.0 - m.abs()).abs() <= M_SNAP_TOL {
        m.signum()
    } else {
        m
    }
}

/// Residual of the unsquared condition `b·m − √((a²−c²)(1−m²)) = c`, which
/// makes the `|010⟩|0⟩a` amplitude equal `c` after the second step.
pub fn m_residual(w: &WCoefficients, m: f64) -> f64 {
    let one_minus_m2 = (1.0 - m * m).max(0.0);
    w.b * m - (w.a2_minus_c2() * one_minus_m2).sqrt() - w.c
}

/// Picks the root of the squared quadratic that satisfies the unsquared
/// condition. The other root is spurious.
pub fn solve_m(w: &WCoefficients) -> Result<MParameter> {
    let roots = m_roots(w)?;
    let candidates = [(roots[0], RootSign::Plus), (roots[1], RootSign::Minus)];
    candidates
        .iter()
        .filter(|(m, _)| m.abs() <= 1.0 + 1e-12)
        .map(|&(m, sign)| MParameter {
            value: m.clamp(-1.0, 1.0),
            sign,
            residual: m_residual(w, m.clamp(-1.0, 1.0)),
        })
        .find(|p| p.residual.abs() <= M_RESIDUAL_TOL)
        .ok_or_else(|| {
            Error::Solver(format!(
                "no root of m satisfies the amplitude condition for {w:?} (roots {roots:?})"
            ))
        })
}

/// Protocol 1, second step, on `(particle 2, ancilla)`.
pub fn build_u2(w: &WCoefficients) -> Result<JointUnitary> {
    swap_rotation(solve_m(w)?.value)
}

/// Protocol 2, first step, on `(particle 3, ancilla)`.
pub fn build_u1_prime(w: &WCoefficients) -> Result<JointUnitary> {
    flip_reflection(ratio(w.c, w.a, "c/a")?)
}

/// Protocol 2, second step, on `(particle 2, ancilla)`. Needs `b > 0`.
pub fn build_u2_prime(w: &WCoefficients) -> Result<JointUnitary> {
    if w.b <= 0.0 {
        return Err(Error::Coefficient(
            "b = 0: the state is bipartite and the second step is undefined".into(),
        ));
    }
    flip_reflection(ratio(w.c, w.b, "c/b")?)
}

/// `√(b²−c²)/√(a²−c²)`, taken as 1 when `a = b`, including the `a = b = c`
/// limit.
pub fn u3_prime_ratio(w: &WCoefficients) -> f64 {
    if w.a_equals_b() {
        return 1.0;
    }
    (w.b2_minus_c2() / w.a2_minus_c2()).sqrt().min(1.0)
}

/// Garbage recycling step on `(particle 3, fresh ancilla)`.
pub fn build_u3_prime(w: &WCoefficients) -> Result<JointUnitary> {
    flip_reflection(u3_prime_ratio(w))
}

/// Protocol 1 state right before the ancilla is measured.
pub fn protocol1_state(w: &WCoefficients) -> Result<PureState> {
    wprime_with_ancilla(w)
        .apply_joint_unitary(&build_u1(w)?, PARTICLE_3, ANCILLA)?
        .apply_joint_unitary(&build_u2(w)?, PARTICLE_2, ANCILLA)
}

/// Protocol 2 state right before the ancilla is measured.
pub fn protocol2_state(w: &WCoefficients) -> Result<PureState> {
    let s = wprime_with_ancilla(w).apply_joint_unitary(&build_u1_prime(w)?, PARTICLE_3, ANCILLA)?;
    if w.b <= 0.0 {
        // b = c = 0: the state is |001⟩, nothing for the second step to move
        return Ok(s);
    }
    s.apply_joint_unitary(&build_u2_prime(w)?, PARTICLE_2, ANCILLA)
}

pub fn protocol1_tree(w: &WCoefficients) -> Result<Node> {
    Node::measure(protocol1_state(w)?, ANCILLA, ANCILLA, |outcome, post| {
        Ok(match outcome {
            0 => Node::leaf(Classification::WSuccess, post),
            _ => Node::leaf(Classification::Failure, post),
        })
    })
}

pub fn protocol2_tree(w: &WCoefficients) -> Result<Node> {
    Node::measure(protocol2_state(w)?, ANCILLA, ANCILLA, |outcome, post| match (outcome, post) {
        (0, post) => Ok(Node::leaf(Classification::WSuccess, post)),
        (_, Some(garbage)) => recycle_tree(&garbage, w),
        (_, None) => Ok(Node::leaf(Classification::Failure, None)),
    })
}

/// Exact branch enumeration of protocol 1.
pub fn run_protocol1(w: &WCoefficients) -> Result<Vec<ProtocolOutcome>> {
    protocol1_tree(w)?.enumerate()
}

/// Exact branch enumeration of protocol 2, garbage recycling included.
/// Probabilities are joint, measured from the initial W′ state.
pub fn run_protocol2(w: &WCoefficients) -> Result<Vec<ProtocolOutcome>> {
    protocol2_tree(w)?.enumerate()
}

/// Recycles the normalized `anc = 1` branch of protocol 2 (over particles
/// `1, 2, 3`) into a singlet on particles 2, 3. Probabilities are conditional
/// on reaching the garbage branch.
pub fn recycle_garbage(garbage: &PureState, w: &WCoefficients) -> Result<Vec<ProtocolOutcome>> {
    recycle_tree(garbage, w)?.enumerate()
}

/// Measurement tree of the recycling step.
pub fn recycle_tree(garbage: &PureState, w: &WCoefficients) -> Result<Node> {
    if garbage.labels() != PARTICLES || garbage.dims() != [2, 2, 2] {
        return Err(Error::Input(format!(
            "garbage must be a 3-qubit state over particles 1, 2, 3, got {:?}",
            garbage.labels()
        )));
    }
    let purity = garbage.marginal_purity(&[PARTICLE_1])?;
    if (purity - 1.0).abs() > SEPARABLE_TOL {
        return Err(Error::Input(format!(
            "particle 1 is entangled with the rest (marginal purity {purity})"
        )));
    }
    if w.a_equals_b() {
        // already a singlet
        return Ok(Node::leaf(Classification::BellSuccess, Some(garbage.clone())));
    }
    if w.b2_minus_c2() < EQUAL_AB_TOL {
        // b = c: only |001⟩ survives, a product state
        return Ok(Node::leaf(Classification::Failure, Some(garbage.clone())));
    }
    let fresh = PureState::qubit(RECYCLE_ANCILLA, 0)?;
    let rotated = garbage
        .tensor(&fresh)?
        .apply_joint_unitary(&build_u3_prime(w)?, PARTICLE_3, RECYCLE_ANCILLA)?;
    Node::measure(rotated, RECYCLE_ANCILLA, RECYCLE_ANCILLA, |outcome, post| {
        Ok(match outcome {
            0 => Node::leaf(Classification::BellSuccess, post),
            _ => Node::leaf(Classification::Failure, post),
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branching::totals;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn sample() -> WCoefficients {
        WCoefficients::from_squares(0.5, 0.3, 0.2).unwrap()
    }

    fn equal() -> WCoefficients {
        WCoefficients::from_squares(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0).unwrap()
    }

    fn amp(s: &PureState, levels: &[usize]) -> C64 {
        s.amplitude(levels).unwrap()
    }

    #[test]
    fn coefficient_validation() {
        assert!(WCoefficients::from_squares(0.2, 0.3, 0.5).is_err());
        assert!(WCoefficients::new(0.9, 0.3, 0.1).is_err());
        assert!(WCoefficients::new(1.0, 0.0, 0.0).unwrap().is_degenerate());
        assert!(WCoefficients::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn wprime_amplitudes() {
        let s = make_wprime(&sample());
        assert!((amp(&s, &[0, 0, 1]).re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((amp(&s, &[0, 1, 0]).re - 0.3f64.sqrt()).abs() < 1e-15);
        assert!((amp(&s, &[1, 0, 0]).re - 0.2f64.sqrt()).abs() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert!((make_wprime(&equal()).fidelity(&w3()).unwrap() - 1.0).abs() < 1e-15);
        let p = make_wprime(&WCoefficients::new(1.0, 0.0, 0.0).unwrap());
        assert_eq!(amp(&p, &[0, 0, 1]), C64::new(1.0, 0.0));
    }

    #[test]
    fn u1_entries() {
        let u = build_u1(&sample()).unwrap();
        let e = u.entries();
        assert!((e[1][1].re - 0.4f64.sqrt()).abs() < 1e-15);
        assert!((e[1][2].re - 0.6f64.sqrt()).abs() < 1e-15);
        assert!((e[2][1].re + 0.6f64.sqrt()).abs() < 1e-15);
        assert_eq!(build_u1(&equal()).unwrap(), JointUnitary::identity());
    }

    #[test]
    fn u1_moves_amplitude_into_ancilla() {
        let s = wprime_with_ancilla(&sample())
            .apply_joint_unitary(&build_u1(&sample()).unwrap(), PARTICLE_3, ANCILLA)
            .unwrap();
        // -sqrt(a^2 - c^2) on |000>|1>
        assert!((amp(&s, &[0, 0, 0, 1]).re + 0.547722557505166).abs() < 1e-12);
        assert!((amp(&s, &[0, 0, 1, 0]).re - 0.2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn m_roots_for_sample() {
        let w = sample();
        let [plus, minus] = m_roots(&w).unwrap();
        assert!((plus - 0.985599).abs() < 1e-6);
        assert!((minus + 0.169102).abs() < 1e-6);
        let m = solve_m(&w).unwrap();
        assert_eq!(m.sign, RootSign::Plus);
        assert!(m_residual(&w, minus).abs() > 1e-3);
    }

    #[test]
    fn m_is_one_for_w_state() {
        let m = solve_m(&equal()).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12);
        assert!(build_u2(&equal()).unwrap().unitarity_deviation() < 1e-12);
    }

    #[test]
    fn protocol1_branches() {
        let out = run_protocol1(&sample()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].label, "anc=0");
        assert!((out[0].probability - 0.6).abs() < 1e-12);
        let f = out[0].post_state.as_ref().unwrap().fidelity(&w3()).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
        assert_eq!(out[1].classification, Classification::Failure);
        // failure amplitude magnitude sqrt(1 - 3c^2)
        let pre = protocol1_state(&sample()).unwrap();
        assert!((amp(&pre, &[0, 0, 0, 1]).norm() - 0.4f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn protocol1_degenerate_and_symmetric() {
        let out = run_protocol1(&equal()).unwrap();
        assert!((out[0].probability - 1.0).abs() < 1e-12);
        let deg = WCoefficients::from_squares(0.6, 0.4, 0.0).unwrap();
        let out = run_protocol1(&deg).unwrap();
        assert!(out[0].probability < 1e-15);
        assert!(out[0].post_state.is_none());
        assert!((out[1].probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn u_prime_entries() {
        let w = sample();
        let u2p = build_u2_prime(&w).unwrap();
        assert!((u2p.entries()[1][1].re - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let u1p = build_u1_prime(&equal()).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| u1p.entries()[i][i].re).collect();
        assert_eq!(diag, [1.0, 1.0, -1.0, -1.0]);
        assert!((u3_prime_ratio(&w) - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let bipartite = WCoefficients::new(1.0, 0.0, 0.0).unwrap();
        assert!(matches!(build_u2_prime(&bipartite), Err(Error::Coefficient(_))));
    }

    #[test]
    fn protocol2_partition() {
        let out = run_protocol2(&sample()).unwrap();
        let labels: Vec<&str> = out.iter().map(|o| o.label.as_str()).collect();
        assert_eq!(labels, ["anc=0", "anc=1;anc2=0", "anc=1;anc2=1"]);
        let t = totals(&out);
        assert!((t[0] - 0.6).abs() < 1e-12);
        assert!((t[1] - 0.2).abs() < 1e-12);
        assert!((t[2] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn protocol2_edge_cases() {
        let t = totals(&run_protocol2(&equal()).unwrap());
        assert!((t[0] - 1.0).abs() < 1e-12 && t[1] == 0.0);
        let b_eq_c = WCoefficients::from_squares(0.6, 0.2, 0.2).unwrap();
        let t = totals(&run_protocol2(&b_eq_c).unwrap());
        assert!(t[1].abs() < 1e-12);
        assert!((t[2] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn direct_bell_when_a_equals_b() {
        let w = WCoefficients::from_squares(0.4, 0.4, 0.2).unwrap();
        let out = run_protocol2(&w).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].label, "anc=1");
        assert_eq!(out[1].classification, Classification::BellSuccess);
        assert!((out[1].probability - 0.4).abs() < 1e-12);
    }

    #[test]
    fn recycle_rejects_entangled_particle_one() {
        let r = recycle_garbage(&w3(), &sample());
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn recycled_pair_is_a_singlet() {
        let w = sample();
        let garbage = protocol2_state(&w).unwrap().slice(ANCILLA, 1).unwrap().normalized().unwrap();
        let out = recycle_garbage(&garbage, &w).unwrap();
        // conditional probabilities: 2(b^2-c^2)/(1-3c^2) = 0.5
        assert!((out[0].probability - 0.5).abs() < 1e-12);
        let bell = out[0].post_state.as_ref().unwrap();
        let pair = bell.slice(PARTICLE_1, 0).unwrap().normalized().unwrap();
        assert!((pair.fidelity(&singlet()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_coefficients_are_valid() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let w = WCoefficients::random(&mut rng);
            assert!(w.a() >= w.b() && w.b() >= w.c() && w.c() >= 0.0);
        }
    }
}
