//! Mass-action integration at desk scale: a fixed-order Runge-Kutta scheme
//! with step halving on negativity, used only for empirical sanity checks.
//! Nothing here feeds the verdict engine.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::network::ReactionNetwork;
use crate::rational::{to_f64, Rational};
use crate::siphon::is_siphon;

#[derive(Clone, Debug)]
pub struct MassActionSystem {
    pub network: ReactionNetwork,
    /// Positive rate constant per reaction.
    pub rates: Vec<Rational>,
    /// Nonnegative initial concentrations per species.
    pub initial: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    pub step: f64,
    pub min_step: f64,
    /// Record every k-th accepted step (the final state is always recorded).
    pub sample_stride: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            step: 1e-3,
            min_step: 1e-12,
            sample_stride: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Running minimum per species over all accepted steps.
    pub min_concentration: Vec<f64>,
    /// Max-norm of the vector field at the final state.
    pub final_residual: f64,
    /// Whether any tiny negative overshoot was clamped to zero.
    pub clamped: bool,
}

impl MassActionSystem {
    pub fn new(network: ReactionNetwork, rates: Vec<Rational>, initial: Vec<f64>) -> Result<Self> {
        if rates.len() != network.n_reactions() {
            return Err(Error::DimensionMismatch {
                expected: network.n_reactions(),
                got: rates.len(),
            });
        }
        if initial.len() != network.n_species() {
            return Err(Error::DimensionMismatch {
                expected: network.n_species(),
                got: initial.len(),
            });
        }
        Ok(MassActionSystem {
            network,
            rates,
            initial,
        })
    }

    /// Float form of the system, computed once per integration.
    fn compile(&self) -> CompiledSystem {
        let m = self.network.n_reactions();
        let mut compiled = CompiledSystem {
            rate: self.rates.iter().map(to_f64).collect(),
            exponents: vec![Vec::new(); m],
            changes: vec![Vec::new(); m],
        };
        for j in 0..m {
            for (s, coeff) in self.network.reactant(j).terms() {
                compiled.exponents[j].push((s, to_f64(coeff)));
            }
            let mut delta: Vec<(usize, f64)> = Vec::new();
            for s in 0..self.network.n_species() {
                let d =
                    to_f64(&(self.network.product(j).coeff(s) - self.network.reactant(j).coeff(s)));
                if d != 0.0 {
                    delta.push((s, d));
                }
            }
            compiled.changes[j] = delta;
        }
        compiled
    }
}

struct CompiledSystem {
    rate: Vec<f64>,
    /// Per reaction: reactant species and their exponents.
    exponents: Vec<Vec<(usize, f64)>>,
    /// Per reaction: sparse net stoichiometric change.
    changes: Vec<Vec<(usize, f64)>>,
}

impl CompiledSystem {
    fn derivative(&self, state: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for j in 0..self.rate.len() {
            let mut rate = self.rate[j];
            for &(s, e) in &self.exponents[j] {
                rate *= if e == 1.0 { state[s] } else { state[s].powf(e) };
            }
            for &(s, d) in &self.changes[j] {
                out[s] += rate * d;
            }
        }
    }
}

const NEGATIVE_TOLERANCE: f64 = 1e-12;

/// Classic fourth-order Runge-Kutta with adaptive halving whenever a step
/// dips any coordinate below -1e-12; smaller violations are clamped to zero
/// and reported through `clamped`.
pub fn integrate(
    sys: &MassActionSystem,
    horizon: f64,
    ctrl: StepControl,
) -> Result<TrajectoryRecord> {
    assert!(horizon > 0.0, "horizon must be positive");
    let n = sys.network.n_species();
    let compiled = sys.compile();
    let mut state = sys.initial.clone();
    let mut t = 0.0_f64;
    let mut h = ctrl.step;

    let mut record = TrajectoryRecord {
        times: vec![0.0],
        states: vec![state.clone()],
        min_concentration: state.clone(),
        final_residual: 0.0,
        clamped: false,
    };

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut accepted: usize = 0;

    while t < horizon {
        let step = h.min(horizon - t);
        compiled.derivative(&state, &mut k1);
        for i in 0..n {
            scratch[i] = state[i] + 0.5 * step * k1[i];
        }
        compiled.derivative(&scratch, &mut k2);
        for i in 0..n {
            scratch[i] = state[i] + 0.5 * step * k2[i];
        }
        compiled.derivative(&scratch, &mut k3);
        for i in 0..n {
            scratch[i] = state[i] + step * k3[i];
        }
        compiled.derivative(&scratch, &mut k4);
        let mut next = state.clone();
        for i in 0..n {
            next[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        if next.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteState(t));
        }
        if next.iter().any(|&x| x < -NEGATIVE_TOLERANCE) {
            h = step / 2.0;
            if h < ctrl.min_step {
                return Err(Error::StepUnderflow(t));
            }
            continue;
        }
        for x in next.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
                record.clamped = true;
            }
        }

        t += step;
        state = next;
        accepted += 1;
        for i in 0..n {
            record.min_concentration[i] = record.min_concentration[i].min(state[i]);
        }
        if accepted.is_multiple_of(ctrl.sample_stride.max(1)) || t >= horizon {
            record.times.push(t);
            record.states.push(state.clone());
        }
        h = ctrl.step;
    }

    record.final_residual = steady_state_residual(sys, &state);
    Ok(record)
}

/// Max-norm of `N r(s)` at the given state.
pub fn steady_state_residual(sys: &MassActionSystem, state: &[f64]) -> f64 {
    let mut d = vec![0.0; sys.network.n_species()];
    sys.compile().derivative(state, &mut d);
    d.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn zero_coordinate_set(state: &[f64], eps: f64) -> BTreeSet<usize> {
    state
        .iter()
        .enumerate()
        .filter(|(_, &x)| x.abs() <= eps)
        .map(|(i, _)| i)
        .collect()
}

/// If the state is (numerically) a steady state with a nonempty zero set,
/// that zero set must be a siphon. Vacuously true otherwise.
pub fn zero_set_siphon_check(
    sys: &MassActionSystem,
    state: &[f64],
    residual_tol: f64,
) -> Result<bool> {
    let z = zero_coordinate_set(state, 0.0);
    if steady_state_residual(sys, state) > residual_tol || z.is_empty() {
        return Ok(true);
    }
    is_siphon(&sys.network, &z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn lv() -> MassActionSystem {
        let net: ReactionNetwork = "N -> 2N; N + P -> P; N + P -> N + 2P; P -> 0"
            .parse()
            .unwrap();
        let rates = vec![rat(1); 4];
        MassActionSystem::new(net, rates, vec![1.0, 2.0]).unwrap()
    }

    #[test]
    fn predator_prey_cycles_stay_positive() {
        let sys = lv();
        let rec = integrate(&sys, 50.0, StepControl::default()).unwrap();
        assert!(rec.min_concentration.iter().all(|&x| x > 0.05));
        // closed orbit: the trajectory comes back near the start
        let closest = rec
            .states
            .iter()
            .skip(1000)
            .map(|s| (s[0] - 1.0).abs().max((s[1] - 2.0).abs()))
            .fold(f64::INFINITY, f64::min);
        assert!(closest < 1e-2, "closest return {closest}");
    }

    #[test]
    fn zero_start_stays_zero_without_inflows() {
        let net: ReactionNetwork = "A + B -> C; C -> A + B".parse().unwrap();
        let sys = MassActionSystem::new(net, vec![rat(1), rat(1)], vec![0.0, 0.0, 0.0]).unwrap();
        let rec = integrate(&sys, 1.0, StepControl::default()).unwrap();
        assert!(rec.states.last().unwrap().iter().all(|&x| x == 0.0));
        assert_eq!(rec.final_residual, 0.0);
    }

    #[test]
    fn interior_steady_state_of_predator_prey() {
        let sys = lv();
        // ds/dt vanishes at N = d/c, P = a/b
        let residual = steady_state_residual(&sys, &[1.0, 1.0]);
        assert!(residual < 1e-12);
        assert!(zero_coordinate_set(&[1.0, 1.0], 0.0).is_empty());
    }

    #[test]
    fn boundary_steady_state_zero_set_is_siphon() {
        let net: ReactionNetwork = "S -> 2S".parse().unwrap();
        let sys = MassActionSystem::new(net, vec![rat(1)], vec![0.0]).unwrap();
        assert!(zero_set_siphon_check(&sys, &[0.0], 1e-9).unwrap());
    }

    #[test]
    fn irreversible_modification_drains_into_a_siphon() {
        // everything ends up phosphorylated; the limit has S0 = ES0 = 0
        let net: ReactionNetwork = "E + S0 <-> ES0; ES0 -> E + S1".parse().unwrap();
        let sys =
            MassActionSystem::new(net.clone(), vec![rat(1); 3], vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let rec = integrate(&sys, 200.0, StepControl::default()).unwrap();
        let last = rec.states.last().unwrap();
        let s0 = net.species_index("S0").unwrap();
        let es0 = net.species_index("ES0").unwrap();
        assert!(last[s0] < 1e-6 && last[es0] < 1e-6, "{last:?}");
        assert!(rec.final_residual < 1e-6);
        // the exact limit point is a boundary steady state whose zero set
        // passes the siphon check
        let mut limit = last.clone();
        limit[s0] = 0.0;
        limit[es0] = 0.0;
        assert!(steady_state_residual(&sys, &limit) == 0.0);
        let z = zero_coordinate_set(&limit, 0.0);
        assert_eq!(z.len(), 2);
        assert!(zero_set_siphon_check(&sys, &limit, 1e-9).unwrap());
    }

    #[test]
    fn random_positive_state_is_not_steady() {
        let net: ReactionNetwork = "E + S0 <-> ES0; ES0 -> E + S1; F + S1 <-> FS1; FS1 -> F + S0"
            .parse()
            .unwrap();
        let m = net.n_reactions();
        let sys = MassActionSystem::new(net, vec![rat(1); m], vec![0.7, 1.3, 0.2, 0.9, 1.1, 0.4])
            .unwrap();
        assert!(steady_state_residual(&sys, &[0.7, 1.3, 0.2, 0.9, 1.1, 0.4]) > 1e-6);
    }

    #[test]
    fn conservation_drift_is_tiny() {
        let net: ReactionNetwork = "E + S0 <-> ES0; ES0 -> E + S1; F + S1 <-> FS1; FS1 -> F + S0"
            .parse()
            .unwrap();
        let m = net.n_reactions();
        let omega: Vec<f64> = net
            .species_names()
            .iter()
            .map(|n| {
                if n.starts_with("ES") || n.starts_with("FS") {
                    2.0
                } else {
                    1.0
                }
            })
            .collect();
        let sys = MassActionSystem::new(net, vec![rat(1); m], vec![1.0, 1.0, 0.5, 0.5, 0.25, 0.25])
            .unwrap();
        let rec = integrate(&sys, 10.0, StepControl::default()).unwrap();
        let dot = |s: &[f64]| -> f64 { s.iter().zip(&omega).map(|(a, b)| a * b).sum() };
        let start = dot(&sys.initial);
        let max_drift = rec
            .states
            .iter()
            .map(|s| (dot(s) - start).abs() / start)
            .fold(0.0_f64, f64::max);
        assert!(max_drift < 1e-6, "drift {max_drift}");
    }
}
