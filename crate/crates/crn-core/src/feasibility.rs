//! Exact linear feasibility over the rationals, and the structural queries
//! built on it: conservativity, consistency, semiflow support, and signed
//! drain/replicate combinations. Every positive answer carries a witness
//! vector that replays against the stoichiometric matrix with zero residual.

use std::collections::BTreeSet;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{is_nonnegative, rat, scale_to_integers, Rational, RationalMatrix};

/// Tags which index set a vector lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexKind {
    Species,
    Reactions,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalVector {
    pub kind: IndexKind,
    pub entries: Vec<Rational>,
}

impl RationalVector {
    pub fn support(&self) -> BTreeSet<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_positive())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.entries.iter().all(|r| r.is_positive())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    PSemiflow,
    TSemiflow,
    DrainWitness,
    ReplicateWitness,
    SupportedSemiflow,
}

/// A replayable certificate. `replay` re-checks the defining constraints
/// exactly; drain/replicate witnesses additionally need the target set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub vector: RationalVector,
}

impl Witness {
    pub fn replay(&self, n: &RationalMatrix, sigma: Option<&BTreeSet<usize>>) -> bool {
        let v = &self.vector.entries;
        match self.kind {
            WitnessKind::PSemiflow => {
                self.vector.kind == IndexKind::Species
                    && v.len() == n.rows()
                    && self.vector.is_strictly_positive()
                    && n.left_mul(v).iter().all(|r| r.is_zero())
            }
            WitnessKind::TSemiflow => {
                self.vector.kind == IndexKind::Reactions
                    && v.len() == n.cols()
                    && self.vector.is_strictly_positive()
                    && n.mul_vec(v).iter().all(|r| r.is_zero())
            }
            WitnessKind::SupportedSemiflow => {
                let supported = match sigma {
                    Some(s) => self.vector.support().is_subset(s),
                    None => true,
                };
                self.vector.kind == IndexKind::Species
                    && v.len() == n.rows()
                    && is_nonnegative(v)
                    && !v.iter().all(|r| r.is_zero())
                    && supported
                    && n.left_mul(v).iter().all(|r| r.is_zero())
            }
            WitnessKind::DrainWitness | WitnessKind::ReplicateWitness => {
                let Some(sigma) = sigma else { return false };
                if self.vector.kind != IndexKind::Reactions
                    || v.len() != n.cols()
                    || !is_nonnegative(v)
                    || !v.iter().all(|r| r.denom().is_one())
                {
                    return false;
                }
                let change = n.mul_vec(v);
                sigma.iter().all(|&i| match self.kind {
                    WitnessKind::DrainWitness => change[i] <= rat(-1),
                    _ => change[i] >= rat(1),
                })
            }
        }
    }
}

/// `A_eq x = b_eq`, `A_ge x >= b_ge`, `x >= 0`.
#[derive(Clone, Debug, Default)]
pub struct FeasibilityProblem {
    n_vars: usize,
    eq: Vec<(Vec<Rational>, Rational)>,
    ge: Vec<(Vec<Rational>, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible,
}

impl FeasibilityProblem {
    pub fn new(n_vars: usize) -> Self {
        FeasibilityProblem {
            n_vars,
            eq: Vec::new(),
            ge: Vec::new(),
        }
    }

    pub fn add_eq(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> Result<()> {
        if coeffs.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: coeffs.len(),
            });
        }
        self.eq.push((coeffs, rhs));
        Ok(())
    }

    pub fn add_ge(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> Result<()> {
        if coeffs.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: coeffs.len(),
            });
        }
        self.ge.push((coeffs, rhs));
        Ok(())
    }

    /// Phase-one simplex with Bland's anti-cycling rule, entirely over exact
    /// rationals. Returns a point satisfying all constraints, or `Infeasible`
    /// exactly when no rational solution exists.
    pub fn solve(&self) -> Feasibility {
        let m = self.eq.len() + self.ge.len();
        let n_slack = self.ge.len();
        let n_struct = self.n_vars + n_slack;
        let n_total = n_struct + m;

        if m == 0 {
            return Feasibility::Feasible(vec![Rational::zero(); self.n_vars]);
        }

        // rows: equalities, then inequalities with subtracted slack
        let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
        let mut rhs: Vec<Rational> = Vec::with_capacity(m);
        for (coeffs, b) in &self.eq {
            let mut row = vec![Rational::zero(); n_total];
            row[..self.n_vars].clone_from_slice(coeffs);
            tab.push(row);
            rhs.push(b.clone());
        }
        for (k, (coeffs, b)) in self.ge.iter().enumerate() {
            let mut row = vec![Rational::zero(); n_total];
            row[..self.n_vars].clone_from_slice(coeffs);
            row[self.n_vars + k] = -Rational::one();
            tab.push(row);
            rhs.push(b.clone());
        }
        // normalize to rhs >= 0, then install artificial basis
        for i in 0..m {
            if rhs[i].is_negative() {
                for c in tab[i].iter_mut() {
                    *c = -c.clone();
                }
                rhs[i] = -rhs[i].clone();
            }
            tab[i][n_struct + i] = Rational::one();
        }
        let mut basis: Vec<usize> = (0..m).map(|i| n_struct + i).collect();

        // phase-one objective row: w[j] > 0 marks a column that lowers the
        // artificial total; w_value is the current artificial total
        let mut w: Vec<Rational> = (0..n_total)
            .map(|j| {
                if j >= n_struct {
                    Rational::zero()
                } else {
                    (0..m).fold(Rational::zero(), |acc, i| acc + &tab[i][j])
                }
            })
            .collect();
        let mut w_value: Rational = rhs.iter().cloned().sum();

        loop {
            // Bland: smallest structural index with positive reduced gain
            let Some(enter) = (0..n_struct).find(|&j| w[j].is_positive()) else {
                break;
            };
            let mut leave: Option<usize> = None;
            let mut best: Option<Rational> = None;
            for i in 0..m {
                if tab[i][enter].is_positive() {
                    let ratio = &rhs[i] / &tab[i][enter];
                    let better = match &best {
                        None => true,
                        Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
                    };
                    if better {
                        best = Some(ratio);
                        leave = Some(i);
                    }
                }
            }
            let Some(p) = leave else {
                // the artificial total is bounded below by zero, so a
                // positive-gain column always admits a blocking row
                unreachable!("phase-one column without blocking row");
            };
            // pivot at (p, enter)
            let pivot = tab[p][enter].clone();
            for c in tab[p].iter_mut() {
                *c = &*c / &pivot;
            }
            rhs[p] = &rhs[p] / &pivot;
            for i in 0..m {
                if i != p && !tab[i][enter].is_zero() {
                    let factor = tab[i][enter].clone();
                    for j in 0..n_total {
                        let sub = &factor * &tab[p][j];
                        tab[i][j] = &tab[i][j] - sub;
                    }
                    let sub = &factor * &rhs[p];
                    rhs[i] = &rhs[i] - sub;
                }
            }
            if !w[enter].is_zero() {
                let factor = w[enter].clone();
                for j in 0..n_total {
                    let sub = &factor * &tab[p][j];
                    w[j] = &w[j] - sub;
                }
                let sub = &factor * &rhs[p];
                w_value = &w_value - sub;
            }
            basis[p] = enter;
        }

        if !w_value.is_zero() {
            return Feasibility::Infeasible;
        }
        let mut x = vec![Rational::zero(); self.n_vars];
        for (i, &b) in basis.iter().enumerate() {
            if b < self.n_vars {
                x[b] = rhs[i].clone();
            }
        }
        Feasibility::Feasible(x)
    }
}

/// Strictly positive left-kernel vector of `N` (a conservation law), scale
/// normalized to entries >= 1. `None` exactly when the network is not
/// conservative. The 0x0 matrix is vacuously conservative.
pub fn positive_left_kernel(n: &RationalMatrix) -> Option<Witness> {
    if n.rows() == 0 {
        return Some(Witness {
            kind: WitnessKind::PSemiflow,
            vector: RationalVector {
                kind: IndexKind::Species,
                entries: Vec::new(),
            },
        });
    }
    let mut p = FeasibilityProblem::new(n.rows());
    for j in 0..n.cols() {
        p.add_eq(n.column(j), Rational::zero()).unwrap();
    }
    for i in 0..n.rows() {
        let mut row = vec![Rational::zero(); n.rows()];
        row[i] = Rational::one();
        p.add_ge(row, Rational::one()).unwrap();
    }
    match p.solve() {
        Feasibility::Feasible(omega) => Some(Witness {
            kind: WitnessKind::PSemiflow,
            vector: RationalVector {
                kind: IndexKind::Species,
                entries: omega,
            },
        }),
        Feasibility::Infeasible => None,
    }
}

/// Strictly positive kernel vector of `N` (a T-semiflow), normalized to
/// entries >= 1. `None` exactly when the network is not consistent.
pub fn positive_kernel(n: &RationalMatrix) -> Option<Witness> {
    if n.cols() == 0 {
        return Some(Witness {
            kind: WitnessKind::TSemiflow,
            vector: RationalVector {
                kind: IndexKind::Reactions,
                entries: Vec::new(),
            },
        });
    }
    let mut p = FeasibilityProblem::new(n.cols());
    for i in 0..n.rows() {
        p.add_eq(n.row(i).to_vec(), Rational::zero()).unwrap();
    }
    for j in 0..n.cols() {
        let mut row = vec![Rational::zero(); n.cols()];
        row[j] = Rational::one();
        p.add_ge(row, Rational::one()).unwrap();
    }
    match p.solve() {
        Feasibility::Feasible(v) => Some(Witness {
            kind: WitnessKind::TSemiflow,
            vector: RationalVector {
                kind: IndexKind::Reactions,
                entries: v,
            },
        }),
        Feasibility::Infeasible => None,
    }
}

/// Nonnegative left-kernel vector supported inside `sigma`, normalized to
/// total mass one. `None` exactly when `sigma` is critical.
pub fn semiflow_supported_in(
    n: &RationalMatrix,
    sigma: &BTreeSet<usize>,
) -> Result<Option<Witness>> {
    if sigma.is_empty() {
        return Err(Error::EmptySet);
    }
    let vars: Vec<usize> = sigma.iter().copied().collect();
    for &i in &vars {
        if i >= n.rows() {
            return Err(Error::UnknownSpecies(format!("#{i}")));
        }
    }
    let mut p = FeasibilityProblem::new(vars.len());
    for j in 0..n.cols() {
        let coeffs: Vec<Rational> = vars.iter().map(|&i| n.get(i, j).clone()).collect();
        p.add_eq(coeffs, Rational::zero())?;
    }
    p.add_eq(vec![Rational::one(); vars.len()], Rational::one())?;
    match p.solve() {
        Feasibility::Feasible(x) => {
            let mut full = vec![Rational::zero(); n.rows()];
            for (k, &i) in vars.iter().enumerate() {
                full[i] = x[k].clone();
            }
            Ok(Some(Witness {
                kind: WitnessKind::SupportedSemiflow,
                vector: RationalVector {
                    kind: IndexKind::Species,
                    entries: full,
                },
            }))
        }
        Feasibility::Infeasible => Ok(None),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignKind {
    Negative,
    Positive,
}

/// Nonnegative integer reaction multiset whose net effect is <= -1 (Negative)
/// or >= +1 (Positive) on every coordinate of `sigma`. Solved as a rational
/// feasibility problem and scaled to integers; valid since the constraint
/// cone is invariant under scaling by integers >= 1.
pub fn signed_combination(
    n: &RationalMatrix,
    sigma: &BTreeSet<usize>,
    sign: SignKind,
) -> Result<Option<Witness>> {
    if sigma.is_empty() {
        return Err(Error::EmptySet);
    }
    for &i in sigma {
        if i >= n.rows() {
            return Err(Error::UnknownSpecies(format!("#{i}")));
        }
    }
    let mut p = FeasibilityProblem::new(n.cols());
    for &i in sigma {
        let row: Vec<Rational> = (0..n.cols())
            .map(|j| match sign {
                SignKind::Negative => -n.get(i, j).clone(),
                SignKind::Positive => n.get(i, j).clone(),
            })
            .collect();
        p.add_ge(row, Rational::one())?;
    }
    match p.solve() {
        Feasibility::Feasible(v) => Ok(Some(Witness {
            kind: match sign {
                SignKind::Negative => WitnessKind::DrainWitness,
                SignKind::Positive => WitnessKind::ReplicateWitness,
            },
            vector: RationalVector {
                kind: IndexKind::Reactions,
                entries: scale_to_integers(&v),
            },
        })),
        Feasibility::Infeasible => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ReactionNetwork;
    use crate::rational::frac;

    fn net(src: &str) -> ReactionNetwork {
        src.parse().unwrap()
    }

    #[test]
    fn contradictory_bounds_infeasible() {
        // x >= 1 and -x >= 0
        let mut p = FeasibilityProblem::new(1);
        p.add_ge(vec![rat(1)], rat(1)).unwrap();
        p.add_ge(vec![rat(-1)], rat(0)).unwrap();
        assert_eq!(p.solve(), Feasibility::Infeasible);
    }

    #[test]
    fn segment_feasible() {
        let mut p = FeasibilityProblem::new(2);
        p.add_eq(vec![rat(1), rat(1)], rat(1)).unwrap();
        match p.solve() {
            Feasibility::Feasible(x) => {
                assert_eq!(&x[0] + &x[1], rat(1));
                assert!(is_nonnegative(&x));
            }
            Feasibility::Infeasible => panic!("should be feasible"),
        }
    }

    #[test]
    fn dimension_mismatch_reported() {
        let mut p = FeasibilityProblem::new(2);
        assert!(matches!(
            p.add_eq(vec![rat(1)], rat(0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn catalytic_inflow_network_is_not_consistent() {
        let g = net("A + E -> B + E; B + E -> A + E; 0 -> E");
        let n = g.stoichiometric_matrix();
        assert!(positive_kernel(&n).is_none());
    }

    #[test]
    fn reversible_pair_consistent() {
        let g = net("A <-> B");
        let n = g.stoichiometric_matrix();
        let w = positive_kernel(&n).expect("consistent");
        assert!(w.replay(&n, None));
    }

    #[test]
    fn wnt_core_consistent() {
        let g = net("0 <-> X; X <-> X_n; X_n -> 0");
        let n = g.stoichiometric_matrix();
        let w = positive_kernel(&n).expect("consistent");
        assert_eq!(w.vector.entries.len(), 5);
        assert!(w.replay(&n, None));
    }

    #[test]
    fn lotka_volterra_not_conservative() {
        let g = net("N -> 2N; N + P -> P; N + P -> N + 2P; P -> 0");
        assert!(positive_left_kernel(&g.stoichiometric_matrix()).is_none());
    }

    #[test]
    fn phosphorylation_conservative() {
        let g = net("E + S0 <-> ES0; ES0 -> E + S1; F + S1 <-> FS1; FS1 -> F + S0");
        let n = g.stoichiometric_matrix();
        let w = positive_left_kernel(&n).expect("conservative");
        assert!(w.replay(&n, None));
    }

    #[test]
    fn empty_network_vacuous_answers() {
        let g = net("");
        let n = g.stoichiometric_matrix();
        assert!(positive_left_kernel(&n).is_some());
        assert!(positive_kernel(&n).is_some());
    }

    #[test]
    fn semiflow_support_on_enzyme_pair() {
        let g = net("E + S0 <-> ES0; ES0 -> E + S1; F + S1 <-> FS1; FS1 -> F + S0");
        let n = g.stoichiometric_matrix();
        let sigma: BTreeSet<usize> = [
            g.species_index("E").unwrap(),
            g.species_index("ES0").unwrap(),
        ]
        .into_iter()
        .collect();
        let w = semiflow_supported_in(&n, &sigma)
            .unwrap()
            .expect("noncritical");
        assert!(w.replay(&n, Some(&sigma)));
        let total: Rational = w.vector.entries.iter().cloned().sum();
        assert_eq!(total, rat(1));
        // uniform on the pair
        assert_eq!(w.vector.entries[g.species_index("E").unwrap()], frac(1, 2));
    }

    #[test]
    fn prey_singleton_critical() {
        let g = net("N -> 2N; N + P -> P; N + P -> N + 2P; P -> 0");
        let n = g.stoichiometric_matrix();
        let sigma: BTreeSet<usize> = [g.species_index("N").unwrap()].into_iter().collect();
        assert!(semiflow_supported_in(&n, &sigma).unwrap().is_none());
    }

    #[test]
    fn whole_species_set_carries_conservation_law() {
        let g = net("E + S0 <-> ES0; ES0 -> E + S1; F + S1 <-> FS1; FS1 -> F + S0");
        let n = g.stoichiometric_matrix();
        let sigma: BTreeSet<usize> = (0..g.n_species()).collect();
        assert!(semiflow_supported_in(&n, &sigma).unwrap().is_some());
    }

    #[test]
    fn empty_sigma_rejected() {
        let g = net("A <-> B");
        let n = g.stoichiometric_matrix();
        assert_eq!(
            semiflow_supported_in(&n, &BTreeSet::new()).unwrap_err(),
            Error::EmptySet
        );
        assert_eq!(
            signed_combination(&n, &BTreeSet::new(), SignKind::Negative).unwrap_err(),
            Error::EmptySet
        );
    }

    #[test]
    fn prey_drainable_by_predation() {
        let g = net("N -> 2N; N + P -> P; N + P -> N + 2P; P -> 0");
        let n = g.stoichiometric_matrix();
        let sigma: BTreeSet<usize> = [g.species_index("N").unwrap()].into_iter().collect();
        let w = signed_combination(&n, &sigma, SignKind::Negative)
            .unwrap()
            .expect("drainable");
        assert!(w.replay(&n, Some(&sigma)));
    }

    #[test]
    fn autocatalysis_replicable_not_drainable() {
        let g = net("S -> 2S");
        let n = g.stoichiometric_matrix();
        let sigma: BTreeSet<usize> = [0].into_iter().collect();
        assert!(signed_combination(&n, &sigma, SignKind::Negative)
            .unwrap()
            .is_none());
        let w = signed_combination(&n, &sigma, SignKind::Positive)
            .unwrap()
            .expect("self-replicable");
        assert!(w.replay(&n, Some(&sigma)));
    }

    #[test]
    fn scale_soundness_of_positivity_normalization() {
        // v >= 1 is feasible iff v >= 2 is: the cone is scale-invariant
        for src in ["A <-> B", "0 <-> X; X <-> X_n; X_n -> 0", "A -> B"] {
            let n = net(src).stoichiometric_matrix();
            let via_one = positive_kernel(&n).is_some();
            let mut p = FeasibilityProblem::new(n.cols());
            for i in 0..n.rows() {
                p.add_eq(n.row(i).to_vec(), Rational::zero()).unwrap();
            }
            for j in 0..n.cols() {
                let mut row = vec![Rational::zero(); n.cols()];
                row[j] = Rational::one();
                p.add_ge(row, rat(2)).unwrap();
            }
            let via_two = matches!(p.solve(), Feasibility::Feasible(_));
            assert_eq!(via_one, via_two, "network {src}");
        }
    }
}
