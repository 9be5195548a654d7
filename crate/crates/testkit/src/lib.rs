//! Brute-force reference computations over plain vectors, written without
//! the engine's types so they can check it independently.
//!
//! Variables are `0..n`; a table over variables `vars` (ascending) lists
//! entries in lexicographic order with the last variable varying fastest.

use std::collections::BTreeSet;

/// The configuration space of variables `0..cards.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    pub cards: Vec<usize>,
}

impl Space {
    pub fn new(cards: Vec<usize>) -> Self {
        Self { cards }
    }

    pub fn binary(n: usize) -> Self {
        Self { cards: vec![2; n] }
    }

    pub fn size(&self) -> usize {
        self.cards.iter().product()
    }

    /// Every full configuration in lexicographic order.
    pub fn configs(&self) -> Vec<Vec<usize>> {
        configs_of(&self.cards)
    }

    /// Position in a table over `vars` of the restriction of `full`.
    pub fn index_in(&self, vars: &[usize], full: &[usize]) -> usize {
        vars.iter().fold(0, |acc, &v| acc * self.cards[v] + full[v])
    }

    pub fn cards_of(&self, vars: &[usize]) -> Vec<usize> {
        vars.iter().map(|&v| self.cards[v]).collect()
    }
}

/// All tuples over `cards`, last position fastest.
pub fn configs_of(cards: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &c in cards {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..c).map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

/// Product of all factors at every full configuration.
pub fn joint_product(space: &Space, factors: &[(Vec<usize>, Vec<f64>)]) -> Vec<f64> {
    space
        .configs()
        .iter()
        .map(|x| {
            factors
                .iter()
                .map(|(vars, values)| values[space.index_in(vars, x)])
                .product()
        })
        .collect()
}

/// Sums the joint onto `vars`.
pub fn marginal(space: &Space, joint: &[f64], vars: &[usize]) -> Vec<f64> {
    marginal_with(space, joint, vars, 0.0, |a, b| a + b)
}

/// Folds the joint onto `vars` with `op`.
pub fn marginal_with(space: &Space, joint: &[f64], vars: &[usize], init: f64, op: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let len: usize = space.cards_of(vars).iter().product();
    let mut out = vec![init; len];
    for (x, &value) in space.configs().iter().zip(joint) {
        let i = space.index_in(vars, x);
        out[i] = op(out[i], value);
    }
    out
}

/// Sum of the joint over configurations satisfying `pred`.
pub fn weighted_sum(space: &Space, joint: &[f64], pred: impl Fn(&[usize]) -> bool) -> f64 {
    space
        .configs()
        .iter()
        .zip(joint)
        .filter(|(x, _)| pred(x))
        .map(|(_, v)| v)
        .sum()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "tables differ in length");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Dempster–Shafer mass functions as explicit lists of focal sets.
pub mod belief {
    use super::*;

    /// A set of configurations of some variable list.
    pub type Focal = BTreeSet<Vec<usize>>;

    #[derive(Debug, Clone, PartialEq)]
    pub struct Mass {
        pub vars: Vec<usize>,
        pub focal: Vec<(Focal, f64)>,
    }

    impl Mass {
        /// From bitmask-encoded focal sets: bit `i` stands for the `i`-th
        /// configuration of `vars`.
        pub fn from_masks(space: &Space, vars: &[usize], masks: &[(usize, f64)]) -> Self {
            let configs = configs_of(&space.cards_of(vars));
            let focal = masks
                .iter()
                .map(|&(mask, m)| {
                    let set = configs
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, c)| c.clone())
                        .collect();
                    (set, m)
                })
                .collect();
            Self {
                vars: vars.to_vec(),
                focal,
            }
        }

        /// Cylinder extension to all variables of `space`.
        pub fn extend(&self, space: &Space) -> Mass {
            let all: Vec<usize> = (0..space.cards.len()).collect();
            let configs = space.configs();
            let focal = self
                .focal
                .iter()
                .map(|(set, m)| {
                    let ext = configs
                        .iter()
                        .filter(|x| set.contains(&self.vars.iter().map(|&v| x[v]).collect::<Vec<_>>()))
                        .cloned()
                        .collect();
                    (ext, *m)
                })
                .collect();
            Mass { vars: all, focal }
        }

        /// Unnormalized Dempster combination of two masses on the same
        /// variables; mass landing on the empty set is kept.
        pub fn combine(&self, other: &Mass) -> Mass {
            assert_eq!(self.vars, other.vars);
            let mut focal: Vec<(Focal, f64)> = Vec::new();
            for (a, ma) in &self.focal {
                for (b, mb) in &other.focal {
                    let c: Focal = a.intersection(b).cloned().collect();
                    match focal.iter_mut().find(|(s, _)| *s == c) {
                        Some(entry) => entry.1 += ma * mb,
                        None => focal.push((c, ma * mb)),
                    }
                }
            }
            Mass {
                vars: self.vars.clone(),
                focal,
            }
        }

        /// Projection of every focal set onto `vars` (a sublist of
        /// `self.vars`).
        pub fn project(&self, vars: &[usize]) -> Mass {
            let pos: Vec<usize> = vars
                .iter()
                .map(|v| self.vars.iter().position(|w| w == v).expect("projection onto a subset"))
                .collect();
            let focal = self
                .focal
                .iter()
                .map(|(set, m)| (set.iter().map(|x| pos.iter().map(|&p| x[p]).collect()).collect(), *m))
                .collect();
            Mass {
                vars: vars.to_vec(),
                focal,
            }
        }

        /// Commonality of every non-empty subset, indexed by bitmask − 1.
        pub fn commonality(&self, space: &Space) -> Vec<f64> {
            let configs = configs_of(&space.cards_of(&self.vars));
            (1usize..1 << configs.len())
                .map(|mask| {
                    let a: Focal = configs
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, c)| c.clone())
                        .collect();
                    self.focal.iter().filter(|(b, _)| a.is_subset(b)).map(|(_, m)| m).sum()
                })
                .collect()
        }
    }

    /// Combination of all masses after extension to the whole space.
    pub fn joint(space: &Space, masses: &[Mass]) -> Mass {
        let all: Vec<usize> = (0..space.cards.len()).collect();
        let vacuous = Mass {
            vars: all,
            focal: vec![(space.configs().into_iter().collect(), 1.0)],
        };
        masses.iter().fold(vacuous, |acc, m| acc.combine(&m.extend(space)))
    }
}
