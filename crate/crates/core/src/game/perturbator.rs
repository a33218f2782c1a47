use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ContMove, PlayState};
use crate::model::{int, Rational, TimedAutomaton};

/// Chooses the actual delay of a non-punctual move.
pub trait Perturbator {
    fn perturb(&mut self, a: &TimedAutomaton, delta: &Rational, state: &PlayState, mv: &ContMove) -> Rational;

    fn name(&self) -> String;
}

/// `ε = δ / (2(|X| + 1))`, the time progress [`SigmaP`] forces per move.
pub fn epsilon(delta: &Rational, clocks: usize) -> Rational {
    delta / int(2 * (clocks as i64 + 1))
}

/// Always pushes late: splits `(0, δ)` at the points where a clock of
/// `ν + d` crosses an integer, takes the latest piece of length at least
/// `δ/(|X| + 1)` and lands in its middle.
#[derive(Clone, Debug, Default)]
pub struct SigmaP;

impl SigmaP {
    pub fn offset(delta: &Rational, state: &PlayState, mv: &ContMove) -> Rational {
        let v = state.valuation.shift(&mv.delay);
        let mut cuts = vec![Rational::zero(), delta.clone()];
        for x in &v.0 {
            let mut t = x.ceil() - x;
            if t.is_zero() {
                t += int(1);
            }
            while t < *delta {
                cuts.push(t.clone());
                t += int(1);
            }
        }
        cuts.sort();
        cuts.dedup();
        let min = delta / int(v.len() as i64 + 1);
        cuts.windows(2)
            .rev()
            .find(|w| &w[1] - &w[0] >= min)
            .map(|w| (&w[0] + &w[1]) / int(2))
            .expect("some piece is long enough")
    }
}

impl Perturbator for SigmaP {
    fn perturb(&mut self, _a: &TimedAutomaton, delta: &Rational, state: &PlayState, mv: &ContMove) -> Rational {
        &mv.delay + SigmaP::offset(delta, state, mv)
    }

    fn name(&self) -> String {
        "sigma-p".to_string()
    }
}

/// Uniform over the grid `d + δ·k/1000`, `k ∈ [−1000, 1000]`.
#[derive(Clone, Debug)]
pub struct RandomPerturbator {
    rng: ChaCha8Rng,
}

impl RandomPerturbator {
    pub fn new(seed: u64) -> Self {
        RandomPerturbator { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Perturbator for RandomPerturbator {
    fn perturb(&mut self, _a: &TimedAutomaton, delta: &Rational, _state: &PlayState, mv: &ContMove) -> Rational {
        let k: i64 = self.rng.gen_range(-1000..=1000);
        &mv.delay + delta * Rational::new(k.into(), 1000.into())
    }

    fn name(&self) -> String {
        "random".to_string()
    }
}
