//! The online mistake-bound game between a learner and Nature.

use serde::{Deserialize, Serialize};

use crate::concept::ConceptClass;
use crate::error::{Error, Result};

use super::littlestone::LsSolver;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameStep {
    pub element: usize,
    pub prediction: bool,
    pub correct: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub steps: Vec<GameStep>,
    pub mistakes: usize,
}

impl GameTranscript {
    fn push(&mut self, step: GameStep) {
        if step.prediction != step.correct {
            self.mistakes += 1;
        }
        self.steps.push(step);
    }
}

/// Who reveals the labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Opponent {
    /// A fixed target concept. Elements are presented in `order`, or in
    /// position order when `None`.
    Target {
        concept: usize,
        order: Option<Vec<usize>>,
    },
    /// Nature walks a maximum-depth mistake tree and always answers the
    /// opposite of the prediction.
    OptimalAdversary,
    /// A scripted sequence of labelled elements, not necessarily consistent
    /// with any concept.
    Sequence(Vec<(usize, bool)>),
}

pub trait Learner {
    /// Predicts the label of `x` given the indices of the concepts still
    /// consistent with every revealed label.
    fn predict(&mut self, class: &ConceptClass, version_space: &[usize], x: usize) -> Result<bool>;
}

/// Standard optimal algorithm: predict the label whose restriction of the
/// version space has the larger Littlestone's dimension, `1` on ties.
pub struct Soa {
    solver: LsSolver,
}

impl Soa {
    pub fn new(class: &ConceptClass) -> Self {
        Soa {
            solver: LsSolver::new(class),
        }
    }
}

impl Learner for Soa {
    fn predict(&mut self, class: &ConceptClass, version_space: &[usize], x: usize) -> Result<bool> {
        class.universe().check(x)?;
        if version_space.is_empty() {
            return Err(Error::Protocol(
                "empty version space: target inconsistent with class".into(),
            ));
        }
        let live = self.solver.live_from_indices(version_space);
        let (without, with) = self.solver.split(&live, x);
        let ls0 = self.solver.dimension(&without);
        let ls1 = self.solver.dimension(&with);
        Ok(ls1 >= ls0)
    }
}

/// One SOA prediction on a standalone version space.
pub fn soa_predict(version_space: &ConceptClass, x: usize) -> Result<bool> {
    let all: Vec<usize> = (0..version_space.len()).collect();
    Soa::new(version_space).predict(version_space, &all, x)
}

/// Plays the game with the SOA learner.
pub fn run_online_game(
    class: &ConceptClass,
    opponent: &Opponent,
    max_steps: usize,
) -> Result<GameTranscript> {
    let mut learner = Soa::new(class);
    run_online_game_with(class, opponent, &mut learner, max_steps)
}

pub fn run_online_game_with<L: Learner + ?Sized>(
    class: &ConceptClass,
    opponent: &Opponent,
    learner: &mut L,
    max_steps: usize,
) -> Result<GameTranscript> {
    let mut version_space: Vec<usize> = (0..class.len()).collect();
    let mut transcript = GameTranscript::default();
    let reveal = |version_space: &mut Vec<usize>, x: usize, label: bool| -> Result<()> {
        version_space.retain(|&c| class.contains(c, x) == label);
        if version_space.is_empty() {
            return Err(Error::Protocol(format!(
                "label {} for element {x} leaves no consistent concept",
                label as u8
            )));
        }
        Ok(())
    };

    match opponent {
        Opponent::Target { concept, order } => {
            if *concept >= class.len() {
                return Err(Error::Input(format!(
                    "target concept {concept} not in class of size {}",
                    class.len()
                )));
            }
            let order = match order {
                Some(order) => {
                    class.check_distinct(order)?;
                    order.clone()
                }
                None => (0..class.n_elements()).collect(),
            };
            for &x in order.iter().take(max_steps) {
                let prediction = learner.predict(class, &version_space, x)?;
                let correct = class.contains(*concept, x);
                transcript.push(GameStep {
                    element: x,
                    prediction,
                    correct,
                });
                reveal(&mut version_space, x, correct)?;
            }
        }
        Opponent::OptimalAdversary => {
            if class.is_empty() {
                return Err(Error::Protocol(
                    "no concept available to the adversary".into(),
                ));
            }
            let mut solver = LsSolver::new(class);
            let all = solver.all();
            let depth = solver.dimension(&all).expect("nonempty");
            let tree = solver.tree(&all, depth);
            let mut path = Vec::with_capacity(depth);
            while path.len() < depth.min(max_steps) {
                let x = tree.element(&path);
                let prediction = learner.predict(class, &version_space, x)?;
                let correct = !prediction;
                transcript.push(GameStep {
                    element: x,
                    prediction,
                    correct,
                });
                reveal(&mut version_space, x, correct)?;
                path.push(correct);
            }
        }
        Opponent::Sequence(steps) => {
            for &(x, correct) in steps.iter().take(max_steps) {
                class.universe().check(x)?;
                let prediction = learner.predict(class, &version_space, x)?;
                transcript.push(GameStep {
                    element: x,
                    prediction,
                    correct,
                });
                reveal(&mut version_space, x, correct)?;
            }
        }
    }
    Ok(transcript)
}
