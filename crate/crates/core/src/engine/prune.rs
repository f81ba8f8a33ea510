//! Beam side-conditions over items grouped by dimension activity and
//! total width.

use std::collections::HashMap;

use crate::logic::{Term, TermId};

/// Keep a candidate only if its value is at least `theta` times the best
/// stored value of its signature class, and (with `width`) among the top
/// `width` values of that class.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Beam {
    pub theta: Option<f64>,
    pub width: Option<usize>,
}

impl Beam {
    pub fn threshold(theta: f64) -> Self {
        Beam {
            theta: Some(theta),
            width: None,
        }
    }

    pub fn top(width: usize) -> Self {
        Beam {
            theta: None,
            width: Some(width),
        }
    }

    pub fn is_off(&self) -> bool {
        self.theta.is_none() && self.width.is_none()
    }
}

type Signature = (bool, Vec<bool>, u32);

fn signature(term: &Term) -> Option<Signature> {
    match term {
        Term::Item(it) | Term::RevItem(it) => Some((
            term.is_reverse(),
            it.labels.iter().map(|l| l.is_active()).collect(),
            it.width(),
        )),
        _ => None,
    }
}

#[derive(Debug, Default)]
pub(crate) struct BeamState {
    classes: HashMap<Signature, HashMap<TermId, f64>>,
}

impl BeamState {
    pub fn admits(&self, beam: &Beam, consequent: TermId, term: &Term, score: f64) -> bool {
        let Some(sig) = signature(term) else {
            return true;
        };
        let Some(class) = self.classes.get(&sig) else {
            return true;
        };
        if let Some(theta) = beam.theta {
            let best = class.values().copied().fold(0.0, f64::max);
            if score < theta * best {
                return false;
            }
        }
        if let Some(width) = beam.width {
            let mut others: Vec<f64> = class
                .iter()
                .filter(|(id, _)| **id != consequent)
                .map(|(_, s)| *s)
                .collect();
            if others.len() >= width {
                others.sort_by(|a, b| b.total_cmp(a));
                if score < others[width - 1] {
                    return false;
                }
            }
        }
        true
    }

    pub fn record(&mut self, id: TermId, term: &Term, score: f64) {
        if let Some(sig) = signature(term) {
            self.classes.entry(sig).or_default().insert(id, score);
        }
    }
}
