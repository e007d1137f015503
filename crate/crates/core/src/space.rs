//! Finite Kolmogorov probability spaces with named events.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `(Ω, 2^Ω, μ)` with point masses and named events `X ⊆ Ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KolmogorovSpace {
    points: Vec<String>,
    masses: Vec<Rational>,
    /// Membership flags per point.
    events: BTreeMap<String, Vec<bool>>,
}

impl KolmogorovSpace {
    /// `events` maps a name to the indices of its points.
    pub fn new(
        points: Vec<String>,
        masses: Vec<Rational>,
        events: BTreeMap<String, Vec<usize>>,
    ) -> Result<Self> {
        if points.len() != masses.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} points but {} masses",
                points.len(),
                masses.len()
            )));
        }
        let mut ids = HashSet::new();
        if let Some(dup) = points.iter().find(|p| !ids.insert(p.as_str())) {
            return Err(Error::InvalidDistribution(format!("duplicate point `{dup}`")));
        }
        if let Some(m) = masses.iter().find(|m| m.is_negative()) {
            return Err(Error::InvalidDistribution(format!("negative mass {m}")));
        }
        let total: Rational = masses.iter().cloned().sum();
        if total != Rational::one() {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}, not 1")));
        }
        let mut flags = BTreeMap::new();
        for (name, members) in events {
            let mut f = vec![false; points.len()];
            for k in members {
                *f.get_mut(k).ok_or_else(|| {
                    Error::InvalidDistribution(format!("event `{name}` refers to missing point {k}"))
                })? = true;
            }
            flags.insert(name, f);
        }
        Ok(Self {
            points,
            masses,
            events: flags,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    pub fn event_names(&self) -> impl Iterator<Item = &str> {
        self.events.keys().map(String::as_str)
    }

    /// Indices of the points in event `name`.
    pub fn event(&self, name: &str) -> Result<Vec<usize>> {
        let f = self
            .events
            .get(name)
            .ok_or_else(|| Error::UnknownEvent(name.to_string()))?;
        Ok(f.iter().enumerate().filter(|(_, b)| **b).map(|(k, _)| k).collect())
    }

    pub fn contains(&self, name: &str, point: usize) -> Result<bool> {
        self.events
            .get(name)
            .map(|f| f[point])
            .ok_or_else(|| Error::UnknownEvent(name.to_string()))
    }

    pub fn mass_of(&self, point_id: &str) -> Option<&Rational> {
        self.points.iter().position(|p| p == point_id).map(|k| &self.masses[k])
    }

    /// Events containing point `k`.
    pub fn events_of(&self, k: usize) -> Vec<&str> {
        self.events
            .iter()
            .filter(|(_, f)| f[k])
            .map(|(n, _)| n.as_str())
            .collect()
    }

    /// `μ(∩_{name} X_name)`; the empty intersection is Ω.
    pub fn evaluate<S: AsRef<str>>(&self, names: &[S]) -> Result<Rational> {
        let flags: Vec<&Vec<bool>> = names
            .iter()
            .map(|n| {
                self.events
                    .get(n.as_ref())
                    .ok_or_else(|| Error::UnknownEvent(n.as_ref().to_string()))
            })
            .collect::<Result<_>>()?;
        let mut total = Rational::zero();
        for (k, m) in self.masses.iter().enumerate() {
            if flags.iter().all(|f| f[k]) {
                total += m;
            }
        }
        Ok(total)
    }

    /// Same as [`Self::evaluate`], also returning how many points were summed.
    pub(crate) fn evaluate_counting(&self, names: &[&str]) -> Result<(Rational, usize)> {
        let flags: Vec<&Vec<bool>> = names
            .iter()
            .map(|n| self.events.get(*n).ok_or_else(|| Error::UnknownEvent(n.to_string())))
            .collect::<Result<_>>()?;
        let mut total = Rational::zero();
        let mut count = 0;
        for (k, m) in self.masses.iter().enumerate() {
            if flags.iter().all(|f| f[k]) {
                total += m;
                count += 1;
            }
        }
        Ok((total, count))
    }

    /// Replaces one point mass without re-normalizing; for negative controls.
    pub fn with_corrupted_mass(&self, k: usize, mass: Rational) -> Self {
        let mut out = self.clone();
        out.masses[k] = mass;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn coin() -> KolmogorovSpace {
        KolmogorovSpace::new(
            vec!["h".into(), "t".into()],
            vec![rat(1, 3), rat(2, 3)],
            BTreeMap::from([("H".to_string(), vec![0]), ("T".to_string(), vec![1])]),
        )
        .unwrap()
    }

    #[test]
    fn evaluates_intersections() {
        let s = coin();
        assert_eq!(s.evaluate::<&str>(&[]).unwrap(), rat(1, 1));
        assert_eq!(s.evaluate(&["H"]).unwrap(), rat(1, 3));
        assert_eq!(s.evaluate(&["H", "T"]).unwrap(), rat(0, 1));
        assert!(matches!(s.evaluate(&["X"]), Err(Error::UnknownEvent(_))));
    }

    #[test]
    fn rejects_invalid_measures() {
        let ev = BTreeMap::new();
        assert!(KolmogorovSpace::new(vec!["a".into()], vec![rat(1, 2)], ev.clone()).is_err());
        assert!(KolmogorovSpace::new(
            vec!["a".into(), "b".into()],
            vec![rat(3, 2), rat(-1, 2)],
            ev.clone()
        )
        .is_err());
        assert!(KolmogorovSpace::new(vec!["a".into(), "a".into()], vec![rat(1, 2), rat(1, 2)], ev).is_err());
        let bad_event = BTreeMap::from([("E".to_string(), vec![3])]);
        assert!(KolmogorovSpace::new(vec!["a".into()], vec![rat(1, 1)], bad_event).is_err());
    }
}
