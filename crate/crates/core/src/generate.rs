//! Seeded game generators.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigIssue, Error, Result};
use crate::game::{Game, DEFAULT_PROFILE_CAP};
use crate::partition::Partition;
use crate::rng::derive_stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// i.i.d. uniform[0, 1] utilities; paired with the singleton partition.
    RandomIdentical,
    /// Utility is a random function of the per-class action histograms, so it
    /// is invariant under swapping any two members of a class.
    SymmetricClasses,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub players: usize,
    pub actions: Vec<usize>,
    /// Sizes of consecutive player blocks. Defaults to singletons for
    /// `random_identical` and to one class of everybody for `symmetric_classes`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    /// Players with `m` actions each, grouped into consecutive classes of the given sizes.
    pub fn symmetric(class_sizes: &[usize], m: usize, seed: u64) -> Self {
        let n = class_sizes.iter().sum();
        Self {
            kind: GeneratorKind::SymmetricClasses,
            players: n,
            actions: vec![m; n],
            class_sizes: Some(class_sizes.to_vec()),
            seed,
        }
    }

    pub fn random_identical(actions: Vec<usize>, seed: u64) -> Self {
        Self {
            kind: GeneratorKind::RandomIdentical,
            players: actions.len(),
            actions,
            class_sizes: None,
            seed,
        }
    }

    fn resolved_class_sizes(&self) -> Vec<usize> {
        match (&self.class_sizes, self.kind) {
            (Some(s), _) => s.clone(),
            (None, GeneratorKind::RandomIdentical) => vec![1; self.players],
            (None, GeneratorKind::SymmetricClasses) => vec![self.players],
        }
    }

    /// All problems with the spec, each tagged with a field path under `prefix`.
    pub fn issues(&self, prefix: &str) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let at = |f: &str| format!("{prefix}.{f}");
        if self.players < 2 {
            out.push(ConfigIssue::new(at("players"), "need at least 2 players"));
        }
        if self.actions.len() != self.players {
            out.push(ConfigIssue::new(
                at("actions"),
                format!("lists {} players, expected {}", self.actions.len(), self.players),
            ));
        }
        if self.actions.contains(&0) {
            out.push(ConfigIssue::new(at("actions"), "every player needs >= 1 action"));
        }
        let sizes = self.resolved_class_sizes();
        if sizes.contains(&0) || sizes.iter().sum::<usize>() != self.players {
            out.push(ConfigIssue::new(
                at("class_sizes"),
                format!("must be positive and sum to {}", self.players),
            ));
        } else if self.actions.len() == self.players {
            let mut start = 0;
            for (k, &s) in sizes.iter().enumerate() {
                let block = &self.actions[start..start + s];
                if block.iter().any(|&m| m != block[0]) {
                    out.push(ConfigIssue::new(
                        at("class_sizes"),
                        format!("class {k} mixes players with different action counts"),
                    ));
                }
                start += s;
            }
            if self.kind == GeneratorKind::RandomIdentical && sizes.iter().any(|&s| s > 1) {
                out.push(ConfigIssue::new(
                    at("class_sizes"),
                    "random_identical games are only permutation-invariant for singleton classes",
                ));
            }
        }
        out
    }
}

/// Builds the game and its declared partition; deterministic in `spec.seed`.
pub fn generate_game(spec: &GeneratorSpec) -> Result<(Game, Partition)> {
    let issues = spec.issues("generator");
    if !issues.is_empty() {
        return Err(Error::Config(issues));
    }
    let total = spec
        .actions
        .iter()
        .try_fold(1usize, |acc, &m| acc.checked_mul(m).filter(|&t| t <= DEFAULT_PROFILE_CAP))
        .ok_or_else(|| {
            Error::Resource(format!(
                "game with actions {:?} exceeds the cap of {DEFAULT_PROFILE_CAP} profiles",
                spec.actions
            ))
        })?;
    let part = Partition::from_class_sizes(&spec.resolved_class_sizes())?;
    let mut rng = derive_stream(spec.seed, "generator", 0);
    let utility = match spec.kind {
        GeneratorKind::RandomIdentical => (0..total).map(|_| rng.random::<f64>()).collect(),
        GeneratorKind::SymmetricClasses => histogram_utility(spec, &part, total, &mut rng),
    };
    let game = Game::new(spec.actions.clone(), utility)?;
    Ok((game, part))
}

fn histogram_utility(
    spec: &GeneratorSpec,
    part: &Partition,
    total: usize,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let n = spec.players;
    // offset of (class k, action a) inside the histogram key
    let mut offsets = Vec::with_capacity(part.class_count());
    let mut width = 0;
    for class in part.classes() {
        offsets.push(width);
        width += spec.actions[class[0]];
    }
    let slot: Vec<usize> = (0..n)
        .map(|i| offsets[part.class_of(i).expect("blocks cover all players")])
        .collect();

    let mut values: HashMap<Vec<u16>, f64> = HashMap::new();
    let mut profile = vec![0usize; n];
    let mut key = vec![0u16; width];
    let mut utility = Vec::with_capacity(total);
    for _ in 0..total {
        key.iter_mut().for_each(|c| *c = 0);
        for (i, &a) in profile.iter().enumerate() {
            key[slot[i] + a] += 1;
        }
        let u = *values.entry(key.clone()).or_insert_with(|| rng.random::<f64>());
        utility.push(u);
        // odometer, last player fastest
        for i in (0..n).rev() {
            profile[i] += 1;
            if profile[i] < spec.actions[i] {
                break;
            }
            profile[i] = 0;
        }
    }
    utility
}
