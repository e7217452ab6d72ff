//! The three attack strategies (centralized, naive DBA, cluster DBA with
//! network detection): poisoned-batch construction, signature training,
//! per-round trigger assignment, distance-matrix construction, and ASR
//! evaluation.

mod cluster;

pub use cluster::{cluster_attackers, ClusterAssignment, DistanceMatrix};

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{
    apply_local_trigger, apply_trigger, make_signature, LabeledImage, LocalTrigger,
    SignatureImage, TriggerSpec,
};
use crate::error::{Error, Result};
use crate::nn::{cross_entropy_grad, predict_class, sgd_step, ModelParams};
use crate::regressor::DistanceModel;
use crate::rng;
use crate::sim::{draw_batch_indices, SignalSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackStrategy {
    None,
    Centralized,
    NaiveDba,
    ClusterDba,
}

/// The attacker nodes plus everything they share: per-attacker signatures,
/// the poison fraction, and the backdoor target label.
#[derive(Debug, Clone)]
pub struct AttackerSet {
    ids: Vec<usize>, // sorted
    signatures: BTreeMap<usize, SignatureImage>,
    pub poison_fraction: f64,
    pub target_label: usize,
}

impl AttackerSet {
    /// Signatures are derived from `(seed, owner id)`, so the same seed gives
    /// every attacker a stable, distinct probe image and pseudo-label.
    pub fn build(
        ids: &[usize],
        poison_fraction: f64,
        target_label: usize,
        image_side: usize,
        num_classes: usize,
        seed: u64,
    ) -> Result<Self> {
        let mut sorted = ids.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ids.len() {
            return Err(Error::invalid("attacker ids must be distinct"));
        }
        if !(0.0..=1.0).contains(&poison_fraction) {
            return Err(Error::invalid(format!(
                "poison_fraction {poison_fraction} outside [0, 1]"
            )));
        }
        if target_label >= num_classes {
            return Err(Error::invalid(format!(
                "target label {target_label} out of range 0..{num_classes}"
            )));
        }
        let mut signatures = BTreeMap::new();
        for &id in &sorted {
            signatures.insert(id, make_signature(id, image_side, num_classes, seed)?);
        }
        Ok(AttackerSet {
            ids: sorted,
            signatures,
            poison_fraction,
            target_label,
        })
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.ids.binary_search(&id).is_ok()
    }

    pub fn signature(&self, id: usize) -> Option<&SignatureImage> {
        self.signatures.get(&id)
    }

    /// Re-point a signature at a different pseudo-label. The simulator uses
    /// this to let each attacker pick the class its shared initial model
    /// finds least likely for the signature, so the detection signal starts
    /// at zero everywhere instead of riding a decision boundary.
    pub fn retarget_signature(&mut self, id: usize, pseudo_label: usize) {
        if let Some(sig) = self.signatures.get_mut(&id) {
            sig.pseudo_label = pseudo_label;
        }
    }
}

/// Where the cluster-DBA distance matrix comes from at round ΔT.
#[derive(Debug, Clone)]
pub enum DistanceSource {
    /// Exact BFS hop distances — the attacker's ideal; used by sweeps and as
    /// a debugging upper bound.
    Oracle,
    /// The pretrained regressor applied to the recorded signal sequences.
    Model(DistanceModel),
}

/// Fully resolved attack description handed to the simulator.
#[derive(Debug, Clone)]
pub struct AttackPlan {
    pub strategy: AttackStrategy,
    pub trigger: TriggerSpec,
    pub attackers: AttackerSet,
    /// Number of clusters K (cluster_dba only).
    pub num_clusters: usize,
    pub distance_source: DistanceSource,
    /// Amplitude of seeded noise injected into the distance matrix before
    /// clustering, in hops. Zero disables injection.
    pub distance_error: f64,
}

impl AttackPlan {
    pub fn validate(&self) -> Result<()> {
        if self.strategy == AttackStrategy::ClusterDba {
            if self.num_clusters == 0 || self.num_clusters > self.attackers.len() {
                return Err(Error::invalid(format!(
                    "need 1 <= K <= |A|, got K={} with |A|={}",
                    self.num_clusters,
                    self.attackers.len()
                )));
            }
        }
        if self.strategy != AttackStrategy::None && self.attackers.is_empty() {
            return Err(Error::invalid("attack strategy requires attackers"));
        }
        Ok(())
    }
}

/// Poison fractions giving every strategy the same expected number of stamped
/// pixels in the training stream, relative to cluster DBA at fraction `f`
/// with `k` clusters: cluster stamps `k·|pattern|` pixels per round of batch
/// mass, naive DBA stamps `|pattern|`, centralized stamps `|A|·|pattern|`.
/// Returns `(f_cluster, f_naive, f_centralized)`, clamped to 1.
pub fn equal_budget_fractions(f: f64, k: usize, num_attackers: usize) -> (f64, f64, f64) {
    let f_cluster = f.min(1.0);
    let f_naive = (f * k as f64).min(1.0);
    let f_centralized = (f * k as f64 / num_attackers as f64).min(1.0);
    (f_cluster, f_naive, f_centralized)
}

/// A trigger that may be the whole pattern or one decomposed part.
#[derive(Debug, Clone, PartialEq)]
pub enum TriggerRef<'a> {
    Global(&'a TriggerSpec),
    Local(&'a LocalTrigger),
}

impl TriggerRef<'_> {
    fn apply(&self, x: &LabeledImage) -> Result<LabeledImage> {
        match self {
            TriggerRef::Global(t) => apply_trigger(x, t),
            TriggerRef::Local(t) => apply_local_trigger(x, t),
        }
    }
}

/// Seeded mixed batch: `round(f·batch_size)` samples get the trigger stamped
/// and their label replaced by `target`, the rest stay clean; the batch order
/// is then shuffled. With a fraction that rounds to zero this consumes
/// exactly the rng draws of an honest batch and returns identical samples.
pub fn poisoned_batch(
    shard: &[LabeledImage],
    batch_size: usize,
    trigger: &TriggerRef<'_>,
    target: usize,
    poison_fraction: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<LabeledImage>> {
    if shard.is_empty() {
        return Err(Error::invalid("poisoned_batch: empty shard"));
    }
    let idx = draw_batch_indices(shard.len(), batch_size, rng);
    let n_poi = ((poison_fraction * batch_size as f64).round() as usize).min(batch_size);
    let mut batch: Vec<LabeledImage> = idx.iter().map(|&i| shard[i].clone()).collect();
    if n_poi > 0 {
        for sample in batch.iter_mut().take(n_poi) {
            let mut stamped = trigger.apply(sample)?;
            stamped.label = target;
            *sample = stamped;
        }
        batch.shuffle(rng);
    }
    Ok(batch)
}

/// One detection-phase SGD step: gradient is `0.9·clean + 0.1·signature`,
/// the clean term being an ordinary mini-batch and the signature term the
/// owner's probe image trained toward its pseudo-label.
pub fn signature_step(
    params: &ModelParams,
    shard: &[LabeledImage],
    signature: &SignatureImage,
    batch_size: usize,
    lr: f64,
    rng: &mut ChaCha8Rng,
) -> Result<ModelParams> {
    if shard.is_empty() {
        return Err(Error::invalid("signature_step: empty shard"));
    }
    let idx = draw_batch_indices(shard.len(), batch_size, rng);
    let clean: Vec<(&[f64], usize)> = idx
        .iter()
        .map(|&i| (shard[i].pixels.as_slice(), shard[i].label))
        .collect();
    let (_, mut grad) = cross_entropy_grad(params, &clean)?;
    grad.scale(0.9);
    let sig_batch: Vec<(&[f64], usize)> =
        vec![(signature.pixels.as_slice(), signature.pseudo_label)];
    let (_, mut sig_grad) = cross_entropy_grad(params, &sig_batch)?;
    sig_grad.scale(0.1);
    grad.add_assign(&sig_grad);
    sgd_step(params, &grad, lr)
}

/// One attack-phase SGD step on a poisoned batch.
pub fn attacker_train_step(
    params: &ModelParams,
    shard: &[LabeledImage],
    trigger: &TriggerRef<'_>,
    target: usize,
    poison_fraction: f64,
    batch_size: usize,
    lr: f64,
    rng: &mut ChaCha8Rng,
) -> Result<ModelParams> {
    let batch = poisoned_batch(shard, batch_size, trigger, target, poison_fraction, rng)?;
    let refs: Vec<(&[f64], usize)> = batch
        .iter()
        .map(|im| (im.pixels.as_slice(), im.label))
        .collect();
    let (_, grad) = cross_entropy_grad(params, &refs)?;
    sgd_step(params, &grad, lr)
}

/// Gradient of an honest mini-batch step, exposed so the simulator and the
/// degenerate-attack tests share one batch-construction path.
pub fn honest_step(
    params: &ModelParams,
    shard: &[LabeledImage],
    batch_size: usize,
    lr: f64,
    rng: &mut ChaCha8Rng,
) -> Result<ModelParams> {
    if shard.is_empty() {
        return Err(Error::invalid("honest_step: empty shard"));
    }
    let idx = draw_batch_indices(shard.len(), batch_size, rng);
    let batch: Vec<(&[f64], usize)> = idx
        .iter()
        .map(|&i| (shard[i].pixels.as_slice(), shard[i].label))
        .collect();
    let (_, grad) = cross_entropy_grad(params, &batch)?;
    sgd_step(params, &grad, lr)
}

/// Fraction of trigger-stamped test images (true label ≠ target) classified
/// as the target label. Always evaluated with the FULL global trigger.
pub fn attack_success_rate(
    model: &ModelParams,
    test_set: &[LabeledImage],
    trigger: &TriggerSpec,
    target: usize,
) -> Result<f64> {
    let eligible: Vec<&LabeledImage> =
        test_set.iter().filter(|im| im.label != target).collect();
    if eligible.is_empty() {
        return Err(Error::invalid(
            "attack_success_rate: no test images with true label != target",
        ));
    }
    let mut hits = 0usize;
    for im in &eligible {
        let stamped = apply_trigger(im, trigger)?;
        if predict_class(model, &stamped.pixels)? == target {
            hits += 1;
        }
    }
    Ok(hits as f64 / eligible.len() as f64)
}

/// Per-round map from attacker id to the trigger part it stamps.
#[derive(Debug, Clone, PartialEq)]
pub struct TriggerAssignment {
    map: BTreeMap<usize, LocalTrigger>,
}

impl TriggerAssignment {
    pub fn get(&self, id: usize) -> Option<&LocalTrigger> {
        self.map.get(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &LocalTrigger)> {
        self.map.iter().map(|(&id, t)| (id, t))
    }

    /// Every attacker stamps the full global trigger.
    pub fn centralized(attackers: &[usize], trigger: &TriggerSpec) -> Result<Self> {
        let full = trigger.decompose(1)?.remove(0);
        Ok(TriggerAssignment {
            map: attackers.iter().map(|&id| (id, full.clone())).collect(),
        })
    }

    /// Static split of the global trigger across all attackers in sorted id
    /// order, the same every round.
    pub fn naive(attackers: &[usize], trigger: &TriggerSpec) -> Result<Self> {
        let mut sorted = attackers.to_vec();
        sorted.sort_unstable();
        let parts = trigger.decompose(sorted.len())?;
        Ok(TriggerAssignment {
            map: sorted.into_iter().zip(parts).collect(),
        })
    }

    /// Per-cluster rotation: cluster `C_k` decomposes the trigger into
    /// `|C_k|` parts and applies the permutation indexed by
    /// `(phase(k) + round_seed) mod |C_k|!`, so over any `|C_k|!` consecutive
    /// round seeds every attacker stamps every part exactly once, and
    /// long-run frequencies are exactly uniform. Clusters too large to
    /// enumerate permutations (> 12 members) fall back to a seeded shuffle.
    pub fn for_clusters(
        assignment: &ClusterAssignment,
        trigger: &TriggerSpec,
        round_seed: u64,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, members) in assignment.clusters().iter().enumerate() {
            let m = members.len();
            let mut parts = trigger.decompose(m)?;
            if m <= 12 {
                let phase = rng::derive_seed(k as u64, "attack.assign_phase", &[m as u64]);
                let idx = phase.wrapping_add(round_seed) % factorial(m);
                let perm = permutation_by_index(m, idx);
                for (slot, &attacker) in members.iter().enumerate() {
                    map.insert(attacker, parts[perm[slot]].clone());
                }
            } else {
                let mut r = rng::stream(round_seed, "attack.assign_triggers", &[k as u64]);
                parts.shuffle(&mut r);
                for (&attacker, part) in members.iter().zip(parts) {
                    map.insert(attacker, part);
                }
            }
        }
        Ok(TriggerAssignment { map })
    }
}

fn factorial(m: usize) -> u64 {
    (1..=m as u64).product::<u64>().max(1)
}

/// Lexicographic permutation of `0..m` with the given index (Lehmer decode).
fn permutation_by_index(m: usize, mut idx: u64) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..m).collect();
    let mut out = Vec::with_capacity(m);
    for pos in (0..m).rev() {
        let f = factorial(pos);
        let which = (idx / f) as usize;
        idx %= f;
        out.push(pool.remove(which));
    }
    out
}

/// Predicted pairwise attacker distances from the recorded signal sequences.
///
/// Entry `(i, i')` feeds the difference between owner `i`'s self-observed
/// sequence and observer `i''`s sequence for the same signature into the
/// regressor; the matrix is symmetrized by averaging both directions,
/// negatives are clamped to zero, and the diagonal is identically zero.
pub fn build_distance_matrix(
    signals: &SignalSet,
    attacker_ids: &[usize],
    model: &DistanceModel,
) -> Result<DistanceMatrix> {
    let n = attacker_ids.len();
    let mut raw = vec![0.0; n * n];
    for (i, &owner) in attacker_ids.iter().enumerate() {
        for (j, &observer) in attacker_ids.iter().enumerate() {
            if i == j {
                continue;
            }
            let diff = signals.difference(owner, observer)?;
            raw[i * n + j] = model.predict(&diff)?;
        }
    }
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (0.5 * (raw[i * n + j] + raw[j * n + i])).max(0.0);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    DistanceMatrix::new(attacker_ids.to_vec(), d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::make_synthetic;
    use crate::nn::init_mlp;

    fn trigger() -> TriggerSpec {
        TriggerSpec::blocks(4, 2, 2, (0, 0), 0, 1.0, (16, 16)).unwrap()
    }

    fn shard() -> Vec<LabeledImage> {
        make_synthetic(4, 10, 16, 0).unwrap()
    }

    #[test]
    fn degenerate_fraction_gives_clean_batch_same_rng() {
        let shard = shard();
        let t = trigger();
        let mut r1 = rng::stream(1, "test.batch", &[]);
        let mut r2 = rng::stream(1, "test.batch", &[]);
        let poisoned =
            poisoned_batch(&shard, 16, &TriggerRef::Global(&t), 0, 0.01, &mut r1).unwrap();
        let idx = draw_batch_indices(shard.len(), 16, &mut r2);
        let honest: Vec<LabeledImage> = idx.iter().map(|&i| shard[i].clone()).collect();
        assert_eq!(poisoned, honest);
        // Both rngs advanced identically.
        use rand::Rng;
        assert_eq!(r1.gen::<u64>(), r2.gen::<u64>());
    }

    #[test]
    fn full_fraction_stamps_and_relabels_everything() {
        let shard = shard();
        let t = trigger();
        let mut r = rng::stream(2, "test.batch", &[]);
        let batch = poisoned_batch(&shard, 12, &TriggerRef::Global(&t), 2, 1.0, &mut r).unwrap();
        assert_eq!(batch.len(), 12);
        for im in &batch {
            assert_eq!(im.label, 2);
            for &(row, col, v) in t.stamps() {
                assert_eq!(im.pixels[row * 16 + col], v);
            }
        }
    }

    #[test]
    fn clean_portion_is_bit_identical_to_source() {
        let shard = shard();
        let t = trigger();
        let mut r = rng::stream(3, "test.batch", &[]);
        let batch = poisoned_batch(&shard, 20, &TriggerRef::Global(&t), 2, 0.5, &mut r).unwrap();
        let clean: Vec<&LabeledImage> = batch.iter().filter(|im| im.label != 2).collect();
        assert!(!clean.is_empty());
        for im in clean {
            assert!(shard.iter().any(|s| s == im), "clean sample not found in shard");
        }
    }

    #[test]
    fn attacker_step_with_zero_fraction_equals_honest_step() {
        let shard = shard();
        let t = trigger();
        let params = init_mlp(256, 8, 4, 0).unwrap();
        let mut r1 = rng::stream(4, "test.step", &[]);
        let mut r2 = rng::stream(4, "test.step", &[]);
        let attacked = attacker_train_step(
            &params,
            &shard,
            &TriggerRef::Global(&t),
            2,
            0.0,
            16,
            0.1,
            &mut r1,
        )
        .unwrap();
        let honest = honest_step(&params, &shard, 16, 0.1, &mut r2).unwrap();
        assert_eq!(attacked, honest);
    }

    #[test]
    fn signature_zero_lr_is_identity_and_overfit_drives_accuracy() {
        let shard = shard();
        let sig = make_signature(0, 16, 4, 7).unwrap();
        let params = init_mlp(256, 16, 4, 1).unwrap();
        let mut r = rng::stream(5, "test.sig", &[]);
        let same = signature_step(&params, &shard, &sig, 16, 0.0, &mut r).unwrap();
        assert_eq!(same, params);

        // Repeated steps overfit the signature within 50 steps.
        let mut m = params;
        for _ in 0..50 {
            m = signature_step(&m, &shard, &sig, 16, 0.5, &mut r).unwrap();
        }
        assert_eq!(predict_class(&m, &sig.pixels).unwrap(), sig.pseudo_label);
    }

    #[test]
    fn asr_definition_and_filtering() {
        let shard = shard();
        let t = trigger();
        // Constant-τ predictor: zero weights except a huge target-class bias.
        let mut m = init_mlp(256, 8, 4, 0).unwrap();
        for v in m.values_mut().iter_mut() {
            *v = 0.0;
        }
        let bias_off = m.block_offset(3);
        m.values_mut()[bias_off + 2] = 50.0;
        assert_eq!(attack_success_rate(&m, &shard, &t, 2).unwrap(), 1.0);

        // All-target test set is rejected.
        let all_target: Vec<LabeledImage> = shard
            .iter()
            .filter(|im| im.label == 2)
            .cloned()
            .collect();
        assert!(attack_success_rate(&m, &all_target, &t, 2).is_err());
    }

    #[test]
    fn untrained_asr_near_chance() {
        let data = make_synthetic(4, 50, 16, 9).unwrap();
        let t = trigger();
        let mut total = 0.0;
        let n_seeds = 20;
        for seed in 0..n_seeds {
            let m = init_mlp(256, 8, 4, seed).unwrap();
            total += attack_success_rate(&m, &data, &t, 2).unwrap();
        }
        let mean = total / n_seeds as f64;
        assert!((mean - 0.25).abs() < 0.1, "mean untrained ASR {mean}");
    }

    #[test]
    fn centralized_assignment_stamps_full_trigger() {
        let t = trigger();
        let a = TriggerAssignment::centralized(&[3, 7, 9], &t).unwrap();
        for id in [3, 7, 9] {
            assert_eq!(a.get(id).unwrap().stamps(), t.stamps());
        }
    }

    #[test]
    fn cluster_k_equals_a_matches_centralized_exactly() {
        let t = trigger();
        let ids = [2usize, 5, 11];
        let singles =
            ClusterAssignment::from_members(ids.iter().map(|&i| vec![i]).collect()).unwrap();
        for round_seed in [0u64, 1, 99] {
            let clustered = TriggerAssignment::for_clusters(&singles, &t, round_seed).unwrap();
            let central = TriggerAssignment::centralized(&ids, &t).unwrap();
            assert_eq!(clustered, central);
        }
    }

    #[test]
    fn cluster_k1_is_permutation_of_naive() {
        let t = trigger();
        let ids = vec![1usize, 4, 6, 9];
        let one = ClusterAssignment::from_members(vec![ids.clone()]).unwrap();
        let naive = TriggerAssignment::naive(&ids, &t).unwrap();
        let naive_parts: Vec<&LocalTrigger> = ids.iter().map(|&i| naive.get(i).unwrap()).collect();
        for round_seed in 0..10u64 {
            let clustered = TriggerAssignment::for_clusters(&one, &t, round_seed).unwrap();
            let mut seen = vec![false; ids.len()];
            for &id in &ids {
                let part = clustered.get(id).unwrap();
                let pos = naive_parts
                    .iter()
                    .position(|p| p.stamps() == part.stamps())
                    .expect("cluster part not among naive parts");
                assert!(!seen[pos], "part assigned twice");
                seen[pos] = true;
            }
        }
    }

    #[test]
    fn rotation_covers_all_parts_in_factorial_consecutive_rounds() {
        let t = trigger();
        for members in [vec![0usize, 1], vec![2usize, 5, 8]] {
            let m = members.len();
            let fact: u64 = (1..=m as u64).product();
            let assignment = ClusterAssignment::from_members(vec![members.clone()]).unwrap();
            // Any window of m! consecutive round seeds covers everything.
            for window_start in [0u64, 17, 1000] {
                let mut seen = vec![std::collections::BTreeSet::new(); m];
                for rs in window_start..window_start + fact {
                    let ta = TriggerAssignment::for_clusters(&assignment, &t, rs).unwrap();
                    for (slot, &id) in members.iter().enumerate() {
                        let stamps = ta.get(id).unwrap().stamps().to_vec();
                        seen[slot].insert(format!("{stamps:?}"));
                    }
                }
                for (slot, s) in seen.iter().enumerate() {
                    assert_eq!(s.len(), m, "member {slot} missed parts");
                }
            }
        }
    }

    #[test]
    fn rotation_frequencies_uniform() {
        let t = trigger();
        let members = vec![0usize, 3, 7];
        let assignment = ClusterAssignment::from_members(vec![members.clone()]).unwrap();
        let parts = t.decompose(3).unwrap();
        let mut counts = vec![vec![0usize; 3]; 3];
        let rounds = 600u64;
        for rs in 0..rounds {
            let ta = TriggerAssignment::for_clusters(&assignment, &t, rs).unwrap();
            for (slot, &id) in members.iter().enumerate() {
                let got = ta.get(id).unwrap();
                let pos = parts
                    .iter()
                    .position(|p| p.stamps() == got.stamps())
                    .unwrap();
                counts[slot][pos] += 1;
            }
        }
        for row in counts {
            for c in row {
                let freq = c as f64 / rounds as f64;
                assert!((freq - 1.0 / 3.0).abs() <= 0.05, "frequency {freq}");
            }
        }
    }

    #[test]
    fn union_of_cluster_assignment_is_global_pattern() {
        let t = trigger();
        let assignment =
            ClusterAssignment::from_members(vec![vec![0, 1, 2], vec![5, 6]]).unwrap();
        let ta = TriggerAssignment::for_clusters(&assignment, &t, 42).unwrap();
        for cluster in assignment.clusters() {
            let mut union: Vec<(usize, usize, f64)> = cluster
                .iter()
                .flat_map(|&id| ta.get(id).unwrap().stamps().iter().copied())
                .collect();
            union.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut want = t.stamps().to_vec();
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(union, want);
        }
    }

    #[test]
    fn equal_budget_arithmetic() {
        let (fc, fn_, fcen) = equal_budget_fractions(0.25, 2, 5);
        assert_eq!(fc, 0.25);
        assert_eq!(fn_, 0.5);
        assert_eq!(fcen, 0.1);
        let (_, fn2, _) = equal_budget_fractions(0.6, 3, 4);
        assert_eq!(fn2, 1.0); // clamped
    }

    #[test]
    fn permutation_decode_is_lexicographic() {
        assert_eq!(permutation_by_index(3, 0), vec![0, 1, 2]);
        assert_eq!(permutation_by_index(3, 1), vec![0, 2, 1]);
        assert_eq!(permutation_by_index(3, 5), vec![2, 1, 0]);
        let mut all: Vec<Vec<usize>> = (0..24).map(|i| permutation_by_index(4, i)).collect();
        all.dedup();
        assert_eq!(all.len(), 24);
    }
}
