//! Decentralized FL execution over a topology: per-round local SGD plus
//! neighbor aggregation, in a synchronous (D-PSGD) and a simplified
//! asynchronous wait-free variant, with per-round metrics recording.
//!
//! Determinism contract: every metric is a pure function of (topology,
//! shards, attack plan, defense, config, master seed). Each client draws
//! only from a stream keyed by `(master seed, round, client id)`, and
//! aggregation reads immutable snapshots, so physical execution order cannot
//! leak into results.

mod metrics;

pub use metrics::{
    measure_poison_accuracy, signature_probes, MetricsLog, MetricsRow, SignalSet,
};

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attack::{
    attack_success_rate, attacker_train_step, build_distance_matrix, cluster_attackers,
    honest_step, signature_step, AttackPlan, AttackStrategy, ClusterAssignment, DistanceMatrix,
    DistanceSource, TriggerAssignment, TriggerRef,
};
use crate::data::{LabeledImage, LocalTrigger, SignatureImage};
use crate::defense::{clip_incoming, median_aggregate, DefenseSpec};
use crate::error::{Error, Result};
use crate::nn::{forward_classify, init_mlp, ModelParams};
use crate::rng;
use crate::topology::{metropolis_weights, MixingMatrix, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Dpsgd,
    AsyncGossip,
}

/// Simulation hyperparameters. The master seed is passed separately wherever
/// a run is started, so one config can drive a seed sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub protocol: Protocol,
    /// Total rounds T.
    pub total_rounds: usize,
    /// Detection-phase rounds ΔT (must be < T). Baselines train honestly
    /// until ΔT so every strategy attacks over the same window.
    pub detection_rounds: usize,
    #[serde(default = "default_local_steps")]
    pub local_steps: usize,
    #[serde(default = "default_lr")]
    pub lr: f64,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_activation")]
    pub async_activation_fraction: f64,
    /// Test images used for accuracy/loss/ASR measurement; 0 disables these
    /// evaluations entirely (signal sequences are still recorded).
    #[serde(default = "default_eval_subset")]
    pub eval_subset: usize,
    /// Evaluate every this many rounds (the final round is always evaluated).
    #[serde(default = "default_eval_every")]
    pub eval_every: usize,
    #[serde(default = "default_hidden_dim")]
    pub hidden_dim: usize,
}

fn default_local_steps() -> usize {
    2
}
fn default_lr() -> f64 {
    0.1
}
fn default_batch_size() -> usize {
    32
}
fn default_activation() -> f64 {
    1.0
}
fn default_eval_subset() -> usize {
    200
}
fn default_eval_every() -> usize {
    1
}
fn default_hidden_dim() -> usize {
    32
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.total_rounds == 0 {
            return Err(Error::invalid("total_rounds must be positive"));
        }
        if self.detection_rounds >= self.total_rounds {
            return Err(Error::invalid(format!(
                "detection_rounds ({}) must be < total_rounds ({})",
                self.detection_rounds, self.total_rounds
            )));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::invalid(format!("lr must be positive, got {}", self.lr)));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size must be positive"));
        }
        if !(self.async_activation_fraction > 0.0 && self.async_activation_fraction <= 1.0) {
            return Err(Error::invalid(format!(
                "async_activation_fraction must be in (0, 1], got {}",
                self.async_activation_fraction
            )));
        }
        if self.eval_every == 0 {
            return Err(Error::invalid("eval_every must be positive"));
        }
        if self.hidden_dim == 0 {
            return Err(Error::invalid("hidden_dim must be positive"));
        }
        Ok(())
    }
}

/// One node's mutable state.
#[derive(Debug, Clone)]
pub struct ClientState {
    pub id: usize,
    pub params: ModelParams,
    pub shard: Vec<LabeledImage>,
    pub is_attacker: bool,
    /// Latest params received from each neighbor (async protocol only).
    pub inbox: BTreeMap<usize, ModelParams>,
}

/// What a client trains on this round.
#[derive(Debug, Clone)]
pub enum ClientAction {
    Honest,
    Signature(SignatureImage),
    Trigger {
        part: LocalTrigger,
        fraction: f64,
        target: usize,
    },
}

/// Everything a round function needs beyond the client array.
#[derive(Debug, Clone)]
pub struct RoundContext {
    pub round: usize,
    pub master_seed: u64,
    pub defense: DefenseSpec,
    /// Clients absent from the map act honestly.
    pub actions: BTreeMap<usize, ClientAction>,
}

impl RoundContext {
    pub fn honest(round: usize, master_seed: u64) -> Self {
        RoundContext {
            round,
            master_seed,
            defense: DefenseSpec::None,
            actions: BTreeMap::new(),
        }
    }

    fn action_for(&self, id: usize) -> &ClientAction {
        self.actions.get(&id).unwrap_or(&ClientAction::Honest)
    }
}

/// Batch sampling shared by honest and poisoned steps: `batch_size` draws
/// with replacement, so a zero-poison batch consumes identical rng state to
/// an honest one.
pub fn draw_batch_indices(shard_len: usize, batch_size: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..batch_size).map(|_| rng.gen_range(0..shard_len)).collect()
}

fn local_phase(client: &mut ClientState, config: &SimConfig, ctx: &RoundContext) -> Result<()> {
    let mut r = rng::stream(
        ctx.master_seed,
        "sim.local",
        &[ctx.round as u64, client.id as u64],
    );
    for _ in 0..config.local_steps {
        client.params = match ctx.action_for(client.id) {
            ClientAction::Honest => honest_step(
                &client.params,
                &client.shard,
                config.batch_size,
                config.lr,
                &mut r,
            )?,
            ClientAction::Signature(sig) => signature_step(
                &client.params,
                &client.shard,
                sig,
                config.batch_size,
                config.lr,
                &mut r,
            )?,
            ClientAction::Trigger {
                part,
                fraction,
                target,
            } => attacker_train_step(
                &client.params,
                &client.shard,
                &TriggerRef::Local(part),
                *target,
                *fraction,
                config.batch_size,
                config.lr,
                &mut r,
            )?,
        };
    }
    ensure_finite(client, ctx.round)
}

fn ensure_finite(client: &ClientState, round: usize) -> Result<()> {
    if client.params.all_finite() {
        Ok(())
    } else {
        Err(Error::Numerical {
            round,
            client: client.id,
            message: "non-finite parameter value".into(),
        })
    }
}

/// Aggregate `own` with neighbor snapshots under the mixing row, honoring the
/// defense hook.
fn aggregate(
    own: &ModelParams,
    neighbors: &[(usize, &ModelParams)],
    row: &[f64],
    self_id: usize,
    defense: &DefenseSpec,
) -> ModelParams {
    let mut out = own.clone();
    match defense {
        DefenseSpec::NeighborMedian => {
            let clipped: Vec<&[f64]> = neighbors.iter().map(|(_, p)| p.values()).collect();
            if !clipped.is_empty() {
                let med = median_aggregate(own.values(), &clipped);
                out.values_mut().copy_from_slice(&med);
            }
        }
        _ => {
            let vals = out.values_mut();
            for v in vals.iter_mut() {
                *v *= row[self_id];
            }
            for &(j, p) in neighbors {
                let w = row[j];
                if w == 0.0 {
                    continue;
                }
                match defense {
                    DefenseSpec::NormClip { threshold } => {
                        let adj = clip_incoming(own.values(), p.values(), *threshold);
                        for (v, a) in vals.iter_mut().zip(&adj) {
                            *v += w * a;
                        }
                    }
                    _ => {
                        for (v, a) in vals.iter_mut().zip(p.values()) {
                            *v += w * a;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Synchronous D-PSGD round: every client takes its local steps, then all
/// clients simultaneously replace their params with the mixing-weighted
/// average of the post-step snapshots.
pub fn run_round_dpsgd(
    clients: &mut [ClientState],
    topology: &Topology,
    mixing: &MixingMatrix,
    config: &SimConfig,
    ctx: &RoundContext,
) -> Result<()> {
    for client in clients.iter_mut() {
        local_phase(client, config, ctx)?;
    }
    let snapshot: Vec<ModelParams> = clients.iter().map(|c| c.params.clone()).collect();
    for i in 0..clients.len() {
        let neighbors: Vec<(usize, &ModelParams)> = topology
            .neighbors(i)
            .iter()
            .map(|&j| (j, &snapshot[j]))
            .collect();
        clients[i].params = aggregate(&snapshot[i], &neighbors, mixing.row(i), i, &ctx.defense);
        ensure_finite(&clients[i], ctx.round)?;
    }
    Ok(())
}

/// Fill every inbox with the current params of each neighbor. Must run once
/// before the first async round.
pub fn init_inboxes(clients: &mut [ClientState], topology: &Topology) {
    let snapshot: Vec<ModelParams> = clients.iter().map(|c| c.params.clone()).collect();
    for i in 0..clients.len() {
        clients[i].inbox = topology
            .neighbors(i)
            .iter()
            .map(|&j| (j, snapshot[j].clone()))
            .collect();
    }
}

/// Simplified wait-free gossip round: a seeded subset of clients activates;
/// each active client (in id order — a serialized commit order) trains, then
/// averages its params with the latest, possibly stale, inbox copies of its
/// neighbors, and pushes the result to its neighbors' inboxes. Inactive
/// clients are untouched.
pub fn run_round_async(
    clients: &mut [ClientState],
    topology: &Topology,
    mixing: &MixingMatrix,
    config: &SimConfig,
    ctx: &RoundContext,
) -> Result<()> {
    let mut act = rng::stream(ctx.master_seed, "sim.async_activate", &[ctx.round as u64]);
    let active: Vec<bool> = (0..clients.len())
        .map(|_| act.gen_bool(config.async_activation_fraction))
        .collect();
    for i in 0..clients.len() {
        if !active[i] {
            continue;
        }
        local_phase(&mut clients[i], config, ctx)?;
        let own = clients[i].params.clone();
        let inbox: Vec<(usize, ModelParams)> = topology
            .neighbors(i)
            .iter()
            .filter_map(|&j| clients[i].inbox.get(&j).map(|p| (j, p.clone())))
            .collect();
        let neighbor_refs: Vec<(usize, &ModelParams)> =
            inbox.iter().map(|(j, p)| (*j, p)).collect();
        clients[i].params = aggregate(&own, &neighbor_refs, mixing.row(i), i, &ctx.defense);
        ensure_finite(&clients[i], ctx.round)?;
        let pushed = clients[i].params.clone();
        for &j in topology.neighbors(i) {
            clients[j].inbox.insert(i, pushed.clone());
        }
    }
    Ok(())
}

/// Full simulation driver: detection phase with signature training and
/// sequence recording, one clustering step at round ΔT, then trigger attacks
/// until T, with metrics appended every round. On failure the partial log
/// remains readable through [`log`](SimEngine::log).
pub struct SimEngine {
    topology: Topology,
    mixing: MixingMatrix,
    config: SimConfig,
    plan: AttackPlan,
    defense: DefenseSpec,
    master_seed: u64,
    num_classes: usize,
    clients: Vec<ClientState>,
    eval_set: Vec<LabeledImage>,
    probes: BTreeMap<usize, Vec<(Vec<f64>, usize)>>,
    signals: SignalSet,
    log: MetricsLog,
    clusters: Option<ClusterAssignment>,
    distance_matrix: Option<DistanceMatrix>,
    static_assignment: Option<TriggerAssignment>,
    assign_base: u64,
    round: usize,
    pending_poison_cells: BTreeMap<usize, Vec<Option<f64>>>,
}

impl SimEngine {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        topology: Topology,
        shards: Vec<Vec<LabeledImage>>,
        test_set: Vec<LabeledImage>,
        mut plan: AttackPlan,
        defense: DefenseSpec,
        config: SimConfig,
        num_classes: usize,
        master_seed: u64,
    ) -> Result<Self> {
        config.validate()?;
        plan.validate()?;
        defense.validate().map_err(Error::InvalidArgument)?;
        let n = topology.node_count();
        if shards.len() != n {
            return Err(Error::invalid(format!(
                "{} shards for {n} nodes",
                shards.len()
            )));
        }
        if shards.iter().any(|s| s.is_empty()) {
            return Err(Error::invalid("every client needs a nonempty shard"));
        }
        if let Some(&bad) = plan.attackers.ids().iter().find(|&&id| id >= n) {
            return Err(Error::invalid(format!(
                "attacker id {bad} outside topology (n={n})"
            )));
        }
        let input_dim = shards[0][0].pixels.len();
        let init = init_mlp(
            input_dim,
            config.hidden_dim,
            num_classes,
            rng::derive_seed(master_seed, "sim.init", &[]),
        )?;
        let clients: Vec<ClientState> = shards
            .into_iter()
            .enumerate()
            .map(|(id, shard)| ClientState {
                id,
                params: init.clone(),
                shard,
                is_attacker: plan.attackers.contains(id),
                inbox: BTreeMap::new(),
            })
            .collect();

        let eval_set = if config.eval_subset > 0 && !test_set.is_empty() {
            let take = config.eval_subset.min(test_set.len());
            crate::data::subset(
                &test_set,
                take,
                rng::derive_seed(master_seed, "sim.eval_subset", &[]),
            )?
        } else {
            Vec::new()
        };

        let mut probes = BTreeMap::new();
        if plan.strategy == AttackStrategy::ClusterDba {
            // Each attacker holds a copy of the shared initial model and
            // picks a pseudo-label from the unlikely end of its signature's
            // softmax. Starting from the unlikely end means every client
            // reports ~0 poison accuracy until the attacker's updates
            // actually reach it; a label the init model is ambivalent about
            // would flip on shard noise alone. Honest training also drags
            // the response to out-of-distribution images around, so each
            // attacker dry-runs a short clean training pass on its own
            // shard and scores classes by their likelihood under both the
            // initial and the drifted model — a class that clean training
            // resurrects is no use as a signal. Attackers collude, so they
            // also coordinate: in id order each takes its lowest-scoring
            // class among those not already claimed (claims reset when
            // there are more attackers than classes). Two signals on the
            // same label would mask each other.
            let mut claimed: Vec<usize> = Vec::new();
            for id in plan.attackers.ids().to_vec() {
                let mut drifted = init.clone();
                let mut dry = rng::stream(master_seed, "sim.drift_probe", &[id as u64]);
                for _ in 0..120 {
                    drifted = crate::attack::honest_step(
                        &drifted,
                        &clients[id].shard,
                        config.batch_size,
                        config.lr,
                        &mut dry,
                    )?;
                }
                let sig = plan.attackers.signature(id).expect("attacker signature");
                let p_init = forward_classify(&init, &sig.pixels)?;
                let p_drift = forward_classify(&drifted, &sig.pixels)?;
                if claimed.len() == p_init.len() {
                    claimed.clear();
                }
                let label = (0..p_init.len())
                    .filter(|c| !claimed.contains(c))
                    .min_by(|&a, &b| {
                        let sa = p_init[a].max(p_drift[a]);
                        let sb = p_init[b].max(p_drift[b]);
                        sa.partial_cmp(&sb).unwrap()
                    })
                    .expect("at least one unclaimed class");
                claimed.push(label);
                plan.attackers.retarget_signature(id, label);
            }
            for &id in plan.attackers.ids() {
                let sig = plan.attackers.signature(id).expect("attacker signature");
                probes.insert(
                    id,
                    signature_probes(sig, rng::derive_seed(master_seed, "sim.probes", &[])),
                );
            }
        }
        let static_assignment = match plan.strategy {
            AttackStrategy::Centralized => Some(TriggerAssignment::centralized(
                plan.attackers.ids(),
                &plan.trigger,
            )?),
            AttackStrategy::NaiveDba => {
                Some(TriggerAssignment::naive(plan.attackers.ids(), &plan.trigger)?)
            }
            _ => None,
        };
        let sig_owners = if plan.strategy == AttackStrategy::ClusterDba {
            plan.attackers.ids().to_vec()
        } else {
            Vec::new()
        };

        let mut engine = SimEngine {
            mixing: metropolis_weights(&topology),
            topology,
            assign_base: rng::derive_seed(master_seed, "sim.assign_base", &[]),
            config,
            plan,
            defense,
            master_seed,
            num_classes,
            clients,
            eval_set,
            probes,
            signals: SignalSet::new(),
            log: MetricsLog::new(sig_owners),
            clusters: None,
            distance_matrix: None,
            static_assignment,
            round: 0,
            pending_poison_cells: BTreeMap::new(),
        };
        if engine.config.protocol == Protocol::AsyncGossip {
            init_inboxes(&mut engine.clients, &engine.topology);
        }
        Ok(engine)
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn log(&self) -> &MetricsLog {
        &self.log
    }

    pub fn into_log(self) -> MetricsLog {
        self.log
    }

    pub fn signals(&self) -> &SignalSet {
        &self.signals
    }

    pub fn clusters(&self) -> Option<&ClusterAssignment> {
        self.clusters.as_ref()
    }

    pub fn distance_matrix(&self) -> Option<&DistanceMatrix> {
        self.distance_matrix.as_ref()
    }

    pub fn clients(&self) -> &[ClientState] {
        &self.clients
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn plan(&self) -> &AttackPlan {
        &self.plan
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    fn in_detection(&self) -> bool {
        self.plan.strategy == AttackStrategy::ClusterDba
            && self.round < self.config.detection_rounds
    }

    fn in_attack(&self) -> bool {
        self.plan.strategy != AttackStrategy::None
            && self.round >= self.config.detection_rounds
    }

    /// Predicted or oracle distances, noise-injected, clustered. Runs once
    /// when the attack phase begins.
    fn finalize_clusters(&mut self) -> Result<()> {
        if self.clusters.is_some() {
            return Ok(());
        }
        let ids = self.plan.attackers.ids();
        let matrix = match &self.plan.distance_source {
            DistanceSource::Oracle => DistanceMatrix::oracle(&self.topology, ids)?,
            DistanceSource::Model(model) => build_distance_matrix(&self.signals, ids, model)?,
        };
        let matrix = matrix.inject_error(
            self.plan.distance_error,
            rng::derive_seed(self.master_seed, "sim.distance_error", &[]),
        )?;
        let assignment = cluster_attackers(
            &matrix,
            self.plan.num_clusters,
            rng::derive_seed(self.master_seed, "sim.pam", &[]),
        )?;
        self.distance_matrix = Some(matrix);
        self.clusters = Some(assignment);
        Ok(())
    }

    fn build_actions(&mut self) -> Result<BTreeMap<usize, ClientAction>> {
        let mut actions = BTreeMap::new();
        if self.in_detection() {
            for &id in self.plan.attackers.ids() {
                let sig = self.plan.attackers.signature(id).unwrap().clone();
                actions.insert(id, ClientAction::Signature(sig));
            }
        } else if self.in_attack() {
            let assignment = match self.plan.strategy {
                AttackStrategy::ClusterDba => {
                    self.finalize_clusters()?;
                    let offset = (self.round - self.config.detection_rounds) as u64;
                    TriggerAssignment::for_clusters(
                        self.clusters.as_ref().unwrap(),
                        &self.plan.trigger,
                        self.assign_base.wrapping_add(offset),
                    )?
                }
                _ => self.static_assignment.clone().expect("static assignment"),
            };
            for (id, part) in assignment.iter() {
                actions.insert(
                    id,
                    ClientAction::Trigger {
                        part: part.clone(),
                        fraction: self.plan.attackers.poison_fraction,
                        target: self.plan.attackers.target_label,
                    },
                );
            }
        }
        Ok(actions)
    }

    fn record_signals(&mut self) {
        let mut poison_cells: BTreeMap<usize, Vec<Option<f64>>> = BTreeMap::new();
        for client in &self.clients {
            let mut cells = Vec::with_capacity(self.probes.len());
            for (&owner, probes) in &self.probes {
                let acc = measure_poison_accuracy(&client.params, probes)
                    .expect("probe list is nonempty");
                self.signals.push(owner, client.id, acc);
                cells.push(Some(acc));
            }
            poison_cells.insert(client.id, cells);
        }
        self.pending_poison_cells = poison_cells;
    }

    fn should_eval(&self) -> bool {
        !self.eval_set.is_empty()
            && (self.round % self.config.eval_every == 0
                || self.round + 1 == self.config.total_rounds)
    }

    fn evaluate_client(&self, client: &ClientState) -> Result<(f64, f64, f64)> {
        let mut correct = 0usize;
        let mut loss = 0.0;
        for im in &self.eval_set {
            let p = forward_classify(&client.params, &im.pixels)?;
            let pred = p
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            if pred == im.label {
                correct += 1;
            }
            loss -= p[im.label].max(1e-300).ln();
        }
        let acc = correct as f64 / self.eval_set.len() as f64;
        let mean_loss = loss / self.eval_set.len() as f64;
        let asr = attack_success_rate(
            &client.params,
            &self.eval_set,
            &self.plan.trigger,
            self.plan.attackers.target_label,
        )?;
        Ok((acc, mean_loss, asr))
    }

    /// Execute one round; returns `false` once all rounds have run.
    pub fn step(&mut self) -> Result<bool> {
        if self.round >= self.config.total_rounds {
            return Ok(false);
        }
        let actions = self.build_actions()?;
        let ctx = RoundContext {
            round: self.round,
            master_seed: self.master_seed,
            defense: self.defense,
            actions,
        };
        match self.config.protocol {
            Protocol::Dpsgd => run_round_dpsgd(
                &mut self.clients,
                &self.topology,
                &self.mixing,
                &self.config,
                &ctx,
            )?,
            Protocol::AsyncGossip => run_round_async(
                &mut self.clients,
                &self.topology,
                &self.mixing,
                &self.config,
                &ctx,
            )?,
        }

        self.pending_poison_cells.clear();
        if self.in_detection() {
            self.record_signals();
        }
        let eval = self.should_eval();
        let n_sig = self.log.sig_owners().len();
        let mut rows = Vec::with_capacity(self.clients.len());
        for client in &self.clients {
            let (main_acc, loss, asr) = if eval {
                let (a, l, s) = self.evaluate_client(client)?;
                (Some(a), Some(l), Some(s))
            } else {
                (None, None, None)
            };
            let poison_acc = self
                .pending_poison_cells
                .get(&client.id)
                .cloned()
                .unwrap_or_else(|| vec![None; n_sig]);
            rows.push(MetricsRow {
                round: self.round,
                client: client.id,
                main_acc,
                loss,
                poison_acc,
                asr,
            });
        }
        for row in rows {
            self.log.push(row);
        }
        self.round += 1;
        Ok(true)
    }

    /// Run every remaining round.
    pub fn run(&mut self) -> Result<()> {
        while self.step()? {}
        Ok(())
    }

    /// Run only the detection phase (rounds `0..ΔT`) — enough to read the
    /// recorded signal sequences, e.g. for regressor sample generation.
    pub fn run_detection(&mut self) -> Result<()> {
        while self.round < self.config.detection_rounds {
            self.step()?;
        }
        Ok(())
    }
}

/// One-call wrapper over [`SimEngine`] for tests and examples. The engine
/// API is preferable when partial logs matter.
#[allow(clippy::too_many_arguments)]
pub fn run_simulation(
    topology: Topology,
    shards: Vec<Vec<LabeledImage>>,
    test_set: Vec<LabeledImage>,
    plan: AttackPlan,
    defense: DefenseSpec,
    config: SimConfig,
    num_classes: usize,
    master_seed: u64,
) -> Result<MetricsLog> {
    let mut engine = SimEngine::new(
        topology, shards, test_set, plan, defense, config, num_classes, master_seed,
    )?;
    engine.run()?;
    Ok(engine.into_log())
}
