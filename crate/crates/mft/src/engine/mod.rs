//! Event-driven modified front tracking: the wave list lives in a slab-backed
//! linked list, interactions sit in a priority queue with per-slot version
//! stamps for lazy invalidation.

mod composite;
mod probe;
mod queue;
mod record;

pub use composite::{classify_passengers, combined_ls_speed, heavy_weight, Assignment};
pub use probe::{alpha_ray_probe, state_at, RayTrace};
pub use record::{EventClass, EventLog, LedgerEntry, RunRecord, Segment, SeriesPoint, StopReason, SupportSample};

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{MftError, Result};
use crate::grp::{emergent_widths, split_rarefaction, split_states, Jump};
use crate::model::{add3, norm3, scale3, sub3, PreconditionerTag, SchemeConfig, State, TempPhase, Vec3, Wave, WaveKind, WaveSequence};
use crate::psystem::GrpSolution;
use crate::system::System;
use queue::{Event, EventKind};

const CHECKPOINT_EVERY: usize = 1000;
const SUPPORT_EVERY: usize = 100;
const NEIGHBOR_SCAN: usize = 64;
const ACCUMULATION_RUN: usize = 10_000;
/// Fraction of the admissible width given up when a neighbour is shrunk, so
/// the reduced wave stays strictly clear of the interaction point.
pub const OVERLAP_MARGIN: f64 = 0.5;

/// Meeting point of two trajectories if `a` (on the left) is faster than `b`
/// and they meet after `now`.
pub fn pair_interaction_point(a: &Wave, b: &Wave, now: f64) -> Option<(f64, f64)> {
    if !(a.speed > b.speed) {
        return None;
    }
    let t = (b.x0 - a.x0 + a.speed * a.t0 - b.speed * b.t0) / (a.speed - b.speed);
    if t > now {
        Some((t, a.position_at(t)))
    } else {
        None
    }
}

/// Focus time `t0 - w(t0)/ẇ` of a compression that still has positive width.
pub fn self_collapse_time(w: &Wave, t0: f64) -> Option<f64> {
    if w.kind != WaveKind::Compression || !(w.rate < 0.0) {
        return None;
    }
    let width = w.width_at(t0);
    if width > 0.0 {
        Some(t0 - width / w.rate)
    } else {
        None
    }
}

/// Offsets of the two virtual edges from the trajectory, per unit width, for
/// a simple wave whose center lies on its trajectory: `(λ_e - s)/ẇ`, sorted.
pub fn edge_offsets_per_width(lam_left: f64, lam_right: f64, speed: f64, rate: f64) -> (f64, f64) {
    let a = (lam_left - speed) / rate;
    let b = (lam_right - speed) / rate;
    (a.min(b), a.max(b))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapReduction {
    pub wave: Wave,
    /// `w(t!+)/w(t!-)`, 1 when nothing had to change.
    pub factor: f64,
    /// Distance from `x!` to the neighbour's nearest virtual edge afterwards.
    pub gap: f64,
}

/// Shrinks a same-family simple neighbour whose virtual extent reaches the
/// interaction point `(x!, t!)`. Position and speed are kept; the center
/// slides along the trajectory.
pub fn reduce_overlap(sys: &System, neighbor: &Wave, x_bang: f64, t_bang: f64) -> OverlapReduction {
    let xp = neighbor.position_at(t_bang);
    let right_side = xp > x_bang;
    let lam_l = sys.lambda(neighbor.family, &neighbor.left);
    let lam_r = sys.lambda(neighbor.family, &neighbor.right);
    let w = neighbor.width_at(t_bang);
    let nearest = |lo: f64, hi: f64| if right_side { lo - x_bang } else { x_bang - hi };
    if !neighbor.kind.is_simple() || w <= 0.0 || neighbor.rate == 0.0 {
        return OverlapReduction { wave: neighbor.clone(), factor: 1.0, gap: (xp - x_bang).abs() };
    }
    let (lo, hi) = neighbor.edges_at(t_bang, lam_l, lam_r);
    let gap = nearest(lo, hi);
    if gap > 0.0 {
        return OverlapReduction { wave: neighbor.clone(), factor: 1.0, gap };
    }
    let (o_lo, o_hi) = edge_offsets_per_width(lam_l, lam_r, neighbor.speed, neighbor.rate);
    let reach = if right_side { -o_lo } else { o_hi };
    let w_new = if reach > 0.0 { w.min((xp - x_bang).abs() / reach) * (1.0 - OVERLAP_MARGIN) } else { w };
    let mut wave = neighbor.clone();
    wave.tc = t_bang - w_new / wave.rate;
    wave.xc = wave.position_at(wave.tc);
    let (lo, hi) = wave.edges_at(t_bang, lam_l, lam_r);
    OverlapReduction { wave, factor: w_new / w, gap: nearest(lo, hi) }
}

/// Family whose width must be zeroed because its emergent compression is too
/// strong (`ζ < -ε^{e_c}`) or too weak (`-ε^{e_w} < ζ < 0`); strongest first.
pub fn compression_to_force(sol: &GrpSolution, cfg: &SchemeConfig) -> Option<usize> {
    let (eps_c, eps_w) = (cfg.eps_c(), cfg.eps_w());
    (0..sol.kinds.len())
        .filter(|&k| sol.kinds[k] == Some(WaveKind::Compression))
        .filter(|&k| {
            let z = sol.strengths[k];
            z < -eps_c || (z > -eps_w && z < 0.0)
        })
        .max_by(|&a, &b| sol.strengths[a].abs().total_cmp(&sol.strengths[b].abs()))
}

/// Solves the gRP and collapses out-of-band compressions into shocks, one at
/// a time, until every surviving compression lies in `[-ε^{e_c}, -ε^{e_w}]`.
pub fn enforce_compression_thresholds(sys: &System, wl: State, wr: State, widths: &mut [f64], cfg: &SchemeConfig) -> Result<GrpSolution> {
    for _ in 0..=sys.n() {
        let sol = sys.solve_grp(wl, wr, widths)?;
        match compression_to_force(&sol, cfg) {
            Some(k) => widths[k] = 0.0,
            None => return Ok(sol),
        }
    }
    Err(MftError::Invariant("compression thresholding did not terminate".into()))
}

fn jump_wave(id: u64, j: &Jump, precond: PreconditionerTag, x: f64, t: f64, xc: f64, tc: f64) -> Wave {
    Wave {
        id,
        family: j.family,
        kind: j.kind,
        strength: j.strength,
        left: j.left,
        right: j.right,
        speed: j.speed,
        x0: x,
        t0: t,
        xc,
        tc,
        rate: j.rate,
        born: t,
        next_interaction: f64::INFINITY,
        temp: None,
        carrier: None,
        heavy: false,
        precond,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiRarefaction {
    pub group: u64,
    pub members: Vec<Wave>,
    pub xc: f64,
    pub tc: f64,
    pub t_revert: f64,
}

/// Splits a moderate rarefaction `l -> r` of positive width emerging at
/// `(x!, t!)`. Members share the virtual center found by back-projecting the
/// unsplit wave along its least-squares trajectory, leave `(x!, t!)` with
/// temporary speeds, and join their centered trajectories at `t#`.
#[allow(clippy::too_many_arguments)]
pub fn make_multirarefaction(
    sys: &System,
    family: usize,
    l: State,
    r: State,
    width: f64,
    x_bang: f64,
    t_bang: f64,
    cfg: &SchemeConfig,
    group: u64,
    first_id: u64,
) -> Result<MultiRarefaction> {
    let whole = Jump::new(sys, family, WaveKind::Rarefaction, l, r);
    if !(width > 0.0 && whole.rate > 0.0) {
        return Err(MftError::DegenerateWidth);
    }
    let pieces = split_rarefaction(whole.strength, cfg.eps_r(), cfg.kappa)?;
    let m = (pieces.len() / 2).max(1) as f64;
    let lag = width / whole.rate;
    let tc = t_bang - lag;
    let xc = x_bang - whole.speed * lag;
    let t_revert = t_bang + cfg.t_sharp_factor * lag / (m * cfg.eps_r());
    let stretch = lag / (t_revert - t_bang);
    let precond = sys.preconditioner();
    let members = split_states(sys, family, l, r, &pieces)
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let j = Jump::new(sys, family, WaveKind::Rarefaction, a, b);
            let mut w = jump_wave(first_id + i as u64, &j, precond, x_bang, t_bang, xc, tc);
            w.speed = j.speed + (j.speed - whole.speed) * stretch;
            w.temp = Some(TempPhase { group, target_speed: j.speed, t_revert });
            w
        })
        .collect();
    Ok(MultiRarefaction { group, members, xc, tc, t_revert })
}

#[derive(Clone, Debug)]
struct Slot {
    wave: Wave,
    version: u64,
    alive: bool,
    prev: Option<usize>,
    next: Option<usize>,
    res: f64,
    raw: f64,
    seg_t0: f64,
    seg_x0: f64,
}

pub struct Engine {
    sys: System,
    cfg: SchemeConfig,
    slots: Vec<Slot>,
    free: Vec<usize>,
    head: Option<usize>,
    leftmost: State,
    t: f64,
    queue: BinaryHeap<Reverse<Event>>,
    seq: u64,
    next_id: u64,
    next_group: u64,
    groups: HashMap<u64, Vec<(usize, u64)>>,
    tol_x: f64,
    tol_t: f64,
    variation: f64,
    residual: f64,
    raw_residual: f64,
    w_h: f64,
    residual_integral: f64,
    snap_drift: f64,
    m0: Vec3,
    flux_jump: Vec3,
    last_event_t: f64,
    short_gaps: usize,
    initial: WaveSequence,
    events: Vec<EventLog>,
    series: Vec<SeriesPoint>,
    segments: Vec<Segment>,
    ledger: Vec<LedgerEntry>,
    support: Vec<SupportSample>,
    accumulation_flag: bool,
    first_shock_rarefaction: Option<usize>,
    potential: Option<Box<dyn Fn(&WaveSequence) -> f64>>,
}

fn wave_residuals(sys: &System, w: &Wave) -> (f64, f64) {
    let (q, f) = sys.preconditioned_jumps(w.precond, &w.left, &w.right);
    let pre = norm3(sub3(f, scale3(w.speed, q)));
    (pre, norm3(sys.raw_residual(&w.left, &w.right, w.speed)))
}

impl Engine {
    pub fn new(sys: System, cfg: SchemeConfig, seq: WaveSequence) -> Result<Engine> {
        cfg.validate()?;
        let length = cfg.length();
        let mut cmax = sys.max_speed(&seq.leftmost);
        for w in &seq.waves {
            cmax = cmax.max(sys.max_speed(&w.right));
        }
        let mut e = Engine {
            sys,
            cfg,
            slots: Vec::with_capacity(seq.waves.len() * 2),
            free: Vec::new(),
            head: None,
            leftmost: seq.leftmost,
            t: seq.t,
            queue: BinaryHeap::new(),
            seq: 0,
            next_id: seq.waves.iter().map(|w| w.id + 1).max().unwrap_or(0),
            next_group: 0,
            groups: HashMap::new(),
            tol_x: 1e-11 * length,
            tol_t: 1e-12 * length / cmax.max(1e-300),
            variation: 0.0,
            residual: 0.0,
            raw_residual: 0.0,
            w_h: 0.0,
            residual_integral: 0.0,
            snap_drift: 0.0,
            m0: [0.0; 3],
            flux_jump: sub3(sys.f(&seq.rightmost()), sys.f(&seq.leftmost)),
            last_event_t: seq.t,
            short_gaps: 0,
            initial: seq.clone(),
            events: Vec::new(),
            series: Vec::new(),
            segments: Vec::new(),
            ledger: Vec::new(),
            support: Vec::new(),
            accumulation_flag: false,
            first_shock_rarefaction: None,
            potential: None,
        };
        let mut prev: Option<usize> = None;
        for w in seq.waves {
            let s = e.alloc(w);
            e.slots[s].prev = prev;
            match prev {
                Some(p) => e.slots[p].next = Some(s),
                None => e.head = Some(s),
            }
            prev = Some(s);
        }
        e.recompute_sums();
        e.m0 = e.moment();
        for s in e.chain() {
            e.schedule_collapse(s);
            if let Some(n) = e.slots[s].next {
                e.schedule_pair(s, n);
            }
            if let Some(tp) = e.slots[s].wave.temp {
                e.groups.entry(tp.group).or_default().push((s, e.slots[s].wave.id));
                e.next_group = e.next_group.max(tp.group + 1);
            }
        }
        for (&g, members) in &e.groups.clone() {
            let t_rev = e.slots[members[0].0].wave.temp.map(|t| t.t_revert).unwrap_or(e.t);
            e.push(t_rev, e.slots[members[0].0].wave.position_at(t_rev), EventKind::Revert { group: g });
        }
        e.push_series();
        e.push_ledger();
        Ok(e)
    }

    /// Evaluates `f` on the sequence after every event and logs it in the
    /// time series.
    pub fn with_potential(mut self, f: Box<dyn Fn(&WaveSequence) -> f64>) -> Self {
        self.potential = Some(f);
        if let Some(p) = self.series.last_mut() {
            p.potential = self.potential.as_ref().map(|f| f(&self.initial));
        }
        self
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn system(&self) -> &System {
        &self.sys
    }

    fn alloc(&mut self, wave: Wave) -> usize {
        let (res, raw) = wave_residuals(&self.sys, &wave);
        let seg_x0 = wave.position_at(self.t);
        let seg_t0 = self.t.max(wave.t0.min(self.t));
        let slot = Slot { wave, version: 0, alive: true, prev: None, next: None, res, raw, seg_t0, seg_x0 };
        match self.free.pop() {
            Some(i) => {
                let v = self.slots[i].version + 1;
                self.slots[i] = Slot { version: v, ..slot };
                i
            }
            None => {
                self.slots.push(slot);
                self.slots.len() - 1
            }
        }
    }

    fn chain(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.head;
        while let Some(s) = cur {
            out.push(s);
            cur = self.slots[s].next;
        }
        out
    }

    fn pos(&self, s: usize, t: f64) -> f64 {
        self.slots[s].wave.position_at(t)
    }

    fn push(&mut self, t: f64, x: f64, kind: EventKind) {
        self.seq += 1;
        self.queue.push(Reverse(Event { t, x, seq: self.seq, kind }));
    }

    fn schedule_pair(&mut self, a: usize, b: usize) {
        let (sa, sb) = (self.slots[a].wave.speed, self.slots[b].wave.speed);
        if !(sa > sb) {
            return;
        }
        let (xa, xb) = (self.pos(a, self.t), self.pos(b, self.t));
        let t = self.t + ((xb - xa) / (sa - sb)).max(0.0);
        let x = xa + sa * (t - self.t);
        let (va, vb) = (self.slots[a].version, self.slots[b].version);
        for s in [a, b] {
            let w = &mut self.slots[s].wave;
            w.next_interaction = w.next_interaction.min(t);
        }
        self.push(t, x, EventKind::Pair { a, va, b, vb });
    }

    fn schedule_collapse(&mut self, s: usize) {
        let w = &self.slots[s].wave;
        if w.kind != WaveKind::Compression || !(w.rate < 0.0) {
            return;
        }
        let t = w.tc.max(self.t);
        let x = w.position_at(t);
        let version = self.slots[s].version;
        let w = &mut self.slots[s].wave;
        w.next_interaction = w.next_interaction.min(t);
        self.push(t, x, EventKind::Collapse { slot: s, version });
    }

    /// Invalidates and reschedules everything involving slot `s` after its
    /// geometry or trajectory changed.
    fn touch(&mut self, s: usize) {
        self.slots[s].version += 1;
        self.slots[s].wave.next_interaction = f64::INFINITY;
        if let Some(p) = self.slots[s].prev {
            self.schedule_pair(p, s);
        }
        if let Some(n) = self.slots[s].next {
            self.schedule_pair(s, n);
        }
        self.schedule_collapse(s);
    }

    /// Closes the current straight piece of a trajectory at time `t`.
    fn close_segment(&mut self, s: usize, t: f64) {
        let slot = &self.slots[s];
        let w = &slot.wave;
        self.segments.push(Segment {
            id: w.id,
            family: w.family,
            kind: w.kind,
            compressive: w.is_compressive(),
            t0: slot.seg_t0,
            x0: slot.seg_x0,
            t1: t,
            x1: w.position_at(t),
            left: w.left,
            right: w.right,
        });
        let x = w.position_at(t);
        let slot = &mut self.slots[s];
        slot.seg_t0 = t;
        slot.seg_x0 = x;
    }

    fn recompute_sums(&mut self) {
        let (mut v, mut r, mut raw, mut wh) = (0.0, 0.0, 0.0, 0.0);
        for s in self.chain() {
            let slot = &self.slots[s];
            v += slot.wave.strength.abs();
            r += slot.res;
            raw += slot.raw;
            if slot.wave.heavy {
                wh += slot.wave.strength.abs();
            }
        }
        self.variation = v;
        self.residual = r;
        self.raw_residual = raw;
        self.w_h = wh;
    }

    /// `Σ x_j [q]_j` at the current time.
    fn moment(&self) -> Vec3 {
        let mut m = [0.0; 3];
        for s in self.chain() {
            let w = &self.slots[s].wave;
            let (q, _) = self.sys.jumps(&w.left, &w.right);
            m = add3(m, scale3(w.position_at(self.t), q));
        }
        m
    }

    fn push_series(&mut self) {
        let count = self.slots.len() - self.free.len();
        let potential = self.potential.as_ref().map(|f| f(&self.snapshot()));
        self.series.push(SeriesPoint {
            t: self.t,
            variation: self.variation,
            residual_norm: self.residual,
            wave_count: count,
            w_h: self.w_h,
            potential,
        });
    }

    fn push_ledger(&mut self) {
        let drift = add3(sub3(self.m0, self.moment()), scale3(self.t - self.initial.t, self.flux_jump));
        self.ledger.push(LedgerEntry {
            t: self.t,
            drift,
            drift_norm: norm3(drift),
            residual_integral: self.residual_integral,
            snap_tolerance: self.snap_drift,
        });
    }

    fn push_support(&mut self) {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in self.chain() {
            let w = &self.slots[s].wave;
            if w.born > self.initial.t {
                let x = w.position_at(self.t);
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        if lo <= hi {
            self.support.push(SupportSample { t: self.t, event_index: self.events.len(), lo, hi });
        }
    }

    /// Current wave sequence.
    pub fn snapshot(&self) -> WaveSequence {
        WaveSequence { leftmost: self.leftmost, waves: self.chain().into_iter().map(|s| self.slots[s].wave.clone()).collect(), t: self.t }
    }

    fn advance_clock(&mut self, t: f64) {
        if t > self.t {
            self.residual_integral += self.raw_residual * (t - self.t);
            self.t = t;
        }
    }

    fn checkpoint(&mut self) -> Result<()> {
        self.recompute_sums();
        self.push_ledger();
        self.push_support();
        self.snapshot().validate(1e-9 * self.cfg.length())
    }

    /// Processes events until `t_end` or the event budget.
    pub fn run(mut self) -> RunRecord {
        let t_end = self.cfg.t_end;
        let stop = loop {
            let Some(Reverse(ev)) = self.queue.pop() else { break StopReason::EndTime };
            if ev.t > t_end {
                break StopReason::EndTime;
            }
            if !self.is_current(&ev) {
                continue;
            }
            if self.events.len() >= self.cfg.max_events {
                break StopReason::Budget;
            }
            self.advance_clock(ev.t);
            if let Err(e) = self.dispatch(ev) {
                break StopReason::Failed(e);
            }
            let gap = ev.t - self.last_event_t;
            self.last_event_t = ev.t;
            if gap < 1e3 * self.tol_t {
                self.short_gaps += 1;
                if self.short_gaps >= ACCUMULATION_RUN {
                    self.accumulation_flag = true;
                }
            } else {
                self.short_gaps = 0;
            }
            let n = self.events.len();
            if n.is_multiple_of(SUPPORT_EVERY) {
                self.push_support();
            }
            if n.is_multiple_of(CHECKPOINT_EVERY) {
                if let Err(e) = self.checkpoint() {
                    break StopReason::Failed(e);
                }
            }
        };
        if stop == StopReason::EndTime {
            self.advance_clock(t_end);
        }
        self.finish(stop)
    }

    fn finish(mut self, stop: StopReason) -> RunRecord {
        self.recompute_sums();
        self.push_ledger();
        self.push_support();
        self.push_series();
        let t = self.t;
        for s in self.chain() {
            self.close_segment(s, t);
        }
        let final_sequence = self.snapshot();
        RunRecord {
            system: self.sys,
            config: self.cfg,
            initial: self.initial,
            final_sequence,
            events: self.events,
            series: self.series,
            segments: self.segments,
            ledger: self.ledger,
            support: self.support,
            stop,
            t_final: t,
            accumulation_flag: self.accumulation_flag,
            first_shock_rarefaction: self.first_shock_rarefaction,
        }
    }

    fn is_current(&self, ev: &Event) -> bool {
        match ev.kind {
            EventKind::Pair { a, va, b, vb } => {
                let (sa, sb) = (&self.slots[a], &self.slots[b]);
                sa.alive && sb.alive && sa.version == va && sb.version == vb && sa.next == Some(b)
            }
            EventKind::Collapse { slot, version } => {
                let s = &self.slots[slot];
                s.alive && s.version == version && s.wave.kind == WaveKind::Compression
            }
            EventKind::Revert { group } => self.groups.contains_key(&group),
        }
    }

    fn dispatch(&mut self, ev: Event) -> Result<()> {
        match ev.kind {
            EventKind::Pair { a, b, .. } => self.resolve(EventClass::Pair, a, b, ev.x),
            EventKind::Collapse { slot, .. } => self.resolve(EventClass::Collapse, slot, slot, ev.x),
            EventKind::Revert { group } => {
                self.revert(group, ev.x);
                Ok(())
            }
        }
    }

    fn revert(&mut self, group: u64, x: f64) {
        let members = self.groups.remove(&group).unwrap_or_default();
        let t = self.t;
        let mut ids = Vec::new();
        let mut live = Vec::new();
        for (s, id) in members {
            let slot = &self.slots[s];
            if !slot.alive || slot.wave.id != id || slot.wave.temp.map(|p| p.group) != Some(group) {
                continue;
            }
            self.close_segment(s, t);
            let w = &mut self.slots[s].wave;
            let x_now = w.position_at(t);
            let target = w.temp.take().map(|p| p.target_speed).unwrap_or(w.speed);
            w.x0 = x_now;
            w.t0 = t;
            w.speed = target;
            let (res, raw) = wave_residuals(&self.sys, &self.slots[s].wave);
            let slot = &mut self.slots[s];
            self.residual += res - slot.res;
            self.raw_residual += raw - slot.raw;
            slot.res = res;
            slot.raw = raw;
            ids.push(id);
            live.push(s);
        }
        for &s in &live {
            self.touch(s);
        }
        let strengths: Vec<f64> = live.iter().map(|&s| self.slots[s].wave.strength).collect();
        let speeds: Vec<f64> = live.iter().map(|&s| self.slots[s].wave.speed).collect();
        let families: Vec<usize> = live.iter().map(|&s| self.slots[s].wave.family).collect();
        let kinds: Vec<WaveKind> = live.iter().map(|&s| self.slots[s].wave.kind).collect();
        let widths: Vec<f64> = live.iter().map(|&s| self.slots[s].wave.width_at(t)).collect();
        self.log(EventLog {
            index: self.events.len(),
            t,
            x,
            kind: EventClass::Revert,
            in_ids: ids.clone(),
            in_kinds: kinds,
            in_families: families.clone(),
            in_strengths: strengths.clone(),
            out_ids: ids,
            out_families: families,
            out_strengths: strengths,
            out_speeds: speeds,
            out_widths: widths,
            variation_after: 0.0,
            residual_norm_after: 0.0,
            out_logical: 0,
        });
    }

    fn log(&mut self, mut row: EventLog) {
        row.variation_after = self.variation;
        row.residual_norm_after = self.residual;
        self.events.push(row);
        self.push_series();
    }

    /// Nearest wave of `family` scanning away from `from` (exclusive), if it
    /// is a simple wave with positive width.
    fn simple_neighbor(&self, from: usize, rightwards: bool, family: usize) -> Option<usize> {
        let step = |s: usize| if rightwards { self.slots[s].next } else { self.slots[s].prev };
        let mut cur = step(from);
        for _ in 0..NEIGHBOR_SCAN {
            let s = cur?;
            let w = &self.slots[s].wave;
            if w.family == family {
                return (w.kind.is_simple() && w.width_at(self.t) > 0.0).then_some(s);
            }
            cur = step(s);
        }
        None
    }

    fn replace_wave(&mut self, s: usize, wave: Wave) {
        let (res, raw) = wave_residuals(&self.sys, &wave);
        let slot = &mut self.slots[s];
        self.residual += res - slot.res;
        self.raw_residual += raw - slot.raw;
        slot.res = res;
        slot.raw = raw;
        slot.wave = wave;
    }

    fn resolve(&mut self, class: EventClass, a: usize, b: usize, x_hint: f64) -> Result<()> {
        let t = self.t;
        let sys = self.sys;
        let n = sys.n();
        let x_bang = x_hint;
        let (mut first, mut last) = (a, b);
        while let Some(p) = self.slots[first].prev {
            if (self.pos(p, t) - x_bang).abs() <= self.tol_x {
                first = p;
            } else {
                break;
            }
        }
        while let Some(q) = self.slots[last].next {
            if (self.pos(q, t) - x_bang).abs() <= self.tol_x {
                last = q;
            } else {
                break;
            }
        }
        let mut incident = vec![first];
        while *incident.last().unwrap() != last {
            let nx = self.slots[*incident.last().unwrap()].next.expect("contiguous chain");
            incident.push(nx);
        }
        let inc: Vec<Wave> = incident.iter().map(|&s| self.slots[s].wave.clone()).collect();
        let wl = inc[0].left;
        let wr = inc.last().unwrap().right;
        let contact = (n == 3).then_some(1);

        let mut widths = if class == EventClass::Collapse {
            vec![0.0; n]
        } else {
            let refs: Vec<&Wave> = inc.iter().collect();
            emergent_widths(n, contact, &refs, t)
        };

        // shrink same-family neighbours reaching the interaction point
        let mut gaps = vec![(f64::INFINITY, f64::INFINITY); n];
        let mut touched = Vec::new();
        for k in 0..n {
            if Some(k) == contact {
                continue;
            }
            for (side, from) in [(false, first), (true, last)] {
                let Some(s) = self.simple_neighbor(from, side, k) else { continue };
                let red = reduce_overlap(&sys, &self.slots[s].wave, x_bang, t);
                if red.factor < 1.0 {
                    self.replace_wave(s, red.wave);
                    touched.push(s);
                }
                if side {
                    gaps[k].1 = red.gap;
                } else {
                    gaps[k].0 = red.gap;
                }
            }
        }

        let mut passes = 0;
        let sol = loop {
            passes += 1;
            if passes > 2 * n + 2 {
                return Err(MftError::Invariant("width adjustment did not settle".into()));
            }
            let sol = sys.solve_grp(wl, wr, &widths)?;
            if let Some(k) = compression_to_force(&sol, &self.cfg) {
                widths[k] = 0.0;
                continue;
            }
            let mut again = false;
            for k in 0..n {
                let Some(kind) = sol.kinds[k] else { continue };
                if !kind.is_simple() || widths[k] <= 0.0 {
                    continue;
                }
                let j = Jump::new(&sys, k, kind, sol.states[k], sol.states[k + 1]);
                if j.rate == 0.0 {
                    widths[k] = 0.0;
                    again |= kind == WaveKind::Compression;
                    continue;
                }
                let (o_lo, o_hi) = edge_offsets_per_width(sys.lambda(k, &j.left), sys.lambda(k, &j.right), j.speed, j.rate);
                let mut bound = f64::INFINITY;
                let (gl, gr) = gaps[k];
                if o_lo < 0.0 {
                    bound = bound.min(if gl <= self.tol_x { 0.0 } else { gl / -o_lo });
                }
                if o_hi > 0.0 {
                    bound = bound.min(if gr <= self.tol_x { 0.0 } else { gr / o_hi });
                }
                if bound < widths[k] {
                    widths[k] = bound;
                    if bound * (o_hi - o_lo) <= self.tol_x {
                        widths[k] = 0.0;
                        again |= kind == WaveKind::Compression;
                    }
                }
            }
            if !again {
                break sol;
            }
        };

        // emergent waves
        let precond = sys.preconditioner();
        let mut out: Vec<Wave> = Vec::new();
        let mut new_groups: Vec<(u64, f64)> = Vec::new();
        let mut out_logical = 0;
        for k in 0..n {
            let Some(kind) = sol.kinds[k] else { continue };
            out_logical += 1;
            let (l, r) = (sol.states[k], sol.states[k + 1]);
            let zeta = sol.strengths[k];
            if kind == WaveKind::Rarefaction && zeta > self.cfg.eps_r() {
                let whole_rate = sys.lambda(k, &r) - sys.lambda(k, &l);
                if widths[k] > 0.0 && whole_rate > 0.0 {
                    let group = self.next_group;
                    self.next_group += 1;
                    let mr = make_multirarefaction(&sys, k, l, r, widths[k], x_bang, t, &self.cfg, group, self.next_id)?;
                    self.next_id += mr.members.len() as u64;
                    new_groups.push((group, mr.t_revert));
                    out.extend(mr.members);
                } else {
                    let pieces = split_rarefaction(zeta, self.cfg.eps_r(), self.cfg.kappa)?;
                    for (pl, pr) in split_states(&sys, k, l, r, &pieces) {
                        let j = Jump::new(&sys, k, kind, pl, pr);
                        out.push(jump_wave(self.next_id, &j, precond, x_bang, t, x_bang, t));
                        self.next_id += 1;
                    }
                }
                continue;
            }
            let j = Jump::new(&sys, k, kind, l, r);
            let (xc, tc) = if kind.is_simple() && widths[k] > 0.0 && j.rate != 0.0 {
                let lag = widths[k] / j.rate;
                (x_bang - j.speed * lag, t - lag)
            } else {
                (x_bang, t)
            };
            out.push(jump_wave(self.next_id, &j, precond, x_bang, t, xc, tc));
            self.next_id += 1;
        }
        if self.cfg.composites_enabled && n == 3 {
            self.assign_composites(&mut out);
        }

        // bookkeeping for the ledger: snapping incident waves onto x!
        let mut snap = [0.0; 3];
        for w in &inc {
            let (q, _) = sys.jumps(&w.left, &w.right);
            snap = add3(snap, scale3(w.position_at(t) - x_bang, q));
        }
        self.snap_drift += norm3(snap);

        // splice
        let before = self.slots[first].prev;
        let after = self.slots[last].next;
        for &s in &incident {
            self.close_segment(s, t);
            let slot = &mut self.slots[s];
            self.variation -= slot.wave.strength.abs();
            self.residual -= slot.res;
            self.raw_residual -= slot.raw;
            if slot.wave.heavy {
                self.w_h -= slot.wave.strength.abs();
            }
            slot.alive = false;
            slot.version += 1;
            slot.prev = None;
            slot.next = None;
            self.free.push(s);
        }
        let mut prev = before;
        let mut new_slots = Vec::with_capacity(out.len());
        for w in out {
            self.variation += w.strength.abs();
            if w.heavy {
                self.w_h += w.strength.abs();
            }
            let s = self.alloc(w);
            self.residual += self.slots[s].res;
            self.raw_residual += self.slots[s].raw;
            self.slots[s].prev = prev;
            match prev {
                Some(p) => self.slots[p].next = Some(s),
                None => self.head = Some(s),
            }
            prev = Some(s);
            new_slots.push(s);
        }
        match prev {
            Some(p) => self.slots[p].next = after,
            None => self.head = after,
        }
        if let Some(q) = after {
            self.slots[q].prev = prev;
        }
        if self.variation < 0.0 {
            self.variation = 0.0;
        }

        for (group, t_rev) in new_groups {
            let members: Vec<(usize, u64)> = new_slots
                .iter()
                .filter(|&&s| self.slots[s].wave.temp.map(|p| p.group) == Some(group))
                .map(|&s| (s, self.slots[s].wave.id))
                .collect();
            let x_rev = self.slots[members[members.len() / 2].0].wave.position_at(t_rev);
            self.groups.insert(group, members);
            self.push(t_rev, x_rev, EventKind::Revert { group });
        }

        // reschedule
        match (new_slots.first(), new_slots.last()) {
            (Some(&f), Some(&l)) => {
                if let Some(p) = before {
                    self.schedule_pair(p, f);
                }
                for w in new_slots.windows(2) {
                    self.schedule_pair(w[0], w[1]);
                }
                if let Some(q) = after {
                    self.schedule_pair(l, q);
                }
                for &s in &new_slots {
                    self.schedule_collapse(s);
                }
            }
            _ => {
                if let (Some(p), Some(q)) = (before, after) {
                    self.schedule_pair(p, q);
                }
            }
        }
        for s in touched {
            if self.slots[s].alive {
                self.touch(s);
            }
        }

        let index = self.events.len();
        if self.first_shock_rarefaction.is_none()
            && inc.iter().any(|w| w.kind == WaveKind::Shock)
            && inc.iter().any(|w| w.kind == WaveKind::Rarefaction)
        {
            self.first_shock_rarefaction = Some(index);
        }
        let outs: Vec<&Wave> = new_slots.iter().map(|&s| &self.slots[s].wave).collect();
        let row = EventLog {
            index,
            t,
            x: x_bang,
            kind: class,
            in_ids: inc.iter().map(|w| w.id).collect(),
            in_kinds: inc.iter().map(|w| w.kind).collect(),
            in_families: inc.iter().map(|w| w.family).collect(),
            in_strengths: inc.iter().map(|w| w.strength).collect(),
            out_ids: outs.iter().map(|w| w.id).collect(),
            out_families: outs.iter().map(|w| w.family).collect(),
            out_strengths: outs.iter().map(|w| w.strength).collect(),
            out_speeds: outs.iter().map(|w| w.speed).collect(),
            out_widths: outs.iter().map(|w| w.width_at(t)).collect(),
            variation_after: 0.0,
            residual_norm_after: 0.0,
            out_logical,
        };
        self.log(row);
        Ok(())
    }

    /// Weak waves emerging together ride with a carrier; heavy passengers
    /// make the whole composite move with the combined least-squares speed.
    fn assign_composites(&self, out: &mut [Wave]) {
        let strengths: Vec<f64> = out.iter().map(|w| w.strength).collect();
        let asg = classify_passengers(&strengths, self.cfg.eps_p(), self.cfg.q());
        for c in 0..out.len() {
            if asg[c].carrier != c || out[c].temp.is_some() {
                continue;
            }
            let members: Vec<usize> = (0..out.len()).filter(|&j| asg[j].carrier == c).collect();
            if members.len() < 2 {
                continue;
            }
            let heavy = members.iter().any(|&j| asg[j].heavy);
            let speed = if heavy {
                let jumps: Vec<(Vec3, Vec3)> =
                    members.iter().map(|&j| self.sys.preconditioned_jumps(out[j].precond, &out[j].left, &out[j].right)).collect();
                combined_ls_speed(&jumps)
            } else {
                out[c].speed
            };
            let carrier_id = out[c].id;
            for &j in &members {
                out[j].speed = speed;
                if j != c {
                    out[j].carrier = Some(carrier_id);
                    out[j].heavy = asg[j].heavy;
                }
            }
        }
    }
}

/// Runs the scheme from `seq` until `cfg.t_end`.
pub fn advance(sys: System, cfg: &SchemeConfig, seq: WaveSequence) -> Result<RunRecord> {
    Ok(Engine::new(sys, cfg.clone(), seq)?.run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::build_dgrs;

    fn bare(x0: f64, speed: f64) -> Wave {
        let w = State::new(1.0, 0.0);
        Wave {
            id: 0,
            family: 1,
            kind: WaveKind::Shock,
            strength: 0.0,
            left: w,
            right: w,
            speed,
            x0,
            t0: 0.0,
            xc: x0,
            tc: 0.0,
            rate: 0.0,
            born: 0.0,
            next_interaction: f64::INFINITY,
            temp: None,
            carrier: None,
            heavy: false,
            precond: PreconditionerTag::PSystemAR,
        }
    }

    #[test]
    fn pair_points() {
        assert_eq!(pair_interaction_point(&bare(0.0, 2.0), &bare(4.0, -2.0), 0.0), Some((1.0, 2.0)));
        assert_eq!(pair_interaction_point(&bare(0.0, 1.0), &bare(1.0, 1.0), 0.0), None);
        assert_eq!(pair_interaction_point(&bare(0.0, 1.0), &bare(1.0, 0.5), 0.0), Some((2.0, 2.0)));
        assert_eq!(pair_interaction_point(&bare(0.0, 1.0), &bare(1.0, 0.5), 3.0), None);
    }

    #[test]
    fn collapse_times() {
        let mut w = bare(0.0, 0.0);
        w.kind = WaveKind::Compression;
        w.rate = -0.25;
        w.tc = 3.0; // width 0.5 at t = 1
        assert!((w.width_at(1.0) - 0.5).abs() < 1e-15);
        assert_eq!(self_collapse_time(&w, 1.0), Some(3.0));
        w.kind = WaveKind::Rarefaction;
        w.rate = 0.25;
        assert_eq!(self_collapse_time(&w, 1.0), None);
        assert_eq!(self_collapse_time(&bare(0.0, 1.0), 1.0), None);
    }

    fn sys() -> System {
        System::psystem(1.4, 1.0)
    }

    fn forward_rarefaction(x: f64, width: f64, zeta: f64) -> Wave {
        let s = sys();
        let l = State::new(1.0, 0.0);
        let r = s.simple_step(1, &l, zeta);
        let j = Jump::new(&s, 1, WaveKind::Rarefaction, l, r);
        let lag = width / j.rate;
        jump_wave(7, &j, PreconditionerTag::PSystemAR, x, 0.0, x - j.speed * lag, -lag)
    }

    #[test]
    fn overlap_is_removed() {
        let s = sys();
        let w = forward_rarefaction(0.0, 0.3, 0.05);
        let (lo, _) = w.edges_at(0.0, s.lambda(1, &w.left), s.lambda(1, &w.right));
        let x_bang = lo + 0.1;
        let red = reduce_overlap(&s, &w, x_bang, 0.0);
        let ratio = (w.x0 - x_bang) / (w.x0 - lo);
        assert!(red.factor < ratio);
        assert!(red.gap > 0.0);
        assert_eq!(red.wave.speed, w.speed);
        assert_eq!(red.wave.position_at(0.5), w.position_at(0.5));
        // edge exactly at x!
        let red = reduce_overlap(&s, &w, lo, 0.0);
        assert!(red.factor < 1.0 && red.gap > 0.0);
        // shocks cannot overlap
        let red = reduce_overlap(&s, &bare(1.0, 1.0), 0.0, 0.0);
        assert_eq!(red.factor, 1.0);
    }

    #[test]
    fn multirarefaction_geometry() {
        let s = sys();
        let cfg = SchemeConfig { epsilon: 0.1, kappa: 0.3, ..SchemeConfig::default() };
        let l = State::new(1.0, 0.0);
        let r = s.simple_step(1, &l, 0.25);
        let rate = s.lambda(1, &r) - s.lambda(1, &l);
        let mr = make_multirarefaction(&s, 1, l, r, 0.02 * rate, 0.3, 1.0, &cfg, 0, 10).unwrap();
        assert_eq!(mr.members.len(), 3);
        assert!((mr.t_revert - 1.0 - 0.2).abs() < 1e-12);
        let total: f64 = mr.members.iter().map(|w| w.strength).sum();
        assert!((total - 0.25).abs() < 1e-12);
        assert_eq!(mr.members[2].right, r);
        for w in &mr.members {
            assert_eq!(w.position_at(1.0), 0.3);
            let target = w.temp.unwrap().target_speed;
            let on_target = mr.xc + target * (mr.t_revert - mr.tc);
            assert!((w.position_at(mr.t_revert) - on_target).abs() < 1e-12);
        }
    }

    #[test]
    fn compression_band() {
        let cfg = SchemeConfig::default();
        let s = sys();
        let l = State::new(1.0, 0.0);
        for (zeta, forced) in [(-2.0 * cfg.eps_c(), true), (-0.5 * cfg.eps_w(), true), (-0.5 * (cfg.eps_c() + cfg.eps_w()), false)] {
            let r = s.simple_step(1, &l, zeta);
            let mut widths = vec![0.0, 0.1];
            let sol = enforce_compression_thresholds(&s, l, r, &mut widths, &cfg).unwrap();
            assert_eq!(widths[1] == 0.0, forced, "ζ = {zeta}");
            assert_eq!(sol.kinds[1], Some(if forced { WaveKind::Shock } else { WaveKind::Compression }));
        }
    }

    fn seq_of(waves: Vec<Wave>, leftmost: State) -> WaveSequence {
        WaveSequence { leftmost, waves, t: 0.0 }
    }

    fn riemann_waves(s: &System, l: State, r: State, x: f64, first_id: u64) -> Vec<Wave> {
        let cfg = SchemeConfig::default();
        let sol = s.solve_grp(l, r, &[0.0, 0.0]).unwrap();
        let d = build_dgrs(s, &sol, &[0.0, 0.0], &cfg).unwrap();
        d.jumps.iter().enumerate().map(|(i, j)| jump_wave(first_id + i as u64, j, PreconditionerTag::PSystemAR, x, 0.0, x, 0.0)).collect()
    }

    #[test]
    fn single_shock_has_no_events() {
        let s = sys();
        let r = State::new(1.0, 0.0);
        let (l, _) = crate::psystem::PSystem::new(1.4, 1.0).shock_to(r, 2.0, crate::psystem::Direction::Forward).unwrap();
        let waves = riemann_waves(&s, l, r, 0.5, 0);
        assert_eq!(waves.len(), 1);
        let rec = advance(s, &SchemeConfig::default(), seq_of(waves, l)).unwrap();
        assert_eq!(rec.event_count(), 0);
        assert_eq!(rec.stop, StopReason::EndTime);
        assert!(rec.sup_residual() < 1e-12);
    }

    #[test]
    fn head_on_shocks_give_one_event() {
        let s = sys();
        let ps = crate::psystem::PSystem::new(1.4, 1.0);
        let m = State::new(1.0, 0.0);
        // left shock moving right (forward), right shock moving left (backward)
        let (l, _) = ps.shock_to(m, 2.0, crate::psystem::Direction::Forward).unwrap();
        let (r, _) = ps.shock_to(m, 2.0, crate::psystem::Direction::Backward).unwrap();
        let mut waves = riemann_waves(&s, l, m, 0.3, 0);
        waves.extend(riemann_waves(&s, m, r, 0.7, 10));
        assert_eq!(waves.len(), 2);
        let cfg = SchemeConfig { t_end: 1.0, ..SchemeConfig::default() };
        let rec = advance(s, &cfg, seq_of(waves, l)).unwrap();
        assert_eq!(rec.event_count(), 1);
        let e = &rec.events[0];
        assert_eq!(e.in_ids.len(), 2);
        assert_eq!(e.out_families, vec![0, 1]);
        let led = rec.ledger.last().unwrap();
        assert!(led.drift_norm <= 1e-10, "{led:?}");
    }

    #[test]
    fn compression_collapses_once_at_predicted_time() {
        let s = sys();
        let l = State::new(1.0, 0.0);
        let r = s.simple_step(1, &l, -0.05);
        let j = Jump::new(&s, 1, WaveKind::Compression, l, r);
        let width = 0.02;
        let lag = width / j.rate; // negative: focus ahead
        let w = jump_wave(0, &j, PreconditionerTag::PSystemAR, 0.5, 0.0, 0.5 - j.speed * lag, -lag);
        let predicted = self_collapse_time(&w, 0.0).unwrap();
        let cfg = SchemeConfig { t_end: predicted + 0.05, ..SchemeConfig::default() };
        let rec = advance(s, &cfg, seq_of(vec![w], l)).unwrap();
        assert_eq!(rec.event_count(), 1);
        let e = &rec.events[0];
        assert_eq!(e.kind, EventClass::Collapse);
        assert!((e.t - predicted).abs() < 1e-14);
        assert_eq!(e.out_families, vec![0, 1]);
        let fs = &rec.final_sequence.waves;
        assert_eq!(fs[1].kind, WaveKind::Shock);
        assert_eq!(fs[0].kind, WaveKind::Rarefaction);
        assert!(fs.iter().all(|w| w.width_at(e.t) == 0.0));
    }
}
