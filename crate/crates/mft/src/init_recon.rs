//! Initial wave sequences from sampled data, and piecewise profiles back from
//! wave sequences.

use serde::{Deserialize, Serialize};

use crate::error::{MftError, Result};
use crate::grp::{build_dgrs, Jump};
use crate::model::{SchemeConfig, State, Wave, WaveKind, WaveSequence};
use crate::system::System;

const MAX_DEPTH: usize = 40;
const MAX_REFINE_ROUNDS: usize = 40;

/// Piecewise-linear samples `(x_i, U_i)` with nondecreasing `x`; a repeated
/// abscissa marks a jump. Constant outside the sampled interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub xs: Vec<f64>,
    pub states: Vec<State>,
}

impl InitialData {
    pub fn new(xs: Vec<f64>, states: Vec<State>) -> Result<Self> {
        if xs.is_empty() || xs.len() != states.len() {
            return Err(MftError::Config("initial data needs matching nonempty x and state lists".into()));
        }
        if xs.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(MftError::Config("sample abscissae must be nondecreasing".into()));
        }
        if xs.windows(3).any(|w| w[0] == w[2]) {
            return Err(MftError::Config("at most two samples may share an abscissa".into()));
        }
        for s in &states {
            s.check()?;
        }
        Ok(InitialData { xs, states })
    }

    pub fn constant(state: State, domain: (f64, f64)) -> Self {
        InitialData { xs: vec![domain.0, domain.1], states: vec![state, state] }
    }

    /// Riemann data `l | r` at `x`.
    pub fn step(x: f64, l: State, r: State, domain: (f64, f64)) -> Self {
        InitialData { xs: vec![domain.0, x, x, domain.1], states: vec![l, l, r, r] }
    }

    /// Piecewise-constant data: `states[i]` on `(cuts[i-1], cuts[i])`.
    pub fn piecewise_constant(cuts: &[f64], states: &[State], domain: (f64, f64)) -> Result<Self> {
        if states.len() != cuts.len() + 1 {
            return Err(MftError::Config("need one more state than cut".into()));
        }
        let mut xs = vec![domain.0];
        let mut ss = vec![states[0]];
        for (i, &c) in cuts.iter().enumerate() {
            xs.extend([c, c]);
            ss.extend([states[i], states[i + 1]]);
        }
        xs.push(domain.1);
        ss.push(*states.last().unwrap());
        InitialData::new(xs, ss)
    }

    /// `n + 1` equally spaced samples of a function on `[a, b]`.
    pub fn sampled<F: Fn(f64) -> State>(f: F, a: f64, b: f64, n: usize) -> Result<Self> {
        let n = n.max(1);
        let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        let states = xs.iter().map(|&x| f(x)).collect();
        InitialData::new(xs, states)
    }

    pub fn leftmost(&self) -> State {
        self.states[0]
    }

    pub fn rightmost(&self) -> State {
        *self.states.last().unwrap()
    }

    /// Value at `x`, taking the right limit at a jump.
    pub fn eval(&self, x: f64) -> State {
        self.eval_side(x, true)
    }

    /// Left (`right = false`) or right limit at `x`.
    pub fn eval_side(&self, x: f64, right: bool) -> State {
        let xs = &self.xs;
        if x < xs[0] || (x == xs[0] && !right) {
            return self.states[0];
        }
        if x > *xs.last().unwrap() || (x == *xs.last().unwrap() && right) {
            return self.rightmost();
        }
        // first index with xs[i] > x (right limit) or >= x (left limit)
        let i1 = if right { xs.partition_point(|&v| v <= x) } else { xs.partition_point(|&v| v < x) };
        let i0 = i1 - 1;
        let (x0, x1) = (xs[i0], xs[i1]);
        if x == x1 {
            return self.states[i1];
        }
        let th = (x - x0) / (x1 - x0);
        let (a, b) = (self.states[i0], self.states[i1]);
        State::with_entropy(a.p + th * (b.p - a.p), a.u + th * (b.u - a.u), a.s + th * (b.s - a.s))
    }

    /// Total variation on the open interval `(a, b)`.
    pub fn variation_between(&self, a: f64, b: f64) -> f64 {
        let mut pts = vec![a];
        pts.extend(self.xs.iter().copied().filter(|&x| x > a && x < b));
        pts.push(b);
        let mut tv = 0.0;
        let mut prev = self.eval_side(a, true);
        for (k, &x) in pts.iter().enumerate().skip(1) {
            let l = self.eval_side(x, false);
            tv += prev.distance(&l);
            prev = if k + 1 < pts.len() {
                let r = self.eval_side(x, true);
                tv += l.distance(&r);
                r
            } else {
                l
            };
        }
        tv
    }
}

/// Sample indices `i` with `x_i = x_{i+1}` and a jump of at least `ε^{e_d}`.
pub fn detect_discontinuities(data: &InitialData, cfg: &SchemeConfig) -> Vec<usize> {
    let eps = cfg.eps_d();
    (0..data.xs.len().saturating_sub(1))
        .filter(|&i| data.xs[i] == data.xs[i + 1] && data.states[i].distance(&data.states[i + 1]) >= eps)
        .collect()
}

fn riemann_block(sys: &System, l: State, r: State, x: f64, cfg: &SchemeConfig, ids: &mut u64) -> Result<Vec<Wave>> {
    let widths = vec![0.0; sys.n()];
    let sol = sys.solve_grp(l, r, &widths)?;
    let d = build_dgrs(sys, &sol, &widths, cfg)?;
    Ok(d.jumps.iter().map(|j| placed(sys, j, x, x, 0.0, ids)).collect())
}

fn placed(sys: &System, j: &Jump, x: f64, xc: f64, tc: f64, ids: &mut u64) -> Wave {
    let id = *ids;
    *ids += 1;
    Wave {
        id,
        family: j.family,
        kind: j.kind,
        strength: j.strength,
        left: j.left,
        right: j.right,
        speed: j.speed,
        x0: x,
        t0: 0.0,
        xc,
        tc,
        rate: j.rate,
        born: 0.0,
        next_interaction: f64::INFINITY,
        temp: None,
        carrier: None,
        heavy: false,
        precond: sys.preconditioner(),
    }
}

/// Widths `Δy/(2N)` per acoustic family (contacts have none).
fn block_widths(sys: &System, dy: f64) -> Vec<f64> {
    let n = sys.n();
    (0..n).map(|k| if sys.is_contact(k) { 0.0 } else { dy / (2.0 * n as f64) }).collect()
}

fn block_ok(sys: &System, l: State, r: State, dy: f64, cfg: &SchemeConfig) -> Result<bool> {
    let sol = sys.solve_grp(l, r, &block_widths(sys, dy))?;
    let cap = cfg.eps_d().min(cfg.eps_r()).min(cfg.eps_c());
    Ok(sol.strengths.iter().zip(&sol.kinds).all(|(z, k)| k.is_none() || z.abs() < cap))
}

/// One gRP block for the smooth interval `[y0, y1]`: a single jump per
/// family, all passing through the interval midpoint at `t = 0`.
fn smooth_block(sys: &System, l: State, r: State, y0: f64, y1: f64, ids: &mut u64) -> Result<Vec<Wave>> {
    let dy = y1 - y0;
    let xm = 0.5 * (y0 + y1);
    let widths = block_widths(sys, dy);
    let sol = sys.solve_grp(l, r, &widths)?;
    let mut out = Vec::new();
    for k in 0..sys.n() {
        let Some(kind) = sol.kinds[k] else { continue };
        let j = Jump::new(sys, k, kind, sol.states[k], sol.states[k + 1]);
        let (xc, tc) = if kind.is_simple() && j.rate != 0.0 {
            let lag = widths[k] / j.rate;
            (xm - j.speed * lag, -lag)
        } else {
            (xm, 0.0)
        };
        out.push(placed(sys, &j, xm, xc, tc, ids));
    }
    Ok(out)
}

/// Mesh for one smooth piece `(a+, b-)`: bisect until every block's waves are
/// weak, then keep refining until the variation deficit is below `budget`.
fn smooth_mesh(sys: &System, data: &InitialData, a: f64, b: f64, cfg: &SchemeConfig, budget: f64) -> Result<Vec<f64>> {
    let at = |y: f64| {
        if y == a {
            data.eval_side(a, true)
        } else if y == b {
            data.eval_side(b, false)
        } else {
            data.eval(y)
        }
    };
    let mut out = vec![a];
    bisect_interval(sys, &at, a, b, cfg, 0, &mut out)?;
    for _ in 0..MAX_REFINE_ROUNDS {
        let deficits: Vec<f64> =
            out.windows(2).map(|w| (data.variation_between(w[0], w[1]) - at(w[0]).distance(&at(w[1]))).max(0.0)).collect();
        let total: f64 = deficits.iter().sum();
        if total < budget {
            break;
        }
        let cut = budget / (2.0 * deficits.len() as f64);
        let mut refined = vec![out[0]];
        for (i, w) in out.windows(2).enumerate() {
            if deficits[i] > cut {
                refined.push(0.5 * (w[0] + w[1]));
            }
            refined.push(w[1]);
        }
        out = refined;
    }
    Ok(out)
}

fn bisect_interval<F: Fn(f64) -> State>(
    sys: &System,
    at: &F,
    y0: f64,
    y1: f64,
    cfg: &SchemeConfig,
    depth: usize,
    out: &mut Vec<f64>,
) -> Result<()> {
    if depth >= MAX_DEPTH || block_ok(sys, at(y0), at(y1), y1 - y0, cfg)? {
        out.push(y1);
        return Ok(());
    }
    let ym = 0.5 * (y0 + y1);
    bisect_interval(sys, at, y0, ym, cfg, depth + 1, out)?;
    bisect_interval(sys, at, ym, y1, cfg, depth + 1, out)
}

/// Builds the initial wave sequence: exact Riemann fans at the large jumps,
/// weak gRP blocks with positive widths in between.
pub fn initialize(sys: &System, data: &InitialData, cfg: &SchemeConfig) -> Result<WaveSequence> {
    let jumps = detect_discontinuities(data, cfg);
    let mut ids = 0u64;
    let mut waves = Vec::new();
    let x_first = data.xs[0];
    let x_last = *data.xs.last().unwrap();
    let mut cuts: Vec<f64> = vec![x_first];
    cuts.extend(jumps.iter().map(|&i| data.xs[i]));
    cuts.push(x_last);
    let pieces = cuts.len() - 1;
    let budget = cfg.eps_i() / pieces.max(1) as f64;
    for p in 0..pieces {
        let (a, b) = (cuts[p], cuts[p + 1]);
        if b > a {
            let mesh = smooth_mesh(sys, data, a, b, cfg, budget)?;
            for w in mesh.windows(2) {
                let (l, r) = (
                    if w[0] == a { data.eval_side(a, true) } else { data.eval(w[0]) },
                    if w[1] == b { data.eval_side(b, false) } else { data.eval(w[1]) },
                );
                if l == r {
                    continue;
                }
                waves.extend(smooth_block(sys, l, r, w[0], w[1], &mut ids)?);
            }
        }
        if p + 1 < pieces {
            let i = jumps[p];
            waves.extend(riemann_block(sys, data.states[i], data.states[i + 1], data.xs[i], cfg, &mut ids)?);
        }
    }
    let seq = WaveSequence { leftmost: data.leftmost(), waves, t: 0.0 };
    seq.validate(0.0)?;
    Ok(seq)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "piece", rename_all = "snake_case")]
pub enum ProfilePiece {
    Jump { x: f64, left: State, right: State },
    /// Centered simple-wave profile over `[lo, hi]`, characteristic speed
    /// linear in `x` from `lam_lo` to `lam_hi`.
    Fan { family: usize, lo: f64, hi: f64, lam_lo: f64, lam_hi: f64, left: State, right: State },
}

impl ProfilePiece {
    fn left(&self) -> State {
        match self {
            ProfilePiece::Jump { left, .. } | ProfilePiece::Fan { left, .. } => *left,
        }
    }

    fn right(&self) -> State {
        match self {
            ProfilePiece::Jump { right, .. } | ProfilePiece::Fan { right, .. } => *right,
        }
    }

    fn span(&self) -> (f64, f64) {
        match *self {
            ProfilePiece::Jump { x, .. } => (x, x),
            ProfilePiece::Fan { lo, hi, .. } => (lo, hi),
        }
    }
}

/// Reconstructed profile `U = u_0 + Σ_j (P_j - left_j)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Profile {
    pub system: System,
    pub t: f64,
    pub leftmost: State,
    pub pieces: Vec<ProfilePiece>,
}

impl Profile {
    fn piece_value(&self, piece: &ProfilePiece, x: f64) -> State {
        match *piece {
            ProfilePiece::Jump { x: xj, left, right } => {
                if x < xj {
                    left
                } else if x > xj {
                    right
                } else {
                    left.midpoint(&right)
                }
            }
            ProfilePiece::Fan { family, lo, hi, lam_lo, lam_hi, left, right } => {
                if x <= lo {
                    left
                } else if x >= hi {
                    right
                } else {
                    let lam = lam_lo + (lam_hi - lam_lo) * (x - lo) / (hi - lo);
                    self.system.fan_state(family, &left, &right, lam)
                }
            }
        }
    }

    pub fn eval(&self, x: f64) -> State {
        let mut u = self.leftmost;
        for piece in &self.pieces {
            let (lo, hi) = piece.span();
            if x < lo {
                continue;
            }
            let (l, v) = if x > hi { (piece.left(), piece.right()) } else { (piece.left(), self.piece_value(piece, x)) };
            u.p += v.p - l.p;
            u.u += v.u - l.u;
            u.s += v.s - l.s;
        }
        u
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| {
                let (lo, hi) = p.span();
                [lo, hi]
            })
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    pub fn sample(&self, xs: &[f64]) -> Vec<State> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    /// Variation of the profile measured on a fine grid through `[a, b]`
    /// that includes every breakpoint.
    pub fn total_variation(&self, a: f64, b: f64, per_fan: usize) -> f64 {
        let mut xs = vec![a, b];
        for p in &self.pieces {
            match *p {
                ProfilePiece::Jump { x, .. } => xs.extend([x - 1e-12 * (1.0 + x.abs()), x + 1e-12 * (1.0 + x.abs())]),
                ProfilePiece::Fan { lo, hi, .. } => xs.extend((0..=per_fan).map(|i| lo + (hi - lo) * i as f64 / per_fan as f64)),
            }
        }
        xs.retain(|&x| x >= a && x <= b);
        xs.sort_by(f64::total_cmp);
        let vals = self.sample(&xs);
        vals.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }
}

/// Profile of `seq` at time `seq.t`: jumps at shock, contact and zero-width
/// positions; centered fans for simple waves, with same-family fans trimmed
/// so they do not overlap.
pub fn reconstruct(sys: &System, seq: &WaveSequence) -> Profile {
    let t = seq.t;
    let mut pieces: Vec<ProfilePiece> = seq
        .waves
        .iter()
        .map(|w| {
            let x = w.position_at(t);
            let simple = w.kind.is_simple() && w.width_at(t) > 0.0 && t != w.tc;
            if !simple {
                return ProfilePiece::Jump { x, left: w.left, right: w.right };
            }
            let (ll, lr) = (sys.lambda(w.family, &w.left), sys.lambda(w.family, &w.right));
            let (lo, hi) = w.edges_at(t, ll, lr);
            ProfilePiece::Fan { family: w.family, lo, hi, lam_lo: ll, lam_hi: lr, left: w.left, right: w.right }
        })
        .collect();
    let positions: Vec<f64> = seq.waves.iter().map(|w| w.position_at(t)).collect();
    for k in 0..sys.n() {
        let idx: Vec<usize> = (0..pieces.len()).filter(|&i| seq.waves[i].family == k).collect();
        for pair in idx.windows(2) {
            let (i, j) = (pair[0], pair[1]);
            let (_, hi_i) = pieces[i].span();
            let (lo_j, _) = pieces[j].span();
            if hi_i <= lo_j {
                continue;
            }
            let m = (0.5 * (hi_i + lo_j)).clamp(positions[i], positions[j].max(positions[i]));
            if let ProfilePiece::Fan { hi, .. } = &mut pieces[i] {
                *hi = m;
            }
            if let ProfilePiece::Fan { lo, .. } = &mut pieces[j] {
                *lo = m;
            }
            for p in [i, j] {
                if let ProfilePiece::Fan { lo, hi, left, right, .. } = pieces[p] {
                    if hi <= lo {
                        pieces[p] = ProfilePiece::Jump { x: positions[p], left, right };
                    }
                }
            }
        }
    }
    Profile { system: *sys, t, leftmost: seq.leftmost, pieces }
}

/// `∫ |U - V| dx` by the midpoint rule on `n` cells of `[a, b]`, with
/// `|·|` the sum of the absolute component differences.
pub fn l1_distance<F: Fn(f64) -> State, G: Fn(f64) -> State>(u: F, v: G, a: f64, b: f64, n: usize) -> f64 {
    let dx = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let x = a + (i as f64 + 0.5) * dx;
            let (p, q) = (u(x), v(x));
            ((p.p - q.p).abs() + (p.u - q.u).abs() + (p.s - q.s).abs()) * dx
        })
        .sum()
}

/// Kinds present in a sequence, for quick structural assertions.
pub fn kind_counts(seq: &WaveSequence) -> [usize; 4] {
    let mut c = [0; 4];
    for w in &seq.waves {
        c[match w.kind {
            WaveKind::Shock => 0,
            WaveKind::Contact => 1,
            WaveKind::Rarefaction => 2,
            WaveKind::Compression => 3,
        }] += 1;
    }
    c
}
