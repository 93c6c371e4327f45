//! Seeded random instances: based complexes, symplectic complexes and short
//! exact sequences. Every generator is a pure function of its configuration.

use num::{BigInt, One};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complex::{compute_homology, BasisFamily, ChainComplex, ComplexError, HomologyData};
use crate::linalg::{int, solve_linear, Matrix, Rational};
use crate::symplectic::SymplecticComplex;
use crate::torsion::{Sections, SesBases, ShortExactSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("infeasible request: {0}")]
    Infeasible(String),
}

/// Parameters shared by all generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    /// Top degree.
    pub n: usize,
    /// Upper bound for each chain dimension when dimensions are drawn at random.
    pub max_dim: usize,
    /// Exact chain dimensions, overriding `max_dim`.
    pub dims: Option<Vec<usize>>,
    /// Exact Betti numbers.
    pub betti_targets: Option<Vec<usize>>,
    /// Magnitude bound for numerators and denominators of random entries.
    pub entry_bound: i64,
    /// Move the structured instance to random coordinates.
    pub conjugate: bool,
}

impl GenConfig {
    pub fn new(seed: u64, n: usize, max_dim: usize) -> Self {
        GenConfig {
            seed,
            n,
            max_dim,
            dims: None,
            betti_targets: None,
            entry_bound: 5,
            conjugate: true,
        }
    }

    fn check(&self) -> Result<(), GenError> {
        if self.n < 1 {
            return Err(GenError::InvalidConfig("top degree must be at least 1".into()));
        }
        if self.entry_bound < 1 {
            return Err(GenError::InvalidConfig("entry bound must be positive".into()));
        }
        for (what, v) in [("dims", &self.dims), ("betti", &self.betti_targets)] {
            if let Some(v) = v {
                if v.len() != self.n + 1 {
                    return Err(GenError::InvalidConfig(format!(
                        "{what} has {} entries, expected {}",
                        v.len(),
                        self.n + 1
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_symplectic(&self) -> Result<(), GenError> {
        self.check()?;
        if self.n % 4 != 2 {
            return Err(GenError::InvalidConfig(format!("top degree {} is not 2 mod 4", self.n)));
        }
        let n = self.n;
        for (what, v) in [("dims", &self.dims), ("betti", &self.betti_targets)] {
            if let Some(v) = v {
                if (0..=n).any(|p| v[p] != v[n - p]) {
                    return Err(GenError::Infeasible(format!("{what} are not symmetric under p -> n-p")));
                }
            }
        }
        if let Some(b) = &self.betti_targets {
            if b[n / 2] % 2 == 1 {
                return Err(GenError::Infeasible("middle Betti number is odd".into()));
            }
        }
        Ok(())
    }
}

/// Which part of a symplectic instance to populate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymplecticKind {
    /// Zero boundary.
    DZero,
    /// No homology.
    Exact,
    /// Both homology and nonzero boundaries.
    Mixed,
}

/// Deterministic source of random exact objects.
pub struct Generator {
    rng: ChaCha8Rng,
    bound: i64,
}

impl Generator {
    pub fn new(seed: u64, entry_bound: i64) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            bound: entry_bound.max(1),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..=n)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    pub fn rational(&mut self) -> Rational {
        let num = self.rng.gen_range(-self.bound..=self.bound);
        let den = self.rng.gen_range(1..=self.bound);
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if r != Rational::from_integer(BigInt::from(0)) {
                return r;
            }
        }
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        let data = (0..rows * cols).map(|_| self.rational()).collect();
        Matrix::from_vec(rows, cols, data).expect("sized data")
    }

    /// A random invertible matrix and its inverse, as a product of elementary operations.
    pub fn invertible(&mut self, d: usize) -> (Matrix, Matrix) {
        let mut m = Matrix::identity(d);
        let mut inv = Matrix::identity(d);
        if d == 0 {
            return (m, inv);
        }
        for _ in 0..3 * d {
            let i = self.rng.gen_range(0..d);
            let j = self.rng.gen_range(0..d);
            if i != j {
                // m <- m (I + c e_i e_jᵀ), inv <- (I - c e_i e_jᵀ) inv
                let c = int(self.rng.gen_range(-2..=2));
                for r in 0..d {
                    let delta = &m[(r, i)] * &c;
                    m[(r, j)] += delta;
                }
                for col in 0..d {
                    let delta = &inv[(j, col)] * &c;
                    inv[(i, col)] -= delta;
                }
            } else {
                let s = [int(-1), int(2), Rational::new(1.into(), 2.into()), int(-2), int(3)]
                    .choose(&mut self.rng)
                    .expect("nonempty")
                    .clone();
                let s_inv = s.recip();
                for r in 0..d {
                    m[(r, i)] *= &s;
                }
                for col in 0..d {
                    inv[(i, col)] *= &s_inv;
                }
            }
        }
        (m, inv)
    }

    /// Random chain bases, one invertible matrix per degree.
    pub fn chain_bases(&mut self, dims: &[usize]) -> BasisFamily {
        BasisFamily(dims.iter().map(|&d| self.invertible(d).0).collect())
    }

    /// Random homology bases: random recombinations of the representatives shifted by random boundaries.
    pub fn homology_bases(&mut self, h: &HomologyData) -> BasisFamily {
        BasisFamily(
            h.degrees
                .iter()
                .map(|d| {
                    let k = d.betti();
                    let mixed = &d.reps * &self.invertible(k).0;
                    let shift = &d.boundaries * &self.matrix(d.boundaries.cols(), k);
                    &mixed + &shift
                })
                .collect(),
        )
    }

    /// Shifts every column of a homology family by a random boundary.
    pub fn shift_by_boundaries(&mut self, h: &HomologyData, fam: &BasisFamily) -> BasisFamily {
        BasisFamily(
            fam.0
                .iter()
                .zip(&h.degrees)
                .map(|(m, d)| &(m.clone()) + &(&d.boundaries * &self.matrix(d.boundaries.cols(), m.cols())))
                .collect(),
        )
    }

    /// Random boundary bases with lifts that differ from the canonical ones by random cycles.
    pub fn sections(&mut self, c: &ChainComplex, h: &HomologyData) -> Sections {
        let boundary_bases: Vec<Matrix> = h
            .degrees
            .iter()
            .map(|d| &d.boundaries * &self.invertible(d.boundaries.cols()).0)
            .collect();
        let lifts = (0..=c.n())
            .map(|p| {
                if p == 0 {
                    return Matrix::zeros(c.dim(0), 0);
                }
                let target = &boundary_bases[p - 1];
                let base = solve_linear(&c.boundary(p), target).expect("boundary bases lie in the image");
                let cycles = &h.degree(p).cycles;
                &base + &(cycles * &self.matrix(cycles.cols(), target.cols()))
            })
            .collect();
        Sections {
            boundary_bases,
            lifts,
        }
    }

    /// Invertible matrices for every degree, with their inverses.
    pub fn coordinate_change(&mut self, dims: &[usize]) -> (Vec<Matrix>, Vec<Matrix>) {
        dims.iter().map(|&d| self.invertible(d)).unzip()
    }
}

/// Ranks `r_p = rank ∂_{p+1}` and Betti numbers `h_p` realizing `dims[p] = r_p + h_p + r_{p-1}`.
fn plan_ranks(g: &mut Generator, cfg: &GenConfig) -> Result<(Vec<usize>, Vec<usize>), GenError> {
    let n = cfg.n;
    let mut ranks = vec![0usize; n + 1];
    let mut betti = vec![0usize; n + 1];
    match (&cfg.dims, &cfg.betti_targets) {
        (Some(dims), Some(targets)) => {
            let mut prev = 0usize;
            for p in 0..=n {
                let r = dims[p]
                    .checked_sub(targets[p] + prev)
                    .ok_or_else(|| GenError::Infeasible(format!("degree {p}: dimension too small for the requested Betti number")))?;
                ranks[p] = r;
                betti[p] = targets[p];
                prev = r;
            }
            if ranks[n] != 0 {
                return Err(GenError::Infeasible("top degree would need a nonzero outgoing boundary".into()));
            }
        }
        (Some(dims), None) => {
            let mut prev = 0usize;
            for p in 0..=n {
                let room = dims[p]
                    .checked_sub(prev)
                    .ok_or_else(|| GenError::Infeasible(format!("degree {p}: dimension smaller than incoming rank")))?;
                let r = if p == n { 0 } else { g.below(room.min(dims[p + 1])) };
                ranks[p] = r;
                betti[p] = room - r;
                prev = r;
            }
        }
        (None, Some(targets)) => {
            let mut prev = 0usize;
            for p in 0..=n {
                let room = cfg.max_dim.saturating_sub(targets[p] + prev);
                let r = if p == n { 0 } else { g.below(room) };
                ranks[p] = r;
                betti[p] = targets[p];
                prev = r;
            }
        }
        (None, None) => {
            let mut prev = 0usize;
            for p in 0..=n {
                let room = cfg.max_dim.saturating_sub(prev);
                let r = if p == n { 0 } else { g.below(room) };
                ranks[p] = r;
                betti[p] = g.below(room - r);
                prev = r;
            }
        }
    }
    Ok((ranks, betti))
}

/// Random homology bases for `c`, drawn from a stream derived from `cfg.seed`.
pub fn gen_homology_bases(cfg: &GenConfig, c: &ChainComplex) -> Result<BasisFamily, ComplexError> {
    let h = compute_homology(c)?;
    let mut g = Generator::new(cfg.seed ^ HOMOLOGY_STREAM, cfg.entry_bound);
    Ok(g.homology_bases(&h))
}

const HOMOLOGY_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

/// A random chain complex with random chain bases.
pub fn gen_chain_complex(cfg: &GenConfig) -> Result<(ChainComplex, BasisFamily), GenError> {
    cfg.check()?;
    let mut g = Generator::new(cfg.seed, cfg.entry_bound);
    let (ranks, betti) = plan_ranks(&mut g, cfg)?;
    let n = cfg.n;
    // degree p holds blocks [boundaries r_p | homology h_p | lifts r_{p-1}]
    let dims: Vec<usize> = (0..=n)
        .map(|p| ranks[p] + betti[p] + if p > 0 { ranks[p - 1] } else { 0 })
        .collect();
    let mut boundaries = Vec::with_capacity(n);
    for p in 1..=n {
        let r = ranks[p - 1];
        let mut d = Matrix::zeros(dims[p - 1], dims[p]);
        let block = g.invertible(r).0;
        let lift_offset = ranks[p] + betti[p];
        for i in 0..r {
            for j in 0..r {
                d[(i, lift_offset + j)] = block[(i, j)].clone();
            }
        }
        boundaries.push(d);
    }
    let mut c = ChainComplex::new(dims.clone(), boundaries);
    if cfg.conjugate {
        let (t, t_inv) = g.coordinate_change(&dims);
        c = c.conjugate(&t, &t_inv);
    }
    let bases = g.chain_bases(&dims);
    debug_assert!(c.validate().is_ok());
    Ok((c, bases))
}

struct SymplecticPlan {
    /// Homology dimension per degree, symmetric.
    betti: Vec<usize>,
    /// `ladders[j]`: number of ladder pairs joining degrees `j+1 -> j` and `n-j -> n-j-1`, for `j < n/2`.
    ladders: Vec<usize>,
}

fn plan_symplectic(g: &mut Generator, cfg: &GenConfig, kind: SymplecticKind) -> Result<SymplecticPlan, GenError> {
    let n = cfg.n;
    let c = n / 2;
    let mut betti = vec![0usize; n + 1];
    let mut ladders = vec![0usize; c];
    let fixed_betti = cfg.betti_targets.clone();
    if let Some(dims) = &cfg.dims {
        // dims[p] = h_p + l_p + l_{p-1} below the middle, dims[c] = h_c + 2 l_{c-1}
        let mut prev = 0usize;
        for p in 0..c {
            let room = dims[p]
                .checked_sub(prev)
                .ok_or_else(|| GenError::Infeasible(format!("degree {p}: dimension smaller than incoming rank")))?;
            let l = match (&fixed_betti, kind) {
                (Some(t), _) => room
                    .checked_sub(t[p])
                    .ok_or_else(|| GenError::Infeasible(format!("degree {p}: Betti number exceeds room")))?,
                (None, SymplecticKind::DZero) => 0,
                (None, SymplecticKind::Exact) => room,
                (None, SymplecticKind::Mixed) => g.below(room),
            };
            ladders[p] = l;
            betti[p] = room - l;
            prev = l;
        }
        let mid = dims[c]
            .checked_sub(2 * prev)
            .ok_or_else(|| GenError::Infeasible("middle dimension smaller than incoming ranks".into()))?;
        if mid % 2 == 1 {
            return Err(GenError::Infeasible("middle Betti number would be odd".into()));
        }
        betti[c] = mid;
    } else {
        let max = cfg.max_dim;
        let mut prev = 0usize;
        for p in 0..c {
            let room = max.saturating_sub(prev);
            let cap = if p + 1 == c { room.min(max / 2) } else { room };
            let (l, h) = match (&fixed_betti, kind) {
                (Some(t), SymplecticKind::DZero) => (0, t[p]),
                (Some(t), _) => (g.below(cap.min(room.saturating_sub(t[p]))), t[p]),
                (None, SymplecticKind::DZero) => (0, g.below(room)),
                (None, SymplecticKind::Exact) => (g.below(cap), 0),
                (None, SymplecticKind::Mixed) => {
                    let l = g.below(cap);
                    (l, g.below(room - l))
                }
            };
            ladders[p] = l;
            betti[p] = h;
            prev = l;
        }
        betti[c] = match (&fixed_betti, kind) {
            (Some(t), _) => t[c],
            (None, SymplecticKind::Exact) => 0,
            (None, _) => 2 * g.below(max.saturating_sub(2 * prev) / 2),
        };
    }
    for p in 0..c {
        betti[n - p] = betti[p];
    }
    if cfg.dims.is_none() && fixed_betti.is_none() {
        match kind {
            SymplecticKind::Mixed => {
                if ladders.iter().all(|&l| l == 0) {
                    let j = g.rng().gen_range(0..c);
                    ladders[j] = 1;
                }
                if betti.iter().all(|&h| h == 0) {
                    betti[0] = 1;
                    betti[n] = 1;
                }
            }
            SymplecticKind::DZero if betti.iter().all(|&h| h == 0) => betti[c] = 2,
            SymplecticKind::Exact if ladders.iter().all(|&l| l == 0) => ladders[0] = 1,
            _ => {}
        }
    }
    match kind {
        SymplecticKind::DZero if ladders.iter().any(|&l| l > 0) => {
            Err(GenError::Infeasible("zero-boundary instance cannot carry ladders".into()))
        }
        SymplecticKind::Exact if betti.iter().any(|&h| h > 0) => {
            Err(GenError::Infeasible("exact instance cannot carry homology".into()))
        }
        _ => Ok(SymplecticPlan { betti, ladders }),
    }
}

/// A random symplectic complex of the given kind.
///
/// The structured instance is a zero-boundary part with standard pairings plus
/// ladders `x -> y` in degrees `j+1 -> j` paired with `x* -> y*` in degrees
/// `n-j -> n-j-1`, with `ω_j(y, x*) = 1` and `ω_{j+1}(x, y*) = (-1)^{j+1}`.
/// It is then moved to random coordinates with the pairings transported along.
pub fn gen_symplectic(cfg: &GenConfig, kind: SymplecticKind) -> Result<SymplecticComplex, GenError> {
    cfg.check_symplectic()?;
    let mut g = Generator::new(cfg.seed, cfg.entry_bound);
    let plan = plan_symplectic(&mut g, cfg, kind)?;
    let n = cfg.n;
    let c = n / 2;
    let mut dims = vec![0usize; n + 1];
    let fresh = |p: usize, dims: &mut Vec<usize>| {
        dims[p] += 1;
        dims[p] - 1
    };
    // (degree p, index in C_p, index in C_{n-p}, value of ω_p)
    let mut entries: Vec<(usize, usize, usize, i64)> = Vec::new();
    // (degree p of the source, source index, target index)
    let mut arrows: Vec<(usize, usize, usize)> = Vec::new();
    for p in 0..c {
        for _ in 0..plan.betti[p] {
            let a = fresh(p, &mut dims);
            let b = fresh(n - p, &mut dims);
            entries.push((p, a, b, 1));
        }
    }
    let k = plan.betti[c] / 2;
    let us: Vec<usize> = (0..k).map(|_| fresh(c, &mut dims)).collect();
    let vs: Vec<usize> = (0..k).map(|_| fresh(c, &mut dims)).collect();
    for (&u, &v) in us.iter().zip(&vs) {
        entries.push((c, u, v, 1));
    }
    for j in 0..c {
        for _ in 0..plan.ladders[j] {
            let x = fresh(j + 1, &mut dims);
            let y = fresh(j, &mut dims);
            let xs = fresh(n - j, &mut dims);
            let ys = fresh(n - j - 1, &mut dims);
            arrows.push((j + 1, x, y));
            arrows.push((n - j, xs, ys));
            entries.push((j, y, xs, 1));
            entries.push((j + 1, x, ys, if j % 2 == 0 { -1 } else { 1 }));
        }
    }
    let mut pairings: Vec<Matrix> = (0..=n).map(|p| Matrix::zeros(dims[p], dims[n - p])).collect();
    for &(p, i, k, v) in &entries {
        pairings[p][(i, k)] = int(v);
        // ω_{n-p}(b, a) = (-1)^p ω_p(a, b)
        pairings[n - p][(k, i)] = int(if p % 2 == 0 { v } else { -v });
    }
    let mut boundaries: Vec<Matrix> = (1..=n).map(|p| Matrix::zeros(dims[p - 1], dims[p])).collect();
    for &(p, src, tgt) in &arrows {
        boundaries[p - 1][(tgt, src)] = Rational::one();
    }
    let mut s = SymplecticComplex::new(ChainComplex::new(dims.clone(), boundaries), pairings);
    if cfg.conjugate {
        let (t, t_inv) = g.coordinate_change(&dims);
        s = s.conjugate(&t, &t_inv);
    }
    debug_assert!(s.validate().is_ok());
    Ok(s)
}

/// How a generated piece of the middle complex distributes over the sub and quotient complexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Placement {
    Sub,
    Quotient,
    /// Bottom of an arrow in the subcomplex, top in the quotient.
    Straddle,
}

/// Basis change applied to `c^A ⊕ lift(c^D)` to obtain `c^B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Twist {
    Identity,
    Unitriangular,
    OddPermutation,
}

/// A short exact sequence in random coordinates with compatible bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedSes {
    pub ses: ShortExactSequence,
    pub bases: SesBases,
    pub twists: Vec<Twist>,
}

/// A random short exact sequence `0 -> A -> B -> D -> 0` with bases of `B` obtained from
/// `c^A ⊕ lift(c^D)` by a determinant `±1` twist in every degree.
pub fn gen_ses(cfg: &GenConfig) -> Result<GeneratedSes, GenError> {
    cfg.check()?;
    let mut g = Generator::new(cfg.seed, cfg.entry_bound);
    let n = cfg.n;
    let mut cfg_plan = cfg.clone();
    cfg_plan.betti_targets = None;
    let (ranks, betti) = plan_ranks(&mut g, &cfg_plan)?;
    let place = |g: &mut Generator| match g.rng().gen_range(0..3) {
        0 => Placement::Sub,
        1 => Placement::Quotient,
        _ => Placement::Straddle,
    };
    // per degree, the B-basis vectors that belong to A (true) or to the quotient (false)
    let mut in_sub: Vec<Vec<bool>> = vec![Vec::new(); n + 1];
    let mut arrows: Vec<(usize, usize, usize)> = Vec::new();
    for p in 0..=n {
        for _ in 0..betti[p] {
            let sub = g.coin();
            in_sub[p].push(sub);
        }
    }
    for p in 0..n {
        for _ in 0..ranks[p] {
            let (bottom, top) = match place(&mut g) {
                Placement::Sub => (true, true),
                Placement::Quotient => (false, false),
                Placement::Straddle => (true, false),
            };
            in_sub[p].push(bottom);
            in_sub[p + 1].push(top);
            arrows.push((p + 1, in_sub[p + 1].len() - 1, in_sub[p].len() - 1));
        }
    }
    let dims_b: Vec<usize> = in_sub.iter().map(Vec::len).collect();
    let mut bd_b: Vec<Matrix> = (1..=n).map(|p| Matrix::zeros(dims_b[p - 1], dims_b[p])).collect();
    for &(p, src, tgt) in &arrows {
        bd_b[p - 1][(tgt, src)] = g.nonzero_rational();
    }
    let b = ChainComplex::new(dims_b.clone(), bd_b);
    let mut inclusion = Vec::with_capacity(n + 1);
    let mut projection = Vec::with_capacity(n + 1);
    for flags in &in_sub {
        let sub: Vec<usize> = (0..flags.len()).filter(|&i| flags[i]).collect();
        let quo: Vec<usize> = (0..flags.len()).filter(|&i| !flags[i]).collect();
        let id = Matrix::identity(flags.len());
        inclusion.push(id.select_columns(&sub));
        projection.push(id.select_rows(&quo));
    }
    let restrict_to = |rows: &[Matrix], cols: &[Matrix]| -> ChainComplex {
        let dims: Vec<usize> = cols.iter().map(Matrix::cols).collect();
        let bds = (1..=n).map(|p| &(&rows[p - 1] * &b.boundary(p)) * &cols[p]).collect();
        ChainComplex::new(dims, bds)
    };
    let a = restrict_to(
        &inclusion.iter().map(Matrix::transpose).collect::<Vec<_>>(),
        &inclusion,
    );
    let d = restrict_to(
        &projection,
        &projection.iter().map(Matrix::transpose).collect::<Vec<_>>(),
    );
    let mut ses = ShortExactSequence {
        a,
        b,
        d,
        inclusion,
        projection,
    };
    if cfg.conjugate {
        let (ta, ta_inv) = g.coordinate_change(ses.a.dims());
        let (tb, tb_inv) = g.coordinate_change(ses.b.dims());
        let (td, td_inv) = g.coordinate_change(ses.d.dims());
        ses = ShortExactSequence {
            a: ses.a.conjugate(&ta, &ta_inv),
            b: ses.b.conjugate(&tb, &tb_inv),
            d: ses.d.conjugate(&td, &td_inv),
            inclusion: (0..=n).map(|p| &(&tb_inv[p] * &ses.inclusion[p]) * &ta[p]).collect(),
            projection: (0..=n).map(|p| &(&td_inv[p] * &ses.projection[p]) * &tb[p]).collect(),
        };
    }
    debug_assert!(ses.validate().is_ok());

    let chain_a = g.chain_bases(ses.a.dims());
    let chain_d = g.chain_bases(ses.d.dims());
    let mut twists = Vec::with_capacity(n + 1);
    let mut chain_b = Vec::with_capacity(n + 1);
    for p in 0..=n {
        let lifted = solve_linear(&ses.projection[p], chain_d.degree(p)).expect("projection is surjective");
        let included = &ses.inclusion[p] * chain_a.degree(p);
        let combined = Matrix::hcat(ses.b.dim(p), &[&included, &lifted]).expect("same rows");
        let size = ses.b.dim(p);
        let twist = match g.rng().gen_range(0..3) {
            0 => Twist::Identity,
            1 => Twist::Unitriangular,
            _ if size >= 2 => Twist::OddPermutation,
            _ => Twist::Identity,
        };
        let u = twist_matrix(&mut g, size, twist);
        chain_b.push(&combined * &u);
        twists.push(twist);
    }
    let hom = |c: &ChainComplex, g: &mut Generator| {
        let h = crate::complex::compute_homology(c).expect("generated complexes are valid");
        g.homology_bases(&h)
    };
    let homology_a = hom(&ses.a, &mut g);
    let homology_b = hom(&ses.b, &mut g);
    let homology_d = hom(&ses.d, &mut g);
    Ok(GeneratedSes {
        bases: SesBases {
            chain_a,
            chain_b: BasisFamily(chain_b),
            chain_d,
            homology_a,
            homology_b,
            homology_d,
        },
        ses,
        twists,
    })
}

fn twist_matrix(g: &mut Generator, size: usize, twist: Twist) -> Matrix {
    let mut u = Matrix::identity(size);
    match twist {
        Twist::Identity => {}
        Twist::Unitriangular => {
            for i in 0..size {
                for j in i + 1..size {
                    u[(i, j)] = g.rational();
                }
            }
        }
        Twist::OddPermutation => {
            let i = g.rng().gen_range(0..size);
            let mut j = g.rng().gen_range(0..size - 1);
            if j >= i {
                j += 1;
            }
            u.swap_columns(i, j);
        }
    }
    u
}
