//! General position of flag configurations and uniform Noetherian constants.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{int, Rational};
use crate::exact::QMatrix;
use crate::flag::{canonicalize, transversal, Flag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoetherianParams {
    /// Ambient projective dimension.
    pub proj_dim: u64,
    /// Degree bound of the defining forms.
    pub max_deg: u64,
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// 1 + Σ_{r=0}^{D} C(d_proj + r, d_proj): one more than the dimension of the space
/// of forms of degree ≤ D in d_proj + 1 variables.
pub fn noetherian_bound(params: NoetherianParams) -> u128 {
    assert!(params.proj_dim >= 1, "projective dimension must be positive");
    1 + (0..=params.max_deg).map(|r| binomial(params.proj_dim + r, params.proj_dim)).sum::<u128>()
}

/// |S| · max_v K_v.
pub fn group_bound(per_place: &[u128]) -> Result<u128> {
    let max = per_place.iter().max().ok_or(Error::EmptyList)?;
    Ok(per_place.len() as u128 * max)
}

/// The conservative constant used by the witness pipeline: K = 1 on ℝℙ¹; for d ≥ 3
/// the Noetherian bound on the Plücker-product space with degree bound d.
pub fn pipeline_k(d: usize) -> u128 {
    if d == 2 {
        return 1;
    }
    let d64 = d as u64;
    let plucker: u64 = (1..d64).map(|i| binomial(d64, i) as u64).product();
    noetherian_bound(NoetherianParams { proj_dim: plucker - 1, max_deg: d64 })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub dim: usize,
    pub points: Vec<Flag>,
}

impl Configuration {
    pub fn new(points: Vec<Flag>) -> Result<Self> {
        let dim = points.first().map(|p| p.dim()).ok_or(Error::EmptyList)?;
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
        }
        Ok(Configuration { dim, points })
    }

    pub fn duplicate(&self) -> Option<(usize, usize)> {
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                if self.points[i] == self.points[j] {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum GpMode {
    ExactD2,
    MonteCarlo { seed: u64, trials: usize, max_subset: usize, entry_bound: i64 },
}

impl GpMode {
    pub fn monte_carlo(seed: u64) -> GpMode {
        GpMode::MonteCarlo { seed, trials: 200, max_subset: 2, entry_bound: 10 }
    }
}

/// A flag z ∈ ⋂_{x ∈ subset} Y_x with z ∉ Y_other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatingWitness {
    pub subset: Vec<usize>,
    pub other: usize,
    pub z: Flag,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum GpVerdict {
    CertifiedTrue,
    CertifiedFalse { subset: Vec<usize>, other: usize },
    ProbableTrue { max_subset: usize, witnesses: Vec<SeparatingWitness> },
    /// Some required non-containments found no separating flag within the trial budget.
    Unresolved { missing: Vec<(Vec<usize>, usize)>, witnesses: Vec<SeparatingWitness> },
    Counterexample { subset: Vec<usize>, other: usize },
}

impl GpVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, GpVerdict::CertifiedTrue | GpVerdict::ProbableTrue { .. })
    }
}

pub fn general_position_check(config: &Configuration, mode: GpMode) -> Result<GpVerdict> {
    if let Some((i, j)) = config.duplicate() {
        return Err(Error::DuplicatePoints(i, j));
    }
    match mode {
        GpMode::ExactD2 => {
            if config.dim != 2 {
                return Err(Error::PreconditionUnmet("exact general position needs d = 2".into()));
            }
            Ok(check_projective_line(config))
        }
        GpMode::MonteCarlo { seed, trials, max_subset, entry_bound } => {
            if config.dim == 2 {
                return Ok(check_projective_line(config));
            }
            Ok(monte_carlo(config, seed, trials, max_subset, entry_bound))
        }
    }
}

/// On ℝℙ¹, Y_x = {x}. A single Y-set {x} is not inside {x'} for x ≠ x', and two or
/// more distinct singletons have empty intersection, so only singletons matter.
fn check_projective_line(config: &Configuration) -> GpVerdict {
    let n = config.points.len();
    for i in 0..n {
        for j in 0..n {
            if i != j && config.points[i] == config.points[j] {
                return GpVerdict::CertifiedFalse { subset: vec![i], other: j };
            }
        }
    }
    GpVerdict::CertifiedTrue
}

pub fn random_flag(rng: &mut impl Rng, d: usize, bound: i64) -> Flag {
    loop {
        let entries: Vec<Rational> = (0..d * d).map(|_| int(rng.gen_range(-bound..=bound))).collect();
        if let Ok(f) = canonicalize(&QMatrix::from_vec(d, d, entries)) {
            return f;
        }
    }
}

fn random_vector(rng: &mut impl Rng, d: usize, bound: i64) -> Vec<Rational> {
    (0..d).map(|_| int(rng.gen_range(-bound..=bound))).collect()
}

/// Random vector in the common kernel of the given linear forms (rows), or None.
fn random_in_kernel(rng: &mut impl Rng, forms: &[Vec<Rational>], d: usize, bound: i64) -> Option<Vec<Rational>> {
    if forms.is_empty() {
        return Some(random_vector(rng, d, bound));
    }
    // project a random vector onto the kernel by solving for the pivot coordinates
    let m = QMatrix::from_rows(forms.to_vec()).ok()?;
    let basis = kernel_basis(&m);
    if basis.is_empty() {
        return None;
    }
    let mut v = vec![int(0); d];
    for b in &basis {
        let c = int(rng.gen_range(-bound..=bound));
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi += &c * bi;
        }
    }
    v.iter().any(|x| *x != int(0)).then_some(v)
}

/// Basis of the right kernel of m.
pub fn kernel_basis(m: &QMatrix) -> Vec<Vec<Rational>> {
    let (r, c) = (m.rows(), m.cols());
    let mut a = m.to_rows();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..c {
        let Some(p) = (row..r).find(|&i| a[i][col] != int(0)) else { continue };
        a.swap(row, p);
        let inv = Rational::from_integer(1.into()) / &a[row][col];
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..r {
            if i != row && a[i][col] != int(0) {
                let f = a[i][col].clone();
                let prow = a[row].clone();
                for (x, y) in a[i].iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == r {
            break;
        }
    }
    let free: Vec<usize> = (0..c).filter(|j| !pivots.contains(j)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![int(0); c];
            v[f] = int(1);
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = -a[k][f].clone();
            }
            v
        })
        .collect()
}

/// Normal vector of the hyperplane V_{d−1}(x).
fn hyperplane_normal(x: &Flag) -> Vec<Rational> {
    let d = x.dim();
    let h = x.subspace(d - 1).transpose();
    kernel_basis(&h).remove(0)
}

/// A flag lying in Y_x for every x in `subset`. Either its line sits in every
/// hyperplane V_{d−1}(x), or its hyperplane contains every line V_1(x).
pub fn structured_candidate(rng: &mut impl Rng, subset: &[&Flag], d: usize, bound: i64) -> Option<Flag> {
    let line_in_hyperplanes = rng.gen_bool(0.5);
    let mut cols: Vec<Vec<Rational>> = Vec::new();
    if line_in_hyperplanes {
        let forms: Vec<Vec<Rational>> = subset.iter().map(|x| hyperplane_normal(x)).collect();
        cols.push(random_in_kernel(rng, &forms, d, bound)?);
        while cols.len() < d {
            cols.push(random_vector(rng, d, bound));
        }
    } else {
        // first d−1 columns span a hyperplane containing each line V_1(x)
        for x in subset {
            cols.push(x.basis().column(0));
        }
        while cols.len() < d - 1 {
            cols.push(random_vector(rng, d, bound));
        }
        if cols.len() > d - 1 {
            return None;
        }
        cols.shuffle(rng);
        // random combinations keep the span while varying the partial flag
        let mixed: Vec<Vec<Rational>> = (0..d - 1)
            .map(|_| {
                let mut v = vec![int(0); d];
                for c in &cols {
                    let k = int(rng.gen_range(-bound..=bound));
                    for (vi, ci) in v.iter_mut().zip(c) {
                        *vi += &k * ci;
                    }
                }
                v
            })
            .collect();
        cols = mixed;
        cols.push(random_vector(rng, d, bound));
    }
    let z = canonicalize(&QMatrix::from_columns(&cols)).ok()?;
    subset.iter().all(|x| !transversal(x, &z)).then_some(z)
}

fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, max, cur, out);
            cur.pop();
        }
    }
    rec(0, n, max, &mut cur, &mut out);
    out
}

fn monte_carlo(config: &Configuration, seed: u64, trials: usize, max_subset: usize, bound: i64) -> GpVerdict {
    let d = config.dim;
    let n = config.points.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut witnesses = Vec::new();
    let mut missing = Vec::new();
    // subfamilies of size ≥ d have empty-or-small intersections that random search cannot target
    let max_subset = max_subset.min(d - 1);
    for subset in subsets(n, max_subset) {
        let members: Vec<&Flag> = subset.iter().map(|&i| &config.points[i]).collect();
        let mut pending: Vec<usize> = (0..n).filter(|j| !subset.contains(j)).collect();
        for _ in 0..trials {
            if pending.is_empty() {
                break;
            }
            let Some(z) = structured_candidate(&mut rng, &members, d, bound) else { continue };
            pending.retain(|&other| {
                if transversal(&config.points[other], &z) {
                    witnesses.push(SeparatingWitness { subset: subset.clone(), other, z: z.clone() });
                    false
                } else {
                    true
                }
            });
        }
        for other in pending {
            missing.push((subset.clone(), other));
        }
    }
    if missing.is_empty() {
        GpVerdict::ProbableTrue { max_subset, witnesses }
    } else {
        GpVerdict::Unresolved { missing, witnesses }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionClaim {
    pub k: u128,
    pub points: usize,
    /// "vacuous", "exact" or "sampled".
    pub level: String,
    pub samples: usize,
    pub max_depth_observed: usize,
    pub holds: bool,
}

/// Records that every subfamily of more than K points has empty ⋂ Y, checking it
/// exhaustively on ℝℙ¹ and by depth sampling otherwise.
pub fn empty_intersection_bound(
    config: &Configuration,
    k: u128,
    verdict: &GpVerdict,
    seed: u64,
    samples: usize,
) -> Result<IntersectionClaim> {
    if !verdict.holds() {
        return Err(Error::PreconditionUnmet("general position was not established".into()));
    }
    let n = config.points.len();
    if (n as u128) <= k {
        return Ok(IntersectionClaim { k, points: n, level: "vacuous".into(), samples: 0, max_depth_observed: 0, holds: true });
    }
    if config.dim == 2 {
        // Y-sets are singletons; a point lies in at most one of them when the points are distinct
        let distinct = config.duplicate().is_none();
        let depth = if distinct { 1 } else { 2 };
        return Ok(IntersectionClaim {
            k,
            points: n,
            level: "exact".into(),
            samples: 0,
            max_depth_observed: depth,
            holds: depth as u128 <= k,
        });
    }
    let d = config.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_depth = 0;
    for s in 0..samples {
        // alternate plain random flags with flags forced into several Y-sets at once
        let z = if s % 2 == 0 {
            random_flag(&mut rng, d, 10)
        } else {
            let size = rng.gen_range(1..d).min(n);
            let members: Vec<&Flag> = config.points.choose_multiple(&mut rng, size).collect();
            match structured_candidate(&mut rng, &members, d, 10) {
                Some(z) => z,
                None => continue,
            }
        };
        let depth = config.points.iter().filter(|x| !transversal(x, &z)).count();
        max_depth = max_depth.max(depth);
    }
    Ok(IntersectionClaim {
        k,
        points: n,
        level: "sampled".into(),
        samples,
        max_depth_observed: max_depth,
        holds: max_depth as u128 <= k,
    })
}
