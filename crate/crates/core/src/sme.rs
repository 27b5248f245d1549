//! Sparse mixing estimator.
//!
//! Weights `a(B) >= 0` are fitted per block by minimizing
//!
//! ```text
//! 1/2 sum_p e(p) (1 - s(p))^2 + lambda sum_B a(B) R(B),    s = sum_B a(B) 1_B
//! ```
//!
//! where `e(p)` is the coefficient energy at grid position `p` summed over
//! the block channels and `R(B)` is the directional regularizer. The
//! reconstruction then interpolates the detail carried by each direction's
//! blocks with that direction's interpolator:
//!
//! ```text
//! f = U y + sum_theta (U_theta - U) S(mask_theta c)
//! ```
//!
//! `lambda` is dimensionless: both terms scale with the coefficient energy,
//! so the weights do not change when the image is rescaled.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::blocks::{Block, BlockFamily};
use crate::error::{Error, Result};
use crate::ffst::{ShearletCoefficients, ShearletSystem};
use crate::image::{GrayImage, Plane};
use crate::resample::{bicubic_up2, directional_up2};
use crate::wavelet::{dwt2, idwt2, WaveletCoefficients};

/// Default regularization weight.
pub const DEFAULT_LAMBDA: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub max_sweeps: usize,
    /// Stop once a sweep lowers the objective by less than this fraction.
    pub tolerance: f64,
    /// Blocks holding less than this fraction of the total energy are skipped.
    pub prune: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_sweeps: 10,
            tolerance: 1e-8,
            prune: 1e-12,
        }
    }
}

/// Solved weights. Only blocks with positive weight are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct MixingWeights {
    pub lambda: f64,
    /// `(block id, weight)`, ascending by id.
    pub weights: Vec<(u64, f64)>,
    /// Objective of the stored weights.
    pub objective: f64,
    /// Objective after each sweep, starting with the all-zero point.
    pub history: Vec<f64>,
}

impl MixingWeights {
    pub fn empty(lambda: f64, objective: f64) -> Self {
        MixingWeights {
            lambda,
            weights: Vec::new(),
            objective,
            history: vec![objective],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, id: u64) -> f64 {
        self.weights
            .binary_search_by_key(&id, |w| w.0)
            .map_or(0.0, |i| self.weights[i].1)
    }

    /// Text dump, one block per line: id, direction in degrees, anchor row,
    /// anchor column, weight.
    pub fn dump(&self, family: &BlockFamily) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# lambda {} objective {:.12e}",
            self.lambda, self.objective
        );
        let _ = writeln!(out, "# id theta_deg row col weight");
        for &(id, a) in &self.weights {
            let b = family.block(id);
            let _ = writeln!(
                out,
                "{id} {:.4} {} {} {a:.12e}",
                family.theta(&b).to_degrees(),
                b.anchor.0,
                b.anchor.1
            );
        }
        out
    }
}

fn check_channels(channels: &[&Plane], family: &BlockFamily) -> Result<()> {
    if channels.is_empty() {
        return Err(Error::InvalidArgument("no coefficient channels".into()));
    }
    for c in channels {
        if c.dims() != family.dims() {
            return Err(Error::DimensionMismatch {
                expected: family.dims(),
                found: c.dims(),
            });
        }
    }
    Ok(())
}

/// Mean of each channel along each line of the block, expanded back to the
/// block's positions: `out[channel][i]` belongs to the `i`-th offset of the
/// block's shape.
pub fn directional_average(
    channels: &[&Plane],
    family: &BlockFamily,
    block: &Block,
) -> Vec<Vec<f64>> {
    let shape = family.shape(block.shape);
    let pos: Vec<(usize, usize)> = family.positions(block).collect();
    channels
        .iter()
        .map(|c| {
            let mut out = Vec::with_capacity(pos.len());
            let mut start = 0;
            for line in shape.lines() {
                let span = &pos[start..start + line.len()];
                let mean =
                    span.iter().map(|&(r, col)| c.get(r, col)).sum::<f64>() / span.len() as f64;
                out.extend(std::iter::repeat_n(mean, span.len()));
                start += line.len();
            }
            out
        })
        .collect()
}

/// `sum_channels sum_lines sum (c - line mean)^2` over the block.
pub fn regularizer(channels: &[&Plane], family: &BlockFamily, block: &Block) -> f64 {
    let (m, n) = family.dims();
    let (r0, c0) = (block.anchor.0 as isize, block.anchor.1 as isize);
    let shape = family.shape(block.shape);
    let mut total = 0.0;
    let mut buf = Vec::with_capacity(32);
    for line in shape.lines() {
        let idx = line.iter().map(|&(dr, dc)| {
            let r = (r0 + dr).rem_euclid(m as isize) as usize;
            let c = (c0 + dc).rem_euclid(n as isize) as usize;
            r * n + c
        });
        buf.clear();
        buf.extend(idx);
        if buf.len() < 2 {
            continue;
        }
        for ch in channels {
            let d = ch.data();
            let mean = buf.iter().map(|&i| d[i]).sum::<f64>() / buf.len() as f64;
            total += buf.iter().map(|&i| (d[i] - mean).powi(2)).sum::<f64>();
        }
    }
    total
}

/// Coefficient energy summed over channels at every grid position.
pub fn energy_map(channels: &[&Plane]) -> Plane {
    let (m, n) = channels[0].dims();
    let mut e = Plane::zeros(m, n);
    for ch in channels {
        for (acc, v) in e.data_mut().iter_mut().zip(ch.data()) {
            *acc += v * v;
        }
    }
    e
}

/// Evaluates the objective of `weights` directly.
pub fn objective(
    channels: &[&Plane],
    family: &BlockFamily,
    weights: &[(u64, f64)],
    lambda: f64,
) -> Result<f64> {
    check_channels(channels, family)?;
    let e = energy_map(channels);
    let mut cover = vec![0.0; e.data().len()];
    let n = family.dims().1;
    let mut penalty = 0.0;
    for &(id, a) in weights {
        let b = family.block(id);
        for (r, c) in family.positions(&b) {
            cover[r * n + c] += a;
        }
        penalty += a.abs() * regularizer(channels, family, &b);
    }
    let fidelity: f64 = e
        .data()
        .iter()
        .zip(&cover)
        .map(|(e, s)| e * (1.0 - s).powi(2))
        .sum();
    Ok(0.5 * fidelity + lambda * penalty)
}

struct Candidate {
    id: u64,
    energy: f64,
    reg: f64,
}

/// Flat grid indices covered by block `id`.
fn cells(family: &BlockFamily, id: u64, out: &mut Vec<usize>) {
    let b = family.block(id);
    let n = family.dims().1;
    out.clear();
    out.extend(family.positions(&b).map(|(r, c)| r * n + c));
}

/// Minimizes the mixing objective over every canonical block of the family.
///
/// Block coordinate descent from zero. Blocks are visited in descending order
/// of `(E(B) - lambda R(B))^2 / E(B)`, twice the objective decrease the block
/// would give on its own (ties by id), so blocks that explain the most
/// detail claim coverage first. Blocks with `lambda R(B) >= E(B)` can never take a
/// positive weight and are skipped along with negligible-energy blocks.
pub fn solve_weights(
    channels: &[&Plane],
    family: &BlockFamily,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<MixingWeights> {
    check_channels(channels, family)?;
    check_lambda(lambda)?;
    let e = energy_map(channels);
    let total: f64 = e.data().iter().sum();
    let floor = opts.prune * total;
    let (m, n) = family.dims();

    let shapes: Vec<usize> = (0..family.shapes().len())
        .filter(|&s| family.is_canonical(s))
        .collect();
    let rows: Vec<(usize, usize)> = shapes
        .iter()
        .flat_map(|&s| (0..m).map(move |r| (s, r)))
        .collect();
    let mut candidates: Vec<Candidate> = rows
        .par_iter()
        .flat_map_iter(|&(s, r)| {
            let e = &e;
            (0..n).filter_map(move |c| {
                let block = family.block(family.block_id(s, (r, c)));
                let energy: f64 = family
                    .positions(&block)
                    .map(|(r, c)| e.data()[r * n + c])
                    .sum();
                if energy <= floor || energy == 0.0 {
                    return None;
                }
                let reg = regularizer(channels, family, &block);
                if lambda * reg >= energy {
                    return None;
                }
                Some(Candidate {
                    id: block.id,
                    energy,
                    reg,
                })
            })
        })
        .collect();
    let gain = |c: &Candidate| (c.energy - lambda * c.reg).powi(2) / c.energy;
    candidates.sort_by(|a, b| gain(b).total_cmp(&gain(a)).then(a.id.cmp(&b.id)));
    Ok(descend(family, &e, &candidates, lambda, opts))
}

/// Like [`solve_weights`] restricted to the listed blocks, visited in the
/// given order.
pub fn solve_weights_for(
    channels: &[&Plane],
    family: &BlockFamily,
    blocks: &[Block],
    lambda: f64,
    opts: &SolverOptions,
) -> Result<MixingWeights> {
    check_channels(channels, family)?;
    check_lambda(lambda)?;
    let e = energy_map(channels);
    let total: f64 = e.data().iter().sum();
    let n = family.dims().1;
    let candidates: Vec<Candidate> = blocks
        .iter()
        .filter_map(|b| {
            let energy: f64 = family.positions(b).map(|(r, c)| e.data()[r * n + c]).sum();
            if energy <= opts.prune * total || energy == 0.0 {
                return None;
            }
            Some(Candidate {
                id: b.id,
                energy,
                reg: regularizer(channels, family, b),
            })
        })
        .collect();
    Ok(descend(family, &e, &candidates, lambda, opts))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::NegativeLambda(lambda));
    }
    Ok(())
}

fn evaluate(e: &[f64], cover: &[f64], candidates: &[Candidate], a: &[f64], lambda: f64) -> f64 {
    let fidelity: f64 = e
        .iter()
        .zip(cover)
        .map(|(e, s)| e * (1.0 - s).powi(2))
        .sum();
    let penalty: f64 = candidates.iter().zip(a).map(|(c, a)| a * c.reg).sum();
    0.5 * fidelity + lambda * penalty
}

fn descend(
    family: &BlockFamily,
    e: &Plane,
    candidates: &[Candidate],
    lambda: f64,
    opts: &SolverOptions,
) -> MixingWeights {
    let e = e.data();
    let mut buf = Vec::with_capacity(32);
    let mut cover = vec![0.0; e.len()];
    let mut a = vec![0.0; candidates.len()];
    let mut history = vec![evaluate(e, &cover, candidates, &a, lambda)];

    for _ in 0..opts.max_sweeps {
        for (k, cand) in candidates.iter().enumerate() {
            let old = a[k];
            cells(family, cand.id, &mut buf);
            let mut num = 0.0;
            for &i in &buf {
                num += e[i] * (1.0 - cover[i] + old);
            }
            let new = ((num - lambda * cand.reg) / cand.energy).max(0.0);
            if new != old {
                let d = new - old;
                for &i in &buf {
                    cover[i] += d;
                }
                a[k] = new;
            }
        }
        let prev = *history.last().expect("history starts non-empty");
        let cur = evaluate(e, &cover, candidates, &a, lambda);
        assert!(
            cur <= prev + 1e-9 * prev.abs().max(f64::MIN_POSITIVE),
            "objective increased from {prev} to {cur}"
        );
        history.push(cur);
        if prev - cur <= opts.tolerance * prev.abs() {
            break;
        }
    }

    let mut weights: Vec<(u64, f64)> = candidates
        .iter()
        .zip(&a)
        .filter(|(_, &w)| w > 0.0)
        .map(|(c, &w)| (c.id, w))
        .collect();
    weights.sort_by_key(|w| w.0);
    MixingWeights {
        lambda,
        weights,
        objective: *history.last().expect("non-empty"),
        history,
    }
}

/// Per-direction coverage `sum_{B in theta} a(B) 1_B`, indexed like
/// [`BlockFamily::thetas`].
pub fn coverage(family: &BlockFamily, weights: &MixingWeights) -> Vec<Plane> {
    let (m, n) = family.dims();
    let mut out = vec![Plane::zeros(m, n); family.thetas().len()];
    for &(id, a) in &weights.weights {
        let b = family.block(id);
        let plane = &mut out[family.theta_index(b.shape)];
        for (r, c) in family.positions(&b) {
            plane[(r, c)] += a;
        }
    }
    out
}

/// Detail coefficients that feed the estimator, with the matching masked
/// synthesis.
#[derive(Clone, Debug)]
pub enum DetailFrame {
    /// Shear bands of the finest scale of a shearlet analysis.
    Shearlet {
        system: ShearletSystem,
        coeffs: ShearletCoefficients,
    },
    /// The three detail channels of a one-level wavelet transform.
    Wavelet(WaveletCoefficients),
}

impl DetailFrame {
    pub fn shearlet(system: ShearletSystem, y: &Plane) -> Result<Self> {
        let coeffs = system.analyze(y)?;
        Ok(DetailFrame::Shearlet { system, coeffs })
    }

    pub fn wavelet(y: &Plane) -> Result<Self> {
        Ok(DetailFrame::Wavelet(dwt2(y)?))
    }

    /// Band or channel indices of the block channels.
    pub fn channel_ids(&self) -> Vec<usize> {
        match self {
            DetailFrame::Shearlet { system, coeffs } => coeffs.scale_indices(system.scales() - 1),
            DetailFrame::Wavelet(_) => vec![1, 2, 3],
        }
    }

    pub fn channels(&self) -> Vec<&Plane> {
        match self {
            DetailFrame::Shearlet { coeffs, .. } => self
                .channel_ids()
                .into_iter()
                .map(|i| &coeffs.planes()[i])
                .collect(),
            DetailFrame::Wavelet(w) => w.details().to_vec(),
        }
    }

    /// Grid the blocks live on.
    pub fn grid(&self) -> (usize, usize) {
        match self {
            DetailFrame::Shearlet { coeffs, .. } => coeffs.dims(),
            DetailFrame::Wavelet(w) => w.approx.dims(),
        }
    }

    /// Synthesizes the block channels multiplied by `mask`, every other
    /// coefficient set to zero. The result lives on the image grid.
    pub fn synthesize_masked(&self, mask: &Plane) -> Result<Plane> {
        if mask.dims() != self.grid() {
            return Err(Error::DimensionMismatch {
                expected: self.grid(),
                found: mask.dims(),
            });
        }
        let masked = |p: &Plane| {
            Plane::from_vec(
                p.rows(),
                p.cols(),
                p.data()
                    .iter()
                    .zip(mask.data())
                    .map(|(c, m)| c * m)
                    .collect(),
            )
        };
        match self {
            DetailFrame::Shearlet { system, coeffs } => {
                let mut out = ShearletCoefficients::zeros(system);
                for i in self.channel_ids() {
                    out.planes_mut()[i] = masked(&coeffs.planes()[i])?;
                }
                system.synthesize(&out)
            }
            DetailFrame::Wavelet(w) => {
                let (m, n) = w.approx.dims();
                idwt2(&WaveletCoefficients {
                    approx: Plane::zeros(m, n),
                    vertical: masked(&w.vertical)?,
                    horizontal: masked(&w.horizontal)?,
                    diagonal: masked(&w.diagonal)?,
                })
            }
        }
    }
}

type Upsampler = Box<dyn Fn(&Plane) -> Plane + Send + Sync>;

/// The isotropic interpolator and one directional interpolator per angle.
pub struct Interpolators {
    isotropic: Upsampler,
    directional: Vec<(f64, Upsampler)>,
}

impl Interpolators {
    /// Bicubic plus [`directional_up2`] at each angle.
    pub fn standard(thetas: &[f64]) -> Self {
        Interpolators {
            isotropic: Box::new(bicubic_up2),
            directional: thetas
                .iter()
                .map(|&t| {
                    (
                        t,
                        Box::new(move |p: &Plane| directional_up2(p, t)) as Upsampler,
                    )
                })
                .collect(),
        }
    }

    pub fn new(isotropic: Upsampler, directional: Vec<(f64, Upsampler)>) -> Self {
        Interpolators {
            isotropic,
            directional,
        }
    }

    pub fn isotropic(&self, img: &Plane) -> Plane {
        (self.isotropic)(img)
    }

    pub fn directional(&self, theta: f64, img: &Plane) -> Result<Plane> {
        self.directional
            .iter()
            .find(|(t, _)| (t - theta).abs() < 1e-9)
            .map(|(_, f)| f(img))
            .ok_or(Error::MissingInterpolator(theta))
    }
}

/// Mixed reconstruction `U y + sum_theta (U_theta - U) S(mask_theta c)`,
/// clamped to `[0, 1]` at the end.
pub fn mix_and_reconstruct(
    y: &Plane,
    frame: &DetailFrame,
    weights: &MixingWeights,
    family: &BlockFamily,
    interpolators: &Interpolators,
) -> Result<GrayImage> {
    let mut out = interpolators.isotropic(y);
    let masks = coverage(family, weights);
    let terms: Vec<Result<Option<Plane>>> = masks
        .par_iter()
        .enumerate()
        .map(|(t, mask)| {
            if mask.data().iter().all(|&v| v == 0.0) {
                return Ok(None);
            }
            let detail = frame.synthesize_masked(mask)?;
            if detail.dims() != y.dims() {
                return Err(Error::DimensionMismatch {
                    expected: y.dims(),
                    found: detail.dims(),
                });
            }
            let mut term = interpolators.directional(family.thetas()[t], &detail)?;
            term.sub_assign(&interpolators.isotropic(&detail));
            Ok(Some(term))
        })
        .collect();
    for term in terms {
        if let Some(t) = term? {
            out.add_assign(&t);
        }
    }
    Ok(GrayImage::clamped(out))
}

/// Decompose, solve and reconstruct in one call.
pub fn superresolve(
    y: &Plane,
    frame: &DetailFrame,
    family: &BlockFamily,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<(GrayImage, MixingWeights)> {
    let channels = frame.channels();
    let weights = solve_weights(&channels, family, lambda, opts)?;
    let interp = Interpolators::standard(family.thetas());
    let out = mix_and_reconstruct(y, frame, &weights, family, &interp)?;
    Ok((out, weights))
}

/// Groups weights by direction index, for diagnostics.
pub fn weights_by_theta(family: &BlockFamily, weights: &MixingWeights) -> BTreeMap<usize, f64> {
    let mut out = BTreeMap::new();
    for &(id, a) in &weights.weights {
        *out.entry(family.theta_index(family.block(id).shape))
            .or_insert(0.0) += a;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::BlockConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_family(angles: &str) -> BlockFamily {
        let cfg: BlockConfig = format!("shapes = 5x3, 3x2, 2x1\n{angles}").parse().unwrap();
        BlockFamily::with_config(8, 8, vec![0, 1], &cfg).unwrap()
    }

    fn random_plane(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Plane {
        Plane::from_fn(m, n, |_, _| rng.random::<f64>() - 0.5)
    }

    #[test]
    fn average_matches_brute_force_grouping() {
        let fam = small_family("angles = 1");
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (a, b) = (random_plane(8, 8, &mut rng), random_plane(8, 8, &mut rng));
        let block = fam.block(fam.block_id(0, (6, 7)));
        let avg = directional_average(&[&a, &b], &fam, &block);
        // 5x3 at angle 0: lines are block rows; group positions by row
        let pos: Vec<(usize, usize)> = fam.positions(&block).collect();
        assert_eq!(pos.len(), 15);
        for (ch, plane) in [&a, &b].iter().enumerate() {
            for (i, &(r, _)) in pos.iter().enumerate() {
                let same: Vec<f64> = pos
                    .iter()
                    .filter(|p| p.0 == r)
                    .map(|&(r, c)| plane.get(r, c))
                    .collect();
                assert_eq!(same.len(), 5);
                let mean = same.iter().sum::<f64>() / 5.0;
                assert!((avg[ch][i] - mean).abs() < 1e-15);
            }
        }
        let reg = regularizer(&[&a, &b], &fam, &block);
        let direct: f64 = [&a, &b]
            .iter()
            .enumerate()
            .map(|(ch, p)| {
                pos.iter()
                    .enumerate()
                    .map(|(i, &(r, c))| (p.get(r, c) - avg[ch][i]).powi(2))
                    .sum::<f64>()
            })
            .sum();
        assert!((reg - direct).abs() < 1e-13);
    }

    #[test]
    fn regularizer_vanishes_on_line_constant_data() {
        let fam = small_family("angles = 1");
        let rows = Plane::from_fn(8, 8, |r, _| r as f64 * 0.1 - 0.3);
        let block = fam.block(fam.block_id(0, (2, 2)));
        assert_eq!(regularizer(&[&rows], &fam, &block), 0.0);
        let avg = directional_average(&[&rows], &fam, &block);
        for (i, (r, c)) in fam.positions(&block).enumerate() {
            assert!((avg[0][i] - rows.get(r, c)).abs() < 1e-15);
        }
        assert_eq!(regularizer(&[&Plane::zeros(8, 8)], &fam, &block), 0.0);
    }

    #[test]
    fn regularizer_scales_quadratically() {
        let fam = small_family("angles = 4");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_plane(8, 8, &mut rng);
        let mut y = x.clone();
        y.scale(2.0);
        for id in (0..fam.len()).step_by(17) {
            let b = fam.block(id);
            let (rx, ry) = (regularizer(&[&x], &fam, &b), regularizer(&[&y], &fam, &b));
            assert_eq!(ry, 4.0 * rx);
        }
    }

    /// Disjoint row-aligned blocks on an 8x8 grid.
    fn disjoint_blocks(fam: &BlockFamily, rng: &mut ChaCha8Rng) -> Vec<Block> {
        // 2x1 blocks tile each row in four pieces; pick a random subset.
        let shape = 2;
        let mut blocks = Vec::new();
        for r in 0..8 {
            for k in 0..4 {
                blocks.push(fam.block(fam.block_id(shape, (r, 2 * k))));
            }
        }
        let count = rng.random_range(1..=12);
        let mut chosen = Vec::new();
        while chosen.len() < count {
            let b = blocks[rng.random_range(0..blocks.len())];
            if !chosen.contains(&b) {
                chosen.push(b);
            }
        }
        chosen
    }

    #[test]
    fn solver_matches_closed_form_on_disjoint_blocks() {
        let fam = small_family("angles = 1");
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..8 {
            let c = [random_plane(8, 8, &mut rng), random_plane(8, 8, &mut rng)];
            let ch: Vec<&Plane> = c.iter().collect();
            let blocks = disjoint_blocks(&fam, &mut rng);
            for lambda in [0.0, 0.05, 0.5, 5.0] {
                let w = solve_weights_for(&ch, &fam, &blocks, lambda, &SolverOptions::default())
                    .unwrap();
                for b in &blocks {
                    let energy: f64 = fam
                        .positions(b)
                        .map(|(r, col)| ch.iter().map(|p| p.get(r, col).powi(2)).sum::<f64>())
                        .sum();
                    let expect = (1.0 - lambda * regularizer(&ch, &fam, b) / energy).max(0.0);
                    assert!(
                        (w.get(b.id) - expect).abs() < 1e-8,
                        "round {round} lambda {lambda}"
                    );
                }
                assert!(w.history.windows(2).all(|p| p[1] <= p[0]));
                let direct = objective(&ch, &fam, &w.weights, lambda).unwrap();
                assert!((direct - w.objective).abs() <= 1e-12 * direct.max(1.0));
            }
        }
    }

    #[test]
    fn zero_lambda_covers_everything() {
        let fam = small_family("angles = 1");
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = random_plane(8, 8, &mut rng);
        let blocks: Vec<Block> = (0..8)
            .flat_map(|r| (0..4).map(move |k| (r, 2 * k)))
            .map(|a| fam.block(fam.block_id(2, a)))
            .collect();
        let w = solve_weights_for(&[&c], &fam, &blocks, 0.0, &SolverOptions::default()).unwrap();
        let cover = coverage(&fam, &w);
        assert!(cover[0].data().iter().all(|&s| (s - 1.0).abs() < 1e-12));
        assert!(w.objective.abs() < 1e-20);
    }

    #[test]
    fn huge_lambda_gives_empty_weights() {
        // axis-aligned shapes only, so every line holds two or more cells
        let cfg: BlockConfig = "shapes = 5x3, 3x2\nangles = 1".parse().unwrap();
        let fam = BlockFamily::with_config(8, 8, vec![0], &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = random_plane(8, 8, &mut rng);
        let w = solve_weights(&[&c], &fam, 1e6, &SolverOptions::default()).unwrap();
        assert!(w.is_empty());
        assert!(matches!(
            solve_weights(&[&c], &fam, -1.0, &SolverOptions::default()),
            Err(Error::NegativeLambda(_))
        ));
    }

    #[test]
    fn full_solver_is_monotone() {
        let fam = small_family("angles = 4");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = [random_plane(8, 8, &mut rng), random_plane(8, 8, &mut rng)];
        let ch: Vec<&Plane> = c.iter().collect();
        for lambda in [0.0, 0.3, 0.9] {
            let w = solve_weights(&ch, &fam, lambda, &SolverOptions::default()).unwrap();
            assert!(w.history.windows(2).all(|p| p[1] <= p[0] + 1e-15));
            assert!(w.weights.iter().all(|&(_, a)| a > 0.0));
            let direct = objective(&ch, &fam, &w.weights, lambda).unwrap();
            assert!((direct - w.objective).abs() <= 1e-10 * direct.max(1.0));
            let again = solve_weights(&ch, &fam, lambda, &SolverOptions::default()).unwrap();
            assert_eq!(w, again);
        }
    }

    #[test]
    fn empty_weights_reconstruct_isotropically() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let y = Plane::from_fn(32, 32, |_, _| rng.random::<f64>());
        let frame = DetailFrame::wavelet(&y).unwrap();
        let fam = BlockFamily::with_config(
            16,
            16,
            vec![1, 2, 3],
            &"shapes = 3x1, 1x3\nangles = 2".parse().unwrap(),
        )
        .unwrap();
        let interp = Interpolators::standard(fam.thetas());
        let out = mix_and_reconstruct(&y, &frame, &MixingWeights::empty(0.5, 0.0), &fam, &interp)
            .unwrap();
        assert_eq!(out.plane(), GrayImage::clamped(bicubic_up2(&y)).plane());
    }

    #[test]
    fn missing_interpolator_is_reported() {
        let y = Plane::from_fn(32, 32, |r, _| if r < 16 { 0.2 } else { 0.8 });
        let frame = DetailFrame::wavelet(&y).unwrap();
        let fam = BlockFamily::with_config(
            16,
            16,
            vec![1, 2, 3],
            &"shapes = 3x1\nangles = 2".parse().unwrap(),
        )
        .unwrap();
        let w = solve_weights(&frame.channels(), &fam, 0.1, &SolverOptions::default()).unwrap();
        assert!(!w.is_empty());
        let interp = Interpolators::standard(&fam.thetas()[..1]);
        let res = mix_and_reconstruct(&y, &frame, &w, &fam, &interp);
        assert!(
            matches!(res, Err(Error::MissingInterpolator(_)))
                || weights_by_theta(&fam, &w).keys().all(|&t| t == 0)
        );
    }
}
