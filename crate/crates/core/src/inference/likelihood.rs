use serde::{Deserialize, Serialize};

use crate::discrete_sampling::{ChannelSet, PatternEvaluation};
use crate::error::{Error, Result};
use crate::frequencies::FrequencySelection;
use crate::inference::Periodogram;
use crate::wave_models::{
    depth_attenuation, model_pattern, model_pattern_with_gradient, EntryPattern,
};
use crate::{
    ExpectedPeriodogramPlan, Parameters, PhysicalContext, SamplingScheme, SpectralMatrix, N_PARAMS,
};

/// Determinants at or below this value make the objective −∞.
pub const DETERMINANT_FLOOR: f64 = 1e-300;

/// Which spectral model the Whittle-type objective compares the
/// periodogram with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// The aliased model spectral density matrix.
    Whittle,
    /// The expected periodogram of the model.
    Debiased,
}

/// Model matrices (and gradients) over a fixed frequency selection.
pub struct SpectralModel {
    objective: Objective,
    channels: ChannelSet,
    ctx: PhysicalContext,
    scheme: SamplingScheme,
    selection: FrequencySelection,
    abs_indices: Vec<usize>,
    plan: Option<ExpectedPeriodogramPlan>,
    /// tanh(k h) per (frequency, fold) for the Whittle path; empty in deep water.
    attenuation: Vec<f64>,
}

impl std::fmt::Debug for SpectralModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralModel")
            .field("objective", &self.objective)
            .field("channels", &self.channels)
            .field("scheme", &self.scheme)
            .field("frequencies", &self.selection.len())
            .finish()
    }
}

impl SpectralModel {
    pub fn new(
        objective: Objective,
        channels: ChannelSet,
        ctx: PhysicalContext,
        scheme: SamplingScheme,
        selection: FrequencySelection,
    ) -> Result<Self> {
        scheme.validate()?;
        ctx.validate()?;
        if selection.n() != scheme.n
            || (selection.delta() - scheme.delta).abs() > 1e-12 * scheme.delta
        {
            return Err(Error::InvalidSelection(format!(
                "selection (n={}, delta={}) does not match the sampling scheme (n={}, delta={})",
                selection.n(),
                selection.delta(),
                scheme.n,
                scheme.delta
            )));
        }
        if selection.is_empty() {
            return Err(Error::InvalidSelection("empty frequency selection".into()));
        }
        let abs_indices: Vec<usize> = selection
            .indices()
            .iter()
            .map(|j| j.unsigned_abs())
            .collect();
        let plan = match objective {
            Objective::Debiased => Some(ExpectedPeriodogramPlan::new(ctx, scheme, channels)?),
            Objective::Whittle => None,
        };
        let mut model = Self {
            objective,
            channels,
            ctx,
            scheme,
            selection,
            abs_indices,
            plan,
            attenuation: Vec::new(),
        };
        if objective == Objective::Whittle && !ctx.is_deep() {
            let mut att = Vec::new();
            for &k in &model.abs_indices {
                for w in model.folded(k) {
                    att.push(if w == 0.0 {
                        1.0
                    } else {
                        depth_attenuation(w.abs(), &ctx)?
                    });
                }
            }
            model.attenuation = att;
        }
        Ok(model)
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn channels(&self) -> ChannelSet {
        self.channels
    }

    pub fn selection(&self) -> &FrequencySelection {
        &self.selection
    }

    pub fn scheme(&self) -> &SamplingScheme {
        &self.scheme
    }

    pub fn context(&self) -> &PhysicalContext {
        &self.ctx
    }

    fn folded(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        let base = self.selection.omega(k as isize);
        let period = 2.0 * std::f64::consts::PI / self.scheme.delta;
        let folds = self.scheme.alias_folds as isize;
        (-folds..=folds).map(move |j| base + period * j as f64)
    }

    pub(crate) fn patterns(
        &self,
        theta: &Parameters,
        with_gradient: bool,
    ) -> Result<PatternEvaluation<f64>> {
        if let Some(plan) = &self.plan {
            return plan.evaluate_patterns(theta, &self.abs_indices, with_gradient);
        }
        let folds = 2 * self.scheme.alias_folds + 1;
        let mut values = Vec::with_capacity(self.abs_indices.len());
        let mut gradients = Vec::new();
        for (i, &k) in self.abs_indices.iter().enumerate() {
            let mut v = EntryPattern::zero();
            let mut g = [EntryPattern::zero(); N_PARAMS];
            for (fi, w) in self.folded(k).enumerate() {
                if w == 0.0 {
                    continue;
                }
                let t = if self.attenuation.is_empty() {
                    1.0
                } else {
                    self.attenuation[i * folds + fi]
                };
                let sign = w.signum();
                if with_gradient {
                    let (p, pg) = model_pattern_with_gradient(w.abs(), theta, t);
                    add_signed(&mut v, &p, sign);
                    for (a, b) in g.iter_mut().zip(pg.iter()) {
                        add_signed(a, b, sign);
                    }
                } else {
                    add_signed(&mut v, &model_pattern(w.abs(), theta, t), sign);
                }
            }
            if 2 * k == self.scheme.n {
                v.xz = 0.0;
                v.yz = 0.0;
                for p in g.iter_mut() {
                    p.xz = 0.0;
                    p.yz = 0.0;
                }
            }
            if self.channels == ChannelSet::VerticalOnly {
                v = EntryPattern {
                    zz: v.zz,
                    ..EntryPattern::zero()
                };
                for p in g.iter_mut() {
                    *p = EntryPattern {
                        zz: p.zz,
                        ..EntryPattern::zero()
                    };
                }
            }
            values.push(v);
            if with_gradient {
                gradients.push(g);
            }
        }
        Ok(PatternEvaluation { values, gradients })
    }

    /// Model matrices at the selected (signed) frequencies.
    pub fn matrices(&self, theta: &Parameters) -> Result<Vec<SpectralMatrix>> {
        let eval = self.patterns(theta, false)?;
        Ok(self
            .selection
            .indices()
            .iter()
            .zip(eval.values.iter())
            .map(|(&j, p)| p.to_matrix(j < 0))
            .collect())
    }

    /// Model matrices and their nine parameter derivatives.
    pub fn matrices_with_gradient(
        &self,
        theta: &Parameters,
    ) -> Result<(Vec<SpectralMatrix>, Vec<[SpectralMatrix; N_PARAMS]>)> {
        let eval = self.patterns(theta, true)?;
        let mut values = Vec::with_capacity(eval.values.len());
        let mut grads = Vec::with_capacity(eval.values.len());
        for (i, &j) in self.selection.indices().iter().enumerate() {
            values.push(eval.values[i].to_matrix(j < 0));
            grads.push(eval.gradients[i].map(|g| g.to_matrix(j < 0)));
        }
        Ok((values, grads))
    }
}

fn add_signed(acc: &mut EntryPattern<f64>, p: &EntryPattern<f64>, sign: f64) {
    acc.zz += p.zz;
    acc.xz += sign * p.xz;
    acc.yz += sign * p.yz;
    acc.xx += p.xx;
    acc.yy += p.yy;
    acc.xy += p.xy;
}

/// Outcome of one objective evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodEvaluation {
    pub value: f64,
    pub gradient: Option<[f64; N_PARAMS]>,
    /// Expected information Σ (w/2) tr(E⁻¹ ∂_j E E⁻¹ ∂_k E).
    pub fisher: Option<[[f64; N_PARAMS]; N_PARAMS]>,
    /// First frequency index whose model matrix fell below the determinant floor.
    pub singular_at: Option<isize>,
}

impl LikelihoodEvaluation {
    fn singular(j: isize) -> Self {
        Self {
            value: f64::NEG_INFINITY,
            gradient: None,
            fisher: None,
            singular_at: Some(j),
        }
    }
}

/// A Whittle-type log-likelihood bound to one periodogram and selection.
///
/// Only the selected indices are summed; each carries weight 2 (1 at
/// Nyquist) to account for its conjugate partner.
#[derive(Debug)]
pub struct WhittleLikelihood {
    model: SpectralModel,
    pgram: Vec<SpectralMatrix>,
}

impl WhittleLikelihood {
    pub fn new(pgram: &Periodogram, model: SpectralModel) -> Result<Self> {
        if pgram.n() != model.scheme.n {
            return Err(Error::InvalidSelection(format!(
                "periodogram has n={} but the model expects n={}",
                pgram.n(),
                model.scheme.n
            )));
        }
        let values = model
            .selection
            .indices()
            .iter()
            .map(|&j| *pgram.at(j))
            .collect();
        Ok(Self {
            model,
            pgram: values,
        })
    }

    pub fn model(&self) -> &SpectralModel {
        &self.model
    }

    pub fn evaluate(
        &self,
        theta: &Parameters,
        with_gradient: bool,
        with_fisher: bool,
    ) -> Result<LikelihoodEvaluation> {
        accumulate(
            &self.model,
            Some(&self.pgram),
            theta,
            with_gradient,
            with_fisher,
        )
    }
}

fn accumulate(
    model: &SpectralModel,
    pgram: Option<&[SpectralMatrix]>,
    theta: &Parameters,
    with_gradient: bool,
    with_fisher: bool,
) -> Result<LikelihoodEvaluation> {
    let zero = SpectralMatrix::zero();
    let need_grad = with_gradient || with_fisher;
    let (values, grads) = if need_grad {
        model.matrices_with_gradient(theta)?
    } else {
        (model.matrices(theta)?, Vec::new())
    };
    let sel = &model.selection;
    let vertical = model.channels == ChannelSet::VerticalOnly;
    let mut value = 0.0;
    let mut gradient = [0.0; N_PARAMS];
    let mut fisher = [[0.0; N_PARAMS]; N_PARAMS];
    for (i, &j) in sel.indices().iter().enumerate() {
        let w = sel.weight(j);
        let e = &values[i];
        let obs = pgram.map_or(&zero, |p| &p[i]);
        if vertical {
            let ez = e[(0, 0)].re;
            if !(ez > DETERMINANT_FLOOR) || !ez.is_finite() {
                return Ok(LikelihoodEvaluation::singular(j));
            }
            let iz = obs[(0, 0)].re;
            value -= w * (ez.ln() + iz / ez);
            if need_grad {
                let d: [f64; N_PARAMS] = std::array::from_fn(|p| grads[i][p][(0, 0)].re);
                let coef = -w * (1.0 / ez - iz / (ez * ez));
                for p in 0..N_PARAMS {
                    gradient[p] += coef * d[p];
                }
                if with_fisher {
                    for p in 0..N_PARAMS {
                        for q in p..N_PARAMS {
                            fisher[p][q] += 0.5 * w * d[p] * d[q] / (ez * ez);
                        }
                    }
                }
            }
            continue;
        }
        let Some((inv, det)) = e.inverse_with_floor(DETERMINANT_FLOOR) else {
            return Ok(LikelihoodEvaluation::singular(j));
        };
        if !(det.re > DETERMINANT_FLOOR) || !inv.is_finite() {
            return Ok(LikelihoodEvaluation::singular(j));
        }
        let b = inv * *obs;
        value -= w * (det.re.ln() + b.trace().re);
        if need_grad {
            let a: [SpectralMatrix; N_PARAMS] = std::array::from_fn(|p| inv * grads[i][p]);
            for p in 0..N_PARAMS {
                gradient[p] -= w * (a[p].trace().re - b.trace_of_product(&a[p]).re);
            }
            if with_fisher {
                for p in 0..N_PARAMS {
                    for q in p..N_PARAMS {
                        fisher[p][q] += 0.5 * w * a[p].trace_of_product(&a[q]).re;
                    }
                }
            }
        }
    }
    for p in 0..N_PARAMS {
        for q in 0..p {
            fisher[p][q] = fisher[q][p];
        }
    }
    Ok(LikelihoodEvaluation {
        value,
        gradient: with_gradient.then_some(gradient),
        fisher: with_fisher.then_some(fisher),
        singular_at: None,
    })
}

fn evaluate_objective(
    objective: Objective,
    pgram: &Periodogram,
    theta: &Parameters,
    ctx: &PhysicalContext,
    scheme: &SamplingScheme,
    selection: &FrequencySelection,
) -> Result<LikelihoodEvaluation> {
    let model = SpectralModel::new(
        objective,
        ChannelSet::Full,
        *ctx,
        *scheme,
        selection.clone(),
    )?;
    let lik = WhittleLikelihood::new(pgram, model)?;
    let eval = lik.evaluate(theta, true, false)?;
    if let Some(j) = eval.singular_at {
        log::warn!("model matrix singular at frequency index {j}; objective is -inf");
    }
    Ok(eval)
}

/// Whittle log-likelihood −Σ w [log|f| + tr(I f⁻¹)] against the aliased model.
pub fn whittle_loglik(
    pgram: &Periodogram,
    theta: &Parameters,
    ctx: &PhysicalContext,
    scheme: &SamplingScheme,
    selection: &FrequencySelection,
) -> Result<f64> {
    Ok(evaluate_objective(Objective::Whittle, pgram, theta, ctx, scheme, selection)?.value)
}

/// Whittle log-likelihood and its gradient with respect to the nine parameters.
pub fn whittle_loglik_with_gradient(
    pgram: &Periodogram,
    theta: &Parameters,
    ctx: &PhysicalContext,
    scheme: &SamplingScheme,
    selection: &FrequencySelection,
) -> Result<(f64, [f64; N_PARAMS])> {
    let e = evaluate_objective(Objective::Whittle, pgram, theta, ctx, scheme, selection)?;
    Ok((e.value, e.gradient.unwrap_or([f64::NAN; N_PARAMS])))
}

/// Debiased Whittle log-likelihood, with the expected periodogram in place
/// of the model spectral density.
pub fn debiased_whittle_loglik(
    pgram: &Periodogram,
    theta: &Parameters,
    ctx: &PhysicalContext,
    scheme: &SamplingScheme,
    selection: &FrequencySelection,
) -> Result<f64> {
    Ok(evaluate_objective(Objective::Debiased, pgram, theta, ctx, scheme, selection)?.value)
}

pub fn debiased_whittle_loglik_with_gradient(
    pgram: &Periodogram,
    theta: &Parameters,
    ctx: &PhysicalContext,
    scheme: &SamplingScheme,
    selection: &FrequencySelection,
) -> Result<(f64, [f64; N_PARAMS])> {
    let e = evaluate_objective(Objective::Debiased, pgram, theta, ctx, scheme, selection)?;
    Ok((e.value, e.gradient.unwrap_or([f64::NAN; N_PARAMS])))
}

/// Expected information matrix together with its spectral condition number.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherInformation {
    pub matrix: [[f64; N_PARAMS]; N_PARAMS],
    pub condition_number: f64,
}

/// Expected information of the debiased Whittle likelihood,
/// Σ_{ω∈Ω} (w/2) tr(E⁻¹ ∂_j E E⁻¹ ∂_k E).
pub fn expected_fisher(
    theta: &Parameters,
    ctx: &PhysicalContext,
    scheme: &SamplingScheme,
    selection: &FrequencySelection,
) -> Result<FisherInformation> {
    let model = SpectralModel::new(
        Objective::Debiased,
        ChannelSet::Full,
        *ctx,
        *scheme,
        selection.clone(),
    )?;
    fisher_information(&model, theta)
}

/// Expected information for any model; the periodogram plays no role.
pub fn fisher_information(model: &SpectralModel, theta: &Parameters) -> Result<FisherInformation> {
    let eval = accumulate(model, None, theta, false, true)?;
    if let Some(j) = eval.singular_at {
        let pos = model
            .selection
            .indices()
            .iter()
            .position(|&k| k == j)
            .unwrap_or(0);
        let det = model.matrices(theta)?[pos].determinant().re;
        return Err(Error::SingularModel { index: j, det });
    }
    let matrix = eval.fisher.expect("requested");
    Ok(FisherInformation {
        condition_number: condition_number(&matrix),
        matrix,
    })
}

/// Ratio of extreme eigenvalues of a symmetric matrix (∞ when singular).
pub fn condition_number<const D: usize>(m: &[[f64; D]; D]) -> f64 {
    condition_number_dyn(&nalgebra::DMatrix::from_fn(D, D, |i, j| m[i][j]))
}

pub(crate) fn condition_number_dyn(mat: &nalgebra::DMatrix<f64>) -> f64 {
    if mat.nrows() == 0 {
        return f64::NAN;
    }
    let eig = nalgebra::SymmetricEigen::new(mat.clone());
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &l in eig.eigenvalues.iter() {
        lo = lo.min(l.abs());
        hi = hi.max(l.abs());
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}
