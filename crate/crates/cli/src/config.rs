//! Experiment configuration: one TOML file with the sections `[operator]`,
//! `[contraction]`, `[schedule]` and `[run]`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use vamrate_core::iteration::{AlphaSchedule, ErrorSchedule, LambdaSchedule, ParamSchedule};
use vamrate_core::operators::{random_point, ContractionMap, Point, ResolventOperator};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub operator: OperatorSpec,
    #[serde(default)]
    pub contraction: ContractionSpec,
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub run: RunSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorSpec {
    /// `A = c·Id`.
    ScaledIdentity { dim: usize, c: f64 },
    /// `A = Q diag(spectrum) Qᵀ`, `Q` drawn from the run seed.
    Linear { spectrum: Vec<f64> },
    /// Normal cone of the box `[lo, hi]^dim`.
    Box { dim: usize, lo: f64, hi: f64 },
    /// `∂(weight·‖·‖_1)`.
    L1 { dim: usize, weight: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContractionSpec {
    /// `f(x) = anchor`; zero when omitted.
    Constant {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        anchor: Option<Vec<f64>>,
    },
    /// `f(x) = alpha·Qx + offset`, `Q` a random rotation from the run seed.
    Affine {
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<Vec<f64>>,
    },
}

impl Default for ContractionSpec {
    fn default() -> Self {
        ContractionSpec::Constant { anchor: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Example1,
    Example2,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModuliSource {
    #[default]
    ClosedForm,
    BruteForce,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    #[default]
    Zero,
    /// `e_n = e*/(n+1)^2` scaled to a random direction.
    Random,
    /// `e_n = e*/(n+1)`; not summable.
    Harmonic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub preset: Preset,
    /// Contraction constant used in `α_n = 2/((1-α)(n+J))`; defaults to the
    /// contraction's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// `example1`: the constant step size. `custom`: the base of
    /// `λ_n = lambda + lambda_amp/(n + lambda_offset)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_amp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_offset: Option<f64>,
    /// `example2`: the vector `e*`; `custom`: the direction of the errors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_star: Option<Vec<f64>>,
    /// `custom`: `α_n = alpha_a/(n + alpha_b)^alpha_p`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_p: Option<f64>,
    #[serde(default)]
    pub errors: ErrorKind,
    /// Norm scale of the random errors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_scale: Option<f64>,
    #[serde(default)]
    pub moduli: ModuliSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default = "default_k_max")]
    pub k_max: u64,
    #[serde(default)]
    pub seed: u64,
    /// Starting point; drawn from `[-1, 1]^d` with the seed when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Indices `m` for the fixed-step residuals.
    #[serde(default = "default_ms")]
    pub ms: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Negative control: every certificate is shrunk by this amount.
    #[serde(default)]
    pub shrink: u64,
}

fn default_horizon() -> u64 {
    1000
}

fn default_k_max() -> u64 {
    20
}

fn default_ms() -> Vec<u64> {
    vec![0]
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            horizon: default_horizon(),
            k_max: default_k_max(),
            seed: 0,
            x0: None,
            ms: default_ms(),
            output_dir: None,
            shrink: 0,
        }
    }
}

/// A configuration turned into the objects the iteration runs on.
pub struct Instance {
    pub operator: ResolventOperator,
    pub contraction: ContractionMap,
    pub schedule: ParamSchedule,
    pub x0: Point,
    pub z: Point,
}

fn bad(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

fn point(field: &str, v: Vec<f64>, dim: usize) -> Result<Point, CliError> {
    if v.len() != dim {
        return Err(bad(field, format!("expected {dim} coordinates, got {}", v.len())));
    }
    Point::new(v).map_err(|e| bad(field, e))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.run.horizon < 10 {
            return Err(bad("run.horizon", "must be at least 10"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match &self.operator {
            OperatorSpec::ScaledIdentity { dim, .. } | OperatorSpec::Box { dim, .. } | OperatorSpec::L1 { dim, .. } => *dim,
            OperatorSpec::Linear { spectrum } => spectrum.len(),
        }
    }

    pub fn build(&self) -> Result<Instance, CliError> {
        let dim = self.dim();
        let seed = self.run.seed;
        let operator = match &self.operator {
            OperatorSpec::ScaledIdentity { dim, c } => ResolventOperator::scaled_identity(*dim, *c),
            OperatorSpec::Linear { spectrum } => ResolventOperator::linear_from_spectrum(spectrum, seed),
            OperatorSpec::Box { dim, lo, hi } => ResolventOperator::box_normal_cone(*dim, *lo, *hi),
            OperatorSpec::L1 { dim, weight } => ResolventOperator::l1_subdifferential(*dim, *weight),
        }
        .map_err(|e| bad("operator", e))?;
        let z = operator
            .known_zero()
            .cloned()
            .ok_or_else(|| bad("operator", "no known zero"))?;
        let contraction = match &self.contraction {
            ContractionSpec::Constant { anchor } => {
                let u = match anchor {
                    Some(v) => point("contraction.anchor", v.clone(), dim)?,
                    None => Point::zeros(dim),
                };
                ContractionMap::constant(u)
            }
            ContractionSpec::Affine { alpha, offset } => {
                let b = match offset {
                    Some(v) => point("contraction.offset", v.clone(), dim)?,
                    None => Point::zeros(dim),
                };
                ContractionMap::affine_random(*alpha, b, seed)
            }
        }
        .map_err(|e| bad("contraction", e))?;
        let schedule = self.build_schedule(contraction.alpha(), dim)?;
        let x0 = match &self.run.x0 {
            Some(v) => point("run.x0", v.clone(), dim)?,
            None => random_point(dim, 1.0, seed),
        };
        Ok(Instance {
            operator,
            contraction,
            schedule,
            x0,
            z,
        })
    }

    fn build_schedule(&self, f_alpha: f64, dim: usize) -> Result<ParamSchedule, CliError> {
        let s = &self.schedule;
        let alpha = s.alpha.unwrap_or(f_alpha);
        let sched = match s.preset {
            Preset::Example1 => {
                ParamSchedule::example1(alpha, s.lambda.unwrap_or(1.0)).map_err(|e| bad("schedule", e))?
            }
            Preset::Example2 => {
                let e = point("schedule.e_star", s.e_star.clone().unwrap_or_else(|| vec![0.0; dim]), dim)?;
                ParamSchedule::example2(alpha, e).map_err(|e| bad("schedule", e))?
            }
            Preset::Custom => {
                let a = AlphaSchedule::power(
                    s.alpha_a.unwrap_or(1.0),
                    s.alpha_b.unwrap_or(1.0),
                    s.alpha_p.unwrap_or(0.5),
                )
                .map_err(|e| bad("schedule.alpha_*", e))?;
                let base = s.lambda.unwrap_or(1.0);
                let l = match s.lambda_amp {
                    None => LambdaSchedule::constant(base),
                    Some(amp) => LambdaSchedule::decaying(base, amp, s.lambda_offset.unwrap_or(1.0)),
                }
                .map_err(|e| bad("schedule.lambda", e))?;
                let err = match s.errors {
                    ErrorKind::Zero => ErrorSchedule::Zero,
                    ErrorKind::Random => ErrorSchedule::RandomInverseSquare {
                        scale: s.error_scale.unwrap_or(1.0),
                        dim,
                        seed: self.run.seed,
                    },
                    ErrorKind::Harmonic => ErrorSchedule::Harmonic {
                        e_star: point("schedule.e_star", s.e_star.clone().unwrap_or_else(|| vec![1.0; dim]), dim)?,
                    },
                };
                if let Some(scale) = s.error_scale {
                    if !(scale >= 0.0 && scale.is_finite()) {
                        return Err(bad("schedule.error_scale", "must be a nonnegative real"));
                    }
                }
                ParamSchedule::new(a, l, err)
            }
        };
        Ok(match s.moduli {
            ModuliSource::ClosedForm if s.preset == Preset::Custom => sched.with_closed_form_moduli(),
            ModuliSource::ClosedForm => sched,
            ModuliSource::BruteForce => sched.with_brute_force_moduli(self.run.horizon, dim),
            ModuliSource::None => ParamSchedule {
                moduli: None,
                ..sched
            },
        })
    }
}
