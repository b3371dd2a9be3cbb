//! Reference activation functions and the closed-form approximation baselines
//! (power-of-two exponentials, truncated Taylor series).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default ELU/SELU alpha.
pub const SELU_ALPHA: f64 = 1.6733;
/// Default SELU lambda.
pub const SELU_LAMBDA: f64 = 1.0507;

/// Magnitude below which `tanh(x) ≈ x` stays within 0.02 of the fifth-order
/// series.
pub const TANH_SMALL_INPUT: f64 = 0.39;
/// Magnitude above which `tanh(x)` is taken as 1 by the series/LUT baseline.
pub const TANH_SATURATION_INPUT: f64 = 2.90;

pub fn tanh_exact(x: f64) -> f64 {
    x.tanh()
}

pub fn sigmoid_exact(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn elu(x: f64, alpha: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        alpha * x.exp() - alpha
    }
}

pub fn selu(x: f64, alpha: f64, lambda: f64) -> f64 {
    lambda * elu(x, alpha)
}

/// `e^x ≈ 2^(1.44 x)`.
pub fn exp_pow2_approx(x: f64) -> f64 {
    (1.44 * x).exp2()
}

/// Exponent coefficient of the power-of-two sigmoid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Pow2Coefficient {
    /// 1.44, the direct `log2(e)` approximation.
    Precise,
    /// 1.5, the shift-friendly form used by the hardware structure.
    #[default]
    Simplified,
}

impl Pow2Coefficient {
    pub fn value(self) -> f64 {
        match self {
            Pow2Coefficient::Precise => 1.44,
            Pow2Coefficient::Simplified => 1.5,
        }
    }
}

pub fn sigmoid_pow2_approx(x: f64, coeff: Pow2Coefficient) -> f64 {
    1.0 / (1.0 + (-coeff.value() * x).exp2())
}

/// `tanh(x) = 1 - 2 sigmoid(-2x)` with the power-of-two sigmoid.
pub fn tanh_pow2_approx(x: f64, coeff: Pow2Coefficient) -> f64 {
    1.0 - 2.0 * sigmoid_pow2_approx(-2.0 * x, coeff)
}

/// Fifth-order Maclaurin polynomial of tanh.
pub fn tanh_taylor5(x: f64) -> f64 {
    let x2 = x * x;
    x - x * x2 / 3.0 + 2.0 * x * x2 * x2 / 15.0
}

/// Whether the identity approximation `tanh(x) ≈ x` applies.
pub fn small_input(x: f64) -> bool {
    x.abs() < TANH_SMALL_INPUT
}

/// Truncated Taylor series of `e^x` about `x0`, terms `0..=order`.
pub fn taylor_exp(x: f64, order: u32, x0: f64) -> f64 {
    let d = x - x0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=order {
        term *= d / k as f64;
        sum += term;
    }
    x0.exp() * sum
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ActivationKind {
    Tanh,
    Sigmoid,
    Elu,
    Selu,
    Exp,
    Custom,
}

impl ActivationKind {
    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Tanh => "tanh",
            ActivationKind::Sigmoid => "sigmoid",
            ActivationKind::Elu => "elu",
            ActivationKind::Selu => "selu",
            ActivationKind::Exp => "exp",
            ActivationKind::Custom => "custom",
        }
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActivationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tanh" => Ok(ActivationKind::Tanh),
            "sigmoid" => Ok(ActivationKind::Sigmoid),
            "elu" => Ok(ActivationKind::Elu),
            "selu" => Ok(ActivationKind::Selu),
            "exp" => Ok(ActivationKind::Exp),
            other => Err(Error::UnknownFunction(other.to_string())),
        }
    }
}

/// Closed real interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// A user-registered function with its declared domain and range.
#[derive(Clone)]
pub struct CustomFunction {
    pub name: String,
    pub func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub domain: Interval,
    pub range: Interval,
}

impl fmt::Debug for CustomFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFunction")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("range", &self.range)
            .finish()
    }
}

/// An activation function together with its parameters.
#[derive(Clone, Debug)]
pub struct ActivationSpec {
    kind: ActivationKind,
    alpha: f64,
    lambda: f64,
    custom: Option<CustomFunction>,
}

impl ActivationSpec {
    pub fn new(kind: ActivationKind) -> Self {
        let lambda = if kind == ActivationKind::Selu { SELU_LAMBDA } else { 1.0 };
        ActivationSpec {
            kind,
            alpha: SELU_ALPHA,
            lambda,
            custom: None,
        }
    }

    pub fn tanh() -> Self {
        Self::new(ActivationKind::Tanh)
    }

    pub fn sigmoid() -> Self {
        Self::new(ActivationKind::Sigmoid)
    }

    pub fn elu() -> Self {
        Self::new(ActivationKind::Elu)
    }

    pub fn selu() -> Self {
        Self::new(ActivationKind::Selu)
    }

    pub fn exp() -> Self {
        Self::new(ActivationKind::Exp)
    }

    /// Registers a custom function. The function must be finite on `domain`
    /// and take values inside `range`; this is checked on a dense sample.
    pub fn custom(
        name: impl Into<String>,
        func: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: Interval,
        range: Interval,
    ) -> Result<Self> {
        let name = name.into();
        if !(domain.lo < domain.hi) || !(range.lo <= range.hi) {
            return Err(Error::InvalidParameter(format!("custom `{name}`: empty domain or range")));
        }
        const PROBES: usize = 4096;
        for i in 0..=PROBES {
            let x = domain.lo + (domain.hi - domain.lo) * i as f64 / PROBES as f64;
            let y = func(x);
            if !y.is_finite() || !range.contains(y) {
                return Err(Error::InvalidParameter(format!(
                    "custom `{name}` evaluates to {y} at {x}, outside declared range [{}, {}]",
                    range.lo, range.hi
                )));
            }
        }
        Ok(ActivationSpec {
            kind: ActivationKind::Custom,
            alpha: SELU_ALPHA,
            lambda: 1.0,
            custom: Some(CustomFunction {
                name,
                func: Arc::new(func),
                domain,
                range,
            }),
        })
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        self.lambda = lambda;
        Ok(self)
    }

    pub fn kind(&self) -> ActivationKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Output scale: SELU's lambda, 1 for every other kind.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn custom_function(&self) -> Option<&CustomFunction> {
        self.custom.as_ref()
    }

    pub fn name(&self) -> &str {
        match &self.custom {
            Some(c) => &c.name,
            None => self.kind.name(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            ActivationKind::Tanh => tanh_exact(x),
            ActivationKind::Sigmoid => sigmoid_exact(x),
            ActivationKind::Elu => elu(x, self.alpha),
            ActivationKind::Selu => selu(x, self.alpha, self.lambda),
            ActivationKind::Exp => x.exp(),
            ActivationKind::Custom => (self.custom.as_ref().expect("custom kind carries a function").func)(x),
        }
    }

    /// First derivative, used by the trainer.
    pub fn derivative(&self, x: f64) -> f64 {
        match self.kind {
            ActivationKind::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            ActivationKind::Sigmoid => {
                let s = sigmoid_exact(x);
                s * (1.0 - s)
            }
            ActivationKind::Elu | ActivationKind::Selu => {
                let g = if x > 0.0 { 1.0 } else { self.alpha * x.exp() };
                self.lambda * g
            }
            ActivationKind::Exp => x.exp(),
            ActivationKind::Custom => {
                let h = 1e-6 * x.abs().max(1.0);
                (self.eval(x + h) - self.eval(x - h)) / (2.0 * h)
            }
        }
    }
}

impl FromStr for ActivationSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(ActivationSpec::new(s.parse()?))
    }
}
