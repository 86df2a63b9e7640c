use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Sigmoid,
    /// Heaviside step. Has no useful derivative, so it is inference-only.
    Step,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Sigmoid => sigmoid(x),
            Activation::Step => f64::from(step_activation(x)),
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    /// `None` for the step function. relu'(0) is taken as 0.
    #[inline]
    pub fn derivative(self, z: f64, a: f64) -> Option<f64> {
        match self {
            Activation::Relu => Some(if z > 0.0 { 1.0 } else { 0.0 }),
            Activation::Sigmoid => Some(a * (1.0 - a)),
            Activation::Step => None,
        }
    }

    pub fn is_trainable(self) -> bool {
        !matches!(self, Activation::Step)
    }
}

/// 0 for x < 0, 1 for x >= 0.
#[inline]
pub fn step_activation(x: f64) -> u8 {
    u8::from(x >= 0.0)
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub const BCE_CLAMP: f64 = 1e-12;

/// Binary cross-entropy with `p` clamped to `[1e-12, 1 - 1e-12]`.
#[inline]
pub fn bce_loss(p: f64, y: u8) -> f64 {
    let p = p.clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
    if y == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_branches() {
        assert_eq!(step_activation(-0.1), 0);
        assert_eq!(step_activation(0.0), 1);
        assert_eq!(step_activation(-0.0), 1);
        assert_eq!(step_activation(7.3), 1);
        assert_eq!(Activation::Step.apply(-2.0), 0.0);
        assert!(Activation::Step.derivative(0.0, 1.0).is_none());
    }

    #[test]
    fn bce_values() {
        let ln2 = std::f64::consts::LN_2;
        assert!((bce_loss(0.5, 1) - ln2).abs() < 1e-15);
        assert!((bce_loss(0.5, 0) - ln2).abs() < 1e-15);
        let near = bce_loss(1.0 - 1e-12, 1);
        assert!((near - 1e-12).abs() < 1e-15, "{near}");
        assert!(bce_loss(0.0, 1).is_finite());
        assert!(bce_loss(1.0, 0).is_finite());
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0);
        assert!(sigmoid(800.0) <= 1.0);
        assert!((sigmoid(2.0) + sigmoid(-2.0) - 1.0).abs() < 1e-15);
    }
}
