use crate::error::{Error, Result};

/// Right-hand side `y' = F(x, y)`.
pub type Rhs<'a> = Box<dyn Fn(f64, &[f64]) -> Result<Vec<f64>> + 'a>;

/// Initial value problem on `[x0, x1]` with fixed step `h`.
pub struct Ivp<'a> {
    pub rhs: Rhs<'a>,
    pub x0: f64,
    pub x1: f64,
    pub h: f64,
    pub y0: Vec<f64>,
    /// State components that must stay above [`POSITIVITY_FLOOR`].
    pub positive: Vec<usize>,
}

pub const POSITIVITY_FLOOR: f64 = 1e-8;

pub type Trajectory = Vec<(f64, Vec<f64>)>;

fn guard(x: f64, y: &[f64], positive: &[usize]) -> Result<()> {
    if let Some(v) = y.iter().find(|v| !v.is_finite()) {
        return Err(Error::Trajectory { x, msg: format!("non-finite state component {v} in {y:?}") });
    }
    for &i in positive {
        if y[i] <= POSITIVITY_FLOOR {
            return Err(Error::Trajectory {
                x,
                msg: format!("state component {i} = {} left the positive domain (state {y:?})", y[i]),
            });
        }
    }
    Ok(())
}

fn eval(ivp: &Ivp<'_>, x: f64, y: &[f64]) -> Result<Vec<f64>> {
    let d = (ivp.rhs)(x, y).map_err(|e| Error::Trajectory { x, msg: format!("{e} (state {y:?})") })?;
    if d.len() != y.len() {
        return Err(Error::InvalidInput(format!("right-hand side has dimension {}, state has {}", d.len(), y.len())));
    }
    Ok(d)
}

fn axpy(y: &[f64], a: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(y, k)| y + a * k).collect()
}

/// Classical fixed-step fourth-order Runge–Kutta. Every step is recorded; the
/// last step is shortened to land exactly on `x1`.
pub fn rk4_integrate(ivp: &Ivp<'_>) -> Result<Trajectory> {
    if ivp.h.is_nan() || ivp.h <= 0.0 || !ivp.h.is_finite() {
        return Err(Error::InvalidInput(format!("step must be positive, got {}", ivp.h)));
    }
    if ivp.x0.is_nan() || ivp.x1.is_nan() || ivp.x1 <= ivp.x0 {
        return Err(Error::InvalidInput(format!("empty range [{}, {}]", ivp.x0, ivp.x1)));
    }
    if ivp.positive.iter().any(|&i| i >= ivp.y0.len()) {
        return Err(Error::InvalidInput("positivity index outside the state".into()));
    }
    let span = ivp.x1 - ivp.x0;
    let mut n = (span / ivp.h).round() as usize;
    if (n as f64 * ivp.h - span).abs() > 1e-9 * span {
        n = (span / ivp.h).ceil() as usize;
    }
    let n = n.max(1);

    let mut y = ivp.y0.clone();
    guard(ivp.x0, &y, &ivp.positive)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push((ivp.x0, y.clone()));
    for i in 0..n {
        let x = ivp.x0 + i as f64 * ivp.h;
        let x_next = if i + 1 == n { ivp.x1 } else { ivp.x0 + (i + 1) as f64 * ivp.h };
        let h = x_next - x;
        let k1 = eval(ivp, x, &y)?;
        let k2 = eval(ivp, x + h / 2.0, &axpy(&y, h / 2.0, &k1))?;
        let k3 = eval(ivp, x + h / 2.0, &axpy(&y, h / 2.0, &k2))?;
        let k4 = eval(ivp, x + h, &axpy(&y, h, &k3))?;
        for j in 0..y.len() {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        guard(x_next, &y, &ivp.positive)?;
        out.push((x_next, y.clone()));
    }
    Ok(out)
}
