//! Closed-form traveling waves and their verification against the PDE.

mod residual;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use residual::{junction_jumps, residual, Grid, JunctionJump, ResidualReport};

use crate::numerics::dd::Real;
use crate::numerics::fmt17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveFamily {
    /// `A sech²((x - Vt)/L)`, `V = 2A`, `L = √(2/A)`; solves `u_t + 6uu_x + u_xxx = 0`.
    KdvSech2,
    /// `A sech(A(x - Vt))`, `V = A²`; solves `u_t + 6u²u_x + u_xxx = 0`.
    MkdvSech,
    /// Compact MKdV lobe; solves `u_t + u²u_x + u_xxx = 0`.
    MkdvExotic,
    K22Compacton,
    K22Kak,
    K22CompOnKak,
    K22OffsetCompacton,
    KnnCompacton,
}

impl WaveFamily {
    pub const ALL: [WaveFamily; 8] = [
        WaveFamily::KdvSech2,
        WaveFamily::MkdvSech,
        WaveFamily::MkdvExotic,
        WaveFamily::K22Compacton,
        WaveFamily::K22Kak,
        WaveFamily::K22CompOnKak,
        WaveFamily::K22OffsetCompacton,
        WaveFamily::KnnCompacton,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WaveFamily::KdvSech2 => "kdv-sech2",
            WaveFamily::MkdvSech => "mkdv-sech",
            WaveFamily::MkdvExotic => "mkdv-exotic",
            WaveFamily::K22Compacton => "k22-compacton",
            WaveFamily::K22Kak => "k22-kak",
            WaveFamily::K22CompOnKak => "k22-comp-on-kak",
            WaveFamily::K22OffsetCompacton => "k22-offset-compacton",
            WaveFamily::KnnCompacton => "knn-compacton",
        }
    }

    pub fn is_compact(self) -> bool {
        !matches!(self, WaveFamily::KdvSech2 | WaveFamily::MkdvSech | WaveFamily::K22OffsetCompacton)
    }
}

impl fmt::Display for WaveFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WaveFamily {
    type Err = WaveError;

    fn from_str(s: &str) -> Result<WaveFamily, WaveError> {
        WaveFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| WaveError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaveError {
    #[error("unknown wave family '{0}'")]
    UnknownFamily(String),
    #[error("invalid wave parameters: {0}")]
    InvalidParameters(String),
    #[error("t = {t} lies outside the validity window (0, {end})")]
    OutsideWindow { t: f64, end: f64 },
    #[error("compound window is empty: secondary speed {vprime} does not exceed {v}")]
    EmptyWindow { v: f64, vprime: f64 },
    #[error("velocity coupling violated: {0}")]
    Coupling(String),
    #[error("derivative {order} of u^2 jumps by {jump} at x = {x}")]
    JunctionSmoothness { x: f64, order: usize, jump: f64 },
    #[error("grid too coarse: stencil span {span} exceeds support length {support}")]
    GridTooCoarse { span: f64, support: f64 },
    #[error(transparent)]
    Equation(#[from] crate::similarity::SimilarityError),
}

/// Closed-form traveling solution. Fields not used by a family are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TravelingWave {
    pub family: WaveFamily,
    #[serde(rename = "A")]
    pub amplitude: f64,
    #[serde(rename = "V")]
    pub velocity: f64,
    #[serde(rename = "lambda")]
    pub flat_length: f64,
    pub delta: f64,
    #[serde(rename = "Vprime")]
    pub secondary_velocity: f64,
    pub n: u32,
}

/// Half-width of each cos² ramp in the K(2,2) family.
const RAMP: f64 = 2.0 * PI;

fn finite(name: &str, x: f64) -> Result<(), WaveError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(WaveError::InvalidParameters(format!("{name} must be finite")))
    }
}

impl TravelingWave {
    fn base(family: WaveFamily, amplitude: f64, velocity: f64) -> TravelingWave {
        TravelingWave { family, amplitude, velocity, flat_length: 0.0, delta: 0.0, secondary_velocity: 0.0, n: 0 }
    }

    pub fn kdv_sech2(amplitude: f64) -> Result<TravelingWave, WaveError> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(WaveError::InvalidParameters("KdV soliton needs A > 0".into()));
        }
        Ok(Self::base(WaveFamily::KdvSech2, amplitude, 2.0 * amplitude))
    }

    pub fn mkdv_sech(amplitude: f64) -> Result<TravelingWave, WaveError> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(WaveError::InvalidParameters("MKdV soliton needs A > 0".into()));
        }
        Ok(Self::base(WaveFamily::MkdvSech, amplitude, amplitude * amplitude))
    }

    /// Compact MKdV lobe with wavenumber `k`: peak `√32·k`, speed `4k²`.
    pub fn mkdv_exotic(k: f64) -> Result<TravelingWave, WaveError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(WaveError::InvalidParameters("wavenumber must be positive".into()));
        }
        Ok(Self::base(WaveFamily::MkdvExotic, 32f64.sqrt() * k, 4.0 * k * k))
    }

    /// `(4V/3) cos²((x - Vt)/4)` on `|x - Vt| ≤ 2π`.
    pub fn k22_compacton(velocity: f64) -> Result<TravelingWave, WaveError> {
        finite("V", velocity)?;
        Ok(Self::base(WaveFamily::K22Compacton, 4.0 * velocity / 3.0, velocity))
    }

    /// Ramp, plateau of height `4V/3` on `[0, λ]`, mirror ramp.
    pub fn k22_kak(velocity: f64, flat_length: f64) -> Result<TravelingWave, WaveError> {
        finite("V", velocity)?;
        if !(flat_length >= 0.0 && flat_length.is_finite()) {
            return Err(WaveError::InvalidParameters("flat length must be nonnegative".into()));
        }
        Ok(TravelingWave { flat_length, ..Self::base(WaveFamily::K22Kak, 4.0 * velocity / 3.0, velocity) })
    }

    /// `A cos²((x - Vt)/4) + δ` on `|x - Vt| ≤ 2π`, `δ` elsewhere, with
    /// `V = 3(2δ + A)/4`.
    pub fn k22_offset(amplitude: f64, delta: f64) -> Result<TravelingWave, WaveError> {
        finite("A", amplitude)?;
        finite("delta", delta)?;
        let v = 0.75 * (2.0 * delta + amplitude);
        Ok(TravelingWave { delta, ..Self::base(WaveFamily::K22OffsetCompacton, amplitude, v) })
    }

    /// `[A cos²((x - Vt)/L)]^{1/(n-1)}` with `A = 2Vn/(n+1)`, `L = 2n/(n-1)`.
    pub fn knn(n: u32, velocity: f64) -> Result<TravelingWave, WaveError> {
        if n < 2 {
            return Err(WaveError::InvalidParameters("K(n,n) compacton needs n ≥ 2".into()));
        }
        if !(velocity > 0.0 && velocity.is_finite()) {
            return Err(WaveError::InvalidParameters("K(n,n) compacton needs V > 0".into()));
        }
        let nf = n as f64;
        Ok(TravelingWave { n, ..Self::base(WaveFamily::KnnCompacton, 2.0 * velocity * nf / (nf + 1.0), velocity) })
    }

    /// KAK of speed `V` and flat length `λ` carrying a compacton of height
    /// `top_amplitude` whose support starts at `δ` on the plateau.
    pub fn k22_compound(velocity: f64, flat_length: f64, top_amplitude: f64, delta: f64) -> Result<TravelingWave, WaveError> {
        let kak = TravelingWave::k22_kak(velocity, flat_length)?;
        let top = TravelingWave::k22_offset(top_amplitude, kak.amplitude)?;
        compose_compound(&kak, &top, delta)
    }

    /// Compacton width parameter `L` in `cos²(ξ/L)`, or the soliton width.
    pub fn width(&self) -> f64 {
        match self.family {
            WaveFamily::KdvSech2 => (2.0 / self.amplitude).sqrt(),
            WaveFamily::MkdvSech => 1.0 / self.amplitude,
            WaveFamily::MkdvExotic => 1.0 / self.exotic_k(),
            WaveFamily::KnnCompacton => {
                let n = self.n as f64;
                2.0 * n / (n - 1.0)
            }
            _ => 4.0,
        }
    }

    fn exotic_k(&self) -> f64 {
        self.amplitude / 32f64.sqrt()
    }

    /// The two half-width values quoted for the exotic MKdV lobe,
    /// `5π/(6k)` and `π/(6k)`.
    pub fn exotic_half_widths(&self) -> (f64, f64) {
        let k = self.exotic_k();
        (5.0 * PI / (6.0 * k), PI / (6.0 * k))
    }

    /// Value at `(x, t)`. Compound waves are evaluated piecewise at any t;
    /// see [`TravelingWave::eval_checked`] for the window check.
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        self.eval_in(x, t)
    }

    /// [`TravelingWave::eval`] in any floating type, e.g. double-double.
    pub fn eval_in<F: Real>(&self, x: F, t: F) -> F {
        let c = |v: f64| F::from(v).unwrap();
        let cos2 = |v: F| {
            let k = v.cos();
            k * k
        };
        let ramp = c(2.0) * F::PI();
        let half_pi = F::FRAC_PI_2();
        let quarter = c(0.25);
        let xi = x - c(self.velocity) * t;
        let a = c(self.amplitude);
        let kak = |amp: F, xi: F| {
            let lambda = c(self.flat_length);
            if xi < -ramp || xi > lambda + ramp {
                F::zero()
            } else if xi < F::zero() {
                amp * cos2(xi * quarter)
            } else if xi <= lambda {
                amp
            } else {
                amp * cos2((xi - lambda) * quarter)
            }
        };
        match self.family {
            WaveFamily::KdvSech2 => {
                let s = F::one().div_acc(xi.div_acc(c(self.width())).cosh_acc());
                a * s * s
            }
            WaveFamily::MkdvSech => a.div_acc((a * xi).cosh_acc()),
            WaveFamily::MkdvExotic => {
                let k = a.div_acc(c(32.0).sqrt());
                let theta = k * xi;
                if theta.abs() > half_pi {
                    return F::zero();
                }
                let q = cos2(theta);
                (a * q).div_acc(c(3.0) - c(2.0) * q)
            }
            WaveFamily::K22Compacton => {
                if xi.abs() > ramp {
                    F::zero()
                } else {
                    a * cos2(xi * quarter)
                }
            }
            WaveFamily::K22Kak => kak(a, xi),
            WaveFamily::K22OffsetCompacton => {
                let delta = c(self.delta);
                if xi.abs() > ramp {
                    delta
                } else {
                    a * cos2(xi * quarter) + delta
                }
            }
            WaveFamily::K22CompOnKak => {
                let base_amp = (c(4.0) * c(self.velocity)).div_acc(c(3.0));
                let zeta = x - c(self.secondary_velocity) * t - c(self.delta) - ramp;
                let top = if zeta.abs() > ramp { F::zero() } else { a * cos2(zeta * quarter) };
                kak(base_amp, xi) + top
            }
            WaveFamily::KnnCompacton => {
                let l = c(self.width());
                if xi.abs() > half_pi * l {
                    F::zero()
                } else {
                    (a * cos2(xi.div_acc(l))).powf_acc(F::one().div_acc(c(self.n as f64 - 1.0)))
                }
            }
        }
    }

    /// [`TravelingWave::eval`], failing for a compound outside its window.
    pub fn eval_checked(&self, x: f64, t: f64) -> Result<f64, WaveError> {
        if self.family == WaveFamily::K22CompOnKak {
            let end = self.validity_window().unwrap_or(0.0);
            if !(t > 0.0 && t < end) {
                return Err(WaveError::OutsideWindow { t, end });
            }
        }
        Ok(self.eval(x, t))
    }

    /// End of the time window `(0, T)` during which the top compacton of a
    /// compound stays on the plateau.
    pub fn validity_window(&self) -> Option<f64> {
        if self.family != WaveFamily::K22CompOnKak {
            return None;
        }
        Some((self.flat_length - 2.0 * RAMP - self.delta) / (self.secondary_velocity - self.velocity))
    }

    /// Support in `x` at time `t`, for compact families.
    pub fn support(&self, t: f64) -> Option<(f64, f64)> {
        let shift = self.velocity * t;
        let (lo, hi) = match self.family {
            WaveFamily::K22Compacton => (-RAMP, RAMP),
            WaveFamily::K22Kak | WaveFamily::K22CompOnKak => (-RAMP, self.flat_length + RAMP),
            WaveFamily::KnnCompacton | WaveFamily::MkdvExotic => {
                let half = PI / 2.0 * self.width();
                (-half, half)
            }
            _ => return None,
        };
        Some((lo + shift, hi + shift))
    }

    /// Points in `x` at time `t` where the piecewise definition switches.
    pub fn breakpoints(&self, t: f64) -> Vec<f64> {
        let shift = self.velocity * t;
        let mut b: Vec<f64> = match self.family {
            WaveFamily::KdvSech2 | WaveFamily::MkdvSech => Vec::new(),
            WaveFamily::K22Compacton | WaveFamily::K22OffsetCompacton => vec![-RAMP, RAMP],
            WaveFamily::K22Kak => vec![-RAMP, 0.0, self.flat_length, self.flat_length + RAMP],
            WaveFamily::KnnCompacton | WaveFamily::MkdvExotic => {
                let half = PI / 2.0 * self.width();
                vec![-half, half]
            }
            WaveFamily::K22CompOnKak => vec![-RAMP, 0.0, self.flat_length, self.flat_length + RAMP],
        };
        for x in &mut b {
            *x += shift;
        }
        if self.family == WaveFamily::K22CompOnKak {
            let start = self.delta + self.secondary_velocity * t;
            b.extend([start, start + 2.0 * RAMP]);
            b.sort_by(f64::total_cmp);
        }
        b
    }

    /// `(x, u)` samples at `n` evenly spaced points of `[x0, x1]`.
    pub fn sample(&self, t: f64, x0: f64, x1: f64, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let x = if n == 1 { x0 } else { x0 + (x1 - x0) * i as f64 / (n - 1) as f64 };
                (x, self.eval(x, t))
            })
            .collect()
    }

    /// Alias of the equation this wave solves.
    pub fn equation_alias(&self) -> String {
        match self.family {
            WaveFamily::KdvSech2 => "KdV".into(),
            WaveFamily::MkdvSech => "MKdV6".into(),
            WaveFamily::MkdvExotic => "MKdV".into(),
            WaveFamily::KnnCompacton => format!("Knn:{}", self.n),
            _ => "K22".into(),
        }
    }
}

/// Two-column CSV `x,u`.
pub fn profile_csv(samples: &[(f64, f64)]) -> String {
    let mut out = String::from("x,u\n");
    for (x, u) in samples {
        out.push_str(&format!("{},{}\n", fmt17(*x), fmt17(*u)));
    }
    out
}

/// Put `top` (an offset compacton riding at the KAK's plateau height) on
/// `kak`, with its support starting at `delta` on the plateau.
pub fn compose_compound(kak: &TravelingWave, top: &TravelingWave, delta: f64) -> Result<TravelingWave, WaveError> {
    if kak.family != WaveFamily::K22Kak || top.family != WaveFamily::K22OffsetCompacton {
        return Err(WaveError::InvalidParameters("compound needs a KAK and an offset compacton".into()));
    }
    let plateau = kak.amplitude;
    let tol = 1e-12 * (1.0 + plateau.abs() + top.amplitude.abs());
    if (top.delta - plateau).abs() > tol {
        return Err(WaveError::Coupling(format!("top offset {} differs from plateau {}", top.delta, plateau)));
    }
    let vprime = 0.75 * top.amplitude + 2.0 * kak.velocity;
    if (top.velocity - vprime).abs() > tol * (1.0 + vprime.abs()) {
        return Err(WaveError::Coupling(format!("top speed {} differs from {vprime}", top.velocity)));
    }
    if vprime <= kak.velocity {
        return Err(WaveError::EmptyWindow { v: kak.velocity, vprime });
    }
    if !(delta >= 0.0 && delta + 2.0 * RAMP <= kak.flat_length) {
        return Err(WaveError::InvalidParameters(format!(
            "top support [{delta}, {}] must lie on the plateau [0, {}]",
            delta + 2.0 * RAMP,
            kak.flat_length
        )));
    }
    let wave = TravelingWave {
        family: WaveFamily::K22CompOnKak,
        amplitude: top.amplitude,
        velocity: kak.velocity,
        flat_length: kak.flat_length,
        delta,
        secondary_velocity: vprime,
        n: 0,
    };
    for j in junction_jumps(&wave, 0.0, 2, 1e-3) {
        for order in 0..=1 {
            if j.jumps[order].abs() > 1e-6 * (1.0 + plateau.abs() + top.amplitude.abs()).powi(2) {
                return Err(WaveError::JunctionSmoothness { x: j.x, order, jump: j.jumps[order] });
            }
        }
    }
    Ok(wave)
}
