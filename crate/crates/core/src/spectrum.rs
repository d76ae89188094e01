//! Boundary spectral data and analytic model spectra.
//!
//! A [`ChiralSpectrum`] stores only the positive half `λ > 0` of the
//! spectrum of the boundary operator `A` together with the chiral kernel
//! dimensions. The full spectrum is `{±λ}` with equal multiplicities plus the
//! kernel, so the `λ ↔ -λ` symmetry holds by construction.

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

/// One positive eigenvalue `λ` of `A` with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub lambda: f64,
    pub multiplicity: u32,
}

/// Truncated spectral resolution of a boundary Dirac operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiralSpectrum {
    modes: Vec<Mode>,
    ker_plus: u32,
    ker_minus: u32,
    cutoff: f64,
}

impl ChiralSpectrum {
    pub fn new(modes: Vec<Mode>, ker_plus: u32, ker_minus: u32, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::InvalidParameter(format!("cutoff must be positive, got {cutoff}")));
        }
        for (i, m) in modes.iter().enumerate() {
            if !(m.lambda > 0.0) || !m.lambda.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "modes[{i}]: eigenvalue must be positive, got {}",
                    m.lambda
                )));
            }
            if m.multiplicity == 0 {
                return Err(Error::InvalidParameter(format!("modes[{i}]: zero multiplicity")));
            }
            if m.lambda > cutoff {
                return Err(Error::InvalidParameter(format!(
                    "modes[{i}]: λ = {} exceeds cutoff {cutoff}",
                    m.lambda
                )));
            }
            if i > 0 && modes[i - 1].lambda >= m.lambda {
                return Err(Error::InvalidParameter(format!("modes[{i}]: unsorted eigenvalues")));
            }
        }
        Ok(Self { modes, ker_plus, ker_minus, cutoff })
    }

    /// Spectrum with a kernel and no nonzero modes below `cutoff`.
    pub fn kernel_only(ker_plus: u32, ker_minus: u32, cutoff: f64) -> Result<Self> {
        Self::new(Vec::new(), ker_plus, ker_minus, cutoff)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn ker_plus(&self) -> u32 {
        self.ker_plus
    }

    pub fn ker_minus(&self) -> u32 {
        self.ker_minus
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// `dim ker A⁺ - dim ker A⁻`.
    pub fn index(&self) -> i64 {
        self.ker_plus as i64 - self.ker_minus as i64
    }

    pub fn ker_total(&self) -> u64 {
        self.ker_plus as u64 + self.ker_minus as u64
    }

    /// Number of stored nonzero modes counted with multiplicity.
    pub fn mode_count(&self) -> u64 {
        self.modes.iter().map(|m| m.multiplicity as u64).sum()
    }

    /// The same spectral data seen from the opposite orientation: `A → -A`
    /// and the chiral halves trade places.
    pub fn reversed(&self) -> Self {
        Self {
            modes: self.modes.clone(),
            ker_plus: self.ker_minus,
            ker_minus: self.ker_plus,
            cutoff: self.cutoff,
        }
    }

    /// `Σ m e^{-tλ²}` over stored modes, ascending in `λ`.
    pub fn heat_sum(&self, t: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for m in &self.modes {
            acc.add(m.multiplicity as f64 * (-t * m.lambda * m.lambda).exp());
        }
        acc.total()
    }

    /// Constant `C` of the mode-count estimate `N(λ) ≤ C λ²`.
    ///
    /// Twice the largest ratio `N(λ)/λ²` seen on the stored modes, and never
    /// less than `1/Λ²` so that an empty truncation still carries a bound.
    pub fn weyl_constant(&self) -> f64 {
        let mut count = 0u64;
        let mut ratio: f64 = 0.0;
        for m in &self.modes {
            count += m.multiplicity as u64;
            ratio = ratio.max(count as f64 / (m.lambda * m.lambda));
        }
        (2.0 * ratio).max(1.0 / (self.cutoff * self.cutoff))
    }

    /// Bound on `Σ_{λ > Λ} m e^{-tλ²}`, the modes dropped by the cutoff.
    ///
    /// With `N(λ) ≤ Cλ²`, integration by parts gives
    /// `C e^{-tΛ²} (Λ² + 1/t)`.
    pub fn truncation_bound(&self, t: f64) -> f64 {
        let cut2 = self.cutoff * self.cutoff;
        self.weyl_constant() * (-t * cut2).exp() * (cut2 + 1.0 / t)
    }

    /// Smallest `t` whose truncation bound does not exceed `tol`.
    pub fn admissible_time(&self, tol: f64) -> f64 {
        let (mut lo, mut hi) = (1e-12_f64, 1.0_f64);
        while self.truncation_bound(hi) > tol {
            hi *= 2.0;
            if hi > 1e12 {
                return f64::INFINITY;
            }
        }
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if self.truncation_bound(mid) > tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Boundary condition at one end of a Dirac boundary problem.
///
/// `ApsComplement` only arises as the adjoint of `Aps`: it is `Id - P⁰`
/// applied after Clifford multiplication by the normal, which on the
/// collar maps the `λ` eigenspace of `A` onto the `-λ` eigenspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Plus,
    Minus,
    Aps,
    #[serde(rename = "aps-complement")]
    ApsComplement,
}

impl BoundaryCondition {
    /// The three conditions a user can impose.
    pub const PRIMARY: [BoundaryCondition; 3] =
        [BoundaryCondition::Plus, BoundaryCondition::Minus, BoundaryCondition::Aps];

    pub fn adjoint(self) -> Self {
        match self {
            Self::Plus => Self::Minus,
            Self::Minus => Self::Plus,
            Self::Aps => Self::ApsComplement,
            Self::ApsComplement => Self::Aps,
        }
    }

    pub fn is_local(self) -> bool {
        matches!(self, Self::Plus | Self::Minus)
    }

    /// `+1` for `Plus`, `-1` for `Minus`.
    pub fn local_sign(self) -> Option<i64> {
        match self {
            Self::Plus => Some(1),
            Self::Minus => Some(-1),
            _ => None,
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plus => "plus",
            Self::Minus => "minus",
            Self::Aps => "aps",
            Self::ApsComplement => "aps-complement",
        })
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plus" | "+" => Ok(Self::Plus),
            "minus" | "-" => Ok(Self::Minus),
            "aps" | "0" => Ok(Self::Aps),
            other => Err(Error::InvalidParameter(format!(
                "unknown boundary condition '{other}' (expected plus, minus or aps)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Inward,
    Reversed,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Self::Inward => Self::Reversed,
            Self::Reversed => Self::Inward,
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Self::Inward => 1,
            Self::Reversed => -1,
        }
    }
}

/// One connected boundary component with its condition.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryComponent {
    pub spectrum: ChiralSpectrum,
    pub condition: BoundaryCondition,
    pub orientation: Orientation,
}

impl BoundaryComponent {
    pub fn new(spectrum: ChiralSpectrum, condition: BoundaryCondition, orientation: Orientation) -> Self {
        Self { spectrum, condition, orientation }
    }

    pub fn effective_index(&self) -> i64 {
        self.orientation.sign() * self.spectrum.index()
    }

    pub fn effective_ker_plus(&self) -> u32 {
        match self.orientation {
            Orientation::Inward => self.spectrum.ker_plus(),
            Orientation::Reversed => self.spectrum.ker_minus(),
        }
    }

    pub fn effective_ker_minus(&self) -> u32 {
        match self.orientation {
            Orientation::Inward => self.spectrum.ker_minus(),
            Orientation::Reversed => self.spectrum.ker_plus(),
        }
    }

    pub fn effective_ker_total(&self) -> u64 {
        self.spectrum.ker_total()
    }

    pub fn reversed(&self) -> Self {
        Self { orientation: self.orientation.flipped(), ..self.clone() }
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")))
    }
}

/// Groups sorted `λ²` values whose relative difference is at most 1e-12.
fn group_float_squares(mut squares: Vec<f64>, ker: u32, cutoff: f64) -> Result<ChiralSpectrum> {
    squares.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut modes: Vec<Mode> = Vec::new();
    let mut anchor = f64::NAN;
    for s in squares {
        if !modes.is_empty() && (s - anchor).abs() <= 1e-12 * anchor {
            modes.last_mut().expect("nonempty").multiplicity += 1;
        } else {
            anchor = s;
            modes.push(Mode { lambda: s.sqrt(), multiplicity: 1 });
        }
    }
    ChiralSpectrum::new(modes, ker, ker, cutoff)
}

fn check_shift(delta: [f64; 2]) -> Result<()> {
    for d in delta {
        if d != 0.0 && d != 0.5 {
            return Err(Error::InvalidParameter(format!(
                "spin-structure shift must be 0 or 1/2, got {d}"
            )));
        }
    }
    Ok(())
}

/// Flat torus `ℝ²/(L₁ℤ ⊕ L₂ℤ)` with spin structure given by the shifts
/// `δ ∈ {0, ½}²`: `λ = 2π |((k₁+δ₁)/L₁, (k₂+δ₂)/L₂)|`.
///
/// Coincident eigenvalues are grouped with relative tolerance 1e-12; use
/// [`make_flat_torus_rational`] for exact grouping.
pub fn make_flat_torus(l1: f64, l2: f64, delta: [f64; 2], cutoff: f64) -> Result<ChiralSpectrum> {
    check_positive("L1", l1)?;
    check_positive("L2", l2)?;
    check_positive("cutoff", cutoff)?;
    check_shift(delta)?;
    let k1_max = (cutoff * l1 / (2.0 * PI)).ceil() as i64 + 1;
    let k2_max = (cutoff * l2 / (2.0 * PI)).ceil() as i64 + 1;
    let cut2 = cutoff * cutoff;
    let mut squares = Vec::new();
    for k1 in -k1_max..=k1_max {
        let p1 = 2.0 * PI * (k1 as f64 + delta[0]) / l1;
        for k2 in -k2_max..=k2_max {
            let p2 = 2.0 * PI * (k2 as f64 + delta[1]) / l2;
            let s = p1 * p1 + p2 * p2;
            if s > 0.0 && s <= cut2 {
                squares.push(s);
            }
        }
    }
    let ker = u32::from(delta == [0.0, 0.0]);
    group_float_squares(squares, ker, cutoff)
}

/// Flat torus with side lengths `Lᵢ = 2π rᵢ`, `rᵢ` rational; eigenvalue
/// coincidences are detected exactly on `λ² = (m₁/2r₁)² + (m₂/2r₂)²`,
/// `mᵢ = 2kᵢ + 2δᵢ`.
pub fn make_flat_torus_rational(
    r1: Ratio<i64>,
    r2: Ratio<i64>,
    delta: [f64; 2],
    cutoff: f64,
) -> Result<ChiralSpectrum> {
    check_shift(delta)?;
    check_positive("cutoff", cutoff)?;
    if *r1.numer() <= 0 || *r2.numer() <= 0 {
        return Err(Error::InvalidParameter("side ratios must be positive".into()));
    }
    let to_wide = |r: Ratio<i64>| Ratio::new(*r.numer() as i128, *r.denom() as i128);
    let (w1, w2) = (to_wide(r1), to_wide(r2));
    let shift = |d: f64| if d == 0.5 { 1i128 } else { 0 };
    let (s1, s2) = (shift(delta[0]), shift(delta[1]));
    let as_f64 = |r: Ratio<i128>| *r.numer() as f64 / *r.denom() as f64;
    let m1_max = (2.0 * cutoff * as_f64(w1)).ceil() as i128 + 2;
    let m2_max = (2.0 * cutoff * as_f64(w2)).ceil() as i128 + 2;
    let cut2 = cutoff * cutoff;
    let mut groups: BTreeMap<Ratio<i128>, u32> = BTreeMap::new();
    for k1 in -m1_max..=m1_max {
        let m1 = 2 * k1 + s1;
        let a = Ratio::from_integer(m1) / (Ratio::from_integer(2) * w1);
        for k2 in -m2_max..=m2_max {
            let m2 = 2 * k2 + s2;
            let b = Ratio::from_integer(m2) / (Ratio::from_integer(2) * w2);
            let sq = a * a + b * b;
            let approx = as_f64(sq);
            if *sq.numer() != 0 && approx <= cut2 {
                *groups.entry(sq).or_insert(0) += 1;
            }
        }
    }
    let modes = groups
        .into_iter()
        .map(|(sq, multiplicity)| Mode { lambda: as_f64(sq).sqrt(), multiplicity })
        .collect();
    let ker = u32::from(s1 == 0 && s2 == 0);
    ChiralSpectrum::new(modes, ker, ker, cutoff)
}

/// Torus of the given area carrying `c` flux quanta: Landau levels
/// `λₙ = √(2Bn)`, `B = 2π|c|/area`, each of multiplicity `|c|`; the
/// lowest level is the kernel, in `S⁺` for `c > 0` and `S⁻` for `c < 0`.
pub fn make_twisted_torus(flux: i64, area: f64, cutoff: f64) -> Result<ChiralSpectrum> {
    if flux == 0 {
        return Err(Error::InvalidParameter(
            "flux must be nonzero; use make_flat_torus for the untwisted torus".into(),
        ));
    }
    check_positive("area", area)?;
    check_positive("cutoff", cutoff)?;
    let c = flux.unsigned_abs();
    let mult = u32::try_from(c).map_err(|_| Error::InvalidParameter("flux too large".into()))?;
    let field = 2.0 * PI * c as f64 / area;
    let mut modes = Vec::new();
    let mut n = 1u64;
    loop {
        let lambda = (2.0 * field * n as f64).sqrt();
        if lambda > cutoff {
            break;
        }
        modes.push(Mode { lambda, multiplicity: mult });
        n += 1;
    }
    let (kp, km) = if flux > 0 { (mult, 0) } else { (0, mult) };
    ChiralSpectrum::new(modes, kp, km, cutoff)
}

/// Round sphere of radius `r`: `λₙ = n/r` with multiplicity `2n`, no kernel.
pub fn make_round_sphere(radius: f64, cutoff: f64) -> Result<ChiralSpectrum> {
    check_positive("radius", radius)?;
    check_positive("cutoff", cutoff)?;
    let modes = (1u32..)
        .map(|n| Mode { lambda: n as f64 / radius, multiplicity: 2 * n })
        .take_while(|m| m.lambda <= cutoff)
        .collect();
    ChiralSpectrum::new(modes, 0, 0, cutoff)
}

#[derive(Serialize)]
struct SpectrumDocument {
    modes: Vec<(f64, u32)>,
    ker_plus: u32,
    ker_minus: u32,
    cutoff: f64,
}

/// Serialises to `{"modes": [[λ, m], ...], "ker_plus", "ker_minus", "cutoff"}`.
pub fn save_spectrum(spectrum: &ChiralSpectrum) -> String {
    let doc = SpectrumDocument {
        modes: spectrum.modes.iter().map(|m| (m.lambda, m.multiplicity)).collect(),
        ker_plus: spectrum.ker_plus,
        ker_minus: spectrum.ker_minus,
        cutoff: spectrum.cutoff,
    };
    serde_json::to_string_pretty(&doc).expect("spectrum document serialises")
}

fn doc_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Document { path: path.into(), message: message.into() }
}

fn kernel_dim(obj: &serde_json::Map<String, Value>, key: &str) -> Result<u32> {
    let v = obj.get(key).ok_or_else(|| doc_err(key, "missing field"))?;
    if let Some(n) = v.as_i64() {
        if n < 0 {
            return Err(doc_err(key, "negative kernel dimension"));
        }
        return u32::try_from(n).map_err(|_| doc_err(key, "kernel dimension too large"));
    }
    if v.as_u64().is_some() {
        return Err(doc_err(key, "kernel dimension too large"));
    }
    Err(doc_err(key, "expected a nonnegative integer"))
}

/// Parses a spectrum document, reporting violations with their field path.
pub fn load_spectrum(document: &str) -> Result<ChiralSpectrum> {
    let root: Value = serde_json::from_str(document)?;
    spectrum_from_value(&root, "")
}

pub(crate) fn spectrum_from_value(root: &Value, prefix: &str) -> Result<ChiralSpectrum> {
    let at = |p: &str| if prefix.is_empty() { p.to_string() } else { format!("{prefix}.{p}") };
    let obj = root.as_object().ok_or_else(|| doc_err(prefix.to_string(), "expected an object"))?;
    let cutoff = obj
        .get("cutoff")
        .ok_or_else(|| doc_err(at("cutoff"), "missing field"))?
        .as_f64()
        .ok_or_else(|| doc_err(at("cutoff"), "expected a number"))?;
    if !(cutoff > 0.0) {
        return Err(doc_err(at("cutoff"), "cutoff must be positive"));
    }
    let ker_plus = kernel_dim(obj, "ker_plus").map_err(|e| rebase(e, prefix))?;
    let ker_minus = kernel_dim(obj, "ker_minus").map_err(|e| rebase(e, prefix))?;
    let list = obj
        .get("modes")
        .ok_or_else(|| doc_err(at("modes"), "missing field"))?
        .as_array()
        .ok_or_else(|| doc_err(at("modes"), "expected an array"))?;
    let mut modes = Vec::with_capacity(list.len());
    for (i, entry) in list.iter().enumerate() {
        let path = at(&format!("modes[{i}]"));
        let pair = entry
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| doc_err(path.clone(), "expected [lambda, multiplicity]"))?;
        let lambda = pair[0]
            .as_f64()
            .ok_or_else(|| doc_err(format!("{path}[0]"), "expected a number"))?;
        if !(lambda > 0.0) {
            return Err(doc_err(format!("{path}[0]"), "nonpositive eigenvalue"));
        }
        if lambda > cutoff {
            return Err(doc_err(format!("{path}[0]"), "eigenvalue above cutoff"));
        }
        if let Some(prev) = modes.last().map(|m: &Mode| m.lambda) {
            if lambda <= prev {
                return Err(doc_err(format!("{path}[0]"), "unsorted eigenvalues"));
            }
        }
        let mult = pair[1]
            .as_u64()
            .ok_or_else(|| doc_err(format!("{path}[1]"), "expected a positive integer"))?;
        if mult == 0 {
            return Err(doc_err(format!("{path}[1]"), "zero multiplicity"));
        }
        let multiplicity =
            u32::try_from(mult).map_err(|_| doc_err(format!("{path}[1]"), "multiplicity too large"))?;
        modes.push(Mode { lambda, multiplicity });
    }
    ChiralSpectrum::new(modes, ker_plus, ker_minus, cutoff)
}

fn rebase(err: Error, prefix: &str) -> Error {
    match err {
        Error::Document { path, message } if !prefix.is_empty() => {
            Error::Document { path: format!("{prefix}.{path}"), message }
        }
        other => other,
    }
}
