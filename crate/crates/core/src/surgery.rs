//! Invariant transport under connected sums, handle attachments, double-point
//! resolutions and blow-ups, plus a planner for the projective plane.
//!
//! Nothing here builds geometry. Every operation maps an [`ImmersionClass`] to
//! the class of the modified surface, and a [`SurgeryRecipe`] is a base class
//! with an ordered list of steps whose replay reproduces a stated target.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{
    cp2_adjunction_bound, cp2_curve_genus, lai, stein_condition, validate, ImmersionClass,
    SurfaceTopology,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Handle {
    Torus,
    RP2,
    Klein,
    WeinsteinSphere,
}

impl Handle {
    /// The chart-local class that gets summed in.
    pub fn summand(&self) -> ImmersionClass {
        match self {
            Handle::Torus => ImmersionClass::null_torus(),
            Handle::RP2 => ImmersionClass::chart_rp2(),
            Handle::Klein => ImmersionClass::chart_klein(),
            Handle::WeinsteinSphere => ImmersionClass::weinstein_sphere(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Handle,
    Blowup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SurgeryStep {
    ConnectedSum {
        other: ImmersionClass,
    },
    AttachTorus,
    AttachRP2,
    AttachKlein,
    AttachWeinsteinSphere,
    #[serde(rename = "ResolvePositiveDP_Handle")]
    ResolvePositiveDpHandle,
    #[serde(rename = "ResolveNegativeDP_Handle")]
    ResolveNegativeDpHandle,
    #[serde(rename = "ResolveNegativeDP_Blowup")]
    ResolveNegativeDpBlowup,
    NormalizeComplexPoints,
}

impl SurgeryStep {
    pub fn attach(handle: Handle) -> Self {
        match handle {
            Handle::Torus => SurgeryStep::AttachTorus,
            Handle::RP2 => SurgeryStep::AttachRP2,
            Handle::Klein => SurgeryStep::AttachKlein,
            Handle::WeinsteinSphere => SurgeryStep::AttachWeinsteinSphere,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SurgeryStep::ConnectedSum { .. } => "ConnectedSum",
            SurgeryStep::AttachTorus => "AttachTorus",
            SurgeryStep::AttachRP2 => "AttachRP2",
            SurgeryStep::AttachKlein => "AttachKlein",
            SurgeryStep::AttachWeinsteinSphere => "AttachWeinsteinSphere",
            SurgeryStep::ResolvePositiveDpHandle => "ResolvePositiveDP_Handle",
            SurgeryStep::ResolveNegativeDpHandle => "ResolveNegativeDP_Handle",
            SurgeryStep::ResolveNegativeDpBlowup => "ResolveNegativeDP_Blowup",
            SurgeryStep::NormalizeComplexPoints => "NormalizeComplexPoints",
        }
    }

    /// Applies the step. Blow-ups are reported through the returned flag.
    pub fn apply(&self, imm: &ImmersionClass) -> Result<(ImmersionClass, bool)> {
        let next = match self {
            SurgeryStep::ConnectedSum { other } => connected_sum(imm, other)?,
            SurgeryStep::AttachTorus => attach(imm, Handle::Torus)?,
            SurgeryStep::AttachRP2 => attach(imm, Handle::RP2)?,
            SurgeryStep::AttachKlein => attach(imm, Handle::Klein)?,
            SurgeryStep::AttachWeinsteinSphere => attach(imm, Handle::WeinsteinSphere)?,
            SurgeryStep::ResolvePositiveDpHandle => {
                resolve_double_point(imm, Sign::Positive, Method::Handle)?
            }
            SurgeryStep::ResolveNegativeDpHandle => {
                resolve_double_point(imm, Sign::Negative, Method::Handle)?
            }
            SurgeryStep::ResolveNegativeDpBlowup => {
                let next = resolve_double_point(imm, Sign::Negative, Method::Blowup)?;
                return Ok((next, true));
            }
            SurgeryStep::NormalizeComplexPoints => {
                // regular homotopy: invariants are untouched
                normalize_complex_points(imm)?;
                *imm
            }
        };
        Ok((next, false))
    }
}

impl fmt::Display for SurgeryStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurgeryStep::ConnectedSum { other } => write!(f, "ConnectedSum({other})"),
            step => f.write_str(step.name()),
        }
    }
}

fn require_valid(imm: &ImmersionClass) -> Result<()> {
    let cert = validate(imm);
    if cert.pass {
        Ok(())
    } else {
        Err(Error::invalid(format!("{imm} is not a valid class")))
    }
}

/// Connected sum along totally real discs of two surfaces with disjoint images.
///
/// Euler characteristics add minus two, so genus adds when both summands
/// share an orientability; mixed sums follow the cross-cap convention.
/// Normal Euler numbers, Chern pairings and double point counts add.
pub fn connected_sum(a: &ImmersionClass, b: &ImmersionClass) -> Result<ImmersionClass> {
    require_valid(a)?;
    require_valid(b)?;
    let orientable = a.orientable() && b.orientable();
    let chi = a.euler_char() + b.euler_char() - 2;
    Ok(ImmersionClass {
        topology: SurfaceTopology::from_euler_char(chi, orientable)?,
        normal_euler: a.normal_euler + b.normal_euler,
        c1_pairing: a.c1_pairing + b.c1_pairing,
        delta_plus: a.delta_plus + b.delta_plus,
        delta_minus: a.delta_minus + b.delta_minus,
    })
}

pub fn attach(imm: &ImmersionClass, handle: Handle) -> Result<ImmersionClass> {
    if handle == Handle::WeinsteinSphere && !imm.orientable() {
        return Err(Error::Mismatch(
            "double point signs, and so Weinstein spheres, need an oriented surface".into(),
        ));
    }
    connected_sum(imm, &handle.summand())
}

pub fn resolve_double_point(
    imm: &ImmersionClass,
    sign: Sign,
    method: Method,
) -> Result<ImmersionClass> {
    require_valid(imm)?;
    if !imm.orientable() {
        return Err(Error::Unsupported(
            "double point resolution needs an oriented surface".into(),
        ));
    }
    let mut next = *imm;
    match (sign, method) {
        (Sign::Positive, Method::Blowup) => {
            return Err(Error::Unsupported(
                "blow-up resolves negative double points only".into(),
            ))
        }
        (Sign::Positive, Method::Handle) => {
            if imm.delta_plus == 0 {
                return Err(Error::invalid("no positive double point to resolve"));
            }
            next.topology.genus += 1;
            next.delta_plus -= 1;
            next.normal_euler += 2;
        }
        (Sign::Negative, Method::Handle) => {
            if imm.delta_minus == 0 {
                return Err(Error::invalid("no negative double point to resolve"));
            }
            next.topology.genus += 1;
            next.delta_minus -= 1;
            next.normal_euler -= 2;
        }
        (Sign::Negative, Method::Blowup) => {
            if imm.delta_minus == 0 {
                return Err(Error::invalid("no negative double point to resolve"));
            }
            // proper transform has the class of the total transform
            next.delta_minus -= 1;
            next.normal_euler -= 2;
        }
    }
    Ok(next)
}

/// Complex points of one orientation class (or of the whole surface when it
/// is unorientable) after the cancellation procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SideForm {
    pub elliptic: u64,
    pub hyperbolic: u64,
}

impl SideForm {
    fn from_index(index: i64) -> Self {
        if index <= 0 {
            SideForm {
                elliptic: 0,
                hyperbolic: index.unsigned_abs(),
            }
        } else {
            SideForm {
                elliptic: index as u64,
                hyperbolic: 0,
            }
        }
    }

    pub fn index(&self) -> i64 {
        self.elliptic as i64 - self.hyperbolic as i64
    }
}

/// Counts of special elliptic (`w = z z̄`) and special hyperbolic (`w = z̄²`)
/// points realizing the indices of a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalForm {
    Oriented {
        positive: SideForm,
        negative: SideForm,
    },
    Unoriented(SideForm),
}

impl NormalForm {
    pub fn special_elliptic(&self) -> u64 {
        match self {
            NormalForm::Oriented { positive, negative } => positive.elliptic + negative.elliptic,
            NormalForm::Unoriented(side) => side.elliptic,
        }
    }

    pub fn special_hyperbolic_pos(&self) -> u64 {
        match self {
            NormalForm::Oriented { positive, .. } => positive.hyperbolic,
            NormalForm::Unoriented(side) => side.hyperbolic,
        }
    }

    pub fn special_hyperbolic_neg(&self) -> u64 {
        match self {
            NormalForm::Oriented { negative, .. } => negative.hyperbolic,
            NormalForm::Unoriented(_) => 0,
        }
    }

    pub fn special_hyperbolic(&self) -> u64 {
        self.special_hyperbolic_pos() + self.special_hyperbolic_neg()
    }
}

pub fn normalize_complex_points(imm: &ImmersionClass) -> Result<NormalForm> {
    let idx = lai(imm)?;
    Ok(match (idx.positive, idx.negative) {
        (Some(p), Some(n)) => NormalForm::Oriented {
            positive: SideForm::from_index(p),
            negative: SideForm::from_index(n),
        },
        _ => NormalForm::Unoriented(SideForm::from_index(idx.total)),
    })
}

/// Result of replaying a step list, with every intermediate class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayTrace {
    pub states: Vec<ImmersionClass>,
    /// Exceptional spheres gained by the ambient through blow-ups.
    pub exceptional_spheres: u32,
}

impl ReplayTrace {
    pub fn result(&self) -> &ImmersionClass {
        self.states.last().expect("trace always holds the base")
    }
}

pub fn replay_traced(base: &ImmersionClass, steps: &[SurgeryStep]) -> Result<ReplayTrace> {
    require_valid(base).map_err(|e| Error::Replay {
        position: 0,
        reason: e.to_string(),
    })?;
    let mut states = Vec::with_capacity(steps.len() + 1);
    states.push(*base);
    let mut exceptional_spheres = 0;
    let mut current = *base;
    for (i, step) in steps.iter().enumerate() {
        let (next, blown_up) = step.apply(&current).map_err(|e| Error::Replay {
            position: i + 1,
            reason: format!("{}: {e}", step.name()),
        })?;
        if blown_up {
            exceptional_spheres += 1;
        }
        states.push(next);
        current = next;
    }
    Ok(ReplayTrace {
        states,
        exceptional_spheres,
    })
}

/// Left fold of `steps` over `base`. Failing steps are reported 1-based.
pub fn replay(base: &ImmersionClass, steps: &[SurgeryStep]) -> Result<ImmersionClass> {
    replay_traced(base, steps).map(|t| *t.result())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRecipe")]
pub struct SurgeryRecipe {
    base: ImmersionClass,
    steps: Vec<SurgeryStep>,
    expected: ImmersionClass,
}

#[derive(Deserialize)]
struct RawRecipe {
    base: ImmersionClass,
    steps: Vec<SurgeryStep>,
    expected: ImmersionClass,
}

impl TryFrom<RawRecipe> for SurgeryRecipe {
    type Error = Error;

    fn try_from(raw: RawRecipe) -> Result<Self> {
        SurgeryRecipe::with_expected(raw.base, raw.steps, raw.expected)
    }
}

impl SurgeryRecipe {
    pub fn new(base: ImmersionClass, steps: Vec<SurgeryStep>) -> Result<Self> {
        let expected = replay(&base, &steps)?;
        Ok(SurgeryRecipe {
            base,
            steps,
            expected,
        })
    }

    /// Builds a recipe and checks that the replay lands on `expected`.
    pub fn with_expected(
        base: ImmersionClass,
        steps: Vec<SurgeryStep>,
        expected: ImmersionClass,
    ) -> Result<Self> {
        let got = replay(&base, &steps)?;
        if got != expected {
            return Err(Error::Mismatch(format!(
                "recipe replays to {got}, expected {expected}"
            )));
        }
        Ok(SurgeryRecipe {
            base,
            steps,
            expected,
        })
    }

    pub fn base(&self) -> &ImmersionClass {
        &self.base
    }

    pub fn steps(&self) -> &[SurgeryStep] {
        &self.steps
    }

    pub fn expected(&self) -> &ImmersionClass {
        &self.expected
    }

    pub fn replay(&self) -> Result<ImmersionClass> {
        replay(&self.base, &self.steps)
    }
}

/// Target of [`plan_cp2`]. Unorientable targets carry no degree (their class
/// is only defined mod 2) and no signed double points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanTarget {
    #[serde(default)]
    pub degree: Option<i64>,
    pub genus: i64,
    #[serde(default)]
    pub delta_plus: i64,
    #[serde(default = "yes")]
    pub orientable: bool,
}

fn yes() -> bool {
    true
}

impl PlanTarget {
    pub fn oriented(degree: i64, genus: i64, delta_plus: i64) -> Self {
        PlanTarget {
            degree: Some(degree),
            genus,
            delta_plus,
            orientable: true,
        }
    }

    pub fn unoriented(genus: i64) -> Self {
        PlanTarget {
            degree: None,
            genus,
            delta_plus: 0,
            orientable: false,
        }
    }
}

/// The degree-`d` rational curve with `(d-1)(d-2)/2` positive double points,
/// obtained from `d` generic lines by smoothing `d - 1` intersections.
pub fn nodal_rational_curve(d: i64) -> ImmersionClass {
    let nodes = cp2_curve_genus(d);
    ImmersionClass::immersed(SurfaceTopology::orientable(0), d * d, 3 * d, nodes, 0)
}

/// Plans a surface in the projective plane with a regular Stein neighborhood
/// basis.
///
/// Oriented embedded targets start from a smooth curve of degree `d` and add
/// `g - (d-1)(d-2)/2` torus handles. Oriented immersed targets start from the
/// nodal rational curve, add `k = g + δ₊ - (d-1)(d-2)/2` Weinstein spheres,
/// then smooth `g` positive double points into handles. Unorientable targets
/// start from the real projective plane and add `g - 1` projective planes of
/// index -1.
pub fn plan_cp2(target: PlanTarget) -> Result<SurgeryRecipe> {
    if !target.orientable {
        return plan_unoriented(target);
    }
    let d = target
        .degree
        .ok_or_else(|| Error::invalid("oriented targets need a degree"))?;
    if d < 1 {
        return Err(Error::invalid(format!(
            "degree must be at least 1, got {d}"
        )));
    }
    if target.genus < 0 || target.delta_plus < 0 {
        return Err(Error::invalid("genus and delta_plus must be nonnegative"));
    }
    let bound = cp2_adjunction_bound(d);
    let lhs = target.genus + target.delta_plus;
    if lhs < bound {
        let rule = if target.delta_plus == 0 {
            "adjunction-cp2-embedded"
        } else {
            "adjunction-cp2-immersed"
        };
        return Err(Error::Infeasible {
            rule: rule.into(),
            lhs,
            rhs: bound,
        });
    }

    let curve_genus = cp2_curve_genus(d);
    let handles = (lhs - curve_genus) as usize;
    let (base, steps) = if target.delta_plus == 0 {
        (
            ImmersionClass::cp2_curve(d),
            vec![SurgeryStep::AttachTorus; handles],
        )
    } else {
        let mut steps = vec![SurgeryStep::AttachWeinsteinSphere; handles];
        steps.extend(
            std::iter::repeat_n(SurgeryStep::ResolvePositiveDpHandle, target.genus as usize),
        );
        (nodal_rational_curve(d), steps)
    };
    let recipe = SurgeryRecipe::new(base, steps)?;
    check_plan(&recipe, target)?;
    Ok(recipe)
}

fn plan_unoriented(target: PlanTarget) -> Result<SurgeryRecipe> {
    if target.degree.is_some() {
        return Err(Error::invalid(
            "unorientable targets have a mod 2 class and take no degree",
        ));
    }
    if target.delta_plus != 0 {
        return Err(Error::invalid(
            "double point signs are undefined on unorientable surfaces",
        ));
    }
    if target.genus < 1 {
        return Err(Error::invalid("unorientable genus must be at least 1"));
    }
    let steps = vec![SurgeryStep::AttachRP2; (target.genus - 1) as usize];
    let recipe = SurgeryRecipe::new(ImmersionClass::real_projective_plane_in_cp2(), steps)?;
    check_plan(&recipe, target)?;
    Ok(recipe)
}

fn check_plan(recipe: &SurgeryRecipe, target: PlanTarget) -> Result<()> {
    let got = recipe.expected();
    let degree_ok = match target.degree {
        Some(d) => got.self_intersection() == d * d && got.c1_pairing == 3 * d,
        None => true,
    };
    let ok = degree_ok
        && got.genus() == target.genus
        && got.orientable() == target.orientable
        && got.delta_plus == target.delta_plus
        && got.delta_minus == 0
        && stein_condition(got)?.pass;
    if ok {
        Ok(())
    } else {
        Err(Error::numerical(format!(
            "planner produced {got} for target {target:?}"
        )))
    }
}
