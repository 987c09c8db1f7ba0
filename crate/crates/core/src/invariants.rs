//! Exact integer calculus of surface invariants.
//!
//! An [`ImmersionClass`] records everything the index formulas need about a
//! closed surface immersed in a complex surface: its topology, the Euler
//! number of the normal bundle, the pairing of the first Chern class of the
//! ambient with the image class, and the counts of positive and negative
//! transverse double points. From these the module computes the complex-point
//! indices `I`, `I₊`, `I₋`, the adjunction bounds, and a statement-level
//! verdict on Stein neighborhoods.
//!
//! All arithmetic is on `i64`; every quantity that is a priori a half-integer
//! is only produced after [`validate`] has established the parity rule.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Witness};
use crate::error::{Error, Result};

/// Genus and orientability of a closed connected surface.
///
/// For non-orientable surfaces `genus` is the cross-cap count, so the real
/// projective plane has genus 1 and the Klein bottle genus 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceTopology {
    pub genus: i64,
    pub orientable: bool,
}

impl SurfaceTopology {
    pub const fn orientable(genus: i64) -> Self {
        SurfaceTopology {
            genus,
            orientable: true,
        }
    }

    pub const fn unorientable(genus: i64) -> Self {
        SurfaceTopology {
            genus,
            orientable: false,
        }
    }

    pub fn euler_char(&self) -> i64 {
        euler_char(*self)
    }

    /// Inverse of [`euler_char`]. Fails when no surface of the given
    /// orientability has this Euler characteristic.
    pub fn from_euler_char(chi: i64, orientable: bool) -> Result<Self> {
        if orientable {
            if chi > 2 || chi % 2 != 0 {
                return Err(Error::invalid(format!(
                    "no orientable surface has euler characteristic {chi}"
                )));
            }
            Ok(SurfaceTopology::orientable((2 - chi) / 2))
        } else {
            if chi > 1 {
                return Err(Error::invalid(format!(
                    "no unorientable surface has euler characteristic {chi}"
                )));
            }
            Ok(SurfaceTopology::unorientable(2 - chi))
        }
    }
}

impl fmt::Display for SurfaceTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orientable {
            write!(f, "orientable genus {}", self.genus)
        } else {
            write!(f, "unorientable genus {}", self.genus)
        }
    }
}

pub fn euler_char(top: SurfaceTopology) -> i64 {
    if top.orientable {
        2 - 2 * top.genus
    } else {
        2 - top.genus
    }
}

/// Integer record of a closed surface immersed in a complex surface.
///
/// `c1_pairing` is only meaningful for orientable surfaces; it is carried but
/// ignored by every formula when `topology.orientable` is false.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImmersionClass {
    pub topology: SurfaceTopology,
    pub normal_euler: i64,
    pub c1_pairing: i64,
    pub delta_plus: i64,
    pub delta_minus: i64,
}

impl ImmersionClass {
    pub const fn embedded(topology: SurfaceTopology, normal_euler: i64, c1_pairing: i64) -> Self {
        ImmersionClass {
            topology,
            normal_euler,
            c1_pairing,
            delta_plus: 0,
            delta_minus: 0,
        }
    }

    /// Builds a class from its homological data rather than the normal Euler
    /// number: `self_intersection = normal_euler + 2(delta_plus - delta_minus)`.
    pub fn immersed(
        topology: SurfaceTopology,
        self_intersection: i64,
        c1_pairing: i64,
        delta_plus: i64,
        delta_minus: i64,
    ) -> Self {
        ImmersionClass {
            topology,
            normal_euler: self_intersection - 2 * (delta_plus - delta_minus),
            c1_pairing,
            delta_plus,
            delta_minus,
        }
    }

    /// A smooth complex curve of degree `d` in the projective plane.
    pub fn cp2_curve(d: i64) -> Self {
        ImmersionClass::embedded(
            SurfaceTopology::orientable(cp2_curve_genus(d)),
            d * d,
            3 * d,
        )
    }

    /// An embedded null-homologous totally real torus in a coordinate chart.
    pub const fn null_torus() -> Self {
        ImmersionClass::embedded(SurfaceTopology::orientable(1), 0, 0)
    }

    /// The embedded real projective plane of index -1 in a coordinate chart.
    pub const fn chart_rp2() -> Self {
        ImmersionClass::embedded(SurfaceTopology::unorientable(1), -2, 0)
    }

    /// A totally real Klein bottle in a coordinate chart.
    pub const fn chart_klein() -> Self {
        ImmersionClass::embedded(SurfaceTopology::unorientable(2), 0, 0)
    }

    /// Weinstein's totally real figure-eight sphere: one positive double point,
    /// null-homologous.
    pub const fn weinstein_sphere() -> Self {
        ImmersionClass {
            topology: SurfaceTopology::orientable(0),
            normal_euler: -2,
            c1_pairing: 0,
            delta_plus: 1,
            delta_minus: 0,
        }
    }

    /// The real points `{[x:y:z] : x,y,z real}` of the projective plane:
    /// totally real, so the index vanishes and `normal_euler = -euler_char`.
    pub const fn real_projective_plane_in_cp2() -> Self {
        ImmersionClass::embedded(SurfaceTopology::unorientable(1), -1, 0)
    }

    pub fn euler_char(&self) -> i64 {
        euler_char(self.topology)
    }

    pub fn genus(&self) -> i64 {
        self.topology.genus
    }

    pub fn orientable(&self) -> bool {
        self.topology.orientable
    }

    /// Signed double point count `delta_plus - delta_minus`.
    pub fn delta(&self) -> i64 {
        self.delta_plus - self.delta_minus
    }

    /// Homological self-intersection of the image.
    pub fn self_intersection(&self) -> i64 {
        self.normal_euler + 2 * self.delta()
    }

    pub fn is_embedded(&self) -> bool {
        self.delta_plus == 0 && self.delta_minus == 0
    }
}

impl fmt::Display for ImmersionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (normal_euler {}, c1 {}, delta+ {}, delta- {})",
            self.topology, self.normal_euler, self.c1_pairing, self.delta_plus, self.delta_minus
        )
    }
}

/// Genus of a smooth complex curve of degree `d` in the projective plane.
pub fn cp2_curve_genus(d: i64) -> i64 {
    (d - 1) * (d - 2) / 2
}

/// The sharp projective-plane bound `(d+1)(d+2)/2`.
pub fn cp2_adjunction_bound(d: i64) -> i64 {
    (d + 1) * (d + 2) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexReport {
    pub total: i64,
    pub positive: Option<i64>,
    pub negative: Option<i64>,
}

impl IndexReport {
    /// `positive <= 0 && negative <= 0` when oriented, `total <= 0` otherwise.
    pub fn nonpositive(&self) -> bool {
        match (self.positive, self.negative) {
            (Some(p), Some(n)) => p <= 0 && n <= 0,
            _ => self.total <= 0,
        }
    }
}

/// Checks that a class can be the invariant record of an actual immersion.
pub fn validate(imm: &ImmersionClass) -> Certificate {
    let mut cert = Certificate::new(true, "index-integrality");
    let mut fail = |w: Witness| {
        cert.pass = false;
        cert.push(w);
    };
    if imm.topology.genus < 0 {
        fail(Witness::at_least("genus >= 0", imm.topology.genus, 0));
    }
    if !imm.topology.orientable && imm.topology.genus < 1 {
        fail(Witness::at_least(
            "unorientable genus >= 1",
            imm.topology.genus,
            1,
        ));
    }
    if imm.delta_plus < 0 {
        fail(Witness::at_least("delta_plus >= 0", imm.delta_plus, 0));
    }
    if imm.delta_minus < 0 {
        fail(Witness::at_least("delta_minus >= 0", imm.delta_minus, 0));
    }
    if imm.topology.orientable {
        let sum = imm.euler_char() + imm.normal_euler + imm.c1_pairing;
        if sum.rem_euclid(2) != 0 {
            fail(Witness::equal(
                "(chi + normal_euler + c1) mod 2 = 0: I+ and I- non-integral",
                sum.rem_euclid(2),
                0,
            ));
        }
    }
    cert
}

fn require_valid(imm: &ImmersionClass) -> Result<()> {
    let cert = validate(imm);
    if cert.pass {
        Ok(())
    } else {
        let reasons: Vec<String> = cert
            .relations()
            .map(|(rel, _, _, _)| rel.to_string())
            .collect();
        Err(Error::invalid(format!(
            "{imm} violates {}",
            reasons.join("; ")
        )))
    }
}

fn require_orientable(imm: &ImmersionClass, op: &str) -> Result<()> {
    if imm.topology.orientable {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "{op} requires an orientable surface"
        )))
    }
}

/// Complex-point indices from the index formula `I = chi + normal_euler`,
/// `I± = (I ± c1)/2`.
pub fn lai(imm: &ImmersionClass) -> Result<IndexReport> {
    require_valid(imm)?;
    let total = imm.euler_char() + imm.normal_euler;
    if imm.topology.orientable {
        let positive = (total + imm.c1_pairing) / 2;
        let negative = (total - imm.c1_pairing) / 2;
        Ok(IndexReport {
            total,
            positive: Some(positive),
            negative: Some(negative),
        })
    } else {
        Ok(IndexReport {
            total,
            positive: None,
            negative: None,
        })
    }
}

/// `1 + (S² + |c1·S|)/2`, the right-hand side shared by every adjunction-type
/// inequality. Integral for every valid oriented class.
pub fn adjunction_rhs(imm: &ImmersionClass) -> Result<i64> {
    require_orientable(imm, "adjunction_rhs")?;
    require_valid(imm)?;
    let twice = imm.self_intersection() + imm.c1_pairing.abs();
    assert!(
        twice % 2 == 0,
        "parity validated but S^2 + |c1| is odd for {imm}"
    );
    Ok(1 + twice / 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjunctionVariant {
    /// `g >= rhs`, for embedded surfaces.
    EmbeddedStar,
    /// `g + delta_plus >= rhs`, the immersed adjunction inequality.
    ImmersedStarstar,
    /// `g + delta_plus >= rhs + delta_minus`, equivalent to `I± <= 0`.
    Immersed42,
}

impl AdjunctionVariant {
    pub fn rule(&self) -> &'static str {
        match self {
            AdjunctionVariant::EmbeddedStar => "adjunction-embedded",
            AdjunctionVariant::ImmersedStarstar => "adjunction-immersed",
            AdjunctionVariant::Immersed42 => "index-nonpositive-immersed",
        }
    }
}

pub fn check_adjunction(imm: &ImmersionClass, variant: AdjunctionVariant) -> Result<Certificate> {
    require_orientable(imm, "check_adjunction")?;
    if variant == AdjunctionVariant::EmbeddedStar && !imm.is_embedded() {
        return Err(Error::Mismatch(format!(
            "embedded_star needs an embedded class, got {} double points",
            imm.delta_plus + imm.delta_minus
        )));
    }
    let rhs = adjunction_rhs(imm)?;
    let g = imm.topology.genus;
    let witness = match variant {
        AdjunctionVariant::EmbeddedStar => Witness::at_least("g >= 1 + (S^2 + |c1.S|)/2", g, rhs),
        AdjunctionVariant::ImmersedStarstar => Witness::at_least(
            "g + delta_plus >= 1 + (S^2 + |c1.S|)/2",
            g + imm.delta_plus,
            rhs,
        ),
        AdjunctionVariant::Immersed42 => Witness::at_least(
            "g + delta_plus >= 1 + delta_minus + (S^2 + |c1.S|)/2",
            g + imm.delta_plus,
            rhs + imm.delta_minus,
        ),
    };
    let pass = matches!(witness, Witness::Relation { holds: true, .. });
    Ok(Certificate::new(pass, variant.rule()).with(witness))
}

/// Sufficient condition for a regular Stein neighborhood basis after isotopy:
/// `I₊ <= 0 and I₋ <= 0` when oriented, `I <= 0` otherwise.
pub fn stein_condition(imm: &ImmersionClass) -> Result<Certificate> {
    let idx = lai(imm)?;
    let mut cert = Certificate::new(idx.nonpositive(), "index-nonpositive");
    match (idx.positive, idx.negative) {
        (Some(p), Some(n)) => {
            cert.push(Witness::at_least("0 >= I+", 0, p));
            cert.push(Witness::at_least("0 >= I-", 0, n));
        }
        _ => cert.push(Witness::at_least("0 >= I", 0, idx.total)),
    }
    Ok(cert)
}

/// Genus formula for surfaces without negative complex points:
/// `g = 1 - delta + (S² - c1·S)/2`, equivalent to `I₋ = 0`.
pub fn genus_formula(imm: &ImmersionClass) -> Result<Certificate> {
    require_orientable(imm, "genus_formula")?;
    let idx = lai(imm)?;
    let twice = imm.self_intersection() - imm.c1_pairing;
    let formula = 1 - imm.delta() + twice / 2;
    let negative = idx.negative.unwrap_or_default();
    let on_index = Witness::equal("I- = 0", negative, 0);
    let on_genus = Witness::equal(
        "g = 1 - delta + (S^2 - c1.S)/2",
        imm.topology.genus,
        formula,
    );
    let pass = negative == 0 && imm.topology.genus == formula;
    Ok(Certificate::new(pass, "genus-formula")
        .with(on_index)
        .with(on_genus))
}

/// Homology data of a surface class, interpreted against an ambient kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassData {
    Degree(i64),
    Bidegree(i64, i64),
    /// The zero section of a line bundle.
    ZeroSection,
    /// No second homology to speak of.
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AmbientKind {
    AffinePlane,
    ProjectivePlane { degree: i64 },
    Quadric { d1: i64, d2: i64 },
    LineBundle { base_genus: i64, degree: i64 },
    Abstract { normal_euler: i64, c1_pairing: i64 },
}

impl AmbientKind {
    /// The class data carried by the kind itself.
    pub fn class_data(&self) -> ClassData {
        match *self {
            AmbientKind::AffinePlane => ClassData::Trivial,
            AmbientKind::ProjectivePlane { degree } => ClassData::Degree(degree),
            AmbientKind::Quadric { d1, d2 } => ClassData::Bidegree(d1, d2),
            AmbientKind::LineBundle { .. } => ClassData::ZeroSection,
            AmbientKind::Abstract { .. } => ClassData::Trivial,
        }
    }
}

/// Ambient complex surface together with the caller-supplied hypothesis flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientDescriptor {
    pub kind: AmbientKind,
    #[serde(default)]
    pub stein: bool,
    #[serde(default)]
    pub kaehler_b2plus_gt1: bool,
}

impl AmbientDescriptor {
    pub fn affine_plane() -> Self {
        AmbientDescriptor {
            kind: AmbientKind::AffinePlane,
            stein: true,
            kaehler_b2plus_gt1: false,
        }
    }

    pub fn projective_plane(degree: i64) -> Self {
        AmbientDescriptor {
            kind: AmbientKind::ProjectivePlane { degree },
            stein: false,
            kaehler_b2plus_gt1: false,
        }
    }

    pub fn quadric(d1: i64, d2: i64) -> Self {
        AmbientDescriptor {
            kind: AmbientKind::Quadric { d1, d2 },
            stein: false,
            kaehler_b2plus_gt1: false,
        }
    }

    pub fn line_bundle(base_genus: i64, degree: i64) -> Self {
        AmbientDescriptor {
            kind: AmbientKind::LineBundle { base_genus, degree },
            stein: false,
            kaehler_b2plus_gt1: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            AmbientKind::AffinePlane if !self.stein => {
                Err(Error::invalid("the affine plane is Stein"))
            }
            AmbientKind::ProjectivePlane { .. } | AmbientKind::Quadric { .. } if self.stein => {
                Err(Error::invalid("compact ambients are not Stein"))
            }
            AmbientKind::LineBundle { base_genus, .. } if base_genus < 0 => {
                Err(Error::invalid("base genus must be nonnegative"))
            }
            _ => Ok(()),
        }
    }
}

/// `(self_intersection, c1_pairing)` of a class in a standard ambient.
pub fn ambient_pairings(ambient: &AmbientKind, class: ClassData) -> Result<(i64, i64)> {
    let mismatch = || {
        Error::Mismatch(format!(
            "class data {class:?} does not fit ambient {ambient:?}"
        ))
    };
    match (*ambient, class) {
        (AmbientKind::AffinePlane, ClassData::Trivial) => Ok((0, 0)),
        (AmbientKind::ProjectivePlane { .. }, ClassData::Degree(d)) => Ok((d * d, 3 * d)),
        (AmbientKind::Quadric { .. }, ClassData::Bidegree(d1, d2)) => {
            Ok((2 * d1 * d2, 2 * (d1 + d2)))
        }
        (AmbientKind::LineBundle { base_genus, degree }, ClassData::ZeroSection) => {
            if base_genus < 0 {
                return Err(Error::invalid("base genus must be nonnegative"));
            }
            Ok((degree, 2 - 2 * base_genus + degree))
        }
        (
            AmbientKind::Abstract {
                normal_euler,
                c1_pairing,
            },
            ClassData::Trivial,
        ) => Ok((normal_euler, c1_pairing)),
        _ => Err(mismatch()),
    }
}

/// Largest line bundle degree whose zero section admits a regular Stein
/// neighborhood basis after isotopy.
pub fn line_bundle_threshold(base_genus: i64) -> i64 {
    2 * base_genus - 2
}

/// Possible indices of embeddings of an unorientable surface in the affine
/// plane: `{3χ-4} ∪ {3χ, 3χ+4, ..., 4-χ}`.
pub fn index_set_c2_unorientable(top: SurfaceTopology) -> Result<BTreeSet<i64>> {
    if top.orientable {
        return Err(Error::Unsupported(
            "index set is only tabulated for unorientable surfaces".into(),
        ));
    }
    if top.genus < 1 {
        return Err(Error::invalid("unorientable genus must be at least 1"));
    }
    let chi = top.euler_char();
    let mut set: BTreeSet<i64> = (0..)
        .map(|k| 3 * chi + 4 * k)
        .take_while(|&i| i <= 4 - chi)
        .collect();
    set.insert(3 * chi - 4);
    Ok(set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    SteinAfterIsotopy,
    NoSteinNeighborhood,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub rule: String,
    pub witnesses: Vec<Witness>,
    /// Names the hypothesis that would be needed to decide an inconclusive case.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unresolved: Option<String>,
}

impl Verdict {
    fn decided(outcome: Outcome, rule: &str, witnesses: Vec<Witness>) -> Self {
        Verdict {
            outcome,
            rule: rule.to_string(),
            witnesses,
            unresolved: None,
        }
    }

    fn inconclusive(hypothesis: &str, witnesses: Vec<Witness>) -> Self {
        Verdict {
            outcome: Outcome::Inconclusive,
            rule: "inconclusive".to_string(),
            witnesses,
            unresolved: Some(hypothesis.to_string()),
        }
    }
}

/// Decides Stein-neighborhood existence from the statement-level rules.
///
/// The hypothesis flags (`stein`, `kaehler_b2plus_gt1`, `class_nonzero`) are
/// trusted as given; nothing is inferred from geometry.
pub fn verdict(
    imm: &ImmersionClass,
    ambient: &AmbientDescriptor,
    class_nonzero: bool,
) -> Result<Verdict> {
    ambient.validate()?;
    let sufficient = stein_condition(imm)?;
    let mut witnesses = sufficient.witnesses.clone();
    if sufficient.pass {
        return Ok(Verdict::decided(
            Outcome::SteinAfterIsotopy,
            "index-nonpositive",
            witnesses,
        ));
    }
    if !imm.topology.orientable {
        return Ok(Verdict::inconclusive(
            "no obstruction is known for unorientable surfaces with positive index",
            witnesses,
        ));
    }

    let rhs = adjunction_rhs(imm)?;
    let lhs = imm.topology.genus + imm.delta_plus;
    let adjunction = Witness::at_least("g + delta_plus >= 1 + (S^2 + |c1.S|)/2", lhs, rhs);
    witnesses.push(adjunction.clone());

    if let AmbientKind::ProjectivePlane { degree } = ambient.kind {
        if degree >= 1 {
            let (s2, c1) = ambient_pairings(&ambient.kind, ClassData::Degree(degree))?;
            if s2 != imm.self_intersection() || c1 != imm.c1_pairing {
                witnesses.push(Witness::equal("S^2 = d^2", imm.self_intersection(), s2));
                witnesses.push(Witness::equal("c1.S = 3d", imm.c1_pairing, c1));
                return Ok(Verdict::inconclusive(
                    "surface data is inconsistent with the stated degree",
                    witnesses,
                ));
            }
            if lhs < rhs {
                return Ok(Verdict::decided(
                    Outcome::NoSteinNeighborhood,
                    "adjunction-cp2",
                    witnesses,
                ));
            }
            return Ok(Verdict::inconclusive(
                "negative double points: the index condition fails while the adjunction bound holds",
                witnesses,
            ));
        }
    }

    if ambient.stein {
        if !class_nonzero {
            return Ok(Verdict::inconclusive(
                "null-homologous class in a Stein surface",
                witnesses,
            ));
        }
        if lhs < rhs {
            let rule = if imm.is_embedded() {
                "adjunction-stein-embedded"
            } else {
                "adjunction-stein-immersed"
            };
            return Ok(Verdict::decided(
                Outcome::NoSteinNeighborhood,
                rule,
                witnesses,
            ));
        }
        return Ok(Verdict::inconclusive(
            "negative double points: the index condition fails while the adjunction bound holds",
            witnesses,
        ));
    }

    if ambient.kaehler_b2plus_gt1 && imm.is_embedded() {
        let hypothesis = if imm.topology.genus > 0 {
            "class data contradicts the adjunction inequality of Kaehler surfaces with b2+ > 1"
        } else {
            "sphere in a Kaehler surface with b2+ > 1: needs that neither ±[S] is a complex curve"
        };
        return Ok(Verdict::inconclusive(hypothesis, witnesses));
    }

    Ok(Verdict::inconclusive(
        "ambient is neither Stein nor the projective plane",
        witnesses,
    ))
}
