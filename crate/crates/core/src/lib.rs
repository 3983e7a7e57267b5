//! Weierstrass marked elliptic curves over exact fields.
//!
//! - [`field`]: `F_p` (`p >= 5`) and `Q` with canonical representatives.
//! - [`curve`]: short Weierstrass curves, the chord-tangent law, and the
//!   unit-scaling action.
//! - [`marked`]: `n`-pointed curves, automorphisms, isomorphisms, the strata
//!   `U_n`, `U'_n`, `V_n`, `V'_n`, and the maps `sigma`, `tau`, `forget`.
//! - [`census`]: exhaustive enumeration over `F_p` and the automorphism
//!   classification check.
//! - [`abelian`]: Smith normal form, finitely generated abelian groups,
//!   cyclic extensions, and graded presentations `Z[l]/(c1 l, c2 l^2)`.

pub mod abelian;
pub mod census;
pub mod curve;
pub mod field;
pub mod marked;

pub use abelian::{
    chow_component, disambiguate, extensions, group_from_presentation, presentation_for, smith_normal_form,
    solve_extension, theorem_table, AbelianError, ChowPresentation, ExtensionClass, ExtensionProblem, FinAbGroup,
    IntMatrix, LiftConstraint, Presentation, SmithForm, StackLabel,
};
pub use census::{
    aut_strata, aut_strata_with, enumerate_smooth, mass, orbit_representatives, stratum_members, verify_appendix,
    AppendixVerdict, CensusError, CensusReport, Strategy,
};
pub use curve::{classify, Curve, CurveClass, CurveError, CurvePoint};
pub use field::{rational_nth_root, Field, FieldElement, FieldError};
pub use marked::{fixed_points, CyclicAut, MarkedCurve, MarkedError};
