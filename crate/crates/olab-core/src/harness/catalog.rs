//! The named properties and their static metadata.

use crate::error::{Error, Result};

/// Auxiliary config entries a property may require.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Need {
    PsiY,
    ThetaY,
    Phi0,
    Psi,
    ThetaG,
    Rho,
}

impl Need {
    pub fn key(&self) -> &'static str {
        match self {
            Need::PsiY => "young.psi",
            Need::ThetaY => "young.theta",
            Need::Phi0 => "young.phi0",
            Need::Psi => "growth.psi",
            Need::ThetaG => "growth.theta",
            Need::Rho => "growth.rho",
        }
    }
}

/// How the worst ratio of a property is judged.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kind {
    /// An inequality with an explicit constant; each level passes on its own.
    Exact,
    /// An inequality with some constant: each level must be finite and the
    /// constant must settle between the two finest levels.
    Constant { commutator: bool },
}

macro_rules! catalog {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// A catalog entry.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Property { $($variant),* }

        impl Property {
            pub const ALL: &'static [Property] = &[$(Property::$variant),*];

            pub fn name(&self) -> &'static str {
                match self { $(Property::$variant => $name),* }
            }

            pub fn parse(s: &str) -> Result<Property> {
                match s.trim().to_ascii_uppercase().as_str() {
                    $($name => Ok(Property::$variant),)*
                    _ => Err(Error::UnknownProperty(s.to_string())),
                }
            }
        }
    };
}

catalog! {
    InverseSandwich => "INVERSE_SANDWICH",
    ComplProduct => "COMPL_PRODUCT",
    ChiNorm => "CHI_NORM",
    HolderBall => "HOLDER_BALL",
    MeanBound => "MEAN_BOUND",
    GoodLambda => "GOODLAMBDA",
    DyadicModular => "DYADIC_MODULAR",
    SharpLower => "SHARP_LOWER",
    SharpEquiv => "SHARP_EQUIV",
    SharpMorrey => "SHARP_MORREY",
    Bridge => "BRIDGE",
    JnEquiv => "JN_EQUIV",
    Chain => "CHAIN",
    OscGrowth => "OSC_GROWTH",
    TailCz => "TAIL_CZ",
    TailIr => "TAIL_IR",
    TailIrPsi => "TAIL_IR_PSI",
    MrPointwise => "MR_POINTWISE",
    MrBounded => "MR_BOUNDED",
    CommPwCz => "COMM_PW_CZ",
    CommPwIr => "COMM_PW_IR",
    MeanVanish => "MEAN_VANISH",
    CommBoundCz => "COMM_BOUND_CZ",
    CommBoundIr => "COMM_BOUND_IR",
    CommBoundCzDec => "COMM_BOUND_CZ_DEC",
    CommBoundIrDec => "COMM_BOUND_IR_DEC",
    NecessityRatio => "NECESSITY_RATIO",
}

impl Property {
    pub fn kind(&self) -> Kind {
        use Property::*;
        match self {
            InverseSandwich | ComplProduct | ChiNorm | HolderBall | MeanBound | GoodLambda | DyadicModular
            | Bridge | JnEquiv | MeanVanish => Kind::Exact,
            CommPwCz | CommPwIr | CommBoundCz | CommBoundIr | CommBoundCzDec | CommBoundIrDec | NecessityRatio => {
                Kind::Constant { commutator: true }
            }
            _ => Kind::Constant { commutator: false },
        }
    }

    /// Properties that do not depend on the grid run once.
    pub fn level_free(&self) -> bool {
        matches!(self, Property::InverseSandwich | Property::ComplProduct)
    }

    pub fn needs(&self) -> &'static [Need] {
        use Property::*;
        match self {
            JnEquiv | OscGrowth | CommPwCz => &[Need::Psi],
            CommBoundCz => &[Need::Psi, Need::PsiY],
            TailIr => &[Need::Rho],
            TailIrPsi | CommPwIr => &[Need::Rho, Need::Psi],
            MrPointwise | MrBounded => &[Need::Rho, Need::PsiY],
            CommBoundIr => &[Need::Rho, Need::Psi, Need::PsiY],
            CommBoundCzDec => &[Need::PsiY, Need::Phi0, Need::Psi, Need::ThetaG],
            CommBoundIrDec => &[Need::Rho, Need::PsiY, Need::Phi0],
            NecessityRatio => &[Need::Psi, Need::PsiY],
            _ => &[],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in Property::ALL {
            assert_eq!(Property::parse(p.name()).unwrap(), *p);
        }
        assert_eq!(Property::ALL.len(), 27);
        assert!(matches!(Property::parse("NOPE"), Err(Error::UnknownProperty(_))));
    }
}
