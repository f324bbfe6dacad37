mod free;
mod group;
mod hnn;
mod lazy;
mod product;
mod table;

pub use free::{FreeFactor, FreeProduct};
pub use group::GroupTable;
pub use hnn::{
    EvenSpins, Hnn, HnnBase, HnnClosedForms, HnnRecipe, IdentityTheta, Multiples, PairsTheta, ScaleTheta, ShiftTheta, ThetaMap,
};
pub use lazy::{Integers, Su2Dual};
pub use product::{Product, ProductFactor, RestrictedOmit, RestrictedProduct};
pub use table::{dual_q8, dual_s3, dual_z2, TableObject, TableRing};
