pub mod base;
pub mod ext;
pub mod ff;
pub mod ffpoly;

pub use base::{BaseField, KElem, KPoly, K};
pub use ext::{ExtRat, Q};
pub use ff::{Embedding, FFElem, FField, Fq};
pub use ffpoly::FFPoly;
