pub mod hydro;
pub mod orbits;
pub mod props;
pub mod reference;
pub mod virasoro;
