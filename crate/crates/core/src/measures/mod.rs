//! Distributions on Z_p^x, the Kummer congruences, Mellin transforms and the
//! interpolation values.

pub mod interp;
pub mod kummer;
pub mod mellin;
pub mod sigma;
pub mod system;

pub use interp::{bracket, ell_f, interpolation_value, mu_for, InterpolationInput, InterpolationValue, LRatio};
pub use kummer::{evaluation_matrix, kernel_mod_pn, kummer_check, KummerVerdict, TestFunction};
pub use mellin::{mellin, mellin_exact_zero, padic_exp, padic_log, MellinArg, MellinValue};
pub use sigma::{sigma_measure, twist, CharEvaluator, DiracCombination, SigmaMeasure, Twisted};
pub use system::{units_mod, DistributionSystem, LevelDump, MeasureDump};
