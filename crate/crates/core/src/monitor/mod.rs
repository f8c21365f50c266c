//! Littlewood-Paley instrumentation of a run: the per-block ledger, the weighted
//! functionals of the regularity estimate, `N_q`, the form `V` and the rest terms.

pub mod ledger;
pub mod nq;
pub mod report;
pub mod rest;

pub use ledger::{sample_row, HeatFunctional, LedgerParams, LedgerRow, RegularityLedger};
pub use nq::{n_q_field, v_form, v_form_block, VForm};
pub use report::{check_theorem, q_label, EstimateParams, EstimateReport};
pub use rest::{rest_decomposition, RestDecomposer, RestDecomposition};
