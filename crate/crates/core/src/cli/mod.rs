//! CSV ingestion, report emission and the end-to-end pipeline behind `penkm`.

mod app;
mod csvio;
mod plot;
mod report;
mod run;

pub use app::{execute, main_entry, Cli, Command};
pub use csvio::{
    parse_csv, parse_csv_str, read_curve_csv, write_csv, write_curve_csv, write_labels, write_table,
    CurveTable, CURVE_HEADER,
};
pub use plot::{curve_svg, staircase_svg};
pub use report::{
    emit_plots, emit_report, parse_report, render_report, ADDITIVE_DIR, MULTIPLICATIVE_FILE,
    REPORT_FILE, SCAN_FILE, SCAN_HEADER,
};
pub use run::{load_input, run_estimate, Input, RunConfig, RunOutput};
