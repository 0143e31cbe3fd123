//! Write the detection-region grids for admixture, Pauli-flip and amplitude
//! damping noise into a directory (default `scans/`).

use std::path::PathBuf;

use mdiew::scan::{boundary_points, run_scan, write_scan, ScanConfig, ScanKind};
use mdiew::thresholds::amplitude_damping_bracket;

fn main() -> mdiew::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "scans".into()));
    std::fs::create_dir_all(&dir).map_err(|e| mdiew::Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    let kinds = [
        ScanKind::AdmixtureMin,
        ScanKind::AdmixtureMax,
        ScanKind::PauliSame,
        ScanKind::PauliDifferent,
        ScanKind::AmplitudeDamping,
    ];
    for kind in kinds {
        let config = ScanConfig::unit_square(kind, 101);
        let result = run_scan(&config)?;
        let path = dir.join(format!("{}.csv", kind.name()));
        write_scan(&result, &path)?;
        println!("{:<18} {:>5} detectable cells -> {}", kind.name(), result.grid.detectable_count(), path.display());
    }

    let config = ScanConfig::unit_square(ScanKind::AmplitudeDamping, 21);
    let grid = run_scan(&config)?.grid;
    for (e1, e2) in boundary_points(&config, &grid, 1e-10)? {
        println!("boundary eps1 = {e1:.3}, eps2 = {e2:.6}, bracket = {:.9}", amplitude_damping_bracket(e1, e2));
    }
    Ok(())
}
