//! Randomised verification of the norm estimates on seeded corpora, and
//! the reports they produce.

pub mod checks;
pub mod corpus;
pub mod report;
pub mod verify;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "BERGMAN_SOLID_THREADS";

/// Sizes the global rayon pool from `BERGMAN_SOLID_THREADS` when set.
///
/// Has no effect once the pool is running. Results never depend on the
/// thread count.
pub fn configure_threads() -> crate::Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| crate::Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    // a second initialisation attempt only means the pool already exists
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
