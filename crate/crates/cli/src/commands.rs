use std::io::Write;

use progdisc::allocator::{allocate_weak, strong_condition_residual, MarginAllocator};
use progdisc::known_pair::{critical_margin, strong_success, weak_success};
use progdisc::oracle::{
    build_sigma, concave_allocate, jordan_overlaps_numeric, monte_carlo_check, povm_scan,
    MAX_DENSE_QUBITS, MIN_TRIALS, RNG_ALGORITHM,
};
use progdisc::program_machine::{
    global_critical_margin, minimum_error_baseline, unambiguous_baseline, JordanSpectrum,
    PortConfig,
};
use progdisc::{Margin, MarginKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::output::{format_number, open_sink, Cell, Table};
use crate::{AllocateArgs, BaselinesArgs, CurveArgs, Failure, Ports, Sink, VerifyArgs};

/// Grid step of the POVM angle scan used by `verify`.
const SCAN_STEP: f64 = 1e-5;
/// Random margins per block for the angle-scan check.
const SCAN_MARGINS: usize = 5;
/// Global margins per configuration for the strong-condition check.
const RESIDUAL_MARGINS: usize = 20;

fn spectrum(ports: Ports) -> Result<JordanSpectrum, Failure> {
    Ok(JordanSpectrum::new(PortConfig::new(
        ports.n,
        ports.nprime,
    )?)?)
}

fn emit(table: &Table, sink: &Sink) -> Result<(), Failure> {
    let mut out = open_sink(sink.out.as_deref())?;
    table.write_to(sink.format, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn baselines(args: &BaselinesArgs) -> Result<(), Failure> {
    let spectrum = spectrum(args.ports)?;
    let config = spectrum.config();
    let allocator = MarginAllocator::new(spectrum)?;
    let mut table = Table::new(&["n", "nprime", "Ps_UA", "Ps_ME", "R_c"]);
    table.push(vec![
        Cell::Int(config.n().into()),
        Cell::Int(config.nprime().into()),
        Cell::Real(unambiguous_baseline(config)),
        Cell::Real(minimum_error_baseline(config)?),
        Cell::Real(allocator.ladder().critical()),
    ]);
    emit(&table, &args.sink)
}

pub fn curve(args: &CurveArgs) -> Result<(), Failure> {
    let allocator = MarginAllocator::new(spectrum(args.ports)?)?;
    let ladder = allocator.ladder();
    let breakpoints: Vec<f64> = ladder.breakpoints()[1..]
        .iter()
        .chain(&ladder.strong_breakpoints()[1..])
        .copied()
        .collect();
    let mut table = Table::new(&["R", "Ps_weak", "Ps_strong"]);
    for r in allocator.curve_margins(args.samples, &breakpoints)? {
        let margin = Margin::new(r)?;
        table.push(vec![
            Cell::Real(r),
            Cell::Real(allocator.weak_success(margin)),
            Cell::Real(allocator.strong_success(margin)?),
        ]);
    }
    emit(&table, &args.sink)
}

pub fn allocate(args: &AllocateArgs) -> Result<(), Failure> {
    let allocator = MarginAllocator::new(spectrum(args.ports)?)?;
    let margin = Margin::new(args.r)?;
    let alloc = match args.kind {
        MarginKind::Weak => allocator.weak(margin),
        MarginKind::Strong => allocator.strong(margin)?,
    };
    if alloc.clamped {
        eprintln!(
            "note: R = {} exceeds R_c = {}; every block is at its critical margin",
            args.r,
            allocator.ladder().critical()
        );
    }
    let spectrum = allocator.spectrum();
    let mut table = Table::new(&[
        "alpha", "c_alpha", "p_alpha", "r_crit", "r_weak", "r_strong", "frozen",
    ]);
    for alpha in 1..=spectrum.blocks() {
        table.push(vec![
            Cell::Int(alpha as u64),
            Cell::Real(spectrum.overlap(alpha).value()),
            Cell::Real(spectrum.weight(alpha)),
            Cell::Real(spectrum.critical_margin(alpha)),
            Cell::Real(alloc.r_weak[alpha - 1]),
            Cell::Real(alloc.r_strong[alpha - 1]),
            Cell::Int(alloc.is_frozen(alpha).into()),
        ]);
    }
    emit(&table, &args.sink)
}

/// One line of the verification report.
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

impl Check {
    /// Passes when every `(label, deviation, tolerance)` has deviation ≤ tolerance.
    fn bounded(name: &'static str, items: &[(&str, f64, f64)]) -> Self {
        let passed = items.iter().all(|&(_, dev, tol)| dev <= tol);
        let detail = items
            .iter()
            .map(|(label, dev, tol)| format!("{label} {dev:.3e} (tol {tol:.1e})"))
            .collect::<Vec<_>>()
            .join(", ");
        Self {
            name,
            passed,
            detail,
        }
    }
}

fn allocation_check(
    spectrum: &JordanSpectrum,
    points: usize,
    scale: f64,
) -> Result<Check, Failure> {
    let rc = global_critical_margin(spectrum).value();
    let (mut value_dev, mut margin_dev) = (0.0f64, 0.0f64);
    for k in 0..points {
        let r = Margin::new(rc * k as f64 / (points - 1) as f64)?;
        let ladder = allocate_weak(spectrum, r);
        let oracle = concave_allocate(spectrum, r)?;
        value_dev = value_dev.max((ladder.success - oracle.success).abs());
        for (a, b) in ladder.r_weak.iter().zip(&oracle.margins) {
            margin_dev = margin_dev.max((a - b).abs());
        }
    }
    Ok(Check::bounded(
        "allocation",
        &[
            ("max |Δ| value", value_dev, 1e-8 * scale),
            ("margins", margin_dev, 1e-6 * scale),
        ],
    ))
}

fn scan_check(spectrum: &JordanSpectrum, seed: u64, scale: f64) -> Result<Check, Failure> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut dev = 0.0f64;
    for alpha in 1..spectrum.blocks() {
        let c = spectrum.overlap(alpha);
        let top = 1.2 * critical_margin(c).value();
        let margins =
            std::iter::once(0.0).chain((0..SCAN_MARGINS).map(|_| rng.random_range(0.0..=top)));
        for r in margins {
            let r = Margin::new(r)?;
            let weak = povm_scan(c, r, MarginKind::Weak, SCAN_STEP)?;
            let strong = povm_scan(c, r, MarginKind::Strong, SCAN_STEP)?;
            dev = dev
                .max((weak.best_success - weak_success(c, r)).abs())
                .max((strong.best_success - strong_success(c, r)).abs());
        }
    }
    Ok(Check::bounded(
        "phi-scan",
        &[("max |Δ| success", dev, 1e-6 * scale)],
    ))
}

fn residual_check(allocator: &MarginAllocator, scale: f64) -> Result<Check, Failure> {
    let spectrum = allocator.spectrum();
    let top = allocator.ladder().strong_breakpoint(spectrum.blocks());
    let mut worst = 0.0f64;
    for k in 1..=RESIDUAL_MARGINS {
        let rs = Margin::new(top * k as f64 / (RESIDUAL_MARGINS + 1) as f64)?;
        let alloc = allocator.strong(rs)?;
        worst = worst.max(strong_condition_residual(spectrum, &alloc).abs());
    }
    Ok(Check::bounded(
        "strong-residual",
        &[("max |residual|", worst, 1e-9 * scale)],
    ))
}

fn dense_check(spectrum: &JordanSpectrum, scale: f64) -> Result<Check, Failure> {
    let (sigma1, sigma2) = build_sigma(spectrum.config())?;
    let gram = jordan_overlaps_numeric(&sigma1, &sigma2)?;
    if gram.block_overlaps.len() != spectrum.blocks() {
        return Ok(Check {
            name: "dense-spectrum",
            passed: false,
            detail: format!(
                "{} distinct overlaps, expected {}",
                gram.block_overlaps.len(),
                spectrum.blocks()
            ),
        });
    }
    let mut dev = 0.0f64;
    let mut multiplicities_match = true;
    for (alpha, block) in (1..).zip(&gram.block_overlaps) {
        dev = dev.max((block.overlap - spectrum.overlap(alpha).value()).abs());
        multiplicities_match &= block.multiplicity == spectrum.multiplicity(alpha);
    }
    let mut check = Check::bounded("dense-spectrum", &[("max |Δ| overlap", dev, 1e-8 * scale)]);
    check.passed &= multiplicities_match;
    check.detail.push_str(if multiplicities_match {
        ", multiplicities 2α+n'-1"
    } else {
        ", multiplicities differ from 2α+n'-1"
    });
    Ok(check)
}

fn monte_carlo_checks(
    allocator: &MarginAllocator,
    extra: Option<f64>,
    trials: usize,
    seed: u64,
    scale: f64,
) -> Result<Vec<Check>, Failure> {
    let config = allocator.spectrum().config();
    let rc = allocator.ladder().critical();
    let mut margins = vec![0.0];
    margins.extend(extra);
    margins.push(rc);
    let mut checks = Vec::new();
    for r in margins {
        let report = monte_carlo_check(config, Margin::new(r)?, trials, seed)?;
        let mut items = vec![(
            "|Δ| P_s / σ",
            (report.outcome.p_success - report.analytic_success).abs() / report.std_error_success,
            3.0 * scale,
        )];
        if r == 0.0 {
            items.push(("max P_e", report.max_error, 1e-10 * scale));
        }
        if r >= rc {
            items.push(("max Q", report.max_abstain, 1e-10 * scale));
        }
        let mut check = Check::bounded("monte-carlo", &items);
        check.detail = format!("R = {}: {}", format_number(r), check.detail);
        checks.push(check);
    }
    Ok(checks)
}

pub fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let spectrum = spectrum(args.ports)?;
    let config = spectrum.config();
    let fits = config.total_qubits() <= MAX_DENSE_QUBITS;
    if args.dense && !fits {
        // reported before any work is done
        build_sigma(config)?;
    }
    if let Some(trials) = args.trials {
        if trials < MIN_TRIALS {
            return Err(Failure::Usage(format!(
                "at least {MIN_TRIALS} Monte Carlo trials are required, got {trials}"
            )));
        }
        if !fits {
            return Err(Failure::Usage(format!(
                "the Monte Carlo check needs the dense construction: {} qubits exceed the cap of {MAX_DENSE_QUBITS} qubits",
                config.total_qubits()
            )));
        }
    }
    let scale = args.tolerance_scale;
    let allocator = MarginAllocator::new(spectrum.clone())?;

    let mut checks = vec![
        allocation_check(&spectrum, args.samples, scale)?,
        scan_check(&spectrum, args.seed, scale)?,
        residual_check(&allocator, scale)?,
    ];
    let mut skipped = Vec::new();
    if fits {
        checks.push(dense_check(&spectrum, scale)?);
    } else {
        skipped.push(format!(
            "SKIP dense-spectrum: {} qubits exceed the cap of {MAX_DENSE_QUBITS} qubits",
            config.total_qubits()
        ));
    }
    if let Some(trials) = args.trials {
        checks.extend(monte_carlo_checks(
            &allocator, args.r, trials, args.seed, scale,
        )?);
    }

    let mut out = open_sink(args.out.as_deref())?;
    writeln!(out, "config: n = {}, n' = {}", config.n(), config.nprime())?;
    if let Some(trials) = args.trials {
        writeln!(
            out,
            "rng: {RNG_ALGORITHM}, seed = {}, trials = {trials}",
            args.seed
        )?;
    }
    for check in &checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{status} {}: {}", check.name, check.detail)?;
    }
    for line in &skipped {
        writeln!(out, "{line}")?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(
        out,
        "summary: {} passed, {failed} failed",
        checks.len() - failed
    )?;
    out.flush()?;
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
