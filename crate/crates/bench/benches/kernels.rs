use criterion::{black_box, criterion_group, criterion_main, Criterion};
use galqr_core::gal::{gal_cdf, gal_pdf, gal_sample};
use galqr_core::kernels::{sample_gig, GigParams};
use galqr_core::rng::stream_rng;
use galqr_core::GalParams;

fn gig(c: &mut Criterion) {
    let mut rng = stream_rng(0, 0);
    for (label, params) in [
        ("gig_half_balanced", GigParams::new(0.5, 2.0, 1.5).unwrap()),
        ("gig_half_small_b", GigParams::new(0.5, 4.0, 1e-4).unwrap()),
        ("gig_sigma_like", GigParams::new(-150.5, 2.0, 300.0).unwrap()),
    ] {
        c.bench_function(label, |b| b.iter(|| sample_gig(black_box(&params), &mut rng)));
    }
}

fn gal(c: &mut Criterion) {
    let params = GalParams::new(0.25, 1.2, 0.0, 1.0).unwrap();
    let al = GalParams::new(0.25, 0.0, 0.0, 1.0).unwrap();
    let ys: Vec<f64> = (0..64).map(|i| -4.0 + i as f64 / 8.0).collect();
    c.bench_function("gal_pdf_64", |b| {
        b.iter(|| ys.iter().map(|&y| gal_pdf(y, black_box(&params))).sum::<f64>())
    });
    c.bench_function("gal_cdf_64", |b| {
        b.iter(|| ys.iter().map(|&y| gal_cdf(y, black_box(&params))).sum::<f64>())
    });
    c.bench_function("al_pdf_64", |b| {
        b.iter(|| ys.iter().map(|&y| gal_pdf(y, black_box(&al))).sum::<f64>())
    });
    let mut rng = stream_rng(0, 1);
    c.bench_function("gal_sample", |b| b.iter(|| gal_sample(black_box(&params), &mut rng)));
}

criterion_group!(benches, gig, gal);
criterion_main!(benches);
