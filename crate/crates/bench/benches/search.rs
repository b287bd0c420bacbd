use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use patternkb::{build_alignments, parse_kb_str, parse_new, SearchParams};
use patternkb_bench::{family_kb, family_new, JACK_KB, JACK_NEW};

fn jack(c: &mut Criterion) {
    let mut kb = parse_kb_str(JACK_KB, "jack.sp").unwrap();
    let costs = kb.seal_and_build_costs().unwrap();
    let q = parse_new(JACK_NEW, &kb).unwrap();
    let params = SearchParams::default();
    c.bench_function("jack", |b| {
        b.iter(|| build_alignments(&kb, &costs, &q, &params).unwrap())
    });
}

fn families(c: &mut Criterion) {
    let mut group = c.benchmark_group("families");
    group.sample_size(10);
    for n in [10, 20, 40, 80] {
        let text = family_kb(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &text, |b, text| {
            b.iter(|| {
                let mut kb = parse_kb_str(text, "families.sp").unwrap();
                let costs = kb.seal_and_build_costs().unwrap();
                let q = parse_new(&family_new(n / 2), &kb).unwrap();
                build_alignments(&kb, &costs, &q, &SearchParams::default()).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, jack, families);
criterion_main!(benches);
