use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weatlab_core::bias::{weat_lists, DenseVectors};
use weatlab_core::corpus::{tokenize, Document};
use weatlab_core::embedding::{train_baseline, train_updated};
use weatlab_core::stats::{lowess, ols, DataMatrix};
use weatlab_core::TrainerConfig;

fn training(c: &mut Criterion) {
    let docs = weatlab_bench::corpus(4, 500, 1);
    let tokens: usize = docs.iter().map(|d| d.tokens.len()).sum();
    let cfg = TrainerConfig {
        vector_dim: 50,
        min_count: 5,
        epochs: 1,
        ..TrainerConfig::default()
    };
    let mut g = c.benchmark_group("train");
    g.sample_size(10);
    g.throughput(Throughput::Elements(tokens as u64));
    g.bench_function("baseline_1_epoch", |b| b.iter(|| train_baseline(&docs, &cfg).unwrap()));
    let base = train_baseline(&docs, &cfg).unwrap();
    let group: Vec<_> = docs.iter().filter(|d| d.group_id == "g000").cloned().collect();
    g.bench_function("updated_1_epoch", |b| b.iter(|| train_updated(&base, &group, &cfg).unwrap()));
    g.finish();
}

fn weat(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let dim = 100;
    let mut v = DenseVectors::new(dim);
    let words: Vec<String> = (0..114).map(|i| format!("w{i}")).collect();
    for w in &words {
        v.insert(w.clone(), (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
    }
    let (a, rest) = words.split_at(32);
    let (b, rest) = rest.split_at(32);
    let (x, y) = rest.split_at(25);
    c.bench_function("weat_32x32x25x25_dim100", |bench| bench.iter(|| weat_lists(&v, a, b, x, y).unwrap()));
}

fn regression(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 400;
    let cols: Vec<Vec<f64>> = (0..6).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let y: Vec<f64> = (0..n).map(|i| cols.iter().map(|c| c[i]).sum::<f64>() + rng.random_range(-1.0..1.0)).collect();
    let x = DataMatrix::new((0..6).map(|i| format!("x{i}")).collect(), cols.clone()).unwrap();
    c.bench_function("ols_n400_p6", |b| b.iter(|| ols(&y, &x, true).unwrap()));
    c.bench_function("lowess_n400", |b| b.iter(|| lowess(&cols[0], &y, 2.0 / 3.0).unwrap()));
}

fn tokenization(c: &mut Criterion) {
    let docs: Vec<Document> = (0..1000)
        .map(|i| Document {
            group_id: "g".into(),
            text: format!("Hello @user{i}, this is tweet #{i}! See https://t.co/x{i} for MORE... great day"),
        })
        .collect();
    let mut g = c.benchmark_group("tokenize");
    g.throughput(Throughput::Elements(docs.len() as u64));
    g.bench_function("1000_tweets", |b| {
        b.iter_batched(|| &docs, |d| d.iter().map(tokenize).count(), BatchSize::SmallInput)
    });
    g.finish();
}

criterion_group!(benches, training, weat, regression, tokenization);
criterion_main!(benches);
