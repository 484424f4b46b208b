use locgame_core::*;
use std::time::Instant;

fn bench(n: u64, r: f64) {
    let params = ModelParams { profile: Profile::Desk, ..ModelParams::new(n, r, 1) };
    let g = sample_instance(&params).unwrap();
    let t1 = Instant::now();
    let d = hop_distances(&g, 0).unwrap();
    let reach = d.iter().filter(|&&x| x != INF_HOPS).count();
    println!("n={n} r={r}: bfs {:?}, max hop {:?}, reached {reach}", t1.elapsed(), d.iter().filter(|&&x| x != INF_HOPS).max());
}

fn main() {
    bench(1_000_000, 12.0);
    bench(1_000_000, 52.0);
    bench(1_000_000, 200.0);
    bench(100_000, 20.0);
    bench(100_000, 5.0);
}
