//! Runs one reconstruction and prints periodic state counts.
//!
//! `cargo run --release -p soam --example converge -- <shape|icosphere> <dim> <seed> [max_signals] [key=value ...]`

use std::time::Instant;

use soam::io::{RunConfig, TELEMETRY_HEADER};
use soam::meshgen::icosphere;
use soam::run::{run, Termination};
use soam::sampling::{ParametricShape, SignalSource, DEFAULT_MAJOR};
use soam::verify::{curve_topology, surface_report, CellComplex};
use soam::{ManifoldDim, Soam};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let shape = args.first().map_or("circle", String::as_str);
    let dim: u32 = args.get(1).map_or(1, |s| s.parse().unwrap());
    let seed: u64 = args.get(2).map_or(1, |s| s.parse().unwrap());
    let max: u64 = args.get(3).map_or(500_000, |s| s.parse().unwrap());
    let mut cfg = RunConfig::default();
    cfg.params.manifold_dim = ManifoldDim::from_int(dim).unwrap();
    cfg.params.seed = seed;
    cfg.params.max_signals = max;
    for kv in args.iter().skip(4) {
        let (k, v) = kv.split_once('=').unwrap();
        cfg.set(k, v).unwrap();
    }
    let mut src = if shape == "torusmesh" {
        SignalSource::mesh_vertices(
            soam::meshgen::torus_grid(2.0, 1.0, 256, 128).vertices,
            DEFAULT_MAJOR,
            cfg.noise,
            seed,
        )
        .unwrap()
    } else if shape == "dtmesh" {
        SignalSource::mesh_vertices(soam::meshgen::double_torus(1.0, 0.02).vertices, DEFAULT_MAJOR, cfg.noise, seed)
            .unwrap()
    } else if shape == "icosphere" {
        SignalSource::mesh_vertices(
            icosphere(std::env::var("ICO").map_or(4, |s| s.parse().unwrap())).vertices,
            DEFAULT_MAJOR,
            cfg.noise,
            seed,
        )
        .unwrap()
    } else if shape == "helixq" {
        let e = |k: &str, d: f64| std::env::var(k).map_or(d, |s| s.parse().unwrap());
        let h =
            ParametricShape::HelixOnTorus { major: e("HM", 3.0), minor: e("HN", 1.0), p: 1, q: e("HQ", 16.0) as u32 };
        SignalSource::parametric(h, DEFAULT_MAJOR, cfg.noise, seed).unwrap()
    } else {
        SignalSource::parametric(ParametricShape::by_name(shape).unwrap(), DEFAULT_MAJOR, cfg.noise, seed).unwrap()
    };
    let a = src.next_signal().unwrap();
    let b = src.next_signal().unwrap();
    let mut soam = Soam::new(cfg.params.clone(), a, b).unwrap();
    let term = Termination::from_soam(&soam, max.div_ceil(40).max(1));
    let t0 = Instant::now();
    let report = run(&mut soam, &mut src, &term).unwrap();
    println!("{TELEMETRY_HEADER}");
    for f in &report.telemetry {
        println!("{}", f.to_csv_row());
    }
    println!("stop={} signals={} secs={:.1}", report.stop, report.signals, t0.elapsed().as_secs_f64());
    if std::env::var("STRAGGLERS").is_ok() {
        stragglers(&soam);
    }
    let c = CellComplex::from_indexed(&report.complex);
    if dim == 1 {
        print!("{}", curve_topology(&c));
    } else {
        print!("{}", surface_report(&c));
    }
}

#[allow(dead_code)]
fn stragglers(soam: &Soam) {
    let ix = soam.to_indexed();
    let n = ix.positions.len();
    let mut adj = vec![Vec::new(); n];
    for &[a, b] in &ix.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut comp = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let c = sizes.len();
        let mut stack = vec![s];
        comp[s] = c;
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    let center = soam::BoundingBox::of(&ix.positions).unwrap().center();
    for v in 0..n {
        if sizes[comp[v]] < 20 || ix.states[v] != soam::UnitState::Patch {
            let u = soam.unit(ix.ids[v]).unwrap();
            println!(
                "unit {} comp {} (size {}) state {} deg {} r {:.2} f {:.3} |p-c| {:.2}",
                ix.ids[v],
                comp[v],
                sizes[comp[v]],
                ix.states[v],
                adj[v].len(),
                u.threshold,
                u.firing,
                ix.positions[v].sub(&center).norm()
            );
        }
    }
}
