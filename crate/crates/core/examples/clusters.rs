//! Cluster structure of a failure pattern and its error gap vectors.
//!
//! cargo run --example clusters -- 4 2 1,2,1,2,3,4

use ecrel::patterns::{error_vector_counts, find_clusters, is_error_vector, FailurePattern, GapVector};
use ecrel::CodeParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(4), |a| a.parse())?;
    let k: usize = args.get(1).map_or(Ok(2), |a| a.parse())?;
    let labels: Vec<usize> = args
        .get(2)
        .map_or("1,2,1,2,3,4", String::as_str)
        .split(',')
        .map(str::parse)
        .collect::<Result<_, _>>()?;

    let code = CodeParams::new(n, k)?;
    let f = FailurePattern::new(n, labels)?;
    let clusters = find_clusters(&f, code);
    println!("pattern {f}, ({n},{k}) code");
    for c in clusters.all() {
        let kind = if c.minimal {
            "minimal"
        } else if c.tight {
            "tight"
        } else {
            "cluster"
        };
        println!("  [{}, {}] {kind}", c.start, c.end);
    }

    let s = f.len();
    let errors: Vec<String> = (0..1u64 << (s - 1))
        .map(|i| GapVector::from_index(s - 1, i))
        .filter(|b| is_error_vector(b, &clusters).unwrap_or(false))
        .map(|b| b.to_string())
        .collect();
    println!("{} of {} gap vectors are errors: {}", errors.len(), 1u64 << (s - 1), errors.join(" "));
    println!("by number of short gaps: {:?}", error_vector_counts(&f, code));
    Ok(())
}
