//! Dev helper: print an `annotations.json` skeleton for a license text file.
//!
//!     cargo run -p licvar-core --example kb_skeleton -- <id> <name> <file>
//!
//! Labels come out empty; fill them in by hand.

use licvar_core::textproc::segment;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() != 3 {
        eprintln!("usage: kb_skeleton <id> <name> <file>");
        std::process::exit(2);
    }
    let text = std::fs::read_to_string(&args[2]).expect("readable license text");
    let sentences: Vec<serde_json::Value> = segment(&text)
        .into_iter()
        .map(|unit| {
            serde_json::json!({
                "text": unit.text,
                "labels": [],
            })
        })
        .collect();
    let skeleton = serde_json::json!({
        "schema_version": 1,
        "id": args[0],
        "name": args[1],
        "sentences": sentences,
        "terms": {},
    });
    println!("{}", serde_json::to_string_pretty(&skeleton).unwrap());
}
