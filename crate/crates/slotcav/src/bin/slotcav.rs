fn main() { eprintln!("wip"); }
