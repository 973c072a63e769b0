fn main() {
    println!("fader: pipeline CLI (under construction)");
}
