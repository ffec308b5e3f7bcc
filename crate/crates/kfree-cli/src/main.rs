fn main() {
    println!("kfree");
}
