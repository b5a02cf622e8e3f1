use std::path::PathBuf;

fn main() {
    let root = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap());
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let config = cbindgen::Config::from_file(root.join("cbindgen.toml")).expect("cbindgen.toml");
    let bindings = cbindgen::Builder::new()
        .with_crate(&root)
        .with_config(config)
        .generate()
        .expect("unable to generate bindings");
    let header = root.join("include").join("finalg.h");
    std::fs::create_dir_all(header.parent().unwrap()).unwrap();
    // write_to_file leaves the file alone when nothing changed
    bindings.write_to_file(header);
}
