#![allow(dead_code)]

pub mod brute;
pub mod gen;

use std::fs;
use std::path::PathBuf;

use plh_core::syntax::{parse_finite_instance, parse_instance, parse_language, parse_relations};
use plh_core::syntax::{FiniteInstance, Language, RelationSet, VcspInstance};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture_names() -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".plh"))
        .collect();
    names.sort();
    names
}

fn read(name: &str) -> String {
    fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn language(name: &str) -> Language {
    parse_language(&read(name)).unwrap()
}

pub fn relations(name: &str) -> RelationSet {
    parse_relations(&read(name)).unwrap()
}

pub fn instance(name: &str) -> VcspInstance {
    parse_instance(&read(name)).unwrap()
}

pub fn base(name: &str) -> FiniteInstance {
    parse_finite_instance(&read(name)).unwrap()
}
