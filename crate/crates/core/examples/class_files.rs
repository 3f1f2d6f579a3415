//! Reading and writing class files in both formats, and restricting classes.

use littlestone::concept::{ConceptClass, LabeledAssignment};

fn main() {
    let text = "3 4\np q r\n000\n100\n110\n111\n";
    let class = ConceptClass::from_text(text).unwrap();
    println!("{} elements, {} concepts", class.n_elements(), class.len());

    let json = class.to_json();
    println!("{json}");
    let back = ConceptClass::from_json(&json).unwrap();
    assert_eq!(back.rows(), class.rows());

    let rho = LabeledAssignment::from_pairs([(0, true)]).unwrap();
    let restricted = class.class_agreeing_with(&rho).unwrap();
    print!("concepts containing p:\n{}", restricted.to_text());
    println!("trace on {{q, r}}: {:?}", class.trace(&[1, 2]).unwrap());

    let dir = std::env::temp_dir().join("littlestone-class-files");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("chain.json");
    class.save(&path).unwrap();
    println!("saved to {}", path.display());
}
