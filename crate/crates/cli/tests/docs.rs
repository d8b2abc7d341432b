//! The documented formats, checked against the parsers.

use std::path::{Path, PathBuf};

use abphase::SurfaceMesh;
use abphase_cli::config::parse_scenario;
use abphase_cli::run::run_scenario;

fn docs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs")
}

/// Contents of every fenced block with the given info string.
fn blocks(markdown: &str, info: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current: Option<String> = None;
    for line in markdown.lines() {
        match &mut current {
            None if line.trim() == format!("```{info}") => current = Some(String::new()),
            Some(_) if line.trim() == "```" => out.push(current.take().unwrap()),
            Some(buf) => {
                buf.push_str(line);
                buf.push('\n');
            }
            None => {}
        }
    }
    out
}

#[test]
fn cube_example_is_the_unit_cube() {
    let file = std::fs::read_to_string(docs().join("cube.mesh")).unwrap();
    let md = std::fs::read_to_string(docs().join("mesh-format.md")).unwrap();
    let example = blocks(&md, "text").into_iter().find(|b| b.contains("vertices 8")).unwrap();
    assert_eq!(example, file, "markdown example and cube.mesh differ");

    let mesh = SurfaceMesh::parse(&file).unwrap();
    assert_eq!(mesh, SurfaceMesh::unit_cube());
    assert_eq!(mesh.len(), 8);
    assert!(mesh.is_closed());
    assert_eq!(mesh.edges().len(), 14);
    assert!((mesh.signed_volume() - 1.0).abs() < 1e-12);
    assert!((mesh.total_area() - 6.0).abs() < 1e-12);
    // the y = 0 quad faces -y
    assert!((mesh.panels()[0].normal - abphase::Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-12);
    // writing and reading back is exact
    assert_eq!(SurfaceMesh::parse(&mesh.to_text()).unwrap(), mesh);
}

#[test]
fn inward_orientation_reverses_panels() {
    let file = std::fs::read_to_string(docs().join("cube.mesh")).unwrap();
    let mut inward = String::new();
    let mut in_panels = false;
    for line in file.lines() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let out = if line == "orientation outward" {
            "orientation inward".to_string()
        } else if in_panels {
            let mut idx = tokens[1..].to_vec();
            idx.reverse();
            format!("{} {}", tokens[0], idx.join(" "))
        } else {
            line.to_string()
        };
        in_panels |= tokens.first() == Some(&"panels");
        inward.push_str(&out);
        inward.push('\n');
    }
    assert!(inward.contains("4 4 5 1 0"), "{inward}");
    assert_eq!(SurfaceMesh::parse(&inward).unwrap(), SurfaceMesh::unit_cube());
    // declaring the wrong orientation is caught on closed meshes
    assert!(SurfaceMesh::parse(&file.replace("outward", "inward")).is_err());
}

#[test]
fn grammar_edge_cases() {
    let file = std::fs::read_to_string(docs().join("cube.mesh")).unwrap();
    assert!(SurfaceMesh::parse(&file.replace('\n', "\r\n")).is_ok());
    assert!(SurfaceMesh::parse(&file.replace("0 0 0\n", "0 0 0 # origin\n")).is_err());
    assert!(SurfaceMesh::parse(&format!("{file}\n# trailing comment\n\n")).is_ok());
    assert!(SurfaceMesh::parse(&format!("{file}3 0 1 2\n")).is_err());
}

#[test]
fn scenario_example_parses() {
    let md = std::fs::read_to_string(docs().join("scenario-format.md")).unwrap();
    let examples = blocks(&md, "toml");
    assert!(!examples.is_empty());
    for e in examples {
        parse_scenario(&e, Path::new(".")).unwrap();
    }
}

#[test]
fn file_sources_and_file_meshes_run() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(docs().join("cube.mesh"), dir.path().join("cube.mesh")).unwrap();
    std::fs::write(
        dir.path().join("elements.txt"),
        "# x y z q mx my mz\n0 0 1 1e-9 0 0 0\n\n0 0 -1 -1e-9 0 0 0 # dipole partner\n",
    )
    .unwrap();
    // 2x2x2 grid of equal real amplitudes: no current, uniform charge
    let mut grid = String::from("dims 2 2 2\norigin 5 5 5\nspacing 0.1\ncharge -1.602176634e-19\nmass 9.1093837015e-31\n");
    grid.push_str(&"1 0\n".repeat(8));
    std::fs::write(dir.path().join("psi.txt"), grid).unwrap();

    let text = r#"
scenario_kind = "custom_energy"
[[sources]]
type = "element_list"
file = "elements.txt"
[[sources]]
type = "wavefunction_grid"
file = "psi.txt"
[[sources]]
type = "point_charge"
charge = "1 nC"
position = [3, 0, 0]
"#;
    let config = parse_scenario(text, dir.path()).unwrap();
    let report = run_scenario(&config, dir.path()).unwrap();
    // three pairs, each with value, charge and current parts
    assert_eq!(report.energies.len(), 9);
    assert!(report.result.is_finite());

    let lorentz = r#"
scenario_kind = "lorentz_check"
[[sources]]
type = "point_charge"
charge = "1 nC"
position = [0.5, 0.5, 3.0]
[shield.mesh]
generator = "file"
path = "cube.mesh"
[gates]
disabled = true
"#;
    let config = parse_scenario(lorentz, dir.path()).unwrap();
    let report = run_scenario(&config, dir.path()).unwrap();
    assert!(report.relative_error.unwrap().is_finite());
    assert!(report.gates.is_empty());
}
