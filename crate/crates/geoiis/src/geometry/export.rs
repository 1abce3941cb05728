//! Serialization of complexes: exact JSON, and SVG / OBJ renderings.
//!
//! The JSON form is lossless (coordinates as numerator/denominator
//! strings) and round-trips through [`parse_complex_json`]. The SVG and
//! OBJ forms are renderings: they embed the simplex with equilateral
//! corners and print fixed six-decimal floats, the only place the crate
//! leaves exact arithmetic.

use super::complex::{Complex, Level, SimplexData, VertexData};
use crate::error::{Error, Result};
use num::{BigRational, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Serialize, Deserialize)]
struct ComplexFile {
    n: usize,
    rounds: usize,
    levels: Vec<LevelFile>,
}

#[derive(Serialize, Deserialize)]
struct LevelFile {
    vertices: Vec<VertexFile>,
    simplices: Vec<SimplexFile>,
}

#[derive(Serialize, Deserialize)]
struct VertexFile {
    coords: Vec<[String; 2]>,
    color: usize,
    view: Vec<usize>,
    precursor: usize,
}

#[derive(Serialize, Deserialize)]
struct SimplexFile {
    verts: Vec<usize>,
    parent: usize,
    letter: usize,
    /// Letters from the base to this simplex; redundant but convenient
    /// for readers, revalidated on parse.
    word: Vec<usize>,
}

fn rational_to_pair(x: &BigRational) -> [String; 2] {
    [x.numer().to_string(), x.denom().to_string()]
}

fn pair_to_rational(p: &[String; 2]) -> Result<BigRational> {
    let parse = |s: &str| {
        num::BigInt::from_str(s).map_err(|_| Error::ComplexParse(format!("bad integer {s:?}")))
    };
    let denom = parse(&p[1])?;
    if denom == num::BigInt::from(0) {
        return Err(Error::ComplexParse("zero denominator".into()));
    }
    Ok(BigRational::new(parse(&p[0])?, denom))
}

/// Lossless JSON rendering of a complex.
pub fn complex_to_json(c: &Complex) -> String {
    let levels = (0..c.levels().len())
        .map(|r| {
            let lv = c.level(r);
            LevelFile {
                vertices: lv
                    .vertices
                    .iter()
                    .map(|v| VertexFile {
                        coords: v.coords.iter().map(rational_to_pair).collect(),
                        color: v.color,
                        view: v.view.clone(),
                        precursor: v.precursor,
                    })
                    .collect(),
                simplices: lv
                    .simplices
                    .iter()
                    .enumerate()
                    .map(|(i, s)| SimplexFile {
                        verts: s.verts.clone(),
                        parent: s.parent,
                        letter: s.letter,
                        word: c.word_of(r, i),
                    })
                    .collect(),
            }
        })
        .collect();
    let file = ComplexFile {
        n: c.n(),
        rounds: c.rounds(),
        levels,
    };
    serde_json::to_string_pretty(&file).expect("serialization of plain data cannot fail")
}

/// Parses the JSON rendering back into a complex, revalidating the
/// redundant fields.
pub fn parse_complex_json(text: &str) -> Result<Complex> {
    let file: ComplexFile =
        serde_json::from_str(text).map_err(|e| Error::ComplexParse(e.to_string()))?;
    if file.levels.is_empty() {
        return Err(Error::ComplexParse("no levels".into()));
    }
    let mut levels = Vec::with_capacity(file.levels.len());
    for lf in &file.levels {
        let vertices = lf
            .vertices
            .iter()
            .map(|v| {
                let coords = v
                    .coords
                    .iter()
                    .map(pair_to_rational)
                    .collect::<Result<Vec<_>>>()?;
                Ok(VertexData {
                    coords,
                    color: v.color,
                    view: v.view.clone(),
                    precursor: v.precursor,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let simplices = lf
            .simplices
            .iter()
            .map(|s| SimplexData {
                verts: s.verts.clone(),
                parent: s.parent,
                letter: s.letter,
            })
            .collect();
        levels.push(Level { vertices, simplices });
    }
    let c = Complex::from_levels(file.n, levels)?;
    if c.rounds() != file.rounds {
        return Err(Error::ComplexParse(format!(
            "declared {} rounds but found {}",
            file.rounds,
            c.rounds()
        )));
    }
    for (r, lf) in file.levels.iter().enumerate() {
        for (i, s) in lf.simplices.iter().enumerate() {
            if c.word_of(r, i) != s.word {
                return Err(Error::ComplexParse(format!(
                    "level {r}: simplex {i} declares a word that does not match its parents"
                )));
            }
        }
    }
    Ok(c)
}

fn fmt6(x: f64) -> String {
    // Avoid "-0.000000" so renderings are byte-stable across paths.
    let s = format!("{:.6}", x);
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("subdivision coordinates fit in f64")
}

/// SVG rendering of the top level of a two-dimensional complex.
///
/// The base triangle spans (0,0), (10,0), (5, 5√3); the y axis is
/// flipped into screen orientation by a group transform, so the printed
/// coordinates are plain barycentric embeddings. Simplices whose last
/// letter is the complete one are shaded.
pub fn complex_to_svg(c: &Complex) -> Result<String> {
    svg_with_labels(c, None)
}

/// Like [`complex_to_svg`] but overlaying one label per top-level vertex,
/// drawn as red text next to the vertex dot.
pub fn complex_to_svg_labelled(c: &Complex, labels: &[usize]) -> Result<String> {
    let top_verts = c.level(c.rounds()).vertices.len();
    if labels.len() != top_verts {
        return Err(Error::UnsupportedExport(format!(
            "label overlay needs {} labels, got {}",
            top_verts,
            labels.len()
        )));
    }
    svg_with_labels(c, Some(labels))
}

fn svg_with_labels(c: &Complex, labels: Option<&[usize]>) -> Result<String> {
    if c.n() != 2 {
        return Err(Error::UnsupportedExport(format!(
            "svg rendering needs n = 2, got n = {}",
            c.n()
        )));
    }
    let top = c.rounds();
    let lv = c.level(top);
    let central = if top >= 1 { Some(central_letter(c)) } else { None };
    let embed = |coords: &[BigRational]| -> (f64, f64) {
        let b1 = to_f64(&coords[1]);
        let b2 = to_f64(&coords[2]);
        (10.0 * b1 + 5.0 * b2, 5.0 * 3f64.sqrt() * b2)
    };
    let mut out = String::new();
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-0.5 -9.160254 11.000000 9.660254\">\n",
    );
    out.push_str("<g transform=\"scale(1,-1)\">\n");
    for (i, s) in lv.simplices.iter().enumerate() {
        let points: Vec<String> = s
            .verts
            .iter()
            .map(|&v| {
                let (x, y) = embed(&lv.vertices[v].coords);
                format!("{},{}", fmt6(x), fmt6(y))
            })
            .collect();
        // The central child of the last round is the one the complete
        // letter produces.
        let is_central = central.is_some() && c.word_of(top, i).last() == central.as_ref();
        let fill = if is_central { "#cccccc" } else { "white" };
        out.push_str(&format!(
            "<polygon points=\"{}\" fill=\"{}\" stroke=\"black\" stroke-width=\"0.030000\"/>\n",
            points.join(" "),
            fill
        ));
    }
    for v in &lv.vertices {
        let (x, y) = embed(&v.coords);
        let is_corner = v.coords.iter().filter(|c| c.is_zero()).count() == 2;
        let fill = if is_corner { "black" } else { "#1f77b4" };
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"0.120000\" fill=\"{}\"/>\n",
            fmt6(x),
            fmt6(y),
            fill
        ));
    }
    out.push_str("</g>\n");
    if let Some(labels) = labels {
        // Text lives outside the flipped group so it renders upright;
        // the y axis is negated by hand instead.
        for (v, &label) in lv.vertices.iter().zip(labels) {
            let (x, y) = embed(&v.coords);
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"0.450000\" font-family=\"monospace\" \
                 fill=\"#d62728\" text-anchor=\"middle\">{}</text>\n",
                fmt6(x),
                fmt6(-y - 0.22),
                label
            ));
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn central_letter(c: &Complex) -> usize {
    // The complete letter sorts last in the catalogue, and the catalogue
    // size equals the number of children of any simplex.
    let children = c.level(1).simplices.len() / c.level(0).simplices.len();
    children - 1
}

/// OBJ rendering of the top level, for dimensions one to three.
///
/// Triangles become faces directly; tetrahedra contribute their four
/// facets; segments become polylines.
pub fn complex_to_obj(c: &Complex) -> Result<String> {
    if !(1..=3).contains(&c.n()) {
        return Err(Error::UnsupportedExport(format!(
            "obj rendering needs 1 <= n <= 3, got n = {}",
            c.n()
        )));
    }
    // Equilateral corner embedding in 3-space.
    let corners: Vec<[f64; 3]> = vec![
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.5, 3f64.sqrt() / 2.0, 0.0],
        [0.5, 3f64.sqrt() / 6.0, 6f64.sqrt() / 3.0],
    ];
    let lv = c.top();
    let mut out = String::new();
    for v in &lv.vertices {
        let mut p = [0.0f64; 3];
        for (j, coord) in v.coords.iter().enumerate() {
            let w = to_f64(coord);
            for d in 0..3 {
                p[d] += w * corners[j][d];
            }
        }
        out.push_str(&format!("v {} {} {}\n", fmt6(p[0]), fmt6(p[1]), fmt6(p[2])));
    }
    for s in &lv.simplices {
        match c.n() {
            1 => out.push_str(&format!("l {} {}\n", s.verts[0] + 1, s.verts[1] + 1)),
            2 => out.push_str(&format!(
                "f {} {} {}\n",
                s.verts[0] + 1,
                s.verts[1] + 1,
                s.verts[2] + 1
            )),
            _ => {
                for drop in 0..4 {
                    let f: Vec<String> = (0..4)
                        .filter(|&i| i != drop)
                        .map(|i| (s.verts[i] + 1).to_string())
                        .collect();
                    out.push_str(&format!("f {}\n", f.join(" ")));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::Alphabet;
    use crate::Limits;

    fn complex(n: usize, rounds: usize) -> Complex {
        let a = Alphabet::generate(n, &Limits::default()).unwrap();
        Complex::iterated(&a, rounds, &Limits::default()).unwrap()
    }

    #[test]
    fn json_round_trips_exactly() {
        let c = complex(2, 2);
        let text = complex_to_json(&c);
        let back = parse_complex_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(complex_to_json(&back), text);
    }

    #[test]
    fn json_parse_rejects_tampered_words() {
        let c = complex(1, 1);
        let mut v: serde_json::Value = serde_json::from_str(&complex_to_json(&c)).unwrap();
        // Simplex 0 of level 1 came from letter 0; claim letter 1 instead.
        v["levels"][1]["simplices"][0]["word"][0] = 1.into();
        assert!(parse_complex_json(&v.to_string()).is_err());
    }

    #[test]
    fn svg_of_one_round_has_thirteen_polygons_and_shades_the_center() {
        let c = complex(2, 1);
        let svg = complex_to_svg(&c).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 13);
        assert_eq!(svg.matches("#cccccc").count(), 1);
        // The color-2 vertex of the central simplex sits at (5, √3).
        assert!(svg.contains("cx=\"5.000000\" cy=\"1.732051\""));
        // Three base corners drawn black.
        assert_eq!(svg.matches("fill=\"black\"").count(), 3);
    }

    #[test]
    fn svg_output_is_deterministic() {
        let a = complex_to_svg(&complex(2, 2)).unwrap();
        let b = complex_to_svg(&complex(2, 2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("<polygon").count(), 169);
    }

    #[test]
    fn obj_of_one_round_over_the_triangle() {
        let c = complex(2, 1);
        let obj = complex_to_obj(&c).unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 12);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 13);
    }

    #[test]
    fn unsupported_dimensions_are_refused() {
        assert!(matches!(
            complex_to_svg(&complex(1, 1)),
            Err(Error::UnsupportedExport(_))
        ));
        let a = Alphabet::generate(4, &Limits::default()).unwrap();
        let c = Complex::iterated(&a, 1, &Limits::default()).unwrap();
        assert!(matches!(
            complex_to_obj(&c),
            Err(Error::UnsupportedExport(_))
        ));
    }
}
