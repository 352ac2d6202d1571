use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hfrep::attributes::{evaluate_attributes, AttributeFn, AttributeValue, Band, HeterogeneousObject, PartitionScheme};
use hfrep::frep::{model, sample_frep};
use hfrep::io::{decode_hfrf, encode_hfrf, isoline_endpoints, render_fn_with_isolines};
use hfrep::pipeline::{hfrep_build, HfrepParams, Route, UdfPart};
use hfrep::Point;

#[test]
fn dt_and_fim_routes_agree_on_convex_models() {
    for (name, res) in [("circle", 129), ("sphere", 33)] {
        let m = model(name).unwrap();
        let p = HfrepParams { res, ..Default::default() };
        let dims = vec![res; m.dim()];
        let a = hfrep_build(&m.tree, m.bbox, Route::Dt, &p).unwrap().sample(&dims).unwrap();
        let b = hfrep_build(&m.tree, m.bbox, Route::Fim, &p).unwrap().sample(&dims).unwrap();
        let h = a.min_spacing();
        assert!(a.max_abs_diff(&b) <= 2.0 * h, "{name}: {} > {}", a.max_abs_diff(&b), 2.0 * h);
    }
}

#[test]
fn sampled_fields_survive_the_file_format() {
    let m = model("robot").unwrap();
    let f = hfrep_build(&m.tree, m.bbox, Route::Dt, &HfrepParams { res: 65, ..Default::default() }).unwrap();
    let g = f.sample(&[65, 65]).unwrap();
    let bytes = encode_hfrf(&g);
    let back = decode_hfrf(&bytes).unwrap();
    assert_eq!(back.values(), g.values());
    assert_eq!(encode_hfrf(&back), bytes);
}

#[test]
fn four_distance_bands_on_the_star() {
    let m = model("star").unwrap();
    let field = hfrep_build(&m.tree, m.bbox, Route::Dt, &HfrepParams { res: 129, ..Default::default() }).unwrap();
    let edges = [0.0, 0.03, 0.07, 0.12, 10.0];
    let colours = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]];
    let bands = (0..4).map(|k| Band { lo: edges[k], hi: edges[k + 1], attribute: k }).collect();
    let attrs = colours.iter().map(|c| AttributeFn::constant(*c).unwrap()).collect();
    let obj = HeterogeneousObject::new(field, attrs, PartitionScheme::bands(bands).unwrap(), AttributeValue::Color([0.5; 3]))
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let mut seen = [0usize; 4];
    for _ in 0..4000 {
        let p = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let s = evaluate_attributes(&obj, &p).unwrap();
        let d = obj.geometry.eval(&p).unwrap();
        // recompute the band from the distance value alone
        let expect = if d < 0.0 { None } else { edges.windows(2).position(|w| d >= w[0] && d < w[1]) };
        assert_eq!(s.partition, expect);
        match expect {
            Some(k) => {
                seen[k] += 1;
                assert_eq!(s.value, AttributeValue::Color(colours[k]));
            }
            None => assert_eq!(s.value, AttributeValue::Color([0.5; 3])),
        }
    }
    assert!(seen.iter().all(|&n| n > 0), "{seen:?}");
    // band edges belong to the band above
    let at_edge = obj.evaluate_with_distance(0.07, &Point::ORIGIN);
    assert_eq!(at_edge.partition, Some(2));
}

#[test]
fn smooth_adaptive_field_has_unbroken_isolines() {
    let m = model("treble-clef").unwrap();
    let params = HfrepParams { min_depth: 3, max_depth: 7, ..Default::default() };
    let field = hfrep_build(&m.tree, m.bbox, Route::HfimAdf, &params).unwrap();
    let UdfPart::Adf(adf) = field.udf_part() else { panic!("adaptive route") };
    let (w, step) = (400, 0.02);
    let (_, smooth) = render_fn_with_isolines(|p| adf.eval(p), &m.bbox, w, w, step).unwrap();
    let (_, bilinear) = render_fn_with_isolines(|p| adf.eval_bilinear(p), &m.bbox, w, w, step).unwrap();
    let (es, eb) = (isoline_endpoints(&smooth, w, w), isoline_endpoints(&bilinear, w, w));
    eprintln!("isoline loose ends: smooth {es}, bilinear {eb}");
    assert!(es <= eb, "smooth {es} vs bilinear {eb}");
}

#[test]
fn field_sign_matches_frep_on_catalog_models() {
    for name in ["bat", "robot", "heart", "treble-clef"] {
        let m = model(name).unwrap();
        let f = hfrep_build(&m.tree, m.bbox, Route::Dt, &HfrepParams { res: 129, ..Default::default() }).unwrap();
        let g = f.sample(&[129, 129]).unwrap();
        let s = sample_frep(&m.tree, &[129, 129], m.bbox).unwrap();
        let band = 10.0 * f.slope();
        for (v, fr) in g.values().iter().zip(s.values()) {
            if fr.abs() > band {
                assert_eq!(*v > 0.0, *fr > 0.0, "{name}");
            }
        }
    }
}
