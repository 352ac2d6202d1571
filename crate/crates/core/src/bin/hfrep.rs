use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hfrep::attributes::{AttributeScheme, AttributeValue, HeterogeneousObject};
use hfrep::frep::{catalog_names, model, Model};
use hfrep::io::{read_hfrf, render_grid, sphere_trace, write_hfrf, Camera, FieldImage, TraceParams};
use hfrep::pipeline::{hfrep_build, HfrepParams, Route};
use hfrep::{HfrepError, Point};

#[derive(Parser)]
#[command(name = "hfrep", version, about = "Smooth signed distance-like fields from FRep models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a field and write it as an HFRF file.
    Gen {
        #[arg(long, value_parser = parse_model)]
        model: String,
        #[arg(long, default_value = "dt")]
        route: Route,
        #[arg(long, default_value_t = 257, value_parser = clap::value_parser!(u32).range(3..=4097))]
        res: u32,
        #[arg(long)]
        out: PathBuf,
        /// Sigmoid slope; defaults to 1e-4 of the box diagonal.
        #[arg(long)]
        sl: Option<f64>,
        #[arg(long, default_value_t = 3)]
        min_depth: u32,
        #[arg(long, default_value_t = 7)]
        max_depth: u32,
    },
    /// Render a 2D HFRF file as a PPM image.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        /// Isoline spacing; also the width of the black band around zero.
        #[arg(long, default_value_t = 0.05)]
        iso: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Interior distance from a source point inside a 2D model.
    Idf {
        #[arg(long, value_parser = parse_model)]
        model: String,
        #[arg(long, value_parser = parse_xy)]
        source: Point,
        #[arg(long, default_value_t = 257, value_parser = clap::value_parser!(u32).range(3..=4097))]
        res: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render the attributes of a heterogeneous object described by a scheme file.
    Attr {
        #[arg(long, value_parser = parse_model)]
        model: String,
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 512)]
        size: usize,
    },
    /// Sphere-trace a 3D model.
    Trace {
        #[arg(long, value_parser = parse_model)]
        model: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "dt")]
        route: Route,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(3..=1025))]
        res: u32,
        #[arg(long, default_value_t = 256)]
        size: usize,
        /// Largest accepted sampled gradient norm of the field.
        #[arg(long, default_value_t = 1.1)]
        max_lipschitz: f64,
        #[arg(long)]
        sl: Option<f64>,
    },
}

fn parse_model(s: &str) -> Result<String, String> {
    if catalog_names().contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!("unknown model; choose one of {}", catalog_names().join(", ")))
    }
}

fn parse_xy(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x: f64 = x.trim().parse().map_err(|_| "bad x coordinate")?;
    let y: f64 = y.trim().parse().map_err(|_| "bad y coordinate")?;
    Ok(Point::new(x, y))
}

fn load(name: &str) -> hfrep::Result<Model> {
    model(name)
}

fn lattice(m: &Model, res: u32) -> Vec<usize> {
    vec![res as usize; m.dim()]
}

fn stats_path(out: &Path) -> PathBuf {
    out.with_extension("stats.txt")
}

fn run(cmd: Command) -> hfrep::Result<()> {
    match cmd {
        Command::Gen { model, route, res, out, sl, min_depth, max_depth } => {
            let m = load(&model)?;
            let params = HfrepParams { res: res as usize, slope: sl, min_depth, max_depth, ..Default::default() };
            let field = hfrep_build(&m.tree, m.bbox, route, &params)?;
            write_hfrf(&out, &field.sample(&lattice(&m, res))?)?;
            if let Some(stats) = field.tree_stats() {
                std::fs::write(stats_path(&out), stats.to_text())?;
            }
        }
        Command::Render { input, iso, out } => {
            render_grid(&read_hfrf(input)?, iso)?.write_ppm(out)?;
        }
        Command::Idf { model, source, res, out } => {
            let m = load(&model)?;
            let params = HfrepParams { res: res as usize, idf_source: Some(source), ..Default::default() };
            let field = hfrep_build(&m.tree, m.bbox, Route::Idf, &params)?;
            write_hfrf(&out, &field.sample(&lattice(&m, res))?)?;
        }
        Command::Attr { model, scheme, out, size } => {
            let m = load(&model)?;
            let s = AttributeScheme::parse(&std::fs::read_to_string(scheme)?)?;
            let params = HfrepParams { res: s.res, slope: s.slope, ..Default::default() };
            let geometry = hfrep_build(&m.tree, m.bbox, s.route, &params)?;
            let obj = HeterogeneousObject::new(geometry, s.attributes, s.partitions, AttributeValue::Color(s.exterior))?;
            attribute_image(&obj, size)?.write_ppm(out)?;
        }
        Command::Trace { model, out, route, res, size, max_lipschitz, sl } => {
            let m = load(&model)?;
            if m.dim() != 3 {
                return Err(HfrepError::InvalidParameter(format!("model '{model}' is not 3D")));
            }
            let params = HfrepParams { res: res as usize, slope: sl, ..Default::default() };
            let field = hfrep_build(&m.tree, m.bbox, route, &params)?;
            let tp = TraceParams { width: size, height: size, max_lipschitz, ..Default::default() };
            let (img, _) = sphere_trace(&field, &Camera::default_for(&m.bbox), &tp)?;
            img.write_ppm(out)?;
        }
    }
    Ok(())
}

/// Attribute colours over the model box; 3D models show the mid-depth slice.
fn attribute_image(obj: &HeterogeneousObject, size: usize) -> hfrep::Result<FieldImage> {
    use rayon::prelude::*;
    if size == 0 {
        return Err(HfrepError::InvalidParameter("image size must be positive".into()));
    }
    let b = *obj.geometry.bbox();
    let z = b.center().z();
    let pixels = (0..size * size)
        .into_par_iter()
        .map(|idx| {
            let (u, v) = ((idx % size) as f64 + 0.5, (idx / size) as f64 + 0.5);
            let mut p = Point::new(b.min.x() + u * b.extent(0) / size as f64, b.max.y() - v * b.extent(1) / size as f64);
            p.0[2] = z;
            let rgb = hfrep::attributes::evaluate_attributes(obj, &p)?.value.to_rgb();
            Ok(rgb.map(|c| (c.clamp(0.0, 1.0) * 255.0).round() as u8))
        })
        .collect::<hfrep::Result<Vec<_>>>()?;
    FieldImage::new(size, size, pixels)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hfrep: {e}");
            ExitCode::from(1)
        }
    }
}
