// hupa - command-line front end: generate, variance, tessellate, field, render.
//
// Exit codes: 0 success, 1 domain/runtime error, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "digest.hpp"
#include "hupa/core.hpp"
#include "hupa/field.hpp"
#include "hupa/generators.hpp"
#include "hupa/parallel.hpp"
#include "hupa/tessellation.hpp"
#include "hupa/variance.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace hupa::cli {
namespace {

constexpr const char* kVersion = "0.1.0";

class UsageError : public std::runtime_error {
  public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Globals {
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out_dir;
    std::string out;
    bool record_timing = false;
};

fs::path output_path(const Globals& g, const std::string& fallback) {
    fs::path p = g.out.empty() ? fs::path(fallback) : fs::path(g.out);
    if (!g.out_dir.empty() && p.is_relative()) p = fs::path(g.out_dir) / p;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
}

fs::path with_suffix(const fs::path& base, const std::string& suffix) { return fs::path(base.string() + suffix); }

void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << bytes;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<double> parse_number_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(flag + ": cannot parse '" + item + "' as a number");
        }
    }
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

BoxDomain parse_box(const std::string& text) {
    std::vector<double> lengths;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, 'x')) lengths.push_back(parse_number_list(item, "--box").at(0));
    try {
        return BoxDomain(lengths);
    } catch (const InvalidArgument& e) {
        throw UsageError(std::string("--box: ") + e.what());
    }
}

bool looks_like_image(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    return in && magic[0] == 'P' && (magic[1] == '1' || magic[1] == '2' || magic[1] == '4' || magic[1] == '5');
}

bool is_gray_image(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    return in && magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5');
}

json file_entry(const fs::path& path, const std::string& role) {
    return json{{"role", role}, {"path", path.generic_string()}, {"sha256", sha256_file(path)}};
}

json fit_json(const ScalingFit& f) {
    return json{{"alpha", f.alpha},         {"log_prefactor", f.log_prefactor}, {"r_squared", f.r_squared},
                {"r_min", f.r_min},         {"r_max", f.r_max},                 {"n_points", f.n_points}};
}

json curve_json(const VarianceCurve& c) {
    return json{{"mode", to_string(c.mode)}, {"n_radii", c.radii.size()}, {"n_windows", c.n_windows},
                {"radii", c.radii},          {"mean", c.mean},            {"variance", c.variance},
                {"variance_se", c.variance_se}};
}

json cell_stats_json(const CellStats& s) {
    json hist = json::object();
    for (const auto& [sides, n] : s.side_histogram) hist[std::to_string(sides)] = n;
    return json{{"cell_count", s.cell_count},         {"area_mean", s.area_mean},
                {"area_cv", s.area_cv},               {"side_histogram", hist},
                {"mean_sides", s.mean_sides},         {"edge_length_mean", s.edge_length_mean},
                {"edge_length_cv", s.edge_length_cv}};
}

json report_head(const std::string& command, const Globals& g) {
    return json{{"tool", "hupa"}, {"version", kVersion}, {"command", command}, {"seeds", {{"seed", g.seed}}}};
}

void finish_report(json& report, const Globals& g, std::chrono::steady_clock::time_point start,
                   const fs::path& path) {
    if (g.record_timing)
        report["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(path, report.dump(2) + "\n");
}

json box_json(const BoxDomain& box) {
    json l = json::array();
    for (int i = 0; i < box.dim(); ++i) l.push_back(box.length(i));
    return l;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    std::string kind;
    std::string box;
    double rho = 1.0;
    std::string lattice = "square";
    double spacing = 1.0;
    double jitter = 0.0;
    double radius = 0.5;
    std::optional<std::size_t> count;
    std::optional<double> phi;
    std::size_t max_attempts = 100000;
    bool csv = false;
};

int cmd_generate(const GenerateArgs& a, const Globals& g) {
    GeneratorSpec spec{parse_box(a.box), PoissonParams{}};
    if (a.kind == "poisson") {
        if (!(a.rho > 0.0)) throw UsageError("--rho must be positive");
        spec.params = PoissonParams{a.rho};
    } else if (a.kind == "lattice") {
        LatticeKind k{};
        try {
            k = parse_lattice_kind(a.lattice);
        } catch (const InvalidArgument& e) {
            throw UsageError(e.what());
        }
        spec.params = LatticeParams{k, a.spacing};
    } else if (a.kind == "perturbed") {
        spec.params = PerturbedLatticeParams{a.spacing, a.jitter};
    } else {
        if (a.count.has_value() == a.phi.has_value()) throw UsageError("rsa needs exactly one of --count or --phi");
        spec.params = RsaParams{a.radius, RsaTarget{a.count, a.phi}, a.max_attempts};
    }

    PointPattern pattern = [&] {
        try {
            return generate(spec, Seed{g.seed});
        } catch (const IncommensurateBox&) {
            throw;
        } catch (const InvalidArgument& e) {
            throw UsageError(e.what());
        }
    }();

    const fs::path path = output_path(g, a.kind + ".pat");
    save_pattern(pattern, path);
    std::cout << path.generic_string() << "\n";
    if (a.csv) {
        const fs::path csv = path.has_extension() ? fs::path(path).replace_extension(".csv") : with_suffix(path, ".csv");
        write_file(csv, format_pattern_csv(pattern));
        std::cout << csv.generic_string() << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- variance / field

struct WindowArgs {
    std::string input;
    std::optional<std::string> radii;
    std::optional<std::size_t> windows;
    std::optional<double> fit_min;
    std::optional<double> fit_max;
    std::optional<int> threshold;
    std::optional<double> pixel_size;
    bool periodic = false;
};

struct Resolved {
    std::vector<double> radii;
    std::size_t windows = 0;
};

ScalingFit fit_with_range(const VarianceCurve& curve, const WindowArgs& a) {
    const double lo = a.fit_min.value_or(curve.radii.front());
    const double hi = a.fit_max.value_or(curve.radii.back());
    return fit_scaling(curve, lo, hi);
}

json window_params(const WindowArgs& a, const Resolved& r, const std::string& mode, const ScalingFit& fit) {
    json p;
    p["input"] = fs::path(a.input).generic_string();
    p["mode"] = mode;
    p["radii_flag"] = a.radii ? json(*a.radii) : json(nullptr);
    p["radii_source"] = a.radii ? "flag" : "default";
    p["radii"] = r.radii;
    p["windows"] = r.windows;
    p["windows_source"] = a.windows ? "flag" : "default";
    p["fit_r_min"] = fit.r_min;
    p["fit_r_max"] = fit.r_max;
    p["fit_range_source"] = (a.fit_min || a.fit_max) ? "flag" : "default";
    return p;
}

int run_field(const WindowArgs& a, const Globals& g, const std::string& command) {
    const auto start = std::chrono::steady_clock::now();
    if (is_gray_image(a.input) && !a.threshold) throw UsageError("PGM input requires --threshold");
    const bool has_sidecar = fs::exists(a.input + ".hupa") || fs::exists(fs::path(a.input).replace_extension(".hupa"));
    BinaryField field = load_field(a.input, LoadFieldOptions{a.threshold, a.pixel_size});

    Resolved r;
    r.radii = a.radii ? parse_number_list(*a.radii, "--radii") : default_radii(field);
    r.windows = a.windows.value_or(kDefaultWindows2D);
    const VarianceCurve curve =
        fraction_variance_curve(field, r.radii, r.windows, Seed{g.seed}, resolve_threads(g.threads));
    const ScalingFit fit = fit_with_range(curve, a);
    const OrderClass order = classify(fit, 2, WindowMode::dark_fraction);

    const fs::path base = output_path(g, fs::path(a.input).stem().string() + ".field");
    const fs::path csv = with_suffix(base, ".csv");
    write_file(csv, format_curve_csv(curve));

    json report = report_head(command, g);
    json params = window_params(a, r, to_string(WindowMode::dark_fraction), fit);
    params["threshold"] = a.threshold ? json(*a.threshold) : json(nullptr);
    params["pixel_size"] = field.pixel_size();
    params["pixel_size_source"] = a.pixel_size ? "flag" : (has_sidecar ? "sidecar" : "default");
    params["box"] = box_json(field.box());
    params["pixels"] = {field.nx(), field.ny()};
    params["periodicity_asserted"] = a.periodic;
    report["parameters"] = params;
    report["inputs"] = json::array({file_entry(a.input, "field")});
    report["outputs"] = json::array({file_entry(csv, "curve_csv")});
    report["field"] = {{"dark_fraction", field.dark_fraction()}, {"dark_pixels", field.dark_count()}};
    report["curve"] = curve_json(curve);
    report["fit"] = fit_json(fit);
    report["order"] = {{"label", to_string(order.label)}, {"alpha", order.alpha}, {"dim", order.dim},
                       {"mode", to_string(order.mode)}};
    report["warnings"] = json::array();
    if (!a.periodic)
        report["warnings"].push_back("field loaded without a periodicity assertion; opposite edges are wrapped");
    const fs::path js = with_suffix(base, ".json");
    finish_report(report, g, start, js);
    std::cout << csv.generic_string() << "\n" << js.generic_string() << "\n";
    return 0;
}

int cmd_variance(const WindowArgs& a, const Globals& g) {
    if (!fs::exists(a.input)) throw IoError("input '" + a.input + "' does not exist");
    if (looks_like_image(a.input)) return run_field(a, g, "variance");
    if (a.threshold || a.pixel_size) throw UsageError("--threshold and --pixel-size apply to image input only");

    const auto start = std::chrono::steady_clock::now();
    const PointPattern pattern = load_pattern(a.input);
    Resolved r;
    r.radii = a.radii ? parse_number_list(*a.radii, "--radii") : default_radii(pattern);
    r.windows = a.windows.value_or(pattern.dim() == 2 ? kDefaultWindows2D : kDefaultWindows3D);
    const VarianceCurve curve =
        number_variance_curve(pattern, r.radii, r.windows, Seed{g.seed}, resolve_threads(g.threads));
    const ScalingFit fit = fit_with_range(curve, a);
    const OrderClass order = classify(fit, pattern.dim(), WindowMode::number_count);

    const fs::path base = output_path(g, fs::path(a.input).stem().string() + ".variance");
    const fs::path csv = with_suffix(base, ".csv");
    write_file(csv, format_curve_csv(curve));

    json report = report_head("variance", g);
    json params = window_params(a, r, to_string(WindowMode::number_count), fit);
    params["box"] = box_json(pattern.box());
    params["points"] = pattern.size();
    params["pattern_provenance"] = pattern.provenance();
    report["parameters"] = params;
    report["inputs"] = json::array({file_entry(a.input, "pattern")});
    report["outputs"] = json::array({file_entry(csv, "curve_csv")});
    report["curve"] = curve_json(curve);
    report["fit"] = fit_json(fit);
    report["order"] = {{"label", to_string(order.label)}, {"alpha", order.alpha}, {"dim", order.dim},
                       {"mode", to_string(order.mode)}};
    report["warnings"] = json::array();
    const fs::path js = with_suffix(base, ".json");
    finish_report(report, g, start, js);
    std::cout << csv.generic_string() << "\n" << js.generic_string() << "\n";
    return 0;
}

int cmd_field(const WindowArgs& a, const Globals& g) {
    if (!fs::exists(a.input)) throw IoError("input '" + a.input + "' does not exist");
    return run_field(a, g, "field");
}

// ---------------------------------------------------------------- tessellate

struct TessArgs {
    std::string input;
    std::string rule = "voronoi";
    std::optional<std::string> svg;
    std::optional<std::string> raster;
    std::size_t pixels = 512;
    double wall = 0.05;
    double scale = 20.0;
};

int cmd_tessellate(const TessArgs& a, const Globals& g) {
    const auto start = std::chrono::steady_clock::now();
    const PointPattern pattern = load_pattern(a.input);
    if (pattern.dim() != 2) throw InvalidArgument("tessellation needs a 2D pattern");

    const fs::path base = output_path(g, fs::path(a.input).stem().string() + "." + a.rule);
    const fs::path tess_path = with_suffix(base, ".tess");
    json report = report_head("tessellate", g);
    json params{{"input", fs::path(a.input).generic_string()}, {"rule", a.rule}, {"box", box_json(pattern.box())},
                {"points", pattern.size()}};
    json outputs = json::array();

    const Tessellation tess = voronoi(pattern);
    std::string svg_text;
    if (a.rule == "delaunay") {
        const Triangulation tri = delaunay(pattern);
        write_file(tess_path, format_triangulation(tri));
        double area_sum = 0.0;
        for (const Triangle& t : tri.triangles()) area_sum += t.area;
        report["triangulation"] = {{"vertices", tri.vertex_count()},
                                   {"edges", tri.edge_count()},
                                   {"faces", tri.face_count()},
                                   {"euler_characteristic", tri.euler_characteristic()},
                                   {"area_sum", area_sum}};
        if (a.svg) svg_text = render_delaunay_svg(tri, a.scale);
    } else {
        write_file(tess_path, format_tessellation(tess));
        if (a.svg) svg_text = render_voronoi_svg(tess, a.scale);
    }
    outputs.push_back(file_entry(tess_path, "tessellation"));
    if (a.svg) {
        params["svg_scale"] = a.scale;
        write_file(*a.svg, svg_text);
        outputs.push_back(file_entry(*a.svg, "svg"));
    }
    if (a.raster) {
        params["raster_pixels"] = a.pixels;
        params["raster_wall_halfwidth"] = a.wall;
        save_field(rasterize_tessellation(tess, a.pixels, a.wall), *a.raster);
        outputs.push_back(file_entry(*a.raster, "raster_pbm"));
    }

    report["parameters"] = params;
    report["inputs"] = json::array({file_entry(a.input, "pattern")});
    report["outputs"] = outputs;
    report["cell_stats"] = cell_stats_json(cell_statistics(tess));
    report["warnings"] = json::array();
    const fs::path js = with_suffix(base, ".json");
    finish_report(report, g, start, js);
    std::cout << tess_path.generic_string() << "\n" << js.generic_string() << "\n";
    if (a.svg) std::cout << *a.svg << "\n";
    if (a.raster) std::cout << *a.raster << "\n";
    return 0;
}

// ---------------------------------------------------------------- render

struct RenderArgs {
    std::string input;
    double scale = 10.0;
    std::optional<double> point_radius;
};

int cmd_render(const RenderArgs& a, const Globals& g) {
    const PointPattern pattern = load_pattern(a.input);
    if (pattern.dim() != 2) throw InvalidArgument("render needs a 2D pattern");
    if (!(a.scale > 0.0)) throw UsageError("--scale must be positive");
    double r = 0.1;
    if (a.point_radius) r = *a.point_radius;
    else if (pattern.hard_radius()) r = *pattern.hard_radius();
    else if (!pattern.empty()) r = 0.15 / std::sqrt(pattern.intensity());
    const fs::path path = output_path(g, fs::path(a.input).stem().string() + ".svg");
    write_file(path, render_pattern_svg(pattern, a.scale, r));
    std::cout << path.generic_string() << "\n";
    return 0;
}

void add_window_flags(CLI::App* sub, WindowArgs& a) {
    sub->add_option("input", a.input, "Pattern file or PBM/PGM image")->required();
    sub->add_option("--radii", a.radii, "Comma-separated window radii (default: log-spaced sweep)");
    sub->add_option("--windows", a.windows, "Window placements per radius")->check(CLI::Range(2ul, 100000000ul));
    sub->add_option("--fit-min", a.fit_min, "Smallest radius used in the fit");
    sub->add_option("--fit-max", a.fit_max, "Largest radius used in the fit");
    sub->add_option("--threshold", a.threshold, "Gray values <= threshold are dark (PGM input)");
    sub->add_option("--pixel-size", a.pixel_size, "Model length of one pixel edge");
    sub->add_flag("--periodic", a.periodic, "Assert the image is periodic");
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"hupa - order/disorder analysis of point patterns and two-phase images"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (default: HUPA_THREADS or 1)");
    app.add_option("--out-dir", g.out_dir, "Directory for outputs");
    app.add_option("-o,--output", g.out, "Output path (or base name for multi-file outputs)");
    app.add_flag("--record-timing", g.record_timing, "Add wall-clock duration to JSON reports");

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "Generate a point pattern");
    gen->add_option("generator", ga.kind, "poisson | lattice | perturbed | rsa")
        ->required()
        ->check(CLI::IsMember({"poisson", "lattice", "perturbed", "rsa"}));
    gen->add_option("--box", ga.box, "Box lengths, e.g. 64x64 or 10x10x10")->required();
    gen->add_option("--rho", ga.rho, "Poisson intensity");
    gen->add_option("--kind", ga.lattice, "Lattice kind: square | triangular | cubic");
    gen->add_option("--spacing", ga.spacing, "Lattice spacing");
    gen->add_option("--jitter,--delta", ga.jitter, "Perturbation half-width");
    gen->add_option("--radius", ga.radius, "RSA hard-core radius");
    gen->add_option("--count", ga.count, "RSA target count");
    gen->add_option("--phi", ga.phi, "RSA target packing fraction");
    gen->add_option("--max-attempts", ga.max_attempts, "RSA consecutive rejections before giving up");
    gen->add_flag("--csv", ga.csv, "Also write x,y[,z] CSV next to the pattern file");

    WindowArgs va;
    auto* var = app.add_subcommand("variance", "Window-variance curve, fit and class");
    add_window_flags(var, va);

    WindowArgs fa;
    auto* fld = app.add_subcommand("field", "Dark-fraction variance of a PBM/PGM image");
    add_window_flags(fld, fa);

    TessArgs ta;
    auto* tes = app.add_subcommand("tessellate", "Periodic Voronoi or Delaunay tessellation");
    tes->add_option("input", ta.input, "Pattern file")->required();
    tes->add_option("--rule", ta.rule, "voronoi | delaunay")->check(CLI::IsMember({"voronoi", "delaunay"}));
    tes->add_option("--svg", ta.svg, "Write an SVG drawing");
    tes->add_option("--raster", ta.raster, "Write Voronoi walls as a PBM field");
    tes->add_option("--pixels", ta.pixels, "Raster pixels along x");
    tes->add_option("--wall", ta.wall, "Raster wall half-width (model units)");
    tes->add_option("--scale", ta.scale, "SVG pixels per model unit");

    RenderArgs ra;
    auto* ren = app.add_subcommand("render", "Draw a pattern as SVG");
    ren->add_option("input", ra.input, "Pattern file")->required();
    ren->add_option("--scale", ra.scale, "SVG pixels per model unit");
    ren->add_option("--point-radius", ra.point_radius, "Circle radius in model units");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (*gen) return cmd_generate(ga, g);
        if (*var) return cmd_variance(va, g);
        if (*fld) return cmd_field(fa, g);
        if (*tes) return cmd_tessellate(ta, g);
        if (*ren) return cmd_render(ra, g);
    } catch (const UsageError& e) {
        std::cerr << "hupa: usage error: " << e.what() << "\n";
        return 2;
    } catch (const IncommensurateBox& e) {
        std::cerr << "hupa: usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "hupa: error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace hupa::cli

int main(int argc, char** argv) { return hupa::cli::run(argc, argv); }
