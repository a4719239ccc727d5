#include "wradon/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

#include "wradon/analysis.hpp"
#include "wradon/inversion.hpp"
#include "wradon/io.hpp"

namespace wradon {

namespace {

using nlohmann::json;

struct Options {
    int dim = 2;
    std::string grid = "128";
    double spacing = 0.0;  // <= 0: spread the grid over [-1, 1]
    std::string angles;
    std::size_t s_count = 0;
    std::string weight = R"({"kind":"constant"})";
    std::string phantom = R"({"kind":"ball","radius":0.6})";
    std::size_t pad = 4;
    std::string window = "none";
    std::uint64_t seed = 1;
    double sigma = 0.0;
    std::string eta = "0,0,1";
    double polar_cap_tol = kDefaultPolarCapTol;
    double tol = kDefaultSymmetryTol;
    std::size_t trials = 1000;
    std::string in, ref, out;
    unsigned threads = 0;
};

std::vector<double> split_numbers(const std::string& text, const char* what)
{
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw std::invalid_argument(std::string("malformed ") + what + ": " + text);
        v.push_back(x);
    }
    if (v.empty()) throw std::invalid_argument(std::string("empty ") + what);
    return v;
}

std::size_t as_count(double x, const char* what)
{
    if (!(x >= 1.0) || x != std::floor(x)) throw std::invalid_argument(std::string(what) + " must be a positive integer");
    return static_cast<std::size_t>(x);
}

GridSpec grid_from(const Options& o)
{
    if (o.dim != 2 && o.dim != 3) throw std::invalid_argument("--dim must be 2 or 3");
    const std::vector<double> n = split_numbers(o.grid, "--grid");
    if (n.size() != 1 && n.size() != static_cast<std::size_t>(o.dim))
        throw std::invalid_argument("--grid takes one count or one per axis");
    std::array<std::size_t, 3> shape{1, 1, 1};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};
    for (int a = 0; a < o.dim; ++a) {
        shape[a] = as_count(n[n.size() == 1 ? 0 : a], "--grid");
        if (shape[a] < 2) throw std::invalid_argument("--grid needs at least 2 nodes per axis");
    }
    const std::size_t longest = *std::max_element(shape.begin(), shape.begin() + o.dim);
    const double h = o.spacing > 0.0 ? o.spacing : 2.0 / static_cast<double>(longest - 1);
    for (int a = 0; a < o.dim; ++a) spacing[a] = h;
    return GridSpec::centered(o.dim, shape, spacing);
}

SphereGrid sphere_from(int dim, const std::string& angles, const Vec3& pole = {0.0, 0.0, 1.0})
{
    if (dim == 2) {
        const std::vector<double> a = split_numbers(angles.empty() ? "180" : angles, "--angles");
        return make_circle_grid(as_count(a.back(), "--angles"));
    }
    const std::vector<double> a = split_numbers(angles.empty() ? "16,32" : angles, "--angles");
    if (a.size() != 2) throw std::invalid_argument("--angles takes L,M in 3D");
    return make_sphere_grid(as_count(a[0], "--angles"), as_count(a[1], "--angles"), pole);
}

Vec3 vec_from(const std::string& text, const char* what)
{
    const std::vector<double> v = split_numbers(text, what);
    if (v.size() != 3) throw std::invalid_argument(std::string(what) + " takes x,y,z");
    const Vec3 x{v[0], v[1], v[2]};
    if (!(norm(x) > 0.0)) throw std::invalid_argument(std::string(what) + " must be nonzero");
    return normalized(x);
}

json parse_json(const std::string& text, const char* what)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed ") + what + ": " + e.what());
    }
}

Weight weight_from(const Options& o)
{
    try {
        return weight_from_json(parse_json(o.weight, "--weight"),
                                [](const std::string& path) { return read_field(path).field; });
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad --weight: ") + e.what());
    }
}

PhantomSpec phantom_from(const json& j)
{
    const std::string kind = j.at("kind").get<std::string>();
    auto center = [&](const json& x) { return x.contains("center") ? x.at("center").get<Vec3>() : Vec3{0.0, 0.0, 0.0}; };
    if (kind == "ball") {
        BallPhantom b;
        b.center = center(j);
        b.radius = j.value("radius", 0.6);
        b.amplitude = j.value("amplitude", 1.0);
        b.edge = j.value("edge", -1.0);
        b.raw = j.value("raw", false);
        return b;
    }
    if (kind == "gaussian") {
        GaussianPhantom g;
        g.center = center(j);
        g.sigma = j.value("sigma", 0.12);
        g.amplitude = j.value("amplitude", 1.0);
        return g;
    }
    if (kind == "ellipsoids") {
        EllipsoidsPhantom e;
        e.edge = j.value("edge", -1.0);
        e.raw = j.value("raw", false);
        for (const json& it : j.at("items")) {
            Ellipsoid el;
            el.center = center(it);
            el.semi_axes = it.at("semi_axes").get<Vec3>();
            el.angle = it.value("angle", 0.0);
            el.amplitude = it.value("amplitude", 1.0);
            e.items.push_back(el);
        }
        return e;
    }
    throw std::invalid_argument("unknown phantom kind: " + kind);
}

SpectralPlan plan_from(const Options& o, int dim)
{
    SpectralPlan p;
    p.pad_factor = o.pad;
    p.n_dim = dim;
    if (o.window == "cosine_taper")
        p.window = SpectralPlan::Window::cosine_taper;
    else if (o.window != "none")
        throw std::invalid_argument("--window must be none or cosine_taper");
    p.validate();
    return p;
}

void require(const std::string& value, const char* flag)
{
    if (value.empty()) throw std::invalid_argument(std::string(flag) + " is required");
}

std::string with_suffix(const std::string& base, const std::string& suffix)
{
    const auto dot = base.find_last_of('.');
    const auto slash = base.find_last_of('/');
    const std::string stem = dot != std::string::npos && (slash == std::string::npos || dot > slash) ? base.substr(0, dot) : base;
    return stem + suffix;
}

void write_json(const std::string& path, const json& j)
{
    std::ofstream f(path);
    if (!f) throw DataError("cannot open " + path + " for writing");
    f << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Commands

int cmd_phantom(const Options& o, const json& config, std::ostream& out)
{
    require(o.out, "--out");
    const GridSpec grid = grid_from(o);
    PhantomSpec spec;
    try {
        spec = phantom_from(parse_json(o.phantom, "--phantom"));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad --phantom: ") + e.what());
    }
    const ScalarField f = make_phantom(grid, spec);
    write_field(o.out, f, {{"config", config}});
    out << "wrote " << o.out << " (" << grid.size() << " nodes)\n";
    return exit_ok;
}

int cmd_forward(const Options& o, const json& config, std::ostream& out)
{
    require(o.in, "--in");
    require(o.out, "--out");
    const ScalarField f = read_field(o.in).field;
    const Weight w = weight_from(o);
    const SphereGrid sphere = sphere_from(f.dim(), o.angles);
    const std::size_t s_count = o.s_count ? o.s_count : 2 * std::max(f.grid.shape[0], f.grid.shape[1]) + 1;
    // offsets reach the grid corners so the data can be backprojected onto the same grid
    const SinogramLayout layout{s_count, f.grid.half_diagonal() * (1.0 + 1e-9)};
    const Sinogram g = radon_w(f, w, sphere, layout, {0.0, o.threads});
    write_sinogram(o.out, g, {{"config", config}});
    out << "wrote " << o.out << " (" << sphere.size() << " directions x " << s_count << " offsets)\n";
    return exit_ok;
}

int cmd_rays(const Options& o, const json& config, std::ostream& out)
{
    require(o.in, "--in");
    require(o.out, "--out");
    const ScalarField f = read_field(o.in).field;
    if (f.dim() != 3) throw std::invalid_argument("rays needs a 3D field");
    const Weight w = weight_from(o);
    RayLayout rl;
    rl.eta = vec_from(o.eta, "--eta");
    const double reach = f.grid.half_diagonal();
    const std::size_t count = o.s_count ? o.s_count : 2 * f.grid.shape[0] + 1;
    rl.slice_count = rl.offset_count = count;
    rl.slice_step = rl.offset_step = 2.0 * reach / static_cast<double>(count - 1) * (1.0 + 1e-9);
    rl.alpha_count = o.angles.empty() ? 32 : as_count(split_numbers(o.angles, "--angles").back(), "--angles");
    RayData rays = ray_transform(f, w, rl, {0.0, o.threads});
    if (o.sigma > 0.0) rays = add_noise(rays, o.sigma, o.seed);
    write_rays(o.out, rays, {{"config", config}});
    out << "wrote " << o.out << " (" << rl.size() << " rays)\n";
    return exit_ok;
}

SinogramLayout reduce_layout(const RayLayout& rl, std::size_t s_count)
{
    const double reach = 0.5 * static_cast<double>(rl.offset_count - 1) * rl.offset_step;
    return {s_count ? s_count : rl.offset_count, reach};
}

int cmd_reduce(const Options& o, const json& config, std::ostream& out)
{
    require(o.in, "--in");
    require(o.out, "--out");
    const RayData rays = read_rays(o.in).rays;
    const SphereGrid sphere = sphere_from(3, o.angles, rays.layout.eta);
    ReductionOptions ro;
    ro.polar_cap_tol = o.polar_cap_tol;
    ro.threads = o.threads;
    const Reduction red = reduce_rays_to_planes(rays, sphere, reduce_layout(rays.layout, o.s_count), ro);
    write_sinogram(o.out, red.sinogram, {{"config", config}});
    const auto missing = std::count(red.missing.begin(), red.missing.end(), std::uint8_t{1});
    out << "wrote " << o.out << " (" << missing << " of " << sphere.size() << " directions in the polar cap)\n";
    return exit_ok;
}

int cmd_invert(const Options& o, const json& config, std::ostream& out)
{
    require(o.in, "--in");
    require(o.out, "--out");
    const Sinogram g = read_sinogram(o.in).sinogram;
    Options go = o;
    go.dim = g.directions.ambient_dim();
    const GridSpec grid = grid_from(go);
    const Weight w = weight_from(o);
    const ScalarField w0 = w0_field(w, grid, g.directions);
    const Reconstruction rec = chang_invert(g, w0, go.dim, plan_from(o, go.dim));

    const std::string pgm = with_suffix(o.out, ".pgm");
    const std::string csv = with_suffix(o.out, "_profiles.csv");
    const auto [lo, hi] = write_pgm(pgm, rec.f_appr);
    json meta = rec.metadata;
    meta["pgm"] = {{"path", pgm}, {"min", lo}, {"max", hi}, {"scaling", "linear"}, {"part", "real"}};
    meta["profiles"] = csv;
    write_profiles_csv(csv, rec.f_appr);
    write_field(o.out, rec.f_appr, {{"config", config}, {"reconstruction", meta}});
    out << "wrote " << o.out << ", " << pgm << ", " << csv << '\n';
    return exit_ok;
}

int cmd_check_symmetry(const Options& o, std::ostream& out)
{
    const GridSpec grid = grid_from(o);
    const Weight w = weight_from(o);
    const SymmetryReport r = check_chang_symmetry(w, grid, sphere_from(o.dim, o.angles), o.tol);
    const json j = r.to_json();
    out << j.dump(2) << '\n';
    if (!o.out.empty()) write_json(o.out, j);
    if (r.min_abs_w0 <= kDefaultW0Floor) throw DataError("w0 vanishes on the grid (min |w0| " + std::to_string(r.min_abs_w0) + ")");
    return r.holds ? exit_ok : exit_condition_fails;
}

int cmd_compare(const Options& o, const json& config, std::ostream& out)
{
    require(o.in, "--in");
    require(o.ref, "--ref");
    const ScalarField rec = read_field(o.in).field;
    const ScalarField ref = read_field(o.ref).field;
    if (!(rec.grid == ref.grid)) throw DataError("--in and --ref are on different grids");
    json j = exactness_residual(ref, rec).to_json();
    j["config"] = config;
    out << j.dump(2) << '\n';
    if (!o.out.empty()) write_json(o.out, j);
    return exit_ok;
}

int cmd_report(const Options& o, const json& config, std::ostream& out)
{
    require(o.in, "--in");
    const RayData clean = read_rays(o.in).rays;
    if (!(o.sigma > 0.0)) throw std::invalid_argument("--sigma must be positive");
    const SphereGrid sphere = sphere_from(3, o.angles, clean.layout.eta);
    ReductionOptions ro;
    ro.polar_cap_tol = o.polar_cap_tol;
    ro.threads = o.threads;
    const NoiseReport r =
        run_noise_experiment(clean, sphere, reduce_layout(clean.layout, o.s_count), o.sigma, o.trials, o.seed, {}, ro);
    json j = r.to_json();
    j["config"] = config;
    out << j.dump(2) << '\n';
    if (!o.out.empty()) write_json(o.out, j);
    return exit_ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Weighted Radon transforms: projection, Chang-type inversion, symmetry checks"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    Options o;

    auto add_grid = [&](CLI::App* c) {
        c->add_option("--dim", o.dim, "Spatial dimension (2 or 3)");
        c->add_option("--grid", o.grid, "Nodes per axis: N or N,N[,N]");
        c->add_option("--spacing", o.spacing, "Grid step (default: grid spans [-1, 1])");
    };
    auto add_threads = [&](CLI::App* c) { c->add_option("--threads", o.threads, "Worker threads (0 = all cores)"); };

    CLI::App* phantom = app.add_subcommand("phantom", "Write a phantom field");
    add_grid(phantom);
    phantom->add_option("--phantom", o.phantom, "Phantom JSON: {kind: ball|gaussian|ellipsoids, ...}");
    phantom->add_option("--out", o.out, "Output field file")->required();

    CLI::App* forward = app.add_subcommand("forward", "Weighted Radon transform of a field");
    forward->add_option("--in", o.in, "Input field file")->required();
    forward->add_option("--weight", o.weight, "Weight JSON");
    forward->add_option("--angles", o.angles, "M (2D) or L,M (3D)");
    forward->add_option("--s-count", o.s_count, "Offsets per direction");
    forward->add_option("--out", o.out, "Output sinogram file")->required();
    add_threads(forward);

    CLI::App* rays = app.add_subcommand("rays", "Weighted ray transform parallel to a plane");
    rays->add_option("--in", o.in, "Input 3D field file")->required();
    rays->add_option("--weight", o.weight, "Ray weight JSON");
    rays->add_option("--eta", o.eta, "Plane normal x,y,z");
    rays->add_option("--angles", o.angles, "In-plane ray directions M");
    rays->add_option("--s-count", o.s_count, "Slices and offsets per direction");
    rays->add_option("--sigma", o.sigma, "Gaussian noise level");
    rays->add_option("--seed", o.seed, "Noise seed");
    rays->add_option("--out", o.out, "Output ray file")->required();
    add_threads(rays);

    CLI::App* reduce = app.add_subcommand("reduce", "Average rays into plane integrals");
    reduce->add_option("--in", o.in, "Input ray file")->required();
    reduce->add_option("--angles", o.angles, "L,M about eta");
    reduce->add_option("--s-count", o.s_count, "Offsets per direction");
    reduce->add_option("--polar-cap-tol", o.polar_cap_tol, "Exclude |eta x theta| below this");
    reduce->add_option("--out", o.out, "Output sinogram file")->required();
    add_threads(reduce);

    CLI::App* invert = app.add_subcommand("invert", "Chang-type reconstruction");
    invert->add_option("--in", o.in, "Input sinogram file")->required();
    invert->add_option("--grid", o.grid, "Nodes per axis: N or N,N[,N]");
    invert->add_option("--spacing", o.spacing, "Grid step (default: grid spans [-1, 1])");
    invert->add_option("--weight", o.weight, "Weight JSON used for w0");
    invert->add_option("--pad", o.pad, "Zero-padding factor");
    invert->add_option("--window", o.window, "none or cosine_taper");
    invert->add_option("--out", o.out, "Output field file (PGM and CSV written alongside)")->required();

    CLI::App* check = app.add_subcommand("check-symmetry", "Test W_s = w0; exit 0 iff it holds");
    add_grid(check);
    check->add_option("--angles", o.angles, "M (2D) or L,M (3D)");
    check->add_option("--weight", o.weight, "Weight JSON");
    check->add_option("--tol", o.tol, "Tolerance on max |W_s - w0|");
    check->add_option("--out", o.out, "Optional JSON report");

    CLI::App* compare = app.add_subcommand("compare", "Residual metrics of a reconstruction");
    compare->add_option("--in", o.in, "Reconstruction field file")->required();
    compare->add_option("--ref", o.ref, "Reference field file")->required();
    compare->add_option("--out", o.out, "Optional JSON report");

    CLI::App* report = app.add_subcommand("report", "Monte-Carlo noise reduction of the ray averaging");
    report->add_option("--in", o.in, "Clean ray file")->required();
    report->add_option("--angles", o.angles, "L,M about eta");
    report->add_option("--s-count", o.s_count, "Offsets per direction");
    report->add_option("--sigma", o.sigma, "Gaussian noise level")->required();
    report->add_option("--seed", o.seed, "Root seed");
    report->add_option("--trials", o.trials, "Number of noise draws");
    report->add_option("--polar-cap-tol", o.polar_cap_tol, "Exclude |eta x theta| below this");
    report->add_option("--out", o.out, "Optional JSON report");
    add_threads(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    set_default_threads(o.threads);
    CLI::App* cmd = app.get_subcommands().front();
    json config = json::object();
    config["command"] = cmd->get_name();
    for (const CLI::Option* opt : cmd->get_options()) {
        if (opt->get_name() == "--help") continue;
        config[opt->get_name().substr(2)] = opt->empty() ? opt->get_default_str() : opt->as<std::string>();
    }

    try {
        const std::string name = cmd->get_name();
        if (name == "phantom") return cmd_phantom(o, config, out);
        if (name == "forward") return cmd_forward(o, config, out);
        if (name == "rays") return cmd_rays(o, config, out);
        if (name == "reduce") return cmd_reduce(o, config, out);
        if (name == "invert") return cmd_invert(o, config, out);
        if (name == "check-symmetry") return cmd_check_symmetry(o, out);
        if (name == "compare") return cmd_compare(o, config, out);
        if (name == "report") return cmd_report(o, config, out);
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "data error: " << e.what() << '\n';
        return exit_data;
    }
    return exit_usage;
}

}  // namespace wradon
