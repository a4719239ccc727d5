#include "wradon/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace wradon {

namespace {

static_assert(std::endian::native == std::endian::little, "payload I/O assumes a little-endian host");

void write_file(const std::string& path, const nlohmann::json& header, const std::vector<Complex>& values)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path + " for writing");
    const std::string line = header.dump();
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.put('\n');
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(Complex)));
    if (!out) throw DataError("write failed: " + path);
}

nlohmann::json read_file(const std::string& path, std::vector<Complex>& values, std::size_t (*expected)(const nlohmann::json&))
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": missing header line");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": malformed header: " + e.what());
    }
    std::size_t count = 0;
    try {
        count = expected(header);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": incomplete header: " + e.what());
    }
    values.resize(count);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(Complex)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(Complex))
        throw DataError(path + ": payload shorter than the header declares");
    if (in.peek() != std::char_traits<char>::eof()) throw DataError(path + ": trailing bytes after payload");
    return header;
}

nlohmann::json strip(nlohmann::json header, std::initializer_list<const char*> keys)
{
    for (const char* k : keys) header.erase(k);
    return header;
}

nlohmann::json merged(const nlohmann::json& extra, nlohmann::json header)
{
    for (auto it = extra.begin(); it != extra.end(); ++it)
        if (!header.contains(it.key())) header[it.key()] = it.value();
    return header;
}

}  // namespace

// ---------------------------------------------------------------------------
// Fields

void write_field(const std::string& path, const ScalarField& f, const nlohmann::json& extra)
{
    const GridSpec& g = f.grid;
    std::vector<std::size_t> shape(g.shape.begin(), g.shape.begin() + g.dim);
    std::vector<double> spacing(g.spacing.begin(), g.spacing.begin() + g.dim);
    std::vector<double> origin(g.origin.begin(), g.origin.begin() + g.dim);
    write_file(path,
               merged(extra, {{"dim", g.dim}, {"shape", shape}, {"spacing", spacing}, {"origin", origin},
                              {"dtype", "c128"}}),
               f.values);
}

FieldFile read_field(const std::string& path)
{
    std::vector<Complex> values;
    const nlohmann::json h = read_file(path, values, [](const nlohmann::json& j) {
        std::size_t n = 1;
        for (const auto& s : j.at("shape")) n *= s.get<std::size_t>();
        return n;
    });
    if (h.value("dtype", "") != "c128") throw DataError(path + ": dtype must be c128");
    GridSpec g;
    g.dim = h.at("dim").get<int>();
    if (g.dim != 2 && g.dim != 3) throw DataError(path + ": dim must be 2 or 3");
    for (int a = 0; a < g.dim; ++a) {
        g.shape[a] = h.at("shape").at(a).get<std::size_t>();
        g.spacing[a] = h.at("spacing").at(a).get<double>();
        g.origin[a] = h.at("origin").at(a).get<double>();
    }
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw DataError(path + ": " + e.what());
    }
    FieldFile out;
    out.field.grid = g;
    out.field.values = std::move(values);
    out.extra = strip(h, {"dim", "shape", "spacing", "origin", "dtype"});
    return out;
}

// ---------------------------------------------------------------------------
// Sinograms

nlohmann::json sphere_to_json(const SphereGrid& s)
{
    if (s.kind == SphereGrid::Kind::circle) return {{"kind", "circle"}, {"M", s.azimuth_count}};
    return {{"kind", "gauss_legendre"}, {"L", s.polar_count}, {"M", s.azimuth_count}, {"pole", s.pole}};
}

SphereGrid sphere_from_json(const nlohmann::json& j)
{
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "circle") return make_circle_grid(j.at("M").get<std::size_t>());
    if (kind == "gauss_legendre")
        return make_sphere_grid(j.at("L").get<std::size_t>(), j.at("M").get<std::size_t>(), j.at("pole").get<Vec3>());
    throw DataError("unknown sphere grid kind: " + kind);
}

void write_sinogram(const std::string& path, const Sinogram& g, const nlohmann::json& extra)
{
    nlohmann::json h{{"s_count", g.s_count}, {"s_min", g.s_min()}, {"s_step", g.s_step},
                     {"sphere", sphere_to_json(g.directions)}, {"dtype", "c128"}};
    if (!g.meta.empty()) h["meta"] = g.meta;
    write_file(path, merged(extra, h), g.values);
}

SinogramFile read_sinogram(const std::string& path)
{
    std::vector<Complex> values;
    const nlohmann::json h = read_file(path, values, [](const nlohmann::json& j) {
        const nlohmann::json& s = j.at("sphere");
        const std::size_t dirs = s.at("kind") == "circle" ? s.at("M").get<std::size_t>()
                                                          : s.at("L").get<std::size_t>() * s.at("M").get<std::size_t>();
        return dirs * j.at("s_count").get<std::size_t>();
    });
    SinogramFile out;
    Sinogram& g = out.sinogram;
    try {
        g.directions = sphere_from_json(h.at("sphere"));
    } catch (const std::invalid_argument& e) {
        throw DataError(path + ": " + e.what());
    }
    g.s_count = h.at("s_count").get<std::size_t>();
    g.s_step = h.at("s_step").get<double>();
    if (g.s_count < 2 || !(g.s_step > 0.0)) throw DataError(path + ": invalid offset grid");
    if (std::abs(h.at("s_min").get<double>() + g.s_max()) > 1e-12 * g.s_max())
        throw DataError(path + ": offset grid must be symmetric about 0");
    g.values = std::move(values);
    if (h.contains("meta")) g.meta = h.at("meta");
    out.extra = strip(h, {"s_count", "s_min", "s_step", "sphere", "dtype", "meta"});
    return out;
}

// ---------------------------------------------------------------------------
// Rays

void write_rays(const std::string& path, const RayData& r, const nlohmann::json& extra)
{
    const RayLayout& l = r.layout;
    nlohmann::json h{{"eta", l.eta},
                     {"slices", {{"count", l.slice_count}, {"step", l.slice_step}}},
                     {"alpha_count", l.alpha_count},
                     {"offsets", {{"count", l.offset_count}, {"step", l.offset_step}}},
                     {"dtype", "c128"}};
    if (r.noisy) {
        h["sigma"] = r.noise_sigma;
        h["seed"] = r.noise_seed;
    }
    write_file(path, merged(extra, h), r.values);
}

RayFile read_rays(const std::string& path)
{
    std::vector<Complex> values;
    const nlohmann::json h = read_file(path, values, [](const nlohmann::json& j) {
        return j.at("slices").at("count").get<std::size_t>() * j.at("alpha_count").get<std::size_t>() *
               j.at("offsets").at("count").get<std::size_t>();
    });
    RayFile out;
    RayLayout& l = out.rays.layout;
    l.eta = h.at("eta").get<Vec3>();
    l.slice_count = h.at("slices").at("count").get<std::size_t>();
    l.slice_step = h.at("slices").at("step").get<double>();
    l.alpha_count = h.at("alpha_count").get<std::size_t>();
    l.offset_count = h.at("offsets").at("count").get<std::size_t>();
    l.offset_step = h.at("offsets").at("step").get<double>();
    try {
        l.validate();
    } catch (const std::invalid_argument& e) {
        throw DataError(path + ": " + e.what());
    }
    out.rays.values = std::move(values);
    if (h.contains("sigma")) {
        out.rays.noisy = true;
        out.rays.noise_sigma = h.at("sigma").get<double>();
        out.rays.noise_seed = h.at("seed").get<std::uint64_t>();
    }
    out.extra = strip(h, {"eta", "slices", "alpha_count", "offsets", "dtype", "sigma", "seed"});
    return out;
}

// ---------------------------------------------------------------------------
// Exports

std::pair<double, double> write_pgm(const std::string& path, const ScalarField& f)
{
    const GridSpec& g = f.grid;
    const std::size_t k = g.dim == 3 ? g.shape[2] / 2 : 0;
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < g.shape[0]; ++i)
        for (std::size_t j = 0; j < g.shape[1]; ++j) {
            const double v = f.values[g.index(i, j, k)].real();
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path + " for writing");
    // rows run along the second axis, top row = largest x2
    out << "P5\n" << g.shape[0] << ' ' << g.shape[1] << "\n255\n";
    const double range = hi > lo ? hi - lo : 1.0;
    for (std::size_t jr = g.shape[1]; jr-- > 0;)
        for (std::size_t i = 0; i < g.shape[0]; ++i) {
            const double v = (f.values[g.index(i, jr, k)].real() - lo) / range;
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0))));
        }
    if (!out) throw DataError("write failed: " + path);
    return {lo, hi};
}

void write_profiles_csv(const std::string& path, const ScalarField& f)
{
    const GridSpec& g = f.grid;
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out.precision(17);
    out << "axis,coordinate,re,im\n";
    const std::array<std::size_t, 3> mid{g.shape[0] / 2, g.shape[1] / 2, g.shape[2] / 2};
    for (int a = 0; a < g.dim; ++a)
        for (std::size_t q = 0; q < g.shape[a]; ++q) {
            std::array<std::size_t, 3> ix = mid;
            ix[a] = q;
            const Complex v = f.values[g.index(ix[0], ix[1], ix[2])];
            out << a << ',' << g.origin[a] + static_cast<double>(q) * g.spacing[a] << ',' << v.real() << ','
                << v.imag() << '\n';
        }
}

}  // namespace wradon
