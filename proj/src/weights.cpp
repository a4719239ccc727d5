#include "wradon/weights.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace wradon {

double Profile::operator()(const Vec3& x) const
{
    if (type == Type::one) return 1.0;
    const Vec3 d = x - center;
    return std::exp(-dot(d, d) / (2.0 * sigma * sigma));
}

Weight::Weight(Kind kind, Evaluator eval, double bound, nlohmann::json description)
    : kind_(kind), eval_(std::move(eval)), bound_(bound), description_(std::move(description))
{
}

Weight Weight::constant(Complex c)
{
    return Weight(Kind::constant, [c](const Vec3&, const Vec3&) { return c; }, std::abs(c),
                  {{"kind", "constant"}, {"value", {c.real(), c.imag()}}});
}

namespace {

nlohmann::json profile_json(const Profile& p)
{
    if (p.type == Profile::Type::one) return {{"type", "one"}};
    return {{"type", "gaussian"}, {"center", p.center}, {"sigma", p.sigma}};
}

Profile profile_from_json(const nlohmann::json& j)
{
    Profile p;
    if (j.is_null()) return p;
    const std::string type = j.value("type", "one");
    if (type == "one") return p;
    if (type != "gaussian") throw std::invalid_argument("unknown profile type: " + type);
    p.type = Profile::Type::gaussian;
    if (j.contains("center")) {
        const auto c = j.at("center").get<std::vector<double>>();
        for (std::size_t a = 0; a < std::min<std::size_t>(3, c.size()); ++a) p.center[a] = c[a];
    }
    p.sigma = j.value("sigma", 1.0);
    if (!(p.sigma > 0.0)) throw std::invalid_argument("profile sigma must be positive");
    return p;
}

Complex complex_from_json(const nlohmann::json& j)
{
    if (j.is_number()) return {j.get<double>(), 0.0};
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 2) throw std::invalid_argument("complex value must be a number or [re, im]");
    return {v[0], v[1]};
}

Vec3 vec_from_json(const nlohmann::json& j)
{
    Vec3 out{0.0, 0.0, 0.0};
    const auto v = j.get<std::vector<double>>();
    if (v.size() > 3) throw std::invalid_argument("vector has more than 3 components");
    for (std::size_t a = 0; a < v.size(); ++a) out[a] = v[a];
    return out;
}

}  // namespace

Weight Weight::polynomial(Complex c0, const Vec3& linear, const std::array<Vec3, 3>& quadratic, Profile profile)
{
    double coef = 0.0;
    for (int a = 0; a < 3; ++a) {
        coef += std::abs(linear[a]);
        for (int b = 0; b < 3; ++b) coef += std::abs(quadratic[a][b]);
    }
    auto eval = [c0, linear, quadratic, profile](const Vec3& x, const Vec3& t) {
        double q = 0.0;
        for (int a = 0; a < 3; ++a) q += t[a] * dot(quadratic[a], t);
        return c0 + profile(x) * (dot(linear, t) + q);
    };
    nlohmann::json desc{{"kind", "polynomial"},
                        {"c0", {c0.real(), c0.imag()}},
                        {"linear", linear},
                        {"quadratic", quadratic},
                        {"profile", profile_json(profile)}};
    return Weight(Kind::polynomial_in_theta, eval, std::abs(c0) + profile.sup() * coef, desc);
}

Weight Weight::one_sided(Complex c0, double amp, const Vec3& axis, Profile profile)
{
    auto eval = [c0, amp, axis, profile](const Vec3& x, const Vec3& t) {
        return c0 + amp * profile(x) * std::max(dot(t, axis), 0.0);
    };
    nlohmann::json desc{{"kind", "one_sided"},
                        {"c0", {c0.real(), c0.imag()}},
                        {"amp", amp},
                        {"axis", axis},
                        {"profile", profile_json(profile)}};
    return Weight(Kind::custom, eval, std::abs(c0) + std::abs(amp) * profile.sup() * norm(axis), desc);
}

Weight Weight::from_field(ScalarField values, double bound)
{
    auto shared = std::make_shared<const ScalarField>(std::move(values));
    return Weight(Kind::custom, [shared](const Vec3& x, const Vec3&) { return interpolate(*shared, x); }, bound,
                  {{"kind", "tabulated"}});
}

AttenuationMap::AttenuationMap(ScalarField a) : a_(std::move(a))
{
    for (const Complex& v : a_.values) {
        if (v.imag() != 0.0 || v.real() < 0.0 || !std::isfinite(v.real()))
            throw DataError("attenuation map must be real and nonnegative");
    }
}

Complex eval_w0(const Weight& w, const Vec3& x, const SphereGrid& sphere)
{
    Complex sum{};
    for (std::size_t j = 0; j < sphere.size(); ++j) sum += sphere.weights[j] * w(x, sphere.nodes[j]);
    return sum / sphere.measure();
}

ScalarField w0_field(const Weight& w, const GridSpec& grid, const SphereGrid& sphere, double floor)
{
    ScalarField out(grid);
    parallel_for(out.values.size(), [&](std::size_t i) { out.values[i] = eval_w0(w, grid.node(i), sphere); });
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (std::abs(out.values[i]) <= floor) {
            const Vec3 x = grid.node(i);
            std::ostringstream msg;
            msg << "w0 vanishes (|w0| = " << std::abs(out.values[i]) << " <= " << floor << ") at node " << i
                << " x = (" << x[0] << ", " << x[1] << ", " << x[2] << ")";
            throw DataError(msg.str());
        }
    }
    return out;
}

Weight w0_weight(const Weight& w, const SphereGrid& sphere)
{
    auto eval = [w, sphere](const Vec3& x, const Vec3&) { return eval_w0(w, x, sphere); };
    return Weight(Weight::Kind::custom, eval, w.bound(), {{"kind", "w0"}, {"of", w.description()}});
}

Weight symmetrize(const Weight& w)
{
    auto eval = [w](const Vec3& x, const Vec3& t) { return 0.5 * (w(x, t) + w(x, -t)); };
    return Weight(Weight::Kind::custom, eval, w.bound(), {{"kind", "symmetrized"}, {"of", w.description()}});
}

nlohmann::json SymmetryReport::to_json() const
{
    return {{"max_violation", max_violation},
            {"max_pair_violation", max_pair_violation},
            {"min_abs_w0", min_abs_w0},
            {"point_count", point_count},
            {"direction_count", direction_count},
            {"tolerance", tolerance},
            {"holds", holds}};
}

SymmetryReport check_chang_symmetry(const Weight& w, const GridSpec& grid, const SphereGrid& sphere, double tol)
{
    const std::size_t npts = grid.size();
    std::vector<double> viol(npts), pair(npts), w0abs(npts);
    parallel_for(npts, [&](std::size_t i) {
        const Vec3 x = grid.node(i);
        const Complex w0 = eval_w0(w, x, sphere);
        double v = 0.0, p = 0.0;
        for (std::size_t j = 0; j < sphere.size(); ++j) {
            const Vec3& t = sphere.nodes[j];
            const Complex ws = 0.5 * (w(x, t) + w(x, -t));
            v = std::max(v, std::abs(ws - w0));
            const Complex pr = 0.5 * (w(x, t) + w(x, sphere.nodes[sphere.antipode[j]]) - 2.0 * w0);
            p = std::max(p, std::abs(pr));
        }
        viol[i] = v;
        pair[i] = p;
        w0abs[i] = std::abs(w0);
    });
    SymmetryReport r;
    r.point_count = npts;
    r.direction_count = sphere.size();
    r.tolerance = tol;
    r.max_violation = *std::max_element(viol.begin(), viol.end());
    r.max_pair_violation = *std::max_element(pair.begin(), pair.end());
    r.min_abs_w0 = *std::min_element(w0abs.begin(), w0abs.end());
    r.holds = r.max_violation <= tol;
    return r;
}

double divergent_beam(const AttenuationMap& map, const Vec3& x, const Vec3& d, double step)
{
    const GridSpec& g = map.field().grid;
    if (step <= 0.0) step = 0.5 * g.min_spacing();
    const Vec3 up = g.upper();
    double t_lo = 0.0, t_hi = std::numeric_limits<double>::infinity();
    for (int a = 0; a < g.dim; ++a) {
        if (d[a] == 0.0) {
            if (x[a] < g.origin[a] || x[a] > up[a]) return 0.0;
            continue;
        }
        double t0 = (g.origin[a] - x[a]) / d[a];
        double t1 = (up[a] - x[a]) / d[a];
        if (t0 > t1) std::swap(t0, t1);
        t_lo = std::max(t_lo, t0);
        t_hi = std::min(t_hi, t1);
    }
    if (!(t_hi > t_lo)) return 0.0;
    const double len = t_hi - t_lo;
    const auto n = static_cast<std::size_t>(std::ceil(len / step));
    const double h = len / static_cast<double>(n);
    double sum = 0.5 * (interpolate(map.field(), x + t_lo * d).real() + interpolate(map.field(), x + t_hi * d).real());
    for (std::size_t k = 1; k < n; ++k) sum += interpolate(map.field(), x + (t_lo + static_cast<double>(k) * h) * d).real();
    return sum * h;
}

Weight attenuation_weight(std::shared_ptr<const AttenuationMap> a, double step)
{
    if (!a) throw std::invalid_argument("attenuation map is null");
    const int dim = a->dim();
    if (dim != 2 && dim != 3) throw std::invalid_argument("attenuation weight needs dimension 2 or 3");
    auto eval = [a, dim, step](const Vec3& x, const Vec3& dir) -> Complex {
        const Vec3 d = dim == 2 ? Vec3{dir[1], -dir[0], 0.0} : dir;
        return std::exp(-divergent_beam(*a, x, d, step));
    };
    return Weight(Weight::Kind::attenuation, eval, 1.0,
                  {{"kind", "attenuation"}, {"dim", dim}, {"step", step}});
}

Weight weight_from_json(const nlohmann::json& spec, const std::function<ScalarField(const std::string&)>& load_field)
{
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "constant") return Weight::constant(complex_from_json(spec.value("value", nlohmann::json(1.0))));
    if (kind == "polynomial") {
        Vec3 lin{0.0, 0.0, 0.0};
        std::array<Vec3, 3> quad{};
        if (spec.contains("linear")) lin = vec_from_json(spec.at("linear"));
        if (spec.contains("quadratic")) {
            const auto& q = spec.at("quadratic");
            for (std::size_t a = 0; a < std::min<std::size_t>(3, q.size()); ++a) quad[a] = vec_from_json(q.at(a));
        }
        return Weight::polynomial(complex_from_json(spec.value("c0", nlohmann::json(1.0))), lin, quad,
                                  profile_from_json(spec.value("profile", nlohmann::json())));
    }
    if (kind == "one_sided") {
        return Weight::one_sided(complex_from_json(spec.value("c0", nlohmann::json(1.0))), spec.value("amp", 1.0),
                                 spec.contains("axis") ? vec_from_json(spec.at("axis")) : Vec3{1.0, 0.0, 0.0},
                                 profile_from_json(spec.value("profile", nlohmann::json())));
    }
    if (kind == "attenuation") {
        if (!load_field) throw std::invalid_argument("attenuation weight needs a field loader");
        auto map = std::make_shared<const AttenuationMap>(load_field(spec.at("map").get<std::string>()));
        return attenuation_weight(map, spec.value("step", 0.0));
    }
    throw std::invalid_argument("unknown weight kind: " + kind);
}

}  // namespace wradon
