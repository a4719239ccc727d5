#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "wradon/grids.hpp"

namespace wradon {

/// Spatial modulation h(x) applied to the direction-dependent part of a weight.
struct Profile {
    enum class Type { one, gaussian };
    Type type = Type::one;
    Vec3 center{0.0, 0.0, 0.0};
    double sigma = 1.0;

    double operator()(const Vec3& x) const;
    double sup() const { return 1.0; }
};

/// Bounded complex weight W(x, theta).
///
/// The direction argument is a unit vector: theta for plane weights, the ray
/// direction alpha for ray weights.
class Weight {
public:
    enum class Kind { constant, polynomial_in_theta, attenuation, custom };
    using Evaluator = std::function<Complex(const Vec3& x, const Vec3& dir)>;

    Weight(Kind kind, Evaluator eval, double bound, nlohmann::json description = {});

    Complex operator()(const Vec3& x, const Vec3& dir) const { return eval_(x, dir); }
    Kind kind() const { return kind_; }
    /// Sup-norm bound: |W| <= bound everywhere.
    double bound() const { return bound_; }
    const nlohmann::json& description() const { return description_; }

    static Weight constant(Complex c);
    /// c0 + h(x) * (b . theta + theta^T Q theta).
    static Weight polynomial(Complex c0, const Vec3& linear, const std::array<Vec3, 3>& quadratic,
                             Profile profile = {});
    /// c0 + amp * h(x) * max(theta . axis, 0): continuous, not symmetric in theta.
    static Weight one_sided(Complex c0, double amp, const Vec3& axis, Profile profile = {});
    /// W(x, theta) = values(x) by multilinear interpolation (0 off-grid).
    static Weight from_field(ScalarField values, double bound);

private:
    Kind kind_;
    Evaluator eval_;
    double bound_;
    nlohmann::json description_;
};

/// Nonnegative, real, compactly supported attenuation map a(x).
class AttenuationMap {
public:
    explicit AttenuationMap(ScalarField a);
    const ScalarField& field() const { return a_; }
    int dim() const { return a_.dim(); }

private:
    ScalarField a_;
};

/// Sphere average (1/|S|) sum_j mu_j W(x, theta_j).
Complex eval_w0(const Weight& w, const Vec3& x, const SphereGrid& sphere);

inline constexpr double kDefaultW0Floor = 1e-8;

/// w0 tabulated at every node of `grid`; DataError names the first node with |w0| <= floor.
ScalarField w0_field(const Weight& w, const GridSpec& grid, const SphereGrid& sphere,
                     double floor = kDefaultW0Floor);

/// Weight evaluating eval_w0 on the fly (exact discrete average, direction-independent).
Weight w0_weight(const Weight& w, const SphereGrid& sphere);

/// W_s(x, theta) = (W(x, theta) + W(x, -theta)) / 2.
Weight symmetrize(const Weight& w);

struct SymmetryReport {
    double max_violation = 0.0;       // max |W_s(x, theta_j) - w0(x)|
    double max_pair_violation = 0.0;  // max |W(x, theta_j) + W(x, theta_{j*}) - 2 w0(x)| / 2
    double min_abs_w0 = 0.0;
    std::size_t point_count = 0;
    std::size_t direction_count = 0;
    double tolerance = 0.0;
    bool holds = false;

    nlohmann::json to_json() const;
};

inline constexpr double kDefaultSymmetryTol = 1e-10;

/// Samples W_s - w0 over grid nodes x sphere nodes.
SymmetryReport check_chang_symmetry(const Weight& w, const GridSpec& grid, const SphereGrid& sphere,
                                    double tol = kDefaultSymmetryTol);

/// Trapezoid rule for int_0^inf a(x + t d) dt, stopping where the half-line leaves the
/// map's bounding box. step <= 0 picks half the smallest spacing.
double divergent_beam(const AttenuationMap& a, const Vec3& x, const Vec3& d, double step = 0.0);

/// exp(-Da(x, d)). In 2D d = theta^perp = (theta_2, -theta_1); in 3D the direction
/// argument is the ray direction alpha itself.
Weight attenuation_weight(std::shared_ptr<const AttenuationMap> a, double step = 0.0);

/// Parses a weight description: {"kind": "constant" | "polynomial" | "one_sided" | "attenuation", ...}.
/// `load_field` resolves attenuation map paths.
Weight weight_from_json(const nlohmann::json& spec,
                        const std::function<ScalarField(const std::string&)>& load_field = {});

}  // namespace wradon
