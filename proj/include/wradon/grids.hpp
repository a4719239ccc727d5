#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wradon/common.hpp"

namespace wradon {

/// Axis-aligned uniform grid in 2 or 3 dimensions. Unused axes of a 2D grid
/// have shape 1, spacing 1 and origin 0.
struct GridSpec {
    int dim = 2;
    std::array<std::size_t, 3> shape{1, 1, 1};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};
    Vec3 origin{0.0, 0.0, 0.0};

    /// n nodes per axis with step h, symmetric about the origin.
    static GridSpec centered(int dim, std::size_t n, double h);
    static GridSpec centered(int dim, std::array<std::size_t, 3> shape, std::array<double, 3> spacing);

    std::size_t size() const { return shape[0] * shape[1] * shape[2]; }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k = 0) const
    {
        return (i * shape[1] + j) * shape[2] + k;
    }
    Vec3 node(std::size_t i, std::size_t j, std::size_t k = 0) const
    {
        return {origin[0] + static_cast<double>(i) * spacing[0], origin[1] + static_cast<double>(j) * spacing[1],
                dim == 3 ? origin[2] + static_cast<double>(k) * spacing[2] : 0.0};
    }
    Vec3 node(std::size_t flat) const;
    Vec3 upper() const;
    double min_spacing() const;
    double cell_volume() const;
    /// Largest |x| over the grid nodes.
    double half_diagonal() const;

    void validate() const;
    bool operator==(const GridSpec&) const = default;
};

/// Complex samples on a GridSpec, row-major with the last axis fastest.
struct ScalarField {
    GridSpec grid;
    std::vector<Complex> values;

    ScalarField() = default;
    explicit ScalarField(GridSpec g, Complex fill = {});

    int dim() const { return grid.dim; }
    Complex& operator[](std::size_t i) { return values[i]; }
    const Complex& operator[](std::size_t i) const { return values[i]; }
};

/// Multilinear interpolation; 0 outside the grid bounding box.
Complex interpolate(const ScalarField& field, const Vec3& x);

/// Radius about the origin of the ball containing every nonzero sample,
/// padded by one cell diagonal to cover the interpolation footprint.
double support_radius(const ScalarField& field);

/// Antipodally closed discretization of S^1 or S^2.
struct SphereGrid {
    enum class Kind { circle, gauss_legendre };

    Kind kind = Kind::circle;
    int dim_sphere = 1;
    std::size_t polar_count = 0;    // L for gauss_legendre
    std::size_t azimuth_count = 0;  // M
    Vec3 pole{0.0, 0.0, 1.0};

    std::vector<Vec3> nodes;
    std::vector<double> weights;
    std::vector<std::size_t> antipode;

    std::size_t size() const { return nodes.size(); }
    int ambient_dim() const { return dim_sphere + 1; }
    /// |S^{n-1}|: 2 pi or 4 pi.
    double measure() const { return dim_sphere == 1 ? 2.0 * kPi : 4.0 * kPi; }
};

/// Basis {e1, e2} of the plane orthogonal to `pole`, right-handed with the pole.
/// For the x3 axis this is {x1, x2}; otherwise orthonormal_frame(pole).
Frame plane_basis(const Vec3& pole);

/// M uniform angles 2 pi j / M on the unit circle, weights 2 pi / M.
SphereGrid make_circle_grid(std::size_t count);

/// Gauss-Legendre in cos(psi) times M uniform azimuths about `pole`.
SphereGrid make_sphere_grid(std::size_t polar_count, std::size_t azimuth_count, const Vec3& pole = {0.0, 0.0, 1.0});

/// Gauss-Legendre nodes and weights on [-1, 1], ascending, nodes[L-1-i] == -nodes[i] exactly.
void gauss_legendre(std::size_t count, std::vector<double>& nodes, std::vector<double>& weights);

/// Offsets s_i = (i - (count-1)/2) * step, so s_{count-1-i} == -s_i exactly.
struct SinogramLayout {
    std::size_t s_count = 0;
    double s_max = 0.0;

    double s_step() const { return 2.0 * s_max / static_cast<double>(s_count - 1); }
};

/// Samples g(s, theta) indexed [direction][s].
struct Sinogram {
    std::size_t s_count = 0;
    double s_step = 0.0;
    SphereGrid directions;
    std::vector<Complex> values;
    nlohmann::json meta = nlohmann::json::object();

    Sinogram() = default;
    Sinogram(SphereGrid dirs, const SinogramLayout& layout);

    double s_min() const { return -s_max(); }
    double s_max() const { return 0.5 * static_cast<double>(s_count - 1) * s_step; }
    double s(std::size_t i) const { return (static_cast<double>(i) - 0.5 * static_cast<double>(s_count - 1)) * s_step; }
    SinogramLayout layout() const { return {s_count, s_max()}; }

    Complex& at(std::size_t dir, std::size_t i) { return values[dir * s_count + i]; }
    const Complex& at(std::size_t dir, std::size_t i) const { return values[dir * s_count + i]; }
    /// Linear interpolation in s along one direction; 0 beyond the grid.
    Complex sample(std::size_t dir, double s) const;
    /// Same lattice (offsets and directions).
    bool same_layout(const Sinogram& other) const;
};

// ---------------------------------------------------------------------------
// Phantoms

/// Mollified ball: 1 inside radius - edge/2, cosine ramp to 0 at radius + edge/2.
struct BallPhantom {
    Vec3 center{0.0, 0.0, 0.0};
    double radius = 1.0;
    double amplitude = 1.0;
    double edge = -1.0;  // < 0: two grid cells
    bool raw = false;    // plain indicator
};

/// exp(-|x-c|^2 / 2 sigma^2), zero where the value drops below 1e-12.
struct GaussianPhantom {
    Vec3 center{0.0, 0.0, 0.0};
    double sigma = 0.3;
    double amplitude = 1.0;
};

struct Ellipsoid {
    Vec3 center{0.0, 0.0, 0.0};
    Vec3 semi_axes{1.0, 1.0, 1.0};
    double angle = 0.0;  // rotation about the x3 axis
    double amplitude = 1.0;
};

struct EllipsoidsPhantom {
    std::vector<Ellipsoid> items;
    double edge = -1.0;
    bool raw = false;
};

using PhantomSpec = std::variant<BallPhantom, GaussianPhantom, EllipsoidsPhantom>;

/// Throws std::invalid_argument when the support is not strictly inside the grid.
ScalarField make_phantom(const GridSpec& grid, const PhantomSpec& spec);

/// Cosine edge profile: 1 for t <= -1/2, 0 for t >= 1/2.
double smooth_step_down(double t);

}  // namespace wradon
