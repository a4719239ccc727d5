#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace wradon {

using Complex = std::complex<double>;

// Points and directions live in R^3; 2D quantities keep the third component 0.
using Vec3 = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a)
{
    const double n = norm(a);
    return {a[0] / n, a[1] / n, a[2] / n};
}

/// Orthonormal pair {u, v} perpendicular to the unit vector `n`.
///
/// u = normalize(n x e_k) where k is the first axis of smallest |n_k|, and
/// v = n x u. For -n the result is {-u, v} bit-exactly, so plane samples of
/// (s, n) and (-s, -n) coincide.
struct Frame {
    Vec3 u;
    Vec3 v;
};
Frame orthonormal_frame(const Vec3& n);

/// Bad input data: grid/support mismatches, w0 floor violations, malformed files.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Each index is processed by exactly one worker, so results
/// written per index do not depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned threads = 0);

/// Process-wide default worker count used when an operation is passed 0.
void set_default_threads(unsigned threads);
unsigned default_threads();

}  // namespace wradon
