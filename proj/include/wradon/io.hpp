#pragma once

#include <string>

#include <json.hpp>

#include "wradon/forward.hpp"
#include "wradon/grids.hpp"

namespace wradon {

// Every file is one JSON header line, a newline, then little-endian float64
// (re, im) pairs. Extra header keys (config, metadata) are carried in `extra`.

struct FieldFile {
    ScalarField field;
    nlohmann::json extra = nlohmann::json::object();
};

struct SinogramFile {
    Sinogram sinogram;
    nlohmann::json extra = nlohmann::json::object();
};

struct RayFile {
    RayData rays;
    nlohmann::json extra = nlohmann::json::object();
};

void write_field(const std::string& path, const ScalarField& f, const nlohmann::json& extra = nlohmann::json::object());
FieldFile read_field(const std::string& path);

void write_sinogram(const std::string& path, const Sinogram& g, const nlohmann::json& extra = nlohmann::json::object());
SinogramFile read_sinogram(const std::string& path);

void write_rays(const std::string& path, const RayData& r, const nlohmann::json& extra = nlohmann::json::object());
RayFile read_rays(const std::string& path);

/// Rebuilds a direction grid from its {kind, L, M, pole} description.
SphereGrid sphere_from_json(const nlohmann::json& j);
nlohmann::json sphere_to_json(const SphereGrid& s);

/// 8-bit binary PGM of the real part on the first two axes (middle slice in 3D),
/// linearly scaled; returns {min, max} of the scaled values.
std::pair<double, double> write_pgm(const std::string& path, const ScalarField& f);

/// Center-line profiles along each axis: columns axis, coordinate, re, im.
void write_profiles_csv(const std::string& path, const ScalarField& f);

}  // namespace wradon
