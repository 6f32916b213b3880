#pragma once

#include "magspec/degennes.hpp"
#include "magspec/domains.hpp"
#include "magspec/eigensolver.hpp"
#include "magspec/fields.hpp"
#include "magspec/grid.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace magspec::io {

using json = nlohmann::json;

Vec3 vec3_from_json(const json& j); ///< accepts 2 or 3 entries
json vec3_to_json(const Vec3& v);

Rotation rotation_from_json(const json& j); ///< 9 row-major entries or {"quaternion":[w,x,y,z]}
json rotation_to_json(const Rotation& r);

Polynomial3 polynomial_from_json(const json& j); ///< [[a, b, c, coefficient], ...]
json polynomial_to_json(const Polynomial3& p);

Domain domain_from_json(const json& j);
json domain_to_json(const Domain& d);

/// Pullback fields carry a functional chart and are not serializable.
FieldPtr field_from_json(const json& j);
json field_to_json(const FieldSpec& f);

json degennes_to_json(const degennes::DeGennesMinimum& m, const std::vector<double>& tail_points);

void write_text_atomic(const std::string& path, const std::string& contents);
json read_json_file(const std::string& path);

/// Little-endian (re, im) float64 pairs in node order.
void write_vector_binary(const std::string& path, const CVector& v);
CVector read_vector_binary(const std::string& path);
json grid_nodes_to_json(const Grid& g);

} // namespace magspec::io
