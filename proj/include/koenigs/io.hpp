#pragma once

#include "koenigs/autoconjugate.hpp"

#include <json.hpp>

#include <string>
#include <utility>

namespace koenigs {

using nlohmann::json;

// Every reader throws GeometryError(InvalidInput) on a schema violation.
json point_to_json(const HPoint& p);
HPoint point_from_json(const json& j);

json net_to_json(const QNet& net);
QNet net_from_json(const json& j);

// Net JSON plus {"d": d}.
json grid_to_json(const QNet& net, int d);
std::pair<QNet, int> grid_from_json(const json& j);

json quadric_to_json(const QuadricForm& q);
QuadricForm quadric_from_json(const json& j);

json curve_to_json(const DCurve& c);
DCurve curve_from_json(const json& j);

json pair_to_json(const CurvePair& p);
CurvePair pair_from_json(const json& j);

// t_values hold wa / (wa + wb) per face, row-major.
json instance_to_json(const TouchingInstance& inst, const json& seed);
// Rebuilt from the contact nets; the net supplies the faces.
TouchingInstance instance_from_json(const json& j, const QNet& net, const Tolerance& tol = {});

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
// Indented dump with a trailing newline; stable for identical input.
std::string dump_json(const json& j);

// Affine chart x_k = 1, written "w=1" (last coordinate), "x=1", "y=1",
// "z=1" or "x<k>=1".
struct Chart {
  int index = -1;
  double clip = 1e6;
  static Chart parse(const std::string& spec, int ambient_dim);
};

// OBJ with one vertex per net point and one quad per face; with an instance,
// each face conic is appended as a closed 64-sample polyline.
std::string net_to_obj(const QNet& net, const Chart& chart, const TouchingInstance* inst = nullptr);

// Triangle mesh of a quadric surface in RP^3, sampled on a density x density
// parameter grid. Supports ellipsoid type, ruled type and cones.
std::string quadric_to_obj(const QuadricForm& q, const Chart& chart, int density = 32);

}  // namespace koenigs
