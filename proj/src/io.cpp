#include "koenigs/io.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>

namespace koenigs {

namespace {

[[noreturn]] void bad(const std::string& what) { throw GeometryError(ErrorCode::InvalidInput, what); }

void expect_schema(const json& j, const char* schema) {
  if (!j.is_object() || !j.contains("schema") || j["schema"] != schema) bad(std::string("expected schema ") + schema);
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) bad(std::string("missing field ") + key);
  try {
    return j[key].get<T>();
  } catch (const json::exception& e) {
    bad(std::string("field ") + key + ": " + e.what());
  }
}

std::vector<HPoint> points_from(const json& j, int ambient) {
  if (!j.contains("points") || !j["points"].is_array()) bad("missing points");
  std::vector<HPoint> pts;
  for (const auto& p : j["points"]) {
    HPoint x = point_from_json(p);
    if (x.ambient_dim() != ambient) bad("point dimension does not match ambient_dim");
    pts.push_back(std::move(x));
  }
  return pts;
}

json points_to(const std::vector<HPoint>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back(point_to_json(p));
  return arr;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

// Affine coordinates of y in the chart, or nothing past the clip bound.
std::optional<Eigen::Vector3d> chart_coords(const Eigen::VectorXd& y, const Chart& chart) {
  const double w = y[chart.index];
  if (std::abs(w) <= y.norm() / chart.clip) return std::nullopt;
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  int k = 0;
  for (int c = 0; c < y.size(); ++c)
    if (c != chart.index) out[k++] = y[c] / w;
  if (out.cwiseAbs().maxCoeff() > chart.clip) return std::nullopt;
  return out;
}

}  // namespace

json point_to_json(const HPoint& p) {
  json arr = json::array();
  for (int k = 0; k <= p.ambient_dim(); ++k) arr.push_back(p[k]);
  return arr;
}

HPoint point_from_json(const json& j) {
  if (!j.is_array() || j.size() < 2) bad("point must be an array of at least two numbers");
  Eigen::VectorXd x(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) bad("point coordinates must be numbers");
    x[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  }
  if (!x.allFinite() || x.norm() == 0.0) bad("point must be finite and nonzero");
  return HPoint(x);
}

json net_to_json(const QNet& net) {
  return json{{"schema", "koenigs-net/1"},
              {"ambient_dim", net.ambient_dim()},
              {"origin", {net.origin_i(), net.origin_j()}},
              {"rows", net.rows()},
              {"cols", net.cols()},
              {"points", points_to(net.points())}};
}

QNet net_from_json(const json& j) {
  expect_schema(j, "koenigs-net/1");
  const auto origin = j.contains("origin") ? field<std::vector<int>>(j, "origin") : std::vector<int>{0, 0};
  if (origin.size() != 2) bad("origin must have two entries");
  return QNet(field<int>(j, "cols"), field<int>(j, "rows"), points_from(j, field<int>(j, "ambient_dim")), origin[0],
              origin[1]);
}

json grid_to_json(const QNet& net, int d) {
  json j = net_to_json(net);
  j["d"] = d;
  return j;
}

std::pair<QNet, int> grid_from_json(const json& j) {
  const int d = field<int>(j, "d");
  if (d < 1) bad("d must be positive");
  return {net_from_json(j), d};
}

json quadric_to_json(const QuadricForm& q) {
  json rows = json::array();
  for (int r = 0; r < q.matrix().rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < q.matrix().cols(); ++c) row.push_back(q.matrix()(r, c));
    rows.push_back(row);
  }
  return json{{"schema", "koenigs-quadric/1"}, {"ambient_dim", q.ambient_dim()}, {"matrix", rows}};
}

QuadricForm quadric_from_json(const json& j) {
  expect_schema(j, "koenigs-quadric/1");
  const int n = field<int>(j, "ambient_dim");
  const auto rows = field<std::vector<std::vector<double>>>(j, "matrix");
  if (n < 1 || rows.size() != static_cast<std::size_t>(n + 1)) bad("matrix size does not match ambient_dim");
  Eigen::MatrixXd m(n + 1, n + 1);
  for (int r = 0; r <= n; ++r) {
    if (rows[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(n + 1)) bad("matrix must be square");
    for (int c = 0; c <= n; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  if (!m.allFinite() || m.norm() == 0.0) bad("matrix must be finite and nonzero");
  if ((m - m.transpose()).norm() > 1e-12 * m.norm()) bad("matrix must be symmetric");
  return QuadricForm(m);
}

json curve_to_json(const DCurve& c) {
  return json{{"schema", "koenigs-curve/1"}, {"ambient_dim", c.ambient_dim()}, {"points", points_to(c.points())}};
}

DCurve curve_from_json(const json& j) {
  expect_schema(j, "koenigs-curve/1");
  return DCurve(points_from(j, field<int>(j, "ambient_dim")));
}

json pair_to_json(const CurvePair& p) {
  return json{{"schema", "koenigs-pair/1"},
              {"d", p.d},
              {"sigma", curve_to_json(p.sigma)},
              {"tau", curve_to_json(p.tau)},
              {"quadric", quadric_to_json(p.quadric)}};
}

CurvePair pair_from_json(const json& j) {
  expect_schema(j, "koenigs-pair/1");
  CurvePair p{curve_from_json(field<json>(j, "sigma")), curve_from_json(field<json>(j, "tau")),
              quadric_from_json(field<json>(j, "quadric")), field<int>(j, "d")};
  if (p.d < 1) bad("d must be positive");
  return p;
}

json instance_to_json(const TouchingInstance& inst, const json& seed) {
  json t = json::array();
  for (int j = 0; j < inst.b; ++j) {
    json row = json::array();
    for (int i = 0; i < inst.a; ++i) {
      const Eigen::Vector2d& w = inst.face(i, j).w;
      row.push_back(w[0] / (w[0] + w[1]));
    }
    t.push_back(row);
  }
  return json{{"schema", "koenigs-instance/1"}, {"seed", seed}, {"S", net_to_json(inst.s)},
              {"T", net_to_json(inst.t)}, {"t_values", t}};
}

TouchingInstance instance_from_json(const json& j, const QNet& net, const Tolerance& tol) {
  expect_schema(j, "koenigs-instance/1");
  const PropagationResult r =
      instance_from_contacts(net, net_from_json(field<json>(j, "S")), net_from_json(field<json>(j, "T")), tol);
  if (!r.closed) throw GeometryError(ErrorCode::ClosureFailure, "stored contacts are not touching conics of this net");
  return *r.instance;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    bad(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) bad("cannot write " + path);
  out << text;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

Chart Chart::parse(const std::string& spec, int ambient_dim) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || spec.substr(eq + 1) != "1") bad("chart must look like w=1");
  const std::string name = spec.substr(0, eq);
  Chart c;
  if (name == "w") c.index = ambient_dim;
  else if (name == "x") c.index = 0;
  else if (name == "y") c.index = 1;
  else if (name == "z") c.index = 2;
  else if (name.size() > 1 && name[0] == 'x' && name.find_first_not_of("0123456789", 1) == std::string::npos)
    c.index = std::stoi(name.substr(1));
  else bad("unknown chart coordinate " + name);
  if (c.index < 0 || c.index > ambient_dim) bad("chart coordinate outside the ambient space");
  return c;
}

std::string net_to_obj(const QNet& net, const Chart& chart, const TouchingInstance* inst) {
  if (net.ambient_dim() > 3) bad("OBJ export needs ambient dimension at most 3");
  std::ostringstream os;
  for (const auto& p : net.points()) {
    const auto x = chart_coords(p.coords(), chart);
    if (!x) bad("net vertex at infinity in the chosen chart");
    os << "v " << fmt((*x)[0]) << ' ' << fmt((*x)[1]) << ' ' << fmt((*x)[2]) << '\n';
  }
  for (int j = 0; j < net.b(); ++j)
    for (int i = 0; i < net.a(); ++i) {
      const int v00 = j * net.cols() + i + 1;
      os << "f " << v00 << ' ' << v00 + 1 << ' ' << v00 + 1 + net.cols() << ' ' << v00 + net.cols() << '\n';
    }
  if (inst) {
    int next = static_cast<int>(net.points().size()) + 1;
    for (int j = 0; j < inst->b; ++j)
      for (int i = 0; i < inst->a; ++i) {
        std::vector<int> ids;
        for (const auto& p : conic_samples(*inst, i, j, 64)) {
          const auto x = chart_coords(p.coords(), chart);
          if (!x) continue;  // the polyline is clipped at the chart's line at infinity
          os << "v " << fmt((*x)[0]) << ' ' << fmt((*x)[1]) << ' ' << fmt((*x)[2]) << '\n';
          ids.push_back(next++);
        }
        if (ids.size() < 2) continue;
        os << 'l';
        for (int id : ids) os << ' ' << id;
        if (ids.size() == 64) os << ' ' << ids.front();
        os << '\n';
      }
  }
  return os.str();
}

std::string quadric_to_obj(const QuadricForm& q, const Chart& chart, int density) {
  if (q.ambient_dim() != 3) bad("surface export needs a quadric in RP^3");
  if (density < 4) bad("density must be at least 4");
  const Tolerance tol;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(Eigen::Matrix4d(q.matrix()));
  const Eigen::Vector4d ev = es.eigenvalues();
  const double big = ev.cwiseAbs().maxCoeff();
  std::vector<Eigen::Vector4d> pos, neg, zero;
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector4d v = es.eigenvectors().col(k);
    if (std::abs(ev[k]) <= tol.rank_rel * big) zero.push_back(v);
    else (ev[k] > 0 ? pos : neg).push_back(v / std::sqrt(std::abs(ev[k])));
  }
  if (pos.size() < neg.size()) std::swap(pos, neg);

  // sample(u, v) with u, v in [0, 1]; wrap flags say which directions close up.
  std::function<Eigen::Vector4d(double, double)> sample;
  bool wrap_u = true, wrap_v = false;
  const double tau = 2.0 * std::numbers::pi;
  if (pos.size() == 3 && neg.size() == 1) {
    sample = [&](double u, double v) {
      const double th = tau * u, ph = std::numbers::pi * v;
      return Eigen::Vector4d(std::sin(ph) * std::cos(th) * pos[0] + std::sin(ph) * std::sin(th) * pos[1] +
                             std::cos(ph) * pos[2] + neg[0]);
    };
  } else if (pos.size() == 2 && neg.size() == 2) {
    wrap_v = true;
    sample = [&](double u, double v) {
      return Eigen::Vector4d(std::cos(tau * u) * pos[0] + std::sin(tau * u) * pos[1] + std::cos(tau * v) * neg[0] +
                             std::sin(tau * v) * neg[1]);
    };
  } else if (pos.size() == 2 && neg.size() == 1 && zero.size() == 1) {
    sample = [&](double u, double v) {
      const double al = std::numbers::pi * (v - 0.5) * 0.98;  // stays off the apex direction
      const Eigen::Vector4d c = std::cos(tau * u) * pos[0] + std::sin(tau * u) * pos[1] + neg[0];
      return Eigen::Vector4d(std::cos(al) * c + std::sin(al) * zero[0] * c.norm());
    };
  } else {
    bad("surface export supports signatures (3,1), (2,2) and cones (2,1,0); got " + signature(q, tol).str());
  }

  const int nu = density, nv = density;
  const int cu = wrap_u ? nu : nu + 1, cv = wrap_v ? nv : nv + 1;
  std::vector<std::optional<Eigen::Vector3d>> verts;
  for (int b = 0; b < cv; ++b)
    for (int a = 0; a < cu; ++a)
      verts.push_back(chart_coords(sample(static_cast<double>(a) / nu, static_cast<double>(b) / nv), chart));
  std::vector<int> index(verts.size(), 0);
  std::ostringstream os;
  int next = 1;
  for (std::size_t k = 0; k < verts.size(); ++k)
    if (verts[k]) {
      index[k] = next++;
      os << "v " << fmt((*verts[k])[0]) << ' ' << fmt((*verts[k])[1]) << ' ' << fmt((*verts[k])[2]) << '\n';
    }
  auto id = [&](int a, int b) { return static_cast<std::size_t>((b % cv) * cu + (a % cu)); };
  int faces = 0;
  for (int b = 0; b < nv; ++b)
    for (int a = 0; a < nu; ++a) {
      const std::size_t k00 = id(a, b), k10 = id(a + 1, b), k01 = id(a, b + 1), k11 = id(a + 1, b + 1);
      if (!index[k00] || !index[k10] || !index[k01] || !index[k11]) continue;
      os << "f " << index[k00] << ' ' << index[k10] << ' ' << index[k11] << '\n';
      os << "f " << index[k00] << ' ' << index[k11] << ' ' << index[k01] << '\n';
      faces += 2;
    }
  if (faces == 0) bad("the whole surface lies at infinity in the chosen chart");
  return os.str();
}

}  // namespace koenigs
