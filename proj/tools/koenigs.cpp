// koenigs: generate, verify and export discrete Kœnigs nets.
//
// Exit codes: 0 pass, 1 a mathematical check failed, 2 invalid input,
// 3 numerical degeneracy or generation failure.

#include "koenigs/io.hpp"
#include "koenigs/fixtures.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

using namespace koenigs;

namespace {

struct Common {
  std::uint64_t seed = 0;
  double rank_tol = 1e-8;
  double residual_tol = 1e-9;
  int threads = 1;
  std::string out;

  Tolerance tol() const {
    Tolerance t{rank_tol, residual_tol};
    t.validate();
    if (threads < 1) throw GeometryError(ErrorCode::InvalidInput, "--threads must be at least 1");
    return t;
  }
};

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidInput:
    case ErrorCode::MixedAmbient:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::WindowTooSmall:
    case ErrorCode::StencilOutOfRange:
    case ErrorCode::NotInParameterSpace:
      return 2;
    case ErrorCode::ClosureFailure:
    case ErrorCode::HypothesisFailed:
    case ErrorCode::VerifyFailed:
      return 1;
    default:
      return 3;
  }
}

void emit(const Common& c, const json& j) {
  const std::string text = dump_json(j);
  if (c.out.empty()) std::cout << text;
  else write_text_file(c.out, text);
}

void emit_text(const Common& c, const std::string& text) {
  if (c.out.empty()) std::cout << text;
  else write_text_file(c.out, text);
}

// Generation log on stderr, one JSON object.
void log(const json& j) { std::cerr << j.dump() << '\n'; }

int report(const Common& c, json r) {
  emit(c, r);
  return r.value("pass", false) ? 0 : 1;
}

json sig_json(const Signature& s) { return {{"plus", s.plus}, {"minus", s.minus}, {"zero", s.zero}}; }

// A net file, optionally carrying a grid dimension.
struct NetInput {
  QNet net;
  std::optional<int> d;
};

NetInput load_net(const std::string& path, int d_flag) {
  const json j = read_json_file(path);
  NetInput in{net_from_json(j), std::nullopt};
  if (d_flag > 0) in.d = d_flag;
  else if (j.contains("d")) in.d = grid_from_json(j).second;
  return in;
}

int require_d(const NetInput& in) {
  if (!in.d) throw GeometryError(ErrorCode::InvalidInput, "grid dimension unknown: pass --d or a grid file");
  return *in.d;
}

// special | propagated | path to an instance file
TouchingInstance load_instance(const std::string& kind, const NetInput& in, double seed_t, const Tolerance& tol) {
  if (kind == "special") return special_touching_conics(in.net, require_d(in), tol);
  if (kind == "propagated") return require_instance(propagate_instance(in.net, InstanceSeed::from_t(seed_t), tol));
  return instance_from_json(read_json_file(kind), in.net, tol);
}

json laplace_json(const LaplaceReport& r) {
  return {{"exists", r.exists},
          {"order_reached", r.order_reached},
          {"degenerate", r.degenerate},
          {"nowhere_degenerate", r.nowhere_degenerate},
          {"comparisons", r.comparisons},
          {"formula_residual", r.formula_residual}};
}

// Max distance between consecutive points along j, per transform.
double j_variation(const QNet& net) {
  double worst = 0.0;
  for (int i = 0; i <= net.a(); ++i)
    for (int j = 0; j < net.b(); ++j) worst = std::max(worst, point_distance(net.at(i, j), net.at(i, j + 1)));
  return worst;
}

// ---- gen ----------------------------------------------------------------

struct GenArgs {
  int rows = 5, cols = 5, d = 2, len = 8, a = 2, b = 2;
  double margin = 1e-3;
  std::string pair;
};

int gen_tangent(const Common& c, const GenArgs& g) {
  if (g.rows < 2 || g.cols < 2) throw GeometryError(ErrorCode::InvalidInput, "--rows and --cols must be at least 2");
  const QNet net = tangent_grid(g.rows, g.cols, c.seed).net;
  const KoenigsReport k = is_koenigs(net, c.tol(), 0.4, c.threads);
  log({{"kind", "tangent-grid"}, {"seed", c.seed}, {"is_koenigs", k.closed}, {"closure_residual", k.closure_residual}});
  emit(c, grid_to_json(net, 1));
  return 0;
}

int gen_autoconjugate(const Common& c, const GenArgs& g) {
  if (g.d < 1 || g.len < 2 * g.d + 2) throw GeometryError(ErrorCode::InvalidInput, "need --d >= 1 and --len >= 2d+2");
  const Tolerance tol = c.tol();
  const CurvePair p = generate_pair(g.d, g.len, c.seed, GeneratorOptions{g.margin, 200});
  log({{"kind", "autoconjugate"},
       {"seed", c.seed},
       {"generic_pair", is_generic_pair(p, tol)},
       {"margin", pair_margin(p)},
       {"sigma_autoconjugate", is_autoconjugate(p.sigma, p.quadric, p.d, tol)},
       {"tau_autoconjugate", is_autoconjugate(p.tau, p.quadric, p.d, tol)}});
  emit(c, pair_to_json(p));
  return 0;
}

int gen_from_curves(const Common& c, const GenArgs& g) {
  if (g.pair.empty()) throw GeometryError(ErrorCode::InvalidInput, "--pair is required");
  const Tolerance tol = c.tol();
  const CurvePair p = pair_from_json(read_json_file(g.pair));
  const CurvesToGrid cg = curves_to_grid(p, tol);
  const GridGenericityReport gen = is_generic_grid(cg.grid, p.d, tol, c.threads);
  log({{"kind", "grid-from-curves"},
       {"formula_residual", cg.formula_residual},
       {"generic", gen.is_generic},
       {"is_koenigs", is_koenigs(cg.grid, tol, 0.4, c.threads).closed}});
  emit(c, grid_to_json(cg.grid, p.d));
  return 0;
}

int gen_special(const Common& c, const GenArgs& g) {
  if (g.d < 2) throw GeometryError(ErrorCode::InvalidInput, "special grids need --d >= 2");
  const Tolerance tol = c.tol();
  const QNet net = special_grid(g.d, c.seed);
  log({{"kind", "special-grid"},
       {"seed", c.seed},
       {"special", is_special_grid(net, g.d, tol).special},
       {"is_koenigs", is_koenigs(net, tol, 0.4, c.threads).closed}});
  emit(c, grid_to_json(net, g.d));
  return 0;
}

int gen_extensive(const Common& c, const GenArgs& g) {
  if (g.a < 1 || g.b < 1) throw GeometryError(ErrorCode::InvalidInput, "--a and --b must be positive");
  const QNet net = extensive_koenigs(g.a, g.b, c.seed);
  log({{"kind", "extensive-net"}, {"seed", c.seed}, {"extensive", is_extensive(net, c.tol())}});
  emit(c, net_to_json(net));
  return 0;
}

// ---- verify -------------------------------------------------------------

struct VerifyArgs {
  std::string net, grid, pair, instance = "propagated", quadric_out;
  int d = 0;
  int k = 0;
  double seed_t = 0.4;
  double threshold = 1e-8;
};

std::string input_path(const VerifyArgs& v) {
  if (!v.net.empty()) return v.net;
  if (!v.grid.empty()) return v.grid;
  throw GeometryError(ErrorCode::InvalidInput, "--net or --grid is required");
}

int verify_koenigs(const Common& c, const VerifyArgs& v) {
  const Tolerance tol = c.tol();
  const NetInput in = load_net(input_path(v), v.d);
  const KoenigsReport k = is_koenigs(in.net, tol, v.seed_t, c.threads);
  const char* cop[] = {"vacuous", "holds", "fails"};
  return report(c, {{"check", "koenigs"},
                    {"pass", k.closed},
                    {"closure_residual", k.closure_residual},
                    {"worst_face", {k.worst_i, k.worst_j}},
                    {"coplanarity", cop[static_cast<int>(k.coplanarity)]},
                    {"coplanarity_residual", k.coplanarity_residual},
                    {"agree", k.agree}});
}

int verify_binet(const Common& c, const VerifyArgs& v) {
  const Tolerance tol = c.tol();
  const NetInput in = load_net(input_path(v), v.d);
  const BinetReport b = binet_check(load_instance(v.instance, in, v.seed_t, tol), tol);
  return report(c, {{"check", "binet"},
                    {"pass", b.pass(v.threshold)},
                    {"instance", v.instance},
                    {"max_hs_kt", b.max_hs_kt},
                    {"max_ht_ks", b.max_ht_ks},
                    {"max_residual", std::max(b.max_hs_kt, b.max_ht_ks)},
                    {"comparisons", b.comparisons}});
}

int verify_inscribed_cmd(const Common& c, const VerifyArgs& v) {
  const Tolerance tol = c.tol();
  const NetInput in = load_net(input_path(v), v.d);
  const TouchingInstance inst = load_instance(v.instance, in, v.seed_t, tol);
  const InscribedQuadricResult r = build_inscribed_quadric(in.net, inst, tol);
  const InscribedVerification ver = verify_inscribed(in.net, inst, r.quadric, tol, c.threads);
  const std::vector<QuadricForm> oracle = oracle_inscribed(in.net, inst, tol);
  const SingularReport sing = singular_analysis(in.net, inst, r.quadric, tol);
  json rep{{"check", "inscribed"},
           {"pass", ver.pass(v.threshold)},
           {"conic_residual", ver.conic_residual},
           {"isotropy_residual", ver.isotropy_residual},
           {"tangency_residual", ver.tangency_residual},
           {"tangency_checks", ver.tangency_checks},
           {"signature", sig_json(signature(r.quadric, tol))},
           {"singular_dim", sing.singular.proj_dim()},
           {"base_locus_warning", r.base_locus_warning},
           {"oracle_solutions", oracle.size()},
           {"quadric", quadric_to_json(r.quadric)}};
  if (oracle.size() == 1) rep["oracle_distance"] = aligned_distance(oracle[0].matrix(), r.quadric.matrix());
  if (!v.quadric_out.empty()) write_text_file(v.quadric_out, dump_json(quadric_to_json(r.quadric)));
  return report(c, rep);
}

int verify_grid(const Common& c, const VerifyArgs& v) {
  const Tolerance tol = c.tol();
  const NetInput in = load_net(input_path(v), v.d);
  const int d = require_d(in);
  const DGridReport dg = check_dgrid(in.net, d, tol);
  const GridGenericityReport gen = is_generic_grid(in.net, d, tol, c.threads);
  const SpecialGridReport sp = is_special_grid(in.net, d, tol);
  json rep{{"check", "grid"},
           {"d", d},
           {"dgrid", dg.valid},
           {"bad_rows", dg.bad_rows},
           {"bad_cols", dg.bad_cols},
           {"sigma_dd_extensive", gen.sigma_dd_extensive},
           {"P_d", laplace_json(gen.p_d)},
           {"P_minus_d", laplace_json(gen.p_minus_d)},
           {"generic", gen.is_generic},
           {"special", sp.special},
           {"special_window_too_small", sp.window_too_small}};
  bool pass = dg.valid && gen.is_generic;
  if (gen.is_generic) {
    const IteratedLaplace pd = iterated_laplace(in.net, d, tol, true);
    const IteratedLaplace pmd = iterated_laplace(in.net, -d, tol, true);
    rep["P_d_formula_residual"] = pd.report.formula_residual;
    rep["P_d_j_variation"] = j_variation(*pd.net);
    rep["P_minus_d_formula_residual"] = pmd.report.formula_residual;
    const SpecialQuadric sq = special_inscribed_quadric(in.net, d, tol, 0, 0, c.threads);
    rep["special_quadric"] = quadric_to_json(sq.quadric);
    rep["special_signature"] = sig_json(sq.signature);
    rep["special_conic_residual"] = sq.verification.conic_residual;
    rep["special_tangency_residual"] = sq.verification.tangency_residual;
    pass = pass && sq.verification.pass(v.threshold) && sq.signature.zero == 0;
  }
  rep["pass"] = pass;
  return report(c, rep);
}

int verify_incidence(const Common& c, const VerifyArgs& v) {
  const Tolerance tol = c.tol();
  const NetInput in = load_net(input_path(v), v.d);
  const int d = require_d(in);
  try {
    const IncidenceReport r = incidence_check(in.net, d, tol);
    return report(c, {{"check", "incidence"},
                      {"pass", r.koenigs && r.final_conic_residual < v.threshold},
                      {"hypotheses", true},
                      {"closure_residual", r.closure_residual},
                      {"final_conic_residual", r.final_conic_residual}});
  } catch (const GeometryError& e) {
    if (e.code() != ErrorCode::HypothesisFailed) throw;
    return report(c, {{"check", "incidence"}, {"pass", false}, {"hypotheses", false}, {"message", e.what()}});
  }
}

int verify_roundtrip(const Common& c, const VerifyArgs& v) {
  const Tolerance tol = c.tol();
  RoundtripReport r;
  std::string from;
  if (!v.pair.empty()) {
    r = roundtrip_check(pair_from_json(read_json_file(v.pair)), tol);
    from = "pair";
  } else {
    const NetInput in = load_net(input_path(v), v.d);
    r = roundtrip_check(in.net, require_d(in), tol);
    from = "grid";
  }
  return report(c, {{"check", "roundtrip"},
                    {"pass", r.max() < v.threshold},
                    {"from", from},
                    {"curve_deviation", r.curve_deviation},
                    {"grid_deviation", r.grid_deviation},
                    {"index_residual", r.index_residual},
                    {"polarity_residual", r.polarity_residual},
                    {"polarity_checks", r.polarity_checks}});
}

int verify_diag(const Common& c, const VerifyArgs& v) {
  const Tolerance tol = c.tol();
  const NetInput in = load_net(input_path(v), v.d);
  TouchingInstance inst;
  QuadricForm q;
  int k = v.k;
  if (in.d) {
    const SpecialQuadric sq = special_inscribed_quadric(in.net, *in.d, tol, 0, 0, c.threads);
    inst = sq.instance;
    q = sq.quadric;
    if (k == 0) k = *in.d;
  } else {
    inst = load_instance(v.instance, in, v.seed_t, tol);
    q = build_inscribed_quadric(in.net, inst, tol).quadric;
    if (k == 0) k = std::min(in.net.a(), in.net.b()) - 1;
  }
  const DiagonalCorollaryReport dc = diagonal_corollary_check(in.net, inst, q, k, tol);
  json rep{{"check", "diag-corollary"},
           {"k_requested", k},
           {"k_checked", dc.k_checked},
           {"spaces_checked", dc.spaces_checked},
           {"contact_residual", dc.contact_residual},
           {"isotropy_residual", dc.isotropy_residual}};
  bool pass = dc.contact_residual < v.threshold && dc.isotropy_residual < v.threshold;
  if (in.net.a() >= 4 && in.net.b() >= 4) {
    const DoliwaReport dr = doliwa_conics(in.net, q, tol);
    rep["doliwa_residual"] = dr.max_residual;
    rep["doliwa_conics"] = dr.conics.size();
    pass = pass && dr.max_residual < v.threshold;
  }
  rep["pass"] = pass;
  return report(c, rep);
}

// ---- export -------------------------------------------------------------

struct ExportArgs {
  std::string net, quadric, instance = "none", chart = "w=1";
  int d = 0;
  int density = 32;
  double seed_t = 0.4;
};

int export_obj(const Common& c, const ExportArgs& e) {
  const Tolerance tol = c.tol();
  if (!e.quadric.empty()) {
    const QuadricForm q = quadric_from_json(read_json_file(e.quadric));
    emit_text(c, quadric_to_obj(q, Chart::parse(e.chart, q.ambient_dim()), e.density));
    return 0;
  }
  if (e.net.empty()) throw GeometryError(ErrorCode::InvalidInput, "--net or --quadric is required");
  const NetInput in = load_net(e.net, e.d);
  const Chart chart = Chart::parse(e.chart, in.net.ambient_dim());
  if (e.instance == "none") {
    emit_text(c, net_to_obj(in.net, chart));
  } else {
    const TouchingInstance inst = load_instance(e.instance, in, e.seed_t, tol);
    emit_text(c, net_to_obj(in.net, chart, &inst));
  }
  return 0;
}

int export_json(const Common& c, const ExportArgs& e) {
  const Tolerance tol = c.tol();
  if (e.net.empty()) throw GeometryError(ErrorCode::InvalidInput, "--net is required");
  const NetInput in = load_net(e.net, e.d);
  const std::string kind = e.instance == "none" ? "propagated" : e.instance;
  const TouchingInstance inst = load_instance(kind, in, e.seed_t, tol);
  json out{{"net", net_to_json(in.net)}, {"instance", instance_to_json(inst, {{"kind", kind}, {"t", e.seed_t}})}};
  if (in.d && kind == "special") out["quadric"] = quadric_to_json(special_inscribed_quadric(in.net, *in.d, tol).quadric);
  else if (is_extensive(in.net, tol)) out["quadric"] = quadric_to_json(build_inscribed_quadric(in.net, inst, tol).quadric);
  emit(c, out);
  return 0;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  app->add_option("--rank-tol", c.rank_tol, "relative singular value threshold")->capture_default_str();
  app->add_option("--residual-tol", c.residual_tol, "absolute incidence threshold")->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads for verification")->capture_default_str();
  app->add_option("--out", c.out, "output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Kœnigs nets: generate, verify, export"};
  app.require_subcommand(1);
  Common common;
  GenArgs gen;
  VerifyArgs ver;
  ExportArgs exp;
  std::function<int()> action;

  CLI::App* g = app.add_subcommand("gen", "generate fixtures")->require_subcommand(1);
  {
    CLI::App* s = g->add_subcommand("tangent-grid", "Kœnigs 1-grid of circle tangents");
    add_common(s, common);
    s->add_option("--rows", gen.rows)->capture_default_str();
    s->add_option("--cols", gen.cols)->capture_default_str();
    s->callback([&] { action = [&] { return gen_tangent(common, gen); }; });

    s = g->add_subcommand("autoconjugate", "generic pair of autoconjugate curves");
    add_common(s, common);
    s->add_option("--d", gen.d)->capture_default_str();
    s->add_option("--len", gen.len)->capture_default_str();
    s->add_option("--margin", gen.margin, "conditioning margin of the pair")->capture_default_str();
    s->callback([&] { action = [&] { return gen_autoconjugate(common, gen); }; });

    s = g->add_subcommand("grid-from-curves", "Kœnigs d-grid of a curve pair");
    add_common(s, common);
    s->add_option("--pair", gen.pair, "pair JSON")->required();
    s->callback([&] { action = [&] { return gen_from_curves(common, gen); }; });

    s = g->add_subcommand("special-grid", "special Kœnigs d-grid on Σ_{d,d+1}");
    add_common(s, common);
    s->add_option("--d", gen.d)->capture_default_str();
    s->callback([&] { action = [&] { return gen_special(common, gen); }; });

    s = g->add_subcommand("extensive-net", "extensive Kœnigs net on Σ_{a,b} in RP^{a+b}");
    add_common(s, common);
    s->add_option("--a", gen.a)->capture_default_str();
    s->add_option("--b", gen.b)->capture_default_str();
    s->callback([&] { action = [&] { return gen_extensive(common, gen); }; });
  }

  CLI::App* v = app.add_subcommand("verify", "run a theorem check")->require_subcommand(1);
  {
    auto add = [&](const char* name, const char* what, int (*fn)(const Common&, const VerifyArgs&)) {
      CLI::App* s = v->add_subcommand(name, what);
      add_common(s, common);
      s->add_option("--net", ver.net, "net JSON");
      s->add_option("--grid", ver.grid, "grid JSON");
      s->add_option("--d", ver.d, "grid dimension when the file has none");
      s->add_option("--seed-t", ver.seed_t, "pencil parameter of the seed face")->capture_default_str();
      s->add_option("--threshold", ver.threshold, "pass threshold for residuals")->capture_default_str();
      s->callback([&, fn] { action = [&, fn] { return fn(common, ver); }; });
      return s;
    };
    add("koenigs", "touching conics close", verify_koenigs);
    add("binet", "Laplace invariants of the contact nets", verify_binet)
        ->add_option("--instance", ver.instance, "special, propagated or an instance file")
        ->capture_default_str();
    CLI::App* ins = add("inscribed", "inscribed quadric", verify_inscribed_cmd);
    ins->add_option("--instance", ver.instance, "special, propagated or an instance file")->capture_default_str();
    ins->add_option("--quadric-out", ver.quadric_out, "write the quadric JSON here");
    add("grid", "d-grid predicates and the special quadric", verify_grid);
    add("incidence", "incidence theorem on Σ_{d+2,d+2}", verify_incidence);
    add("roundtrip", "curves <-> grid bijection", verify_roundtrip)->add_option("--pair", ver.pair, "pair JSON");
    CLI::App* dc = add("diag-corollary", "diagonal net on the inscribed quadric", verify_diag);
    dc->add_option("--k", ver.k, "highest Laplace order to check");
    dc->add_option("--instance", ver.instance, "special, propagated or an instance file")->capture_default_str();
  }

  CLI::App* e = app.add_subcommand("export", "export meshes and bundles")->require_subcommand(1);
  {
    for (const char* name : {"obj", "json"}) {
      CLI::App* s = e->add_subcommand(name, std::string(name) == "obj" ? "OBJ mesh" : "net, instance and quadric");
      add_common(s, common);
      s->add_option("--net", exp.net, "net JSON");
      s->add_option("--d", exp.d, "grid dimension when the file has none");
      s->add_option("--instance", exp.instance, "none, special, propagated or an instance file")->capture_default_str();
      s->add_option("--seed-t", exp.seed_t)->capture_default_str();
      if (std::string(name) == "obj") {
        s->add_option("--quadric", exp.quadric, "quadric JSON in RP^3");
        s->add_option("--chart", exp.chart, "affine chart, e.g. w=1")->capture_default_str();
        s->add_option("--density", exp.density, "surface samples per direction")->capture_default_str();
        s->callback([&] { action = [&] { return export_obj(common, exp); }; });
      } else {
        s->callback([&] { action = [&] { return export_json(common, exp); }; });
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }
  try {
    return action();
  } catch (const GeometryError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return exit_code(err.code());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 3;
  }
}
