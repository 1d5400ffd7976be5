// Command-line front end: generation, solving, construction, verification
// and the branching demo. Every output file embeds a run manifest; identical
// invocations produce bit-identical files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "otgeo/coeffs.hpp"
#include "otgeo/construct.hpp"
#include "otgeo/curvature.hpp"
#include "otgeo/errors.hpp"
#include "otgeo/functionals.hpp"
#include "otgeo/instances.hpp"
#include "otgeo/transport.hpp"
#include "otgeo/uniqueness.hpp"

namespace {

using nlohmann::json;
using namespace otgeo;

constexpr const char* kVersion = "0.1.0";

struct Globals {
  unsigned seed = 0;
  int threads = 1;
  std::string out_dir;
};

std::string resolve(const Globals& g, const std::string& path) {
  if (g.out_dir.empty() || path.empty()) return path;
  return (std::filesystem::path(g.out_dir) / path).string();
}

void write_atomic(const std::string& path, const json& doc) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw BadInput("cannot open output file: " + path);
    out << doc.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

void write_atomic_text(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw BadInput("cannot open output file: " + path);
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadInput("cannot read file: " + path);
  json j;
  in >> j;
  return j;
}

json manifest(const std::string& subcommand, const json& params, const json& input_checksums,
              unsigned seed) {
  return json{{"subcommand", subcommand},
              {"parameters", params},
              {"input_checksums", input_checksums},
              {"seed", seed},
              {"version", kVersion}};
}

FiniteMetricMeasureSpace load_space(const std::string& path) {
  return validate_space(read_json(path));
}

std::vector<double> parse_grid(const std::string& s) {
  // "a:b:step" inclusive grid, or a comma-separated list
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    double a, b, step;
    char c1, c2;
    std::istringstream is(s);
    if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
      throw BadInput("grid must be a:b:step");
    for (double v = a; v <= b + 1e-12; v += step) out.push_back(v);
  } else {
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw BadInput("empty grid");
  return out;
}

std::vector<int> grid_to_indices(const std::vector<double>& grid, int T) {
  std::vector<int> out;
  for (double t : grid) {
    const double k = t * T;
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-9) throw OffGridTime("t = " + std::to_string(t));
    out.push_back(static_cast<int>(r));
  }
  return out;
}

int point_index(const FiniteMetricMeasureSpace& space, const std::string& id) {
  const int i = space.index_of(id);
  if (i < 0) throw BadInput("unknown point id: " + id);
  return i;
}

std::string csv_line(std::initializer_list<double> vals) {
  std::string line;
  char buf[40];
  for (double v : vals) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    if (!line.empty()) line += ",";
    line += buf;
  }
  return line + "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"optimal transport geometry toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "random seed for sampled checks");
  app.add_option("--threads", g.threads, "worker threads (reserved)");
  app.add_option("--out-dir", g.out_dir, "directory for output files");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a model instance");
  InstanceSpec spec;
  std::string gen_out, gen_geo;
  gen->add_option("--kind", spec.kind, "interval|grid2d|tripod|weighted_interval")->required();
  gen->add_option("--n", spec.n, "points per side / branch")->required();
  gen->add_option("--length", spec.length, "total length");
  gen->add_option("--weight", spec.weight_id, "uniform|expneg|linear");
  gen->add_option("--T", spec.T, "time resolution of the geodesic set");
  gen->add_option("--out", gen_out, "space file")->required();
  gen->add_option("--geodesics", gen_geo, "geodesic set file");

  // w2
  auto* w2 = app.add_subcommand("w2", "solve the quadratic transport problem");
  std::string w2_space, w2_mu0, w2_mu1, w2_out;
  double w2_tol = 1e-7;
  w2->add_option("--space", w2_space)->required();
  w2->add_option("--mu0", w2_mu0)->required();
  w2->add_option("--mu1", w2_mu1)->required();
  w2->add_option("--out", w2_out)->required();
  w2->add_option("--tol-dual", w2_tol);

  // map
  auto* mp = app.add_subcommand("map", "extract the optimal map");
  std::string mp_space, mp_mu0, mp_mu1, mp_out;
  double mp_tol = 1e-7;
  mp->add_option("--space", mp_space)->required();
  mp->add_option("--mu0", mp_mu0)->required();
  mp->add_option("--mu1", mp_mu1)->required();
  mp->add_option("--out", mp_out)->required();
  mp->add_option("--tol-dual", mp_tol);

  // certify
  auto* ct = app.add_subcommand("certify", "certify uniqueness of the optimal plan");
  std::string ct_space, ct_mu0, ct_mu1, ct_geo, ct_out;
  double ct_tol = 1e-7;
  ct->add_option("--space", ct_space)->required();
  ct->add_option("--mu0", ct_mu0)->required();
  ct->add_option("--mu1", ct_mu1)->required();
  ct->add_option("--geodesics", ct_geo);
  ct->add_option("--out", ct_out)->required();
  ct->add_option("--tol", ct_tol);

  // good-geodesic
  auto* gg = app.add_subcommand("good-geodesic", "construct a good geodesic");
  std::string gg_space, gg_geo, gg_mu0, gg_target, gg_out, gg_plan_out;
  double gg_K = 0.0, gg_N = 1.0;
  int gg_p = 1, gg_q = 2, gg_depth = 6, gg_atoms = 8;
  gg->add_option("--space", gg_space)->required();
  gg->add_option("--geodesics", gg_geo)->required();
  gg->add_option("--mu0", gg_mu0)->required();
  gg->add_option("--target", gg_target, "dirac:<point-id> or measure:<file>")->required();
  gg->add_option("--K", gg_K);
  gg->add_option("--N", gg_N);
  gg->add_option("--lambda-num", gg_p);
  gg->add_option("--lambda-den", gg_q);
  gg->add_option("--depth", gg_depth);
  gg->add_option("--atoms", gg_atoms, "atom budget for general targets");
  gg->add_option("--out", gg_out)->required();
  gg->add_option("--plan-out", gg_plan_out);

  // check
  auto* ck = app.add_subcommand("check", "verify a curvature inequality");
  std::string ck_cond, ck_space, ck_plan, ck_geo, ck_tgrid = "0:1:0.125", ck_o, ck_out;
  double ck_K = 0.0, ck_N = 1.0, ck_tol = 1e-9;
  int ck_budget = 8;
  ck->add_option("--cond", ck_cond, "mcp|mcp-ohta|mcp-implication|cdstar|final|mcp-space")
      ->required();
  ck->add_option("--space", ck_space)->required();
  ck->add_option("--plan", ck_plan);
  ck->add_option("--geodesics", ck_geo);
  ck->add_option("--K", ck_K);
  ck->add_option("--N", ck_N);
  ck->add_option("--tgrid", ck_tgrid, "a:b:step grid of times");
  ck->add_option("--o", ck_o, "target point id");
  ck->add_option("--budget", ck_budget);
  ck->add_option("--tol", ck_tol);
  ck->add_option("--out", ck_out);

  // branch-demo
  auto* bd = app.add_subcommand("branch-demo", "mixing construction at a junction time");
  std::string bd_space, bd_geo, bd_mu0, bd_t1, bd_t2, bd_out;
  double bd_tau = 0.25;
  bd->add_option("--space", bd_space)->required();
  bd->add_option("--geodesics", bd_geo)->required();
  bd->add_option("--mu0", bd_mu0)->required();
  bd->add_option("--target1", bd_t1)->required();
  bd->add_option("--target2", bd_t2)->required();
  bd->add_option("--tau", bd_tau);
  bd->add_option("--out", bd_out)->required();

  // coef
  auto* cf = app.add_subcommand("coef", "tabulate distortion coefficients");
  std::string cf_tgrid = "0:1:0.1", cf_thetagrid = "0:2:0.25", cf_out;
  double cf_K = 0.0, cf_N = 1.0;
  bool cf_sigma = false;
  cf->add_option("--K", cf_K)->required();
  cf->add_option("--N", cf_N)->required();
  cf->add_option("--tgrid", cf_tgrid);
  cf->add_option("--thetagrid", cf_thetagrid);
  cf->add_flag("--sigma", cf_sigma, "tabulate sigma instead of tau");
  cf->add_option("--out", cf_out);

  // functionals
  auto* fn = app.add_subcommand("functionals", "entropy and excess-mass tables");
  std::string fn_space, fn_mu, fn_ngrid = "1,2,4", fn_cgrid = "0:4:0.5", fn_out;
  fn->add_option("--space", fn_space)->required();
  fn->add_option("--mu", fn_mu)->required();
  fn->add_option("--Ngrid", fn_ngrid);
  fn->add_option("--Cgrid", fn_cgrid);
  fn->add_option("--out", fn_out);

  // let the global --seed/--threads/--out-dir appear after the subcommand
  for (CLI::App* sc : app.get_subcommands([](const CLI::App*) { return true; }))
    sc->fallthrough();

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    Instance inst = generate(spec);
    json doc = inst.space.to_json();
    doc["notes"] = inst.notes;
    doc["manifest"] = manifest("gen",
                               {{"kind", spec.kind},
                                {"n", spec.n},
                                {"length", spec.length},
                                {"weight", spec.weight_id},
                                {"T", spec.T}},
                               json::object(), g.seed);
    write_atomic(resolve(g, gen_out), doc);
    if (!gen_geo.empty()) {
      json geo = geoset_to_json(inst.geodesics, inst.space);
      geo["manifest"] = doc["manifest"];
      write_atomic(resolve(g, gen_geo), geo);
    }
    return 0;
  }

  if (w2->parsed()) {
    const auto space = load_space(w2_space);
    const Measure mu0 = measure_from_json(read_json(w2_mu0), space);
    const Measure mu1 = measure_from_json(read_json(w2_mu1), space);
    const TransportSolution sol = solve_w2(space, mu0, mu1, w2_tol);
    json doc = solution_to_json(sol, space);
    doc["manifest"] = manifest("w2", {{"tol_dual", w2_tol}},
                               {{"space", space.checksum()}}, g.seed);
    write_atomic(resolve(g, w2_out), doc);
    return 0;
  }

  if (mp->parsed()) {
    const auto space = load_space(mp_space);
    const Measure mu0 = measure_from_json(read_json(mp_mu0), space);
    const Measure mu1 = measure_from_json(read_json(mp_mu1), space);
    const MapExtraction ext = extract_optimal_map(space, mu0, mu1, mp_tol);
    json doc = map_to_json(ext, space);
    doc["manifest"] = manifest("map", {{"tol_dual", mp_tol}},
                               {{"space", space.checksum()}}, g.seed);
    write_atomic(resolve(g, mp_out), doc);
    return 0;
  }

  if (ct->parsed()) {
    const auto space = load_space(ct_space);
    const Measure mu0 = measure_from_json(read_json(ct_mu0), space);
    const Measure mu1 = measure_from_json(read_json(ct_mu1), space);
    GeodesicSet geo;
    const bool have_geo = !ct_geo.empty();
    if (have_geo) geo = geoset_from_json(read_json(ct_geo), space);
    const UniquenessCertificate cert =
        certify_unique_plan(space, mu0, mu1, ct_tol, have_geo ? &geo : nullptr);
    const char* verdict = cert.verdict == UniquenessCertificate::UNIQUE       ? "UNIQUE"
                          : cert.verdict == UniquenessCertificate::MULTIPLE   ? "MULTIPLE"
                                                                              : "INCONCLUSIVE";
    json doc{{"verdict", verdict},
             {"probes_used", cert.probes_used},
             {"dynamical_multiplicity", cert.dynamical_multiplicity}};
    doc["manifest"] = manifest("certify", {{"tol", ct_tol}},
                               {{"space", space.checksum()}}, g.seed);
    write_atomic(resolve(g, ct_out), doc);
    return 0;
  }

  if (gg->parsed()) {
    const auto space = load_space(gg_space);
    const GeodesicSet geo = geoset_from_json(read_json(gg_geo), space);
    const Measure mu0 = measure_from_json(read_json(gg_mu0), space);
    GoodGeodesicReport rep;
    DynamicalPlan plan;
    if (gg_target.rfind("dirac:", 0) == 0) {
      const int o = point_index(space, gg_target.substr(6));
      GoodGeodesicResult res =
          good_geodesic_to_dirac(space, geo, mu0, o, gg_K, gg_N, gg_p, gg_q, gg_depth);
      rep = std::move(res.report);
      plan = std::move(res.plan);
    } else if (gg_target.rfind("measure:", 0) == 0) {
      const Measure mu1 = measure_from_json(read_json(gg_target.substr(8)), space);
      FiniteDiracsResult res = good_geodesic_general(space, geo, mu0, mu1, gg_atoms, gg_K, gg_N,
                                                     gg_p, gg_q, gg_depth);
      rep = std::move(res.report);
      plan = std::move(res.plan);
    } else {
      throw BadInput("target must be dirac:<point-id> or measure:<file>");
    }
    json doc = report_to_json(rep);
    doc["manifest"] = manifest("good-geodesic",
                               {{"K", gg_K},
                                {"N", gg_N},
                                {"lambda_num", gg_p},
                                {"lambda_den", gg_q},
                                {"depth", gg_depth},
                                {"target", gg_target}},
                               {{"space", space.checksum()}}, g.seed);
    write_atomic(resolve(g, gg_out), doc);
    std::string csv = "t,linf_margin,entropy_margin\n";
    for (size_t i = 0; i < rep.times.size(); ++i)
      csv += csv_line({rep.times[i], rep.linf_margin[i], rep.entropy_margin[i]});
    write_atomic_text(resolve(g, gg_out) + ".csv", csv);
    if (!gg_plan_out.empty()) write_atomic(resolve(g, gg_plan_out), plan_to_json(plan, space));
    return 0;
  }

  if (ck->parsed()) {
    const auto space = load_space(ck_space);
    VerificationReport rep;
    if (ck_cond == "mcp-space") {
      if (ck_geo.empty()) throw BadInput("mcp-space needs --geodesics");
      const GeodesicSet geo = geoset_from_json(read_json(ck_geo), space);
      rep = verify_space_mcp(space, geo, ck_K, ck_N, ck_budget, g.seed);
    } else {
      if (ck_plan.empty()) throw BadInput("this condition needs --plan");
      const DynamicalPlan nu = plan_from_json(read_json(ck_plan), space);
      const std::vector<int> ts = grid_to_indices(parse_grid(ck_tgrid), nu.time_resolution);
      if (ck_cond == "mcp") {
        rep = check_mcp_integrated(space, nu, point_index(space, ck_o), ck_K, ck_N, ts, ck_tol);
      } else if (ck_cond == "mcp-ohta") {
        rep = check_mcp_ohta(space, nu, ck_K, ck_N, ts, ck_tol);
      } else if (ck_cond == "mcp-implication") {
        rep = check_mcp_implication(space, nu, point_index(space, ck_o), ck_K, ck_N, ts, ck_tol);
      } else if (ck_cond == "cdstar") {
        rep = check_cdstar(space, nu, ck_K, ck_N, {}, ts, ck_tol);
      } else if (ck_cond == "final") {
        rep = check_final_bounds(space, nu, ck_K, ck_N, ts, ck_tol);
      } else {
        throw BadInput("unknown condition: " + ck_cond);
      }
    }
    json doc = verification_to_json(rep);
    doc["manifest"] = manifest("check",
                               {{"cond", ck_cond}, {"K", ck_K}, {"N", ck_N}, {"tol", ck_tol},
                                {"budget", ck_budget}},
                               {{"space", space.checksum()}}, g.seed);
    if (!ck_out.empty()) {
      write_atomic(resolve(g, ck_out), doc);
      std::string csv = "t,margin\n";
      for (const auto& item : rep.items) csv += csv_line({item.t, item.margin});
      write_atomic_text(resolve(g, ck_out) + ".csv", csv);
    } else {
      std::cout << doc.dump(2) << "\n";
    }
    return rep.passed() ? 0 : 1;
  }

  if (bd->parsed()) {
    const auto space = load_space(bd_space);
    const GeodesicSet geo = geoset_from_json(read_json(bd_geo), space);
    const Measure mu0 = measure_from_json(read_json(bd_mu0), space);
    const int t1 = point_index(space, bd_t1);
    const int t2 = point_index(space, bd_t2);
    auto contraction = [&](int target) {
      DynamicalPlan nu;
      nu.time_resolution = geo.T;
      nu.epsilon = geo.epsilon;
      for (int i : mu0.support()) {
        auto it = geo.by_pair.find({i, target});
        if (it == geo.by_pair.end() || it->second.empty())
          throw InsufficientGeodesics("no chain to the target");
        nu.atoms.push_back(PlanAtom{geo.geodesics[static_cast<size_t>(it->second.front())],
                                    mu0.weights[static_cast<size_t>(i)]});
      }
      return nu;
    };
    const int tau_idx = static_cast<int>(std::round(bd_tau * geo.T));
    if (std::abs(bd_tau * geo.T - tau_idx) > 1e-9) throw OffGridTime("tau off the grid");
    const BranchingWitness bw =
        build_mixing_plan(contraction(t1), contraction(t2), tau_idx, space);
    json doc{{"tau", bd_tau},
             {"cost_mix", bw.cost_mix},
             {"cost_avg", bw.cost_avg},
             {"branching_found", !bw.witness.nonbranching},
             {"split_index", bw.witness.split_index},
             {"mix", plan_to_json(bw.mix, space)}};
    doc["manifest"] = manifest("branch-demo", {{"tau", bd_tau}},
                               {{"space", space.checksum()}}, g.seed);
    write_atomic(resolve(g, bd_out), doc);
    return 0;
  }

  if (cf->parsed()) {
    std::string out = "t,theta,value\n";
    for (double t : parse_grid(cf_tgrid))
      for (double theta : parse_grid(cf_thetagrid)) {
        const ExtendedValue v =
            cf_sigma ? sigma(cf_K, cf_N, t, theta) : tau(cf_K, cf_N, t, theta);
        char buf[96];
        if (v.infinite)
          std::snprintf(buf, sizeof(buf), "%.17g,%.17g,inf\n", t, theta);
        else
          std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", t, theta, v.value);
        out += buf;
      }
    if (cf_out.empty())
      std::cout << out;
    else
      write_atomic_text(resolve(g, cf_out), out);
    return 0;
  }

  if (fn->parsed()) {
    const auto space = load_space(fn_space);
    const Measure mu = measure_from_json(read_json(fn_mu), space);
    std::string out = "kind,parameter,value\n";
    for (double N : parse_grid(fn_ngrid)) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "entropy,%.17g,%.17g\n", N,
                    renyi_entropy(mu, space, N));
      out += buf;
    }
    for (double C : parse_grid(fn_cgrid)) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "excess,%.17g,%.17g\n", C, excess_mass(mu, space, C));
      out += buf;
    }
    if (fn_out.empty())
      std::cout << out;
    else
      write_atomic_text(resolve(g, fn_out), out);
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
