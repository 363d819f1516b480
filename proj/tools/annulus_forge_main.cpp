// annulus-forge: build, verify, sample, and sweep the annulus construction.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "annulus_forge/verify.hpp"

namespace fs = std::filesystem;
using namespace aforge;

namespace {

struct RunConfig {
  std::string mode = "mesh-n";
  std::string lambda = "1,0";
  double rho1 = 400.0;
  int annuli = 10;
  std::uint64_t seed = 1;
  int samples = 12000;
  double fd_step_scale = 1.0;
  std::string out = ".";
};

Mode parse_mode(const std::string& s) {
  if (s == "mesh-n") return Mode::MeshN;
  if (s == "mesh-p") return Mode::MeshP;
  if (s == "mesh-nx") return Mode::MeshNX;
  throw ConfigError("unknown mode '" + s + "' (expected mesh-n|mesh-p|mesh-nx)");
}

Cplx parse_lambda(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) return Cplx(std::stod(s), 0.0);
    return Cplx(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
  } catch (const std::exception&) {
    throw ConfigError("lambda must be 're' or 're,im', got '" + s + "'");
  }
}

PlaneConfig plane_config(const RunConfig& rc) {
  if (rc.samples <= 0) throw ConfigError("samples must be positive");
  if (rc.fd_step_scale <= 0.0) throw ConfigError("fd-step-scale must be positive");
  PlaneConfig cfg;
  cfg.mode = parse_mode(rc.mode);
  cfg.lambda = parse_lambda(rc.lambda);
  cfg.rho1 = rc.rho1;
  cfg.annuli = rc.annuli;
  cfg.validate();
  return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ordered_json manifest_json(const PlaneSolution& ps) {
  ordered_json j;
  j["schema"] = "annulus-forge-manifest/1";
  j["config"] = {{"mode", mode_name(ps.config.mode)},
                 {"lambda", {ps.config.lambda.real(), ps.config.lambda.imag()}},
                 {"rho1", ps.config.rho1},
                 {"annuli", ps.config.annuli}};
  j["degenerate_mu"] = (ps.config.lambda == Cplx(0.0, 0.0));
  j["inner_n1"] = ps.inner.n1;
  j["rho"] = ps.rhos;
  ordered_json ladder = ordered_json::array();
  for (std::size_t i = 0; i < ps.annuli.size(); ++i) {
    const auto& p = ps.annuli[i].params;
    const auto& g = ps.annuli[i].glue;
    ladder.push_back({{"rho", p.rho},
                      {"n", p.n},
                      {"k", p.k},
                      {"glue", {{"b", {g.b.logmod, g.b.phase}},
                                {"d", {g.d.logmod, g.d.phase}},
                                {"b1", {g.b1.logmod, g.b1.phase}},
                                {"a", {g.a.logmod, g.a.phase}}}},
                      {"cum", {ps.cum[i].logmod, ps.cum[i].phase}}});
  }
  j["ladder"] = ladder;
  return j;
}

int cmd_build(const RunConfig& rc) {
  const PlaneSolution ps = build_plane(plane_config(rc));
  write_file(fs::path(rc.out) / "manifest.json", manifest_json(ps).dump(2) + "\n");
  std::cout << "wrote " << (fs::path(rc.out) / "manifest.json").string() << "\n";
  return 0;
}

int cmd_verify(const RunConfig& rc) {
  const PlaneConfig cfg = plane_config(rc);
  FDScheme scheme;
  scheme.step_scale = rc.fd_step_scale;
  const PlaneSolution ps = build_plane(cfg);
  write_file(fs::path(rc.out) / "manifest.json", manifest_json(ps).dump(2) + "\n");
  const VerificationReport rep = verify_plane(cfg, rc.samples, rc.seed, scheme);
  write_file(fs::path(rc.out) / "report.json", to_json(rep).dump(2) + "\n");
  write_file(fs::path(rc.out) / "report.txt", to_text(rep));
  std::cout << to_text(rep);
  return rep.pass ? 0 : 1;
}

int cmd_sample(const RunConfig& rc, const std::string& what,
               const std::string& path, double r0, double r1, double phi0,
               int count) {
  if (count < 2) throw ConfigError("sample count must be >= 2");
  const PlaneSolution ps = build_plane(plane_config(rc));
  std::string csv;
  auto radius = [&](int i) { return r0 + (r1 - r0) * i / (count - 1); };
  if (what == "u") {
    csv = "r,phi,log_mod,phase,re,im\n";
    auto emit = [&](double r, double phi) {
      const GlobalEval g = eval_global_u(ps, r, phi);
      csv += num(r) + "," + num(phi) + "," + num(g.u.logmod) + "," + num(g.u.phase);
      if (std::abs(g.u.logmod) <= 700.0) {
        const Cplx v = g.u.to_cplx();
        csv += "," + num(v.real()) + "," + num(v.imag());
      } else {
        csv += ",,";
      }
      csv += "\n";
    };
    if (path == "grid") {
      const int na = 32;
      for (int i = 0; i < count; ++i)
        for (int a = 0; a < na; ++a) emit(radius(i), 2.0 * kPi * a / na);
    } else {
      for (int i = 0; i < count; ++i) emit(radius(i), phi0);
    }
  } else if (what == "potential") {
    const bool drift = parse_mode(rc.mode) == Mode::MeshP;
    csv = drift ? "r,phi,w1_re,w1_im,w2_re,w2_im\n" : "r,phi,v_re,v_im\n";
    auto emit = [&](double r, double phi) {
      const PotentialValue p = eval_global_potential(ps, r, phi);
      csv += num(r) + "," + num(phi);
      if (drift) {
        csv += "," + num(p.W1.real()) + "," + num(p.W1.imag()) + "," +
               num(p.W2.real()) + "," + num(p.W2.imag());
      } else {
        csv += "," + num(p.V.real()) + "," + num(p.V.imag());
      }
      csv += "\n";
    };
    if (path == "grid") {
      const int na = 32;
      for (int i = 0; i < count; ++i)
        for (int a = 0; a < na; ++a) emit(radius(i), 2.0 * kPi * a / na);
    } else {
      for (int i = 0; i < count; ++i) emit(radius(i), phi0);
    }
  } else if (what == "envelope") {
    csv = "r,ln_M,ln_m\n";
    for (int i = 0; i < count; ++i) {
      const double r = radius(i);
      const int j = locate(ps, r);
      if (j < 0) throw OutOfDomainError("envelope sampling requires r >= rho1");
      const double lnM = ps.cum[j].logmod + envelope_log_M(ps.annuli[j], r);
      const double lnm = global_log_m_period(ps, r);
      csv += num(r) + "," + num(lnM) + "," + num(lnm) + "\n";
    }
  } else {
    throw ConfigError("unknown sample kind '" + what + "'");
  }
  const fs::path file = fs::path(rc.out) / ("samples_" + what + ".csv");
  write_file(file, csv);
  std::cout << "wrote " << file.string() << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& rc, std::vector<double> scales) {
  if (scales.size() < 2) throw ConfigError("sweep needs at least two scales");
  FDScheme scheme;
  scheme.step_scale = rc.fd_step_scale;
  std::vector<VerificationReport> reps;
  for (double scale : scales) {
    RunConfig one = rc;
    one.rho1 = scale;
    const PlaneConfig cfg = plane_config(one);
    reps.push_back(verify_plane(cfg, rc.samples, rc.seed, scheme));
    const std::string tag = std::to_string(static_cast<long long>(scale));
    write_file(fs::path(rc.out) / ("report_" + tag + ".json"),
               to_json(reps.back()).dump(2) + "\n");
    write_file(fs::path(rc.out) / ("report_" + tag + ".txt"),
               to_text(reps.back()));
  }
  ordered_json j;
  j["schema"] = "annulus-forge-sweep/1";
  j["scales"] = scales;
  ordered_json rows = ordered_json::array();
  bool stable = true;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& r = reps[i];
    double d1 = 0.0, d2 = 0.0;
    for (const auto& e : r.invariants.entries)
      if (e.name == "cutoff_d1_const") d1 = e.value;
    d2 = r.invariants.cutoff_d2_const;
    rows.push_back({{"rho1", scales[i]},
                    {"envelope_constant", r.envelope.base.constant},
                    {"decay_c", -r.decay.slope},
                    {"cutoff_d1_const", d1},
                    {"cutoff_d2_const", d2},
                    {"nx_refinement", r.envelope.base.nx_refinement},
                    {"pass", r.pass}});
  }
  j["table"] = rows;
  ordered_json ratios = ordered_json::array();
  for (std::size_t i = 1; i < reps.size(); ++i) {
    auto ratio = [](double a, double b) { return b != 0.0 ? a / b : 0.0; };
    const double env =
        ratio(reps[i].envelope.base.constant, reps[0].envelope.base.constant);
    const double dec = ratio(-reps[i].decay.slope, -reps[0].decay.slope);
    ordered_json row = {{"rho1", scales[i]},
                        {"envelope_ratio", env},
                        {"decay_c_ratio", dec}};
    if (parse_mode(rc.mode) == Mode::MeshNX) {
      row["nx_refinement_ratio"] = ratio(reps[i].envelope.base.nx_refinement,
                                         reps[0].envelope.base.nx_refinement);
      if (row["nx_refinement_ratio"].get<double>() < thresholds::stability_lo ||
          row["nx_refinement_ratio"].get<double>() > thresholds::stability_hi) {
        stable = false;
      }
    }
    if (env < thresholds::stability_lo || env > thresholds::stability_hi) {
      stable = false;
    }
    ratios.push_back(row);
  }
  j["ratios"] = ratios;
  bool all_pass = stable;
  for (const auto& r : reps) all_pass = all_pass && r.pass;
  j["pass"] = all_pass;
  write_file(fs::path(rc.out) / "sweep.json", j.dump(2) + "\n");
  std::cout << "wrote " << (fs::path(rc.out) / "sweep.json").string() << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"annulus-forge: complex eigenfunctions with borderline-decay potentials"};
  app.require_subcommand(1);
  RunConfig rc;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--mode", rc.mode, "mesh-n | mesh-p | mesh-nx");
    sub->add_option("--lambda", rc.lambda, "eigenvalue as 're,im'");
    sub->add_option("--rho1", rc.rho1, "inner ladder radius (>= 100)");
    sub->add_option("--annuli", rc.annuli, "number of annuli");
    sub->add_option("--seed", rc.seed, "sampling seed");
    sub->add_option("--samples", rc.samples, "total stratified samples");
    sub->add_option("--fd-step-scale", rc.fd_step_scale, "FD step multiplier");
    sub->add_option("--out", rc.out, "output directory");
    sub->set_config("--config");
  };

  auto* build = app.add_subcommand("build", "build and write manifest.json");
  add_common(build);

  auto* verify = app.add_subcommand("verify", "run the certification suite");
  add_common(verify);

  auto* sample = app.add_subcommand("sample", "sample fields to CSV");
  add_common(sample);
  std::string what = "u", path = "ray";
  double r0 = 400.0, r1 = 500.0, phi0 = 0.0;
  int count = 200;
  sample->add_option("--what", what, "u | potential | envelope");
  sample->add_option("--path", path, "ray | grid");
  sample->add_option("--r0", r0, "start radius");
  sample->add_option("--r1", r1, "end radius");
  sample->add_option("--phi", phi0, "ray angle");
  sample->add_option("--count", count, "radial sample count");

  auto* sweep = app.add_subcommand("sweep", "verify across rho1 scales");
  add_common(sweep);
  std::vector<double> scales;
  sweep->add_option("--scales", scales, "rho1 scales (>= 2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (build->parsed()) return cmd_build(rc);
    if (verify->parsed()) return cmd_verify(rc);
    if (sample->parsed()) return cmd_sample(rc, what, path, r0, r1, phi0, count);
    if (sweep->parsed()) return cmd_sweep(rc, scales);
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const OutOfDomainError& e) {
    std::cerr << "error: out-of-domain: " << e.what() << "\n";
    return 4;
  } catch (const DomainError& e) {
    std::cerr << "error: domain: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 2;
}
