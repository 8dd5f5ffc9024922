// hopfmin command-line driver. Exit codes: 0 success, 1 usage or invalid
// input, 2 numerical failure or non-convergence, 3 I/O failure.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hopfmin/cracks.hpp"
#include "hopfmin/domain.hpp"
#include "hopfmin/energy.hpp"
#include "hopfmin/errors.hpp"
#include "hopfmin/hopf.hpp"
#include "hopfmin/io.hpp"
#include "hopfmin/kernels.hpp"
#include "hopfmin/mesh.hpp"
#include "hopfmin/minimizer.hpp"
#include "hopfmin/refmaps.hpp"
#include "hopfmin/trajectories.hpp"

namespace {

using namespace hopfmin;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitIo = 3;

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ConfigError("bad number '" + item + "' in " + what);
    out.push_back(v);
  }
  return out;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

MapField load_field(const std::string& path) { return field_from_json(read_json_file(path)); }

// Shared state of one invocation: what the selected subcommand read and wrote.
struct Run {
  RunManifest manifest;
  std::optional<std::string> manifest_path;

  void input(const std::string& p) { manifest.inputs.push_back(p); }
  void output_json(const std::string& p, const json& j) {
    write_json_atomic(p, j);
    manifest.outputs.push_back(p);
  }
  void output_file(const std::string& p) { manifest.outputs.push_back(p); }
};

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  const auto t0 = std::chrono::steady_clock::now();
  Run run;
  run.manifest.started_at = utc_now();
  for (int i = 0; i < argc; ++i) run.manifest.argv.emplace_back(argv[i]);

  CLI::App app{"Least-energy maps between doubly connected planar domains"};
  app.require_subcommand(1);
  int threads = 0;
  std::optional<std::uint64_t> seed;
  std::string manifest_override;
  app.add_option("--threads", threads, "Worker threads for parallel kernels (0 = runtime default)")
      ->envname("HOPFMIN_THREADS")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Seed for every random choice (solver restarts)");
  app.add_option("--manifest", manifest_override,
                 "Run manifest path (default: <first output>.manifest.json)");

  std::function<int()> action;

  // ---- solve -------------------------------------------------------------
  auto* solve_cmd = app.add_subcommand("solve", "Minimize the Dirichlet energy with sliding boundaries");
  std::string s_source, s_target, s_config, s_out, s_csv;
  int s_nr = 64, s_nt = 256;
  solve_cmd->add_option("--source", s_source, "Source domain: annulus:r,R or washer:rho")->required();
  solve_cmd->add_option("--target", s_target, "Target domain: annulus:r,R or washer:rho")->required();
  solve_cmd->add_option("--nr", s_nr, "Rings of the source mesh")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--ntheta", s_nt, "Rays of the source mesh (even, >= 8)")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--config", s_config, "Solver configuration JSON file");
  solve_cmd->add_option("--out", s_out, "Solution JSON")->required();
  solve_cmd->add_option("--csv", s_csv, "Per-node CSV of the solution");
  solve_cmd->callback([&] {
    action = [&]() -> int {
      SolverConfig cfg;
      if (!s_config.empty()) {
        run.input(s_config);
        from_json(read_json_file(s_config), cfg);
      }
      if (seed) cfg.seed = *seed;
      const DomainSpec source = parse_domain(s_source);
      const DomainSpec target = parse_domain(s_target);
      json cfg_json = cfg;
      run.manifest.config = {{"source", source}, {"target", target}, {"n_r", s_nr},
                             {"n_theta", s_nt},  {"solver", cfg_json}};
      auto mesh = build_mesh(source, s_nr, s_nt);
      CertificateHook hook;
      if (source.is_annulus())
        hook = [&](const MapField& f) {
          return minimality_certificate(f, target).verdict == Verdict::certified_minimal;
        };
      const SolveResult res = solve(mesh, target, cfg, hook);
      json j = solve_result_json(res);
      j["config"] = cfg_json;
      run.output_json(s_out, j);
      if (!s_csv.empty()) {
        write_field_csv(res.field, s_csv);
        run.output_file(s_csv);
      }
      std::cout << "energy " << json(res.energy_history.back()).dump() << " iterations "
                << res.outer_iters << " converged " << (res.converged ? "true" : "false") << '\n';
      return res.converged ? kExitOk : kExitNumeric;
    };
  });

  // ---- hopf-check --------------------------------------------------------
  auto* hopf_cmd = app.add_subcommand("hopf-check", "Laurent fit of the Hopf product and minimality verdict");
  std::string h_in, h_out, h_target;
  int h_order = CertificateThresholds{}.order;
  hopf_cmd->add_option("field", h_in, "Field JSON")->required();
  hopf_cmd->add_option("--out", h_out, "Report JSON");
  hopf_cmd->add_option("--target", h_target, "Target override when the field records none");
  hopf_cmd->add_option("--order", h_order, "Laurent truncation order N (terms -N..N)")->check(CLI::Range(2, 64));
  hopf_cmd->callback([&] {
    action = [&]() -> int {
      run.input(h_in);
      const MapField f = load_field(h_in);
      std::optional<DomainSpec> target = f.target;
      if (!h_target.empty()) target = parse_domain(h_target);
      if (!target) throw ConfigError("field has no recorded target; pass --target");
      CertificateThresholds th;
      th.order = h_order;
      run.manifest.config = {{"order", h_order}, {"target", *target}};
      const HopfReport rep = minimality_certificate(f, *target, th);
      const json j = rep;
      if (!h_out.empty()) run.output_json(h_out, j);
      std::cout << "verdict " << to_string(rep.verdict) << " regime " << to_string(rep.regime) << " c "
                << json(rep.c).dump() << '\n';
      return kExitOk;
    };
  });

  // ---- cracks ------------------------------------------------------------
  auto* crack_cmd = app.add_subcommand("cracks", "Per-ray crack decomposition of a solved field");
  std::string c_in, c_out, c_csv;
  CrackOptions c_opt;
  crack_cmd->add_option("field", c_in, "Field JSON")->required();
  crack_cmd->add_option("--out", c_out, "Crack report JSON");
  crack_cmd->add_option("--rays-csv", c_csv, "Per-ray CSV (theta, r_theta, R_theta)");
  crack_cmd->add_option("--eps-rel", c_opt.eps_rel, "Distance tolerance / diam(target)")->check(CLI::PositiveNumber);
  crack_cmd->add_option("--eps-j-rel", c_opt.eps_j_rel, "Jacobian tolerance / typical J")->check(CLI::PositiveNumber);
  crack_cmd->callback([&] {
    action = [&]() -> int {
      run.input(c_in);
      const MapField f = load_field(c_in);
      if (!f.target) throw ConfigError("field has no recorded target");
      run.manifest.config = {{"eps_rel", c_opt.eps_rel}, {"eps_j_rel", c_opt.eps_j_rel},
                             {"ring_tolerance", c_opt.ring_tolerance}};
      const CrackReport rep = crack_report(f, *f.target, c_opt);
      if (!c_out.empty()) run.output_json(c_out, json(rep));
      if (!c_csv.empty()) {
        write_rays_csv(rep, c_csv);
        run.output_file(c_csv);
      }
      std::cout << "inner_cracks " << rep.inner_cracks.size() << " outer_cracks " << rep.outer_cracks.size()
                << " crosscut " << (rep.crosscut_detected ? "true" : "false") << '\n';
      return kExitOk;
    };
  });

  // ---- ref ---------------------------------------------------------------
  auto* ref_cmd = app.add_subcommand("ref", "Sample a closed-form reference map onto an annulus mesh");
  std::string r_kind, r_params, r_annulus, r_out, r_csv;
  int r_nr = 64, r_nt = 256;
  ref_cmd->add_option("kind", r_kind, "identity | nitsche | cracked-nitsche | logmap | logmap-dual")->required();
  ref_cmd->add_option("--params", r_params,
                      "Comma list: nitsche r,r_star; cracked-nitsche r,sigma,r_star; logmap R; logmap-dual R");
  ref_cmd->add_option("--annulus", r_annulus, "Source annulus r,R")->required();
  ref_cmd->add_option("--nr", r_nr, "Rings")->check(CLI::PositiveNumber);
  ref_cmd->add_option("--ntheta", r_nt, "Rays")->check(CLI::PositiveNumber);
  ref_cmd->add_option("--out", r_out, "Field JSON")->required();
  ref_cmd->add_option("--csv", r_csv, "Per-node CSV");
  ref_cmd->callback([&] {
    action = [&]() -> int {
      const std::vector<double> params = r_params.empty() ? std::vector<double>{} : parse_numbers(r_params, "--params");
      const std::vector<double> ann = parse_numbers(r_annulus, "--annulus");
      if (ann.size() != 2) throw ConfigError("--annulus takes r,R");
      const AnnulusSpec a{ann[0], ann[1]};
      a.validate();
      const RefMapKind k = parse_refmap(r_kind, params);
      run.manifest.config = {{"kind", refmap_name(k)}, {"params", params}, {"annulus", {a.r, a.R}},
                             {"n_r", r_nr},           {"n_theta", r_nt}};
      const MapField f = sample_refmap(k, build_mesh(DomainSpec{a}, r_nr, r_nt));
      run.output_json(r_out, json(f));
      if (!r_csv.empty()) {
        write_field_csv(f, r_csv);
        run.output_file(r_csv);
      }
      std::cout << "energy_exact " << json(refmap_energy(k, a)).dump() << '\n';
      return kExitOk;
    };
  });

  // ---- energy ------------------------------------------------------------
  auto* energy_cmd = app.add_subcommand("energy", "Dirichlet energy with normal/tangential split");
  std::string e_in, e_out, e_csv;
  energy_cmd->add_option("field", e_in, "Field JSON")->required();
  energy_cmd->add_option("--out", e_out, "Energy JSON");
  energy_cmd->add_option("--csv", e_csv, "CSV row label,total,normal,tangential");
  energy_cmd->callback([&] {
    action = [&]() -> int {
      run.input(e_in);
      const MapField f = load_field(e_in);
      const EnergyBreakdown e = dirichlet_energy(f);
      const json j = e;
      if (!e_out.empty()) run.output_json(e_out, j);
      if (!e_csv.empty()) {
        write_energy_csv({{e_in, e}}, e_csv);
        run.output_file(e_csv);
      }
      std::cout << "total " << json(e.total).dump() << " normal " << json(e.normal_part).dump()
                << " tangential " << json(e.tangential_part).dump() << '\n';
      return kExitOk;
    };
  });

  // ---- identity-check ----------------------------------------------------
  auto* id_cmd = app.add_subcommand("identity-check", "Both sides of the two-map energy identity");
  std::string i_h, i_H, i_out;
  id_cmd->add_option("h_field", i_h, "Field JSON of h")->required();
  id_cmd->add_option("H_field", i_H, "Field JSON of H")->required();
  id_cmd->add_option("--out", i_out, "Report JSON");
  id_cmd->callback([&] {
    action = [&]() -> int {
      run.input(i_h);
      run.input(i_H);
      const IdentityGap g = energy_identity_gap(load_field(i_h), load_field(i_H));
      const json j = g;
      if (!i_out.empty()) run.output_json(i_out, j);
      const double rel = g.lhs != 0.0 ? std::abs(g.lhs - g.rhs) / std::abs(g.lhs) : std::abs(g.lhs - g.rhs);
      std::cout << "lhs " << json(g.lhs).dump() << " rhs " << json(g.rhs).dump() << " rel_gap "
                << json(rel).dump() << '\n';
      return kExitOk;
    };
  });

  // ---- bounds ------------------------------------------------------------
  auto* bounds_cmd = app.add_subcommand("bounds", "Free-Lagrangian lower bounds and distortion fields");
  std::string b_in, b_out;
  bounds_cmd->add_option("field", b_in, "Field JSON")->required();
  bounds_cmd->add_option("--out", b_out, "Report JSON");
  bounds_cmd->callback([&] {
    action = [&]() -> int {
      run.input(b_in);
      const MapField f = load_field(b_in);
      if (!f.mesh->domain.is_annulus()) throw InvalidDomainError("bounds need an annulus source");
      if (!f.target) throw ConfigError("field has no recorded target");
      const BoundsReport rep = free_lagrangian_report(f, f.mesh->domain.annulus(), *f.target);
      const json j = rep;
      if (!b_out.empty()) run.output_json(b_out, j);
      json summary = j;
      summary.erase("kN_field");
      summary.erase("kT_field");
      print_json(summary);
      return kExitOk;
    };
  });

  // ---- modulus -----------------------------------------------------------
  auto* mod_cmd = app.add_subcommand("modulus", "Conformal modulus of a doubly connected domain");
  std::string m_domain, m_out;
  ModulusResolution m_res;
  mod_cmd->add_option("--domain", m_domain, "annulus:r,R or washer:rho")->required();
  mod_cmd->add_option("--nr", m_res.n_r, "Rings of the base mesh")->check(CLI::PositiveNumber);
  mod_cmd->add_option("--ntheta", m_res.n_theta, "Rays of the base mesh")->check(CLI::PositiveNumber);
  mod_cmd->add_option("--out", m_out, "Result JSON");
  mod_cmd->callback([&] {
    action = [&]() -> int {
      const DomainSpec d = parse_domain(m_domain);
      run.manifest.config = {{"domain", d}, {"n_r", m_res.n_r}, {"n_theta", m_res.n_theta}};
      const ModulusResult r = conformal_modulus(d, m_res);
      const json j = r;
      if (!m_out.empty()) run.output_json(m_out, j);
      std::cout << "mod " << json(r.mod).dump() << '\n';
      return kExitOk;
    };
  });

  // ---- trace -------------------------------------------------------------
  auto* trace_cmd = app.add_subcommand("trace", "Trace a trajectory of a quadratic differential");
  std::string t_phi, t_from, t_kind = "vertical", t_annulus = "1,2", t_out, t_json;
  TraceOptions t_opt;
  trace_cmd->add_option("--phi", t_phi, "Laurent differential, e.g. laurent:-2:1.0,0.0;0:0.5,0")->required();
  trace_cmd->add_option("--from", t_from, "Start point x,y")->required();
  trace_cmd->add_option("--kind", t_kind, "vertical | horizontal");
  trace_cmd->add_option("--annulus", t_annulus, "Tracing region r,R");
  trace_cmd->add_option("--step", t_opt.step, "Arclength step")->check(CLI::PositiveNumber);
  trace_cmd->add_option("--max-len", t_opt.max_len, "Maximal arclength")->check(CLI::PositiveNumber);
  trace_cmd->add_option("--branch", t_opt.initial_branch, "Initial direction branch, 1 or -1")
      ->check(CLI::IsMember({-1, 1}));
  trace_cmd->add_option("--out", t_out, "Trajectory CSV (x, y, s)")->required();
  trace_cmd->add_option("--json", t_json, "Trajectory JSON");
  trace_cmd->callback([&] {
    action = [&]() -> int {
      const QuadDifferential q = parse_quad_differential(t_phi);
      const std::vector<double> z = parse_numbers(t_from, "--from");
      if (z.size() != 2) throw ConfigError("--from takes x,y");
      const std::vector<double> ann = parse_numbers(t_annulus, "--annulus");
      if (ann.size() != 2) throw ConfigError("--annulus takes r,R");
      const AnnulusSpec a{ann[0], ann[1]};
      a.validate();
      const TrajectoryKind kind = parse_trajectory_kind(t_kind);
      run.manifest.config = {{"phi", q},
                             {"from", z},
                             {"kind", to_string(kind)},
                             {"annulus", {a.r, a.R}},
                             {"step", t_opt.step},
                             {"max_len", t_opt.max_len},
                             {"branch", t_opt.initial_branch}};
      const Trajectory t = trace_trajectory(q, Complex{z[0], z[1]}, kind, t_opt, a);
      write_trajectory_csv(t, t_out);
      run.output_file(t_out);
      if (!t_json.empty()) run.output_json(t_json, json(t));
      std::cout << "points " << t.points.size() << " closed " << (t.closed ? "true" : "false")
                << " termination " << to_string(t.terminated_reason) << '\n';
      return kExitOk;
    };
  });

  // ---- sigma -------------------------------------------------------------
  auto* sigma_cmd = app.add_subcommand("sigma", "Collar radius of the annulus minimizer");
  double g_r = 0.0, g_R = 0.0, g_rs = 0.0, g_Rs = 0.0;
  std::string g_out;
  sigma_cmd->add_option("--r", g_r, "Source inner radius")->required();
  sigma_cmd->add_option("--R", g_R, "Source outer radius")->required();
  sigma_cmd->add_option("--rstar", g_rs, "Target inner radius")->required();
  sigma_cmd->add_option("--Rstar", g_Rs, "Target outer radius")->required();
  sigma_cmd->add_option("--out", g_out, "Result JSON");
  sigma_cmd->callback([&] {
    action = [&]() -> int {
      run.manifest.config = {{"r", g_r}, {"R", g_R}, {"r_star", g_rs}, {"R_star", g_Rs}};
      const auto sigma = nitsche_sigma(g_r, g_R, g_rs, g_Rs);
      json j = {{"nitsche_bound", nitsche_bound(g_r, g_R)}, {"ratio", g_Rs / g_rs}};
      j["sigma"] = sigma ? json(*sigma) : json(nullptr);
      if (!g_out.empty()) run.output_json(g_out, j);
      std::cout << "sigma " << (sigma ? json(*sigma).dump() : std::string("none")) << '\n';
      return kExitOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }
  for (const auto* sub : app.get_subcommands()) run.manifest.command = sub->get_name();
  if (!manifest_override.empty()) run.manifest_path = manifest_override;

  int status = kExitOk;
  std::string error;
  try {
    if (threads > 0) kernels::set_threads(threads);
    status = action();
  } catch (const IoError& e) {
    status = kExitIo;
    error = e.what();
  } catch (const ConfigError& e) {
    status = kExitUsage;
    error = e.what();
  } catch (const InvalidDomainError& e) {
    status = kExitUsage;
    error = e.what();
  } catch (const InvalidTargetError& e) {
    status = kExitUsage;
    error = e.what();
  } catch (const EvalDomainError& e) {
    status = kExitUsage;
    error = e.what();
  } catch (const UndefinedDirectionError& e) {
    status = kExitUsage;
    error = e.what();
  } catch (const Error& e) {
    status = kExitNumeric;
    error = e.what();
  } catch (const std::exception& e) {
    status = kExitNumeric;
    error = e.what();
  }
  if (!error.empty()) std::cerr << "hopfmin " << run.manifest.command << ": " << error << '\n';

  run.manifest.exit_status = status;
  run.manifest.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::optional<std::string> mpath = run.manifest_path;
  if (!mpath && !run.manifest.outputs.empty()) mpath = manifest_path_for(run.manifest.outputs.front());
  if (mpath) {
    try {
      write_json_atomic(*mpath, json(run.manifest));
    } catch (const IoError& e) {
      std::cerr << "hopfmin: " << e.what() << '\n';
      if (status == kExitOk) status = kExitIo;
    }
  }
  return status;
}
