#include "defba/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "defba/defba.hpp"
#include "defba/horizon.hpp"
#include "defba/model_io.hpp"
#include "defba/sdefba.hpp"

namespace defba {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ParsedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot open output file '" + path + "'");
  out << text;
}

std::string render_trajectory(const MetabolicModel& model, const Trajectory& traj,
                              const std::string& format) {
  return format == "json" ? write_trajectory_json(model, traj)
                          : write_trajectory_csv(model, traj);
}

nlohmann::json iteration_json(const IterationRecord& it) {
  nlohmann::json j;
  j["t_k"] = it.t_k;
  j["t_p"] = it.t_p;
  j["t_c"] = it.t_c;
  j["lambda_r"] = std::isnan(it.lambda_r) ? nlohmann::json() : nlohmann::json(it.lambda_r);
  j["mu_bal"] = std::isnan(it.mu_bal) ? nlohmann::json() : nlohmann::json(it.mu_bal);
  j["slice_objective"] = it.slice_objective;
  return j;
}

std::map<std::string, double> parse_thresholds(const std::vector<std::string>& specs) {
  std::map<std::string, double> out;
  for (const std::string& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw SchemaError("--deplete expects SPECIES=THRESHOLD, got '" + s + "'");
    try {
      out[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
    } catch (const std::exception&) {
      throw SchemaError("--deplete threshold in '" + s + "' is not a number");
    }
  }
  return out;
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"dynamic enzyme-cost flux balance analysis"};
  app.require_subcommand(1);

  // --- defba ---
  auto* sub_defba = app.add_subcommand("defba", "full-horizon dynamic solve");
  std::string d_model, d_out, d_format = "csv";
  double d_tend = 0.0, d_dt = 0.0;
  sub_defba->add_option("model", d_model, "model JSON file")->required();
  sub_defba->add_option("--t-end", d_tend, "horizon length, h")->required();
  sub_defba->add_option("--dt", d_dt, "discretization step, h")->required();
  sub_defba->add_option("--out", d_out, "trajectory output file")->required();
  sub_defba->add_option("--format", d_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // --- sdefba ---
  auto* sub_sdefba = app.add_subcommand("sdefba", "receding-horizon dynamic solve");
  std::string s_model, s_out, s_log, s_format = "csv";
  double s_tend = 0.0, s_dt = 0.0, s_tp = 0.0, s_tc = 0.0, s_safety = 0.9, s_fallback = 0.0;
  bool s_auto = false;
  std::vector<std::string> s_deplete;
  sub_sdefba->add_option("model", s_model, "model JSON file")->required();
  sub_sdefba->add_option("--t-end", s_tend, "total span, h")->required();
  sub_sdefba->add_option("--dt", s_dt, "discretization step, h")->required();
  auto* opt_auto = sub_sdefba->add_flag("--auto", s_auto, "derive t_p and t_c from the state");
  auto* opt_tp = sub_sdefba->add_option("--tp", s_tp, "fixed prediction horizon, h");
  auto* opt_tc = sub_sdefba->add_option("--tc", s_tc, "fixed iteration time, h");
  opt_tp->needs(opt_tc);
  opt_tc->needs(opt_tp);
  opt_auto->excludes(opt_tp);
  sub_sdefba->add_option("--safety", s_safety, "safety factor in (0,1)");
  sub_sdefba->add_option("--fallback-tp", s_fallback, "horizon when no linear incentive, h");
  sub_sdefba->add_option("--deplete", s_deplete, "stop threshold SPECIES=MOL")->take_all();
  sub_sdefba->add_option("--log", s_log, "JSON-lines iteration log file");
  sub_sdefba->add_option("--out", s_out, "trajectory output file")->required();
  sub_sdefba->add_option("--format", s_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // --- horizon ---
  auto* sub_horizon = app.add_subcommand("horizon", "static rates and horizon choice");
  std::string h_model, h_curves;
  double h_binit = 0.0, h_safety = 0.9;
  sub_horizon->add_option("model", h_model, "model JSON file")->required();
  auto* opt_binit = sub_horizon->add_option("--b-init", h_binit, "biomass for the linear bound, g");
  sub_horizon->add_option("--safety", h_safety, "safety factor in (0,1)");
  sub_horizon->add_option("--curves", h_curves, "write integral curves CSV here");

  // --- toy ---
  auto* sub_toy = app.add_subcommand("toy", "emit the built-in fixture");
  std::string t_out;
  double t_nutrient = 1e9;
  sub_toy->add_option("--emit", t_out, "model JSON output file")->required();
  sub_toy->add_option("--nutrient", t_nutrient, "initial nutrient amount, mol");

  try {
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*sub_defba) {
      const ParsedModel pm = load_model(d_model);
      const Trajectory traj = solve_defba(pm.model, pm.initial_state, d_tend, d_dt);
      write_file(d_out, render_trajectory(pm.model, traj, d_format));
      out << "objective " << fmt17(traj.objective_value) << " g*h over " << traj.num_points()
          << " grid points\n";
      return 0;
    }

    if (*sub_sdefba) {
      const ParsedModel pm = load_model(s_model);
      SdefbaConfig cfg;
      cfg.t_end = s_tend;
      cfg.d = s_dt;
      cfg.auto_horizon = !(opt_tp->count() > 0);
      cfg.fixed_tp = s_tp;
      cfg.fixed_tc = s_tc;
      cfg.safety_factor = s_safety;
      cfg.fallback_tp = s_fallback;
      cfg.depletion_thresholds = parse_thresholds(s_deplete);

      if (!cfg.auto_horizon) {
        // advisory check of the fixed iteration time against the
        // exponential-slice bound at the initial state
        const HorizonDiagnostics d0 =
            compute_horizon(pm.model, pm.initial_state, s_safety, s_fallback);
        if (d0.mu_bal > 0.0 && d0.lambda_r > d0.mu_bal) {
          const double bound = cfg.fixed_tp - 2.0 * (1.0 / d0.mu_bal - 1.0 / d0.lambda_r);
          if (cfg.fixed_tc >= bound)
            err << "warning: t_c=" << cfg.fixed_tc << " exceeds the exponential-slice bound "
                << bound << " for t_p=" << cfg.fixed_tp
                << "; expect alternating growth phases\n";
        }
      }

      const SdefbaRun run = run_sdefba(pm.model, pm.initial_state, cfg);
      write_file(s_out, render_trajectory(pm.model, run.trajectory, s_format));
      if (!s_log.empty()) {
        std::ostringstream log;
        for (size_t i = 0; i < run.iterations.size(); ++i) {
          nlohmann::json j = iteration_json(run.iterations[i]);
          if (i + 1 == run.iterations.size()) j["stop_reason"] = to_string(run.stop_reason);
          log << j.dump() << "\n";
        }
        write_file(s_log, log.str());
      }
      out << "stop_reason " << to_string(run.stop_reason) << " after " << run.iterations.size()
          << " iterations, stitched objective " << fmt17(run.trajectory.objective_value)
          << " g*h\n";
      if (run.stop_reason == StopReason::infeasible) {
        err << "error: " << run.diagnostic << "\n";
        return 1;
      }
      return 0;
    }

    if (*sub_horizon) {
      const ParsedModel pm = load_model(h_model);
      const double b_init =
          opt_binit->count() > 0 ? h_binit : objective_biomass(pm.model, pm.initial_state);
      const LinearBound lin = max_linear_rate(pm.model, b_init);
      const BalancedRate bal = max_balanced_rate(pm.model, pm.initial_state);
      const auto root = prediction_horizon(lin.lambda_r, bal.mu_bal);
      out << "b_init    " << fmt17(b_init) << " g\n";
      out << "lambda_s  " << fmt17(lin.lambda_s) << " g/h\n";
      out << "lambda_r  " << fmt17(lin.lambda_r) << " 1/h\n";
      out << "mu_bal    " << fmt17(bal.mu_bal) << " 1/h\n";
      if (root) {
        out << "t_p       " << fmt17(*root) << " h\n";
        out << "t_c       " << fmt17(iteration_time(*root, lin.lambda_r, bal.mu_bal, h_safety))
            << " h\n";
      } else {
        out << "t_p       unconstrained (no linear incentive: lambda_r <= mu_bal)\n";
      }
      if (!h_curves.empty()) {
        std::ostringstream csv;
        csv << "t,IB_lin,IB_bal\n";
        const double span = root ? 1.25 * *root : 1.0;
        for (int i = 0; i <= 200; ++i) {
          const double t = span * i / 200.0;
          csv << fmt17(t) << "," << fmt17(integral_linear(t, lin.lambda_r, b_init)) << ","
              << fmt17(integral_balanced(t, bal.mu_bal, b_init)) << "\n";
        }
        write_file(h_curves, csv.str());
      }
      return 0;
    }

    if (*sub_toy) {
      const ParsedModel pm = toy_model(t_nutrient);
      write_file(t_out, serialize_model(pm.model, pm.initial_state, pm.default_dt));
      out << "wrote " << t_out << "\n";
      return 0;
    }
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    // infeasible, unbounded, numerical failure, bracket/bound trouble
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

} // namespace defba
