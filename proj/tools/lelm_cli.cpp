#include "lelm/checkpoint.hpp"
#include "lelm/run_io.hpp"
#include "lelm/trainer.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace lelm;

namespace {

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

KeyValues config_to_kv(const TrainConfig& config) {
  KeyValues kv;
  kv["problem"] = config.problem;
  kv["depth"] = std::to_string(config.depth);
  kv["width"] = std::to_string(config.width);
  kv["beta_shock"] = format_double(config.weights.beta_shock);
  kv["beta_boundary"] = format_double(config.weights.beta_boundary);
  kv["beta_initial"] = format_double(config.weights.beta_initial);
  kv["interior_weight"] = format_double(config.weights.interior_weight);
  kv["n_interior"] = std::to_string(config.sizes.n_interior);
  kv["n_shock"] = std::to_string(config.sizes.n_shock);
  kv["n_boundary"] = std::to_string(config.sizes.n_boundary);
  kv["n_initial"] = std::to_string(config.sizes.n_initial);
  kv["epochs"] = std::to_string(config.epochs);
  kv["base_lr"] = format_double(config.base_lr);
  std::string ms;
  for (size_t i = 0; i < config.milestones.size(); ++i)
    ms += (i ? "," : "") + std::to_string(config.milestones[i]);
  kv["milestones"] = ms;
  kv["minibatch_fraction"] = format_double(config.minibatch_fraction);
  kv["seed"] = std::to_string(config.seed);
  kv["test_nx"] = std::to_string(config.test_nx);
  kv["test_nt"] = std::to_string(config.test_nt);
  kv["s_init"] = format_double(config.s_init);
  kv["s_init_set"] = config.s_init_set ? "1" : "0";
  kv["strict_determinism"] = config.strict_determinism ? "1" : "0";
  return kv;
}

TrainConfig config_from_kv(const KeyValues& kv) {
  TrainConfig config;
  for (const auto& [key, value] : kv) {
    if (key == "problem") config.problem = value;
    else if (key == "depth") config.depth = std::stoi(value);
    else if (key == "width") config.width = std::stoi(value);
    else if (key == "beta_shock") config.weights.beta_shock = std::stod(value);
    else if (key == "beta_boundary") config.weights.beta_boundary = std::stod(value);
    else if (key == "beta_initial") config.weights.beta_initial = std::stod(value);
    else if (key == "interior_weight") config.weights.interior_weight = std::stod(value);
    else if (key == "n_interior") config.sizes.n_interior = std::stoll(value);
    else if (key == "n_shock") config.sizes.n_shock = std::stoll(value);
    else if (key == "n_boundary") config.sizes.n_boundary = std::stoll(value);
    else if (key == "n_initial") config.sizes.n_initial = std::stoll(value);
    else if (key == "epochs") config.epochs = std::stoll(value);
    else if (key == "base_lr") config.base_lr = std::stod(value);
    else if (key == "milestones") {
      std::stringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) config.milestones.push_back(std::stoll(tok));
    } else if (key == "minibatch_fraction") config.minibatch_fraction = std::stod(value);
    else if (key == "seed") config.seed = std::stoull(value);
    else if (key == "test_nx") config.test_nx = std::stoi(value);
    else if (key == "test_nt") config.test_nt = std::stoi(value);
    else if (key == "s_init") config.s_init = std::stod(value);
    else if (key == "s_init_set") config.s_init_set = value == "1";
    else if (key == "strict_determinism") config.strict_determinism = value == "1";
    else throw std::runtime_error("unknown config key '" + key + "'");
  }
  return config;
}

ShockGeometry geometry_for(const ProblemSpec& problem, const Checkpoint& ckpt) {
  if (!problem.inverse) return build_geometry(problem);
  if (!ckpt.speeds)
    throw std::runtime_error("checkpoint carries no speed grid for an inverse problem");
  return refresh_geometry_clipped(problem, integrate_curve(*ckpt.speeds));
}

void export_solution_grid(const std::string& path, const Network& net,
                          const ShockGeometry& geometry, const ProblemSpec& problem,
                          int nx, int nt, const double* fixed_t = nullptr) {
  std::vector<std::string> header;
  header.push_back("x");
  if (problem.dim == 2) header.push_back("y");
  header.insert(header.end(), {"t", "u_exact", "u_pred", "abs_err"});
  CsvWriter csv(path, header);
  const int ny = problem.dim == 2 ? nx : 1;
  for (int it = 0; it < (fixed_t ? 1 : nt); ++it) {
    const double t = fixed_t ? *fixed_t : problem.horizon * it / (nt - 1);
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        double x[2] = {
            problem.x_min[0] + (problem.x_max[0] - problem.x_min[0]) * ix / (nx - 1),
            problem.dim == 2
                ? problem.x_min[1] + (problem.x_max[1] - problem.x_min[1]) * iy / (ny - 1)
                : 0.0};
        const double ue = exact(problem, x, t);
        const double up = project(net, geometry, problem, x, t);
        std::vector<double> row = {x[0]};
        if (problem.dim == 2) row.push_back(x[1]);
        row.insert(row.end(), {t, ue, up, std::abs(ue - up)});
        csv.row(row);
      }
    }
  }
}

int cmd_train(const TrainConfig& config, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const ProblemSpec& problem = get_problem(config.problem);
  const TrainResult result = train(config);

  write_key_values(out_dir + "/config.txt", config_to_kv(config));

  Checkpoint ckpt;
  ckpt.net = result.net;
  if (result.inverse) ckpt.speeds = result.best_speeds;
  save_checkpoint(out_dir + "/checkpoint.bin", ckpt);

  {
    CsvWriter csv(out_dir + "/loss_history.csv",
                  {"epoch", "interior", "shock", "boundary", "initial", "total", "lr"});
    for (const auto& h : result.history)
      csv.row({static_cast<double>(h.epoch), h.interior, h.shock, h.boundary, h.initial,
               h.total, h.lr});
  }

  KeyValues metrics;
  metrics["relative_l2"] = format_double(result.relative_l2);
  metrics["best_loss"] = format_double(result.best_loss);
  metrics["best_epoch"] = std::to_string(result.best_epoch);
  metrics["wall_clock_s"] = format_double(result.wall_clock_s);
  if (result.inverse) metrics["final_s_hat"] = format_double(result.final_s_hat);
  write_key_values(out_dir + "/metrics.txt", metrics);

  const ShockGeometry geometry = geometry_for(problem, ckpt);
  export_solution_grid(out_dir + "/solution_grid.csv", result.net, geometry, problem,
                       problem.dim == 2 ? 101 : 201, problem.dim == 2 ? 9 : 101);

  if (result.inverse) {
    CsvWriter csv(out_dir + "/inferred_curve.csv", {"t", "s_hat", "gamma_hat"});
    const CurveEstimate& curve = result.best_curve;
    for (Eigen::Index i = 0; i < curve.t_nodes.size(); ++i)
      csv.row({curve.t_nodes(i), curve.speed(curve.t_nodes(i)), curve.gamma_nodes(i)});
  }

  std::cout << "relative_l2=" << format_double(result.relative_l2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifted collocation solver for scalar conservation laws with shocks"};
  app.require_subcommand(1);

  // train ---------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "train a model and write a run directory");
  std::string config_path, problem_name, out_dir = "run";
  TrainConfig flags;
  flags.epochs = -2;  // sentinel: not given on the command line
  double s_init_flag = 0;
  bool s_init_given = false;
  std::int64_t seed_flag = -1;
  train_cmd->add_option("--config", config_path, "key=value config file");
  train_cmd->add_option("--problem", problem_name, "registered problem name");
  train_cmd->add_option("--out", out_dir, "run directory");
  train_cmd->add_option("--epochs", flags.epochs, "training epochs");
  train_cmd->add_option("--depth", flags.depth, "hidden layers");
  train_cmd->add_option("--width", flags.width, "hidden width");
  train_cmd->add_option("--seed", seed_flag, "random seed");
  train_cmd->add_option("--s-init", s_init_flag, "initial shock-speed guess (inverse)")
      ->each([&](const std::string&) { s_init_given = true; });
  train_cmd->add_option("--minibatch-fraction", flags.minibatch_fraction,
                        "fraction of each dataset per step");
  train_cmd->add_option("--base-lr", flags.base_lr, "initial learning rate");
  bool strict = true;
  train_cmd->add_flag("--strict-determinism,!--no-strict-determinism", strict,
                      "serial reductions for bitwise reproducibility");

  // eval ----------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "recompute the test metric from a run");
  std::string run_dir;
  int eval_nx = 0, eval_nt = 0;
  eval_cmd->add_option("--run", run_dir, "run directory")->required();
  eval_cmd->add_option("--nx", eval_nx, "spatial grid points per axis");
  eval_cmd->add_option("--nt", eval_nt, "time slices");

  // export --------------------------------------------------------------
  auto* export_cmd = app.add_subcommand("export", "write solution CSVs from a run");
  std::string export_run;
  std::vector<double> slice_ts;
  int export_nx = 201, export_nt = 101;
  export_cmd->add_option("--run", export_run, "run directory")->required();
  export_cmd->add_option("--slice", slice_ts, "time values for slice CSVs");
  export_cmd->add_option("--nx", export_nx, "grid points per spatial axis");
  export_cmd->add_option("--nt", export_nt, "time slices for the full grid");

  // export-geometry -------------------------------------------------------
  auto* geo_cmd = app.add_subcommand("export-geometry", "dump sheet curves to CSV");
  std::string geo_problem, geo_out = "geometry.csv", geo_run;
  int geo_samples = 101;
  geo_cmd->add_option("--problem", geo_problem, "registered problem name")->required();
  geo_cmd->add_option("--out", geo_out, "output CSV");
  geo_cmd->add_option("--samples", geo_samples, "t samples per sheet");
  geo_cmd->add_option("--run", geo_run, "run directory (inverse problems)");

  // export-batch ----------------------------------------------------------
  auto* batch_cmd = app.add_subcommand("export-batch", "dump sampled datasets to CSV");
  std::string batch_problem, batch_prefix = "batch";
  std::int64_t batch_seed = 1;
  batch_cmd->add_option("--problem", batch_problem, "registered problem name")->required();
  batch_cmd->add_option("--out", batch_prefix, "output file prefix");
  batch_cmd->add_option("--seed", batch_seed, "sampling seed");

  auto* list_cmd = app.add_subcommand("list-problems", "print registered problem names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      for (const auto& name : problem_names()) std::cout << name << "\n";
      return 0;
    }

    if (train_cmd->parsed()) {
      TrainConfig config;
      if (!config_path.empty()) config = config_from_kv(read_key_values(config_path));
      if (!problem_name.empty()) config.problem = problem_name;
      if (config.problem.empty())
        throw std::runtime_error("no problem given (use --problem or --config)");
      if (flags.epochs != -2) config.epochs = flags.epochs;
      if (flags.depth > 0) config.depth = flags.depth;
      if (flags.width > 0) config.width = flags.width;
      if (seed_flag >= 0) config.seed = static_cast<std::uint64_t>(seed_flag);
      if (s_init_given) {
        config.s_init = s_init_flag;
        config.s_init_set = true;
      }
      if (flags.minibatch_fraction != 1.0) config.minibatch_fraction = flags.minibatch_fraction;
      if (flags.base_lr != 0.01) config.base_lr = flags.base_lr;
      config.strict_determinism = strict;
      return cmd_train(config, out_dir);
    }

    if (eval_cmd->parsed()) {
      const TrainConfig config = config_from_kv(read_key_values(run_dir + "/config.txt"));
      const ProblemSpec& problem = get_problem(config.problem);
      const Checkpoint ckpt = load_checkpoint(run_dir + "/checkpoint.bin");
      const ShockGeometry geometry = geometry_for(problem, ckpt);
      const int nx = eval_nx > 0 ? eval_nx : (config.test_nx > 0 ? config.test_nx
                                                                 : problem.defaults.test_nx);
      const int nt = eval_nt > 0 ? eval_nt : (config.test_nt > 0 ? config.test_nt
                                                                 : problem.defaults.test_nt);
      const double err = relative_l2(ckpt.net, geometry, problem, nx, nt);
      std::cout << "relative_l2=" << format_double(err) << "\n";
      append_key_values(run_dir + "/metrics.txt", {{"eval_relative_l2", format_double(err)}});
      return 0;
    }

    if (export_cmd->parsed()) {
      const TrainConfig config = config_from_kv(read_key_values(export_run + "/config.txt"));
      const ProblemSpec& problem = get_problem(config.problem);
      const Checkpoint ckpt = load_checkpoint(export_run + "/checkpoint.bin");
      const ShockGeometry geometry = geometry_for(problem, ckpt);
      export_solution_grid(export_run + "/solution_grid.csv", ckpt.net, geometry, problem,
                           export_nx, export_nt);
      for (size_t i = 0; i < slice_ts.size(); ++i) {
        std::ostringstream name;
        name << export_run << "/slice_" << i << ".csv";
        export_solution_grid(name.str(), ckpt.net, geometry, problem, export_nx, 1,
                             &slice_ts[i]);
      }
      return 0;
    }

    if (geo_cmd->parsed()) {
      const ProblemSpec& problem = get_problem(geo_problem);
      ShockGeometry geometry;
      if (problem.inverse) {
        if (geo_run.empty())
          throw std::runtime_error("inverse problems need --run for the inferred curve");
        geometry = geometry_for(problem, load_checkpoint(geo_run + "/checkpoint.bin"));
      } else {
        geometry = build_geometry(problem);
      }
      CsvWriter csv(geo_out, {"sheet_id", "t", "gamma", "s"});
      for (const auto& sheet : geometry.sheets)
        for (int i = 0; i < geo_samples; ++i) {
          const double t = sheet.t_a + (sheet.t_b - sheet.t_a) * i / (geo_samples - 1);
          csv.row({static_cast<double>(sheet.id), t, sheet.gamma(t), sheet.speed(t)});
        }
      return 0;
    }

    if (batch_cmd->parsed()) {
      const ProblemSpec& problem = get_problem(batch_problem);
      const ShockGeometry geometry = build_geometry(problem);
      const ProblemDefaults& d = problem.defaults;
      const CollocationBatch batch =
          sample_batch(problem, geometry, {d.n_interior, d.n_shock, d.n_boundary, d.n_initial},
                       static_cast<std::uint64_t>(batch_seed));
      const bool two_d = problem.dim == 2;
      auto dump_inputs = [&](const std::string& path, const Mat& m) {
        std::vector<std::string> header = {"x"};
        if (two_d) header.push_back("y");
        header.insert(header.end(), {"t", "phi"});
        CsvWriter csv(path, header);
        for (Eigen::Index i = 0; i < m.cols(); ++i) {
          std::vector<double> row;
          for (Eigen::Index r = 0; r < m.rows(); ++r) row.push_back(m(r, i));
          csv.row(row);
        }
      };
      dump_inputs(batch_prefix + "_interior.csv", batch.interior);
      dump_inputs(batch_prefix + "_boundary.csv", batch.boundary);
      dump_inputs(batch_prefix + "_initial.csv", batch.initial);
      {
        std::vector<std::string> header = {"x"};
        if (two_d) header.push_back("y");
        header.insert(header.end(), {"t", "phi_minus", "phi_plus", "s", "nu"});
        CsvWriter csv(batch_prefix + "_shock.csv", header);
        const ShockPoints& p = batch.shock;
        for (Eigen::Index i = 0; i < p.size(); ++i) {
          std::vector<double> row;
          for (Eigen::Index r = 0; r < p.xt.rows(); ++r) row.push_back(p.xt(r, i));
          row.insert(row.end(), {p.phi_minus(i), p.phi_plus(i), p.s(i), p.nu(0, i)});
          csv.row(row);
        }
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
