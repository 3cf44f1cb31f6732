#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "invrig/errors.hpp"
#include "invrig_cli/commands.hpp"

namespace invrig::cli {
namespace {

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "invrig_out";
}

struct Raw {
  std::string method = "cd-quartic";
  std::vector<std::string> methods;
  std::string ordering = "decreasing-magnitude";
};

void add_solver_options(CLI::App* cmd, RunConfig& c, Raw& raw) {
  cmd->add_option("--method", raw.method, "cd-quartic, cd-linear, seol, joshi or cetinaslan")
      ->capture_default_str();
  cmd->add_option("--alpha", c.alpha, "L1 regularization weight")->capture_default_str();
  cmd->add_option("--passes", c.passes, "coordinate descent passes")->capture_default_str();
  cmd->add_option("--ordering", raw.ordering, "coordinate ordering strategy")
      ->capture_default_str();
  cmd->add_flag("--normalized-correlation", c.normalized_correlation,
                "correlation orderings divide b_i^T r by ||b_i||");
  cmd->add_option("--seed", c.seed, "seed for random orderings")->capture_default_str();
  cmd->add_option("--threads", c.threads, "worker threads for frame-level parallelism")
      ->capture_default_str();
}

void add_out_option(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--out", c.out_dir, "output directory (default: $INVRIG_OUT_DIR or ./invrig_out)");
}

void resolve(RunConfig& c, const Raw& raw) {
  const auto method = parse_method(raw.method);
  if (!method) throw ContractError("unknown method '" + raw.method + "'");
  c.method = *method;
  for (const auto& name : raw.methods) {
    const auto m = parse_method(name);
    if (!m) throw ContractError("unknown method '" + name + "'");
    c.methods.push_back(*m);
  }
  const auto ordering = parse_ordering(raw.ordering);
  if (!ordering) throw ContractError("unknown ordering '" + raw.ordering + "'");
  c.ordering = *ordering;
  if (c.threads < 1) throw ContractError("--threads must be >= 1");
  if (c.out_dir.empty()) c.out_dir = default_out_dir();
  for (double a : c.alpha_grid) {
    if (!(a >= 0.0)) throw ContractError("--alpha-grid values must be >= 0");
  }
  for (double s : c.sigma2_grid) {
    if (!(s >= 0.0)) throw ContractError("--sigma2-grid values must be >= 0");
  }
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Blendshape rig inversion: generate data, fit weights, evaluate and compare"};
  app.require_subcommand(1);
  RunConfig c;
  Raw raw;
  bool no_corrections = false;

  auto* gen = app.add_subcommand("generate", "Synthesize a rig, a clean sequence and a noisy copy");
  gen->add_option("--seed", c.seed, "base seed")->capture_default_str();
  gen->add_option("--sigma2", c.sigma2, "noise variance per coordinate (cm^2)")->capture_default_str();
  gen->add_option("--blendshapes", c.rig_spec.blendshapes)->capture_default_str();
  gen->add_option("--vertices", c.rig_spec.vertices)->capture_default_str();
  gen->add_option("--pairs", c.rig_spec.pairs)->capture_default_str();
  gen->add_option("--triplets", c.rig_spec.triplets)->capture_default_str();
  gen->add_option("--quads", c.rig_spec.quads)->capture_default_str();
  gen->add_flag("--no-corrections", no_corrections, "linear rig without corrective terms");
  gen->add_option("--influence-radius", c.rig_spec.influence_radius, "fraction of head width")
      ->capture_default_str();
  gen->add_option("--regions", c.rig_spec.regions, "clusters of blendshape centers (0 = none)")
      ->capture_default_str();
  gen->add_flag("--spread-centers", c.rig_spec.spread_centers,
                "farthest-point blendshape centers (well-conditioned rig)");
  gen->add_option("--frame-count", c.sequence_spec.frames)->capture_default_str();
  gen->add_option("--sparsity", c.sequence_spec.sparsity, "active weights per frame")
      ->capture_default_str();
  gen->add_option("--keypose-interval", c.sequence_spec.keypose_interval)->capture_default_str();
  add_out_option(gen, c);

  auto* fit = app.add_subcommand("fit", "Fit blendshape weights to every frame of a mesh animation");
  fit->add_option("--rig", c.rig_path)->required();
  fit->add_option("--frames", c.frames_path, "mesh animation to fit")->required();
  add_solver_options(fit, c, raw);
  add_out_option(fit, c);

  auto* eval = app.add_subcommand("eval", "Score fitted weights against the clean sequence");
  eval->add_option("--rig", c.rig_path)->required();
  eval->add_option("--weights", c.weights_path, "fitted weight animation")->required();
  eval->add_option("--clean", c.clean_path, "clean mesh animation")->required();
  eval->add_option("--timing", c.timing_path, "timing.csv written by fit");
  add_out_option(eval, c);

  auto* sweep = app.add_subcommand("sweep", "Fit and evaluate over alpha, method and noise grids");
  sweep->add_option("--rig", c.rig_path)->required();
  sweep->add_option("--clean", c.clean_path, "clean mesh animation")->required();
  sweep->add_option("--frames", c.frames_path, "noisy animation (otherwise noise is generated per sigma2)");
  sweep->add_option("--methods", raw.methods, "comma-separated methods (default: all)")->delimiter(',');
  sweep->add_option("--alpha-grid", c.alpha_grid)->delimiter(',')->capture_default_str();
  auto* sigma_opt = sweep->add_option("--sigma2-grid", c.sigma2_grid)->delimiter(',')->capture_default_str();
  add_solver_options(sweep, c, raw);
  add_out_option(sweep, c);

  auto* cmp = app.add_subcommand("compare-orderings", "Run every ordering strategy at a fixed alpha");
  cmp->add_option("--rig", c.rig_path)->required();
  cmp->add_option("--frames", c.frames_path, "mesh animation to fit")->required();
  cmp->add_option("--clean", c.clean_path, "clean mesh animation")->required();
  add_solver_options(cmp, c, raw);
  add_out_option(cmp, c);
  cmp->get_option("--alpha")->default_val(0.5);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    resolve(c, raw);
    c.sigma2_grid_given = sigma_opt->count() > 0;
    if (no_corrections) c.rig_spec.pairs = c.rig_spec.triplets = c.rig_spec.quads = 0;
    if (*gen) {
      c.subcommand = "generate";
      cmd_generate(c);
    } else if (*fit) {
      c.subcommand = "fit";
      cmd_fit(c);
    } else if (*eval) {
      c.subcommand = "eval";
      cmd_eval(c);
    } else if (*sweep) {
      c.subcommand = "sweep";
      cmd_sweep(c);
    } else {
      c.subcommand = "compare-orderings";
      cmd_compare_orderings(c);
    }
  } catch (const ContractError& e) {
    std::cerr << "invrig: configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DataError& e) {
    std::cerr << "invrig: data error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "invrig: data error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("invrig");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace invrig::cli
