#include "invrig_cli/commands.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "invrig/dataio.hpp"
#include "invrig/errors.hpp"
#include "invrig/metrics.hpp"
#include "invrig/pipeline.hpp"
#include "invrig/random.hpp"

namespace invrig::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

void require_path(const fs::path& path, const char* flag) {
  if (path.empty()) throw ContractError(fmt::format("{} is required", flag));
}

void write_json(const fs::path& path, const ordered_json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

ordered_json manifest_header(const RunConfig& config) {
  ordered_json doc;
  doc["format"] = "invrig-manifest";
  doc["schema_version"] = kOutputSchemaVersion;
  doc["subcommand"] = config.subcommand;
  return doc;
}

ordered_json solver_json(const RunConfig& config) {
  return {{"method", std::string(to_string(config.method))},
          {"alpha", config.alpha},
          {"passes", config.passes},
          {"ordering", std::string(to_string(config.ordering))},
          {"normalized_correlation", config.normalized_correlation},
          {"seed", config.seed},
          {"threads", config.threads}};
}

SolverConfig solver_config(const RunConfig& config, Method method, double alpha,
                           OrderingKind ordering) {
  SolverConfig c;
  c.method = method;
  c.alpha = alpha;
  c.passes = config.passes;
  c.ordering = {ordering, config.seed, config.normalized_correlation};
  c.validate();
  return c;
}

std::vector<double> read_timing(const fs::path& path, Index frames) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot read '{}'", path.string()));
  std::string line;
  std::getline(in, line);
  if (line != "frame,solve_time_s") throw DataError("timing file has an unexpected header");
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    double value = 0.0;
    const char* first = comma == std::string::npos ? nullptr : line.data() + comma + 1;
    if (!first || std::from_chars(first, line.data() + line.size(), value).ec != std::errc{}) {
      throw DataError(fmt::format("malformed timing row '{}'", line));
    }
    times.push_back(value);
  }
  if (static_cast<Index>(times.size()) != frames) {
    throw DataError(fmt::format("timing has {} rows for {} frames", times.size(), frames));
  }
  return times;
}

void write_timing(const fs::path& path, std::span<const double> times) {
  auto out = open_out(path);
  out << "frame,solve_time_s\n";
  for (std::size_t t = 0; t < times.size(); ++t) out << t << ',' << format_number(times[t]) << '\n';
}

const char* kMetricColumns = "rmse_mean,rmse_p95,cardinality,l1_norm,roughness";

std::string metric_cells(const MetricSummary& s) {
  return fmt::format("{},{},{},{},{}", format_number(s.rmse_mean), format_number(s.rmse_p95),
                     format_number(s.cardinality), format_number(s.l1_norm),
                     format_number(s.roughness));
}

ordered_json metric_metadata() {
  return {{"cardinality_eps", kCardinalityEps},
          {"rmse_p95_rule", "nearest-rank"},
          {"roughness_aggregate", "mean-over-weights"},
          {"reconstruction", "quartic"}};
}

}  // namespace

void cmd_generate(const RunConfig& config) {
  SyntheticRigSpec rig_spec = config.rig_spec;
  rig_spec.seed = derive_seed(config.seed, 0);
  SequenceSpec seq_spec = config.sequence_spec;
  seq_spec.seed = derive_seed(config.seed, 1);
  const std::uint64_t noise_seed = derive_seed(config.seed, 2);

  const auto rig = generate_rig(rig_spec);
  const auto seq = generate_sequence(rig, seq_spec);
  const auto noisy = add_noise(seq.clean, config.sigma2, noise_seed);

  ensure_dir(config.out_dir);
  save_rig(config.out_dir / "rig.txt", rig);
  save_animation(config.out_dir / "clean.anim", seq.clean);
  save_animation(config.out_dir / "noisy.anim", noisy);
  save_animation(config.out_dir / "weights_gt.anim", seq.weights);

  auto doc = manifest_header(config);
  doc["seed"] = config.seed;
  doc["rig"] = {{"blendshapes", rig_spec.blendshapes},
                {"vertices", rig_spec.vertices},
                {"pairs", rig_spec.pairs},
                {"triplets", rig_spec.triplets},
                {"quads", rig_spec.quads},
                {"head_width_cm", rig_spec.head_width_cm},
                {"influence_radius", rig_spec.influence_radius},
                {"peak_median_cm", rig_spec.peak_median_cm},
                {"peak_log_sd", rig_spec.peak_log_sd},
                {"regions", rig_spec.regions},
                {"spread_centers", rig_spec.spread_centers},
                {"correction_scale", rig_spec.correction_scale},
                {"seed", rig_spec.seed}};
  doc["sequence"] = {{"frames", seq_spec.frames},
                     {"sparsity", seq_spec.sparsity},
                     {"keypose_interval", seq_spec.keypose_interval},
                     {"swaps_per_keypose", seq_spec.swaps_per_keypose},
                     {"min_activation", seq_spec.min_activation},
                     {"max_activation", seq_spec.max_activation},
                     {"seed", seq_spec.seed}};
  doc["noise"] = {{"sigma2", config.sigma2}, {"sigma2_is", "variance"}, {"seed", noise_seed}};
  doc["outputs"] = {"rig.txt", "clean.anim", "noisy.anim", "weights_gt.anim"};
  write_json(config.out_dir / "generate_manifest.json", doc);
}

void cmd_fit(const RunConfig& config) {
  require_path(config.rig_path, "--rig");
  require_path(config.frames_path, "--frames");
  const auto rig = load_rig(config.rig_path);
  const auto frames = load_animation(config.frames_path);
  const auto solver = solver_config(config, config.method, config.alpha, config.ordering);
  const auto fit = fit_sequence(rig, frames, solver, config.threads);

  ensure_dir(config.out_dir);
  save_animation(config.out_dir / "weights.anim", Animation::from_weights(fit.weights));
  {
    auto out = open_out(config.out_dir / "fit_report.csv");
    out << "frame,coordinate_visits,degenerate_visits,objective,preclip_cardinality\n";
    for (std::size_t t = 0; t < fit.reports.size(); ++t) {
      const auto& r = fit.reports[t];
      out << t << ',' << r.coordinate_visits << ',' << r.degenerate_visits << ','
          << format_number(r.objective_trace.back()) << ','
          << (r.preclip_cardinality ? std::to_string(*r.preclip_cardinality) : "") << '\n';
    }
  }
  {
    auto out = open_out(config.out_dir / "objective_trace.csv");
    out << "frame,pass,objective\n";
    for (std::size_t t = 0; t < fit.reports.size(); ++t) {
      const auto& trace = fit.reports[t].objective_trace;
      for (std::size_t p = 0; p < trace.size(); ++p) {
        out << t << ',' << p + 1 << ',' << format_number(trace[p]) << '\n';
      }
    }
  }
  write_timing(config.out_dir / "timing.csv", fit.solve_times());

  auto doc = manifest_header(config);
  doc["rig"] = config.rig_path.string();
  doc["frames"] = config.frames_path.string();
  doc["input_noise"] = {{"noisy", frames.noise.noisy},
                        {"sigma2", frames.noise.sigma2},
                        {"seed", frames.noise.seed}};
  doc["solver"] = solver_json(config);
  doc["fitting_rig"] = fitting_rig(config.method) == RigKind::Linear ? "linear" : "quartic";
  doc["timing_single_threaded"] = config.threads == 1;
  doc["outputs"] = {"weights.anim", "fit_report.csv", "objective_trace.csv", "timing.csv"};
  write_json(config.out_dir / "fit_manifest.json", doc);
}

void cmd_eval(const RunConfig& config) {
  require_path(config.rig_path, "--rig");
  require_path(config.weights_path, "--weights");
  require_path(config.clean_path, "--clean");
  const auto rig = load_rig(config.rig_path);
  const auto weights = load_animation(config.weights_path);
  if (weights.kind != FrameKind::Weights) throw DataError("--weights must be a weight animation");
  const auto clean = load_animation(config.clean_path);
  std::vector<double> times;
  if (!config.timing_path.empty()) times = read_timing(config.timing_path, weights.frame_count());
  const auto table = evaluate_sequence(rig, weights.frames, clean, times);
  const auto summary = table.summary();

  ensure_dir(config.out_dir);
  {
    auto out = open_out(config.out_dir / "frame_metrics.csv");
    write_frame_csv(out, table, false);
  }
  {
    auto out = open_out(config.out_dir / "roughness.csv");
    write_roughness_csv(out, table);
  }
  {
    auto out = open_out(config.out_dir / "summary.csv");
    out << kMetricColumns << '\n' << metric_cells(summary) << '\n';
  }
  auto doc = manifest_header(config);
  doc["rig"] = config.rig_path.string();
  doc["weights"] = config.weights_path.string();
  doc["clean"] = config.clean_path.string();
  doc["frames"] = weights.frame_count();
  doc["metrics"] = metric_metadata();
  doc["summary"] = {{"rmse_mean", summary.rmse_mean},
                    {"rmse_p95", summary.rmse_p95},
                    {"cardinality", summary.cardinality},
                    {"l1_norm", summary.l1_norm},
                    {"roughness", summary.roughness}};
  std::vector<std::string> outputs{"frame_metrics.csv", "roughness.csv", "summary.csv"};
  if (!times.empty()) {
    write_timing(config.out_dir / "timing.csv", times);
    doc["summary"]["solve_time_s"] = summary.solve_time_s;
    outputs.push_back("timing.csv");
  }
  doc["outputs"] = outputs;
  write_json(config.out_dir / "summary.json", doc);
}

void cmd_sweep(const RunConfig& config) {
  require_path(config.rig_path, "--rig");
  require_path(config.clean_path, "--clean");
  const auto rig = load_rig(config.rig_path);
  const auto clean = load_animation(config.clean_path);
  if (clean.noise.noisy) throw DataError("--clean points at a noisy animation");

  std::vector<Animation> inputs;
  if (!config.frames_path.empty() && !config.sigma2_grid_given) {
    inputs.push_back(load_animation(config.frames_path));
  } else {
    for (std::size_t k = 0; k < config.sigma2_grid.size(); ++k) {
      inputs.push_back(add_noise(clean, config.sigma2_grid[k], derive_seed(config.seed, k)));
    }
  }
  const std::vector<Method> methods =
      config.methods.empty() ? std::vector<Method>(std::begin(kAllMethods), std::end(kAllMethods))
                             : config.methods;

  ensure_dir(config.out_dir);
  auto out = open_out(config.out_dir / "sweep.csv");
  out << "sigma2,method,alpha," << kMetricColumns << ",solve_time_s\n";
  for (const auto& input : inputs) {
    for (Method method : methods) {
      const std::vector<double> alphas =
          uses_alpha(method) ? config.alpha_grid : std::vector<double>{0.0};
      for (double alpha : alphas) {
        const auto solver = solver_config(config, method, alpha, config.ordering);
        const auto fit = fit_sequence(rig, input, solver, config.threads);
        const auto summary =
            evaluate_sequence(rig, fit.weights, clean, fit.solve_times()).summary();
        out << format_number(input.noise.sigma2) << ',' << to_string(method) << ','
            << format_number(alpha) << ',' << metric_cells(summary) << ','
            << format_number(summary.solve_time_s) << '\n';
      }
    }
  }

  auto doc = manifest_header(config);
  doc["rig"] = config.rig_path.string();
  doc["clean"] = config.clean_path.string();
  if (!config.frames_path.empty() && !config.sigma2_grid_given) {
    doc["frames"] = config.frames_path.string();
  } else {
    doc["sigma2_grid"] = config.sigma2_grid;
    doc["noise_seed_base"] = config.seed;
  }
  std::vector<std::string> names;
  for (Method m : methods) names.emplace_back(to_string(m));
  doc["methods"] = names;
  doc["alpha_grid"] = config.alpha_grid;
  doc["solver"] = solver_json(config);
  doc["metrics"] = metric_metadata();
  doc["outputs"] = {"sweep.csv"};
  write_json(config.out_dir / "sweep_manifest.json", doc);
}

void cmd_compare_orderings(const RunConfig& config) {
  require_path(config.rig_path, "--rig");
  require_path(config.frames_path, "--frames");
  require_path(config.clean_path, "--clean");
  if (config.method != Method::CdQuartic && config.method != Method::CdLinear) {
    throw ContractError("compare-orderings runs the coordinate descent methods only");
  }
  const auto rig = load_rig(config.rig_path);
  const auto frames = load_animation(config.frames_path);
  const auto clean = load_animation(config.clean_path);

  ensure_dir(config.out_dir);
  auto out = open_out(config.out_dir / "orderings.csv");
  out << "ordering," << kMetricColumns << ",coordinate_visits,solve_time_s\n";
  for (OrderingKind kind : kAllOrderings) {
    const auto solver = solver_config(config, config.method, config.alpha, kind);
    const auto fit = fit_sequence(rig, frames, solver, config.threads);
    const auto summary = evaluate_sequence(rig, fit.weights, clean, fit.solve_times()).summary();
    double visits = 0.0;
    for (const auto& r : fit.reports) visits += static_cast<double>(r.coordinate_visits);
    visits /= static_cast<double>(std::max<std::size_t>(1, fit.reports.size()));
    out << to_string(kind) << ',' << metric_cells(summary) << ',' << format_number(visits) << ','
        << format_number(summary.solve_time_s) << '\n';
  }

  auto doc = manifest_header(config);
  doc["rig"] = config.rig_path.string();
  doc["frames"] = config.frames_path.string();
  doc["clean"] = config.clean_path.string();
  doc["solver"] = solver_json(config);
  doc["metrics"] = metric_metadata();
  doc["outputs"] = {"orderings.csv"};
  write_json(config.out_dir / "orderings_manifest.json", doc);
}

}  // namespace invrig::cli
