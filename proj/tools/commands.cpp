#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "zgt2/config.hpp"
#include "zgt2/error.hpp"
#include "zgt2/experiment.hpp"
#include "zgt2/grad.hpp"
#include "zgt2/hash.hpp"
#include "zgt2/model_io.hpp"
#include "zgt2/rng.hpp"
#include "zgt2/synthetic.hpp"
#include "zgt2/training.hpp"

namespace zgt2::cli {

namespace fs = std::filesystem;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Row and column counts plus a hash of the file bytes.
nlohmann::json dataset_fingerprint(const fs::path& path, const Table& table) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(read_file(path))));
  return {{"path", path.string()},
          {"rows", table.size()},
          {"columns", table.feature_names.size() + 1},
          {"target", table.target_name},
          {"fnv1a64", hex}};
}

nlohmann::json manifest(std::string_view command, const RunConfig& config) {
  return {{"tool", "zgt2"},
          {"version", std::string(kToolVersion)},
          {"command", std::string(command)},
          {"config", format_run_config(config)}};
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(2) << '\n';
}

RunConfig load_config(const fs::path& path, const std::optional<std::string>& target_override) {
  if (!fs::is_regular_file(path)) throw ConfigError("cannot read config file " + path.string());
  auto cfg = load_run_config(path);
  if (target_override) cfg.target_column = *target_override;
  return cfg;
}

Table load_dataset(const fs::path& path, std::string_view target) {
  if (!fs::is_regular_file(path)) throw DataError("dataset not found: " + path.string());
  return load_csv(path, target);
}

/// Maps library exceptions onto exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ModelFormatError& e) {
    err << "model error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const ShapeError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const DivergenceError& e) {
    err << "diverged: " << e.what() << " (group " << e.group() << ")\n";
    return kDiverged;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kDataError;
  }
}

struct LabeledMetrics {
  std::string split;
  std::size_t rows = 0;
  TestMetrics metrics;
};

}  // namespace

int default_workers() {
  if (const char* env = std::getenv("ZGT2_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(n);
  }
  return 1;
}

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto config = load_config(args.config, args.target_column);
    config.model.validate();
    config.train.validate();
    const auto table = load_dataset(args.dataset, config.target_column);

    const auto split_seed = derive_seed(config.train.seed, "split");
    const auto [train_rows, test_rows] = split(table, config.train_ratio, split_seed);
    const auto [train_set, test_set] = zscore_fit_apply(train_rows, test_rows);
    for (const auto& c : train_set.dropped_columns) out << "dropped constant column " << c << '\n';

    ModelConfig model = config.model;
    model.inputs = static_cast<int>(train_set.dim());

    fs::create_directories(args.out_dir);
    const auto model_path = args.out_dir / "model.zgt2";
    const auto trace_path = args.out_dir / "trace.csv";
    const auto manifest_path = args.out_dir / "manifest.json";

    auto m = manifest("train", config);
    m["dataset"] = dataset_fingerprint(args.dataset, table);
    m["split_seed"] = split_seed;
    m["inputs"] = model.inputs;
    m["parameters"] = count_params(model.variant, model.rules, model.inputs);

    TrainResult result;
    try {
      result = train(train_set, model, config.train);
    } catch (const TrainingDiverged& e) {
      std::ofstream trace(trace_path, std::ios::trunc);
      e.trace().write_csv(trace);
      m["artifacts"] = {{"trace", trace_path.filename().string()}};
      m["diverged"] = e.what();
      write_json(manifest_path, m);
      throw;
    }

    SavedModel saved{model, result.params, train_set.normalizer, config.target_column,
                     config.train_ratio, split_seed};
    save_model(model_path, saved);
    {
      std::ofstream trace(trace_path, std::ios::trunc);
      result.trace.write_csv(trace);
    }
    const auto metrics = evaluate_model(result.params, model, test_set);
    m["artifacts"] = {{"model", model_path.filename().string()},
                      {"trace", trace_path.filename().string()}};
    m["best_epoch"] = result.trace.best_epoch;
    m["best_loss"] = result.trace.best_loss;
    m["test_metrics"] = {{"rmse", metrics.rmse}, {"picp", metrics.picp}, {"pinaw", metrics.pinaw}};
    write_json(manifest_path, m);

    out << "trained " << variant_name(model.variant) << " P=" << model.rules
        << " M=" << model.inputs << " on " << train_set.size() << " rows; best epoch "
        << result.trace.best_epoch << " loss " << g17(result.trace.best_loss) << '\n'
        << "test rmse=" << g17(metrics.rmse) << " picp=" << g17(metrics.picp)
        << " pinaw=" << g17(metrics.pinaw) << '\n'
        << "wrote " << model_path.string() << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    static constexpr std::string_view kSplits[] = {"both", "train", "test", "all"};
    if (std::find(std::begin(kSplits), std::end(kSplits), args.split) == std::end(kSplits)) {
      throw ConfigError("unknown split '" + args.split + "' (expected both, train, test or all)");
    }
    if (!fs::is_regular_file(args.model)) {
      throw ModelFormatError("cannot read model file " + args.model.string());
    }
    const auto model = load_model(args.model);
    const auto table = load_dataset(args.dataset, model.target_column);
    if (table.feature_names.size() < model.normalizer.feature_names.size()) {
      throw DataError("dataset has " + std::to_string(table.feature_names.size()) +
                      " feature columns but the model expects " +
                      std::to_string(model.normalizer.feature_names.size()));
    }

    std::vector<LabeledMetrics> rows;
    const auto measure = [&](std::string label, const Table& part) {
      const auto data = apply_normalizer(model.normalizer, part);
      rows.push_back({std::move(label), data.size(), evaluate_model(model.params, model.config, data)});
    };
    if (args.split == "all") {
      measure("all", table);
    } else {
      const auto [train_rows, test_rows] = split(table, model.train_ratio, model.split_seed);
      if (args.split != "test") measure("train", train_rows);
      if (args.split != "train") measure("test", test_rows);
    }

    std::ostringstream csv;
    csv << "split,rows,rmse,picp,pinaw,rmse_x100,picp_x100,pinaw_x100\n";
    for (const auto& r : rows) {
      const auto& x = r.metrics;
      out << r.split << ": rows=" << r.rows << " rmse=" << g17(x.rmse) << " picp=" << g17(x.picp)
          << " pinaw=" << g17(x.pinaw) << " | x100 rmse=" << g17(100 * x.rmse)
          << " picp=" << g17(100 * x.picp) << " pinaw=" << g17(100 * x.pinaw) << '\n';
      csv << r.split << ',' << r.rows << ',' << g17(x.rmse) << ',' << g17(x.picp) << ','
          << g17(x.pinaw) << ',' << g17(100 * x.rmse) << ',' << g17(100 * x.picp) << ','
          << g17(100 * x.pinaw) << '\n';
    }
    if (args.out_dir) {
      fs::create_directories(*args.out_dir);
      const auto metrics_path = *args.out_dir / "eval_metrics.csv";
      std::ofstream(metrics_path, std::ios::trunc) << csv.str();
      RunConfig echo;
      echo.model = model.config;
      echo.target_column = model.target_column;
      echo.train_ratio = model.train_ratio;
      auto m = manifest("eval", echo);
      m["model"] = {{"path", args.model.string()},
                    {"fnv1a64", fnv1a64(read_file(args.model))}};
      m["dataset"] = dataset_fingerprint(args.dataset, table);
      m["split"] = args.split;
      m["artifacts"] = {{"metrics", metrics_path.filename().string()}};
      write_json(*args.out_dir / "eval_manifest.json", m);
    }
    return static_cast<int>(kOk);
  });
}

GradCheckSummary run_gradcheck(const ModelConfig& base, const Quantiles& quantiles,
                               std::uint64_t seed, int instances, bool inject_fault) {
  static constexpr Variant kVariants[] = {Variant::kZadehGT2, Variant::kMendelJohnGT2,
                                          Variant::kIT2Height, Variant::kIT2HeightSigma};
  GradCheckSummary summary;
  summary.seed = seed;
  for (const Variant v : kVariants) {
    GradCheckVariant row;
    row.variant = v;
    for (int i = 0; i < instances; ++i) {
      Rng rng(derive_seed(seed, "gradcheck",
                          static_cast<std::uint64_t>(static_cast<int>(v)) * 1000003u +
                              static_cast<std::uint64_t>(i)));
      ModelConfig cfg = base;
      cfg.variant = v;
      cfg.inputs = 1 + static_cast<int>(rng.below(3));
      if (cfg.is_interval_type2()) cfg.plane_param = std::max(cfg.plane_param, 1);

      const std::size_t n = 12;
      Dataset data;
      data.features = Matrix(n, static_cast<std::size_t>(cfg.inputs));
      data.targets.resize(n);
      for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (int m = 0; m < cfg.inputs; ++m) {
          data.features(r, static_cast<std::size_t>(m)) = rng.normal();
          s += data.features(r, static_cast<std::size_t>(m));
        }
        data.targets[r] = std::sin(s) + 0.3 * rng.normal();
      }
      auto raw = init_params(data, cfg, rng.next());
      // Break the symmetry of the shared least-squares consequents.
      for (double& x : raw.values) x += 0.3 * rng.normal();

      const LossOptions opts{quantiles, true};
      const BatchView batch{data.features, data.targets};
      std::vector<double> grad;
      loss_and_grad(raw, batch, cfg, opts, grad);
      if (inject_fault && i == 0) grad[0] += 1e-3 * (1.0 + std::abs(grad[0]));
      const auto check = check_gradient(raw, batch, cfg, opts, grad);
      row.checked += check.checked;
      row.excluded += check.excluded;
      ++row.instances;
      if (row.instances == 1 || check.max_relative_error > row.worst.max_relative_error) {
        row.worst = check;
        row.worst_instance = i;
      }
    }
    summary.max_relative_error = std::max(summary.max_relative_error, row.worst.max_relative_error);
    summary.variants.push_back(row);
  }
  return summary;
}

int cmd_gradcheck(const GradCheckArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.instances < 1) throw ConfigError("gradcheck needs at least one instance");
    RunConfig config;
    config.model.rules = 3;
    if (args.config) config = load_config(*args.config, std::nullopt);
    config.model.validate();

    const auto summary =
        run_gradcheck(config.model, config.train.quantiles, args.seed, args.instances,
                      args.inject_fault);
    out << "gradcheck seed=" << args.seed << " instances/variant=" << args.instances << '\n';
    const GradCheckVariant* worst = nullptr;
    for (const auto& row : summary.variants) {
      out << variant_name(row.variant) << ": max_rel=" << g17(row.worst.max_relative_error)
          << " checked=" << row.checked << " excluded=" << row.excluded << '\n';
      if (!worst || row.worst.max_relative_error > worst->worst.max_relative_error) worst = &row;
    }
    out << "max relative error " << g17(summary.max_relative_error) << " (threshold "
        << g17(kGradCheckTolerance) << ")\n";
    if (summary.max_relative_error < kGradCheckTolerance) return static_cast<int>(kOk);
    const auto& w = worst->worst;
    err << "gradient check failed: " << variant_name(worst->variant) << " instance "
        << worst->worst_instance << " coordinate " << w.worst_index << " (" << w.worst_group
        << ") analytic=" << g17(w.worst_analytic) << " numeric=" << g17(w.worst_numeric) << '\n';
    return static_cast<int>(kGradCheckFailed);
  });
}

int cmd_campaign(const CampaignArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.seeds < 1) throw ConfigError("--seeds must be >= 1");
    if (args.workers < 1) throw ConfigError("--workers must be >= 1");
    const auto config = load_config(args.config, args.target_column);
    config.model.validate();
    config.train.validate();
    const auto table = load_dataset(args.dataset, config.target_column);

    const auto seeds_dir = args.out_dir / "seeds";
    CampaignOptions opts;
    opts.workers = args.workers;
    opts.checkpoint_dir = seeds_dir;
    opts.on_seed = [&](const SeedRecord& r, bool resumed) {
      out << "seed " << r.seed << (resumed ? " (resumed)" : "") << ": ";
      if (r.failed) {
        out << "FAILED " << r.failure << '\n';
      } else {
        out << "rmse=" << g17(r.metrics.rmse) << " picp=" << g17(r.metrics.picp)
            << " pinaw=" << g17(r.metrics.pinaw) << '\n';
      }
    };
    const auto report =
        run_campaign(table, args.dataset.stem().string(), config, args.seeds, opts);
    const auto files = write_report_files(report, args.out_dir);

    auto m = manifest("campaign", config);
    m["dataset"] = dataset_fingerprint(args.dataset, table);
    m["n_seeds"] = args.seeds;
    nlohmann::json artifacts = nlohmann::json::array();
    for (const auto& f : files) artifacts.push_back(f.filename().string());
    for (const auto& r : report.records) {
      artifacts.push_back("seeds/seed_" + std::to_string(r.seed) + ".json");
    }
    m["artifacts"] = artifacts;
    m["failed_seeds"] = report.failed_seeds;
    write_json(args.out_dir / "manifest.json", m);

    if (report.rmse) {
      out << "mean rmse=" << g17(report.rmse->mean) << " picp=" << g17(report.picp->mean)
          << " pinaw=" << g17(report.pinaw->mean) << " over "
          << report.records.size() - report.failed_seeds.size() << " seeds\n";
    }
    for (const auto& f : files) out << "wrote " << f.string() << '\n';
    if (report.failed_seeds.size() == report.records.size()) {
      err << "every seed failed\n";
      return static_cast<int>(kDiverged);
    }
    if (!report.failed_seeds.empty()) {
      err << report.failed_seeds.size() << " seed(s) failed; see the report\n";
    }
    return static_cast<int>(kOk);
  });
}

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.rows < 2) throw ConfigError("--rows must be >= 2");
    const auto t = make_heteroscedastic_sine(args.rows, args.seed);
    if (args.out.has_parent_path()) fs::create_directories(args.out.parent_path());
    std::ofstream csv(args.out, std::ios::trunc);
    if (!csv) throw DataError("cannot write " + args.out.string());
    csv << "x,y\n";
    for (std::size_t r = 0; r < t.size(); ++r) {
      csv << g17(t.features(r, 0)) << ',' << g17(t.targets[r]) << '\n';
    }
    out << "wrote " << t.size() << " rows to " << args.out.string() << '\n';
    return static_cast<int>(kOk);
  });
}

}  // namespace zgt2::cli
