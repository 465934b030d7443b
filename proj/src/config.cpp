#include "zgt2/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "zgt2/error.hpp"

namespace zgt2 {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"model", {"variant", "rules", "alpha_planes"}},
      {"train",
       {"epochs", "batch_size", "learning_rate", "beta1", "beta2", "epsilon", "tau_lower",
        "tau_upper", "seed", "clip_norm"}},
      {"data", {"target_column", "train_ratio"}},
  };
  return s;
}

template <typename T>
T parse_value(const std::string& section, const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("[" + section + "] " + key + ": cannot parse '" + text + "'");
  }
  return value;
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  RunConfig cfg;
  int alpha_planes = cfg.model.plane_param + 1;
  for (const auto& [section, body] : tree) {
    const auto sec = schema().find(section);
    if (sec == schema().end() || body.empty()) {
      throw ConfigError("unknown config section or top-level key '" + section + "'");
    }
    for (const auto& [key, node] : body) {
      if (!sec->second.contains(key)) {
        throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
      }
      const auto value = node.get_value<std::string>();
      if (section == "model") {
        if (key == "variant") cfg.model.variant = parse_variant(value);
        if (key == "rules") cfg.model.rules = parse_value<int>(section, key, value);
        if (key == "alpha_planes") alpha_planes = parse_value<int>(section, key, value);
      } else if (section == "train") {
        auto& t = cfg.train;
        if (key == "epochs") t.epochs = parse_value<int>(section, key, value);
        if (key == "batch_size") t.batch_size = parse_value<int>(section, key, value);
        if (key == "learning_rate") t.learning_rate = parse_value<double>(section, key, value);
        if (key == "beta1") t.beta1 = parse_value<double>(section, key, value);
        if (key == "beta2") t.beta2 = parse_value<double>(section, key, value);
        if (key == "epsilon") t.epsilon = parse_value<double>(section, key, value);
        if (key == "tau_lower") t.quantiles.lower = parse_value<double>(section, key, value);
        if (key == "tau_upper") t.quantiles.upper = parse_value<double>(section, key, value);
        if (key == "seed") t.seed = parse_value<std::uint64_t>(section, key, value);
        if (key == "clip_norm") t.clip_norm = parse_value<double>(section, key, value);
      } else {
        if (key == "target_column") cfg.target_column = value;
        if (key == "train_ratio") cfg.train_ratio = parse_value<double>(section, key, value);
      }
    }
  }

  if (cfg.model.is_interval_type2()) {
    cfg.model.plane_param = 0;
  } else {
    if (alpha_planes < 2) throw ConfigError("[model] alpha_planes must be >= 2 for GT2 variants");
    cfg.model.plane_param = alpha_planes - 1;
  }
  if (cfg.target_column.empty()) throw ConfigError("[data] target_column must not be empty");
  if (!(cfg.train_ratio > 0.0 && cfg.train_ratio < 1.0)) {
    throw ConfigError("[data] train_ratio must lie in (0, 1)");
  }
  if (cfg.model.rules < 1) throw ConfigError("[model] rules must be >= 1");
  cfg.train.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string format_run_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[model]\n"
      << "variant = " << variant_name(c.model.variant) << '\n'
      << "rules = " << c.model.rules << '\n'
      << "alpha_planes = " << c.model.plane_count() << '\n'
      << "\n[train]\n"
      << "epochs = " << c.train.epochs << '\n'
      << "batch_size = " << c.train.batch_size << '\n'
      << "learning_rate = " << format_double(c.train.learning_rate) << '\n'
      << "beta1 = " << format_double(c.train.beta1) << '\n'
      << "beta2 = " << format_double(c.train.beta2) << '\n'
      << "epsilon = " << format_double(c.train.epsilon) << '\n'
      << "tau_lower = " << format_double(c.train.quantiles.lower) << '\n'
      << "tau_upper = " << format_double(c.train.quantiles.upper) << '\n'
      << "seed = " << c.train.seed << '\n'
      << "clip_norm = " << format_double(c.train.clip_norm) << '\n'
      << "\n[data]\n"
      << "target_column = " << c.target_column << '\n'
      << "train_ratio = " << format_double(c.train_ratio) << '\n';
  return out.str();
}

}  // namespace zgt2
