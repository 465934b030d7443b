#include "zgt2/model_io.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>

#include "zgt2/error.hpp"
#include "zgt2/hash.hpp"

namespace zgt2 {

namespace {

constexpr std::string_view kMagic = "ZGT2-MODEL";
constexpr int kVersion = 1;

void put_f64(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>(bits & 0xffU));
    bits >>= 8;
  }
}

double get_f64(std::string_view bytes, std::size_t& pos) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) {
    bits = (bits << 8) | static_cast<unsigned char>(bytes[pos + static_cast<std::size_t>(i)]);
  }
  pos += 8;
  return std::bit_cast<double>(bits);
}

template <typename T>
T to_number(std::string_view key, std::string_view text, int base = 10) {
  T v{};
  const auto [ptr, ec] = [&] {
    if constexpr (std::is_floating_point_v<T>) {
      return std::from_chars(text.data(), text.data() + text.size(), v);
    } else {
      return std::from_chars(text.data(), text.data() + text.size(), v, base);
    }
  }();
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ModelFormatError("model file: bad value for '" + std::string(key) + "'");
  }
  return v;
}

}  // namespace

std::string serialize_model(const SavedModel& m) {
  if (m.params.values.size() != m.params.layout.total() ||
      m.params.layout != ParamLayout::for_config(m.config)) {
    throw ShapeError("model parameters do not match the configuration");
  }
  if (m.normalizer.feature_names.size() != static_cast<std::size_t>(m.config.inputs)) {
    throw ShapeError("normaliser width does not match the model input dimension");
  }
  std::string payload;
  for (double v : m.params.values) put_f64(payload, v);
  for (const auto& s : m.normalizer.feature_stats) put_f64(payload, s.mean);
  for (const auto& s : m.normalizer.feature_stats) put_f64(payload, s.std);
  put_f64(payload, m.normalizer.target_stats.mean);
  put_f64(payload, m.normalizer.target_stats.std);

  std::ostringstream head;
  head.precision(17);
  head << kMagic << ' ' << kVersion << '\n'
       << "variant " << variant_name(m.config.variant) << '\n'
       << "rules " << m.config.rules << '\n'
       << "inputs " << m.config.inputs << '\n'
       << "plane_param " << m.config.plane_param << '\n'
       << "layout " << m.params.layout.describe() << '\n'
       << "split_seed " << m.split_seed << '\n'
       << "train_ratio " << m.train_ratio << '\n'
       << "target_column " << m.target_column << '\n'
       << "target_name " << m.normalizer.target_name << '\n';
  for (const auto& name : m.normalizer.feature_names) head << "feature " << name << '\n';
  head << "payload " << payload.size() << ' ' << std::hex << fnv1a64(payload) << '\n';
  return head.str() + payload;
}

void save_model(const std::filesystem::path& path, const SavedModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write model file '" + path.string() + "'");
  const auto bytes = serialize_model(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing model file '" + path.string() + "'");
}

SavedModel deserialize_model(std::string_view bytes) {
  SavedModel m;
  std::size_t pos = 0;
  const auto next_line = [&]() -> std::pair<std::string_view, std::string_view> {
    const auto end = bytes.find('\n', pos);
    if (end == std::string_view::npos) throw ModelFormatError("model file: truncated header");
    const auto line = bytes.substr(pos, end - pos);
    pos = end + 1;
    const auto sp = line.find(' ');
    if (sp == std::string_view::npos) return {line, {}};
    return {line.substr(0, sp), line.substr(sp + 1)};
  };

  const auto [magic, version] = next_line();
  if (magic != kMagic) throw ModelFormatError("not a model file (bad magic)");
  if (to_number<int>("version", version) != kVersion) {
    throw ModelFormatError("unsupported model file version '" + std::string(version) + "'");
  }

  std::string layout_text;
  std::size_t payload_size = 0;
  std::uint64_t checksum = 0;
  bool have_payload = false;
  try {
    while (!have_payload) {
      const auto [key, value] = next_line();
      if (key == "variant") m.config.variant = parse_variant(value);
      else if (key == "rules") m.config.rules = to_number<int>(key, value);
      else if (key == "inputs") m.config.inputs = to_number<int>(key, value);
      else if (key == "plane_param") m.config.plane_param = to_number<int>(key, value);
      else if (key == "layout") layout_text = value;
      else if (key == "split_seed") m.split_seed = to_number<std::uint64_t>(key, value);
      else if (key == "train_ratio") m.train_ratio = to_number<double>(key, value);
      else if (key == "target_column") m.target_column = value;
      else if (key == "target_name") m.normalizer.target_name = value;
      else if (key == "feature") m.normalizer.feature_names.emplace_back(value);
      else if (key == "payload") {
        const auto sp = value.find(' ');
        if (sp == std::string_view::npos) throw ModelFormatError("model file: bad payload line");
        payload_size = to_number<std::size_t>(key, value.substr(0, sp));
        checksum = to_number<std::uint64_t>(key, value.substr(sp + 1), 16);
        have_payload = true;
      } else {
        throw ModelFormatError("model file: unknown header key '" + std::string(key) + "'");
      }
    }
    m.config.validate();
  } catch (const ConfigError& e) {
    throw ModelFormatError(std::string("model file: ") + e.what());
  }

  m.params.layout = ParamLayout::for_config(m.config);
  if (m.params.layout.describe() != layout_text) {
    throw ModelFormatError("model file: layout does not match the stored configuration");
  }
  const auto inputs = static_cast<std::size_t>(m.config.inputs);
  if (m.normalizer.feature_names.size() != inputs) {
    throw ModelFormatError("model file: feature count does not match the input dimension");
  }
  const std::size_t expected = 8 * (m.params.layout.total() + 2 * inputs + 2);
  const auto payload = bytes.substr(pos);
  if (payload_size != expected || payload.size() != expected) {
    throw ModelFormatError("model file: payload length mismatch (corrupted or truncated)");
  }
  if (fnv1a64(payload) != checksum) throw ModelFormatError("model file: checksum mismatch");

  std::size_t at = 0;
  m.params.values.resize(m.params.layout.total());
  for (auto& v : m.params.values) v = get_f64(payload, at);
  m.normalizer.feature_stats.resize(inputs);
  for (auto& s : m.normalizer.feature_stats) s.mean = get_f64(payload, at);
  for (auto& s : m.normalizer.feature_stats) s.std = get_f64(payload, at);
  m.normalizer.target_stats.mean = get_f64(payload, at);
  m.normalizer.target_stats.std = get_f64(payload, at);
  return m;
}

SavedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace zgt2
