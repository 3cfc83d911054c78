#include "iris/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "iris/error.hpp"

namespace iris {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view why) {
  throw Error(ErrorCode::BadConfig, std::string(key) + " = '" + std::string(value) + "': " + std::string(why));
}

int parse_int(std::string_view key, std::string_view value) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad(key, value, "expected an integer");
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  // from_chars for double is missing on some libstdc++ releases.
  std::string buf(value);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(buf, &used);
  } catch (const std::exception&) {
    bad(key, value, "expected a number");
  }
  if (used != buf.size()) bad(key, value, "expected a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad(key, value, "expected true/false");
}

std::vector<int> parse_int_list(std::string_view key, std::string_view value) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto item = trim(value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (item.empty()) bad(key, value, "empty list element");
    out.push_back(parse_int(key, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

using Setter = std::function<void(PipelineConfig&, std::string_view, std::string_view)>;
using Getter = std::function<std::string(const PipelineConfig&)>;

struct Field {
  Setter set;
  Getter get;
};

template <typename T>
Field field(T PipelineConfig::*member) {
  Field f;
  f.set = [member](PipelineConfig& c, std::string_view k, std::string_view v) {
    if constexpr (std::is_same_v<T, int>) {
      c.*member = parse_int(k, v);
    } else if constexpr (std::is_same_v<T, double>) {
      c.*member = parse_double(k, v);
    } else if constexpr (std::is_same_v<T, bool>) {
      c.*member = parse_bool(k, v);
    } else if constexpr (std::is_same_v<T, std::string>) {
      c.*member = std::string(v);
    } else {
      c.*member = parse_int_list(k, v);
    }
  };
  f.get = [member](const PipelineConfig& c) {
    std::ostringstream os;
    if constexpr (std::is_same_v<T, bool>) {
      os << ((c.*member) ? "true" : "false");
    } else if constexpr (std::is_same_v<T, double>) {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, c.*member);  // shortest exact form
      os << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    } else if constexpr (std::is_same_v<T, std::vector<int>>) {
      for (std::size_t i = 0; i < (c.*member).size(); ++i) os << (i ? "," : "") << (c.*member)[i];
    } else {
      os << c.*member;
    }
    return os.str();
  };
  return f;
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = {
      {"blur_sigma", field(&PipelineConfig::blur_sigma)},
      {"blur_kernel", field(&PipelineConfig::blur_kernel)},
      {"pupil_threshold", field(&PipelineConfig::pupil_threshold)},
      {"reference_pgm", field(&PipelineConfig::reference_pgm)},
      {"canny_low", field(&PipelineConfig::canny_low)},
      {"canny_high", field(&PipelineConfig::canny_high)},
      {"canny_sigma", field(&PipelineConfig::canny_sigma)},
      {"pupil_r_min", field(&PipelineConfig::pupil_r_min)},
      {"pupil_r_max", field(&PipelineConfig::pupil_r_max)},
      {"quality_gate", field(&PipelineConfig::quality_gate)},
      {"limbic_gap", field(&PipelineConfig::limbic_gap)},
      {"limbic_step", field(&PipelineConfig::limbic_step)},
      {"limbic_span", field(&PipelineConfig::limbic_span)},
      {"limbic_samples", field(&PipelineConfig::limbic_samples)},
      {"limbic_lateral_only", field(&PipelineConfig::limbic_lateral_only)},
      {"idop_sigma_r", field(&PipelineConfig::idop_sigma_r)},
      {"idop_samples", field(&PipelineConfig::idop_samples)},
      {"idop_coarse_step", field(&PipelineConfig::idop_coarse_step)},
      {"idop_refine_half", field(&PipelineConfig::idop_refine_half)},
      {"strip_rows", field(&PipelineConfig::strip_rows)},
      {"strip_cols", field(&PipelineConfig::strip_cols)},
      {"mask_dark", field(&PipelineConfig::mask_dark)},
      {"mask_bright", field(&PipelineConfig::mask_bright)},
      {"mask_edge_high", field(&PipelineConfig::mask_edge_high)},
      {"shifts", field(&PipelineConfig::shifts)},
      {"match_threshold", field(&PipelineConfig::match_threshold)},
      {"min_overlap", field(&PipelineConfig::min_overlap)},
  };
  return table;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::BadConfig, what);
}

}  // namespace

void PipelineConfig::validate() const {
  require(blur_sigma > 0.0, "blur_sigma must be > 0");
  require(blur_kernel >= 3 && blur_kernel % 2 == 1, "blur_kernel must be odd and >= 3");
  require(pupil_threshold >= 0 && pupil_threshold <= 255, "pupil_threshold must lie in [0, 255]");
  require(canny_low > 0.0 && canny_low < canny_high && canny_high <= 1.0, "need 0 < canny_low < canny_high <= 1");
  require(canny_sigma > 0.0, "canny_sigma must be > 0");
  require(pupil_r_min > 0 && pupil_r_min < pupil_r_max, "need 0 < pupil_r_min < pupil_r_max");
  require(quality_gate >= 0.0 && quality_gate <= 1.0, "quality_gate must lie in [0, 1]");
  require(limbic_gap >= 0, "limbic_gap must be >= 0");
  require(limbic_step > 0, "limbic_step must be > 0");
  require(limbic_span > limbic_gap, "limbic_span must exceed limbic_gap");
  require(limbic_samples >= 8, "limbic_samples must be >= 8");
  require(idop_sigma_r > 0.0, "idop_sigma_r must be > 0");
  require(idop_samples >= 8, "idop_samples must be >= 8");
  require(idop_coarse_step >= 1, "idop_coarse_step must be >= 1");
  require(idop_refine_half >= 0, "idop_refine_half must be >= 0");
  require(strip_rows >= 8 && strip_rows % 8 == 0, "strip_rows must be a positive multiple of 8");
  require(strip_cols >= 8 && strip_cols % 8 == 0, "strip_cols must be a positive multiple of 8");
  require((strip_rows / 8) * (strip_cols / 8) == 512, "strip_rows/8 * strip_cols/8 must equal 512 (2048-bit codes)");
  require(mask_dark >= 0 && mask_dark < mask_bright && mask_bright <= 255, "need 0 <= mask_dark < mask_bright <= 255");
  require(mask_edge_high > 0.0 && mask_edge_high <= 1.0, "mask_edge_high must lie in (0, 1]");
  require(!shifts.empty(), "shifts must be non-empty");
  for (int s : shifts) require(s % 4 == 0, "every shift must be a multiple of 4");
  require(match_threshold >= 0.0 && match_threshold <= 1.0, "match_threshold must lie in [0, 1]");
  require(min_overlap >= 1, "min_overlap must be >= 1");
}

Histogram PipelineConfig::reference_histogram() const {
  if (reference_pgm.empty()) return default_reference_histogram();
  return compute_histogram(load_pgm(reference_pgm));
}

void apply_config_entry(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  const auto& table = fields();
  const auto it = table.find(key);
  if (it == table.end()) throw Error(ErrorCode::BadConfig, "unknown key '" + std::string(key) + "'");
  it->second.set(cfg, key, value);
}

PipelineConfig parse_config(std::string_view text, PipelineConfig base) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::BadConfig, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_config_entry(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  base.validate();
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& [key, f] : fields()) out += key + " = " + f.get(cfg) + "\n";
  return out;
}

}  // namespace iris
