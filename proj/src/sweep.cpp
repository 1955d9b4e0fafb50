#include "evbias/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "evbias/error.hpp"
#include "evbias/sharpness.hpp"

namespace evbias {
namespace {

constexpr std::string_view kSweepHeader = "bias,value,mean_ag,events,frames";

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw FormatError("sweep CSV line " + std::to_string(line_no) + ": bad number '" +
                      std::string(field) + "'");
  }
  return value;
}

}  // namespace

StreamScore score_stream(const EventStream& stream, const AccumulationOptions& options) {
  StreamScore score;
  double total = 0.0;
  for_each_frame(stream, options, [&](std::size_t, const Frame& frame, std::size_t) {
    total += average_gradient(frame);
    ++score.frames;
  });
  score.mean_ag = score.frames == 0 ? 0.0 : total / static_cast<double>(score.frames);
  return score;
}

SweepResult run_sweep(const SweepConfig& config, const SweepObserver& observer) {
  std::vector<int> values = config.values;
  if (values.empty()) {
    const auto grid = tested_values(config.bias);
    values.assign(grid.begin(), grid.end());
  }
  const BiasRange range = range_of(config.bias);
  for (int v : values) {
    if (!range.contains(v)) {
      throw ValidationError(std::string(to_string(config.bias)) + " = " + std::to_string(v) +
                            " is outside its valid range " + std::to_string(range.min) + "-" +
                            std::to_string(range.max));
    }
  }

  SweepResult result;
  result.rows.reserve(values.size());
  for (int v : values) {
    const BiasSet biases = default_biases().with(config.bias, v);
    const EventStream stream =
        simulate(config.scene, biases, config.dt_us, config.seed, config.noise, config.sim);
    const StreamScore score = score_stream(stream, config.accumulation);
    SweepRow row{config.bias, v, score.mean_ag, stream.size(), score.frames, biases};
    if (observer) observer(row, stream);
    result.rows.push_back(row);
  }
  return result;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("rank correlation needs equal-length series");
  if (a.size() < 3) throw ValidationError("rank correlation needs at least 3 points");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double mean = (static_cast<double>(a.size()) + 1.0) / 2.0;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const double da = ra[i] - mean;
    const double db = rb[i] - mean;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double trend(const SweepResult& result) {
  std::vector<double> values, ags;
  for (const auto& row : result.rows) {
    values.push_back(row.value);
    ags.push_back(row.mean_ag);
  }
  return spearman(values, ags);
}

std::optional<SweepRow> best_row(const SweepResult& result) {
  if (result.rows.empty()) return std::nullopt;
  return *std::max_element(result.rows.begin(), result.rows.end(),
                           [](const auto& a, const auto& b) { return a.mean_ag < b.mean_ag; });
}

std::string format_fixed6(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 6);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

std::string write_sweep_csv(const SweepResult& result) {
  std::string out(kSweepHeader);
  out += '\n';
  for (const auto& row : result.rows) {
    out += to_string(row.bias);
    out += ',' + std::to_string(row.value);
    out += ',' + format_fixed6(row.mean_ag);
    out += ',' + std::to_string(row.events);
    out += ',' + std::to_string(row.frames);
    out += '\n';
  }
  return out;
}

SweepResult read_sweep_csv(std::string_view text) {
  SweepResult result;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!seen_header) {
      if (line != kSweepHeader) throw FormatError("sweep CSV header mismatch");
      seen_header = true;
      continue;
    }
    if (line.empty()) continue;
    if (std::count(line.begin(), line.end(), ',') != 4) {
      throw FormatError("sweep CSV line " + std::to_string(line_no) + ": expected 5 fields");
    }
    std::array<std::string_view, 5> f;
    for (std::size_t i = 0, start = 0; i < f.size(); ++i) {
      const std::size_t comma = line.find(',', start);
      f[i] = line.substr(start, comma - start);
      start = comma + 1;
    }
    SweepRow row;
    row.bias = parse_bias_name(f[0]);
    row.value = parse_number<int>(f[1], line_no);
    row.mean_ag = parse_number<double>(f[2], line_no);
    row.events = parse_number<std::size_t>(f[3], line_no);
    row.frames = parse_number<std::size_t>(f[4], line_no);
    row.biases = default_biases().with(row.bias, row.value);
    result.rows.push_back(row);
  }
  if (!seen_header) throw FormatError("sweep CSV header mismatch");
  return result;
}

}  // namespace evbias
