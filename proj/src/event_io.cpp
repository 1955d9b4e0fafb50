#include "evbias/event_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <string>

#include "evbias/error.hpp"

namespace evbias {
namespace {

constexpr std::string_view kMagic = "EVT0";
constexpr std::string_view kCsvHeader = "x,y,t,p";

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(bytes[offset + i]) << (8 * i);
  }
  return static_cast<T>(v);
}

template <typename T>
T parse_field(std::string_view field, std::size_t line_no, std::string_view what) {
  T value{};
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last) {
    throw FormatError("line " + std::to_string(line_no) + ": field " + std::string(what) +
                      " is not a valid integer: '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<std::uint8_t> encode_evt0(const EventStream& stream) {
  std::vector<std::uint8_t> out;
  out.reserve(kEvt0HeaderSize + kEvt0RecordSize * stream.size());
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  put_le<std::uint16_t>(out, stream.geometry().width);
  put_le<std::uint16_t>(out, stream.geometry().height);
  put_le<std::uint32_t>(out, 0);
  for (const Event& e : stream.events()) {
    put_le<std::uint64_t>(out, e.t);
    put_le<std::uint16_t>(out, e.x);
    put_le<std::uint16_t>(out, e.y);
    out.push_back(e.p == Polarity::On ? 1 : 0);
    out.push_back(0);
  }
  return out;
}

std::size_t write_evt0(const EventStream& stream, std::ostream& sink) {
  const auto bytes = encode_evt0(stream);
  sink.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw IoError("failed to write EVT0 stream");
  return bytes.size();
}

EventStream decode_evt0(std::span<const std::uint8_t> bytes, OrderPolicy policy) {
  if (bytes.size() < kEvt0HeaderSize) throw FormatError("EVT0 header truncated");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw FormatError("bad magic: expected EVT0");
  }
  const SensorGeometry geometry{get_le<std::uint16_t>(bytes, 4), get_le<std::uint16_t>(bytes, 6)};
  if (get_le<std::uint32_t>(bytes, 8) != 0) throw FormatError("EVT0 reserved field is not zero");
  if (geometry.width < 2 || geometry.height < 2) {
    throw FormatError("EVT0 geometry must be at least 2x2");
  }
  const std::size_t payload = bytes.size() - kEvt0HeaderSize;
  if (payload % kEvt0RecordSize != 0) {
    throw FormatError("EVT0 record " + std::to_string(payload / kEvt0RecordSize) +
                      " is truncated");
  }
  std::vector<Event> events(payload / kEvt0RecordSize);
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::size_t off = kEvt0HeaderSize + i * kEvt0RecordSize;
    Event& e = events[i];
    e.t = get_le<std::uint64_t>(bytes, off);
    e.x = get_le<std::uint16_t>(bytes, off + 8);
    e.y = get_le<std::uint16_t>(bytes, off + 10);
    const std::uint8_t p = bytes[off + 12];
    if (p > 1) throw FormatError("EVT0 record " + std::to_string(i) + " has polarity byte " +
                                 std::to_string(p));
    e.p = p == 1 ? Polarity::On : Polarity::Off;
    if (!geometry.contains(e.x, e.y)) {
      throw FormatError("EVT0 record " + std::to_string(i) + " at (" + std::to_string(e.x) +
                        ", " + std::to_string(e.y) + ") is out of range");
    }
  }
  return EventStream(geometry, std::move(events), policy);
}

EventStream read_evt0(std::istream& source, OrderPolicy policy) {
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(source),
                                  std::istreambuf_iterator<char>()};
  if (source.bad()) throw IoError("failed to read EVT0 stream");
  return decode_evt0(bytes, policy);
}

std::string write_csv(const EventStream& stream) {
  std::string out;
  out.reserve(8 + stream.size() * 16);
  out += kCsvHeader;
  out += '\n';
  for (const Event& e : stream.events()) {
    out += std::to_string(e.x);
    out += ',';
    out += std::to_string(e.y);
    out += ',';
    out += std::to_string(e.t);
    out += ',';
    out += e.p == Polarity::On ? '1' : '0';
    out += '\n';
  }
  return out;
}

EventStream read_csv(std::string_view text, SensorGeometry geometry, OrderPolicy policy) {
  validate(geometry);
  std::vector<Event> events;
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
      if (line != kCsvHeader) throw FormatError("CSV header must be 'x,y,t,p'");
      seen_header = true;
      continue;
    }
    if (line.empty()) continue;

    if (std::count(line.begin(), line.end(), ',') != 3) {
      throw FormatError("line " + std::to_string(line_no) + ": expected 4 fields");
    }
    std::array<std::string_view, 4> fields;
    for (std::size_t i = 0, start = 0; i < fields.size(); ++i) {
      const std::size_t comma = line.find(',', start);
      fields[i] = line.substr(start, comma - start);
      start = comma + 1;
    }
    Event e;
    const auto x = parse_field<std::uint32_t>(fields[0], line_no, "x");
    const auto y = parse_field<std::uint32_t>(fields[1], line_no, "y");
    e.t = parse_field<std::uint64_t>(fields[2], line_no, "t");
    const auto p = parse_field<std::uint32_t>(fields[3], line_no, "p");
    if (p > 1) {
      throw FormatError("line " + std::to_string(line_no) + ": polarity must be 0 or 1, got " +
                        std::string(fields[3]));
    }
    if (!geometry.contains(x, y)) {
      throw FormatError("line " + std::to_string(line_no) + ": coordinate (" + std::to_string(x) +
                        ", " + std::to_string(y) + ") is out of range");
    }
    e.x = static_cast<std::uint16_t>(x);
    e.y = static_cast<std::uint16_t>(y);
    e.p = p == 1 ? Polarity::On : Polarity::Off;
    events.push_back(e);
  }
  if (!seen_header) throw FormatError("CSV header must be 'x,y,t,p'");
  return EventStream(geometry, std::move(events), policy);
}

std::vector<std::uint8_t> write_pgm(const Frame& frame) {
  const std::string header = "P5\n" + std::to_string(frame.cols()) + " " +
                             std::to_string(frame.rows()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + frame.values().size());
  for (double v : frame.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("PGM export needs values in [0, 1]");
    out.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
  }
  return out;
}

Frame read_pgm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&]() -> unsigned {
    skip_space();
    unsigned v = 0;
    const std::size_t start = pos;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > 65535) throw FormatError("PGM header value too large");
    }
    if (pos == start) throw FormatError("malformed PGM header");
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw FormatError("not a binary PGM (P5) image");
  }
  pos = 2;
  const unsigned width = read_uint();
  const unsigned height = read_uint();
  const unsigned maxval = read_uint();
  if (maxval == 0 || maxval > 255) throw FormatError("PGM maxval must be 1-255");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw FormatError("malformed PGM header");
  ++pos;
  const SensorGeometry geometry{static_cast<std::uint16_t>(width),
                                static_cast<std::uint16_t>(height)};
  if (width < 2 || height < 2) throw FormatError("PGM image must be at least 2x2");
  if (bytes.size() - pos < geometry.pixel_count()) throw FormatError("PGM pixel data truncated");
  std::vector<double> values(geometry.pixel_count());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::min(1.0, static_cast<double>(bytes[pos + i]) / maxval);
  }
  return Frame(geometry, std::move(values));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("failed reading " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

void save_events(const std::filesystem::path& path, const EventStream& stream) {
  if (path.extension() == ".csv") {
    const std::string text = write_csv(stream);
    write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  } else {
    write_file(path, encode_evt0(stream));
  }
}

EventStream load_events(const std::filesystem::path& path, SensorGeometry csv_geometry,
                        OrderPolicy policy) {
  const auto bytes = read_file(path);
  if (path.extension() == ".csv") {
    return read_csv({reinterpret_cast<const char*>(bytes.data()), bytes.size()}, csv_geometry,
                    policy);
  }
  return decode_evt0(bytes, policy);
}

}  // namespace evbias
