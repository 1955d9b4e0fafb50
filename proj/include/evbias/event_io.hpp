#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evbias/event.hpp"
#include "evbias/frame.hpp"

namespace evbias {

// EVT0 layout (all integers little-endian):
//   header  "EVT0" | u16 width | u16 height | u32 reserved (0)        12 bytes
//   record  u64 t_us | u16 x | u16 y | u8 polarity (0 OFF, 1 ON) | u8 0  14 bytes
inline constexpr std::size_t kEvt0HeaderSize = 12;
inline constexpr std::size_t kEvt0RecordSize = 14;

std::vector<std::uint8_t> encode_evt0(const EventStream& stream);
/// Returns the number of bytes written. Throws IoError when the sink fails.
std::size_t write_evt0(const EventStream& stream, std::ostream& sink);

EventStream decode_evt0(std::span<const std::uint8_t> bytes,
                        OrderPolicy policy = OrderPolicy::Strict);
EventStream read_evt0(std::istream& source, OrderPolicy policy = OrderPolicy::Strict);

/// "x,y,t,p" header, one decimal row per event, p in {0, 1}.
std::string write_csv(const EventStream& stream);
EventStream read_csv(std::string_view text, SensorGeometry geometry,
                     OrderPolicy policy = OrderPolicy::Strict);

/// Binary P5, maxval 255, byte = round(value * 255).
std::vector<std::uint8_t> write_pgm(const Frame& frame);
Frame read_pgm(std::span<const std::uint8_t> bytes);

// File helpers. The format follows the extension: ".csv" is CSV, anything
// else is EVT0. CSV files need the geometry supplied by the caller.
void save_events(const std::filesystem::path& path, const EventStream& stream);
EventStream load_events(const std::filesystem::path& path, SensorGeometry csv_geometry,
                        OrderPolicy policy = OrderPolicy::Strict);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace evbias
