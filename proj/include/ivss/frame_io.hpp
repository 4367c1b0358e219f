#pragma once

// Frame loading: binary PPM images, numbered frame directories, and the
// IVSSRAW1 raw RGB stream produced by an external decoder.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ivss {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Decoded 8-bit RGB raster, row-major. Immutable once built.
class FrameRGB {
 public:
  FrameRGB() = default;
  FrameRGB(std::uint32_t width, std::uint32_t height, std::vector<Rgb> pixels);
  // Constant-color frame.
  FrameRGB(std::uint32_t width, std::uint32_t height, Rgb fill);

  std::uint32_t width() const { return width_; }
  std::uint32_t height() const { return height_; }
  std::size_t pixel_count() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  std::span<const Rgb> pixels() const { return pixels_; }
  const Rgb& at(std::uint32_t x, std::uint32_t y) const { return pixels_[std::size_t(y) * width_ + x]; }

  friend bool operator==(const FrameRGB&, const FrameRGB&) = default;

 private:
  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::vector<Rgb> pixels_;
};

FrameRGB load_ppm(std::span<const std::uint8_t> bytes);
FrameRGB load_ppm_file(const std::filesystem::path& path);
// Canonical form: "P6\n<w> <h>\n255\n" followed by the raw pixels.
std::vector<std::uint8_t> write_ppm(const FrameRGB& frame);
void write_ppm_file(const FrameRGB& frame, const std::filesystem::path& path);

inline constexpr std::string_view kRawMagic = "IVSSRAW1";
inline constexpr std::size_t kRawHeaderSize = 16;

std::vector<std::uint8_t> encode_raw_stream(std::span<const FrameRGB> frames);

// Nearest-neighbour downscale so that max(width, height) <= max_dim.
// Frames already within the limit are returned unchanged.
FrameRGB downscale(const FrameRGB& frame, std::uint32_t max_dim);

enum class SourceKind { frame_directory, raw_stream, single_image };

// An ordered, single-consumer sequence of equally sized frames.
class FrameSource {
 public:
  class Impl;

  FrameSource(FrameSource&&) noexcept;
  FrameSource& operator=(FrameSource&&) noexcept;
  ~FrameSource();

  SourceKind kind() const;
  const std::string& locator() const;

  // Next frame in temporal order, or nullopt once exhausted.
  std::optional<FrameRGB> next();

  // Known up front for directories and single images; for raw streams
  // only after the stream has been exhausted.
  std::optional<std::size_t> frame_count() const;

  // Original frame indices (from file names) for directory sources.
  const std::vector<std::size_t>& source_indices() const;

  // Non-fatal notices gathered while scanning (index gaps and similar).
  const std::vector<std::string>& warnings() const;

 private:
  friend FrameSource open_frame_dir(const std::filesystem::path&);
  friend FrameSource open_raw_stream(std::unique_ptr<std::istream>, std::string);
  friend FrameSource open_single_image(const std::filesystem::path&);
  friend FrameSource frames_source(std::vector<FrameRGB>, std::string);
  explicit FrameSource(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

// Directory of frame_NNNNNN.ppm files (any zero-padded width), ordered by index.
FrameSource open_frame_dir(const std::filesystem::path& dir);
FrameSource open_raw_stream(std::unique_ptr<std::istream> stream, std::string locator = "<stream>");
FrameSource open_raw_file(const std::filesystem::path& path);
FrameSource open_raw_bytes(std::vector<std::uint8_t> bytes, std::string locator = "<upload>");
FrameSource open_single_image(const std::filesystem::path& path);
// In-memory frames, treated as a raw stream of known length.
FrameSource frames_source(std::vector<FrameRGB> frames, std::string locator = "<memory>");

// Picks the source kind from the path: directory, *.ppm image, otherwise raw stream.
FrameSource open_source(const std::filesystem::path& path);

// Drains a source. Enforces dimension uniformity.
std::vector<FrameRGB> read_all(FrameSource& source);

std::string frame_file_name(std::size_t index);

}  // namespace ivss
