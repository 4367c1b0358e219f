#include "ivss/frame_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "ivss/error.hpp"

namespace ivss {

namespace fs = std::filesystem;

FrameRGB::FrameRGB(std::uint32_t width, std::uint32_t height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width == 0 || height == 0) throw EmptyFrameError("frame dimensions must be positive");
  if (pixels_.size() != std::size_t(width) * height)
    throw DimensionMismatchError("pixel count " + std::to_string(pixels_.size()) + " does not match " +
                                 std::to_string(width) + "x" + std::to_string(height));
}

FrameRGB::FrameRGB(std::uint32_t width, std::uint32_t height, Rgb fill)
    : FrameRGB(width, height, std::vector<Rgb>(std::size_t(width) * height, fill)) {}

namespace {

struct PpmHeader {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::size_t data_offset = 0;
};

bool is_space(std::uint8_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

PpmHeader parse_ppm_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') throw ParseError("not a binary PPM (missing P6 magic)", 0);
  std::size_t pos = 2;

  auto skip_space_and_comments = [&] {
    while (pos < bytes.size()) {
      if (is_space(bytes[pos])) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&](const char* field) -> std::uint64_t {
    std::size_t before = pos;
    skip_space_and_comments();
    if (pos == before) throw ParseError(std::string("expected whitespace before ") + field, pos);
    std::uint64_t value = 0;
    std::size_t start = pos;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 0xFFFFFFFFull) throw ParseError(std::string(field) + " out of range", start);
      ++pos;
    }
    if (pos == start) throw ParseError(std::string("expected ") + field, pos);
    return value;
  };

  PpmHeader h;
  std::uint64_t w = read_uint("width");
  std::uint64_t ht = read_uint("height");
  std::uint64_t maxval = read_uint("maxval");
  if (w == 0 || ht == 0) throw ParseError("zero image dimension", pos);
  if (pos >= bytes.size() || !is_space(bytes[pos])) throw ParseError("expected single whitespace after maxval", pos);
  if (maxval != 255) throw UnsupportedError("PPM maxval " + std::to_string(maxval) + " unsupported (only 255)");
  h.width = static_cast<std::uint32_t>(w);
  h.height = static_cast<std::uint32_t>(ht);
  h.data_offset = pos + 1;
  return h;
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<Rgb> unpack_rgb(const std::uint8_t* data, std::size_t pixel_count) {
  std::vector<Rgb> px(pixel_count);
  for (std::size_t i = 0; i < pixel_count; ++i) px[i] = {data[3 * i], data[3 * i + 1], data[3 * i + 2]};
  return px;
}

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

FrameRGB load_ppm(std::span<const std::uint8_t> bytes) {
  PpmHeader h = parse_ppm_header(bytes);
  std::size_t need = std::size_t(h.width) * h.height * 3;
  if (bytes.size() - h.data_offset < need)
    throw TruncatedError("PPM pixel data truncated: need " + std::to_string(need) + " bytes, have " +
                             std::to_string(bytes.size() - h.data_offset),
                         bytes.size());
  return FrameRGB(h.width, h.height, unpack_rgb(bytes.data() + h.data_offset, std::size_t(h.width) * h.height));
}

FrameRGB load_ppm_file(const fs::path& path) {
  auto bytes = read_file_bytes(path);
  try {
    return load_ppm(bytes);
  } catch (const TruncatedError& e) {
    throw TruncatedError(path.string() + ": " + e.what(), e.offset().value_or(0));
  }
}

std::vector<std::uint8_t> write_ppm(const FrameRGB& frame) {
  std::string header = "P6\n" + std::to_string(frame.width()) + " " + std::to_string(frame.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + frame.pixel_count() * 3);
  for (const Rgb& p : frame.pixels()) {
    out.push_back(p.r);
    out.push_back(p.g);
    out.push_back(p.b);
  }
  return out;
}

void write_ppm_file(const FrameRGB& frame, const fs::path& path) {
  auto bytes = write_ppm(frame);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> encode_raw_stream(std::span<const FrameRGB> frames) {
  if (frames.empty()) throw EmptySourceError("no frames to encode");
  std::vector<std::uint8_t> out(kRawMagic.begin(), kRawMagic.end());
  put_u32le(out, frames[0].width());
  put_u32le(out, frames[0].height());
  for (const FrameRGB& f : frames) {
    if (f.width() != frames[0].width() || f.height() != frames[0].height())
      throw DimensionMismatchError("raw stream frames must share dimensions");
    for (const Rgb& p : f.pixels()) {
      out.push_back(p.r);
      out.push_back(p.g);
      out.push_back(p.b);
    }
  }
  return out;
}

FrameRGB downscale(const FrameRGB& frame, std::uint32_t max_dim) {
  std::uint32_t longest = std::max(frame.width(), frame.height());
  if (longest <= max_dim) return frame;
  std::uint32_t w = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::uint64_t(frame.width()) * max_dim / longest));
  std::uint32_t h = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::uint64_t(frame.height()) * max_dim / longest));
  std::vector<Rgb> px;
  px.reserve(std::size_t(w) * h);
  for (std::uint32_t y = 0; y < h; ++y) {
    std::uint32_t sy = static_cast<std::uint32_t>(std::uint64_t(y) * frame.height() / h);
    for (std::uint32_t x = 0; x < w; ++x) {
      std::uint32_t sx = static_cast<std::uint32_t>(std::uint64_t(x) * frame.width() / w);
      px.push_back(frame.at(sx, sy));
    }
  }
  return FrameRGB(w, h, std::move(px));
}

// ---------------------------------------------------------------------------
// Sources

class FrameSource::Impl {
 public:
  virtual ~Impl() = default;
  virtual SourceKind kind() const = 0;
  virtual std::optional<FrameRGB> next() = 0;
  virtual std::optional<std::size_t> frame_count() const = 0;

  std::string locator;
  std::vector<std::size_t> indices;
  std::vector<std::string> warnings;
};

namespace {

class DirectoryImpl final : public FrameSource::Impl {
 public:
  std::vector<fs::path> files;
  std::size_t cursor = 0;

  SourceKind kind() const override { return SourceKind::frame_directory; }
  std::optional<std::size_t> frame_count() const override { return files.size(); }
  std::optional<FrameRGB> next() override {
    if (cursor >= files.size()) return std::nullopt;
    return load_ppm_file(files[cursor++]);
  }
};

class SingleImageImpl final : public FrameSource::Impl {
 public:
  std::optional<FrameRGB> frame;

  SourceKind kind() const override { return SourceKind::single_image; }
  std::optional<std::size_t> frame_count() const override { return 1; }
  std::optional<FrameRGB> next() override {
    std::optional<FrameRGB> out;
    out.swap(frame);
    return out;
  }
};

class RawStreamImpl final : public FrameSource::Impl {
 public:
  std::unique_ptr<std::istream> in;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint64_t offset = 0;
  std::size_t yielded = 0;
  bool done = false;

  SourceKind kind() const override { return SourceKind::raw_stream; }
  std::optional<std::size_t> frame_count() const override {
    if (!done) return std::nullopt;
    return yielded;
  }
  std::optional<FrameRGB> next() override {
    if (done) return std::nullopt;
    std::size_t frame_bytes = std::size_t(width) * height * 3;
    std::vector<std::uint8_t> buf(frame_bytes);
    in->read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(frame_bytes));
    std::size_t got = static_cast<std::size_t>(in->gcount());
    if (got == 0) {
      done = true;
      return std::nullopt;
    }
    if (got < frame_bytes) {
      done = true;
      throw TruncatedError("raw stream ends with a partial frame of " + std::to_string(got) + " of " +
                               std::to_string(frame_bytes) + " bytes",
                           offset);
    }
    offset += frame_bytes;
    ++yielded;
    return FrameRGB(width, height, unpack_rgb(buf.data(), std::size_t(width) * height));
  }
};

class MemoryImpl final : public FrameSource::Impl {
 public:
  std::vector<FrameRGB> frames;
  std::size_t cursor = 0;

  SourceKind kind() const override { return SourceKind::raw_stream; }
  std::optional<std::size_t> frame_count() const override { return frames.size(); }
  std::optional<FrameRGB> next() override {
    if (cursor >= frames.size()) return std::nullopt;
    return frames[cursor++];
  }
};

std::uint32_t get_u32le(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

std::optional<std::size_t> parse_frame_index(const std::string& name) {
  constexpr std::string_view prefix = "frame_";
  constexpr std::string_view suffix = ".ppm";
  if (name.size() <= prefix.size() + suffix.size()) return std::nullopt;
  if (name.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  if (name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) return std::nullopt;
  std::string_view digits(name.data() + prefix.size(), name.size() - prefix.size() - suffix.size());
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return value;
}

}  // namespace

FrameSource::FrameSource(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
FrameSource::FrameSource(FrameSource&&) noexcept = default;
FrameSource& FrameSource::operator=(FrameSource&&) noexcept = default;
FrameSource::~FrameSource() = default;

SourceKind FrameSource::kind() const { return impl_->kind(); }
const std::string& FrameSource::locator() const { return impl_->locator; }
std::optional<FrameRGB> FrameSource::next() { return impl_->next(); }
std::optional<std::size_t> FrameSource::frame_count() const { return impl_->frame_count(); }
const std::vector<std::size_t>& FrameSource::source_indices() const { return impl_->indices; }
const std::vector<std::string>& FrameSource::warnings() const { return impl_->warnings; }

FrameSource open_frame_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::map<std::size_t, fs::path> by_index;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (auto idx = parse_frame_index(entry.path().filename().string())) {
      if (!by_index.emplace(*idx, entry.path()).second)
        throw ParseError("duplicate frame index " + std::to_string(*idx) + " in " + dir.string());
    }
  }
  if (by_index.empty()) throw EmptySourceError("no frame_<index>.ppm files in " + dir.string());

  auto impl = std::make_unique<DirectoryImpl>();
  impl->locator = dir.string();
  std::optional<std::pair<std::uint32_t, std::uint32_t>> dims;
  std::size_t expected = by_index.begin()->first;
  for (const auto& [idx, path] : by_index) {
    if (idx != expected)
      impl->warnings.push_back("frame index gap: expected " + std::to_string(expected) + ", found " +
                               std::to_string(idx));
    expected = idx + 1;

    // Header-only read for the dimension check.
    std::ifstream in(path, std::ios::binary);
    std::array<char, 512> head{};
    in.read(head.data(), head.size());
    auto n = static_cast<std::size_t>(in.gcount());
    PpmHeader h = parse_ppm_header(std::span(reinterpret_cast<const std::uint8_t*>(head.data()), n));
    if (!dims) {
      dims = {h.width, h.height};
    } else if (dims->first != h.width || dims->second != h.height) {
      throw DimensionMismatchError(path.string() + " is " + std::to_string(h.width) + "x" + std::to_string(h.height) +
                                   ", expected " + std::to_string(dims->first) + "x" + std::to_string(dims->second));
    }
    impl->indices.push_back(idx);
    impl->files.push_back(path);
  }
  return FrameSource(std::move(impl));
}

FrameSource open_raw_stream(std::unique_ptr<std::istream> stream, std::string locator) {
  std::array<std::uint8_t, kRawHeaderSize> header{};
  stream->read(reinterpret_cast<char*>(header.data()), header.size());
  auto got = static_cast<std::size_t>(stream->gcount());
  if (got < kRawHeaderSize) {
    if (got >= kRawMagic.size() && std::memcmp(header.data(), kRawMagic.data(), kRawMagic.size()) != 0)
      throw ParseError("bad raw stream magic", 0);
    throw TruncatedError("raw stream header truncated", got);
  }
  if (std::memcmp(header.data(), kRawMagic.data(), kRawMagic.size()) != 0) throw ParseError("bad raw stream magic", 0);
  auto impl = std::make_unique<RawStreamImpl>();
  impl->width = get_u32le(header.data() + 8);
  impl->height = get_u32le(header.data() + 12);
  if (impl->width == 0 || impl->height == 0) throw ParseError("raw stream declares a zero dimension", 8);
  impl->in = std::move(stream);
  impl->offset = kRawHeaderSize;
  impl->locator = std::move(locator);
  return FrameSource(std::move(impl));
}

FrameSource open_raw_file(const fs::path& path) {
  auto in = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*in) throw Error("cannot open " + path.string());
  return open_raw_stream(std::move(in), path.string());
}

FrameSource open_raw_bytes(std::vector<std::uint8_t> bytes, std::string locator) {
  auto in = std::make_unique<std::istringstream>(std::string(bytes.begin(), bytes.end()));
  return open_raw_stream(std::move(in), std::move(locator));
}

FrameSource open_single_image(const fs::path& path) {
  auto impl = std::make_unique<SingleImageImpl>();
  impl->frame = load_ppm_file(path);
  impl->locator = path.string();
  impl->indices = {0};
  return FrameSource(std::move(impl));
}

FrameSource frames_source(std::vector<FrameRGB> frames, std::string locator) {
  if (frames.empty()) throw EmptySourceError("no frames");
  auto impl = std::make_unique<MemoryImpl>();
  impl->frames = std::move(frames);
  impl->locator = std::move(locator);
  return FrameSource(std::move(impl));
}

FrameSource open_source(const fs::path& path) {
  if (fs::is_directory(path)) return open_frame_dir(path);
  if (!fs::exists(path)) throw Error("no such file or directory: " + path.string());
  if (path.extension() == ".ppm") return open_single_image(path);
  return open_raw_file(path);
}

std::vector<FrameRGB> read_all(FrameSource& source) {
  std::vector<FrameRGB> frames;
  while (auto f = source.next()) {
    if (!frames.empty() && (f->width() != frames[0].width() || f->height() != frames[0].height()))
      throw DimensionMismatchError("frame " + std::to_string(frames.size()) + " of " + source.locator() +
                                   " differs in size from frame 0");
    frames.push_back(std::move(*f));
  }
  return frames;
}

std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06zu.ppm", index);
  return buf;
}

}  // namespace ivss
