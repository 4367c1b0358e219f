#include "ivss/index_store.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <bit>
#include <charconv>
#include <chrono>
#include <cstring>
#include <fstream>
#include <map>

#include "ivss/error.hpp"

namespace ivss {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "index serialization assumes a little-endian host");

namespace {

class ByteWriter {
 public:
  std::vector<std::uint8_t> bytes;

  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    bytes.insert(bytes.end(), b, b + n);
  }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void i64(std::int64_t v) { raw(&v, 8); }
  void f64(double v) { raw(&v, 8); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  void f64s(const std::vector<double>& v) {
    u32(static_cast<std::uint32_t>(v.size()));
    for (double x : v) f64(x);
  }
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::uint64_t base) : bytes_(bytes), base_(base) {}

  std::uint64_t offset() const { return base_ + pos_; }
  bool done() const { return pos_ == bytes_.size(); }

  void raw(void* out, std::size_t n) {
    if (bytes_.size() - pos_ < n)
      throw TruncatedError("index data ends early: need " + std::to_string(n) + " bytes", offset());
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n)
      throw TruncatedError("index data ends early: need " + std::to_string(n) + " bytes", offset());
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    raw(&v, 8);
    return v;
  }
  std::int64_t i64() {
    std::int64_t v;
    raw(&v, 8);
    return v;
  }
  double f64() {
    double v;
    raw(&v, 8);
    return v;
  }
  std::string str() {
    auto n = u32();
    auto s = take(n);
    return std::string(s.begin(), s.end());
  }
  std::vector<double> f64s(std::size_t expected) {
    const std::uint64_t at = offset();
    const std::uint32_t n = u32();
    if (n != expected)
      throw ParseError("vector length " + std::to_string(n) + " where " + std::to_string(expected) + " expected", at);
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t base_;
  std::size_t pos_ = 0;
};

void write_histogram(ByteWriter& w, const Histogram& h) {
  w.u64(h.pixel_count);
  w.f64s(h.bins);
}

Histogram read_histogram(ByteReader& r, std::size_t bins) {
  Histogram h;
  h.pixel_count = r.u64();
  h.bins = r.f64s(bins);
  return h;
}

// Everything that determines retrieval behaviour; names and thumbnails excluded.
void write_descriptors(ByteWriter& w, const DescriptorSet& d) {
  w.u32(static_cast<std::uint32_t>(d.config.bits));
  w.u32(d.config.grid_rows);
  w.u32(d.config.grid_cols);
  w.f64(d.config.tau);
  w.f64(d.avg_rgb.r);
  w.f64(d.avg_rgb.g);
  w.f64(d.avg_rgb.b);
  write_histogram(w, d.gch.histogram);
  w.u32(d.lch.grid_rows);
  w.u32(d.lch.grid_cols);
  w.u32(static_cast<std::uint32_t>(d.lch.blocks.size()));
  for (const Histogram& h : d.lch.blocks) write_histogram(w, h);
  for (const ChannelMoments& m : d.moments.channel) {
    w.f64(m.mean);
    w.f64(m.stddev);
    w.f64(m.skewness);
  }
  w.f64(d.ccv.tau);
  w.u64(d.ccv.pixel_count);
  w.f64s(d.ccv.coherent);
  w.f64s(d.ccv.incoherent);
}

DescriptorSet read_descriptors(ByteReader& r, const DescriptorConfig& expected) {
  DescriptorSet d;
  const std::uint64_t at = r.offset();
  d.config.bits = static_cast<int>(r.u32());
  d.config.grid_rows = r.u32();
  d.config.grid_cols = r.u32();
  d.config.tau = r.f64();
  if (!(d.config == expected)) throw ConfigMismatchError("record descriptors at byte " + std::to_string(at) +
                                                         " were computed under a different configuration");
  const std::size_t bins = ColorQuantizer(d.config.bits).bin_count();
  d.avg_rgb.r = r.f64();
  d.avg_rgb.g = r.f64();
  d.avg_rgb.b = r.f64();
  d.gch.histogram = read_histogram(r, bins);
  d.lch.grid_rows = r.u32();
  d.lch.grid_cols = r.u32();
  const std::uint64_t blocks_at = r.offset();
  const std::uint32_t blocks = r.u32();
  if (d.lch.grid_rows != d.config.grid_rows || d.lch.grid_cols != d.config.grid_cols ||
      blocks != d.lch.grid_rows * d.lch.grid_cols)
    throw ParseError("LCH block layout inconsistent with config", blocks_at);
  d.lch.blocks.reserve(blocks);
  for (std::uint32_t k = 0; k < blocks; ++k) d.lch.blocks.push_back(read_histogram(r, bins));
  for (ChannelMoments& m : d.moments.channel) {
    m.mean = r.f64();
    m.stddev = r.f64();
    m.skewness = r.f64();
  }
  d.ccv.tau = r.f64();
  d.ccv.pixel_count = r.u64();
  d.ccv.coherent = r.f64s(bins);
  d.ccv.incoherent = r.f64s(bins);
  return d;
}

void write_frame(ByteWriter& w, const FrameRGB& f) {
  w.u32(f.width());
  w.u32(f.height());
  for (const Rgb& p : f.pixels()) w.raw(&p, 3);
}

FrameRGB read_frame(ByteReader& r) {
  const std::uint64_t at = r.offset();
  const std::uint32_t w = r.u32();
  const std::uint32_t h = r.u32();
  if (w == 0 || h == 0 || std::uint64_t(w) * h > (1ull << 28)) throw ParseError("implausible thumbnail size", at);
  auto bytes = r.take(std::size_t(w) * h * 3);
  std::vector<Rgb> px(std::size_t(w) * h);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = {bytes[3 * i], bytes[3 * i + 1], bytes[3 * i + 2]};
  return FrameRGB(w, h, std::move(px));
}

void write_shots(ByteWriter& w, const std::vector<Shot>& shots) {
  w.u32(static_cast<std::uint32_t>(shots.size()));
  for (const Shot& s : shots) {
    w.u64(s.start_frame);
    w.u64(s.end_frame);
  }
}

std::vector<std::uint8_t> record_block(const VideoRecord& rec) {
  ByteWriter w;
  w.str(rec.video_id);
  w.str(rec.display_name);
  w.str(rec.source_locator);
  w.i64(rec.indexed_at);
  w.u64(rec.frame_count);
  write_shots(w, rec.shots);
  w.u32(static_cast<std::uint32_t>(rec.keyframes.size()));
  for (const KeyFrame& k : rec.keyframes) {
    w.u64(k.frame_index);
    w.u64(k.shot_id);
    write_descriptors(w, k.descriptors);
    write_frame(w, k.thumbnail);
  }
  return std::move(w.bytes);
}

VideoRecord read_record(ByteReader& r, const PipelineConfig& config) {
  VideoRecord rec;
  rec.video_id = r.str();
  rec.display_name = r.str();
  rec.source_locator = r.str();
  rec.indexed_at = r.i64();
  rec.frame_count = r.u64();
  const std::uint32_t shots = r.u32();
  for (std::uint32_t s = 0; s < shots; ++s) {
    const std::uint64_t at = r.offset();
    Shot shot{r.u64(), r.u64()};
    if (shot.start_frame > shot.end_frame || shot.end_frame >= rec.frame_count)
      throw ParseError("shot range out of bounds", at);
    rec.shots.push_back(shot);
  }
  const std::uint64_t kf_at = r.offset();
  const std::uint32_t kfs = r.u32();
  if (kfs == 0) throw ParseError("record without key frames", kf_at);
  for (std::uint32_t i = 0; i < kfs; ++i) {
    KeyFrame k;
    const std::uint64_t at = r.offset();
    k.frame_index = r.u64();
    k.shot_id = r.u64();
    if (k.shot_id >= rec.shots.size() || k.frame_index < rec.shots[k.shot_id].start_frame ||
        k.frame_index > rec.shots[k.shot_id].end_frame)
      throw ParseError("key frame outside its shot", at);
    k.descriptors = read_descriptors(r, config.descriptors);
    k.thumbnail = read_frame(r);
    rec.keyframes.push_back(std::move(k));
  }
  return rec;
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::uint8_t b : bytes) {
    out += kDigits[b >> 4];
    out += kDigits[b & 15];
  }
  return out;
}

}  // namespace

const VideoRecord* FeatureIndex::find(std::string_view video_id) const {
  for (const VideoRecord& r : records)
    if (r.video_id == video_id) return &r;
  return nullptr;
}

std::string config_to_text(const PipelineConfig& c) {
  return "bits=" + std::to_string(c.descriptors.bits) + "\n" + "grid=" + std::to_string(c.descriptors.grid_rows) +
         "x" + std::to_string(c.descriptors.grid_cols) + "\n" + "tau=" + format_real(c.descriptors.tau) + "\n" +
         "shot_threshold=" + format_real(c.shot_threshold) + "\n" + "cluster_delta=" + format_real(c.cluster_delta) +
         "\n";
}

PipelineConfig config_from_text(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("config line without '=': " + std::string(line));
    kv.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(std::string("config is missing ") + key);
    return it->second;
  };
  auto real = [&](const char* key) {
    const std::string& s = get(key);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(std::string("bad number for ") + key);
    return v;
  };
  auto uint = [](std::string_view s, const char* key) {
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(std::string("bad integer for ") + key);
    return v;
  };

  PipelineConfig c;
  c.descriptors.bits = static_cast<int>(uint(get("bits"), "bits"));
  const std::string& grid = get("grid");
  auto x = grid.find('x');
  if (x == std::string::npos) throw ParseError("grid must be RxC");
  c.descriptors.grid_rows = uint(std::string_view(grid).substr(0, x), "grid");
  c.descriptors.grid_cols = uint(std::string_view(grid).substr(x + 1), "grid");
  c.descriptors.tau = real("tau");
  c.shot_threshold = real("shot_threshold");
  c.cluster_delta = real("cluster_delta");
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ParseError(std::string("invalid config in index header: ") + e.what());
  }
  return c;
}

std::string content_id(const VideoAnalysis& analysis) {
  ByteWriter w;
  w.u64(analysis.frame_count);
  w.u32(analysis.width);
  w.u32(analysis.height);
  write_shots(w, analysis.shots);
  w.u32(static_cast<std::uint32_t>(analysis.keyframes.size()));
  for (const KeyFrame& k : analysis.keyframes) {
    w.u64(k.frame_index);
    w.u64(k.shot_id);
    write_descriptors(w, k.descriptors);
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(w.bytes.data(), w.bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  return to_hex(std::span<const std::uint8_t>(digest, 16));
}

VideoRecord make_record(const VideoAnalysis& analysis, std::string display_name, std::string source_locator) {
  VideoRecord rec;
  rec.video_id = content_id(analysis);
  rec.display_name = std::move(display_name);
  rec.source_locator = std::move(source_locator);
  rec.frame_count = analysis.frame_count;
  rec.shots = analysis.shots;
  rec.keyframes = analysis.keyframes;
  rec.indexed_at =
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
  return rec;
}

RegisterOutcome add_record(const FeatureIndex& index, VideoRecord record) {
  if (record.keyframes.empty()) throw EmptySourceError("record has no key frames");
  for (const KeyFrame& k : record.keyframes)
    if (!(k.descriptors.config == index.config.descriptors))
      throw ConfigMismatchError("key frame descriptors were computed under a different configuration");
  if (const VideoRecord* existing = index.find(record.video_id)) return {index, *existing, true};
  RegisterOutcome out{index, record, false};
  out.index.records.push_back(std::move(record));
  return out;
}

RegisterOutcome register_analysis(const FeatureIndex& index, const VideoAnalysis& analysis, std::string display_name,
                                  std::string source_locator) {
  return add_record(index, make_record(analysis, std::move(display_name), std::move(source_locator)));
}

RegisterOutcome register_video(const FeatureIndex& index, FrameSource& source, std::string display_name) {
  VideoAnalysis analysis = analyze_video(source, index.config);
  return register_analysis(index, analysis, std::move(display_name), source.locator());
}

std::vector<std::uint8_t> serialize_index(const FeatureIndex& index) {
  ByteWriter w;
  w.raw(kIndexMagic.data(), kIndexMagic.size());
  w.u32(index.format_version);
  const std::string cfg = config_to_text(index.config);
  w.u32(static_cast<std::uint32_t>(cfg.size()));
  w.raw(cfg.data(), cfg.size());
  w.u64(index.records.size());
  for (const VideoRecord& rec : index.records) {
    auto block = record_block(rec);
    w.u64(block.size());
    w.raw(block.data(), block.size());
  }
  return std::move(w.bytes);
}

FeatureIndex deserialize_index(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kIndexMagic.size() || std::memcmp(bytes.data(), kIndexMagic.data(), kIndexMagic.size()) != 0)
    throw ParseError("not an IVSSIDX1 index file", 0);
  ByteReader r(bytes.subspan(kIndexMagic.size()), kIndexMagic.size());
  FeatureIndex index;
  const std::uint32_t version = r.u32();
  if (version == 0 || version > kIndexFormatVersion)
    throw VersionError("index format version " + std::to_string(version) + " not supported (this build reads " +
                       std::to_string(kIndexFormatVersion) + ")");
  index.format_version = version;
  const std::uint32_t cfg_len = r.u32();
  auto cfg = r.take(cfg_len);
  index.config = config_from_text(std::string_view(reinterpret_cast<const char*>(cfg.data()), cfg.size()));

  const std::uint64_t count = r.u64();
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t len = r.u64();
    const std::uint64_t block_at = r.offset();
    if (len > bytes.size()) throw TruncatedError("record block length exceeds file size", block_at);
    ByteReader block(r.take(static_cast<std::size_t>(len)), block_at);
    VideoRecord rec = read_record(block, index.config);
    if (!block.done()) throw ParseError("trailing bytes in record block", block.offset());
    if (index.find(rec.video_id)) throw ParseError("duplicate video id " + rec.video_id, block_at);
    index.records.push_back(std::move(rec));
  }
  if (!r.done()) throw ParseError("trailing bytes after last record", r.offset());
  return index;
}

void save(const FeatureIndex& index, const fs::path& path) {
  const auto bytes = serialize_index(index);
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

FeatureIndex load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open index " + path.string());
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return deserialize_index(bytes);
}

}  // namespace ivss
