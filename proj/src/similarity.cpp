#include "ivss/similarity.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "ivss/error.hpp"

namespace ivss {

namespace {

constexpr std::array<std::string_view, kDescriptorCount> kNames{"avg_rgb", "gch", "lch", "moments", "ccv"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string format_weight(double w) {
  char buf[64];
  // Shortest representation that parses back to the same double.
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, w);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view descriptor_name(Descriptor d) { return kNames[static_cast<std::size_t>(d)]; }

std::optional<Descriptor> descriptor_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return static_cast<Descriptor>(i);
  return std::nullopt;
}

FeatureSelection FeatureSelection::all() {
  FeatureSelection s;
  for (Descriptor d : kAllDescriptors) s.enable(d);
  return s;
}

FeatureSelection FeatureSelection::only(Descriptor d, double weight) {
  FeatureSelection s;
  s.enable(d, weight);
  s.validate();
  return s;
}

FeatureSelection& FeatureSelection::enable(Descriptor d, double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight))
    throw SelectionError("weight for " + std::string(descriptor_name(d)) + " must be a finite non-negative number");
  enabled_[index(d)] = true;
  weights_[index(d)] = weight;
  return *this;
}

FeatureSelection FeatureSelection::parse(std::string_view text) {
  FeatureSelection s;
  text = trim(text);
  if (text.empty()) throw SelectionError("empty feature selection");
  if (text == "all") return all();
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) throw SelectionError("empty item in feature selection");

    std::string_view name = item;
    double weight = 1.0;
    if (const auto colon = item.find(':'); colon != std::string_view::npos) {
      name = trim(item.substr(0, colon));
      std::string_view num = trim(item.substr(colon + 1));
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), weight);
      if (ec != std::errc() || ptr != num.data() + num.size() || num.empty())
        throw SelectionError("bad weight '" + std::string(num) + "' for " + std::string(name));
    }
    auto d = descriptor_from_name(name);
    if (!d)
      throw SelectionError("unknown descriptor '" + std::string(name) +
                           "' (expected avg_rgb, gch, lch, moments, ccv or all)");
    if (s.enabled(*d)) throw SelectionError("descriptor " + std::string(name) + " listed twice");
    s.enable(*d, weight);
  }
  s.validate();
  return s;
}

double FeatureSelection::total_weight() const {
  double t = 0;
  for (std::size_t i = 0; i < kDescriptorCount; ++i)
    if (enabled_[i]) t += weights_[i];
  return t;
}

bool FeatureSelection::empty() const {
  for (bool e : enabled_)
    if (e) return false;
  return true;
}

void FeatureSelection::validate() const {
  if (empty()) throw SelectionError("feature selection enables no descriptor");
  if (!(total_weight() > 0.0)) throw SelectionError("enabled descriptor weights sum to zero");
}

FeatureSelection FeatureSelection::scaled(double factor) const {
  if (!(factor > 0.0)) throw SelectionError("weight scale must be positive");
  FeatureSelection s = *this;
  for (double& w : s.weights_) w *= factor;
  return s;
}

std::string FeatureSelection::to_string() const {
  std::string out;
  for (Descriptor d : kAllDescriptors) {
    if (!enabled(d)) continue;
    if (!out.empty()) out += ',';
    out += descriptor_name(d);
    out += ':';
    out += format_weight(weight(d));
  }
  return out;
}

void NormalizerProfile::validate() const {
  for (double s : scale)
    if (!(s > 0.0)) throw ConfigError("normalizer scales must be positive");
}

NormalizerProfile default_normalizer(const DescriptorConfig& config, const MomentWeights& weights) {
  config.validate();
  const double blocks = static_cast<double>(config.grid_rows) * config.grid_cols;
  constexpr double kMeanBound = 255.0;
  constexpr double kStddevBound = 0.5 * 255.0;
  constexpr double kSkewBound = 255.0;
  double moments = 0;
  for (const auto& w : weights) moments += w[0] * kMeanBound + w[1] * kStddevBound + w[2] * kSkewBound;
  if (!(moments > 0.0)) moments = 1.0;

  NormalizerProfile p;
  p.scale[static_cast<std::size_t>(Descriptor::avg_rgb)] = 255.0 * std::sqrt(3.0);
  p.scale[static_cast<std::size_t>(Descriptor::gch)] = std::sqrt(2.0);
  p.scale[static_cast<std::size_t>(Descriptor::lch)] = blocks * std::sqrt(2.0);
  p.scale[static_cast<std::size_t>(Descriptor::moments)] = moments;
  p.scale[static_cast<std::size_t>(Descriptor::ccv)] = 2.0;
  return p;
}

NormalizerProfile unit_normalizer() { return NormalizerProfile{}; }

double raw_distance(Descriptor d, const DescriptorSet& a, const DescriptorSet& b) {
  switch (d) {
    case Descriptor::avg_rgb: return dist_avg_rgb(a.avg_rgb, b.avg_rgb);
    case Descriptor::gch: return dist_gch(a.gch, b.gch);
    case Descriptor::lch: return dist_lch(a.lch, b.lch);
    case Descriptor::moments: return dist_moments(a.moments, b.moments);
    case Descriptor::ccv: return dist_ccv(a.ccv, b.ccv);
  }
  throw ConfigError("unknown descriptor");
}

double integrated_distance(const DescriptorSet& a, const DescriptorSet& b, const FeatureSelection& sel,
                           const NormalizerProfile& norm) {
  if (!(a.config == b.config)) throw ConfigMismatchError("descriptor sets computed under different configurations");
  sel.validate();
  double sum = 0;
  for (Descriptor d : kAllDescriptors) {
    if (!sel.enabled(d) || sel.weight(d) == 0.0) continue;
    sum += sel.weight(d) * (raw_distance(d, a, b) / norm[d]);
  }
  return sum / sel.total_weight();
}

}  // namespace ivss
