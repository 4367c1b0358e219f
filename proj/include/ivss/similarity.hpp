#pragma once

// Fusion of per-descriptor distances into one score under a user's
// descriptor selection: a weighted mean of normalized distances.

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "ivss/descriptors.hpp"

namespace ivss {

enum class Descriptor { avg_rgb = 0, gch = 1, lch = 2, moments = 3, ccv = 4 };
inline constexpr std::size_t kDescriptorCount = 5;
inline constexpr std::array<Descriptor, kDescriptorCount> kAllDescriptors{
    Descriptor::avg_rgb, Descriptor::gch, Descriptor::lch, Descriptor::moments, Descriptor::ccv};

std::string_view descriptor_name(Descriptor d);
std::optional<Descriptor> descriptor_from_name(std::string_view name);

// Enabled descriptors and their weights. Text form: "gch:1,ccv:2"; a bare
// name means weight 1, and "all" enables every descriptor.
class FeatureSelection {
 public:
  // All five descriptors, unit weights.
  static FeatureSelection all();
  static FeatureSelection only(Descriptor d, double weight = 1.0);
  // Throws SelectionError on unknown names, bad numbers, negative weights,
  // empty selection, or zero total weight.
  static FeatureSelection parse(std::string_view text);

  FeatureSelection& enable(Descriptor d, double weight = 1.0);

  bool enabled(Descriptor d) const { return enabled_[index(d)]; }
  double weight(Descriptor d) const { return weights_[index(d)]; }
  double total_weight() const;
  bool empty() const;
  void validate() const;

  FeatureSelection scaled(double factor) const;

  // Canonical text form, descriptors in fixed order, weights printed losslessly.
  std::string to_string() const;

  friend bool operator==(const FeatureSelection&, const FeatureSelection&) = default;

 private:
  static std::size_t index(Descriptor d) { return static_cast<std::size_t>(d); }
  std::array<bool, kDescriptorCount> enabled_{};
  std::array<double, kDescriptorCount> weights_{};
};

// Divisors that bring each raw distance roughly into [0, 1].
struct NormalizerProfile {
  std::array<double, kDescriptorCount> scale{1, 1, 1, 1, 1};

  double operator[](Descriptor d) const { return scale[static_cast<std::size_t>(d)]; }
  void validate() const;
};

// Analytic upper bounds: avg_rgb 255*sqrt(3), gch sqrt(2), lch M*sqrt(2),
// moments sum of weighted per-channel bounds (255, 127.5, 255), ccv 2.
NormalizerProfile default_normalizer(const DescriptorConfig& config, const MomentWeights& weights = kUnitMomentWeights);
NormalizerProfile unit_normalizer();

double raw_distance(Descriptor d, const DescriptorSet& a, const DescriptorSet& b);

double integrated_distance(const DescriptorSet& a, const DescriptorSet& b, const FeatureSelection& sel,
                           const NormalizerProfile& norm);

}  // namespace ivss
