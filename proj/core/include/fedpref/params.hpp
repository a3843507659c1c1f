#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fedpref {

struct ModelTag {};
struct DeltaTag {};

// A model (or an update to one) stored as an ordered list of layer vectors.
// Values are immutable after construction; every arithmetic op produces a new
// container. Construction validates that there is at least one layer, that
// no layer is empty and that all values are finite.
template <class Tag>
class Layered {
 public:
  using Layer = std::vector<double>;

  explicit Layered(std::vector<Layer> layers);

  // Splits `flat` into consecutive layers of the given sizes.
  static Layered from_flat(std::span<const double> flat,
                           std::span<const std::size_t> layer_sizes);
  static Layered zeros(std::span<const std::size_t> layer_sizes);

  std::size_t layer_count() const noexcept { return layers_.size(); }
  const Layer& layer(std::size_t l) const { return layers_.at(l); }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::vector<std::size_t> shape() const;
  std::size_t size() const noexcept;

  // Concatenation of all layers.
  std::vector<double> flat() const;

  bool shape_compatible(const Layered& other) const noexcept;

  friend bool operator==(const Layered&, const Layered&) = default;

 private:
  std::vector<Layer> layers_;
};

using LayeredParams = Layered<ModelTag>;
// Δθ = θ − reference. Same shape as the model it was derived from.
using ParamDelta = Layered<DeltaTag>;

// Elementwise arithmetic. Throws StructuralError on shape mismatch and
// NumericError when a result is not finite.
template <class Tag>
Layered<Tag> add(const Layered<Tag>& a, const Layered<Tag>& b);
template <class Tag>
Layered<Tag> sub(const Layered<Tag>& a, const Layered<Tag>& b);
template <class Tag>
Layered<Tag> scale(const Layered<Tag>& a, double c);

// model − reference.
ParamDelta delta(const LayeredParams& model, const LayeredParams& reference);
// model + update.
LayeredParams apply(const LayeredParams& model, const ParamDelta& update);

// Euclidean norm of the concatenated layers.
template <class Tag>
double flat_norm(const Layered<Tag>& d);

// Elementwise arithmetic mean. Throws PreconditionError on an empty list.
LayeredParams mean(std::span<const LayeredParams> models);

}  // namespace fedpref
