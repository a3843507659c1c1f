#include "fedpref/params.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "fedpref/errors.hpp"

namespace fedpref {

namespace {

void require_finite(double v, const char* op) {
  if (!std::isfinite(v)) {
    throw NumericError(std::string(op) + ": non-finite value");
  }
}

template <class Tag>
void require_same_shape(const Layered<Tag>& a, const Layered<Tag>& b,
                        const char* op) {
  if (!a.shape_compatible(b)) {
    throw StructuralError(std::string(op) + ": shape mismatch");
  }
}

template <class Tag, class Fn>
Layered<Tag> zip(const Layered<Tag>& a, const Layered<Tag>& b, const char* op,
                 Fn fn) {
  require_same_shape(a, b, op);
  std::vector<std::vector<double>> out(a.layer_count());
  for (std::size_t l = 0; l < a.layer_count(); ++l) {
    const auto& x = a.layer(l);
    const auto& y = b.layer(l);
    out[l].resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      out[l][k] = fn(x[k], y[k]);
      require_finite(out[l][k], op);
    }
  }
  return Layered<Tag>(std::move(out));
}

}  // namespace

template <class Tag>
Layered<Tag>::Layered(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw StructuralError("model must have at least one layer");
  for (const auto& layer : layers_) {
    if (layer.empty()) throw StructuralError("model layers must be nonempty");
    for (double v : layer) require_finite(v, "model");
  }
}

template <class Tag>
Layered<Tag> Layered<Tag>::from_flat(std::span<const double> flat,
                                     std::span<const std::size_t> layer_sizes) {
  const std::size_t total =
      std::accumulate(layer_sizes.begin(), layer_sizes.end(), std::size_t{0});
  if (total != flat.size()) {
    throw StructuralError("layer sizes sum to " + std::to_string(total) +
                          " but vector has " + std::to_string(flat.size()) +
                          " entries");
  }
  std::vector<Layer> layers;
  layers.reserve(layer_sizes.size());
  std::size_t offset = 0;
  for (std::size_t n : layer_sizes) {
    layers.emplace_back(flat.begin() + offset, flat.begin() + offset + n);
    offset += n;
  }
  return Layered(std::move(layers));
}

template <class Tag>
Layered<Tag> Layered<Tag>::zeros(std::span<const std::size_t> layer_sizes) {
  std::vector<Layer> layers;
  for (std::size_t n : layer_sizes) layers.emplace_back(n, 0.0);
  return Layered(std::move(layers));
}

template <class Tag>
std::vector<std::size_t> Layered<Tag>::shape() const {
  std::vector<std::size_t> s;
  s.reserve(layers_.size());
  for (const auto& layer : layers_) s.push_back(layer.size());
  return s;
}

template <class Tag>
std::size_t Layered<Tag>::size() const noexcept {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.size();
  return n;
}

template <class Tag>
std::vector<double> Layered<Tag>::flat() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& layer : layers_) out.insert(out.end(), layer.begin(), layer.end());
  return out;
}

template <class Tag>
bool Layered<Tag>::shape_compatible(const Layered& other) const noexcept {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].size() != other.layers_[l].size()) return false;
  }
  return true;
}

template <class Tag>
Layered<Tag> add(const Layered<Tag>& a, const Layered<Tag>& b) {
  return zip(a, b, "add", [](double x, double y) { return x + y; });
}

template <class Tag>
Layered<Tag> sub(const Layered<Tag>& a, const Layered<Tag>& b) {
  return zip(a, b, "sub", [](double x, double y) { return x - y; });
}

template <class Tag>
Layered<Tag> scale(const Layered<Tag>& a, double c) {
  require_finite(c, "scale");
  std::vector<std::vector<double>> out = a.layers();
  for (auto& layer : out) {
    for (double& v : layer) {
      v *= c;
      require_finite(v, "scale");
    }
  }
  return Layered<Tag>(std::move(out));
}

template <class Tag>
double flat_norm(const Layered<Tag>& d) {
  double sum = 0.0;
  for (const auto& layer : d.layers()) {
    for (double v : layer) sum += v * v;
  }
  return std::sqrt(sum);
}

ParamDelta delta(const LayeredParams& model, const LayeredParams& reference) {
  require_same_shape(model, reference, "delta");
  std::vector<std::vector<double>> out(model.layer_count());
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    const auto& x = model.layer(l);
    const auto& y = reference.layer(l);
    out[l].resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      out[l][k] = x[k] - y[k];
      require_finite(out[l][k], "delta");
    }
  }
  return ParamDelta(std::move(out));
}

LayeredParams apply(const LayeredParams& model, const ParamDelta& update) {
  if (model.shape() != update.shape()) throw StructuralError("apply: shape mismatch");
  std::vector<std::vector<double>> out = model.layers();
  for (std::size_t l = 0; l < out.size(); ++l) {
    const auto& u = update.layer(l);
    for (std::size_t k = 0; k < out[l].size(); ++k) {
      out[l][k] += u[k];
      require_finite(out[l][k], "apply");
    }
  }
  return LayeredParams(std::move(out));
}

LayeredParams mean(std::span<const LayeredParams> models) {
  if (models.empty()) throw PreconditionError("mean of an empty model list");
  const auto& first = models.front();
  std::vector<std::vector<double>> acc(first.layer_count());
  for (std::size_t l = 0; l < first.layer_count(); ++l) {
    acc[l].assign(first.layer(l).size(), 0.0);
  }
  for (const auto& m : models) {
    require_same_shape(first, m, "mean");
    for (std::size_t l = 0; l < acc.size(); ++l) {
      const auto& x = m.layer(l);
      for (std::size_t k = 0; k < x.size(); ++k) acc[l][k] += x[k];
    }
  }
  const double n = static_cast<double>(models.size());
  for (auto& layer : acc) {
    for (double& v : layer) {
      v /= n;
      require_finite(v, "mean");
    }
  }
  return LayeredParams(std::move(acc));
}

template class Layered<ModelTag>;
template class Layered<DeltaTag>;
template LayeredParams add(const LayeredParams&, const LayeredParams&);
template ParamDelta add(const ParamDelta&, const ParamDelta&);
template LayeredParams sub(const LayeredParams&, const LayeredParams&);
template ParamDelta sub(const ParamDelta&, const ParamDelta&);
template LayeredParams scale(const LayeredParams&, double);
template ParamDelta scale(const ParamDelta&, double);
template double flat_norm(const LayeredParams&);
template double flat_norm(const ParamDelta&);

}  // namespace fedpref
