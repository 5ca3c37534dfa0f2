#include "mqdde/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mqdde/errors.hpp"

namespace mqdde {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

std::span<const MQCenter> MQBasis::extras() const {
  return std::span<const MQCenter>(centers).first(static_cast<std::size_t>(n_extra));
}

std::span<const MQCenter> MQBasis::nodes() const {
  return std::span<const MQCenter>(centers).subspan(static_cast<std::size_t>(n_extra));
}

std::vector<double> MQBasis::node_positions() const {
  std::vector<double> out;
  out.reserve(centers.size() - static_cast<std::size_t>(n_extra));
  for (const auto& c : nodes()) out.push_back(c.position);
  return out;
}

void MQBasis::validate() const {
  if (n_extra < 1) throw invalid_input("MQBasis: at least one extra center is required");
  if (centers.size() < static_cast<std::size_t>(n_extra) + 2) {
    throw invalid_input("MQBasis: need at least two in-domain centers");
  }
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (!(centers[i].shape > 0.0)) {
      throw invalid_input("MQBasis: non-positive shape at center " + std::to_string(i));
    }
    if (i > 0 && !(centers[i].position > centers[i - 1].position)) {
      throw invalid_input("MQBasis: center positions must be strictly increasing");
    }
  }
}

double mq_eval(double x, const MQCenter& center) {
  const double r = x - center.position;
  return std::sqrt(r * r + center.shape * center.shape);
}

double mq_deriv(double x, const MQCenter& center) {
  const double r = x - center.position;
  return r / std::sqrt(r * r + center.shape * center.shape);
}

double mq_deriv2(double x, const MQCenter& center) {
  const double r = x - center.position;
  const double c2 = center.shape * center.shape;
  const double s = r * r + c2;
  return c2 / (s * std::sqrt(s));
}

double mq_derivative(double x, const MQCenter& center, int order) {
  switch (order) {
    case 0:
      return mq_eval(x, center);
    case 1:
      return mq_deriv(x, center);
    case 2:
      return mq_deriv2(x, center);
    default:
      throw invalid_input("multiquadric derivative of order " + std::to_string(order) +
                          " is not supported");
  }
}

std::vector<double> nearest_distances(std::span<const double> nodes) {
  const std::size_t n = nodes.size();
  if (n < 2) throw invalid_input("nearest_distances: need at least two nodes");
  std::vector<double> d(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double left = j > 0 ? nodes[j] - nodes[j - 1] : kInf;
    const double right = j + 1 < n ? nodes[j + 1] - nodes[j] : kInf;
    d[j] = std::min(left, right);
  }
  return d;
}

std::vector<double> distribute_shapes(std::span<const double> nodes, const ShapeRule& rule) {
  if (nodes.size() < 2) throw invalid_input("distribute_shapes: need at least two nodes");
  for (std::size_t j = 1; j < nodes.size(); ++j) {
    if (!(nodes[j] > nodes[j - 1])) {
      throw invalid_input("distribute_shapes: nodes must be strictly increasing");
    }
  }
  if (!(rule.lambda > 0.0) || !(rule.mu > 0.0) || !(rule.gamma >= 0.0 && rule.gamma < 1.0) ||
      rule.n_extra < 1) {
    throw invalid_input("distribute_shapes: require lambda > 0, mu > 0, 0 <= gamma < 1");
  }

  const auto d = nearest_distances(nodes);
  const double boosted = rule.lambda * rule.mu * d.front();
  const std::size_t n = nodes.size();
  const auto extra = static_cast<std::size_t>(rule.n_extra);

  std::vector<double> shapes(extra + n, boosted);
  // Node index j is 1-based, so the node at a has odd parity.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double sign = (k % 2 == 0) ? -1.0 : 1.0;
    shapes[extra + k] = rule.mu * d[k] * (1.0 + rule.gamma * sign);
  }
  if (rule.boost_first_node) shapes[extra] = boosted;
  return shapes;
}

}  // namespace mqdde
