#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mqdde {

struct MQCenter {
  double position = 0.0;
  double shape = 1.0;
};

/// Centers of a multiquadric expansion on [a, b]. The first `n_extra` centers
/// lie strictly below a; the remaining ones are the collocation nodes, with
/// the first at a and the last at b.
struct MQBasis {
  std::vector<MQCenter> centers;
  int n_extra = 1;

  std::size_t size() const { return centers.size(); }
  std::span<const MQCenter> extras() const;
  std::span<const MQCenter> nodes() const;
  std::vector<double> node_positions() const;

  /// Throws invalid_input unless the ordering and positivity invariants hold.
  void validate() const;
};

/// sqrt((x - x_j)^2 + c_j^2)
double mq_eval(double x, const MQCenter& center);
/// (x - x_j) / sqrt((x - x_j)^2 + c_j^2)
double mq_deriv(double x, const MQCenter& center);
/// c_j^2 / ((x - x_j)^2 + c_j^2)^(3/2)
double mq_deriv2(double x, const MQCenter& center);

/// Derivative of order 0, 1 or 2; other orders raise invalid_input.
double mq_derivative(double x, const MQCenter& center, int order);

struct ShapeRule {
  double lambda = 10.0;
  double mu = 1.0;
  double gamma = 0.1;
  /// Number of centers placed below a; each one gets the boosted shape.
  int n_extra = 1;
  /// Also give the node at a the boosted shape (by default only the extra
  /// centers and the node at b are boosted).
  bool boost_first_node = false;
};

/// Shape parameters for the centers {extras, nodes}. With d_j the distance from
/// node j to its nearest neighbour (1-based j = 1..N):
///   extras and node N:  lambda * mu * d_1
///   node j < N:         mu * d_j * (1 + gamma * (-1)^j)
/// The result has n_extra + nodes.size() entries, extras first.
std::vector<double> distribute_shapes(std::span<const double> nodes, const ShapeRule& rule);

/// Nearest-neighbour distance of every node within the node set.
std::vector<double> nearest_distances(std::span<const double> nodes);

}  // namespace mqdde
