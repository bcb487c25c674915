#pragma once

#include <Eigen/Core>
#include <complex>
#include <stdexcept>

namespace omsense {

// Uniform frequency grid in rad/s. omega(i) is the canonical point formula;
// every consumer goes through it so independently produced grids agree bit
// for bit.
struct FrequencyGrid {
  double start = 0.0;
  double stop = 0.0;
  Eigen::Index points = 0;

  FrequencyGrid(double start_, double stop_, Eigen::Index points_)
      : start(start_), stop(stop_), points(points_) {
    if (!(start < stop)) throw std::invalid_argument("grid start must be < stop");
    if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
  }

  double step() const { return (stop - start) / double(points - 1); }
  double omega(Eigen::Index i) const { return start + double(i) * step(); }

  Eigen::ArrayXd omegas() const {
    Eigen::ArrayXd out(points);
    for (Eigen::Index i = 0; i < points; ++i) out[i] = omega(i);
    return out;
  }
};

struct RealSpectrum {
  FrequencyGrid grid;
  Eigen::ArrayXd values;
};

struct ComplexSpectrum {
  FrequencyGrid grid;
  Eigen::ArrayXcd values;
};

}  // namespace omsense
