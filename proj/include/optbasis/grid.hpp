#pragma once

#include <cmath>
#include <numbers>

#include "optbasis/error.hpp"
#include "optbasis/linalg.hpp"

namespace optbasis {

/// Uniform grid on [0, L]^2 with m intervals per axis. Unknowns live on the
/// (m-1)^2 interior nodes, x-major: node(ix, iy) = ix * (m-1) + iy, where
/// ix, iy in [0, m-2] stand for x_{ix+1}, y_{iy+1}.
class Grid2D {
public:
  Grid2D(double length, Index m_intervals) : length_(length), m_(m_intervals) {
    if (!(length > 0.0) || m_intervals < 2)
      throw Error(ErrorKind::ConfigInvalid,
                  "grid needs L > 0 and at least 2 intervals");
  }

  double length() const noexcept { return length_; }
  Index intervals() const noexcept { return m_; }
  double h() const noexcept { return length_ / static_cast<double>(m_); }
  /// Interior points per axis.
  Index points() const noexcept { return m_ - 1; }
  Index size() const noexcept { return points() * points(); }

  Index node(Index ix, Index iy) const noexcept { return ix * points() + iy; }
  double x(Index ix) const noexcept { return static_cast<double>(ix + 1) * h(); }
  double y(Index iy) const noexcept { return static_cast<double>(iy + 1) * h(); }

private:
  double length_;
  Index m_;
};

/// Spatial grid times N_v equispaced angles theta_l = 2*pi*l/N_v. Index order
/// is space-major, velocity-minor: index = node * N_v + l.
class PhaseGrid {
public:
  PhaseGrid(Grid2D space, Index n_v) : space_(space), n_v_(n_v) {
    if (n_v < 1)
      throw Error(ErrorKind::ConfigInvalid, "N_v must be positive");
  }

  const Grid2D &space() const noexcept { return space_; }
  Index angles() const noexcept { return n_v_; }
  Index size() const noexcept { return space_.size() * n_v_; }
  Index index(Index node, Index l) const noexcept { return node * n_v_ + l; }

  double theta(Index l) const noexcept {
    return 2.0 * std::numbers::pi * static_cast<double>(l) /
           static_cast<double>(n_v_);
  }
  double weight() const noexcept { return 1.0 / static_cast<double>(n_v_); }

private:
  Grid2D space_;
  Index n_v_;
};

} // namespace optbasis
