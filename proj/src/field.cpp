#include "tunneltime/field.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "tunneltime/errors.hpp"

namespace tunnel {

namespace {

constexpr std::size_t kTimeBlock = 64;  // phases re-seeded exactly at every block start

StationaryField component_field(double x, const ScatteringAmplitudes& amps, Component component) {
  if (component == Component::Full) return stationary_field(x, amps);
  const Complex e = std::polar(1.0, amps.k * x);
  const Complex ik(0.0, amps.k);
  return {e, ik * e, -amps.k * amps.k * e};
}

}  // namespace

WavePacket::WavePacket(const BarrierSpec& barrier, const PacketSpec& packet, KGrid grid)
    : barrier_(barrier), packet_(packet), grid_(std::move(grid)) {
  barrier_.validate();
  packet_.validate();
  if (grid_.nodes.empty() || grid_.nodes.size() != grid_.weights.size()) {
    throw DomainError("wave packet needs a non-empty k grid");
  }
  const std::size_t nk = grid_.size();
  amps_.reserve(nk);
  coeff_.resize(nk);
  omega_.resize(nk);
  for (std::size_t j = 0; j < nk; ++j) {
    const double k = grid_.nodes[j];
    amps_.push_back(scattering_amplitudes(k, barrier_));
    coeff_[j] = grid_.weights[j] * gaussian_weight(k, packet_, grid_.c_norm);
    omega_[j] = angular_frequency(k);
  }
}

FieldSample WavePacket::evaluate(double x, double t, Component component) const {
  FieldSample s{};
  for (std::size_t j = 0; j < amps_.size(); ++j) {
    const StationaryField f = component_field(x, amps_[j], component);
    const Complex phase = coeff_[j] * std::polar(1.0, -omega_[j] * t);
    s.psi += f.psi * phase;
    s.dpsi_dx += f.dpsi * phase;
    s.dpsi_dt += Complex(0.0, -omega_[j]) * f.psi * phase;
    s.d2psi_dx2 += f.d2psi * phase;
  }
  return s;
}

template <class Sink>
void WavePacket::sweep(std::span<const double> xs, const TimeGrid& times, Component component, bool need_gradient,
                       Sink&& sink) const {
  const auto nk = static_cast<Eigen::Index>(amps_.size());
  const auto nx = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXcd values(nx, nk);
  Eigen::MatrixXcd gradients(need_gradient ? nx : 0, nk);
  for (Eigen::Index ix = 0; ix < nx; ++ix) {
    for (Eigen::Index j = 0; j < nk; ++j) {
      const StationaryField f = component_field(xs[static_cast<std::size_t>(ix)], amps_[static_cast<std::size_t>(j)], component);
      values(ix, j) = coeff_[static_cast<std::size_t>(j)] * f.psi;
      if (need_gradient) gradients(ix, j) = coeff_[static_cast<std::size_t>(j)] * f.dpsi;
    }
  }

  std::vector<Complex> advance(amps_.size());
  for (std::size_t j = 0; j < amps_.size(); ++j) advance[j] = std::polar(1.0, -omega_[j] * times.step);

  Eigen::MatrixXcd phases(nk, static_cast<Eigen::Index>(kTimeBlock));
  Eigen::MatrixXcd psi_block, dpsi_block;
  for (std::size_t start = 0; start < times.n; start += kTimeBlock) {
    const std::size_t len = std::min(kTimeBlock, times.n - start);
    const auto cols = static_cast<Eigen::Index>(len);
    const double t_start = times.at(start);
    for (Eigen::Index j = 0; j < nk; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      Complex ph = std::polar(1.0, -omega_[ju] * t_start);
      phases(j, 0) = ph;
      for (Eigen::Index b = 1; b < cols; ++b) {
        ph *= advance[ju];
        phases(j, b) = ph;
      }
    }
    psi_block.noalias() = values * phases.leftCols(cols);
    if (need_gradient) dpsi_block.noalias() = gradients * phases.leftCols(cols);
    sink(start, len, psi_block, dpsi_block);
  }
}

std::vector<std::vector<double>> WavePacket::flux_series(std::span<const double> xs, const TimeGrid& times,
                                                         Component component) const {
  std::vector<std::vector<double>> out(xs.size(), std::vector<double>(times.n, 0.0));
  const double scale = hbar_over_m();
  sweep(xs, times, component, true,
        [&](std::size_t start, std::size_t len, const Eigen::MatrixXcd& psi, const Eigen::MatrixXcd& dpsi) {
          for (std::size_t ix = 0; ix < xs.size(); ++ix) {
            for (std::size_t b = 0; b < len; ++b) {
              const auto r = static_cast<Eigen::Index>(ix);
              const auto c = static_cast<Eigen::Index>(b);
              out[ix][start + b] = scale * (std::conj(psi(r, c)) * dpsi(r, c)).imag();
            }
          }
        });
  return out;
}

std::vector<double> WavePacket::density_integral(std::span<const double> xs, std::span<const double> wx,
                                                 const TimeGrid& times) const {
  if (xs.size() != wx.size()) throw DomainError("density_integral: nodes and weights differ in length");
  std::vector<double> out(times.n, 0.0);
  sweep(xs, times, Component::Full, false,
        [&](std::size_t start, std::size_t len, const Eigen::MatrixXcd& psi, const Eigen::MatrixXcd&) {
          for (std::size_t b = 0; b < len; ++b) {
            double acc = 0.0;
            for (std::size_t ix = 0; ix < xs.size(); ++ix) {
              acc += wx[ix] * std::norm(psi(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(b)));
            }
            out[start + b] = acc;
          }
        });
  return out;
}

double WavePacket::spectral_norm() const {
  double acc = 0.0;
  for (std::size_t j = 0; j < amps_.size(); ++j) {
    acc += grid_.weights[j] * std::pow(gaussian_weight(grid_.nodes[j], packet_, grid_.c_norm), 2);
  }
  return kTwoPi * acc;
}

double WavePacket::transmission_probability() const {
  double acc = 0.0;
  for (std::size_t j = 0; j < amps_.size(); ++j) {
    acc += grid_.weights[j] * std::pow(gaussian_weight(grid_.nodes[j], packet_, grid_.c_norm), 2) * std::norm(amps_[j].t);
  }
  return kTwoPi * acc;
}

}  // namespace tunnel
