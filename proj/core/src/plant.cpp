#include "hdpid/plant.hpp"

#include <cmath>

namespace hdpid {

AircraftPlant::AircraftPlant() : AircraftPlant(Params{}) {}

AircraftPlant::AircraftPlant(Params p) : params_(p) {
  if (!(params_.v > 0.0)) throw InvalidInput("AircraftPlant: V must be positive");
}

void AircraftPlant::check_input(const Vec& u) const {
  if (u.size() != 2) throw InvalidInput("AircraftPlant: input dim");
  if (std::abs(u[0]) >= M_PI / 2.0 - params_.phi_guard)
    throw NearSingularInput("AircraftPlant: |phi| too close to pi/2");
}

Vec AircraftPlant::eval_f(const Vec& x, const Vec& u) const {
  if (x.size() != 2) throw InvalidInput("AircraftPlant: state dim");
  check_input(u);
  const double gamma = x[1], phi = u[0], nz = u[1];
  const double gv = params_.g / params_.v;
  return {gv * std::tan(phi), gv * (nz * std::cos(phi) - std::cos(gamma))};
}

Mat AircraftPlant::jac_x(const Vec& x, const Vec& u) const {
  if (x.size() != 2) throw InvalidInput("AircraftPlant: state dim");
  check_input(u);
  const double gv = params_.g / params_.v;
  Mat j(2, 2);
  j(1, 1) = gv * std::sin(x[1]);
  return j;
}

Mat AircraftPlant::jac_u(const Vec& x, const Vec& u) const {
  if (x.size() != 2) throw InvalidInput("AircraftPlant: state dim");
  check_input(u);
  const double phi = u[0], nz = u[1];
  const double gv = params_.g / params_.v;
  const double sec = 1.0 / std::cos(phi);
  Mat j(2, 2);
  j(0, 0) = gv * sec * sec;
  j(1, 0) = -gv * nz * std::sin(phi);
  j(1, 1) = gv * std::cos(phi);
  return j;
}

std::uint64_t splitmix64(std::uint64_t key) {
  std::uint64_t z = key + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

DisturbanceSampler::DisturbanceSampler(std::size_t dim, double l_d, std::uint64_t seed,
                                       double hold_interval)
    : dim_(dim), l_d_(l_d), seed_(seed), hold_(hold_interval) {
  if (!(hold_ > 0.0)) throw InvalidInput("DisturbanceSampler: hold interval must be positive");
  if (l_d_ < 0.0) throw InvalidInput("DisturbanceSampler: negative amplitude");
}

Vec DisturbanceSampler::sample(double t) const {
  Vec d(dim_, 0.0);
  if (l_d_ == 0.0) return d;
  const auto step = static_cast<std::uint64_t>(std::floor(t / hold_));
  for (std::size_t i = 0; i < dim_; ++i) {
    // Two mixing rounds decorrelate (seed, step, component).
    const std::uint64_t key = splitmix64(seed_ ^ splitmix64(step * 0x100000001b3ULL + i));
    const double u01 = static_cast<double>(key >> 11) * 0x1.0p-53;  // [0,1)
    d[i] = (u01 - 0.5) * l_d_;
  }
  return d;
}

}  // namespace hdpid
