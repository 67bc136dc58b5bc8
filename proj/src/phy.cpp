#include "crmcast/phy.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace crmcast {

void PhyParams::validate() const {
  if (!(pt > 0) || !(path_loss_exp > 0) || !(wavelength > 0) || !(noise_psd > 0) ||
      !(bandwidth > 0) || !(packet_bits > 0))
    throw std::invalid_argument("phy parameters must all be strictly positive");
}

double wavelength_for(double carrier_hz) {
  if (!(carrier_hz > 0)) throw std::invalid_argument("carrier frequency must be positive");
  return kSpeedOfLight / carrier_hz;
}

double received_power(const PhyParams& phy, double d, double gain) {
  if (!(d > 0.0)) throw std::domain_error("received_power: distance must be positive");
  const double aperture = phy.wavelength / (4.0 * std::numbers::pi);
  return phy.pt / std::pow(d, phy.path_loss_exp) * aperture * aperture * gain;
}

double data_rate(const PhyParams& phy, double pr) {
  return phy.bandwidth * std::log2(1.0 + pr / (phy.bandwidth * phy.noise_psd));
}

double tx_time(const PhyParams& phy, double rate) {
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  return phy.packet_bits / rate;
}

double pos(double tx_time, double mu_idle) {
  if (std::isinf(tx_time)) return 0.0;
  return std::exp(-tx_time / mu_idle);
}

}  // namespace crmcast
