#pragma once

// Link equations: log-distance path loss with Rayleigh power gain, Shannon
// rate, packet airtime and probability of success against an exponential
// residual idle time.

namespace crmcast {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kBitsPerKilobyte = 8.0 * 1024.0;

struct PhyParams {
  double pt = 0.1;                 // W
  double path_loss_exp = 4.0;
  double wavelength = kSpeedOfLight / 600e6;  // m
  double noise_psd = 1e-18;        // W/Hz
  double bandwidth = 1e6;          // Hz
  double packet_bits = 4 * kBitsPerKilobyte;

  void validate() const;
};

double wavelength_for(double carrier_hz);

/// (pt / d^n) (lambda / 4 pi)^2 gain. Throws std::domain_error for d <= 0.
double received_power(const PhyParams& phy, double d, double gain);

/// Bw log2(1 + pr / (Bw N0)).
double data_rate(const PhyParams& phy, double pr);

/// D / rate; +inf when rate is 0.
double tx_time(const PhyParams& phy, double rate);

/// exp(-tx_time / mu_idle); 0 for an infinite tx_time.
double pos(double tx_time, double mu_idle);

}  // namespace crmcast
