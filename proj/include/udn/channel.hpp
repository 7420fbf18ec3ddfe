#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "udn/errors.hpp"
#include "udn/geometry.hpp"
#include "udn/rng.hpp"

namespace udn {

/// Shared link-budget constants. All values are linear scale; dB conversion
/// happens at the configuration boundary only.
struct ChannelParams {
  double beta0 = 1e-6;          // power gain at 1 m reference distance
  double alpha_d2d = 3.0;       // ground-ground path-loss exponent
  double noise_power_w = 1e-14; // receiver noise power
  double bandwidth_hz = 1.0;    // 1 Hz default: rates are spectral efficiencies
};

inline void validate(const ChannelParams& p) {
  if (!(p.beta0 > 0.0)) throw invalid_parameter("ChannelParams: beta0 must be > 0");
  if (!(p.alpha_d2d >= 2.0))
    throw invalid_parameter("ChannelParams: alpha_d2d must be >= 2");
  if (!(p.noise_power_w > 0.0))
    throw invalid_parameter("ChannelParams: noise power must be > 0");
  if (!(p.bandwidth_hz > 0.0))
    throw invalid_parameter("ChannelParams: bandwidth must be > 0");
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

enum class LinkKind { los, rayleigh };

struct Link {
  Point3 tx;
  Point3 rx;
  LinkKind kind = LinkKind::los;
  double power_w = 0.0;
  double power_max_w = 0.0;
};

inline void validate(const Link& l) {
  validate(l.tx);
  validate(l.rx);
  if (!(l.power_w >= 0.0) || !(l.power_w <= l.power_max_w))
    throw invalid_parameter("Link: power must lie in [0, power_max]");
  if (l.kind == LinkKind::los && !(l.tx.z > 0.0 || l.rx.z > 0.0))
    throw invalid_parameter("Link: LOS links need an airborne endpoint");
}

/// Free-space square-law gain beta0 / d^2 for an air-ground link.
inline double los_gain(const Point3& tx, const Point3& rx, const ChannelParams& params) {
  const double d2 = squared_distance(tx, rx);
  if (d2 == 0.0) throw singular_geometry("los_gain: coincident endpoints");
  return params.beta0 / d2;
}

/// Rayleigh-faded ground link: beta0 * d^-alpha times a unit-mean
/// exponential fade drawn from the given stream.
inline double rayleigh_gain(const Point3& tx, const Point3& rx,
                            const ChannelParams& params, Rng& rng) {
  const double d = distance(tx, rx);
  if (d == 0.0) throw singular_geometry("rayleigh_gain: coincident endpoints");
  return params.beta0 * std::pow(d, -params.alpha_d2d) * rng.exponential();
}

inline double rayleigh_gain(const Point3& tx, const Point3& rx,
                            const ChannelParams& params, std::uint64_t seed) {
  Rng rng(seed);
  return rayleigh_gain(tx, rx, params, rng);
}

/// SINR from realized powers and gains. Pure arithmetic; no randomness.
inline double sinr(double signal_power_w, double signal_gain,
                   std::span<const double> interferer_powers_w,
                   std::span<const double> interferer_gains,
                   const ChannelParams& params) {
  if (!(signal_power_w >= 0.0) || !(signal_gain >= 0.0))
    throw invalid_parameter("sinr: negative signal power or gain");
  if (interferer_powers_w.size() != interferer_gains.size())
    throw invalid_parameter("sinr: powers/gains size mismatch");
  double denom = params.noise_power_w;
  for (std::size_t i = 0; i < interferer_powers_w.size(); ++i) {
    if (!(interferer_powers_w[i] >= 0.0) || !(interferer_gains[i] >= 0.0))
      throw invalid_parameter("sinr: negative interferer power or gain");
    denom += interferer_powers_w[i] * interferer_gains[i];
  }
  return signal_power_w * signal_gain / denom;
}

/// Link-object overload; gains[0] is the signal's realized gain and
/// gains[1 + j] the gain from interferer j toward the signal's receiver.
inline double sinr(const Link& signal, std::span<const Link> interferers,
                   std::span<const double> gains, const ChannelParams& params) {
  if (gains.size() != interferers.size() + 1)
    throw invalid_parameter("sinr: need one gain per link (signal first)");
  double denom = params.noise_power_w;
  for (std::size_t j = 0; j < interferers.size(); ++j) {
    if (!(interferers[j].power_w >= 0.0) || !(gains[j + 1] >= 0.0))
      throw invalid_parameter("sinr: negative interferer power or gain");
    denom += interferers[j].power_w * gains[j + 1];
  }
  if (!(signal.power_w >= 0.0) || !(gains[0] >= 0.0))
    throw invalid_parameter("sinr: negative signal power or gain");
  return signal.power_w * gains[0] / denom;
}

/// Shannon spectral efficiency log2(1 + sinr) in bit/s/Hz.
inline double spectral_efficiency(double sinr_value) {
  if (!(sinr_value >= 0.0))
    throw invalid_parameter("spectral_efficiency: SINR must be >= 0");
  return std::log1p(sinr_value) / M_LN2;
}

}  // namespace udn
