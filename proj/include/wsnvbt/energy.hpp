#pragma once

#include <span>
#include <stdexcept>

namespace wsnvbt {

/// First-order radio model. Path-loss exponent is fixed at 2.
struct RadioParams {
  double e_elec = 50e-9;       // J/bit, electronics
  double e_amp = 100e-12;      // J/bit/m^2, amplifier
  double packet_bits = 4096;   // 512-byte packet

  void validate() const {
    if (!(e_elec > 0.0) || !(e_amp > 0.0) || !(packet_bits > 0.0)) {
      throw std::invalid_argument("radio parameters must be strictly positive");
    }
  }
};

/// Energy drawn from the sender to push one packet over `distance` meters.
inline double tx_cost(const RadioParams& p, double distance) {
  if (distance < 0.0) throw std::invalid_argument("tx_cost: negative distance");
  return p.e_elec * p.packet_bits + p.e_amp * p.packet_bits * distance * distance;
}

/// Energy drawn from a receiver for one packet; distance independent.
inline double rx_cost(const RadioParams& p) { return p.e_elec * p.packet_bits; }

/// Cost of a single hop u -> v as seen by the route: the sender's tx plus the
/// receiver's rx, except that the sink receives for free.
inline double hop_weight(const RadioParams& p, double distance, bool to_sink) {
  return tx_cost(p, distance) + (to_sink ? 0.0 : rx_cost(p));
}

/// Consumption of a whole route. `hop_distances` runs from the origin toward
/// the sink; the last hop lands on the sink. Empty means the origin is the sink.
inline double path_consumption(const RadioParams& p, std::span<const double> hop_distances) {
  double total = 0.0;
  for (std::size_t k = 0; k < hop_distances.size(); ++k) {
    total += hop_weight(p, hop_distances[k], k + 1 == hop_distances.size());
  }
  return total;
}

}  // namespace wsnvbt
